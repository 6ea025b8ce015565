use crate::circuit::{Circuit, Gate, Qubit};
use crate::table::BitTable;

use super::{circuit_with, BuildError, BuildInfo, BuilderKind, BuilderSpec, QramCircuit, QueryPorts};

/// Router tree in heap order: node `k` (1-based) has children `2k`, `2k+1`;
/// nodes `N..2N` are the leaves.
pub(crate) struct Tree {
    pub n: usize,
    pub route: Vec<Qubit>,
    pub ctl: Vec<Qubit>,
}

impl Tree {
    pub fn new(c: &Circuit, n: usize) -> Result<Self, BuildError> {
        Ok(Tree { n, route: c.reg("route")?, ctl: c.reg("ctl")? })
    }

    pub fn r(&self, k: usize) -> Qubit {
        self.route[k - 1]
    }

    pub fn c(&self, k: usize) -> Qubit {
        self.ctl[k - 1]
    }

    fn level(l: usize) -> std::ops::Range<usize> {
        (1 << l)..(1 << (l + 1))
    }

    /// Moves each `from(k)` at depth `l` into `to(child)` chosen by `c_k`.
    fn steer(&self, c: &mut Circuit, l: usize, from: impl Fn(usize) -> Qubit, to: impl Fn(usize) -> Qubit) {
        for k in Self::level(l) {
            c.push(Gate::cswap(self.c(k), true, from(k), to(2 * k)));
            c.push(Gate::cswap(self.c(k), false, from(k), to(2 * k + 1)));
        }
    }

    /// Loads the address (msb first) into the router controls.
    pub fn load_address(&self, c: &mut Circuit, addr: &[Qubit]) {
        for j in 0..self.n {
            let bit = addr[self.n - 1 - j];
            if j == 0 {
                c.push(Gate::cnot(bit, self.c(1)));
                continue;
            }
            c.push(Gate::cnot(bit, self.r(1)));
            for l in 0..j - 1 {
                self.steer(c, l, |k| self.r(k), |k| self.r(k));
            }
            self.steer(c, j - 1, |k| self.r(k), |k| self.c(k));
        }
    }

    /// Pulls the selected leaf up into `r_1`.
    pub fn route_up(&self, c: &mut Circuit, leaf: impl Fn(usize) -> Qubit) {
        let big = 1usize << self.n;
        for l in (0..self.n).rev() {
            if l + 1 == self.n {
                self.steer(c, l, |k| self.r(k), |k| leaf(k - big));
            } else {
                self.steer(c, l, |k| self.r(k), |k| self.r(k));
            }
        }
    }
}

/// Circuit bucket-brigade lookup.
///
/// Registers: `route`/`ctl` hold the router pair of each of the `N-1` tree
/// nodes; `leaves` is prepared with the table (a classical preparation that
/// costs no gates). The address is routed in, each word bit is swapped up to
/// the root and copied out, and everything is undone in mirror order. Greedy
/// layer packing pipelines consecutive address bits.
pub fn build_bucket_brigade(table: &BitTable) -> Result<QramCircuit, BuildError> {
    let padded = table.padded_pow2();
    let n = padded.address_bits();
    let w = padded.word_width();
    let big = padded.len();
    let mut c = circuit_with(&[("addr", n), ("out", w), ("route", big - 1), ("ctl", big - 1), ("leaves", big * w)]);
    let addr = c.reg("addr")?;
    let out = c.reg("out")?;
    let leaves = c.reg("leaves")?;
    let tree = Tree::new(&c, n)?;

    let mut load = c.empty_like();
    tree.load_address(&mut load, &addr);
    c.extend_from(&load, Default::default())?;

    for b in 0..w {
        let mut up = c.empty_like();
        tree.route_up(&mut up, |i| leaves[i * w + b]);
        c.extend_from(&up, Default::default())?;
        c.push(Gate::cnot(tree.r(1), out[b]));
        c.extend_from(&up.inverse(), Default::default())?;
    }
    c.extend_from(&load.inverse(), Default::default())?;

    let preset_ones = (0..big * w).filter(|&k| padded.bit(k / w, k % w)).map(|k| leaves[k]).collect();

    let spec = BuilderSpec::new(BuilderKind::BucketBrigade);
    let mut info = BuildInfo::new(&spec, table.len(), big, w);
    info.routing_ancillas = Some(2 * (big - 1));
    Ok(QramCircuit {
        circuit: c,
        info,
        spec,
        queries: vec![QueryPorts { address: addr, output: out }],
        memory: vec![],
        control: None,
        preset_ones,
    })
}

/// Closed-form CSWAP count of [`build_bucket_brigade`] for `N = 2^n` and
/// word width `w`: loading routes bit `j` through `j` levels of `2^l` nodes
/// with two CSWAPs each (mirrored on unload), and each word bit is routed up
/// through all `N-1` nodes and back.
pub fn bucket_brigade_cswap_count(n: usize, w: usize) -> u64 {
    let big = 1u64 << n;
    let load: u64 = (1..n as u64).map(|j| 2 * ((1u64 << j) - 1)).sum();
    2 * load + w as u64 * 4 * (big - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;

    #[test]
    fn ancilla_and_swap_counts() {
        for n in 1..=6 {
            let t = BitTable::random(1 << n, 1, n as u64).unwrap();
            let q = build_bucket_brigade(&t).unwrap();
            assert_eq!(q.info.routing_ancillas, Some(2 * ((1 << n) - 1)));
            let swaps = q.circuit.gates().filter(|g| g.kind == GateKind::Cswap).count() as u64;
            assert_eq!(swaps, bucket_brigade_cswap_count(n, 1));
            // closed form 4(2^{n+1} - n - 2)
            assert_eq!(swaps, 4 * ((1u64 << (n + 1)) - n as u64 - 2));
        }
    }

    #[test]
    fn n8_routing_register_is_fourteen() {
        let q = build_bucket_brigade(&BitTable::random(8, 1, 1).unwrap()).unwrap();
        let r = q.circuit.register("route").unwrap().size + q.circuit.register("ctl").unwrap().size;
        assert_eq!(r, 14);
    }
}
