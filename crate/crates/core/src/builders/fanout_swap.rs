use crate::circuit::{Circuit, Gate, Qubit};

use super::{circuit_with, reg_or_empty, BuildError, BuildInfo, BuilderKind, BuilderSpec, QramCircuit, QueryPorts};

/// Ancillas needed by [`swap_cascade`] for `2^m` slots of `w` bits.
pub(crate) fn cascade_ancillas(m: usize, w: usize) -> usize {
    let k = if m == 0 { 0 } else { (1usize << (m - 1)) * w };
    if k >= 2 {
        k
    } else {
        0
    }
}

/// Swaps slot `i` (selected by `addr`) into slot 0. Level `l` pairs slots
/// `j` and `j + 2^l`; its swaps are driven by fanned-out copies of address
/// bit `l` so the whole level runs in parallel.
pub(crate) fn swap_cascade(c: &mut Circuit, addr: &[Qubit], mem: &[Qubit], w: usize, anc: &[Qubit]) {
    let slots = mem.len() / w;
    for (l, &bit) in addr.iter().enumerate() {
        let stride = 1usize << l;
        let pairs: Vec<(Qubit, Qubit)> = (0..slots)
            .step_by(2 * stride)
            .flat_map(|j| (0..w).map(move |b| (j * w + b, (j + stride) * w + b)))
            .map(|(a, b)| (mem[a], mem[b]))
            .collect();
        if pairs.len() == 1 {
            c.push(Gate::cswap(bit, false, pairs[0].0, pairs[0].1));
            continue;
        }
        let copies = &anc[..pairs.len()];
        c.push(Gate::fanout(bit, copies.iter().copied()));
        for (&ctl, &(a, b)) in copies.iter().zip(&pairs) {
            c.push(Gate::cswap(ctl, false, a, b));
        }
        c.push(Gate::fanout(bit, copies.iter().copied()));
    }
}

/// Fanout-and-swap lookup into a quantum memory register of `2^n` words.
///
/// Stage A moves the addressed word into slot 0, stage B copies it out (or
/// swaps it out when `swap_variant` is set) and stage C undoes stage A.
pub fn build_fanout_swap_qraqm(n: usize, w: usize, swap_variant: bool) -> Result<QramCircuit, BuildError> {
    if n == 0 {
        return Err(BuildError::Unsupported("fanout_swap_qraqm needs at least one address bit".into()));
    }
    let slots = 1usize << n;
    let mut c = circuit_with(&[("addr", n), ("out", w), ("mem", slots * w), ("anc", cascade_ancillas(n, w))]);
    let addr = c.reg("addr")?;
    let out = c.reg("out")?;
    let mem = c.reg("mem")?;
    let anc = reg_or_empty(&c, "anc");

    let mut stage_a = c.empty_like();
    swap_cascade(&mut stage_a, &addr, &mem, w, &anc);
    c.extend_from(&stage_a, Default::default())?;
    for b in 0..w {
        c.push(Gate::cnot(mem[b], out[b]));
        if swap_variant {
            c.push(Gate::cnot(out[b], mem[b]));
            c.push(Gate::cnot(mem[b], out[b]));
        }
    }
    c.extend_from(&stage_a.inverse(), Default::default())?;

    let spec = BuilderSpec::new(BuilderKind::FanoutSwapQraqm).swap_variant(swap_variant);
    let mut info = BuildInfo::new(&spec, slots, slots, w);
    info.swap_variant = Some(swap_variant);
    Ok(QramCircuit {
        circuit: c,
        info,
        spec,
        queries: vec![QueryPorts { address: addr, output: out }],
        memory: mem,
        control: None,
        preset_ones: vec![],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;

    #[test]
    fn n3_structure() {
        let q = build_fanout_swap_qraqm(3, 1, false).unwrap();
        let swaps = q.circuit.gates().filter(|g| g.kind == GateKind::Cswap).count();
        assert_eq!(swaps, 14);
        assert_eq!(q.circuit.register("anc").unwrap().size, 4);
        let fanouts = q.circuit.gates().filter(|g| g.kind == GateKind::FanoutCnot).count();
        // levels with 4 and 2 pairs use a copy/clear fanout pair, mirrored
        assert_eq!(fanouts, 8);
    }

    #[test]
    fn n1_has_no_ancilla() {
        let q = build_fanout_swap_qraqm(1, 1, false).unwrap();
        assert!(q.circuit.register("anc").is_none());
        assert_eq!(q.circuit.gate_count(), 3);
    }
}
