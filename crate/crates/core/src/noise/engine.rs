//! Bit-level trajectory executor.
//!
//! Every builder circuit is a basis permutation, so a Pauli-X trajectory is
//! a classical bit string pushed through the gates. Z errors only change the
//! sign of the single basis term, which is tracked as one parity bit.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use thiserror::Error;

use crate::builders::QramCircuit;
use crate::circuit::GateKind;
use crate::table::BitTable;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("noise trajectories need permutation circuits; found {0}")]
    NonPermutation(GateKind),
}

/// Where errors are injected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Locus {
    /// Before every layer, on every qubit that is live at that layer: query
    /// ports for the whole circuit, other qubits from their first to their
    /// last gate.
    #[default]
    LiveQubits,
    /// Before every gate, on that gate's operands only.
    GateOperands,
}

#[derive(Debug, Clone, Copy)]
enum OpKind {
    Flip,
    Swap,
    Reset,
}

#[derive(Debug, Clone)]
struct Op {
    kind: OpKind,
    controls: Vec<(u32, bool)>,
    targets: Vec<u32>,
}

/// A circuit compiled for fast repeated noisy execution.
#[derive(Debug, Clone)]
pub struct Compiled {
    width: usize,
    layers: Vec<Vec<Op>>,
    /// Flattened error sites: `sites[site_start[l]..site_start[l+1]]` are hit
    /// before layer `l`.
    sites: Vec<u32>,
    site_start: Vec<usize>,
    address: Vec<u32>,
    output: Vec<u32>,
    base_input: Vec<bool>,
    table: BitTable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TrialOutcome {
    pub output: u64,
    pub address_intact: bool,
    pub output_correct: bool,
    pub error_count: u32,
    pub phase_flipped: bool,
}

impl TrialOutcome {
    pub fn failed(&self) -> bool {
        !self.output_correct || !self.address_intact
    }
}

#[inline]
fn get(bits: &[u64], q: u32) -> bool {
    (bits[(q >> 6) as usize] >> (q & 63)) & 1 == 1
}

#[inline]
fn flip(bits: &mut [u64], q: u32) {
    bits[(q >> 6) as usize] ^= 1 << (q & 63);
}

impl Compiled {
    /// `exempt` qubits never receive errors.
    pub fn new(q: &QramCircuit, table: &BitTable, locus: Locus, exempt: &[bool]) -> Result<Self, EngineError> {
        let width = q.circuit.width();
        let mut layers = Vec::with_capacity(q.circuit.depth());
        for layer in q.circuit.layers() {
            let mut ops = Vec::with_capacity(layer.len());
            for g in layer {
                let kind = match g.kind {
                    GateKind::Cswap => OpKind::Swap,
                    GateKind::AndUncompute | GateKind::ClassicalPhaseFixup => OpKind::Reset,
                    GateKind::H => return Err(EngineError::NonPermutation(g.kind)),
                    _ => OpKind::Flip,
                };
                ops.push(Op {
                    kind,
                    controls: g.controls().iter().zip(&g.negated).map(|(c, &n)| (c.0, n)).collect(),
                    targets: g.targets().iter().map(|t| t.0).collect(),
                });
            }
            layers.push(ops);
        }

        let port = q.queries.iter().flat_map(|p| p.address.iter().chain(&p.output)).map(|x| x.index());
        let mut sites = Vec::new();
        let mut site_start = Vec::with_capacity(layers.len() + 1);
        match locus {
            Locus::LiveQubits => {
                let depth = layers.len();
                let mut first = vec![usize::MAX; width];
                let mut last = vec![0usize; width];
                for (l, layer) in q.circuit.layers().iter().enumerate() {
                    for g in layer {
                        for x in &g.qubits {
                            first[x.index()] = first[x.index()].min(l);
                            last[x.index()] = l;
                        }
                    }
                }
                for i in port {
                    first[i] = 0;
                    last[i] = depth.saturating_sub(1);
                }
                for l in 0..depth {
                    site_start.push(sites.len());
                    for i in 0..width {
                        if first[i] <= l && l <= last[i] && !exempt[i] {
                            sites.push(i as u32);
                        }
                    }
                }
            }
            Locus::GateOperands => {
                for layer in q.circuit.layers() {
                    site_start.push(sites.len());
                    for g in layer {
                        sites.extend(g.qubits.iter().filter(|x| !exempt[x.index()]).map(|x| x.0));
                    }
                }
            }
        }
        site_start.push(sites.len());

        let port0 = &q.queries[0];
        Ok(Compiled {
            width,
            layers,
            sites,
            site_start,
            address: port0.address.iter().map(|x| x.0).collect(),
            output: port0.output.iter().map(|x| x.0).collect(),
            base_input: q.basis_input(&[0], table, true),
            table: table.clone(),
        })
    }

    /// Number of (site, layer) exposures per trajectory.
    pub fn exposures(&self) -> usize {
        self.sites.len()
    }

    pub fn address_space(&self) -> usize {
        1 << self.address.len()
    }

    fn input(&self, address: usize) -> Vec<u64> {
        let mut bits = vec![0u64; self.width.div_ceil(64).max(1)];
        for (i, &b) in self.base_input.iter().enumerate() {
            if b {
                flip(&mut bits, i as u32);
            }
        }
        for (b, &q) in self.address.iter().enumerate() {
            if get(&bits, q) != ((address >> b) & 1 == 1) {
                flip(&mut bits, q);
            }
        }
        bits
    }

    fn expected(&self, address: usize) -> u64 {
        self.table.entries().get(address).copied().unwrap_or(0)
    }

    /// Runs one trajectory with the given sorted X and Z error sites
    /// (indices into the flattened exposure list).
    pub fn run_with_errors(&self, address: usize, x_sites: &[usize], z_sites: &[usize]) -> TrialOutcome {
        let mut bits = self.input(address);
        let mut phase = false;
        let (mut xi, mut zi) = (0, 0);
        for (l, layer) in self.layers.iter().enumerate() {
            let end = self.site_start[l + 1];
            while xi < x_sites.len() && x_sites[xi] < end {
                flip(&mut bits, self.sites[x_sites[xi]]);
                xi += 1;
            }
            while zi < z_sites.len() && z_sites[zi] < end {
                phase ^= get(&bits, self.sites[z_sites[zi]]);
                zi += 1;
            }
            for op in layer {
                let on = op.controls.iter().all(|&(c, neg)| get(&bits, c) != neg);
                match op.kind {
                    OpKind::Flip => {
                        if on {
                            op.targets.iter().for_each(|&t| flip(&mut bits, t));
                        }
                    }
                    OpKind::Swap => {
                        let (a, b) = (op.targets[0], op.targets[1]);
                        if on && get(&bits, a) != get(&bits, b) {
                            flip(&mut bits, a);
                            flip(&mut bits, b);
                        }
                    }
                    OpKind::Reset => {
                        for &t in &op.targets {
                            if get(&bits, t) {
                                flip(&mut bits, t);
                            }
                        }
                    }
                }
            }
        }
        let output = self.output.iter().enumerate().fold(0u64, |acc, (b, &q)| acc | (get(&bits, q) as u64) << b);
        let address_intact = self.address.iter().enumerate().all(|(b, &q)| get(&bits, q) == ((address >> b) & 1 == 1));
        TrialOutcome {
            output,
            address_intact,
            output_correct: output == self.expected(address),
            error_count: (x_sites.len() + z_sites.len()) as u32,
            phase_flipped: phase,
        }
    }

    /// Sorted error sites, each exposure hit independently with probability `p`.
    pub fn sample_sites(&self, p: f64, rng: &mut ChaCha8Rng) -> Vec<usize> {
        sample_sites(self.sites.len(), p, rng)
    }

    /// One random-address trajectory.
    pub fn trial(&self, p: f64, bitflip: bool, phaseflip: bool, rng: &mut ChaCha8Rng) -> (usize, TrialOutcome) {
        let address = rng.random_range(0..self.address_space());
        let x = if bitflip { self.sample_sites(p, rng) } else { vec![] };
        let z = if phaseflip { self.sample_sites(p, rng) } else { vec![] };
        if x.is_empty() && z.is_empty() {
            let output = self.expected(address);
            let clean = TrialOutcome {
                output,
                address_intact: true,
                output_correct: true,
                error_count: 0,
                phase_flipped: false,
            };
            return (address, clean);
        }
        (address, self.run_with_errors(address, &x, &z))
    }
}

/// Bernoulli(p) subset of `0..n` by geometric gap sampling.
pub(crate) fn sample_sites(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<usize> {
    if p <= 0.0 || n == 0 {
        return vec![];
    }
    if p >= 1.0 {
        return (0..n).collect();
    }
    let gap = Geometric::new(p).expect("valid probability");
    let mut out = Vec::new();
    let mut pos = 0usize;
    loop {
        let skip = gap.sample(rng);
        pos = match pos.checked_add(skip as usize) {
            Some(x) if x < n => x,
            _ => break,
        };
        out.push(pos);
        pos += 1;
    }
    out
}
