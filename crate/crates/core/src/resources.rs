//! Gate, T, depth and width accounting under the two cost profiles.

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, GateKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileName {
    /// Every primitive has depth 1, except fanouts which cost one gate per
    /// target and a balanced tree of depth.
    UnitGate,
    /// Lattice-surgery style: a multi-target CNOT is a single depth-1 Clifford.
    SurfaceCode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceProfile {
    pub name: ProfileName,
    /// Cost every Toffoli-class gate at 7 T instead of the AND-gate 4 T.
    pub strict_toffoli: bool,
}

impl ResourceProfile {
    pub const UNIT_GATE: ResourceProfile = ResourceProfile { name: ProfileName::UnitGate, strict_toffoli: false };
    pub const SURFACE_CODE: ResourceProfile =
        ResourceProfile { name: ProfileName::SurfaceCode, strict_toffoli: false };

    pub fn strict(self) -> Self {
        ResourceProfile { strict_toffoli: true, ..self }
    }

    /// `(gate-count weight, T-count, depth)` of one gate.
    pub fn gate_cost(&self, gate: &Gate) -> GateCost {
        let toffoli_t = if self.strict_toffoli { 7 } else { 4 };
        let t = match gate.kind {
            GateKind::Toffoli | GateKind::AndCompute => toffoli_t,
            GateKind::MultiCnot => toffoli_t * gate.controls().len().saturating_sub(1) as u64,
            GateKind::Cswap => 7,
            _ => 0,
        };
        match (self.name, gate.kind) {
            (ProfileName::UnitGate, GateKind::FanoutCnot) => {
                let k = gate.targets().len() as u64;
                GateCost { gates: k, t, depth: ceil_log2(k + 1) }
            }
            _ => GateCost { gates: 1, t, depth: 1 },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GateCost {
    pub gates: u64,
    pub t: u64,
    pub depth: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub total_gates: u64,
    pub t_count: u64,
    pub depth: u64,
    pub width: u64,
    pub fanout_gate_share: f64,
}

pub(crate) fn ceil_log2(x: u64) -> u64 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros() as u64
    }
}

pub fn count_resources(circuit: &Circuit, profile: &ResourceProfile) -> ResourceReport {
    let mut total_gates = 0u64;
    let mut t_count = 0u64;
    let mut fanout_gates = 0u64;
    // ASAP re-packing with per-gate durations.
    let mut ready = vec![0u64; circuit.width()];
    let mut depth = 0u64;
    for gate in circuit.gates() {
        let cost = profile.gate_cost(gate);
        total_gates += cost.gates;
        t_count += cost.t;
        if gate.kind == GateKind::FanoutCnot {
            fanout_gates += cost.gates;
        }
        let start = gate.qubits.iter().map(|q| ready[q.index()]).max().unwrap_or(0);
        let end = start + cost.depth;
        for q in &gate.qubits {
            ready[q.index()] = end;
        }
        depth = depth.max(end);
    }
    let fanout_gate_share = if total_gates == 0 { 0.0 } else { fanout_gates as f64 / total_gates as f64 };
    ResourceReport { total_gates, t_count, depth, width: circuit.width() as u64, fanout_gate_share }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Packing, Qubit};
    use proptest::prelude::*;

    #[test]
    fn single_toffoli() {
        let mut c = Circuit::new(&[("q", 3)]).unwrap();
        c.push(Gate::toffoli(Qubit(0), Qubit(1), [false, false], Qubit(2)));
        let r = count_resources(&c, &ResourceProfile::UNIT_GATE);
        assert_eq!((r.total_gates, r.t_count, r.depth), (1, 4, 1));
        assert_eq!(count_resources(&c, &ResourceProfile::UNIT_GATE.strict()).t_count, 7);
    }

    #[test]
    fn empty_report() {
        let c = Circuit::new(&[("q", 1)]).unwrap();
        let r = count_resources(&c, &ResourceProfile::SURFACE_CODE);
        assert_eq!((r.total_gates, r.t_count, r.depth, r.fanout_gate_share), (0, 0, 0, 0.0));
    }

    #[test]
    fn fanout_profiles_differ() {
        let mut c = Circuit::new(&[("q", 8)]).unwrap();
        c.push(Gate::fanout(Qubit(0), (1..8).map(Qubit)));
        let u = count_resources(&c, &ResourceProfile::UNIT_GATE);
        assert_eq!((u.total_gates, u.depth, u.t_count), (7, 3, 0));
        let s = count_resources(&c, &ResourceProfile::SURFACE_CODE);
        assert_eq!((s.total_gates, s.depth, s.t_count), (1, 1, 0));
        assert_eq!(s.fanout_gate_share, 1.0);
    }

    #[test]
    fn and_pair_costs_four() {
        let mut c = Circuit::new(&[("q", 3)]).unwrap();
        c.push(Gate::and_compute(Qubit(0), Qubit(1), [false, true], Qubit(2)));
        c.push(Gate::and_uncompute(Qubit(0), Qubit(1), [false, true], Qubit(2)));
        for p in [ResourceProfile::UNIT_GATE, ResourceProfile::SURFACE_CODE] {
            assert_eq!(count_resources(&c, &p).t_count, 4);
        }
    }

    #[test]
    fn ceil_log2_values() {
        let got: Vec<u64> = [0, 1, 2, 3, 4, 5, 8, 9].iter().map(|&x| ceil_log2(x)).collect();
        assert_eq!(got, vec![0, 0, 1, 2, 2, 3, 3, 4]);
    }

    fn arb_gate(width: u32) -> impl Strategy<Value = Gate> {
        (0..7u8, prop::collection::vec(0..width, 4), any::<[bool; 2]>()).prop_filter_map(
            "distinct operands",
            move |(k, qs, neg)| {
                let mut seen = std::collections::HashSet::new();
                if !qs.iter().all(|q| seen.insert(*q)) {
                    return None;
                }
                let q: Vec<Qubit> = qs.into_iter().map(Qubit).collect();
                Some(match k {
                    0 => Gate::x(q[0]),
                    1 => Gate::cnot(q[0], q[1]),
                    2 => Gate::toffoli(q[0], q[1], neg, q[2]),
                    3 => Gate::cswap(q[0], neg[0], q[1], q[2]),
                    4 => Gate::fanout(q[0], q[1..].iter().copied()),
                    5 => Gate::multi_cnot(&[(q[0], neg[0]), (q[1], neg[1]), (q[2], false)], q[3]),
                    _ => Gate::and_compute(q[0], q[1], neg, q[2]),
                })
            },
        )
    }

    fn build(gates: &[Gate], packing: Packing) -> Circuit {
        let mut c = Circuit::new(&[("q", 6)]).unwrap();
        for g in gates {
            c.append(g.clone(), packing).unwrap();
        }
        c
    }

    proptest! {
        #[test]
        fn additive_under_concat(a in prop::collection::vec(arb_gate(6), 0..20),
                                 b in prop::collection::vec(arb_gate(6), 0..20)) {
            for profile in [ResourceProfile::UNIT_GATE, ResourceProfile::SURFACE_CODE] {
                let ca = build(&a, Packing::Greedy);
                let cb = build(&b, Packing::Greedy);
                let cc = ca.concat(&cb).unwrap();
                let (ra, rb, rc) = (count_resources(&ca, &profile), count_resources(&cb, &profile), count_resources(&cc, &profile));
                prop_assert_eq!(rc.total_gates, ra.total_gates + rb.total_gates);
                prop_assert_eq!(rc.t_count, ra.t_count + rb.t_count);
                prop_assert_eq!(rc.width, ra.width);
                prop_assert!(rc.depth <= ra.depth + rb.depth);
            }
        }

        #[test]
        fn greedy_never_deeper(gates in prop::collection::vec(arb_gate(6), 0..30)) {
            let g = build(&gates, Packing::Greedy);
            let n = build(&gates, Packing::NewLayer);
            prop_assert!(g.depth() <= n.depth());
            prop_assert!(g.validate().is_empty());
            let rg = count_resources(&g, &ResourceProfile::UNIT_GATE);
            let rn = count_resources(&n, &ResourceProfile::UNIT_GATE);
            prop_assert!(rg.depth <= rn.depth);
        }

        #[test]
        fn unit_gate_total_is_expanded_record_count(gates in prop::collection::vec(arb_gate(6), 0..30)) {
            let c = build(&gates, Packing::Greedy);
            let expanded: usize = c.gates().map(|g| match g.kind {
                GateKind::FanoutCnot => g.targets().len(),
                _ => 1,
            }).sum();
            let r = count_resources(&c, &ResourceProfile::UNIT_GATE);
            prop_assert_eq!(r.total_gates as usize, expanded);
            prop_assert_eq!(r.depth as usize, c.depth().max(r.depth as usize));
            prop_assert!((0.0..=1.0).contains(&r.fanout_gate_share));
        }

        #[test]
        fn layers_stay_disjoint(gates in prop::collection::vec(arb_gate(6), 0..30)) {
            let c = build(&gates, Packing::Greedy);
            for layer in c.layers() {
                let mut seen = std::collections::HashSet::new();
                for g in layer {
                    for q in &g.qubits {
                        prop_assert!(seen.insert(*q));
                    }
                }
            }
        }
    }
}
