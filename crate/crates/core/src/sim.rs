//! Sparse state-vector simulation.
//!
//! Builder circuits are basis permutations apart from a handful of H gates,
//! so a map from basis strings to amplitudes stays small. Keys are packed
//! bit vectors in flat-qubit order.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builders::{build, BuilderSpec, QramCircuit};
use crate::circuit::{Circuit, Gate, GateKind};
use crate::table::BitTable;

pub const DEFAULT_SUPPORT_CAP: usize = 1 << 16;
pub const NORM_TOLERANCE: f64 = 1e-12;
pub const END_TO_END_TOLERANCE: f64 = 1e-10;
/// Amplitudes below this magnitude are dropped after interference.
const PRUNE: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("support cap of {0} basis states exceeded")]
    SupportCap(usize),
    #[error("AND_UNCOMPUTE target inconsistent with its controls")]
    AndUncompute,
    #[error("phase fixup target is not a function of the remaining qubits")]
    Fixup,
    #[error("state width {state} does not match circuit width {circuit}")]
    Width { state: usize, circuit: usize },
    #[error("state is not normalized (norm² = {0})")]
    Norm(f64),
}

type Key = Box<[u64]>;

#[inline]
fn get(key: &[u64], q: usize) -> bool {
    (key[q >> 6] >> (q & 63)) & 1 == 1
}

#[inline]
fn flip(key: &mut [u64], q: usize) {
    key[q >> 6] ^= 1 << (q & 63);
}

#[inline]
fn set(key: &mut [u64], q: usize, v: bool) {
    if get(key, q) != v {
        flip(key, q);
    }
}

#[derive(Debug, Clone)]
pub struct SparseState {
    width: usize,
    terms: Vec<(Key, Complex64)>,
    cap: usize,
}

impl SparseState {
    pub fn basis(bits: &[bool]) -> Self {
        SparseState { width: bits.len(), terms: vec![(pack(bits), Complex64::new(1.0, 0.0))], cap: DEFAULT_SUPPORT_CAP }
    }

    /// Superposition from explicit terms; repeated keys are summed.
    pub fn from_terms(width: usize, terms: &[(Vec<bool>, Complex64)]) -> Result<Self, SimError> {
        let mut map: HashMap<Key, Complex64> = HashMap::new();
        for (bits, amp) in terms {
            assert_eq!(bits.len(), width, "term width");
            *map.entry(pack(bits)).or_default() += amp;
        }
        let state = SparseState {
            width,
            terms: map.into_iter().filter(|(_, a)| a.norm() > PRUNE).collect(),
            cap: DEFAULT_SUPPORT_CAP,
        };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(SimError::Norm(norm));
        }
        Ok(state)
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn support(&self) -> usize {
        self.terms.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.iter().map(|(_, a)| a.norm_sqr()).sum()
    }

    pub fn amplitude(&self, bits: &[bool]) -> Complex64 {
        let key = pack(bits);
        self.terms.iter().filter(|(k, _)| *k == key).map(|(_, a)| *a).sum()
    }

    /// Terms in a canonical (sorted) order.
    pub fn terms(&self) -> Vec<(Vec<bool>, Complex64)> {
        let mut out: Vec<(Vec<bool>, Complex64)> =
            self.terms.iter().map(|(k, a)| (unpack(k, self.width), *a)).collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Largest amplitude difference to `other`, over the union of supports.
    pub fn max_deviation(&self, other: &SparseState) -> f64 {
        let mut map: HashMap<&Key, Complex64> = HashMap::new();
        for (k, a) in &self.terms {
            *map.entry(k).or_default() += a;
        }
        for (k, a) in &other.terms {
            *map.entry(k).or_default() -= a;
        }
        map.values().map(|d| d.norm()).fold(0.0, f64::max)
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<(), SimError> {
        let controls: Vec<(usize, bool)> =
            gate.controls().iter().zip(&gate.negated).map(|(q, &n)| (q.index(), n)).collect();
        let targets: Vec<usize> = gate.targets().iter().map(|q| q.index()).collect();
        let active = |key: &[u64]| controls.iter().all(|&(q, neg)| get(key, q) != neg);
        match gate.kind {
            GateKind::X
            | GateKind::Cnot
            | GateKind::Toffoli
            | GateKind::MultiCnot
            | GateKind::AndCompute
            | GateKind::FanoutCnot => {
                for (key, _) in &mut self.terms {
                    if active(key) {
                        for &t in &targets {
                            flip(key, t);
                        }
                    }
                }
            }
            GateKind::AndUncompute => {
                for (key, _) in &mut self.terms {
                    let on = active(key);
                    if get(key, targets[0]) != on {
                        return Err(SimError::AndUncompute);
                    }
                    set(key, targets[0], false);
                }
            }
            GateKind::Cswap => {
                let (a, b) = (targets[0], targets[1]);
                for (key, _) in &mut self.terms {
                    if active(key) && get(key, a) != get(key, b) {
                        flip(key, a);
                        flip(key, b);
                    }
                }
            }
            GateKind::H => {
                let t = targets[0];
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let mut map: HashMap<Key, Complex64> = HashMap::with_capacity(self.terms.len() * 2);
                for (key, amp) in self.terms.drain(..) {
                    let one = get(&key, t);
                    let mut k0 = key.clone();
                    set(&mut k0, t, false);
                    let mut k1 = key;
                    set(&mut k1, t, true);
                    *map.entry(k0).or_default() += amp * s;
                    *map.entry(k1).or_default() += if one { -amp * s } else { amp * s };
                }
                self.terms = map.into_iter().filter(|(_, a)| a.norm() > PRUNE).collect();
                if self.terms.len() > self.cap {
                    return Err(SimError::SupportCap(self.cap));
                }
            }
            GateKind::ClassicalPhaseFixup => {
                let before = self.terms.len();
                let mut map: HashMap<Key, Complex64> = HashMap::with_capacity(before);
                for (mut key, amp) in self.terms.drain(..) {
                    for &t in &targets {
                        set(&mut key, t, false);
                    }
                    *map.entry(key).or_default() += amp;
                }
                if map.len() != before {
                    return Err(SimError::Fixup);
                }
                self.terms = map.into_iter().collect();
            }
        }
        Ok(())
    }
}

fn pack(bits: &[bool]) -> Key {
    let mut key = vec![0u64; bits.len().div_ceil(64).max(1)].into_boxed_slice();
    for (i, &b) in bits.iter().enumerate() {
        if b {
            flip(&mut key, i);
        }
    }
    key
}

fn unpack(key: &[u64], width: usize) -> Vec<bool> {
    (0..width).map(|i| get(key, i)).collect()
}

/// Applies every layer in order.
pub fn run(circuit: &Circuit, mut state: SparseState) -> Result<SparseState, SimError> {
    if state.width != circuit.width() {
        return Err(SimError::Width { state: state.width, circuit: circuit.width() });
    }
    for gate in circuit.gates() {
        state.apply(gate)?;
    }
    Ok(state)
}

// ---------------------------------------------------------------------------
// builder verification

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum VerifyMode {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

/// Largest table for which exhaustive verification is accepted.
pub const EXHAUSTIVE_LIMIT: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseFailure {
    pub addresses: Vec<usize>,
    pub control: bool,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub spec: BuilderSpec,
    #[serde(rename = "N")]
    pub n: usize,
    pub mode: VerifyMode,
    pub cases: usize,
    pub passed: usize,
    pub ancillas_clean: bool,
    pub failures: Vec<CaseFailure>,
    pub max_dev: f64,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty() && self.passed == self.cases
    }
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("exhaustive verification is limited to N <= {EXHAUSTIVE_LIMIT}, got {0}")]
    TooLarge(usize),
    #[error(transparent)]
    Build(#[from] crate::builders::BuildError),
}

struct CaseResult {
    output_ok: bool,
    rest_ok: bool,
    dev: f64,
    error: Option<String>,
}

fn check_case(q: &QramCircuit, table: &BitTable, addresses: &[usize], control: bool) -> CaseResult {
    let input = SparseState::basis(&q.basis_input(addresses, table, control));
    let expected = q.expected_output(addresses, table, control);
    let state = match run(&q.circuit, input) {
        Ok(s) => s,
        Err(e) => return CaseResult { output_ok: false, rest_ok: false, dev: 1.0, error: Some(e.to_string()) },
    };
    let amp = state.amplitude(&expected);
    let dev = (amp - Complex64::new(1.0, 0.0)).norm();
    let norm = state.norm_sqr();
    if state.support() == 1 && dev <= END_TO_END_TOLERANCE && (norm - 1.0).abs() <= NORM_TOLERANCE {
        return CaseResult { output_ok: true, rest_ok: true, dev, error: None };
    }
    // Attribute the mismatch to output ports or to the remaining qubits.
    let got = &state.terms()[0].0;
    let out_qubits: std::collections::HashSet<usize> =
        q.queries.iter().flat_map(|p| p.output.iter().map(|x| x.index())).collect();
    let mut output_ok = state.support() == 1;
    let mut rest_ok = state.support() == 1;
    for i in 0..expected.len() {
        if got[i] != expected[i] {
            if out_qubits.contains(&i) {
                output_ok = false;
            } else {
                rest_ok = false;
            }
        }
    }
    CaseResult { output_ok, rest_ok, dev: dev.max((norm - 1.0).abs()), error: None }
}

/// Address tuples to test, one entry per query port.
fn cases(q: &QramCircuit, mode: VerifyMode) -> Vec<Vec<usize>> {
    let space = q.address_space();
    let k = q.queries.len();
    let total = space.checked_pow(k as u32).unwrap_or(usize::MAX);
    let decode = |mut idx: usize| {
        (0..k)
            .map(|_| {
                let a = idx % space;
                idx /= space;
                a
            })
            .collect::<Vec<usize>>()
    };
    match mode {
        VerifyMode::Exhaustive => (0..total).map(decode).collect(),
        VerifyMode::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            if count >= total {
                (0..total).map(decode).collect()
            } else {
                let mut picked = sample(&mut rng, total, count).into_vec();
                picked.sort_unstable();
                picked.into_iter().map(decode).collect()
            }
        }
    }
}

/// Simulates `q` on basis queries and compares against direct table lookup.
pub fn verify_circuit(q: &QramCircuit, table: &BitTable, mode: VerifyMode) -> Result<VerificationReport, VerifyError> {
    if mode == VerifyMode::Exhaustive && table.len() > EXHAUSTIVE_LIMIT {
        return Err(VerifyError::TooLarge(table.len()));
    }
    let controls: &[bool] = if q.control.is_some() { &[true, false] } else { &[true] };
    let work: Vec<(Vec<usize>, bool)> = cases(q, mode)
        .into_iter()
        .flat_map(|a| controls.iter().map(move |&c| (a.clone(), c)))
        .collect();
    let results: Vec<(Vec<usize>, bool, CaseResult)> = work
        .into_par_iter()
        .map(|(a, c)| {
            let r = check_case(q, table, &a, c);
            (a, c, r)
        })
        .collect();
    let mut report = VerificationReport {
        spec: q.spec,
        n: table.len(),
        mode,
        cases: results.len(),
        passed: 0,
        ancillas_clean: true,
        failures: vec![],
        max_dev: 0.0,
    };
    for (addresses, control, r) in results {
        report.max_dev = report.max_dev.max(r.dev);
        report.ancillas_clean &= r.rest_ok;
        if r.output_ok && r.rest_ok {
            report.passed += 1;
        } else {
            let reason = r.error.unwrap_or_else(|| match (r.output_ok, r.rest_ok) {
                (false, true) => "wrong output".into(),
                (true, false) => "ancilla or address not restored".into(),
                _ => "wrong output and unrestored qubits".into(),
            });
            report.failures.push(CaseFailure { addresses, control, reason });
        }
    }
    Ok(report)
}

/// Builds `spec` for `table` and verifies it.
pub fn verify_builder(spec: &BuilderSpec, table: &BitTable, mode: VerifyMode) -> Result<VerificationReport, VerifyError> {
    if mode == VerifyMode::Exhaustive && table.len() > EXHAUSTIVE_LIMIT {
        return Err(VerifyError::TooLarge(table.len()));
    }
    let q = build(spec, table)?;
    verify_circuit(&q, table, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Qubit;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn x_and_cswap() {
        let mut s = SparseState::basis(&[false]);
        s.apply(&Gate::x(Qubit(0))).unwrap();
        assert_eq!(s.amplitude(&[true]), c(1.0));

        let mut s = SparseState::basis(&[false, true, false]);
        s.apply(&Gate::cswap(Qubit(0), false, Qubit(1), Qubit(2))).unwrap();
        assert_eq!(s.amplitude(&[false, true, false]), c(1.0));
        s.apply(&Gate::cswap(Qubit(0), true, Qubit(1), Qubit(2))).unwrap();
        assert_eq!(s.amplitude(&[false, false, true]), c(1.0));
    }

    #[test]
    fn hadamard_twice_recombines() {
        let mut s = SparseState::basis(&[false]);
        s.apply(&Gate::h(Qubit(0))).unwrap();
        assert_eq!(s.support(), 2);
        s.apply(&Gate::h(Qubit(0))).unwrap();
        assert_eq!(s.support(), 1);
        assert!((s.amplitude(&[false]) - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn support_cap_is_enforced() {
        let mut s = SparseState::basis(&[false; 3]).with_cap(4);
        s.apply(&Gate::h(Qubit(0))).unwrap();
        s.apply(&Gate::h(Qubit(1))).unwrap();
        assert_eq!(s.apply(&Gate::h(Qubit(2))), Err(SimError::SupportCap(4)));
    }

    #[test]
    fn and_uncompute_checks_target() {
        let mut s = SparseState::basis(&[true, true, false]);
        let g = Gate::and_uncompute(Qubit(0), Qubit(1), [false, false], Qubit(2));
        assert_eq!(s.clone().apply(&g), Err(SimError::AndUncompute));
        s.apply(&Gate::and_compute(Qubit(0), Qubit(1), [false, false], Qubit(2))).unwrap();
        s.apply(&g).unwrap();
        assert_eq!(s.amplitude(&[true, true, false]), c(1.0));
    }

    #[test]
    fn fixup_requires_determinism() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = SparseState::from_terms(2, &[(vec![false, false], c(h)), (vec![false, true], c(h))]).unwrap();
        let mut bad = s.clone();
        assert_eq!(bad.apply(&Gate::phase_fixup([Qubit(1)])), Err(SimError::Fixup));
        let s = SparseState::from_terms(2, &[(vec![false, false], c(h)), (vec![true, true], c(h))]).unwrap();
        let mut ok = s.clone();
        ok.apply(&Gate::phase_fixup([Qubit(1)])).unwrap();
        assert_eq!(ok.support(), 2);
    }

    #[test]
    fn unnormalized_input_rejected() {
        assert!(matches!(SparseState::from_terms(1, &[(vec![false], c(0.5))]), Err(SimError::Norm(_))));
    }

    #[test]
    fn empty_circuit_is_identity() {
        let circ = Circuit::new(&[("q", 2)]).unwrap();
        let s = SparseState::basis(&[true, false]);
        let out = run(&circ, s.clone()).unwrap();
        assert_eq!(out.max_deviation(&s), 0.0);
    }

    proptest! {
        #[test]
        fn permutations_preserve_norm_and_support(seq in prop::collection::vec((0u8..5, 0u32..5, 0u32..5, 0u32..5, any::<bool>()), 1..40)) {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let mut s = SparseState::from_terms(5, &[
                (vec![false, true, false, true, false], c(h)),
                (vec![true, true, false, false, true], Complex64::new(0.0, h)),
            ]).unwrap();
            for (k, a, b, t, neg) in seq {
                if a == b || b == t || a == t { continue; }
                let (a, b, t) = (Qubit(a), Qubit(b), Qubit(t));
                let g = match k {
                    0 => Gate::x(a),
                    1 => Gate::cnot(a, b),
                    2 => Gate::toffoli(a, b, [neg, false], t),
                    3 => Gate::cswap(a, neg, b, t),
                    _ => Gate::fanout(a, [b, t]),
                };
                s.apply(&g).unwrap();
                prop_assert_eq!(s.support(), 2);
                prop_assert!((s.norm_sqr() - 1.0).abs() < NORM_TOLERANCE);
            }
        }
    }
}
