//! Circuit constructions for table lookup.
//!
//! Every builder returns a [`QramCircuit`]: the circuit plus a description of
//! its ports. Qubits not named as an output (or, for quantum memory in the
//! SWAP variant, the selected memory slot) must end in their initial value.

mod bad_readout;
mod bucket_brigade;
mod fanout_swap;
mod parallel_sorted;
mod recursive;
mod select_swap;
mod unary;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate, Qubit};
use crate::table::{address_bits, BitTable, TableError};

pub use bad_readout::build_bad_readout_bb;
pub use bucket_brigade::{bucket_brigade_cswap_count, build_bucket_brigade};
pub use fanout_swap::build_fanout_swap_qraqm;
pub use parallel_sorted::{bitonic_comparators, build_parallel_sorted};
pub use recursive::build_recursive;
pub use select_swap::build_select_swap;
pub use unary::build_unary;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuilderKind {
    Unary,
    Recursive,
    BucketBrigade,
    BadReadoutBb,
    SelectSwap,
    FanoutSwapQraqm,
    ParallelSorted,
}

impl BuilderKind {
    pub const ALL: [BuilderKind; 7] = [
        BuilderKind::Unary,
        BuilderKind::Recursive,
        BuilderKind::BucketBrigade,
        BuilderKind::BadReadoutBb,
        BuilderKind::SelectSwap,
        BuilderKind::FanoutSwapQraqm,
        BuilderKind::ParallelSorted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuilderKind::Unary => "unary",
            BuilderKind::Recursive => "recursive",
            BuilderKind::BucketBrigade => "bucket_brigade",
            BuilderKind::BadReadoutBb => "bad_readout_bb",
            BuilderKind::SelectSwap => "select_swap",
            BuilderKind::FanoutSwapQraqm => "fanout_swap_qraqm",
            BuilderKind::ParallelSorted => "parallel_sorted",
        }
    }
}

impl fmt::Display for BuilderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuilderKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BuilderKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown builder kind `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UncomputeMode {
    /// Undo every compute gate with its coherent inverse.
    Coherent,
    /// AND ancillas released by X-basis measurement plus a phase fixup.
    MeasurementBased,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BuilderSpec {
    pub kind: BuilderKind,
    /// Select-swap page size exponent ℓ. `None` picks ⌈n/2⌉.
    pub page_log: Option<usize>,
    /// Number of simultaneous queries (parallel_sorted only).
    pub query_count: usize,
    /// `None` uses the per-kind default.
    pub uncompute: Option<UncomputeMode>,
    /// Add a control qubit gating the whole lookup (recursive only).
    pub controlled: bool,
    /// Swap the selected word out instead of copying it (fanout_swap_qraqm only).
    pub swap_variant: bool,
}

impl BuilderSpec {
    pub fn new(kind: BuilderKind) -> Self {
        BuilderSpec { kind, page_log: None, query_count: 1, uncompute: None, controlled: false, swap_variant: false }
    }

    pub fn page_log(mut self, l: usize) -> Self {
        self.page_log = Some(l);
        self
    }

    pub fn queries(mut self, k: usize) -> Self {
        self.query_count = k;
        self
    }

    pub fn uncompute(mut self, mode: UncomputeMode) -> Self {
        self.uncompute = Some(mode);
        self
    }

    pub fn controlled(mut self, on: bool) -> Self {
        self.controlled = on;
        self
    }

    pub fn swap_variant(mut self, on: bool) -> Self {
        self.swap_variant = on;
        self
    }

    pub fn uncompute_mode(&self) -> UncomputeMode {
        self.uncompute.unwrap_or(match self.kind {
            BuilderKind::Recursive | BuilderKind::SelectSwap => UncomputeMode::MeasurementBased,
            _ => UncomputeMode::Coherent,
        })
    }

    pub fn resolved_page_log(&self, n_entries: usize) -> usize {
        self.page_log.unwrap_or_else(|| address_bits(n_entries).div_ceil(2))
    }

    pub fn validate(&self, n_entries: usize) -> Result<(), BuildError> {
        if self.query_count == 0 {
            return Err(BuildError::QueryCount);
        }
        if self.query_count > 1 && self.kind != BuilderKind::ParallelSorted {
            return Err(BuildError::Unsupported(format!("{} takes a single query", self.kind)));
        }
        if self.uncompute == Some(UncomputeMode::MeasurementBased)
            && !matches!(self.kind, BuilderKind::Recursive | BuilderKind::SelectSwap)
        {
            return Err(BuildError::Unsupported(format!(
                "measurement_based uncompute is not available for {}",
                self.kind
            )));
        }
        if let Some(l) = self.page_log {
            if self.kind != BuilderKind::SelectSwap {
                return Err(BuildError::Unsupported(format!("page_log does not apply to {}", self.kind)));
            }
            let n = address_bits(n_entries);
            if l > n {
                return Err(BuildError::PageLog { page_log: l, address_bits: n });
            }
        }
        if self.controlled && self.kind != BuilderKind::Recursive {
            return Err(BuildError::Unsupported(format!("{} has no controlled form", self.kind)));
        }
        if self.swap_variant && self.kind != BuilderKind::FanoutSwapQraqm {
            return Err(BuildError::Unsupported(format!("swap variant does not apply to {}", self.kind)));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("page_log {page_log} exceeds address width {address_bits}")]
    PageLog { page_log: usize, address_bits: usize },
    #[error("query_count must be at least 1")]
    QueryCount,
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Address and output qubits of one query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryPorts {
    /// Little-endian address bits.
    pub address: Vec<Qubit>,
    /// Little-endian output word.
    pub output: Vec<Qubit>,
}

/// Construction metadata reported alongside the resource counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildInfo {
    pub kind: BuilderKind,
    pub entries: usize,
    pub padded_entries: usize,
    pub word_width: usize,
    pub address_bits: usize,
    pub uncompute: UncomputeMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub page_log: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub page_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub page_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub query_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub routing_ancillas: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparators: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub controlled: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub swap_variant: Option<bool>,
}

impl BuildInfo {
    fn new(spec: &BuilderSpec, entries: usize, padded_entries: usize, word_width: usize) -> Self {
        BuildInfo {
            kind: spec.kind,
            entries,
            padded_entries,
            word_width,
            address_bits: address_bits(padded_entries),
            uncompute: spec.uncompute_mode(),
            page_log: None,
            page_count: None,
            page_size: None,
            query_count: None,
            routing_ancillas: None,
            comparators: None,
            controlled: None,
            swap_variant: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct QramCircuit {
    pub circuit: Circuit,
    pub spec: BuilderSpec,
    pub info: BuildInfo,
    pub queries: Vec<QueryPorts>,
    /// Quantum memory, word-major (`N * w` qubits); empty for classical tables.
    pub memory: Vec<Qubit>,
    /// Control qubit of a controlled lookup.
    pub control: Option<Qubit>,
    /// Qubits prepared in |1⟩ before the circuit runs.
    pub preset_ones: Vec<Qubit>,
}

impl QramCircuit {
    /// Basis input for the given query addresses. `table` supplies the quantum
    /// memory contents when the builder reads a memory register.
    pub fn basis_input(&self, addresses: &[usize], table: &BitTable, control: bool) -> Vec<bool> {
        let mut bits = vec![false; self.circuit.width()];
        for (port, &a) in self.queries.iter().zip(addresses) {
            for (b, q) in port.address.iter().enumerate() {
                bits[q.index()] = (a >> b) & 1 == 1;
            }
        }
        self.write_memory(&mut bits, table, None);
        if let Some(c) = self.control {
            bits[c.index()] = control;
        }
        for q in &self.preset_ones {
            bits[q.index()] = true;
        }
        bits
    }

    /// Expected output basis state for [`QramCircuit::basis_input`].
    pub fn expected_output(&self, addresses: &[usize], table: &BitTable, control: bool) -> Vec<bool> {
        let mut bits = self.basis_input(addresses, table, control);
        let active = control || self.control.is_none();
        if !active {
            return bits;
        }
        for (port, &a) in self.queries.iter().zip(addresses) {
            let word = if a < table.len() { table.word(a) } else { 0 };
            for (b, q) in port.output.iter().enumerate() {
                bits[q.index()] ^= (word >> b) & 1 == 1;
            }
        }
        if self.spec.swap_variant {
            self.write_memory(&mut bits, table, addresses.first().copied());
        }
        bits
    }

    fn write_memory(&self, bits: &mut [bool], table: &BitTable, cleared: Option<usize>) {
        if self.memory.is_empty() {
            return;
        }
        let w = self.info.word_width;
        for i in 0..self.memory.len() / w {
            let word = if i < table.len() && Some(i) != cleared { table.word(i) } else { 0 };
            for b in 0..w {
                bits[self.memory[i * w + b].index()] = (word >> b) & 1 == 1;
            }
        }
    }

    /// Number of distinct address values per query port.
    pub fn address_space(&self) -> usize {
        1 << self.queries[0].address.len()
    }
}

/// Builds the circuit described by `spec` for `table`.
pub fn build(spec: &BuilderSpec, table: &BitTable) -> Result<QramCircuit, BuildError> {
    spec.validate(table.len())?;
    match spec.kind {
        BuilderKind::Unary => build_unary(table),
        BuilderKind::Recursive => build_recursive(table, spec.controlled, spec.uncompute_mode()),
        BuilderKind::BucketBrigade => build_bucket_brigade(table),
        BuilderKind::BadReadoutBb => build_bad_readout_bb(table),
        BuilderKind::SelectSwap => {
            build_select_swap(table, spec.resolved_page_log(table.len()), spec.uncompute_mode())
        }
        BuilderKind::FanoutSwapQraqm => build_fanout_swap_qraqm(
            address_bits(table.len()),
            table.word_width(),
            spec.swap_variant,
        ),
        BuilderKind::ParallelSorted => build_parallel_sorted(table, spec.query_count),
    }
}

// ---------------------------------------------------------------------------
// shared pieces

/// Registers with size 0 are dropped so builders can declare optional ones.
pub(crate) fn circuit_with(regs: &[(&str, usize)]) -> Circuit {
    let regs: Vec<(&str, usize)> = regs.iter().copied().filter(|r| r.1 > 0).collect();
    Circuit::new(&regs).expect("builder registers are well-formed")
}

pub(crate) fn reg_or_empty(c: &Circuit, name: &str) -> Vec<Qubit> {
    c.reg(name).unwrap_or_default()
}

/// Controls matching address value `i` on the given bits.
pub(crate) fn match_controls(bits: &[Qubit], i: usize) -> Vec<(Qubit, bool)> {
    bits.iter().enumerate().map(|(b, &q)| (q, (i >> b) & 1 == 0)).collect()
}

/// Computes the conjunction of `controls` with a ladder of AND gates. Returns
/// the (qubit, negated) literal that holds it, or `None` for zero controls.
pub(crate) fn ladder_compute(c: &mut Circuit, controls: &[(Qubit, bool)], ladder: &[Qubit]) -> Option<(Qubit, bool)> {
    match controls.len() {
        0 => None,
        1 => Some(controls[0]),
        m => {
            let mut acc = controls[0];
            for (j, &next) in controls[1..].iter().enumerate() {
                c.push(Gate::and_compute(acc.0, next.0, [acc.1, next.1], ladder[j]));
                acc = (ladder[j], false);
            }
            debug_assert_eq!(acc.0, ladder[m - 2]);
            Some(acc)
        }
    }
}

pub(crate) fn ladder_uncompute(c: &mut Circuit, controls: &[(Qubit, bool)], ladder: &[Qubit], mode: UncomputeMode) {
    if controls.len() < 2 {
        return;
    }
    for j in (0..controls.len() - 1).rev() {
        let prev = if j == 0 { controls[0] } else { (ladder[j - 1], false) };
        let next = controls[j + 1];
        c.push(match mode {
            UncomputeMode::MeasurementBased => Gate::and_uncompute(prev.0, next.0, [prev.1, next.1], ladder[j]),
            UncomputeMode::Coherent => Gate::toffoli(prev.0, next.0, [prev.1, next.1], ladder[j]),
        });
    }
}

/// XORs `word` into `targets` under a single literal control.
pub(crate) fn controlled_write(c: &mut Circuit, ctrl: Option<(Qubit, bool)>, targets: &[Qubit], word: &[bool]) {
    let ones: Vec<Qubit> = targets.iter().zip(word).filter(|(_, &b)| b).map(|(&q, _)| q).collect();
    if ones.is_empty() {
        return;
    }
    match ctrl {
        None => ones.into_iter().for_each(|q| c.push(Gate::x(q))),
        Some((q, neg)) if ones.len() == 1 => {
            let mut g = Gate::cnot(q, ones[0]);
            g.negated[0] = neg;
            c.push(g);
        }
        Some((q, neg)) => {
            let mut g = Gate::fanout(q, ones);
            g.negated[0] = neg;
            c.push(g);
        }
    }
}

pub(crate) fn word_bits(word: u64, w: usize) -> Vec<bool> {
    (0..w).map(|b| (word >> b) & 1 == 1).collect()
}
