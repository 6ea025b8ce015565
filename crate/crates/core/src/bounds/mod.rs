//! Closed-form lower bounds and numeric checks of the lemmas behind them.
//!
//! Asymptotic statements are exposed through the concrete inequalities used
//! in their proofs, with every hidden constant set to 1. A `satisfied` flag
//! therefore means "the proof inequality holds", not a physical verdict.

mod hamiltonian;
mod tables;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

pub use hamiltonian::{
    diagonal_pair, hamiltonian_distance_floor, verify_hamiltonian_lemma, DiagonalCase, DistanceFloor, LemmaCheck,
};
pub use tables::{
    indistinguishable_tables, random_state, verify_indistinguishable_tables, TableDistinguishability, TablesSweep,
};

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("no gate count up to {limit} satisfies the inequality for N={n}")]
    Infeasible { n: u64, limit: u64 },
    #[error("state {0} is not normalized (norm² = {1})")]
    Unnormalized(usize, f64),
}

fn invalid(msg: impl Into<String>) -> BoundsError {
    BoundsError::Invalid(msg.into())
}

/// Circuits on `w` qubits of depth `d` with `gates` gates drawn from a set of
/// `gate_set` gates of fan-in at most `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitCountParams {
    #[serde(rename = "W")]
    pub w: u64,
    #[serde(rename = "D")]
    pub d: u64,
    #[serde(rename = "G")]
    pub gates: u64,
    pub g: u64,
    pub k: u64,
}

impl CircuitCountParams {
    pub fn validate(&self) -> Result<(), BoundsError> {
        if self.w == 0 || self.d == 0 || self.g == 0 || self.k == 0 {
            return Err(invalid("W, D, g and k must be positive"));
        }
        let slots = self.w.checked_mul(self.d).ok_or_else(|| invalid("D·W overflows"))?;
        if self.gates > slots {
            return Err(invalid(format!("G={} exceeds D·W={slots}", self.gates)));
        }
        if self.k > self.w {
            return Err(invalid(format!("fan-in k={} exceeds W={}", self.k, self.w)));
        }
        Ok(())
    }
}

fn ln_binomial(n: u64, r: u64) -> f64 {
    if r == 0 || r >= n {
        return 0.0;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(r as f64 + 1.0) - ln_gamma((n - r) as f64 + 1.0)
}

/// `lg( C(DW, min(kG, DW)) · (Wg)^G )`, evaluated in the log domain.
pub fn log2_circuit_count(p: &CircuitCountParams) -> Result<f64, BoundsError> {
    p.validate()?;
    if p.gates == 0 {
        return Ok(0.0);
    }
    let slots = p.w * p.d;
    let chosen = p.k.saturating_mul(p.gates).min(slots);
    let ln = ln_binomial(slots, chosen) + p.gates as f64 * ((p.w as f64).ln() + (p.g as f64).ln());
    Ok(ln / std::f64::consts::LN_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinGates {
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "G")]
    pub gates: u64,
    /// Right-hand side `k·G·lg(DWg/(G√k))` at the returned `G`.
    pub capacity: f64,
    /// Largest `G` searched: the end of the increasing region, capped at `DW`.
    pub search_limit: u64,
}

/// `k·G·lg(DWg/(G√k))`: how many table bits `G` gates can distinguish.
pub fn gate_capacity(gates: u64, w: u64, d: u64, g: u64, k: u64) -> f64 {
    let (gf, kf) = (gates as f64, k as f64);
    kf * gf * ((d as f64 * w as f64 * g as f64) / (gf * kf.sqrt())).log2()
}

/// Smallest `G` with `N ≤ k·G·lg(DWg/(G√k))`.
///
/// The capacity grows with `G` up to `G = DWg/(e√k)`; the search stays on
/// that region and on `G ≤ DW`.
pub fn min_gates_for_table(n: u64, w: u64, d: u64, g: u64, k: u64) -> Result<MinGates, BoundsError> {
    if n == 0 {
        return Err(invalid("N must be positive"));
    }
    CircuitCountParams { w, d, gates: 1, g, k }.validate()?;
    let peak = (d as f64 * w as f64 * g as f64) / (std::f64::consts::E * (k as f64).sqrt());
    let limit = (peak.floor() as u64).min(w * d).max(1);
    let cap = |x: u64| gate_capacity(x, w, d, g, k);
    if cap(limit) < n as f64 {
        return Err(BoundsError::Infeasible { n, limit });
    }
    let (mut lo, mut hi) = (1u64, limit);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if cap(mid) >= n as f64 {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(MinGates { n, gates: lo, capacity: cap(lo), search_limit: limit })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BallisticMode {
    /// `n·t·E + n·lg W` against `N`.
    #[default]
    Summary,
    /// `n·lg M + n·tE·lg e + n·lg(2tE·e)` against `N`, with `M` the number of
    /// `k`-local Pauli terms on `W` qubits.
    Stirling,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallisticParams {
    pub n: f64,
    pub t: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "W")]
    pub w: f64,
    #[serde(rename = "N")]
    pub table_size: f64,
    /// Term locality, used only by [`BallisticMode::Stirling`].
    #[serde(default = "default_locality")]
    pub locality: u32,
}

fn default_locality() -> u32 {
    2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallisticReport {
    pub mode: BallisticMode,
    pub lhs: f64,
    pub satisfied_for_n: bool,
    /// `lhs − N`
    pub slack: f64,
}

fn log2_pauli_terms(w: f64, k: u32) -> f64 {
    // Σ_{j=1..k} 4^j C(W, j), summed in the log domain
    let terms: Vec<f64> = (1..=k.min(w.floor() as u32))
        .map(|j| {
            let j = j as f64;
            2.0 * j + (ln_gamma(w + 1.0) - ln_gamma(j + 1.0) - ln_gamma(w - j + 1.0)) / std::f64::consts::LN_2
        })
        .collect();
    let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    top + terms.iter().map(|x| (x - top).exp2()).sum::<f64>().log2()
}

pub fn ballistic_constraint(p: &BallisticParams, mode: BallisticMode) -> Result<BallisticReport, BoundsError> {
    let all = [p.n, p.t, p.e, p.w, p.table_size];
    if all.iter().any(|x| !(x.is_finite() && *x > 0.0)) || p.locality == 0 {
        return Err(invalid("all ballistic parameters must be positive"));
    }
    let lhs = match mode {
        BallisticMode::Summary => p.n * p.t * p.e + p.n * p.w.log2(),
        BallisticMode::Stirling => {
            let te = p.t * p.e;
            p.n * log2_pauli_terms(p.w, p.locality)
                + p.n * te * std::f64::consts::LOG2_E
                + p.n * (2.0 * te * std::f64::consts::E).log2()
        }
    };
    Ok(BallisticReport { mode, lhs, satisfied_for_n: lhs >= p.table_size, slack: lhs - p.table_size })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistillationParams {
    pub d: u64,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(default = "one")]
    pub ell: u64,
}

fn one() -> u64 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityCap {
    pub cap: f64,
    /// `3/4 + 2ℓ√d/N` before clamping.
    pub raw: f64,
    pub vacuous: bool,
}

/// Fidelity ceiling `min(1, 3/4 + 2ℓ√d/N)` for distilling a table access
/// out of `d` noisy calls.
pub fn distillation_fidelity_cap(p: &DistillationParams) -> Result<FidelityCap, BoundsError> {
    if p.d == 0 || p.ell == 0 || p.ell > p.n {
        return Err(invalid("need d ≥ 1 and 1 ≤ ℓ ≤ N"));
    }
    let raw = 0.75 + 2.0 * p.ell as f64 * (p.d as f64).sqrt() / p.n as f64;
    Ok(FidelityCap { cap: raw.min(1.0), raw, vacuous: raw >= 1.0 })
}
