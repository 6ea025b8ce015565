use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{invalid, BoundsError};
use crate::noise::trial_rng;

/// How well `d` probe states can tell apart two tables that differ on the
/// `ℓ` least-probed addresses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableDistinguishability {
    /// The flipped addresses, in increasing order.
    pub indices: Vec<usize>,
    /// Trace distance between the two ideal lookup outputs, per probe state.
    pub deltas: Vec<f64>,
    pub sum_delta: f64,
    /// `2ℓ√d/N`
    pub bound: f64,
    pub holds: bool,
    /// `2d√(ℓ/N)`, which follows from `Σ m_j = d` and Cauchy-Schwarz.
    pub corrected_bound: f64,
    pub holds_corrected: bool,
}

/// Each state is a vector over `address ⊗ output bit`, entry `2j + b`.
pub fn indistinguishable_tables(states: &[Vec<Complex64>], n: usize, ell: usize) -> Result<TableDistinguishability, BoundsError> {
    if states.is_empty() || n == 0 || ell == 0 || ell > n {
        return Err(invalid("need d ≥ 1 states and 1 ≤ ℓ ≤ N"));
    }
    for (i, s) in states.iter().enumerate() {
        if s.len() != 2 * n {
            return Err(invalid(format!("state {i} has length {}, expected {}", s.len(), 2 * n)));
        }
        let norm = s.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(BoundsError::Unnormalized(i, norm));
        }
    }
    let mass: Vec<f64> = (0..n).map(|j| states.iter().map(|s| s[2 * j].norm_sqr() + s[2 * j + 1].norm_sqr()).sum()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| mass[a].total_cmp(&mass[b]).then(a.cmp(&b)));
    let mut indices = order[..ell].to_vec();
    indices.sort_unstable();

    // Flipping T on the chosen addresses applies X to the output bit there;
    // ⟨ψ|U(T')†U(T)|ψ⟩ is then real.
    let deltas: Vec<f64> = states
        .iter()
        .map(|s| {
            let mut overlap = 1.0;
            for &j in &indices {
                let (a0, a1) = (s[2 * j], s[2 * j + 1]);
                overlap += 2.0 * (a0.conj() * a1).re - a0.norm_sqr() - a1.norm_sqr();
            }
            (1.0 - overlap * overlap).max(0.0).sqrt()
        })
        .collect();
    let d = states.len() as f64;
    let sum_delta: f64 = deltas.iter().sum();
    let bound = 2.0 * ell as f64 * d.sqrt() / n as f64;
    let corrected_bound = 2.0 * d * (ell as f64 / n as f64).sqrt();
    let slack = 1e-12;
    Ok(TableDistinguishability {
        indices,
        deltas,
        sum_delta,
        bound,
        holds: sum_delta <= bound + slack,
        corrected_bound,
        holds_corrected: sum_delta <= corrected_bound + slack,
    })
}

/// Normalized complex Gaussian vector of length `2n`.
pub fn random_state(n: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..2 * n).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / norm).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TablesSweep {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub ell: usize,
    pub trials: u64,
    pub violations: u64,
    pub corrected_violations: u64,
    /// Largest `Σδ / bound` seen.
    pub worst_ratio: f64,
}

/// Random probe sets: `trials` draws of `d` Gaussian states on `N` addresses.
pub fn verify_indistinguishable_tables(d: usize, n: usize, ell: usize, trials: u64, seed: u64) -> Result<TablesSweep, BoundsError> {
    if d == 0 || d > 16 || n == 0 || n > 1024 {
        return Err(invalid("need 1 ≤ d ≤ 16 and 1 ≤ N ≤ 1024"));
    }
    let results = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let states: Vec<_> = (0..d).map(|_| random_state(n, &mut rng)).collect();
            indistinguishable_tables(&states, n, ell)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TablesSweep {
        d,
        n,
        ell,
        trials,
        violations: results.iter().filter(|r| !r.holds).count() as u64,
        corrected_violations: results.iter().filter(|r| !r.holds_corrected).count() as u64,
        worst_ratio: results.iter().map(|r| r.sum_delta / r.bound).fold(0.0, f64::max),
    })
}
