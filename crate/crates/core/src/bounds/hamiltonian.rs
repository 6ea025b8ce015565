use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{invalid, BoundsError};
use crate::noise::trial_rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceFloor {
    /// `ln(δe^{−t} + 1)/t`
    pub floor: f64,
    /// `(δ/t)e^{−t}(1 − δe^{−t})`
    pub lower: f64,
}

/// Smallest Hamiltonian distance `ε` compatible with unitaries at distance
/// `δ` after time `t`, for Hamiltonians of norm at most 1 (ħ = 1).
pub fn hamiltonian_distance_floor(delta: f64, t: f64) -> Result<DistanceFloor, BoundsError> {
    if !(0.0..=2.0).contains(&delta) {
        return Err(invalid(format!("δ={delta} outside [0, 2]")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid(format!("t={t} must be positive")));
    }
    let x = delta * (-t).exp();
    Ok(DistanceFloor { floor: x.ln_1p() / t, lower: x * (1.0 - x) / t })
}

type CMat = DMatrix<Complex64>;

fn gue(dim: usize, rng: &mut impl Rng) -> CMat {
    let a = CMat::from_fn(dim, dim, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

fn hermitian_norm(h: &CMat) -> f64 {
    h.clone().symmetric_eigenvalues().iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Spectral norm of an arbitrary square matrix.
fn spectral_norm(m: &CMat) -> f64 {
    hermitian_norm(&(m.adjoint() * m)).sqrt()
}

fn expi(h: &CMat, t: f64) -> CMat {
    let eig = h.clone().symmetric_eigen();
    let phases = eig.eigenvalues.map(|l| Complex64::from_polar(1.0, t * l));
    &eig.eigenvectors * CMat::from_diagonal(&phases) * eig.eigenvectors.adjoint()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub dim: usize,
    pub t: f64,
    pub trials: u64,
    pub violations: u64,
    /// Largest observed floor/ε ratio (≤ 1 when the lemma holds).
    pub max_ratio: f64,
}

/// Random pairs of Hamiltonians with spectral norm at most 1: checks that
/// `‖H₁ − H₂‖ ≥ ln(δe^{−t}+1)/t` where `δ = ‖e^{itH₁} − e^{itH₂}‖`.
///
/// `H₁` is a GUE sample rescaled to a random norm in (0, 1]; `H₂` adds a
/// GUE perturbation of log-uniform size in [1e−4, 1] and is rescaled back
/// into the unit ball when needed. Both distances are measured exactly.
pub fn verify_hamiltonian_lemma(dim: usize, t: f64, trials: u64, seed: u64) -> Result<LemmaCheck, BoundsError> {
    if !dim.is_power_of_two() || dim > 16 {
        return Err(invalid(format!("dimension {dim} must be a power of two ≤ 16")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid(format!("t={t} must be positive")));
    }
    let ratios: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let mut h1 = gue(dim, &mut rng);
            let s = rng.random_range(0.05..=1.0) / hermitian_norm(&h1).max(1e-300);
            h1 *= Complex64::new(s, 0.0);
            let mut p = gue(dim, &mut rng);
            p /= Complex64::new(hermitian_norm(&p).max(1e-300), 0.0);
            let size = 10f64.powf(rng.random_range(-4.0..=0.0));
            let mut h2 = &h1 + p * Complex64::new(size, 0.0);
            let n2 = hermitian_norm(&h2);
            if n2 > 1.0 {
                h2 /= Complex64::new(n2, 0.0);
            }
            let eps = hermitian_norm(&(&h1 - &h2));
            let delta = spectral_norm(&(expi(&h1, t) - expi(&h2, t))).min(2.0);
            let floor = hamiltonian_distance_floor(delta, t).expect("δ in range").floor;
            if eps == 0.0 {
                0.0
            } else {
                floor / eps
            }
        })
        .collect();
    let tol = 1.0 + 1e-9;
    Ok(LemmaCheck {
        dim,
        t,
        trials,
        violations: ratios.iter().filter(|&&r| r > tol).count() as u64,
        max_ratio: ratios.iter().cloned().fold(0.0, f64::max),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalCase {
    pub eps: f64,
    pub t: f64,
    pub delta: f64,
    pub floor: f64,
    /// `floor / ε`
    pub tightness: f64,
}

/// Commuting pair `diag(1, 0)` and `diag(1 − ε, 0)`: `δ = |e^{itε} − 1|`
/// in closed form.
pub fn diagonal_pair(eps: f64, t: f64) -> Result<DiagonalCase, BoundsError> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(invalid("ε must lie in (0, 1]"));
    }
    let delta = (Complex64::from_polar(1.0, t * eps) - 1.0).norm();
    let floor = hamiltonian_distance_floor(delta, t)?.floor;
    Ok(DiagonalCase { eps, t, delta, floor, tightness: floor / eps })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_examples() {
        assert_eq!(hamiltonian_distance_floor(0.0, 1.0).unwrap().floor, 0.0);
        let f = hamiltonian_distance_floor(1.0, 1.0).unwrap();
        assert!((f.floor - ((-1f64).exp() + 1.0).ln()).abs() < 1e-15);
        assert!((f.floor - 0.3133).abs() < 5e-5);
        assert!(f.lower <= f.floor);
        assert!(hamiltonian_distance_floor(2.5, 1.0).is_err());
        assert!(hamiltonian_distance_floor(1.0, 0.0).is_err());
    }

    #[test]
    fn floor_increasing_in_delta() {
        for t in [0.1, 1.0, 3.0] {
            let v: Vec<f64> = (0..=20).map(|i| hamiltonian_distance_floor(i as f64 / 10.0, t).unwrap().floor).collect();
            assert!(v.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn identical_pair_is_distance_zero() {
        let mut rng = trial_rng(1, 0);
        let h = gue(4, &mut rng);
        assert!(spectral_norm(&(expi(&h, 1.0) - expi(&h, 1.0))) < 1e-12);
    }

    #[test]
    fn exponential_is_unitary() {
        let mut rng = trial_rng(2, 0);
        let u = expi(&gue(8, &mut rng), 0.7);
        assert!(spectral_norm(&(u.adjoint() * &u - CMat::identity(8, 8))) < 1e-10);
    }

    #[test]
    fn diagonal_pair_tightness() {
        // first order: floor/ε ≈ e^{−t}
        let c = diagonal_pair(1e-3, 0.05).unwrap();
        assert!(c.tightness > 0.9 && c.tightness <= 1.0, "{c:?}");
        let c = diagonal_pair(1e-3, 1.0).unwrap();
        assert!((c.tightness - (-1f64).exp()).abs() < 1e-3);
    }

    #[test]
    fn small_sweep_has_no_violations() {
        let r = verify_hamiltonian_lemma(4, 1.0, 50, 3).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.max_ratio > 0.0);
    }
}
