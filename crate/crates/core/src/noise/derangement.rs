use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{trial_rng, NoiseError, MAX_P};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerangementResult {
    pub m: usize,
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    pub passes: u64,
    pub bad_passes: u64,
    pub herald_pass_rate: f64,
    pub herald_failure_rate: f64,
    /// Fraction of heralded passes that still carry a corrupted query.
    pub conditional_infidelity: f64,
}

/// Heralded shuffle among `m` slots at channel level.
///
/// The query sits in slot `j` with amplitude `1/sqrt(m)` and every other
/// slot holds an idle state. Each slot independently suffers an error with
/// probability `p`, which maps whatever it holds to an orthogonal state.
/// After un-shuffling, the branches whose query slot was clean coincide and
/// the others are mutually orthogonal. With `E` faulty slots the all-zero
/// outcome then has probability `((m-E)^2 + E) / m^2`, of which `E / m^2`
/// carries a corrupted query.
pub fn simulate_derangement(m: usize, p: f64, trials: u64, seed: u64) -> Result<DerangementResult, NoiseError> {
    if m < 2 {
        return Err(NoiseError::Parameter(format!("need at least 2 copies, got {m}")));
    }
    if !(0.0..=MAX_P).contains(&p) {
        return Err(NoiseError::Probability(p));
    }
    if trials == 0 {
        return Err(NoiseError::Parameter("need at least one trial".into()));
    }
    let faults = Binomial::new(m as u64, p).map_err(|e| NoiseError::Parameter(e.to_string()))?;
    let m2 = (m * m) as f64;
    let (passes, bad_passes) = (0..trials)
        .into_par_iter()
        .fold(
            || (0u64, 0u64),
            |(pass, bad), t| {
                let mut rng = trial_rng(seed, t);
                let e = faults.sample(&mut rng) as usize;
                let clean = (m - e) as f64;
                let u: f64 = rng.random();
                if u < e as f64 / m2 {
                    (pass + 1, bad + 1)
                } else if u < (clean * clean + e as f64) / m2 {
                    (pass + 1, bad)
                } else {
                    (pass, bad)
                }
            },
        )
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let pass_rate = passes as f64 / trials as f64;
    Ok(DerangementResult {
        m,
        p,
        trials,
        seed,
        passes,
        bad_passes,
        herald_pass_rate: pass_rate,
        herald_failure_rate: 1.0 - pass_rate,
        conditional_infidelity: if passes == 0 { 0.0 } else { bad_passes as f64 / passes as f64 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_always_passes() {
        let r = simulate_derangement(4, 0.0, 10_000, 1).unwrap();
        assert_eq!((r.passes, r.bad_passes), (10_000, 0));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(simulate_derangement(1, 0.01, 10, 1).is_err());
        assert!(simulate_derangement(2, 0.5, 10, 1).is_err());
    }

    #[test]
    fn matches_first_order_expansion() {
        let (m, p) = (4usize, 0.01);
        let r = simulate_derangement(m, p, 400_000, 8).unwrap();
        let fail = 2.0 * p * (1.0 - 1.0 / m as f64);
        assert!((r.herald_failure_rate / fail - 1.0).abs() < 0.1, "{}", r.herald_failure_rate);
        assert!((r.conditional_infidelity / (p / m as f64) - 1.0).abs() < 0.15, "{}", r.conditional_infidelity);
    }
}
