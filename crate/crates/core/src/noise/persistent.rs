use std::collections::BTreeSet;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fit::ols, trial_rng, NoiseError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistentCurve {
    #[serde(rename = "N")]
    pub n: usize,
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    /// Mean corrupted fraction of router nodes after query `q + 1`.
    pub fraction: Vec<f64>,
}

impl PersistentCurve {
    /// Log-log slope of the corrupted fraction against the query index,
    /// over queries with a nonzero fraction.
    pub fn growth_exponent(&self) -> Option<f64> {
        let (x, y): (Vec<f64>, Vec<f64>) = self
            .fraction
            .iter()
            .enumerate()
            .filter(|(_, f)| **f > 0.0)
            .map(|(q, f)| (((q + 1) as f64).ln(), f.ln()))
            .unzip();
        if x.len() < 2 {
            return None;
        }
        ols(&x, &y).ok().map(|(slope, _, _)| slope)
    }
}

/// Router-tree corruption that is never reset between queries.
///
/// The tree has `n - 1` routers in heap order. During each query every
/// router independently becomes corrupted with probability `p`, and every
/// router already corrupted when the query starts contaminates its parent
/// with probability 1/2: the parent swaps with exactly one of its two
/// children, and an idle router defaults to one fixed side. Returns the mean
/// corrupted fraction after each of `queries` queries.
pub fn simulate_persistent_accumulation(
    n: usize,
    p: f64,
    queries: usize,
    trials: u64,
    seed: u64,
) -> Result<PersistentCurve, NoiseError> {
    if n < 2 || !n.is_power_of_two() {
        return Err(NoiseError::Parameter(format!("tree size must be a power of two >= 2, got {n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(NoiseError::Probability(p));
    }
    if trials == 0 || queries == 0 {
        return Err(NoiseError::Parameter("need at least one trial and one query".into()));
    }
    let nodes = (n - 1) as u64;
    let seeds = Binomial::new(nodes, p).map_err(|e| NoiseError::Parameter(e.to_string()))?;
    let totals: Vec<u64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let mut bad: BTreeSet<u64> = BTreeSet::new();
            let mut counts = Vec::with_capacity(queries);
            for _ in 0..queries {
                let spread: Vec<u64> = bad.iter().copied().filter(|&k| k > 1 && rng.random_bool(0.5)).collect();
                bad.extend(spread.into_iter().map(|k| k / 2));
                for _ in 0..seeds.sample(&mut rng) {
                    bad.insert(rng.random_range(1..=nodes));
                }
                counts.push(bad.len() as u64);
            }
            counts
        })
        .reduce(
            || vec![0u64; queries],
            |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect(),
        );
    let fraction = totals.iter().map(|&c| c as f64 / (trials as f64 * nodes as f64)).collect();
    Ok(PersistentCurve { n, p, trials, seed, fraction })
}
