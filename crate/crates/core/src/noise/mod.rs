//! Monte-Carlo noise trajectories and scaling fits.

mod derangement;
mod engine;
mod fit;
mod persistent;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builders::{build, BuildError, BuilderSpec, QramCircuit};
use crate::table::BitTable;

pub use derangement::{simulate_derangement, DerangementResult};
pub use engine::{Compiled, EngineError, Locus, TrialOutcome};
pub use fit::{fit_scaling, ols, wilson_interval, FitError, FitModel, ScalingFit, ScalingPoint, WILSON_Z};
pub use persistent::{simulate_persistent_accumulation, PersistentCurve};

/// Largest `p` accepted by [`NoiseModel::new`].
pub const MAX_P: f64 = 0.1;
/// Minimum trial count for [`estimate_infidelity`].
pub const MIN_TRIALS: u64 = 1000;

#[derive(Debug, Error)]
pub enum NoiseError {
    #[error("error probability {0} outside [0, {MAX_P}]")]
    Probability(f64),
    #[error("at least one error kind must be enabled")]
    NoKinds,
    #[error("need at least {MIN_TRIALS} trials, got {0}")]
    Trials(u64),
    #[error("address {address} outside table of {size}")]
    Address { address: usize, size: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorKinds {
    pub bitflip: bool,
    pub phaseflip: bool,
}

impl ErrorKinds {
    pub const BITFLIP: ErrorKinds = ErrorKinds { bitflip: true, phaseflip: false };
    pub const PHASEFLIP: ErrorKinds = ErrorKinds { bitflip: false, phaseflip: true };
    pub const BOTH: ErrorKinds = ErrorKinds { bitflip: true, phaseflip: true };
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p: f64,
    pub kinds: ErrorKinds,
    /// Router errors survive between queries (see
    /// [`simulate_persistent_accumulation`]); single-query trajectories
    /// ignore it.
    pub persistent: bool,
    pub seed: u64,
    pub locus: Locus,
    /// Router levels `0..protected_levels` of tree-based builders are
    /// treated as error corrected and receive no errors.
    pub protected_levels: usize,
}

impl NoiseModel {
    pub fn new(p: f64, kinds: ErrorKinds, seed: u64) -> Result<Self, NoiseError> {
        if !(0.0..=MAX_P).contains(&p) {
            return Err(NoiseError::Probability(p));
        }
        Self::stress(p, kinds, seed)
    }

    /// Like [`NoiseModel::new`] but accepts any `p` in `[0, 1]`, outside the
    /// range where the trajectory statistics are meaningful.
    pub fn stress(p: f64, kinds: ErrorKinds, seed: u64) -> Result<Self, NoiseError> {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(NoiseError::Probability(p));
        }
        if !kinds.bitflip && !kinds.phaseflip {
            return Err(NoiseError::NoKinds);
        }
        Ok(NoiseModel { p, kinds, persistent: false, seed, locus: Locus::default(), protected_levels: 0 })
    }

    pub fn locus(mut self, locus: Locus) -> Self {
        self.locus = locus;
        self
    }

    pub fn protected_levels(mut self, k: usize) -> Self {
        self.protected_levels = k;
        self
    }
}

/// Counter-based stream for trajectory `trial` under `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn exempt_qubits(q: &QramCircuit, levels: usize) -> Vec<bool> {
    let mut exempt = vec![false; q.circuit.width()];
    if levels == 0 {
        return exempt;
    }
    for name in ["route", "ctl"] {
        if let Ok(qs) = q.circuit.reg(name) {
            for (i, x) in qs.iter().enumerate() {
                // node i+1 in heap order sits at depth ⌊lg(i+1)⌋
                let depth = (usize::BITS - 1 - (i + 1).leading_zeros()) as usize;
                exempt[x.index()] = depth < levels;
            }
        }
    }
    exempt
}

pub fn compile(spec: &BuilderSpec, table: &BitTable, noise: &NoiseModel) -> Result<Compiled, NoiseError> {
    let q = build(spec, table)?;
    Ok(Compiled::new(&q, table, noise.locus, &exempt_qubits(&q, noise.protected_levels))?)
}

/// A single noisy basis query using trajectory stream 0 of `noise.seed`.
pub fn run_noisy_query(
    spec: &BuilderSpec,
    table: &BitTable,
    address: usize,
    noise: &NoiseModel,
) -> Result<TrialOutcome, NoiseError> {
    if address >= table.len() {
        return Err(NoiseError::Address { address, size: table.len() });
    }
    let compiled = compile(spec, table, noise)?;
    let mut rng = trial_rng(noise.seed, 0);
    let x = if noise.kinds.bitflip { compiled.sample_sites(noise.p, &mut rng) } else { vec![] };
    let z = if noise.kinds.phaseflip { compiled.sample_sites(noise.p, &mut rng) } else { vec![] };
    Ok(compiled.run_with_errors(address, &x, &z))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    failures: u64,
    wrong_output: u64,
    address_disturbed: u64,
    phase_flips: u64,
    errors: u64,
}

impl Tally {
    fn add(mut self, o: &TrialOutcome) -> Self {
        self.failures += o.failed() as u64;
        self.wrong_output += !o.output_correct as u64;
        self.address_disturbed += !o.address_intact as u64;
        self.phase_flips += o.phase_flipped as u64;
        self.errors += o.error_count as u64;
        self
    }

    fn merge(self, o: Tally) -> Tally {
        Tally {
            failures: self.failures + o.failures,
            wrong_output: self.wrong_output + o.wrong_output,
            address_disturbed: self.address_disturbed + o.address_disturbed,
            phase_flips: self.phase_flips + o.phase_flips,
            errors: self.errors + o.errors,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub builder: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    pub failures: u64,
    pub infidelity: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub wrong_output: u64,
    pub address_disturbed: u64,
    /// Trials whose sign was flipped by Z errors (not part of the metric).
    pub phase_flips: u64,
    pub mean_errors: f64,
    pub exposures: usize,
}

impl Estimate {
    pub const CSV_HEADER: &'static str = "builder,N,p,trials,seed,infidelity,ci_lo,ci_hi";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.builder, self.n, self.p, self.trials, self.seed, self.infidelity, self.ci_lo, self.ci_hi
        )
    }

    pub fn ci_halfwidth(&self) -> f64 {
        (self.ci_hi - self.ci_lo) / 2.0
    }
}

/// Failure rate over `trials` random-address queries against a fixed table.
///
/// A trial fails when the output word is wrong or the address register ends
/// disturbed. The interval is the Wilson 95% interval, except that it
/// collapses to `[0, 0]` when no error could be injected at all.
pub fn estimate_on_table(
    spec: &BuilderSpec,
    table: &BitTable,
    noise: &NoiseModel,
    trials: u64,
) -> Result<Estimate, NoiseError> {
    if trials < MIN_TRIALS {
        return Err(NoiseError::Trials(trials));
    }
    let compiled = compile(spec, table, noise)?;
    let (p, kinds, seed) = (noise.p, noise.kinds, noise.seed);
    let tally = (0..trials)
        .into_par_iter()
        .fold(Tally::default, |acc, t| {
            let mut rng = trial_rng(seed, t);
            let (_, outcome) = compiled.trial(p, kinds.bitflip, kinds.phaseflip, &mut rng);
            acc.add(&outcome)
        })
        .reduce(Tally::default, Tally::merge);
    let infidelity = tally.failures as f64 / trials as f64;
    let (ci_lo, ci_hi) = if p == 0.0 || compiled.exposures() == 0 {
        (0.0, 0.0)
    } else {
        wilson_interval(tally.failures, trials)
    };
    Ok(Estimate {
        builder: spec.kind.name().to_string(),
        n: table.len(),
        p,
        trials,
        seed,
        failures: tally.failures,
        infidelity,
        ci_lo,
        ci_hi,
        wrong_output: tally.wrong_output,
        address_disturbed: tally.address_disturbed,
        phase_flips: tally.phase_flips,
        mean_errors: tally.errors as f64 / trials as f64,
        exposures: compiled.exposures(),
    })
}

/// [`estimate_on_table`] with a one-bit random table derived from `seed`.
pub fn estimate_infidelity(
    spec: &BuilderSpec,
    n: usize,
    p: f64,
    trials: u64,
    kinds: ErrorKinds,
    seed: u64,
) -> Result<Estimate, NoiseError> {
    let noise = NoiseModel::new(p, kinds, seed)?;
    estimate_with(spec, n, &noise, trials)
}

pub fn estimate_with(spec: &BuilderSpec, n: usize, noise: &NoiseModel, trials: u64) -> Result<Estimate, NoiseError> {
    let table = BitTable::random(n, 1, noise.seed).map_err(|e| NoiseError::Build(e.into()))?;
    estimate_on_table(spec, &table, noise, trials)
}
