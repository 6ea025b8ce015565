use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Two-sided 95% normal quantile.
pub const WILSON_Z: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let phat = k as f64 / n_f;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n_f;
    let centre = (phat + z2 / (2.0 * n_f)) / denom;
    let half = WILSON_Z * (phat * (1.0 - phat) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// `y = c N^a`
    #[serde(rename = "power_in_N")]
    PowerInN,
    /// `y = c (lg N)^a`
    #[serde(rename = "power_in_logN")]
    PowerInLogN,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    #[serde(rename = "N")]
    pub n: f64,
    pub infidelity: f64,
    pub ci_halfwidth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub points: Vec<ScalingPoint>,
    pub model: FitModel,
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("infidelity {0} at N={1} is outside (0, 0.5)")]
    OutOfRange(f64, f64),
    #[error("x values do not span a range")]
    Degenerate,
}

/// Ordinary least squares `y = a + b x`; returns `(b, a, r²)`.
pub fn ols(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64), FitError> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx <= 1e-300 {
        return Err(FitError::Degenerate);
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok((slope, intercept, r2))
}

/// Log-log least squares of infidelity against `N` or `lg N`.
pub fn fit_scaling(points: &[ScalingPoint], model: FitModel) -> Result<ScalingFit, FitError> {
    if points.len() < 4 {
        return Err(FitError::TooFewPoints { need: 4, got: points.len() });
    }
    for p in points {
        if !(p.infidelity > 0.0 && p.infidelity < 0.5) {
            return Err(FitError::OutOfRange(p.infidelity, p.n));
        }
        if model == FitModel::PowerInLogN && p.n <= 2.0 {
            return Err(FitError::Degenerate);
        }
    }
    let x: Vec<f64> = points
        .iter()
        .map(|p| match model {
            FitModel::PowerInN => p.n.ln(),
            FitModel::PowerInLogN => p.n.log2().ln(),
        })
        .collect();
    let y: Vec<f64> = points.iter().map(|p| p.infidelity.ln()).collect();
    let (exponent, intercept, r_squared) = ols(&x, &y)?;
    Ok(ScalingFit { points: points.to_vec(), model, exponent, intercept, r_squared })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pts(f: impl Fn(f64) -> f64) -> Vec<ScalingPoint> {
        (3..=9).map(|k| {
            let n = (1u64 << k) as f64;
            ScalingPoint { n, infidelity: f(n), ci_halfwidth: 0.0 }
        }).collect()
    }

    #[test]
    fn planted_linear_law() {
        let fit = fit_scaling(&pts(|n| 1e-4 * n), FitModel::PowerInN).unwrap();
        assert!((fit.exponent - 1.0).abs() < 0.01);
        assert!(fit.r_squared > 0.999);
    }

    #[test]
    fn planted_log_square_law() {
        let fit = fit_scaling(&pts(|n| 1e-3 * n.log2().powi(2)), FitModel::PowerInLogN).unwrap();
        assert!((fit.exponent - 2.0).abs() < 0.05);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(fit_scaling(&pts(|_| 0.1)[..3], FitModel::PowerInN), Err(FitError::TooFewPoints { .. })));
        assert!(matches!(fit_scaling(&pts(|n| n / 600.0), FitModel::PowerInN), Err(FitError::OutOfRange(..))));
        let same = vec![ScalingPoint { n: 8.0, infidelity: 0.1, ci_halfwidth: 0.0 }; 4];
        assert_eq!(fit_scaling(&same, FitModel::PowerInN), Err(FitError::Degenerate));
    }

    #[test]
    fn wilson_edges() {
        let (lo, hi) = wilson_interval(0, 1000);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.01);
        let (lo, hi) = wilson_interval(500, 1000);
        assert!((lo + hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wilson_coverage_on_planted_bernoulli() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let rate = 0.03;
        let mut covered = 0;
        for _ in 0..100 {
            let k = (0..5000).filter(|_| rng.random::<f64>() < rate).count() as u64;
            let (lo, hi) = wilson_interval(k, 5000);
            covered += (lo <= rate && rate <= hi) as u32;
        }
        assert!(covered >= 90, "{covered}");
    }
}
