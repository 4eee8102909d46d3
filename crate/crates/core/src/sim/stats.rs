use serde::Serialize;

use super::oracle::{ensemble_mean_alpha, MAX_ENSEMBLE_N};
use super::{run_encoder_trials, Model, SimConfig};
use crate::error::Result;

const Z95: f64 = 1.959_963_984_540_054;

/// 95% Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: usize, n: usize) -> [f64; 2] {
    if n == 0 {
        return [0.0, 1.0];
    }
    let (k, n) = (k as f64, n as f64);
    let p = k / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    [(centre - half).max(0.0), (centre + half).min(1.0)]
}

/// `τ_list = B1 + Σ_j (S_j − T_j) log q − 2 log q + H(V2, V3 | U1)` at the
/// realized dimensions, in bits per channel use.
pub fn tau_list(config: &SimConfig) -> Result<f64> {
    let d = config.dims()?;
    let model = Model::new(config)?;
    let n = d.n as f64;
    let log_q = (config.q() as f64).log2();
    Ok(d.kb as f64 / n + ((d.s2 - d.t2) + (d.s3 - d.t3)) as f64 / n * log_q - 2.0 * log_q + model.h_vv_given_u)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ListStatistics {
    pub n: usize,
    pub trials: usize,
    pub tau_list: f64,
    /// `2^{n τ_list}`.
    pub predicted: f64,
    pub empirical_mean: f64,
    /// Standard error of the empirical mean.
    pub empirical_se: f64,
    /// Exact ensemble mean, when `n` is small enough to enumerate types.
    pub ensemble_exact: Option<f64>,
    /// `2^{n(τ_list − η)}`.
    pub threshold: f64,
    pub below_threshold_fraction: f64,
    pub fallback_rate: f64,
    /// Raised when most trials fall below the threshold or fall back.
    pub flagged: bool,
}

pub fn list_statistics(config: &SimConfig) -> Result<ListStatistics> {
    let tau = tau_list(config)?;
    let res = run_encoder_trials(config)?;
    let n = config.n as f64;
    let t = res.trials.max(1) as f64;
    let mean = res.mean_alpha;
    let var = res.alpha.iter().map(|&a| (a as f64 - mean).powi(2)).sum::<f64>() / (t - 1.0).max(1.0);
    let threshold = 2f64.powf(n * (tau - config.eta));
    let below = res.alpha.iter().filter(|&&a| (a as f64) < threshold).count() as f64 / t;
    let ensemble_exact = if config.n <= MAX_ENSEMBLE_N {
        Some(ensemble_mean_alpha(config)?)
    } else {
        None
    };
    Ok(ListStatistics {
        n: config.n,
        trials: res.trials,
        tau_list: tau,
        predicted: 2f64.powf(n * tau),
        empirical_mean: mean,
        empirical_se: (var / t).sqrt(),
        ensemble_exact,
        threshold,
        below_threshold_fraction: below,
        fallback_rate: res.fallback_rate,
        flagged: below > 0.5 || res.fallback_rate > 0.5,
    })
}
