use serde::Serialize;

use super::{map_ordered, run_trial, ChannelSpec, TrialConfig, TrialResult};
use crate::codec::Code;
use crate::Result;

/// Wilson score interval for `successes` out of `n` at normal quantile `z`.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckpointErrors {
    pub step: u64,
    pub err_bits: u64,
    pub total_bits: u64,
}

impl CheckpointErrors {
    pub fn err_rate(&self) -> f64 {
        if self.total_bits == 0 {
            0.0
        } else {
            self.err_bits as f64 / self.total_bits as f64
        }
    }
}

/// Monte Carlo verdict on whether a code achieves `rate` on a channel.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdmissibilityVerdict {
    pub pass: bool,
    pub rate: f64,
    pub epsilon: f64,
    /// Pooled unresolved bits among the first `⌊N(rate − ε)⌋` at step `N`.
    pub err_bits: u64,
    pub total_bits: u64,
    pub err_rate: f64,
    /// 95% Wilson interval for the error frequency at step `N`.
    pub interval: (f64, f64),
    /// Pooled errors at steps `N/4`, `N/2` and `N`.
    pub checkpoints: Vec<CheckpointErrors>,
    /// Resolved bits that disagreed with the message, over all trials.
    pub wrong_bits: u64,
    #[serde(skip)]
    pub trials: Vec<TrialResult>,
}

/// Runs `trials` seeded trials and checks, at every checkpoint, that the
/// pooled fraction of unresolved bits below `n(rate − ε)` is at most `ε`.
pub fn estimate_admissibility(
    code: &Code,
    ch: &ChannelSpec,
    rate: f64,
    cfg: &TrialConfig,
    trials: u64,
    threads: usize,
) -> Result<AdmissibilityVerdict> {
    cfg.validate()?;
    let results = map_ordered(trials as usize, threads, |t| {
        run_trial(code, ch, &cfg.for_trial(t as u64))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(verdict_from(results, rate, cfg.epsilon))
}

pub(crate) fn verdict_from(
    trials: Vec<TrialResult>,
    rate: f64,
    epsilon: f64,
) -> AdmissibilityVerdict {
    let steps: Vec<u64> = trials
        .first()
        .map(|t| t.checkpoints.iter().map(|c| c.step).collect())
        .unwrap_or_default();
    let checkpoints: Vec<CheckpointErrors> = steps
        .iter()
        .enumerate()
        .map(|(idx, &step)| {
            let m = ((step as f64) * (rate - epsilon)).floor().max(0.0) as u64;
            let err_bits = trials
                .iter()
                .map(|t| t.checkpoints[idx].unresolved_in(m))
                .sum();
            CheckpointErrors {
                step,
                err_bits,
                total_bits: m * trials.len() as u64,
            }
        })
        .collect();
    let last = checkpoints.last().cloned().unwrap_or(CheckpointErrors {
        step: 0,
        err_bits: 0,
        total_bits: 0,
    });
    let wrong_bits = trials.iter().map(|t| t.wrong_bits).sum();
    let pass = wrong_bits == 0 && checkpoints.iter().all(|c| c.err_rate() <= epsilon);
    AdmissibilityVerdict {
        pass,
        rate,
        epsilon,
        err_bits: last.err_bits,
        total_bits: last.total_bits,
        err_rate: last.err_rate(),
        interval: wilson_interval(last.err_bits, last.total_bits, 1.96),
        checkpoints,
        wrong_bits,
        trials,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_reference_values() {
        // 0 of 10: upper bound z²/(n + z²).
        let (lo, hi) = wilson_interval(0, 10, 1.96);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.27753).abs() < 1e-4);
        let (lo, hi) = wilson_interval(50, 100, 1.96);
        assert!((lo - 0.40383).abs() < 1e-4 && (hi - 0.59617).abs() < 1e-4);
    }
}
