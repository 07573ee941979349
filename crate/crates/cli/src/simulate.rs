use anyhow::Result;
use mrs_core::codec::{Code, CodeSpec};
use mrs_core::sim::report::trials_csv;
use mrs_core::sim::{estimate_admissibility, sweep, ChannelSpec, SweepPoint, TrialConfig};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::{Outputs, Status};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub code: CodeSpec,
    pub channel: ChannelSpec,
    #[serde(default = "default_n")]
    pub n: u64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Target rate for the admissibility verdict.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warmup: Option<u64>,
}

pub fn default_n() -> u64 {
    20_000
}

pub fn default_epsilon() -> f64 {
    0.05
}

pub fn default_trials() -> u64 {
    1
}

pub fn run(cfg: &SimulateConfig, threads: usize) -> Result<Outputs> {
    let code = Code::new(cfg.code.clone())?;
    cfg.channel.validate()?;
    let trial_cfg = TrialConfig {
        n: cfg.n,
        epsilon: cfg.epsilon,
        seed: cfg.seed,
        warmup: cfg.warmup,
    };
    let mut files = Vec::new();
    let (trials, status) = match cfg.rate {
        Some(rate) => {
            let verdict =
                estimate_admissibility(&code, &cfg.channel, rate, &trial_cfg, cfg.trials, threads)?;
            let status = if verdict.pass {
                Status::Pass
            } else {
                Status::Fail
            };
            eprintln!(
                "{} at rate {rate}: {} of {} bits unresolved (err rate {:.3e})",
                if verdict.pass { "PASS" } else { "FAIL" },
                verdict.err_bits,
                verdict.total_bits,
                verdict.err_rate
            );
            files.push(("verdict.json".to_string(), crate::pretty(&verdict)?));
            (verdict.trials, status)
        }
        None => {
            let mut res = sweep(
                &code,
                std::slice::from_ref(&cfg.channel),
                &trial_cfg,
                cfg.trials,
                threads,
            )?;
            (res.points.remove(0).trials, Status::Done)
        }
    };
    let csv = trials_csv(&cfg.channel, &trials, cfg.rate, cfg.epsilon);
    let point = SweepPoint {
        channel: cfg.channel.clone(),
        trials,
    };
    let summary = json!({
        "trials": point.trials.len(),
        "mean_rate": point.mean_rate(),
        "std_rate": point.std_rate(),
        "mean_decoded_rate": point.mean_decoded_rate(),
        "mean_strict_rate": point.mean_strict_rate(),
    });
    eprintln!(
        "mean final rate {:.4} (sd {:.4}) over {} trials",
        point.mean_rate(),
        point.std_rate(),
        point.trials.len()
    );
    files.insert(0, ("trials.csv".to_string(), csv.into_bytes()));
    files.push(("summary.json".to_string(), crate::pretty(&summary)?));
    Ok(Outputs { files, status })
}
