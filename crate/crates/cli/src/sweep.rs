use anyhow::{bail, Result};
use mrs_core::codec::{Code, CodeSpec};
use mrs_core::rate::StepFunction;
use mrs_core::rational::{to_f64, Q};
use mrs_core::sim::report::{svg_plot, sweep_aggregate_csv, sweep_trials_csv, Series};
use mrs_core::sim::{sweep, ChannelSpec, TrialConfig};
use serde::{Deserialize, Serialize};

use crate::simulate::{default_epsilon, default_n, default_trials};
use crate::{Outputs, Status};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub code: CodeSpec,
    pub grid: Vec<ChannelSpec>,
    #[serde(default = "default_n")]
    pub n: u64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warmup: Option<u64>,
    /// Theoretical rate as a function of the capacity, for single
    /// transmitter grids.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theory: Option<StepFunction>,
}

/// `count` evenly spaced single-transmitter channels from `from` to `to`.
pub fn line(from: &Q, to: &Q, count: u64) -> Vec<ChannelSpec> {
    if count <= 1 {
        return vec![ChannelSpec::new(vec![from.clone()])];
    }
    let step = (to - from) / Q::from_integer((count - 1).into());
    (0..count)
        .map(|i| ChannelSpec::new(vec![from + &step * Q::from_integer(i.into())]))
        .collect()
}

pub fn run(cfg: &SweepConfig, threads: usize) -> Result<Outputs> {
    let code = Code::new(cfg.code.clone())?;
    if cfg.grid.is_empty() {
        bail!("sweep config: field `grid`: no grid points");
    }
    let d = cfg.grid[0].d();
    for (i, ch) in cfg.grid.iter().enumerate() {
        if ch.d() != d {
            bail!(
                "sweep config: field `grid[{i}]`: expected {d} capacities, got {}",
                ch.d()
            );
        }
        ch.validate()?;
    }
    if cfg.theory.is_some() && d != 1 {
        bail!("sweep config: field `theory`: a theoretical curve needs a single-transmitter grid");
    }
    let trial_cfg = TrialConfig {
        n: cfg.n,
        epsilon: cfg.epsilon,
        seed: cfg.seed,
        warmup: cfg.warmup,
    };
    let result = sweep(&code, &cfg.grid, &trial_cfg, cfg.trials, threads)?;

    let x_of = |i: usize, ch: &ChannelSpec| {
        if d == 1 {
            to_f64(&ch.capacities[0])
        } else {
            i as f64
        }
    };
    let theory: Option<Vec<f64>> = cfg.theory.as_ref().map(|f| {
        cfg.grid
            .iter()
            .map(|ch| to_f64(&f.eval(&ch.capacities[0])))
            .collect()
    });

    let mut empirical = Series::line(
        "empirical",
        result
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (x_of(i, &p.channel), p.mean_rate()))
            .collect(),
    );
    empirical.error_bars = Some(result.points.iter().map(|p| p.std_rate()).collect());
    let mut series = vec![empirical];
    if let Some(f) = &cfg.theory {
        let xs: Vec<f64> = cfg
            .grid
            .iter()
            .map(|ch| to_f64(&ch.capacities[0]))
            .collect();
        let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let samples = 400;
        let points = (0..=samples)
            .map(|j| {
                let x = lo + (hi - lo) * j as f64 / samples as f64;
                (x, f.eval_f64(x))
            })
            .collect();
        series.push(Series {
            label: "theory".into(),
            points,
            steps: true,
            error_bars: None,
        });
    }
    let x_label = if d == 1 { "capacity c" } else { "grid point" };
    let svg = svg_plot(&series, x_label, "rate");

    for (i, p) in result.points.iter().enumerate() {
        eprintln!(
            "point {i}: mean rate {:.4} (sd {:.4})",
            p.mean_rate(),
            p.std_rate()
        );
    }
    Ok(Outputs {
        files: vec![
            (
                "sweep_trials.csv".into(),
                sweep_trials_csv(&result, cfg.epsilon).into_bytes(),
            ),
            (
                "sweep.csv".into(),
                sweep_aggregate_csv(&result, theory.as_deref()).into_bytes(),
            ),
            ("sweep.svg".into(), svg.into_bytes()),
        ],
        status: Status::Done,
    })
}
