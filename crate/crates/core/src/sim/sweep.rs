use super::{run_trial, ChannelSpec, TrialConfig, TrialResult};
use crate::codec::Code;
use crate::Result;

/// `f(0), …, f(n − 1)` in order, on `threads` workers (`0` means one per
/// core, `1` runs inline). Results do not depend on the thread count.
pub fn map_ordered<T, F>(n: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if threads != 1 {
        use rayon::prelude::*;
        let run = || (0..n).into_par_iter().map(&f).collect();
        return match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        };
    }
    let _ = threads;
    (0..n).map(f).collect()
}

/// Trials at one grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub channel: ChannelSpec,
    pub trials: Vec<TrialResult>,
}

impl SweepPoint {
    pub fn mean_rate(&self) -> f64 {
        mean(self.trials.iter().map(|t| t.final_rate))
    }

    pub fn std_rate(&self) -> f64 {
        let m = self.mean_rate();
        let n = self.trials.len();
        if n < 2 {
            return 0.0;
        }
        let ss: f64 = self.trials.iter().map(|t| (t.final_rate - m).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    }

    pub fn mean_decoded_rate(&self) -> f64 {
        mean(self.trials.iter().map(|t| t.decoded_rate))
    }

    pub fn mean_strict_rate(&self) -> f64 {
        mean(self.trials.iter().map(|t| t.strict_rate))
    }
}

fn mean(xs: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = xs.len();
    if n == 0 {
        0.0
    } else {
        xs.sum::<f64>() / n as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
}

/// Runs `trials` trials at every channel. Trial `t` uses the same seed at
/// every point, so under coupled erasures the survivors shrink
/// monotonically as capacities decrease.
pub fn sweep(
    code: &Code,
    channels: &[ChannelSpec],
    cfg: &TrialConfig,
    trials: u64,
    threads: usize,
) -> Result<SweepResult> {
    cfg.validate()?;
    let per = trials as usize;
    let flat = map_ordered(channels.len() * per, threads, |idx| {
        run_trial(
            code,
            &channels[idx / per.max(1)],
            &cfg.for_trial((idx % per.max(1)) as u64),
        )
    });
    let mut flat = flat.into_iter();
    let mut points = Vec::with_capacity(channels.len());
    for ch in channels {
        let trials = flat.by_ref().take(per).collect::<Result<Vec<_>>>()?;
        points.push(SweepPoint {
            channel: ch.clone(),
            trials,
        });
    }
    Ok(SweepResult { points })
}
