//! Seeded erasure-channel simulation.
//!
//! A trial sends every transmitter's symbol stream through its own erasure
//! channel into one receiver, feeds the survivors to a [`Decoder`] in time
//! order and records how far the decoded prefix of the message gets.

mod admissibility;
pub mod report;
mod sweep;

use serde::{Deserialize, Serialize};

pub use admissibility::{estimate_admissibility, wilson_interval, AdmissibilityVerdict};
pub use sweep::{map_ordered, sweep, SweepPoint, SweepResult};

use crate::codec::{Code, Decoder, Encoder};
use crate::gf2::{derive_key, prf_bits, BitVector, PrfStream};
use crate::rational::{serde_q, to_f64, Q};
use crate::{Error, Result};

/// How erasure draws relate across capacities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErasureMode {
    /// One uniform draw per symbol, thresholded by the capacity, so the
    /// survivors at a lower capacity are a subset of those at a higher one.
    #[default]
    Coupled,
    /// Fresh draws for every capacity value.
    Independent,
    /// Deterministic: symbol `j` survives iff `⌊j·c⌋ > ⌊(j−1)·c⌋`. Models
    /// lossless links of fractional rate.
    Paced,
}

/// Per-transmitter erasure channels seen by one receiver.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    /// Survival probability of each transmitter's symbols.
    #[serde(with = "serde_q::vec")]
    pub capacities: Vec<Q>,
    /// Symbols each transmitter sends per receiver time step; all 1 if
    /// omitted.
    #[serde(default)]
    pub symbol_rates: Vec<u64>,
    #[serde(default)]
    pub mode: ErasureMode,
}

impl ChannelSpec {
    pub fn new(capacities: Vec<Q>) -> Self {
        Self {
            capacities,
            symbol_rates: Vec::new(),
            mode: ErasureMode::Coupled,
        }
    }

    pub fn with_symbol_rates(mut self, rates: Vec<u64>) -> Self {
        self.symbol_rates = rates;
        self
    }

    pub fn with_mode(mut self, mode: ErasureMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn d(&self) -> usize {
        self.capacities.len()
    }

    /// Symbol rate of transmitter `k` (0-based).
    pub fn symbol_rate(&self, k: usize) -> u64 {
        self.symbol_rates.get(k).copied().unwrap_or(1)
    }

    /// Effective link rate `s_k·c_k` in bits per time step.
    pub fn link_rate(&self, k: usize) -> f64 {
        self.symbol_rate(k) as f64 * to_f64(&self.capacities[k])
    }

    pub fn validate(&self) -> Result<()> {
        if self.capacities.is_empty() {
            return Err(Error::InvalidChannel("no capacities".into()));
        }
        let zero = Q::from_integer(0.into());
        let one = Q::from_integer(1.into());
        if self.capacities.iter().any(|c| c < &zero || c > &one) {
            return Err(Error::InvalidChannel(
                "capacities must lie in [0, 1]".into(),
            ));
        }
        if !self.symbol_rates.is_empty() && self.symbol_rates.len() != self.d() {
            return Err(Error::InvalidChannel(
                "symbol_rates must have one entry per capacity".into(),
            ));
        }
        if self.symbol_rates.contains(&0) {
            return Err(Error::InvalidChannel(
                "symbol rates must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Horizon and randomness of one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    /// Receiver time steps measured after warmup.
    pub n: u64,
    pub epsilon: f64,
    pub seed: u64,
    /// Lossless super-slots sent before measurement starts. Defaults to 1
    /// for codes that decode super-slot by super-slot and 0 otherwise.
    #[serde(default)]
    pub warmup: Option<u64>,
}

impl TrialConfig {
    pub fn new(n: u64, epsilon: f64, seed: u64) -> Self {
        Self {
            n,
            epsilon,
            seed,
            warmup: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Precondition("horizon N must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Precondition("ε must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// Seed of trial `index` in a batch. The point in a sweep grid is
    /// deliberately not mixed in, so every grid point sees the same draws.
    pub fn trial_seed(&self, index: u64) -> u64 {
        derive_key(self.seed, &[index])
    }

    pub fn for_trial(&self, index: u64) -> Self {
        Self {
            seed: self.trial_seed(index),
            ..self.clone()
        }
    }
}

/// Which message bits were resolved at a checkpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    /// Time steps after warmup.
    pub step: u64,
    /// Resolution flags for message bits after the warmup prefix.
    pub resolved: BitVector,
}

impl Checkpoint {
    /// Unresolved bits among the first `m` measured bits; bits past the end
    /// of the message count as unresolved.
    pub fn unresolved_in(&self, m: u64) -> u64 {
        let m = m as usize;
        let have = m.min(self.resolved.len());
        let ones = if have == 0 {
            0
        } else {
            self.resolved.extract(0, have).count_ones()
        };
        (m - ones) as u64
    }
}

/// Largest `m` such that at most an `ε` fraction of bits `1..=m` is
/// unresolved.
pub fn tolerant_prefix(resolved: &BitVector, epsilon: f64) -> u64 {
    let mut unresolved = 0u64;
    let mut best = 0u64;
    for (i, bit) in resolved.iter().enumerate() {
        if !bit {
            unresolved += 1;
        }
        let m = i as u64 + 1;
        if unresolved as f64 <= epsilon * m as f64 {
            best = m;
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialResult {
    pub seed: u64,
    pub n: u64,
    pub warmup_steps: u64,
    /// Decoded prefix at the end of warmup; measurement starts after it.
    pub bit_offset: u64,
    /// Surviving symbols per transmitter after warmup.
    pub received_counts: Vec<u64>,
    /// `(step, strict prefix beyond the offset)` at evenly spaced steps.
    pub trajectory: Vec<(u64, u64)>,
    /// Contiguous decoded prefix beyond the offset at step `n`.
    pub decoded_prefix: u64,
    /// ε-tolerant prefix beyond the offset at step `n`.
    pub tolerant_prefix: u64,
    /// Resolved bits inside the ε-tolerant prefix.
    pub decoded_bits: u64,
    /// `tolerant_prefix / n`: bits delivered with at most an ε fraction
    /// unresolved, per time step.
    pub final_rate: f64,
    /// `decoded_bits / n`.
    pub decoded_rate: f64,
    /// `decoded_prefix / n`.
    pub strict_rate: f64,
    /// `(block, step)` at which each block finished decoding; warmup steps
    /// are negative offsets folded to 0.
    pub block_latencies: Vec<(u64, u64)>,
    /// Admissibility checkpoints at `n/4`, `n/2` and `n`.
    pub checkpoints: Vec<Checkpoint>,
    /// Resolved bits that disagree with the message; nonzero means a bug.
    pub wrong_bits: u64,
}

impl TrialResult {
    /// Unresolved bits among the first `⌊n(rate − ε)⌋` measured bits at the
    /// final step, and that bit count.
    pub fn errors_at_rate(&self, rate: f64, epsilon: f64) -> (u64, u64) {
        let cp = self.checkpoints.last().expect("final checkpoint");
        let m = ((cp.step as f64) * (rate - epsilon)).floor().max(0.0) as u64;
        (cp.unresolved_in(m), m)
    }
}

const TRAJECTORY_POINTS: u64 = 64;

fn survives(mode: ErasureMode, seed: u64, k: usize, j: u64, c: &Q, c_f64: f64) -> bool {
    match mode {
        ErasureMode::Coupled => PrfStream::at(seed, "erasure", &[k as u64, j]).next_f64() < c_f64,
        ErasureMode::Independent => {
            PrfStream::at(seed, "erasure-independent", &[k as u64, j, c_f64.to_bits()]).next_f64()
                < c_f64
        }
        ErasureMode::Paced => {
            let (num, den) = (c.numer(), c.denom());
            let floor = |x: u64| (num * num_bigint::BigInt::from(x)) / den;
            floor(j) > floor(j - 1)
        }
    }
}

/// Runs one seeded trial of `code` over `ch`.
pub fn run_trial(code: &Code, ch: &ChannelSpec, cfg: &TrialConfig) -> Result<TrialResult> {
    cfg.validate()?;
    ch.validate()?;
    let d = code.d();
    if ch.d() != d {
        return Err(Error::InvalidChannel(format!(
            "code has {d} transmitters, channel has {}",
            ch.d()
        )));
    }
    let rates: Vec<u64> = (0..d).map(|k| ch.symbol_rate(k)).collect();
    if let Some(designed) = code.symbol_rates() {
        if designed != rates {
            return Err(Error::InvalidChannel(format!(
                "code is laid out for symbol rates {designed:?}, channel has {rates:?}"
            )));
        }
    }

    let warmup_steps = code
        .super_slot()
        .map_or(0, |slot| slot * cfg.warmup.unwrap_or(1));
    let total_steps = warmup_steps + cfg.n;
    let message_bits = (0..d)
        .map(|k| code.message_span(k + 1, rates[k] * total_steps))
        .try_fold(0u64, |acc, s| s.map(|s| acc.max(s)))?;

    let q_key = derive_key(cfg.seed, &[0x51]);
    let message = prf_bits(
        &mut PrfStream::new(cfg.seed, "message"),
        message_bits as usize,
    );
    let encoder = Encoder::new(code.clone(), q_key, message.clone()).with_zero_padding();
    let mut decoder = Decoder::new(code.clone(), q_key).with_message_bits(message_bits);
    let caps: Vec<f64> = ch.capacities.iter().map(to_f64).collect();

    let mut received = vec![0u64; d];
    let mut latencies = Vec::new();
    let mut trajectory = Vec::new();
    let mut checkpoints = Vec::new();
    let mut bit_offset = 0;
    let checkpoint_steps = [cfg.n / 4, cfg.n / 2, cfg.n];
    let traj_every = (cfg.n / TRAJECTORY_POINTS).max(1);
    let max_rate = *rates.iter().max().expect("d ≥ 1");

    for t in 1..=total_steps {
        let lossless = t <= warmup_steps;
        for r in 0..max_rate {
            for k in 0..d {
                if r >= rates[k] {
                    continue;
                }
                let j = (t - 1) * rates[k] + r + 1;
                let alive = lossless || {
                    let jm = j - warmup_steps * rates[k];
                    survives(ch.mode, cfg.seed, k + 1, jm, &ch.capacities[k], caps[k])
                };
                if !alive {
                    continue;
                }
                if !lossless {
                    received[k] += 1;
                }
                let bit = encoder.encode(k + 1, j)?;
                for block in decoder.ingest(k + 1, j, Some(bit))? {
                    latencies.push((block, t.saturating_sub(warmup_steps)));
                }
            }
        }
        if t == warmup_steps {
            bit_offset = decoder.decoded_prefix();
        }
        if t > warmup_steps {
            let step = t - warmup_steps;
            if step.is_multiple_of(traj_every) || step == cfg.n {
                trajectory.push((step, decoder.decoded_prefix().saturating_sub(bit_offset)));
            }
            if checkpoint_steps.contains(&step)
                && checkpoints
                    .last()
                    .is_none_or(|c: &Checkpoint| c.step != step)
            {
                let resolved = (bit_offset..message_bits)
                    .map(|b| decoder.is_resolved(b))
                    .collect();
                checkpoints.push(Checkpoint { step, resolved });
            }
        }
    }

    let wrong_bits = (0..message_bits)
        .filter(|&b| {
            decoder
                .value(b)
                .is_some_and(|v| v != message.get(b as usize))
        })
        .count() as u64;
    let decoded_prefix = decoder.decoded_prefix().saturating_sub(bit_offset);
    let last = checkpoints.last().expect("final checkpoint");
    let tolerant = tolerant_prefix(&last.resolved, cfg.epsilon);
    let decoded_bits = tolerant - last.unresolved_in(tolerant);
    Ok(TrialResult {
        seed: cfg.seed,
        n: cfg.n,
        warmup_steps,
        bit_offset,
        received_counts: received,
        trajectory,
        decoded_prefix,
        tolerant_prefix: tolerant,
        decoded_bits,
        final_rate: tolerant as f64 / cfg.n as f64,
        decoded_rate: decoded_bits as f64 / cfg.n as f64,
        strict_rate: decoded_prefix as f64 / cfg.n as f64,
        block_latencies: latencies,
        checkpoints,
        wrong_bits,
    })
}
