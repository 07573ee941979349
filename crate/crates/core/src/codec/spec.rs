use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::rate::StepFunction;
use crate::rational::{serde_q, Q};
use crate::region::GParameter;
use crate::{Error, Result};

/// Algebraic description of a code family and its parameters.
///
/// Block sizes are in bits. JSON form: `{"family": "blockwise", "k": 64,
/// "l": 128}` and so on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum CodeSpec {
    /// Each `k`-bit block is encoded into `l` symbols, blocks sent in turn.
    Blockwise { k: u64, l: u64 },
    /// Two blockwise codes over the same blocks, interleaved slot by slot.
    Multiplexed { k: u64, l1: u64, l2: u64 },
    /// Time sharing over blockwise codes whose rates are drawn per symbol
    /// from the distribution induced by `g`, one component per transmitter.
    Superposition { k: u64, g: Vec<StepFunction> },
    /// Two-transmitter code mixing three blocks of different ages per symbol.
    ExNonOpt { k: u64 },
    /// Three-transmitter code splitting blocks into sub-blocks grouped into
    /// super-blocks at two rates.
    SubBlock {
        k: u64,
        l: u64,
        #[serde(with = "serde_q::vec")]
        w: Vec<Q>,
        #[serde(with = "serde_q")]
        r1: Q,
        #[serde(with = "serde_q")]
        r2: Q,
        /// Symbols each transmitter sends per time step; defaults to `⌈w_k⌉`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        symbol_rates: Option<Vec<u64>>,
    },
}

fn bad(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidSpec {
        field,
        reason: reason.into(),
    }
}

/// `x` as an exact integer, if it is one.
pub(crate) fn integral(x: &Q) -> Option<u64> {
    x.is_integer().then(|| x.to_integer().to_u64()).flatten()
}

impl CodeSpec {
    /// Number of transmitters.
    pub fn d(&self) -> usize {
        match self {
            CodeSpec::Blockwise { .. } | CodeSpec::Multiplexed { .. } => 1,
            CodeSpec::Superposition { g, .. } => g.len(),
            CodeSpec::ExNonOpt { .. } => 2,
            CodeSpec::SubBlock { .. } => 3,
        }
    }

    /// Block size in bits.
    pub fn k(&self) -> u64 {
        match self {
            CodeSpec::Blockwise { k, .. }
            | CodeSpec::Multiplexed { k, .. }
            | CodeSpec::Superposition { k, .. }
            | CodeSpec::ExNonOpt { k }
            | CodeSpec::SubBlock { k, .. } => *k,
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            CodeSpec::Blockwise { .. } => "blockwise",
            CodeSpec::Multiplexed { .. } => "multiplexed",
            CodeSpec::Superposition { .. } => "superposition",
            CodeSpec::ExNonOpt { .. } => "ex_non_opt",
            CodeSpec::SubBlock { .. } => "sub_block",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.k();
        if k == 0 {
            return Err(bad("k", "must be at least 1"));
        }
        match self {
            CodeSpec::Blockwise { l, .. } => {
                if *l < k {
                    return Err(bad("l", format!("must be at least k = {k}")));
                }
            }
            CodeSpec::Multiplexed { l1, l2, .. } => {
                if *l1 < k {
                    return Err(bad("l1", format!("must be at least k = {k}")));
                }
                if l2 <= l1 {
                    return Err(bad("l2", "must exceed l1"));
                }
            }
            CodeSpec::Superposition { g, .. } => {
                if g.is_empty() {
                    return Err(bad("g", "needs at least one component"));
                }
                GParameter::new(g.clone()).map_err(|e| bad("g", e.to_string()))?;
            }
            CodeSpec::ExNonOpt { .. } => {}
            CodeSpec::SubBlock {
                l,
                w,
                r1,
                r2,
                symbol_rates,
                ..
            } => {
                if *l < k {
                    return Err(bad("l", format!("must be at least k = {k}")));
                }
                if w.len() != 3 {
                    return Err(bad("w", "needs exactly three link rates"));
                }
                if w.iter().any(|x| !x.is_positive()) {
                    return Err(bad("w", "link rates must be positive"));
                }
                if !r1.is_positive() || r1 >= r2 {
                    return Err(bad("r1", "must satisfy 0 < r1 < r2"));
                }
                if &w[2] >= r2 {
                    return Err(bad("w", "needs w3 < r2"));
                }
                let lk = Q::new((*l).into(), k.into());
                if integral(&(r1 * &lk)).is_none() {
                    return Err(bad("r1", "r1·L/K must be an integer"));
                }
                if integral(&(r2 * &lk)).is_none() {
                    return Err(bad("r2", "r2·L/K must be an integer"));
                }
                let gamma_k = &w[2] / r2 * Q::from_integer(k.into());
                if integral(&gamma_k).is_none() || gamma_k.is_zero() {
                    return Err(bad("w", "γ·K = w3·K/r2 must be a positive integer"));
                }
                if let Some(s) = symbol_rates {
                    if s.len() != 3 || s.contains(&0) {
                        return Err(bad("symbol_rates", "needs three positive entries"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Sub-block layout of a validated [`CodeSpec::SubBlock`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct SubBlockLayout {
    pub k: u64,
    pub l: u64,
    /// Bits in the first sub-block of every block (`γK`).
    pub head: u64,
    /// Blocks per super-block at rate `r1` and `r2`.
    pub blocks_per_super: [u64; 2],
    pub symbol_rates: [u64; 3],
}

impl SubBlockLayout {
    pub fn new(spec: &CodeSpec) -> Option<Self> {
        let CodeSpec::SubBlock {
            k,
            l,
            w,
            r1,
            r2,
            symbol_rates,
        } = spec
        else {
            return None;
        };
        let lk = Q::new((*l).into(), (*k).into());
        let head = integral(&(&w[2] / r2 * Q::from_integer((*k).into())))?;
        let rates = match symbol_rates {
            Some(s) => [s[0], s[1], s[2]],
            None => {
                let ceil = |x: &Q| x.ceil().to_integer().to_u64().unwrap_or(1).max(1);
                [ceil(&w[0]), ceil(&w[1]), ceil(&w[2])]
            }
        };
        Some(Self {
            k: *k,
            l: *l,
            head,
            blocks_per_super: [integral(&(r1 * &lk))?, integral(&(r2 * &lk))?],
            symbol_rates: rates,
        })
    }
}
