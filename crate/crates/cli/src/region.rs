use anyhow::{bail, Result};
use clap::ValueEnum;
use mrs_core::rate::{integral_check, optimal_g, StepFunction};
use mrs_core::rational::{format_q, serde_q, to_f64, Q};
use mrs_core::region::{
    example3_check, example3_superposition_check, mdc_one_or_all_check, one_or_all_check,
    one_or_all_g, superposition_feasible, two_sum_check, OnOffNetwork, RatePair,
};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::from_value;
use crate::{Outputs, Status};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Superposition,
    OneOrAll,
    Example3,
    Example3Sup,
    TwoSum,
    Mdc,
    Integral,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    pub check: Check,
    #[serde(with = "serde_q")]
    pub xi: Q,
    pub input: Value,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SuperpositionInput {
    Pairs {
        pairs: Vec<RatePair>,
        #[serde(default)]
        d: Option<usize>,
    },
    Network(OnOffNetwork),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OneOrAllInput {
    #[serde(with = "serde_q::vec")]
    w: Vec<Q>,
    #[serde(with = "serde_q")]
    r0: Q,
    #[serde(with = "serde_q::vec")]
    r: Vec<Q>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Example3Input {
    #[serde(with = "serde_q::vec")]
    w: Vec<Q>,
    #[serde(with = "serde_q")]
    r1: Q,
    #[serde(with = "serde_q")]
    r2: Q,
}

impl Example3Input {
    fn w(&self) -> Result<[Q; 3]> {
        match <[Q; 3]>::try_from(self.w.clone()) {
            Ok(w) => Ok(w),
            Err(_) => bail!(
                "region input: field `w`: expected 3 link rates, got {}",
                self.w.len()
            ),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TwoSumInput {
    decomposition: Vec<RatePair>,
    total: RatePair,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum IntegralInput {
    Wrapped { rate: StepFunction },
    Bare(StepFunction),
}

fn status(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

/// Runs the selected check and returns its verdict as JSON.
pub fn evaluate(cfg: &RegionConfig) -> Result<(Value, Status)> {
    let input = cfg.input.clone();
    let xi = &cfg.xi;
    let verdict = |v: mrs_core::region::FeasibilityVerdict| -> Result<(Value, Status)> {
        let mut out = serde_json::to_value(&v)?;
        out["tight"] = Value::Bool(v.feasible && v.margin.is_zero());
        Ok((out, status(v.feasible)))
    };
    match cfg.check {
        Check::Superposition => {
            let (pairs, d) = match from_value::<SuperpositionInput>(input, "region input")? {
                SuperpositionInput::Pairs { pairs, d } => {
                    let d = match (d, pairs.first()) {
                        (Some(d), _) => d,
                        (None, Some(p)) => p.capacities.len(),
                        // Nothing to check; the dimension only shapes the witness.
                        (None, None) => 1,
                    };
                    (pairs, d)
                }
                SuperpositionInput::Network(net) => {
                    net.validate()?;
                    (net.pairs(), net.d())
                }
            };
            verdict(superposition_feasible(&pairs, d, xi)?)
        }
        Check::OneOrAll => {
            let i: OneOrAllInput = from_value(input, "region input")?;
            let v = one_or_all_check(&i.w, &i.r0, &i.r)?;
            let (mut out, st) = verdict(v.clone())?;
            if v.feasible {
                out["witness"] = serde_json::to_value(one_or_all_g(&i.w, &i.r0, &i.r)?)?;
            }
            Ok((out, st))
        }
        Check::Example3 | Check::Example3Sup => {
            let i: Example3Input = from_value(input, "region input")?;
            let w = i.w()?;
            let v = if cfg.check == Check::Example3 {
                example3_check(&w, &i.r1, &i.r2)?
            } else {
                example3_superposition_check(&w, &i.r1, &i.r2)?
            };
            verdict(v)
        }
        Check::TwoSum => {
            let i: TwoSumInput = from_value(input, "region input")?;
            let v = two_sum_check(&i.decomposition, &i.total)?;
            Ok((serde_json::to_value(&v)?, status(v.passed)))
        }
        Check::Mdc => {
            let i: OneOrAllInput = from_value(input, "region input")?;
            let ok = mdc_one_or_all_check(&i.w, &i.r0, &i.r)?;
            Ok((json!({ "feasible": ok }), status(ok)))
        }
        Check::Integral => {
            let r = match from_value::<IntegralInput>(input, "region input")? {
                IntegralInput::Wrapped { rate } | IntegralInput::Bare(rate) => rate,
            };
            let integral = integral_check(&r)?;
            let achievable = integral <= Q::one();
            let mut out = json!({
                "integral": to_f64(&integral),
                "integral_exact": format_q(&integral),
                "achievable": achievable,
            });
            if achievable {
                out["optimal_g"] = serde_json::to_value(optimal_g(&r)?)?;
            }
            Ok((out, status(achievable)))
        }
    }
}

pub fn run(cfg: &RegionConfig) -> Result<(Outputs, Value)> {
    let (verdict, status) = evaluate(cfg)?;
    if let Some(warnings) = verdict.get("warnings").and_then(Value::as_array) {
        for w in warnings {
            eprintln!("warning: {}", w.as_str().unwrap_or_default());
        }
    }
    let files = vec![("verdict.json".to_string(), crate::pretty(&verdict)?)];
    Ok((Outputs { files, status }, verdict))
}
