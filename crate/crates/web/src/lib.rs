//! WebAssembly bindings for the browser demo. Every export takes plain
//! strings and numbers and returns a JSON document.

use mrs_core::codec::{Code, CodeSpec};
use mrs_core::rate::{integral_check, optimal_g, sampling_atoms, Direction, StepFunction};
use mrs_core::rational::{format_q, parse_q, to_f64, Q};
use mrs_core::region::{mdc_one_or_all_check, one_or_all_check, one_or_all_g};
use mrs_core::sim::{sweep, ChannelSpec, TrialConfig};
use num_traits::One;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn list(name: &str, text: &str) -> Result<Vec<Q>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_q(s).map_err(|e| format!("{name}: {e}")))
        .collect()
}

fn exact(x: &Q) -> Value {
    json!({ "value": to_f64(x), "exact": format_q(x) })
}

/// One-or-all network check for comma-separated link rates `w`, common
/// rate `r0` and private rates `r`.
pub fn one_or_all_report(w: &str, r0: &str, r: &str) -> Result<String, String> {
    let w = list("w", w)?;
    let r = list("r", r)?;
    let r0 = parse_q(r0.trim()).map_err(|e| format!("r0: {e}"))?;
    let verdict = one_or_all_check(&w, &r0, &r).map_err(|e| e.to_string())?;
    let mut out = json!({
        "feasible": verdict.feasible,
        "margin": exact(&verdict.margin),
        "violated_constraints": verdict.violated_constraints,
        "mdc_feasible": mdc_one_or_all_check(&w, &r0, &r).map_err(|e| e.to_string())?,
    });
    if verdict.feasible {
        let g = one_or_all_g(&w, &r0, &r).map_err(|e| e.to_string())?;
        out["witness"] = serde_json::to_value(&g).map_err(|e| e.to_string())?;
    }
    Ok(out.to_string())
}

/// Integral test, optimal parameter and its rate distribution for the
/// increasing step function with the given breakpoints and values.
pub fn rate_curve_report(breakpoints: &str, values: &str) -> Result<String, String> {
    let r = StepFunction::new(
        Direction::Increasing,
        list("breakpoints", breakpoints)?,
        list("values", values)?,
    )
    .map_err(|e| e.to_string())?;
    let integral = integral_check(&r).map_err(|e| e.to_string())?;
    let achievable = integral <= Q::one();
    let mut out = json!({
        "rate": serde_json::to_value(&r).map_err(|e| e.to_string())?,
        "integral": exact(&integral),
        "achievable": achievable,
    });
    if achievable {
        let g = optimal_g(&r).map_err(|e| e.to_string())?;
        let atoms = sampling_atoms(&g).map_err(|e| e.to_string())?;
        out["optimal_g"] = serde_json::to_value(&g).map_err(|e| e.to_string())?;
        out["atoms"] = atoms
            .atoms()
            .iter()
            .map(|(rate, p)| json!({ "rate": exact(rate), "probability": exact(p) }))
            .collect();
    }
    Ok(out.to_string())
}

/// Monte Carlo sweep of a blockwise (`l2 == 0`) or multiplexed code over
/// capacities `1/points, 2/points, …, 1`, with the theoretical curve.
pub fn sweep_report(
    k: u64,
    l: u64,
    l2: u64,
    points: u32,
    n: u64,
    trials: u32,
    seed: u32,
) -> Result<String, String> {
    if points == 0 || points > 50 {
        return Err("points must be between 1 and 50".into());
    }
    let (spec, theory) = if l2 == 0 {
        (
            CodeSpec::Blockwise { k, l },
            StepFunction::blockwise_rate(k, l),
        )
    } else {
        (
            CodeSpec::Multiplexed { k, l1: l, l2 },
            StepFunction::multiplexed_rate(k, l, l2),
        )
    };
    let code = Code::new(spec).map_err(|e| e.to_string())?;
    let grid: Vec<ChannelSpec> = (1..=points)
        .map(|i| ChannelSpec::new(vec![Q::new(i.into(), points.into())]))
        .collect();
    let cfg = TrialConfig::new(n, 0.05, seed.into());
    let result = sweep(&code, &grid, &cfg, trials.into(), 1).map_err(|e| e.to_string())?;
    let pts: Vec<Value> = result
        .points
        .iter()
        .map(|p| {
            let c = &p.channel.capacities[0];
            json!({
                "c": to_f64(c),
                "mean_rate": p.mean_rate(),
                "std_rate": p.std_rate(),
                "mean_strict_rate": p.mean_strict_rate(),
                "theory": to_f64(&theory.eval(c)),
            })
        })
        .collect();
    Ok(json!({ "points": pts }).to_string())
}

#[wasm_bindgen]
pub fn one_or_all(w: &str, r0: &str, r: &str) -> Result<String, JsError> {
    one_or_all_report(w, r0, r).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn rate_curve(breakpoints: &str, values: &str) -> Result<String, JsError> {
    rate_curve_report(breakpoints, values).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn sweep_demo(
    k: u32,
    l: u32,
    l2: u32,
    points: u32,
    n: u32,
    trials: u32,
    seed: u32,
) -> Result<String, JsError> {
    sweep_report(
        k.into(),
        l.into(),
        l2.into(),
        points,
        n.into(),
        trials,
        seed,
    )
    .map_err(|e| JsError::new(&e))
}
