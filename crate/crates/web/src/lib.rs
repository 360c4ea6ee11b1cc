//! Browser bindings: the chain lattice of `[n] × [r]`, a divided-power
//! integration calculator, and seeded Stokes checks. Every export returns a
//! JSON string.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use dpforms::integrate::{definite_int, IntegralStep};
use dpforms::verify::{run_suite, VerifyConfig};
use dpforms::{BoundSymbol, DividedPowerPoly, MaximalChain, Step};

const MAX_LATTICE: usize = 6;
const MAX_TRIALS: usize = 200;

/// All maximal chains of `[n] × [r]` as lattice points, base coordinate first.
pub fn lattice(n: usize, r: usize) -> Result<Value, String> {
    if n > MAX_LATTICE || r > MAX_LATTICE {
        return Err(format!("n and r must be at most {MAX_LATTICE}"));
    }
    let chains: Vec<Value> = MaximalChain::enumerate(n, r)
        .iter()
        .map(|c| {
            json!({
                "steps": c.step_string(),
                "points": c.points(),
                "fiber_first": c.steps().first() == Some(&Step::Fiber),
            })
        })
        .collect();
    Ok(json!({ "n": n, "r": r, "count": chains.len(), "chains": chains }))
}

/// `∫ f` along the given steps, innermost first. Bounds are `0`, `theta` or `xj`.
pub fn integral(f: &str, n: usize, steps: &[(usize, String, String)]) -> Result<Value, String> {
    let mut p = DividedPowerPoly::parse(f, Some(n)).map_err(|e| e.to_string())?;
    let mut trace = Vec::new();
    for (var, lo, hi) in steps {
        let step = IntegralStep {
            var: *var,
            lo: lo.parse::<BoundSymbol>().map_err(|e| e.to_string())?,
            hi: hi.parse::<BoundSymbol>().map_err(|e| e.to_string())?,
        };
        p = definite_int(&p, step.var, step.lo, step.hi).map_err(|e| e.to_string())?;
        trace.push(p.to_text());
    }
    Ok(json!({ "text": p.to_text(), "realized": p.realize().to_text(), "trace": trace }))
}

/// Seeded Stokes checks on `X × Δʳ`.
pub fn stokes(space: &str, r: usize, seed: u64, trials: usize) -> Result<Value, String> {
    if trials > MAX_TRIALS {
        return Err(format!("at most {MAX_TRIALS} trials"));
    }
    let cfg = VerifyConfig { space: Some(space.to_string()), r, seed, trials, ..VerifyConfig::default() };
    let report = run_suite("stokes", &cfg).map_err(|e| e.to_string())?;
    serde_json::to_value(&report).map_err(|e| e.to_string())
}

fn wrap(v: Result<Value, String>) -> Result<String, JsValue> {
    v.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn chain_lattice(n: usize, r: usize) -> Result<String, JsValue> {
    wrap(lattice(n, r))
}

/// `steps` is a JSON array of `{"var", "lo", "hi"}`.
#[wasm_bindgen]
pub fn integrate(f: &str, n: usize, steps: &str) -> Result<String, JsValue> {
    let parsed: Vec<Value> = serde_json::from_str(steps).map_err(|e| JsValue::from_str(&e.to_string()))?;
    let steps = parsed
        .iter()
        .map(|s| {
            let var = s["var"].as_u64().ok_or("var must be an integer")? as usize;
            let bound = |k: &str| match &s[k] {
                Value::String(b) => Ok(b.clone()),
                Value::Number(b) => Ok(b.to_string()),
                _ => Err(format!("{k} must be a string")),
            };
            Ok((var, bound("lo")?, bound("hi")?))
        })
        .collect::<Result<Vec<_>, String>>()
        .map_err(|e| JsValue::from_str(&e))?;
    wrap(integral(f, n, &steps))
}

#[wasm_bindgen]
pub fn stokes_check(space: &str, r: usize, seed: u64, trials: usize) -> Result<String, JsValue> {
    wrap(stokes(space, r, seed, trials))
}
