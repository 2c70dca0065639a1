//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export returns a JSON string; the plain `*_json` functions hold the
//! logic so they can be tested natively.

use degen_calc::almansi::almansi_decompose;
use degen_calc::liouville::{growth_sequences, make_bubble};
use degen_calc::rational::{format_rational, parse_rational, rat, to_f64};
use degen_calc::{OperatorParams, Poly, Rational};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn params(n: usize, a: &str, p: u32) -> Result<OperatorParams, String> {
    let a = parse_rational(a).map_err(|e| e.to_string())?;
    OperatorParams::new(n, a, p).map_err(|e| e.to_string())
}

/// Weighted-harmonic decomposition of a polynomial typed as `x1^2 - 2/3*x2^2`.
pub fn decompose_json(text: &str, n: usize, a: &str) -> Result<String, String> {
    // p does not enter the decomposition; p = 1 is admissible for every n >= 1, a >= 1
    let pr = params(n, a, 1)?;
    let poly = Poly::parse_text(text, pr.dim()).map_err(|e| e.to_string())?;
    let mut components = Vec::new();
    let mut rebuilt = Poly::zero(pr.dim());
    for (degree, part) in poly.homogeneous_components().into_iter().rev() {
        let d = almansi_decompose(&part, &pr).map_err(|e| e.to_string())?;
        rebuilt = &rebuilt + &d.reconstruct(pr.dim());
        let parts: Vec<_> = d
            .parts
            .iter()
            .map(|(i, h)| json!({ "i": i, "degree": degree - 2 * i, "text": h.to_string() }))
            .collect();
        components.push(json!({ "degree": degree, "parts": parts }));
    }
    Ok(json!({
        "input": poly.to_string(),
        "components": components,
        "reconstruction_exact": rebuilt == poly,
    })
    .to_string())
}

/// Radial profile of the bubble with parameter `t`, plus `(r u' + (n+2a-2p) u)'`, which stays negative.
pub fn bubble_profile_json(n: usize, a: &str, p: u32, t: &str, r_max: f64, points: usize) -> Result<String, String> {
    let pr = params(n, a, p)?;
    let t = parse_rational(t).map_err(|e| e.to_string())?;
    if r_max.is_nan() || r_max <= 0.0 || points < 2 {
        return Err("need r_max > 0 and at least two points".into());
    }
    let bubble = make_bubble(&t, &vec![Rational::from_integer(0.into()); n], &pr).map_err(|e| e.to_string())?;
    let f = &bubble.profile;
    let g = f.euler().add(&f.scale(&(rat(2) * pr.bubble_exponent())));
    let dg = g.euler().compile();
    let u = f.compile();
    let dim = pr.dim();
    let mut radii = Vec::with_capacity(points);
    let mut values = Vec::with_capacity(points);
    let mut monotone = Vec::with_capacity(points);
    for k in 0..points {
        let r = r_max * (k as f64 + 0.5) / points as f64;
        let mut x = vec![0.0; dim];
        x[0] = r;
        radii.push(r);
        values.push(bubble.prefactor * u.evaluate(&x).map_err(|e| e.to_string())?);
        monotone.push(bubble.prefactor * dg.evaluate(&x).map_err(|e| e.to_string())? / r);
    }
    Ok(json!({
        "K": format_rational(&bubble.constant.k),
        "c0": bubble.c0(),
        "s": format_rational(&pr.bubble_exponent()),
        "alpha_crit": format_rational(&pr.alpha_crit()),
        "radii": radii,
        "values": values,
        "monotone_quantity": monotone,
    })
    .to_string())
}

/// `σ_k`, `b_k`, `r_k` and the blow-up log trace for `r_0 = 1`.
pub fn growth_trace_json(n: usize, a: &str, p: u32, alpha: &str, k_max: usize) -> Result<String, String> {
    let a = parse_rational(a).map_err(|e| e.to_string())?;
    let alpha = parse_rational(alpha).map_err(|e| e.to_string())?;
    let d = rat(n as i64) + rat(2) * a;
    let trace = growth_sequences(p, &alpha, &d, 1.0, k_max).map_err(|e| e.to_string())?;
    let log_trace = trace.blow_up_log_trace(1.0, 2.0);
    Ok(json!({
        "sigma": trace.sigma.iter().map(format_rational).collect::<Vec<_>>(),
        "b": trace.b.iter().map(format_rational).collect::<Vec<_>>(),
        "sigma_float": trace.sigma.iter().map(to_f64).collect::<Vec<_>>(),
        "r": trace.r,
        "c": trace.c,
        "closed_forms_match": trace.closed_forms_match,
        "monotone_and_bounded": trace.monotone_and_bounded,
        "log_blow_up": log_trace,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn decompose(text: &str, n: usize, a: &str) -> Result<String, JsValue> {
    decompose_json(text, n, a).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn bubble_profile(n: usize, a: &str, p: u32, t: &str, r_max: f64, points: usize) -> Result<String, JsValue> {
    bubble_profile_json(n, a, p, t, r_max, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn growth_trace(n: usize, a: &str, p: u32, alpha: &str, k_max: usize) -> Result<String, JsValue> {
    growth_trace_json(n, a, p, alpha, k_max).map_err(|e| JsValue::from_str(&e))
}
