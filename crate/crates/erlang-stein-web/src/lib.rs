//! Browser bindings: distances, density overlay and moment comparison for
//! one parameter set. Every function returns a JSON string.

use erlang_stein::ctmc::{stationary_pmf, stationary_pmf_with, StationaryOptions};
use erlang_stein::diffusion::DiffusionDensity;
use erlang_stein::metrics::{distance_report, mean_error, moment_error};
use erlang_stein::ModelParams;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const TAIL_TOL: f64 = 1e-14;
const MAX_CURVE_POINTS: usize = 4000;

fn params(lambda: f64, mu: f64, n: u32, alpha: f64) -> erlang_stein::Result<ModelParams> {
    ModelParams::new(lambda, mu, n as u64, alpha)
}

fn finite(x: f64) -> Value {
    if x.is_finite() { json!(x) } else { Value::Null }
}

pub fn distances_json(lambda: f64, mu: f64, n: u32, alpha: f64) -> erlang_stein::Result<String> {
    let p = params(lambda, mu, n, alpha)?;
    let pmf = stationary_pmf(p, TAIL_TOL)?;
    let d = DiffusionDensity::new(&pmf.model)?;
    let r = distance_report(&pmf, &d);
    Ok(json!({
        "regime": r.regime.label(),
        "R": r.r,
        "delta": r.delta,
        "zeta": r.zeta,
        "d_w": r.d_w,
        "d_k": r.d_k,
        "ratio_w": r.ratio_w,
        "ratio_k": r.ratio_k,
        "bound_w": r.bound_w,
        "bound_k": r.bound_k,
        "density_sup": r.density_sup,
        "within_bounds": r.within_bounds(),
    })
    .to_string())
}

/// Chain mass divided by `δ` next to the diffusion density on the lattice.
pub fn density_json(lambda: f64, mu: f64, n: u32, alpha: f64) -> erlang_stein::Result<String> {
    let p = params(lambda, mu, n, alpha)?;
    let pmf = stationary_pmf(p, TAIL_TOL)?;
    let d = DiffusionDensity::new(&pmf.model)?;
    let (lo, hi) = pmf.support_window(1e-6 * pmf.pmf[pmf.argmax()]);
    let stride = (hi - lo) / MAX_CURVE_POINTS + 1;
    let delta = pmf.model.delta;
    let ks: Vec<usize> = (lo..=hi).step_by(stride).collect();
    Ok(json!({
        "x": ks.iter().map(|&k| pmf.x(k)).collect::<Vec<_>>(),
        "chain": ks.iter().map(|&k| pmf.pmf[k] / delta).collect::<Vec<_>>(),
        "diffusion": ks.iter().map(|&k| d.pdf(pmf.x(k))).collect::<Vec<_>>(),
        "switch_point": pmf.model.switch_point(),
    })
    .to_string())
}

/// Exact and diffusion moments of orders `1..=max_order` plus the mean error.
pub fn moments_json(lambda: f64, mu: f64, n: u32, alpha: f64, max_order: u32) -> erlang_stein::Result<String> {
    let p = params(lambda, mu, n, alpha)?;
    let pmf = stationary_pmf_with(
        p,
        StationaryOptions {
            tail_tol: TAIL_TOL,
            certify_order: max_order.max(1),
            ..StationaryOptions::default()
        },
    )?;
    let d = DiffusionDensity::new(&pmf.model)?;
    let rows = (1..=max_order)
        .map(|m| {
            let e = moment_error(&pmf, &d, m)?;
            Ok(json!({
                "order": m,
                "exact": finite(e.exact_m),
                "diffusion": finite(e.approx_m),
                "difference": finite(e.diff_m),
            }))
        })
        .collect::<erlang_stein::Result<Vec<_>>>()?;
    Ok(json!({
        "mean_count": pmf.mean_count(),
        "mean_error": mean_error(&pmf, &d)?,
        "moments": rows,
    })
    .to_string())
}

fn js(r: erlang_stein::Result<String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn distances(lambda: f64, mu: f64, n: u32, alpha: f64) -> Result<String, JsError> {
    js(distances_json(lambda, mu, n, alpha))
}

#[wasm_bindgen]
pub fn density(lambda: f64, mu: f64, n: u32, alpha: f64) -> Result<String, JsError> {
    js(density_json(lambda, mu, n, alpha))
}

#[wasm_bindgen]
pub fn moments(lambda: f64, mu: f64, n: u32, alpha: f64, max_order: u32) -> Result<String, JsError> {
    js(moments_json(lambda, mu, n, alpha, max_order))
}
