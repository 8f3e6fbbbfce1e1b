//! WebAssembly bindings for the demo page in `www/`.
//!
//! The exported functions return flat `Float64Array`s; each documents its
//! layout. The plain functions in [`demo`] do the work and are what the
//! native tests exercise.

use wasm_bindgen::prelude::*;

pub mod demo;

fn js(e: String) -> JsError {
    JsError::new(&e)
}

/// `[x0, t0, v0, kappa, alpha, beta, gamma]` for `"standard"` or `"generalized"`.
#[wasm_bindgen]
pub fn catastrophe(model: &str) -> Result<Vec<f64>, JsError> {
    demo::catastrophe(model).map_err(js)
}

/// `U(X, T)` at `n` evenly spaced `X` in `[x_lo, x_hi]`.
#[wasm_bindgen]
pub fn profile_curve(t: f64, x_lo: f64, x_hi: f64, n: usize) -> Result<Vec<f64>, JsError> {
    demo::profile_curve(t, x_lo, x_hi, n).map_err(js)
}

/// Viscous solution at time `t` next to the profile formula:
/// `[x_0..x_n, u_0..u_n, ui_0..ui_n]` with `n = nx`.
#[wasm_bindgen]
pub fn viscous_vs_profile(model: &str, eps: f64, t: f64, nx: usize) -> Result<Vec<f64>, JsError> {
    demo::viscous_vs_profile(model, eps, t, nx).map_err(js)
}

/// Shock front of the standard model: `[t_0..t_m, x_0..x_m]`.
#[wasm_bindgen]
pub fn shock_front(t_end: f64, steps: usize) -> Result<Vec<f64>, JsError> {
    demo::shock_front(t_end, steps).map_err(js)
}
