//! Browser bindings. Every export takes and returns JSON strings so the page
//! needs no generated TypeScript types. The plain functions in [`api`] do the
//! work and are what the native tests exercise.

use wasm_bindgen::prelude::*;

pub mod api;

fn to_js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

/// Seeded random model with a valid clique cover, as model JSON.
#[wasm_bindgen(js_name = randomModel)]
pub fn random_model(
    polymers: usize,
    cliques: usize,
    max_log_weight: f64,
    seed: u64,
) -> Result<String, JsValue> {
    to_js(api::random_model(polymers, cliques, max_log_weight, seed))
}

/// Evaluates one parameter-range row; `params` is a JSON object of numbers.
#[wasm_bindgen]
pub fn thresholds(row: &str, params: &str) -> Result<String, JsValue> {
    to_js(api::thresholds(row, params))
}

/// Exact total variation distance from the empty family after each step count.
#[wasm_bindgen(js_name = tvCurve)]
pub fn tv_curve(model: &str, max_steps: u64, points: usize) -> Result<String, JsValue> {
    to_js(api::tv_curve(model, max_steps, points))
}

/// Repeated partition function estimates next to the exact value.
#[wasm_bindgen(js_name = estimateVsExact)]
pub fn estimate_vs_exact(
    model: &str,
    epsilon: f64,
    runs: u64,
    seed: u64,
) -> Result<String, JsValue> {
    to_js(api::estimate_vs_exact(model, epsilon, runs, seed))
}
