//! WebAssembly bindings behind `www/index.html`.
//!
//! Each export has a plain Rust counterpart in [`demo`] so the numerics can be
//! tested natively; the wrappers only convert errors.

use wasm_bindgen::prelude::*;

pub mod demo;

fn js(e: neutrino_magic::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Rows of `[κt, analytic_3f, analytic_2f]`, flattened.
#[wasm_bindgen]
pub fn magic_power_curve(kt_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    demo::magic_power_curve(kt_max, points).map_err(js)
}

/// `[M₂, P(ν₁), P(ν₂), P(ν₃)]` of one flavor state for the given mixing angles.
#[wasm_bindgen]
pub fn flavor_magic(
    flavor: char,
    local_dim: usize,
    sin2_theta12: f64,
    sin2_theta23: f64,
    sin2_theta13: f64,
    delta_cp: f64,
) -> Result<Vec<f64>, JsError> {
    let angles = demo::Angles { sin2_theta12, sin2_theta23, sin2_theta13, delta_cp };
    demo::flavor_magic(flavor, local_dim, &angles).map_err(js)
}

/// Rows of `[κt, M₂/N, C]` for a short Trotter run, flattened.
#[wasm_bindgen]
pub fn evolve_magic(flavors: &str, local_dim: usize, t_end: f64, every: f64) -> Result<Vec<f64>, JsError> {
    demo::evolve_magic(flavors, local_dim, t_end, every).map_err(js)
}

#[wasm_bindgen]
pub fn max_demo_neutrinos() -> usize {
    demo::MAX_DEMO_NEUTRINOS
}
