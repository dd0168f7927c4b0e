//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each exported function has a plain Rust twin (`*_values`) so the numbers
//! can be tested natively.

use std::f64::consts::FRAC_PI_2;

use declab_core::dynamics::{incommensurate_model, log_grid};
use declab_core::info::{branch_mutual_entropy, pointer_information};
use declab_core::model::{sample_decoherence_errors, PhaseSampling};
use declab_core::rng::{self, tags};
use declab_core::{apply_measurement, reduce, LogBase, MacroscopicObservable, PointerMeasurementModel, Result, C64};
use wasm_bindgen::prelude::*;

const MAX_M: u32 = 100_000;
const MAX_DRAWS: u32 = 5_000;

fn js(e: declab_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn invalid(msg: &str) -> declab_core::Error {
    declab_core::Error::InvalidInput(msg.into())
}

/// Mean σx decoherence error of a balanced qubit for each `M` in `ms`.
pub fn decoherence_curve_values(ms: &[u32], draws: u32, seed: u64) -> Result<Vec<f64>> {
    if draws == 0 || draws > MAX_DRAWS || ms.iter().any(|&m| m == 0 || m > MAX_M) {
        return Err(invalid("need 1 ≤ M ≤ 100000 and 1 ≤ draws ≤ 5000"));
    }
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let obs = MacroscopicObservable::sigma_x(2)?;
    ms.iter()
        .enumerate()
        .map(|(j, &m)| {
            let p = rng::uniform_weights(m as usize);
            let seed = rng::derive_seed(seed, tags::PHASES, j as u32);
            let errs = sample_decoherence_errors(&[h, h], &p, &obs, draws, seed, PhaseSampling::Independent)?;
            Ok(errs.iter().sum::<f64>() / errs.len() as f64)
        })
        .collect()
}

/// Rows `[a, S_exact, I_exact, S_reduced, I_reduced]` for `c = (cos a, sin a)`,
/// `a` on `points` steps over `[0, π/2]`, flattened.
pub fn gap_vs_amplitude_values(points: u32, m: u32) -> Result<Vec<f64>> {
    if points < 2 || points > 2_000 || m == 0 || m > 64 {
        return Err(invalid("need 2 ≤ points ≤ 2000 and 1 ≤ M ≤ 64"));
    }
    let mut out = Vec::with_capacity(5 * points as usize);
    for n in 0..points {
        let a = FRAC_PI_2 * n as f64 / (points - 1) as f64;
        let model = PointerMeasurementModel::without_phases(
            vec![C64::new(a.cos(), 0.0), C64::new(a.sin(), 0.0)],
            rng::uniform_weights(m as usize),
        )?;
        let exact = apply_measurement(&model);
        let reduced = reduce(&exact)?;
        out.extend([
            a,
            branch_mutual_entropy(&exact, LogBase::Two)?,
            pointer_information(&exact, LogBase::Two),
            branch_mutual_entropy(&reduced, LogBase::Two)?,
            pointer_information(&reduced, LogBase::Two),
        ]);
    }
    Ok(out)
}

/// Pairs `[t, D(t)]` on a log grid up to `horizon` for a random-energy model, flattened.
pub fn recurrence_trace_values(m: u32, seed: u64, horizon: f64, points: u32) -> Result<Vec<f64>> {
    if m == 0 || m > 12 || !(horizon > 0.0 && horizon <= 1e7) || points < 2 || points > 20_000 {
        return Err(invalid("need 1 ≤ M ≤ 12, 0 < horizon ≤ 1e7 and 2 ≤ points ≤ 20000"));
    }
    let model = incommensurate_model(m as usize, seed, 0)?;
    let times = log_grid(1e-2_f64.min(horizon / 10.0), horizon, points as usize)?;
    Ok(times.into_iter().flat_map(|t| [t, model.distance_to_initial(t)]).collect())
}

#[wasm_bindgen]
pub fn decoherence_curve(ms: Vec<u32>, draws: u32, seed: u64) -> std::result::Result<Vec<f64>, JsError> {
    decoherence_curve_values(&ms, draws, seed).map_err(js)
}

#[wasm_bindgen]
pub fn gap_vs_amplitude(points: u32, m: u32) -> std::result::Result<Vec<f64>, JsError> {
    gap_vs_amplitude_values(points, m).map_err(js)
}

#[wasm_bindgen]
pub fn recurrence_trace(m: u32, seed: u64, horizon: f64, points: u32) -> std::result::Result<Vec<f64>, JsError> {
    recurrence_trace_values(m, seed, horizon, points).map_err(js)
}
