pub mod counterexample;
pub mod decoherence;
pub mod gap;
pub mod measure;
pub mod recurrence;
pub mod validate;

use anyhow::{bail, Result};
use declab_core::rng::{self, tags};
use declab_core::{PointerMeasurementModel, C64};

use crate::config::{Resolved, WeightMode};

/// Largest relative deviation of `Σ c_i²` from 1 that is fixed with a warning.
pub const AMPLITUDE_SLACK: f64 = 1e-3;

/// Amplitudes from `--c`, or balanced ones.
pub fn amplitudes(cfg: &Resolved) -> Result<Vec<C64>> {
    let Some(c) = &cfg.c else {
        let a = 1.0 / (cfg.k as f64).sqrt();
        return Ok(vec![C64::new(a, 0.0); cfg.k]);
    };
    let norm_sq: f64 = c.iter().map(|x| x * x).sum();
    if (norm_sq - 1.0).abs() >= AMPLITUDE_SLACK {
        bail!("amplitudes have Σ c² = {norm_sq}, too far from 1 to normalize");
    }
    if (norm_sq - 1.0).abs() > 1e-12 {
        eprintln!("warning: amplitudes have Σ c² = {norm_sq}; normalizing");
    }
    let norm = norm_sq.sqrt();
    Ok(c.iter().map(|x| C64::new(x / norm, 0.0)).collect())
}

/// Microstate weights for grid point `point`.
pub fn weights(cfg: &Resolved, m: usize, point: u32) -> Vec<f64> {
    match cfg.p {
        WeightMode::Uniform => rng::uniform_weights(m),
        WeightMode::Random => rng::random_weights(m, &mut rng::stream_rng(cfg.seed, tags::WEIGHTS, point)),
    }
}

/// Model for grid point `point` with phases from stream `(PHASES, point)`.
pub fn model(cfg: &Resolved, m: usize, point: u32) -> Result<PointerMeasurementModel> {
    let c = amplitudes(cfg)?;
    let p = weights(cfg, m, point);
    Ok(PointerMeasurementModel::with_random_phases(c, p, &mut rng::stream_rng(cfg.seed, tags::PHASES, point))?)
}
