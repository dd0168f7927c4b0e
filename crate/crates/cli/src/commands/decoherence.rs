use anyhow::{bail, Result};
use declab_core::model::{sample_decoherence_errors, PhaseSampling};
use declab_core::rng::{self, tags};
use declab_core::stats::{log_log_fit, mean, std_dev, LineFit};
use declab_core::MacroscopicObservable;
use serde_json::json;

use crate::config::Resolved;
use crate::output::{num, Run, Table};
use crate::plot::{Plot, Series, Style};

pub const MIN_DRAWS: u32 = 30;

pub struct Sweep {
    /// `(M, errors per draw)` in grid order.
    pub errors: Vec<(usize, Vec<f64>)>,
    pub fit: Option<LineFit>,
}

impl Sweep {
    pub fn means(&self) -> Vec<(usize, f64)> {
        self.errors.iter().map(|(m, e)| (*m, mean(e))).collect()
    }
}

pub fn observable(name: &str, k: usize) -> Result<MacroscopicObservable> {
    match name {
        "sigma-x" => Ok(MacroscopicObservable::sigma_x(k)?),
        "diagonal" => Ok(MacroscopicObservable::diagonal(&(0..k).map(|i| i as f64).collect::<Vec<_>>())?),
        other => bail!("unknown observable `{other}` (expected sigma-x or diagonal)"),
    }
}

pub fn phase_sampling(name: &str) -> Result<PhaseSampling> {
    match name {
        "independent" => Ok(PhaseSampling::Independent),
        "aligned" => Ok(PhaseSampling::Aligned),
        other => bail!("unknown phase sampling `{other}` (expected independent or aligned)"),
    }
}

/// Errors for every `M` of the grid; draws of point `j` use seed `(PHASES, j)`.
pub fn sweep(cfg: &Resolved, obs: &MacroscopicObservable, sampling: PhaseSampling) -> Result<Sweep> {
    if cfg.trials < MIN_DRAWS {
        bail!("decoherence needs at least {MIN_DRAWS} draws per M, got {}", cfg.trials);
    }
    let c = super::amplitudes(cfg)?;
    let mut errors = Vec::new();
    for (point, &m) in cfg.m.iter().enumerate() {
        let p = super::weights(cfg, m, point as u32);
        let seed = rng::derive_seed(cfg.seed, tags::PHASES, point as u32);
        errors.push((m, sample_decoherence_errors(&c, &p, obs, cfg.trials, seed, sampling)?));
    }
    let means: Vec<(usize, f64)> = errors.iter().map(|(m, e)| (*m, mean(e))).collect();
    let fit = if means.len() >= 2 && means.iter().all(|(_, v)| *v > 0.0) {
        let xs: Vec<f64> = means.iter().map(|(m, _)| *m as f64).collect();
        let ys: Vec<f64> = means.iter().map(|(_, v)| *v).collect();
        log_log_fit(&xs, &ys).ok()
    } else {
        None
    };
    Ok(Sweep { errors, fit })
}

pub fn run(cfg: &Resolved) -> Result<bool> {
    let obs = observable(cfg.option("observable"), cfg.k)?;
    let sampling = phase_sampling(cfg.option("phases"))?;
    let sweep = sweep(cfg, &obs, sampling)?;

    let mut draws = Table::new(&["M", "seed", "draw", "error"]);
    let mut summary = Table::new(&["M", "draws", "mean_error", "std_error"]);
    for (m, errors) in &sweep.errors {
        for (d, e) in errors.iter().enumerate() {
            draws.push(vec![m.to_string(), cfg.seed.to_string(), d.to_string(), num(*e)]);
        }
        summary.push(vec![m.to_string(), errors.len().to_string(), num(mean(errors)), num(std_dev(errors))]);
    }

    let mut out = Run::new("decoherence", cfg)?;
    out.csv("decoherence_draws.csv", &draws)?;
    out.csv("decoherence_summary.csv", &summary)?;
    let means = sweep.means();
    let mut series = vec![Series {
        name: "mean error".into(),
        points: means.iter().map(|(m, v)| (*m as f64, *v)).collect(),
        style: Style::Markers,
    }];
    if let Some(fit) = sweep.fit {
        let points = means.iter().map(|(m, _)| (*m as f64, (fit.intercept + fit.slope * (*m as f64).ln()).exp())).collect();
        series.push(Series { name: format!("fit, slope {:.3}", fit.slope), points, style: Style::Line });
    }
    let plot = Plot {
        title: "Decoherence error versus microstate count".into(),
        x_label: "M".into(),
        y_label: "mean |tr(ρA) − tr(ρ′A)|".into(),
        log_x: true,
        log_y: true,
        series,
    };
    out.svg("decoherence.svg", plot.render())?;
    let slope = sweep.fit.map(|f| f.slope);
    out.finish(json!({
        "observable": cfg.option("observable"),
        "phases": cfg.option("phases"),
        "means": means.iter().map(|(m, v)| json!({ "M": m, "mean_error": v })).collect::<Vec<_>>(),
        "slope": slope,
        "slope_se": sweep.fit.map(|f| f.slope_se),
    }))?;
    for (m, v) in &means {
        println!("M={m:<8} mean error = {}", num(*v));
    }
    match slope {
        Some(s) => println!("log-log slope = {}", num(s)),
        None => println!("log-log slope undefined (fewer than two grid points or zero errors)"),
    }
    Ok(true)
}
