use std::f64::consts::TAU;

use anyhow::{bail, Context, Result};
use declab_core::dynamics::{first_return, log_grid, recurrence_scan, EnergyModel};
use declab_core::rng::{self, tags};
use declab_core::PointerMeasurementModel;
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use crate::config::Resolved;
use crate::output::{num, Run, Table};
use crate::plot::{Plot, Series, Style};

/// Energy quantum of commensurate models; the common period is `2π / QUANTUM`.
pub const QUANTUM: f64 = 0.1;

#[derive(Serialize)]
struct Summary {
    #[serde(rename = "M")]
    m: usize,
    draw: u32,
    min_distance: f64,
    argmin_time: f64,
    first_return: Option<f64>,
    period_distance: Option<f64>,
}

fn float_option(cfg: &Resolved, key: &str) -> Result<f64> {
    let v: f64 = cfg.option(key).parse().with_context(|| format!("option `{key}` must be a number"))?;
    if !(v > 0.0) {
        bail!("option `{key}` must be positive");
    }
    Ok(v)
}

/// Energies for draw `draw` from stream `(ENERGIES, draw)`: uniform on
/// `[0, 1)`, or integer multiples `1..=20` of [`QUANTUM`].
pub fn energy_model(cfg: &Resolved, m: usize, draw: u32, commensurate: bool) -> Result<EnergyModel> {
    let base = PointerMeasurementModel::without_phases(super::amplitudes(cfg)?, super::weights(cfg, m, draw))?;
    let mut g = rng::stream_rng(cfg.seed, tags::ENERGIES, draw);
    if commensurate {
        let n: Vec<Vec<i64>> = (0..cfg.k).map(|_| (0..m).map(|_| g.random_range(1..=20)).collect()).collect();
        Ok(EnergyModel::commensurate(base, &n, QUANTUM)?)
    } else {
        Ok(EnergyModel::random(base, 1.0, &mut g)?)
    }
}

pub fn run(cfg: &Resolved) -> Result<bool> {
    let commensurate = match cfg.option("energies") {
        "random" => false,
        "commensurate" => true,
        other => bail!("unknown energies `{other}` (expected random or commensurate)"),
    };
    let step = float_option(cfg, "step")?;
    let threshold = float_option(cfg, "threshold")?;
    let points: usize = cfg.option("points").parse().context("option `points` must be an integer")?;
    if cfg.trials == 0 {
        bail!("trials must be at least 1");
    }

    let mut scans = Table::new(&["M", "draw", "seed", "t", "distance"]);
    let mut summaries = Vec::new();
    let mut traces = Vec::new();
    for &m in &cfg.m {
        for draw in 0..cfg.trials {
            let em = energy_model(cfg, m, draw, commensurate)?;
            let returned = first_return(&em, cfg.horizon, step, threshold);
            let mut times = log_grid(step, cfg.horizon, points.max(2))?;
            let period = TAU / QUANTUM;
            if commensurate {
                times.push(period);
            }
            if let Some(t) = returned {
                times.push(t);
            }
            times.sort_by(f64::total_cmp);
            times.dedup();
            let scan = recurrence_scan(&em, &times)?;
            for (t, d) in scan.times.iter().zip(&scan.distances) {
                scans.push(vec![m.to_string(), draw.to_string(), cfg.seed.to_string(), num(*t), num(*d)]);
            }
            if draw == 0 {
                traces.push(Series {
                    name: format!("M = {m}"),
                    points: scan.times.iter().zip(&scan.distances).filter(|(t, _)| **t > 0.0).map(|(t, d)| (*t, *d)).collect(),
                    style: Style::Line,
                });
            }
            let (argmin_time, min_distance) = scan.min_after_departure(declab_core::dynamics::DEPARTURE).unwrap_or((f64::NAN, f64::NAN));
            summaries.push(Summary {
                m,
                draw,
                min_distance,
                argmin_time,
                first_return: returned,
                period_distance: commensurate.then(|| em.distance_to_initial(period)),
            });
        }
    }

    let mut table = Table::new(&[
        "M", "draw", "seed", "energies", "min_distance", "argmin_time", "first_return_time", "returned", "period_distance",
    ]);
    for s in &summaries {
        table.push(vec![
            s.m.to_string(),
            s.draw.to_string(),
            cfg.seed.to_string(),
            cfg.option("energies").into(),
            num(s.min_distance),
            num(s.argmin_time),
            s.first_return.map(num).unwrap_or_default(),
            s.first_return.is_some().to_string(),
            s.period_distance.map(num).unwrap_or_default(),
        ]);
    }
    let fractions: Vec<(usize, f64)> = cfg
        .m
        .iter()
        .map(|&m| {
            let of_m: Vec<&Summary> = summaries.iter().filter(|s| s.m == m).collect();
            (m, of_m.iter().filter(|s| s.first_return.is_some()).count() as f64 / of_m.len() as f64)
        })
        .collect();

    let mut out = Run::new("recurrence", cfg)?;
    out.csv("recurrence_scan.csv", &scans)?;
    out.csv("recurrence_summary.csv", &table)?;
    let plot = Plot {
        title: format!("Distance to the t = 0 state ({} energies, draw 0)", cfg.option("energies")),
        x_label: "t".into(),
        y_label: "trace distance".into(),
        log_x: true,
        log_y: false,
        series: traces,
    };
    out.svg("recurrence.svg", plot.render())?;
    let max_period = summaries.iter().filter_map(|s| s.period_distance).fold(0.0, f64::max);
    out.finish(json!({
        "energies": cfg.option("energies"),
        "threshold": threshold,
        "step": step,
        "return_fraction": fractions.iter().map(|(m, f)| json!({ "M": m, "fraction": f })).collect::<Vec<_>>(),
        "max_period_distance": commensurate.then_some(max_period),
    }))?;
    for (m, f) in &fractions {
        println!("M={m:<4} returned below {threshold} within t ≤ {}: {:.0}% of {} draws", num(cfg.horizon), 100.0 * f, cfg.trials);
    }
    if commensurate {
        println!("max distance at the common period 2π/{QUANTUM}: {}", num(max_period));
    }
    Ok(true)
}
