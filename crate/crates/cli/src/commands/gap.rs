use anyhow::{bail, Result};
use declab_core::info::INEQUALITY_SLACK;
use declab_core::rng::{self, tags};
use declab_core::{
    accessible_mutual_information, apply_measurement, reduce, CorrelationReport, DensityOperator, HilbertSpace,
    PointerMeasurementModel, SearchOptions, Strategy,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::Resolved;
use crate::output::{num, Run, Table};
use crate::plot::{Plot, Series, Style};

const DIMS: [usize; 3] = [2, 3, 4];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Reduced,
    Exact,
    RandomBipartite,
    Product,
}

impl Source {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "reduced" => Source::Reduced,
            "exact" => Source::Exact,
            "random-bipartite" => Source::RandomBipartite,
            "product" => Source::Product,
            other => bail!("unknown source `{other}` (expected reduced, exact, random-bipartite or product)"),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GapRow {
    pub index: u32,
    #[serde(rename = "M")]
    pub m: Option<usize>,
    pub dim_a: usize,
    pub dim_c: usize,
    pub s_bits: f64,
    pub i_bits: f64,
    pub gap_bits: f64,
    pub winner: &'static str,
    pub converged: bool,
    pub status: &'static str,
}

fn row(index: u32, m: Option<usize>, dims: (usize, usize), rep: CorrelationReport) -> GapRow {
    let status = if rep.accessible_info > rep.mutual_entropy + INEQUALITY_SLACK {
        "FAILURE"
    } else if !rep.meta.converged {
        "unconverged"
    } else {
        "ok"
    };
    GapRow {
        index,
        m,
        dim_a: dims.0,
        dim_c: dims.1,
        s_bits: rep.mutual_entropy,
        i_bits: rep.accessible_info,
        gap_bits: rep.gap,
        winner: rep.meta.winner,
        converged: rep.meta.converged,
        status,
    }
}

/// Random state `index` of the certification suite: dims cycle over
/// {2,3,4}², ranks cycle over 1..=d.
pub fn random_bipartite(seed: u64, index: u32) -> DensityOperator {
    let n = index as usize;
    let (da, dc) = (DIMS[n % 3], DIMS[(n / 3) % 3]);
    let rank = 1 + (n / 9) % (da * dc);
    let mut g = rng::stream_rng(seed, tags::STATES, index);
    let space = HilbertSpace::new(&[("a", da), ("c", dc)]).expect("valid dims");
    DensityOperator::new(space, rng::random_density_matrix(da * dc, rank, &mut g)).expect("valid state")
}

fn product_state(seed: u64, index: u32) -> Result<DensityOperator> {
    let n = index as usize;
    let (da, dc) = (DIMS[n % 3], DIMS[(n / 3) % 3]);
    let mut g = rng::stream_rng(seed, tags::STATES, index);
    let a = DensityOperator::new(HilbertSpace::new(&[("a", da)])?, rng::random_density_matrix(da, da, &mut g))?;
    let c = DensityOperator::new(HilbertSpace::new(&[("c", dc)])?, rng::random_density_matrix(dc, dc, &mut g))?;
    Ok(a.tensor(&c)?)
}

pub fn search_options(cfg: &Resolved, index: u32) -> SearchOptions {
    SearchOptions { restarts: cfg.restarts, seed: rng::derive_seed(cfg.seed, tags::RESTART, index), ..SearchOptions::default() }
}

pub fn rows(cfg: &Resolved, source: Source, strategy: Strategy) -> Result<Vec<GapRow>> {
    match source {
        Source::RandomBipartite | Source::Product => (0..cfg.trials)
            .into_par_iter()
            .map(|i| {
                let rho = if source == Source::Product { product_state(cfg.seed, i)? } else { random_bipartite(cfg.seed, i) };
                let dims = (rho.space().dims()[0], rho.space().dims()[1]);
                Ok(row(i, None, dims, accessible_mutual_information(&rho, strategy, &search_options(cfg, i))?))
            })
            .collect(),
        Source::Reduced | Source::Exact => {
            let mut out = Vec::new();
            for (point, &m) in cfg.m.iter().enumerate() {
                let chunk: Result<Vec<GapRow>> = (0..cfg.trials)
                    .into_par_iter()
                    .map(|i| {
                        let index = point as u32 * cfg.trials + i;
                        let mut g = rng::stream_rng(cfg.seed, tags::AMPLITUDES, index);
                        let c = match &cfg.c {
                            Some(_) => super::amplitudes(cfg)?,
                            None => rng::random_amplitudes(cfg.k, &mut g),
                        };
                        let p = super::weights(cfg, m, index);
                        let model = PointerMeasurementModel::with_random_phases(c, p, &mut g)?;
                        let exact = apply_measurement(&model);
                        let state = if source == Source::Reduced { reduce(&exact)? } else { exact };
                        let dims = (model.object_dim(), model.device_dim());
                        Ok(row(i, Some(m), dims, accessible_mutual_information(&state, strategy, &search_options(cfg, index))?))
                    })
                    .collect();
                out.extend(chunk?);
            }
            Ok(out)
        }
    }
}

pub fn run(cfg: &Resolved) -> Result<bool> {
    let source = Source::parse(cfg.option("source"))?;
    let strategy: Strategy = cfg.option("strategy").parse()?;
    if cfg.trials == 0 {
        bail!("trials must be at least 1");
    }
    let rows = rows(cfg, source, strategy)?;

    let mut table = Table::new(&[
        "source", "index", "M", "dim_a", "dim_c", "seed", "S_bits", "I_bits", "gap_bits", "winner", "converged", "status",
    ]);
    for r in &rows {
        table.push(vec![
            cfg.option("source").into(),
            r.index.to_string(),
            r.m.map(|m| m.to_string()).unwrap_or_default(),
            r.dim_a.to_string(),
            r.dim_c.to_string(),
            cfg.seed.to_string(),
            num(r.s_bits),
            num(r.i_bits),
            num(r.gap_bits),
            r.winner.into(),
            r.converged.to_string(),
            r.status.into(),
        ]);
    }
    let failures = rows.iter().filter(|r| r.status == "FAILURE").count();
    let unconverged = rows.iter().filter(|r| r.status == "unconverged").count();
    let max_abs_gap = rows.iter().map(|r| r.gap_bits.abs()).fold(0.0, f64::max);
    let min_gap = rows.iter().map(|r| r.gap_bits).fold(f64::INFINITY, f64::min);

    let mut out = Run::new("gap", cfg)?;
    out.csv("gap.csv", &table)?;
    out.json("gap.json", &rows)?;
    let top = rows.iter().map(|r| r.s_bits).fold(0.0, f64::max).max(1e-3);
    let plot = Plot {
        title: format!("Accessible information against mutual entropy ({})", cfg.option("source")),
        x_label: "S(A:C) [bits]".into(),
        y_label: "I(A:C) [bits]".into(),
        series: vec![
            Series { name: "states".into(), points: rows.iter().map(|r| (r.s_bits, r.i_bits)).collect(), style: Style::Markers },
            Series { name: "I = S".into(), points: vec![(0.0, 0.0), (top, top)], style: Style::Line },
        ],
        ..Default::default()
    };
    out.svg("gap.svg", plot.render())?;
    out.finish(json!({
        "source": cfg.option("source"),
        "strategy": strategy.as_str(),
        "states": rows.len(),
        "failures": failures,
        "unconverged": unconverged,
        "max_abs_gap_bits": max_abs_gap,
        "min_gap_bits": min_gap,
    }))?;
    println!(
        "{} states: {failures} inequality failures, {unconverged} unconverged searches, max |gap| = {}, min gap = {}",
        rows.len(),
        num(max_abs_gap),
        num(min_gap)
    );
    Ok(failures == 0)
}
