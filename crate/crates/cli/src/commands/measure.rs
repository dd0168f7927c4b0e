use anyhow::{bail, Result};
use declab_core::info::branch_mutual_entropy;
use declab_core::rng::{self, tags};
use declab_core::{
    accessible_mutual_information, apply_measurement, mutual_entropy, premeasurement_mixed, reduce, Error, LogBase,
    SearchOptions, Strategy,
};
use serde::Serialize;
use serde_json::json;

use crate::config::Resolved;
use crate::output::{num, Run, Table};
use crate::plot::{Plot, Series, Style};

const SEARCH_HINT: &str = "use --strategy pointer-exact for the closed-form pointer value";

/// Dense entropies are recomputed for models up to this joint dimension.
const DENSE_CHECK: usize = 64;

#[derive(Serialize)]
struct Row {
    kind: &'static str,
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "M")]
    m: usize,
    seed: u64,
    s_bits: f64,
    i_bits: f64,
    gap_bits: f64,
}

pub fn run(cfg: &Resolved) -> Result<bool> {
    let strategy: Strategy = cfg.option("strategy").parse()?;
    let mut rows = Vec::new();
    for (point, &m) in cfg.m.iter().enumerate() {
        let model = super::model(cfg, m, point as u32)?;
        let exact = apply_measurement(&model);
        let states = [premeasurement_mixed(&model), reduce(&exact)?, exact];
        for state in &states {
            let opts = SearchOptions {
                restarts: cfg.restarts,
                seed: rng::derive_seed(cfg.seed, tags::RESTART, point as u32),
                ..SearchOptions::default()
            };
            let report = match accessible_mutual_information(state, strategy, &opts) {
                Err(Error::DenseLimit { dim, limit }) => bail!(
                    "M = {m}: joint dimension {dim} exceeds the dense limit {limit} for --strategy {}; {SEARCH_HINT}",
                    strategy.as_str()
                ),
                other => other?,
            };
            if model.dense_dim() <= DENSE_CHECK {
                let dense = mutual_entropy(&state.to_dense()?)?;
                let structured = branch_mutual_entropy(state, LogBase::Two)?;
                if (dense - structured).abs() > 1e-9 {
                    bail!("dense and structured S(A:C) disagree at M = {m}: {dense} vs {structured}");
                }
            }
            rows.push(Row {
                kind: state.kind().as_str(),
                k: cfg.k,
                m,
                seed: cfg.seed,
                s_bits: report.mutual_entropy,
                i_bits: report.accessible_info,
                gap_bits: report.gap,
            });
        }
    }

    let mut table = Table::new(&["kind", "K", "M", "seed", "S_bits", "I_bits", "gap_bits"]);
    for r in &rows {
        table.push(vec![
            r.kind.into(),
            r.k.to_string(),
            r.m.to_string(),
            r.seed.to_string(),
            num(r.s_bits),
            num(r.i_bits),
            num(r.gap_bits),
        ]);
    }

    let mut out = Run::new("measure", cfg)?;
    out.csv("measure.csv", &table)?;
    out.json("measure.json", &rows)?;
    let series = |kind: &str, f: fn(&Row) -> f64, label: &str| Series {
        name: format!("{label} {kind}"),
        points: rows.iter().filter(|r| r.kind == kind).map(|r| (r.m as f64, f(r))).collect(),
        style: Style::Markers,
    };
    let plot = Plot {
        title: format!("Mutual entropy and accessible information, K = {}", cfg.k),
        x_label: "M".into(),
        y_label: "bits".into(),
        log_x: cfg.m.len() > 1 && cfg.m.iter().max() > cfg.m.iter().min(),
        log_y: false,
        series: vec![
            series("exact", |r| r.s_bits, "S"),
            series("exact", |r| r.i_bits, "I"),
            series("reduced", |r| r.s_bits, "S"),
            series("initial", |r| r.s_bits, "S"),
        ],
    };
    out.svg("measure.svg", plot.render())?;
    let max_reduced_gap = rows.iter().filter(|r| r.kind == "reduced").map(|r| r.gap_bits.abs()).fold(0.0, f64::max);
    out.finish(json!({ "strategy": strategy.as_str(), "rows": rows.len(), "max_reduced_gap_bits": max_reduced_gap }))?;
    for r in &rows {
        println!("{:<8} K={} M={:<6} S={} I={} gap={}", r.kind, r.k, r.m, num(r.s_bits), num(r.i_bits), num(r.gap_bits));
    }
    Ok(true)
}
