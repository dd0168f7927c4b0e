use std::f64::consts::TAU;

use anyhow::{bail, Result};
use declab_core::dynamics::EnergyModel;
use declab_core::info::{branch_mutual_entropy, classical_mutual_information, pointer_information, pointer_povm};
use declab_core::model::{postmeasurement_pure, PhaseSampling, OBJECT};
use declab_core::rng::{self, tags};
use declab_core::{
    accessible_mutual_information, apply_measurement, mutual_entropy, premeasurement_mixed, projective_search, reduce,
    shannon_entropy, BranchState, CMatrix, LogBase, MacroscopicObservable, PointerMeasurementModel, SearchOptions,
    Strategy, C64,
};
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use super::decoherence;
use super::gap::random_bipartite;
use crate::config::Resolved;
use crate::output::{Run, Table};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn random_model(seed: u64, k: usize, m: usize, index: u32) -> Result<PointerMeasurementModel> {
    let mut g = rng::stream_rng(seed, tags::AMPLITUDES, index);
    let c = rng::random_amplitudes(k, &mut g);
    let p = rng::random_weights(m, &mut g);
    Ok(PointerMeasurementModel::with_random_phases(c, p, &mut g)?)
}

fn max_spectrum_gap(structured: &[f64], dense: &declab_core::DensityOperator) -> Result<f64> {
    let mut want = structured.to_vec();
    want.sort_by(|a, b| b.total_cmp(a));
    let got = dense.eigen()?.values;
    Ok(got.iter().enumerate().map(|(i, g)| (g - want.get(i).copied().unwrap_or(0.0)).abs()).fold(0.0, f64::max))
}

fn state_deviation(state: &BranchState, obs: &MacroscopicObservable) -> Result<f64> {
    let dense = state.to_dense()?;
    let labels = dense.space().labels().to_vec();
    let model = state.model();
    let povms = pointer_povm(model)?;
    Ok([
        max_spectrum_gap(&state.joint_spectrum(), &dense)?,
        max_spectrum_gap(&state.object_spectrum(), &dense.partial_trace(&labels[..1])?)?,
        max_spectrum_gap(&state.device_spectrum(), &dense.partial_trace(&labels[1..])?)?,
        (mutual_entropy(&dense)? - branch_mutual_entropy(state, LogBase::Two)?).abs(),
        (dense.expectation(&obs.embed(model)?)? - state.expectation(obs)?).abs(),
        (classical_mutual_information(&dense, &povms.object, &povms.device)? - pointer_information(state, LogBase::Two)).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max))
}

fn dense_vs_structured(seed: u64) -> Result<Check> {
    let mut worst = 0.0f64;
    for k in 1..=3usize {
        for m in 1..=4usize {
            let index = (10 * k + m) as u32;
            let model = random_model(seed, k, m, index)?;
            let mut g = rng::stream_rng(seed, tags::STATES, index);
            let a = rng::random_density_matrix(k, k, &mut g) * C64::new(2.0, 0.0) - CMatrix::identity(k, k);
            let obs = MacroscopicObservable::new(a)?;
            let exact = apply_measurement(&model);
            for state in [premeasurement_mixed(&model), reduce(&exact)?, exact] {
                worst = worst.max(state_deviation(&state, &obs)?);
            }
            let em = EnergyModel::random(model, 1.0, &mut g)?;
            for t in [0.7, 31.0, 2.5e3] {
                worst = worst.max((em.distance_to_initial(t) - em.distance_to_initial_dense(t)?).abs());
            }
        }
    }
    Ok(Check { name: "dense vs structured", pass: worst <= 1e-9, detail: format!("max deviation {worst:.2e} over K ≤ 3, M ≤ 4") })
}

fn partial_trace_identity(seed: u64, sampling: PhaseSampling) -> Result<Check> {
    let mut worst = 0.0f64;
    for n in 0..100u32 {
        let k = 1 + n as usize % 5;
        let mut g = rng::stream_rng(seed, tags::AMPLITUDES, 1000 + n);
        let c = rng::random_amplitudes(k, &mut g);
        let theta: Vec<f64> = match sampling {
            PhaseSampling::Independent => (0..k).map(|_| g.random::<f64>() * TAU).collect(),
            PhaseSampling::Aligned => vec![g.random::<f64>() * TAU; k],
        };
        let object = postmeasurement_pure(&c, &theta)?.partial_trace(&[OBJECT])?;
        let want = CMatrix::from_fn(k, k, |i, j| if i == j { C64::new(c[i].norm_sqr(), 0.0) } else { C64::new(0.0, 0.0) });
        worst = worst.max((object.matrix() - want).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    Ok(Check { name: "partial-trace identity", pass: worst <= 1e-10, detail: format!("max entry deviation {worst:.2e}, 100 states") })
}

fn inequality(seed: u64) -> Result<Check> {
    let mut violations = 0;
    let mut min_gap = f64::INFINITY;
    let states = 200u32;
    for i in 0..states {
        let rho = random_bipartite(seed, i);
        let opts = SearchOptions { restarts: 2, max_sweeps: 100, seed: rng::derive_seed(seed, tags::RESTART, i), ..Default::default() };
        let rep = accessible_mutual_information(&rho, Strategy::Hybrid, &opts)?;
        if !rep.satisfies_inequality() {
            violations += 1;
        }
        min_gap = min_gap.min(rep.gap);
    }
    Ok(Check {
        name: "I ≤ S certification",
        pass: violations == 0,
        detail: format!("{violations} violations in {states} random states, min S - I = {min_gap:.3e}"),
    })
}

fn pointer_optimality(seed: u64) -> Result<Check> {
    let mut excess = f64::NEG_INFINITY;
    let mut n = 0;
    for k in 2..=3usize {
        for m in 1..=2usize {
            let index = (100 + 10 * k + m) as u32;
            let model = random_model(seed, k, m, index)?;
            let exact = apply_measurement(&model);
            for state in [reduce(&exact)?, exact] {
                let opts = SearchOptions { restarts: 3, max_sweeps: 200, seed: rng::derive_seed(seed, tags::RESTART, index), ..Default::default() };
                let searched = projective_search(&state.to_dense()?, &opts)?.value;
                excess = excess.max(searched - pointer_information(&state, LogBase::Two));
                n += 1;
            }
        }
    }
    Ok(Check { name: "pointer optimality", pass: excess <= 1e-6, detail: format!("max search excess {excess:.2e} over {n} states") })
}

fn gap_separation(seed: u64) -> Result<Check> {
    let (mut exact_dev, mut reduced_dev) = (0.0f64, 0.0f64);
    for n in 0..24u32 {
        let model = random_model(seed, 2 + n as usize % 3, [1, 2, 4, 8][n as usize / 6], 200 + n)?;
        let h = shannon_entropy(&model.branch_probabilities())?;
        let exact = apply_measurement(&model);
        let opts = SearchOptions::default();
        let e = accessible_mutual_information(&exact, Strategy::PointerExact, &opts)?;
        let r = accessible_mutual_information(&reduce(&exact)?, Strategy::PointerExact, &opts)?;
        exact_dev = exact_dev.max((e.gap - h).abs());
        reduced_dev = reduced_dev.max(r.gap.abs().max((r.mutual_entropy - h).abs()));
    }
    Ok(Check {
        name: "gap separation",
        pass: exact_dev <= 1e-6 && reduced_dev <= 1e-9,
        detail: format!("exact |gap - H| ≤ {exact_dev:.2e}, reduced |gap| ≤ {reduced_dev:.2e}"),
    })
}

fn decoherence_scaling(cfg: &Resolved, sampling: PhaseSampling) -> Result<Check> {
    let mut local = cfg.clone();
    local.m = vec![100, 1000, 10_000];
    local.k = 2;
    local.c = None;
    local.p = crate::config::WeightMode::Uniform;
    local.trials = 1000;
    let sweep = decoherence::sweep(&local, &MacroscopicObservable::sigma_x(2)?, sampling)?;
    Ok(match sweep.fit {
        Some(fit) => Check {
            name: "decoherence scaling",
            pass: (-0.6..=-0.4).contains(&fit.slope),
            detail: format!("log-log slope {:.4} (want -0.5 ± 0.1)", fit.slope),
        },
        None => Check { name: "decoherence scaling", pass: false, detail: "slope undefined".into() },
    })
}

fn commensurate_return() -> Result<Check> {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let base = PointerMeasurementModel::without_phases(vec![h, h], rng::uniform_weights(3))?;
    let eps = 0.173;
    let em = EnergyModel::commensurate(base, &[vec![3, 7, 11], vec![5, -2, 13]], eps)?;
    let d = em.distance_to_initial(TAU / eps).max(em.distance_to_initial_dense(TAU / eps)?);
    Ok(Check { name: "commensurate return", pass: d <= 1e-9, detail: format!("distance at the common period {d:.1e}") })
}

pub fn checks(cfg: &Resolved) -> Result<Vec<Check>> {
    let sampling = match cfg.option("inject-fault") {
        "none" => PhaseSampling::Independent,
        "aligned-phases" => PhaseSampling::Aligned,
        other => bail!("unknown fault `{other}` (expected none or aligned-phases)"),
    };
    Ok(vec![
        dense_vs_structured(cfg.seed)?,
        partial_trace_identity(cfg.seed, sampling)?,
        inequality(cfg.seed)?,
        pointer_optimality(cfg.seed)?,
        gap_separation(cfg.seed)?,
        decoherence_scaling(cfg, sampling)?,
        commensurate_return()?,
    ])
}

pub fn run(cfg: &Resolved) -> Result<bool> {
    let checks = checks(cfg)?;
    let width = checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(0);
    for c in &checks {
        let pad = width - c.name.chars().count();
        println!("{}{}  {}  {}", c.name, " ".repeat(pad), if c.pass { "pass" } else { "FAIL" }, c.detail);
    }
    let all = checks.iter().all(|c| c.pass);
    println!("{}", if all { "all checks passed" } else { "validation FAILED" });

    let mut table = Table::new(&["check", "status", "detail"]);
    for c in &checks {
        table.push(vec![c.name.into(), if c.pass { "pass" } else { "FAIL" }.into(), c.detail.clone()]);
    }
    let mut out = Run::new("validate", cfg)?;
    out.csv("validate.csv", &table)?;
    out.json("validate.json", &checks)?;
    out.finish(json!({ "passed": all, "fault": cfg.option("inject-fault") }))?;
    Ok(all)
}
