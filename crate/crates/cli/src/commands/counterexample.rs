use anyhow::{bail, Result};
use declab_core::dynamics::{counterexample_search, CounterexampleConfig, CounterexampleOutcome, Margins, TrajectoryPoint};
use declab_core::{CMatrix, CVector};
use serde::Serialize;
use serde_json::json;

use crate::config::Resolved;
use crate::output::{num, Run, Table};
use crate::plot::{Plot, Series, Style};

pub const STEPS_PER_TRIAL: usize = 8;

#[derive(Serialize)]
struct StepJson {
    qubits: [usize; 2],
    /// Row-major `[re, im]` pairs.
    unitary: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize)]
struct PointJson {
    step: usize,
    #[serde(rename = "S_bits")]
    s_bits: f64,
    #[serde(rename = "I_bits")]
    i_bits: f64,
}

fn pairs(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn matrix(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect()
}

fn points(table: &[TrajectoryPoint]) -> Vec<PointJson> {
    table.iter().map(|p| PointJson { step: p.step, s_bits: p.mutual_entropy, i_bits: p.accessible_info }).collect()
}

pub fn config(cfg: &Resolved) -> Result<CounterexampleConfig> {
    if cfg.trials == 0 {
        bail!("trials must be at least 1");
    }
    Ok(CounterexampleConfig {
        seed: cfg.seed,
        trials: cfg.trials,
        steps_per_trial: STEPS_PER_TRIAL,
        margins: Margins { entropy: cfg.margins.0, information: cfg.margins.1 },
        restarts: cfg.restarts,
    })
}

pub fn run(cfg: &Resolved) -> Result<bool> {
    let search = config(cfg)?;
    let outcome = counterexample_search(&search)?;
    let mut out = Run::new("counterexample", cfg)?;
    let common = json!({
        "seed": search.seed,
        "trials": search.trials,
        "steps_per_trial": search.steps_per_trial,
        "restarts": search.restarts,
        "margins_bits": [search.margins.entropy, search.margins.information],
        "pair": ["q0", "q1"],
        "traced_out": "q2",
    });
    match &outcome {
        CounterexampleOutcome::Found(inst) => {
            let (a, b) = (inst.trajectory[inst.t1], inst.trajectory[inst.t2]);
            let doc = json!({
                "found": true,
                "search": common,
                "trial": inst.trial,
                "t1": inst.t1,
                "t2": inst.t2,
                "delta_S_bits": inst.entropy_change(),
                "delta_I_bits": inst.information_change(),
                "initial": pairs(&inst.initial),
                "steps": inst.steps.iter().map(|s| StepJson { qubits: [s.qubits.0, s.qubits.1], unitary: matrix(&s.unitary) }).collect::<Vec<_>>(),
                "table": points(&inst.trajectory),
            });
            out.json("counterexample.json", &doc)?;
            let mut table = Table::new(&["trial", "step", "S_bits", "I_bits"]);
            for p in &inst.trajectory {
                table.push(vec![inst.trial.to_string(), p.step.to_string(), num(p.mutual_entropy), num(p.accessible_info)]);
            }
            out.csv("counterexample_table.csv", &table)?;
            let series = |name: &str, f: fn(&TrajectoryPoint) -> f64| Series {
                name: name.into(),
                points: inst.trajectory.iter().map(|p| (p.step as f64, f(p))).collect(),
                style: Style::Line,
            };
            let plot = Plot {
                title: format!("Trial {}: S(q0:q1) and I(q0:q1) along the trajectory", inst.trial),
                x_label: "step".into(),
                y_label: "bits".into(),
                series: vec![series("S", |p| p.mutual_entropy), series("I", |p| p.accessible_info)],
                ..Default::default()
            };
            out.svg("counterexample.svg", plot.render())?;
            out.finish(json!({ "found": true, "trial": inst.trial, "t1": inst.t1, "t2": inst.t2 }))?;
            println!(
                "trial {}: steps {} -> {}: S {} -> {} (ΔS = {}), I {} -> {} (ΔI = {})",
                inst.trial,
                inst.t1,
                inst.t2,
                num(a.mutual_entropy),
                num(b.mutual_entropy),
                num(inst.entropy_change()),
                num(a.accessible_info),
                num(b.accessible_info),
                num(inst.information_change())
            );
        }
        CounterexampleOutcome::NotFound { trials, best } => {
            let best = best.map(|(trial, t1, t2, score)| json!({ "trial": trial, "t1": t1, "t2": t2, "score_bits": score }));
            out.json("counterexample.json", &json!({ "found": false, "search": common, "best_candidate": best }))?;
            out.finish(json!({ "found": false, "best_candidate": best }))?;
            println!("no instance in {trials} trials; best candidate {best:?}");
        }
    }
    Ok(true)
}
