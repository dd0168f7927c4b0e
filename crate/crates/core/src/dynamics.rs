//! Phase evolution of the pointer branches, recurrence scans, and the
//! three-qubit search for opposite changes of mutual entropy and accessible
//! information.
//!
//! Time is dimensionless with ħ = 1: branch `(i, s)` accumulates phase
//! `θ_{i,s}(t) = E_{i,s} t`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{mutual_entropy, INEQUALITY_SLACK};
use crate::linalg::{trace_distance, CMatrix, CVector, DensityOperator, HilbertSpace, PureState, C64};
use crate::model::{apply_measurement, BranchState, PointerMeasurementModel};
use crate::rng::{self, tags};
use crate::search::{projective_search, SearchOptions};

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyModel {
    /// `energies[i][s]`, radians per unit time.
    energies: Vec<Vec<f64>>,
    base: PointerMeasurementModel,
}

impl EnergyModel {
    pub fn new(base: PointerMeasurementModel, energies: Vec<Vec<f64>>) -> Result<Self> {
        if energies.len() != base.outcomes() {
            return Err(Error::DimensionMismatch { expected: base.outcomes(), got: energies.len() });
        }
        for row in &energies {
            if row.len() != base.microstates() {
                return Err(Error::DimensionMismatch { expected: base.microstates(), got: row.len() });
            }
            if row.iter().any(|e| !e.is_finite()) {
                return Err(Error::InvalidInput("energies must be finite".into()));
            }
        }
        Ok(Self { energies, base })
    }

    /// `E_{i,s} = n_{i,s} · quantum`; every phase returns to 0 at `t = 2π / quantum`.
    pub fn commensurate(base: PointerMeasurementModel, multiples: &[Vec<i64>], quantum: f64) -> Result<Self> {
        let energies = multiples.iter().map(|row| row.iter().map(|&n| n as f64 * quantum).collect()).collect();
        Self::new(base, energies)
    }

    /// Energies i.i.d. uniform on `[0, scale)`.
    pub fn random<R: rand::Rng + ?Sized>(base: PointerMeasurementModel, scale: f64, rng: &mut R) -> Result<Self> {
        let energies = (0..base.outcomes())
            .map(|_| (0..base.microstates()).map(|_| rng.random::<f64>() * scale).collect())
            .collect();
        Self::new(base, energies)
    }

    pub fn energies(&self) -> &[Vec<f64>] {
        &self.energies
    }

    pub fn base(&self) -> &PointerMeasurementModel {
        &self.base
    }

    /// Adds `delta` to every branch energy.
    pub fn shifted(&self, delta: f64) -> Self {
        let energies = self.energies.iter().map(|row| row.iter().map(|e| e + delta).collect()).collect();
        Self { energies, base: self.base.clone() }
    }

    pub fn phases_at(&self, t: f64) -> Vec<Vec<f64>> {
        self.energies
            .iter()
            .map(|row| row.iter().map(|e| (e * t).rem_euclid(std::f64::consts::TAU)).collect())
            .collect()
    }

    /// Coherent post-measurement state at time `t`.
    pub fn evolve(&self, t: f64) -> Result<BranchState> {
        if !(t >= 0.0) {
            return Err(Error::InvalidInput(format!("time must be non-negative, got {t}")));
        }
        Ok(apply_measurement(&self.base.with_phases(self.phases_at(t))?))
    }

    /// Trace distance between the states at `t` and at 0.
    ///
    /// Microstate blocks are mutually orthogonal, so the distance is
    /// `Σ_s p_s √(1 − |⟨Φ_s(0)|Φ_s(t)⟩|²)`, and with `w_i = |c_i|²`
    /// `1 − |Σ_i w_i e^{iφ_i}|² = 4 Σ_{i<j} w_i w_j sin²((φ_i − φ_j)/2)`,
    /// which stays accurate when every phase is a multiple of 2π.
    pub fn distance_to_initial(&self, t: f64) -> f64 {
        let w = self.base.branch_probabilities();
        let k = w.len();
        let mut total = 0.0;
        for (s, &ps) in self.base.weights().iter().enumerate() {
            if ps == 0.0 {
                continue;
            }
            let mut loss = 0.0;
            for i in 0..k {
                for j in (i + 1)..k {
                    let half = 0.5 * ((self.energies[i][s] - self.energies[j][s]) * t);
                    let sn = half.sin();
                    loss += 4.0 * w[i] * w[j] * sn * sn;
                }
            }
            total += ps * loss.max(0.0).sqrt();
        }
        total.clamp(0.0, 1.0)
    }

    /// Same distance through dense matrices.
    pub fn distance_to_initial_dense(&self, t: f64) -> Result<f64> {
        let now = self.evolve(t)?.to_dense()?;
        let start = self.evolve(0.0)?.to_dense()?;
        trace_distance(&now, &start)
    }
}

pub fn evolve(model: &EnergyModel, t: f64) -> Result<BranchState> {
    model.evolve(t)
}

/// `0, step, 2·step, …` up to and including `horizon`.
pub fn uniform_grid(horizon: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(horizon >= 0.0) {
        return Err(Error::InvalidInput("grid needs step > 0 and horizon ≥ 0".into()));
    }
    let n = (horizon / step).floor() as usize;
    Ok((0..=n).map(|i| i as f64 * step).collect())
}

/// `0` followed by `points` log-spaced times in `[t_min, t_max]`.
pub fn log_grid(t_min: f64, t_max: f64, points: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0) || !(t_max > t_min) || points < 2 {
        return Err(Error::InvalidInput("log grid needs 0 < t_min < t_max and at least 2 points".into()));
    }
    let (a, b) = (t_min.ln(), t_max.ln());
    let mut out = vec![0.0];
    out.extend((0..points).map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp()));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrenceScan {
    pub times: Vec<f64>,
    pub distances: Vec<f64>,
    pub min_distance: f64,
    pub argmin_time: f64,
}

impl RecurrenceScan {
    fn from_samples(times: Vec<f64>, distances: Vec<f64>) -> Result<Self> {
        let (mut best, mut arg) = (f64::INFINITY, f64::NAN);
        for (&t, &d) in times.iter().zip(&distances) {
            if d < best {
                best = d;
                arg = t;
            }
        }
        if times.is_empty() {
            return Err(Error::InvalidInput("empty time grid".into()));
        }
        Ok(Self { times, distances, min_distance: best, argmin_time: arg })
    }

    /// Minimum over the part of the scan after the distance first reached `departure`.
    pub fn min_after_departure(&self, departure: f64) -> Option<(f64, f64)> {
        let start = self.distances.iter().position(|&d| d >= departure)?;
        self.times[start..]
            .iter()
            .zip(&self.distances[start..])
            .map(|(&t, &d)| (t, d))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }
}

/// Distance to the `t = 0` state along `times`.
pub fn recurrence_scan(model: &EnergyModel, times: &[f64]) -> Result<RecurrenceScan> {
    model.base.check_dense()?;
    if times.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::InvalidInput("times must be non-negative".into()));
    }
    let distances = times.iter().map(|&t| model.distance_to_initial(t)).collect();
    RecurrenceScan::from_samples(times.to_vec(), distances)
}

/// [`recurrence_scan`] computed through dense eigendecompositions.
pub fn recurrence_scan_dense(model: &EnergyModel, times: &[f64]) -> Result<RecurrenceScan> {
    let start = model.evolve(0.0)?.to_dense()?;
    let distances = times
        .iter()
        .map(|&t| trace_distance(&model.evolve(t)?.to_dense()?, &start))
        .collect::<Result<Vec<_>>>()?;
    RecurrenceScan::from_samples(times.to_vec(), distances)
}

/// Default recurrence scan: horizon, step and return threshold.
pub const DEFAULT_HORIZON: f64 = 1.0e5;
pub const DEFAULT_STEP: f64 = 0.025;
pub const RETURN_THRESHOLD: f64 = 0.05;

/// Two equal branches, uniform microstate weights and energies uniform on
/// `[0, 1)` drawn from stream `(ENERGIES, index)`.
pub fn incommensurate_model(m: usize, seed: u64, index: u32) -> Result<EnergyModel> {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let base = PointerMeasurementModel::without_phases(vec![h, h], rng::uniform_weights(m))?;
    EnergyModel::random(base, 1.0, &mut rng::stream_rng(seed, tags::ENERGIES, index))
}

/// Distance the state must first reach before a dip counts as a return.
pub const DEPARTURE: f64 = 0.5;

/// First grid time in `(0, horizon]` at which the distance drops below
/// `threshold` after having reached [`DEPARTURE`]. Streams the grid without
/// storing it.
pub fn first_return(model: &EnergyModel, horizon: f64, step: f64, threshold: f64) -> Option<f64> {
    const RESYNC: usize = 1024;
    let n = (horizon / step).floor() as usize;
    let w = model.base.branch_probabilities();
    let k = w.len();
    // per microstate: (p_s, [(2 w_i w_j, Δ_ij)]) with 1 − cos(Δ t) tracked by rotating phasors
    let mut blocks: Vec<(f64, Vec<(f64, f64)>)> = Vec::new();
    for (s, &ps) in model.base.weights().iter().enumerate() {
        let pairs: Vec<(f64, f64)> = (0..k)
            .flat_map(|i| ((i + 1)..k).map(move |j| (i, j)))
            .map(|(i, j)| (2.0 * w[i] * w[j], model.energies[i][s] - model.energies[j][s]))
            .filter(|&(coef, _)| coef > 0.0)
            .collect();
        if ps > 0.0 && !pairs.is_empty() {
            blocks.push((ps, pairs));
        }
    }
    let rot: Vec<Vec<C64>> =
        blocks.iter().map(|(_, pairs)| pairs.iter().map(|&(_, d)| C64::from_polar(1.0, d * step)).collect()).collect();
    let mut z: Vec<Vec<C64>> = blocks.iter().map(|(_, pairs)| vec![C64::new(1.0, 0.0); pairs.len()]).collect();
    let mut departed = false;
    for i in 1..=n {
        let t = i as f64 * step;
        let mut d = 0.0;
        for (b, (ps, pairs)) in blocks.iter().enumerate() {
            let mut loss = 0.0;
            for (q, &(coef, delta)) in pairs.iter().enumerate() {
                z[b][q] = if i % RESYNC == 0 { C64::from_polar(1.0, delta * t) } else { z[b][q] * rot[b][q] };
                loss += coef * (1.0 - z[b][q].re);
            }
            d += ps * loss.max(0.0).sqrt();
        }
        if !departed {
            departed = d >= DEPARTURE;
        } else if d < threshold {
            // confirm with the direct formula
            if model.distance_to_initial(t) < threshold {
                return Some(t);
            }
        }
    }
    None
}

/// A two-qubit gate on a chosen pair of the three qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub qubits: (usize, usize),
    /// 4×4 unitary; row/column index `2·b_first + b_second`.
    pub unitary: CMatrix,
}

impl Step {
    pub fn identity(qubits: (usize, usize)) -> Self {
        Self { qubits, unitary: CMatrix::identity(4, 4) }
    }
}

pub const QUBIT_LABELS: [&str; 3] = ["q0", "q1", "q2"];

fn three_qubits() -> HilbertSpace {
    HilbertSpace::new(&[(QUBIT_LABELS[0], 2), (QUBIT_LABELS[1], 2), (QUBIT_LABELS[2], 2)]).expect("fixed space")
}

/// Applies a two-qubit gate to a three-qubit amplitude vector (`q0` most significant).
pub fn apply_step(state: &CVector, step: &Step) -> Result<CVector> {
    let (a, b) = step.qubits;
    if a == b || a > 2 || b > 2 || state.len() != 8 {
        return Err(Error::InvalidInput(format!("bad step on qubits ({a}, {b})")));
    }
    let bit = |idx: usize, q: usize| (idx >> (2 - q)) & 1;
    let mut out = CVector::zeros(8);
    for idx in 0..8 {
        let local = 2 * bit(idx, a) + bit(idx, b);
        let rest = idx & !((1 << (2 - a)) | (1 << (2 - b)));
        for target in 0..4 {
            let dst = rest | ((target >> 1) << (2 - a)) | ((target & 1) << (2 - b));
            out[dst] += step.unitary[(target, local)] * state[idx];
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    pub entropy: f64,
    pub information: f64,
}

impl Default for Margins {
    fn default() -> Self {
        Self { entropy: 0.01, information: 0.01 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub step: usize,
    /// `S(q0:q1)`, bits.
    pub mutual_entropy: f64,
    /// Projective-search lower bound on `I(q0:q1)`, bits.
    pub accessible_info: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CounterexampleInstance {
    pub seed: u64,
    pub trial: u32,
    pub initial: CVector,
    pub steps: Vec<Step>,
    pub trajectory: Vec<TrajectoryPoint>,
    pub t1: usize,
    pub t2: usize,
}

impl CounterexampleInstance {
    pub fn entropy_change(&self) -> f64 {
        self.trajectory[self.t2].mutual_entropy - self.trajectory[self.t1].mutual_entropy
    }

    pub fn information_change(&self) -> f64 {
        self.trajectory[self.t2].accessible_info - self.trajectory[self.t1].accessible_info
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CounterexampleOutcome {
    Found(CounterexampleInstance),
    NotFound {
        trials: u32,
        /// `(trial, t1, t2, score)` maximizing `min(−ΔS − δ_S, ΔI − δ_I)`.
        best: Option<(u32, usize, usize, f64)>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CounterexampleConfig {
    pub seed: u64,
    pub trials: u32,
    pub steps_per_trial: usize,
    pub margins: Margins,
    /// Restarts per accessible-information estimate.
    pub restarts: usize,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        Self { seed: 0, trials: 10_000, steps_per_trial: 8, margins: Margins::default(), restarts: 6 }
    }
}

/// Random trajectory of trial `trial`: Haar initial state and Haar two-qubit
/// gates on uniformly chosen pairs, all from stream `(TRIAL, trial)`.
pub fn trial_trajectory(seed: u64, trial: u32, steps: usize) -> (CVector, Vec<Step>) {
    const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];
    let mut g = rng::stream_rng(seed, tags::TRIAL, trial);
    let initial = rng::random_pure_state(8, &mut g);
    let steps = (0..steps)
        .map(|_| {
            let qubits = PAIRS[rand::Rng::random_range(&mut g, 0..PAIRS.len())];
            Step { qubits, unitary: rng::haar_unitary(4, &mut g) }
        })
        .collect();
    (initial, steps)
}

/// `S(q0:q1)` and the projective `I(q0:q1)` after each prefix of `steps`
/// (entry 0 is the initial state).
pub fn evaluate_trajectory(
    initial: &CVector,
    steps: &[Step],
    restarts: usize,
    search_seed: u64,
) -> Result<Vec<TrajectoryPoint>> {
    let space = three_qubits();
    let mut psi = initial.clone();
    let mut out = Vec::with_capacity(steps.len() + 1);
    for k in 0..=steps.len() {
        if k > 0 {
            psi = apply_step(&psi, &steps[k - 1])?;
        }
        let rho = PureState::normalized(space.clone(), psi.clone())?.to_density();
        let pair = rho.partial_trace(&QUBIT_LABELS[..2])?;
        out.push(evaluate_pair(&pair, restarts, rng::derive_seed(search_seed, tags::RESTART, k as u32))?);
        out.last_mut().expect("pushed").step = k;
    }
    Ok(out)
}

fn evaluate_pair(pair: &DensityOperator, restarts: usize, seed: u64) -> Result<TrajectoryPoint> {
    let s = mutual_entropy(pair)?;
    let opts = SearchOptions { restarts, seed, ..SearchOptions::default() };
    let i = projective_search(pair, &opts)?.value;
    Ok(TrajectoryPoint { step: 0, mutual_entropy: s, accessible_info: i })
}

/// First `(t1, t2)`, ordered by `t2` then `t1`, with `S` dropping by more than
/// `δ_S` while `I` rises by more than `δ_I`; also the best score seen.
pub fn find_opposite_changes(points: &[TrajectoryPoint], margins: Margins) -> (Option<(usize, usize)>, Option<(usize, usize, f64)>) {
    let mut best: Option<(usize, usize, f64)> = None;
    for t2 in 1..points.len() {
        for t1 in 0..t2 {
            let ds = points[t1].mutual_entropy - points[t2].mutual_entropy - margins.entropy;
            let di = points[t2].accessible_info - points[t1].accessible_info - margins.information;
            let score = ds.min(di);
            if best.is_none_or(|b| score > b.2) {
                best = Some((t1, t2, score));
            }
            let valid = points[t1].accessible_info <= points[t1].mutual_entropy + INEQUALITY_SLACK
                && points[t2].accessible_info <= points[t2].mutual_entropy + INEQUALITY_SLACK;
            if ds > 0.0 && di > 0.0 && valid {
                return (Some((t1, t2)), best);
            }
        }
    }
    (None, best)
}

/// Restart-search seed used for trial `trial`.
pub fn trial_search_seed(seed: u64, trial: u32) -> u64 {
    rng::derive_seed(seed, tags::RESTART, trial)
}

/// Replays one trial exactly as [`counterexample_search`] evaluates it.
pub fn replay_trial(config: &CounterexampleConfig, trial: u32) -> Result<(CVector, Vec<Step>, Vec<TrajectoryPoint>)> {
    let (initial, steps) = trial_trajectory(config.seed, trial, config.steps_per_trial);
    let points = evaluate_trajectory(&initial, &steps, config.restarts, trial_search_seed(config.seed, trial))?;
    Ok((initial, steps, points))
}

/// Searches random three-qubit trajectories for a step pair where the mutual
/// entropy of `(q0, q1)` falls while its accessible information rises.
/// Trials run in order and the first hit is returned.
pub fn counterexample_search(config: &CounterexampleConfig) -> Result<CounterexampleOutcome> {
    if config.trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    let mut best: Option<(u32, usize, usize, f64)> = None;
    for trial in 0..config.trials {
        let (initial, steps, points) = replay_trial(config, trial)?;
        let (hit, cand) = find_opposite_changes(&points, config.margins);
        if let Some((t1, t2, score)) = cand {
            if best.is_none_or(|b| score > b.3) {
                best = Some((trial, t1, t2, score));
            }
        }
        if let Some((t1, t2)) = hit {
            return Ok(CounterexampleOutcome::Found(CounterexampleInstance {
                seed: config.seed,
                trial,
                initial,
                steps,
                trajectory: points,
                t1,
                t2,
            }));
        }
    }
    Ok(CounterexampleOutcome::NotFound { trials: config.trials, best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::branch_mutual_entropy;
    use crate::linalg::{shannon_entropy, LogBase};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, TAU};

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn base(m: usize) -> PointerMeasurementModel {
        let h = FRAC_1_SQRT_2;
        PointerMeasurementModel::without_phases(vec![r(h), r(h)], rng::uniform_weights(m)).unwrap()
    }

    #[test]
    fn phases_start_at_zero() {
        let mut g = rng::stream_rng(1, tags::ENERGIES, 0);
        let em = EnergyModel::random(base(3), 1.0, &mut g).unwrap();
        let state = em.evolve(0.0).unwrap();
        assert!(state.model().phases().iter().flatten().all(|&p| p == 0.0));
        assert!(em.evolve(-1.0).is_err());
    }

    #[test]
    fn commensurate_energies_return_exactly() {
        let eps = 0.37;
        let em = EnergyModel::commensurate(base(3), &[vec![1, 4, 7], vec![2, -3, 5]], eps).unwrap();
        let period = TAU / eps;
        assert!(em.distance_to_initial(period) < 1e-12);
        assert!(em.distance_to_initial_dense(period).unwrap() < 1e-9);
        assert!(em.distance_to_initial(0.5 * period) > 0.1);
        let scan = recurrence_scan(&em, &[0.0, 0.25 * period, period]).unwrap();
        assert_eq!(scan.distances[0], 0.0);
        assert!(scan.distances[2] < 1e-12);
    }

    #[test]
    fn structured_distance_matches_dense() {
        let mut g = rng::stream_rng(2, tags::ENERGIES, 0);
        let c = rng::random_amplitudes(3, &mut g);
        let p = rng::random_weights(2, &mut g);
        let em = EnergyModel::random(PointerMeasurementModel::without_phases(c, p).unwrap(), 2.0, &mut g).unwrap();
        for t in [0.0, 0.3, 1.7, 12.5, 400.0] {
            assert_abs_diff_eq!(em.distance_to_initial(t), em.distance_to_initial_dense(t).unwrap(), epsilon = 1e-9);
        }
    }

    #[test]
    fn global_shift_changes_nothing() {
        let mut g = rng::stream_rng(3, tags::ENERGIES, 0);
        let em = EnergyModel::random(base(4), 1.0, &mut g).unwrap();
        let shifted = em.shifted(0.731);
        for t in [0.1, 5.0, 77.7] {
            assert_abs_diff_eq!(em.distance_to_initial(t), shifted.distance_to_initial(t), epsilon = 1e-10);
            assert_abs_diff_eq!(
                em.distance_to_initial_dense(t).unwrap(),
                shifted.distance_to_initial_dense(t).unwrap(),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn evolution_preserves_spectrum_and_mutual_entropy() {
        let mut g = rng::stream_rng(4, tags::ENERGIES, 0);
        let p = rng::random_weights(3, &mut g);
        let h = shannon_entropy(&p).unwrap();
        let em = EnergyModel::random(PointerMeasurementModel::without_phases(vec![r(0.6), r(0.8)], p).unwrap(), 1.0, &mut g)
            .unwrap();
        let s0 = branch_mutual_entropy(&em.evolve(0.0).unwrap(), LogBase::Two).unwrap();
        for t in [0.0, 1.0, 33.3] {
            let dense = em.evolve(t).unwrap().to_dense().unwrap();
            assert_abs_diff_eq!(crate::linalg::von_neumann_entropy(&dense).unwrap(), h, epsilon = 1e-9);
            assert_abs_diff_eq!(mutual_entropy(&dense).unwrap(), s0, epsilon = 1e-9);
        }
    }

    #[test]
    fn streaming_return_matches_scan() {
        for idx in 0..4 {
            let em = incommensurate_model(3, 9, idx).unwrap();
            let got = first_return(&em, 3000.0, 0.05, 0.1);
            let grid = uniform_grid(3000.0, 0.05).unwrap();
            let mut departed = false;
            let mut want = None;
            for &t in &grid[1..] {
                let d = em.distance_to_initial(t);
                if !departed {
                    departed = d >= DEPARTURE;
                } else if d < 0.1 {
                    want = Some(t);
                    break;
                }
            }
            assert_eq!(got, want);
        }
    }

    #[test]
    fn grids() {
        assert_eq!(uniform_grid(1.0, 0.25).unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let g = log_grid(0.1, 10.0, 3).unwrap();
        assert_eq!(g[0], 0.0);
        assert_abs_diff_eq!(g[2], 1.0, epsilon = 1e-12);
        assert!(uniform_grid(1.0, 0.0).is_err());
    }

    #[test]
    fn apply_step_matches_kronecker() {
        let mut g = rng::stream_rng(5, tags::STATES, 0);
        let psi = rng::random_pure_state(8, &mut g);
        let u = rng::haar_unitary(4, &mut g);
        let full = u.kronecker(&CMatrix::identity(2, 2));
        let got = apply_step(&psi, &Step { qubits: (0, 1), unitary: u.clone() }).unwrap();
        assert!((got - &full * &psi).norm() < 1e-12);
        // gate on (q2, q0): swap into place via an explicit permutation
        let got = apply_step(&psi, &Step { qubits: (2, 0), unitary: u.clone() }).unwrap();
        let mut want = CVector::zeros(8);
        for idx in 0..8usize {
            let (b0, b1, b2) = ((idx >> 2) & 1, (idx >> 1) & 1, idx & 1);
            for target in 0..4usize {
                let (n2, n0) = (target >> 1, target & 1);
                want[(n0 << 2) | (b1 << 1) | n2] += u[(target, 2 * b2 + b0)] * psi[idx];
            }
        }
        assert!((got - want).norm() < 1e-12);
    }

    #[test]
    fn product_state_with_identity_steps_never_qualifies() {
        let mut psi = CVector::zeros(8);
        psi[0] = r(1.0);
        let steps: Vec<Step> = (0..4).map(|_| Step::identity((0, 1))).collect();
        let points = evaluate_trajectory(&psi, &steps, 2, 0).unwrap();
        assert!(points.iter().all(|p| p.mutual_entropy.abs() < 1e-12 && p.accessible_info.abs() < 1e-12));
        assert_eq!(find_opposite_changes(&points, Margins::default()).0, None);
    }

    #[test]
    fn replay_is_exact() {
        let cfg = CounterexampleConfig { seed: 3, trials: 2, steps_per_trial: 3, ..Default::default() };
        let a = replay_trial(&cfg, 1).unwrap();
        let b = replay_trial(&cfg, 1).unwrap();
        assert_eq!(a, b);
    }
}
