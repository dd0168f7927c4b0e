//! The object + pointer-device measurement model.
//!
//! The object has `K` outcome states `|ψ_i⟩`. The device space is split into
//! `K + 1` orthogonal sectors of `M` microstates each: sector 0 holds the
//! ready states `|α_{0,s}⟩`, sector `i + 1` holds the pointer states
//! `|α_{i,s}⟩` for outcome `i`. Device basis index = `sector * M + s`.
//!
//! Interaction maps `|ψ_i⟩|α_{0,s}⟩ ↦ e^{iθ_{i,s}} |ψ_i⟩|α_{i,s}⟩`. Starting from
//! `Σ_s p_s |ψ⟩⟨ψ| ⊗ |α_{0,s}⟩⟨α_{0,s}|` this produces the coherent state
//!
//! ```text
//! ρ  = Σ_{s,i,j} p_s c_i c_j* e^{i(θ_{i,s} − θ_{j,s})} |ψ_i α_{i,s}⟩⟨ψ_j α_{j,s}|
//! ```
//!
//! whose branch-diagonal part is the reduced state
//! `ρ′ = Σ_{i,s} |c_i|² p_s |ψ_i α_{i,s}⟩⟨ψ_i α_{i,s}|`.
//!
//! [`BranchState`] stores only `(c, p, θ)` and evaluates spectra and
//! expectations in closed form, so `M` can reach 10⁶. [`BranchState::to_dense`]
//! materializes the same operator for cross-checks at small sizes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_deviation, CMatrix, DensityOperator, HilbertSpace, C64};
use crate::rng::{self, tags};

pub const OBJECT: &str = "object";
pub const DEVICE: &str = "device";

/// Largest total dimension `K·(K+1)·M` that will be materialized densely.
pub const DENSE_LIMIT: usize = 4096;

/// Normalization tolerance for model amplitudes and weights.
pub const MODEL_TOL: f64 = 1e-12;
/// Amplitude vectors off by less than this are renormalized silently.
pub const RENORMALIZE_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointerMeasurementModel {
    c: Vec<C64>,
    p: Vec<f64>,
    /// `theta[i][s]`, radians.
    theta: Vec<Vec<f64>>,
}

impl PointerMeasurementModel {
    pub fn new(c: Vec<C64>, p: Vec<f64>, theta: Vec<Vec<f64>>) -> Result<Self> {
        let k = c.len();
        let m = p.len();
        if k == 0 || m == 0 {
            return Err(Error::InvalidDimension(format!("need K ≥ 1 and M ≥ 1, got K = {k}, M = {m}")));
        }
        let norm: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > MODEL_TOL || c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NotNormalized(norm));
        }
        if p.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(Error::InvalidDistribution("microstate weights must be finite and non-negative".into()));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > MODEL_TOL {
            return Err(Error::InvalidDistribution(format!("microstate weights sum to {total}")));
        }
        if theta.len() != k {
            return Err(Error::DimensionMismatch { expected: k, got: theta.len() });
        }
        for row in &theta {
            if row.len() != m {
                return Err(Error::DimensionMismatch { expected: m, got: row.len() });
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput("phases must be finite".into()));
            }
        }
        Ok(Self { c, p, theta })
    }

    /// All phases zero.
    pub fn without_phases(c: Vec<C64>, p: Vec<f64>) -> Result<Self> {
        let theta = vec![vec![0.0; p.len()]; c.len()];
        Self::new(c, p, theta)
    }

    /// Phases drawn i.i.d. uniform on `[0, 2π)` from `rng`.
    pub fn with_random_phases<R: rand::Rng + ?Sized>(c: Vec<C64>, p: Vec<f64>, rng: &mut R) -> Result<Self> {
        let theta = rng::uniform_phases(c.len(), p.len(), rng);
        Self::new(c, p, theta)
    }

    pub fn with_phases(&self, theta: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(self.c.clone(), self.p.clone(), theta)
    }

    /// Number of outcomes `K`.
    pub fn outcomes(&self) -> usize {
        self.c.len()
    }

    /// Microstates per sector `M`.
    pub fn microstates(&self) -> usize {
        self.p.len()
    }

    pub fn object_dim(&self) -> usize {
        self.outcomes()
    }

    pub fn device_dim(&self) -> usize {
        (self.outcomes() + 1) * self.microstates()
    }

    pub fn dense_dim(&self) -> usize {
        self.object_dim() * self.device_dim()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.c
    }

    pub fn weights(&self) -> &[f64] {
        &self.p
    }

    pub fn phases(&self) -> &[Vec<f64>] {
        &self.theta
    }

    /// `|c_i|²`.
    pub fn branch_probabilities(&self) -> Vec<f64> {
        self.c.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn space(&self) -> HilbertSpace {
        HilbertSpace::new(&[(OBJECT, self.object_dim()), (DEVICE, self.device_dim())])
            .expect("model dimensions are positive")
    }

    /// Device basis index of `|α_{sector,s}⟩`; sector 0 is the ready sector.
    pub fn device_index(&self, sector: usize, s: usize) -> usize {
        sector * self.microstates() + s
    }

    /// Composite index of `|ψ_i⟩|α_{sector,s}⟩`.
    pub fn joint_index(&self, i: usize, sector: usize, s: usize) -> usize {
        i * self.device_dim() + self.device_index(sector, s)
    }

    /// `Σ_s p_s e^{i(θ_{i,s} − θ_{j,s})}`, the factor multiplying every
    /// off-diagonal branch term.
    pub fn coherence(&self, i: usize, j: usize) -> C64 {
        self.p
            .iter()
            .zip(self.theta[i].iter().zip(&self.theta[j]))
            .map(|(&p, (&a, &b))| C64::from_polar(p, a - b))
            .sum()
    }

    pub fn check_dense(&self) -> Result<()> {
        let dim = self.dense_dim();
        if dim > DENSE_LIMIT {
            return Err(Error::DenseLimit { dim, limit: DENSE_LIMIT });
        }
        Ok(())
    }
}

/// Normalizes amplitudes that are off by at most [`RENORMALIZE_TOL`].
pub fn normalize_amplitudes(c: &[C64]) -> Result<Vec<C64>> {
    let norm_sq: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    if c.is_empty() || (norm_sq - 1.0).abs() > RENORMALIZE_TOL {
        return Err(Error::NotNormalized(norm_sq));
    }
    let norm = norm_sq.sqrt();
    Ok(c.iter().map(|z| z / norm).collect())
}

/// `|ψ⟩|α₀⟩⟨α₀|⟨ψ|` with a single ready state; the device has dimension `K + 1`.
pub fn premeasurement_pure(c: &[C64]) -> Result<DensityOperator> {
    let c = normalize_amplitudes(c)?;
    premeasurement_mixed(&PointerMeasurementModel::without_phases(c, vec![1.0])?).to_dense()
}

/// `Σ_{i,j} c_i c_j* e^{i(θ_i − θ_j)} |ψ_i α_i⟩⟨ψ_j α_j|` with a single microstate.
pub fn postmeasurement_pure(c: &[C64], theta0: &[f64]) -> Result<DensityOperator> {
    let c = normalize_amplitudes(c)?;
    if theta0.len() != c.len() {
        return Err(Error::DimensionMismatch { expected: c.len(), got: theta0.len() });
    }
    let theta = theta0.iter().map(|&t| vec![t]).collect();
    apply_measurement(&PointerMeasurementModel::new(c, vec![1.0], theta)?).to_dense()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchKind {
    /// Object in `|ψ⟩`, device in the ready mixture.
    Initial,
    /// Coherent post-interaction state.
    Exact,
    /// Branch-diagonal reduction of `Exact`.
    Reduced,
}

impl BranchKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BranchKind::Initial => "initial",
            BranchKind::Exact => "exact",
            BranchKind::Reduced => "reduced",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchState {
    kind: BranchKind,
    model: PointerMeasurementModel,
}

pub fn premeasurement_mixed(model: &PointerMeasurementModel) -> BranchState {
    BranchState { kind: BranchKind::Initial, model: model.clone() }
}

pub fn apply_measurement(model: &PointerMeasurementModel) -> BranchState {
    BranchState { kind: BranchKind::Exact, model: model.clone() }
}

pub fn reduce(state: &BranchState) -> Result<BranchState> {
    state.reduce()
}

impl BranchState {
    pub fn kind(&self) -> BranchKind {
        self.kind
    }

    pub fn model(&self) -> &PointerMeasurementModel {
        &self.model
    }

    /// Drops all inter-branch coherences. Idempotent on reduced states.
    pub fn reduce(&self) -> Result<BranchState> {
        match self.kind {
            BranchKind::Initial => {
                Err(Error::InvalidInput("only post-measurement states can be reduced".into()))
            }
            BranchKind::Exact | BranchKind::Reduced => {
                Ok(BranchState { kind: BranchKind::Reduced, model: self.model.clone() })
            }
        }
    }

    /// Nonzero eigenvalues of the joint operator.
    ///
    /// The `s`-branches `Σ_i c_i e^{iθ_{i,s}} |ψ_i α_{i,s}⟩` are orthonormal, so
    /// the exact state has spectrum `{p_s}`; the reduced state is diagonal with
    /// entries `|c_i|² p_s`.
    pub fn joint_spectrum(&self) -> Vec<f64> {
        match self.kind {
            BranchKind::Initial | BranchKind::Exact => positive(self.model.p.iter().copied()),
            BranchKind::Reduced => self.product_spectrum(),
        }
    }

    pub fn object_spectrum(&self) -> Vec<f64> {
        match self.kind {
            BranchKind::Initial => vec![1.0],
            BranchKind::Exact | BranchKind::Reduced => positive(self.model.branch_probabilities()),
        }
    }

    pub fn device_spectrum(&self) -> Vec<f64> {
        match self.kind {
            BranchKind::Initial => positive(self.model.p.iter().copied()),
            BranchKind::Exact | BranchKind::Reduced => self.product_spectrum(),
        }
    }

    fn product_spectrum(&self) -> Vec<f64> {
        let w = self.model.branch_probabilities();
        positive(w.iter().flat_map(|&wi| self.model.p.iter().map(move |&ps| wi * ps)))
    }

    /// Closed-form `tr(ρA)` for a macroscopic observable.
    ///
    /// Exact: `Σ_{i,j} c_i c_j* ⟨j|a|i⟩ Σ_s p_s e^{i(θ_{i,s} − θ_{j,s})}`.
    /// Reduced: `Σ_i |c_i|² ⟨i|a|i⟩`. Initial: 0, the observable has no support
    /// on the ready sector.
    pub fn expectation(&self, observable: &MacroscopicObservable) -> Result<f64> {
        let k = self.model.outcomes();
        if observable.outcomes() != k {
            return Err(Error::DimensionMismatch { expected: k, got: observable.outcomes() });
        }
        let a = &observable.a;
        let c = &self.model.c;
        Ok(match self.kind {
            BranchKind::Initial => 0.0,
            BranchKind::Reduced => (0..k).map(|i| c[i].norm_sqr() * a[(i, i)].re).sum(),
            BranchKind::Exact => {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..k {
                    acc += c[i].norm_sqr() * a[(i, i)];
                    for j in (i + 1)..k {
                        // the (j, i) term is the conjugate of the (i, j) term
                        let term = c[i] * c[j].conj() * a[(j, i)] * self.model.coherence(i, j);
                        acc += 2.0 * term.re;
                    }
                }
                acc.re
            }
        })
    }

    pub fn to_dense(&self) -> Result<DensityOperator> {
        let model = &self.model;
        model.check_dense()?;
        let n = model.dense_dim();
        let (k, m) = (model.outcomes(), model.microstates());
        let c = &model.c;
        let mut rho = CMatrix::zeros(n, n);
        match self.kind {
            BranchKind::Initial => {
                for s in 0..m {
                    for i in 0..k {
                        for j in 0..k {
                            rho[(model.joint_index(i, 0, s), model.joint_index(j, 0, s))] +=
                                c[i] * c[j].conj() * model.p[s];
                        }
                    }
                }
            }
            BranchKind::Exact => {
                for s in 0..m {
                    for i in 0..k {
                        for j in 0..k {
                            let phase = C64::from_polar(1.0, model.theta[i][s] - model.theta[j][s]);
                            rho[(model.joint_index(i, i + 1, s), model.joint_index(j, j + 1, s))] =
                                c[i] * c[j].conj() * phase * model.p[s];
                        }
                    }
                }
            }
            BranchKind::Reduced => {
                for s in 0..m {
                    for i in 0..k {
                        let idx = model.joint_index(i, i + 1, s);
                        rho[(idx, idx)] = C64::new(c[i].norm_sqr() * model.p[s], 0.0);
                    }
                }
            }
        }
        DensityOperator::from_parts(model.space(), rho)
    }
}

fn positive<I: IntoIterator<Item = f64>>(values: I) -> Vec<f64> {
    values.into_iter().filter(|&x| x > 0.0).collect()
}

/// An observable that cannot resolve microstates: its matrix elements between
/// `|ψ_i α_{i,s}⟩` and `|ψ_j α_{j,s}⟩` are `a_{ij}` for every `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct MacroscopicObservable {
    a: CMatrix,
}

impl MacroscopicObservable {
    pub fn new(a: CMatrix) -> Result<Self> {
        if a.nrows() != a.ncols() || a.nrows() == 0 {
            return Err(Error::InvalidDimension(format!("{}x{} observable", a.nrows(), a.ncols())));
        }
        let dev = hermitian_deviation(&a);
        if dev > 1e-12 {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self { a })
    }

    /// `a_{01} = a_{10} = 1`, zero elsewhere.
    pub fn sigma_x(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidDimension("σx pattern needs K ≥ 2".into()));
        }
        let mut a = CMatrix::zeros(k, k);
        a[(0, 1)] = C64::new(1.0, 0.0);
        a[(1, 0)] = C64::new(1.0, 0.0);
        Ok(Self { a })
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let k = values.len();
        Self::new(CMatrix::from_fn(k, k, |i, j| if i == j { C64::new(values[i], 0.0) } else { C64::new(0.0, 0.0) }))
    }

    pub fn outcomes(&self) -> usize {
        self.a.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.a
    }

    pub fn is_diagonal(&self) -> bool {
        let k = self.outcomes();
        (0..k).all(|i| (0..k).all(|j| i == j || self.a[(i, j)].norm() == 0.0))
    }

    /// `A = Σ_{i,j} a_{ij} Σ_s |ψ_i α_{i,s}⟩⟨ψ_j α_{j,s}|` on the full space.
    pub fn embed(&self, model: &PointerMeasurementModel) -> Result<CMatrix> {
        let k = model.outcomes();
        if self.outcomes() != k {
            return Err(Error::DimensionMismatch { expected: k, got: self.outcomes() });
        }
        model.check_dense()?;
        let n = model.dense_dim();
        let mut out = CMatrix::zeros(n, n);
        for s in 0..model.microstates() {
            for i in 0..k {
                for j in 0..k {
                    out[(model.joint_index(i, i + 1, s), model.joint_index(j, j + 1, s))] = self.a[(i, j)];
                }
            }
        }
        Ok(out)
    }
}

pub fn expectation(state: &BranchState, observable: &MacroscopicObservable) -> Result<f64> {
    state.expectation(observable)
}

/// `|tr(ρA) − tr(ρ′A)|` for the coherent and reduced states of `model`.
pub fn decoherence_error(model: &PointerMeasurementModel, observable: &MacroscopicObservable) -> Result<f64> {
    let exact = apply_measurement(model);
    let reduced = exact.reduce()?;
    Ok((exact.expectation(observable)? - reduced.expectation(observable)?).abs())
}

/// How the phase table of each Monte-Carlo draw is generated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseSampling {
    /// `θ_{i,s}` i.i.d. uniform on `[0, 2π)`.
    #[default]
    Independent,
    /// Corrupted table: every branch reuses the phases of branch 0. Kept as a
    /// fault-injection fixture for the validation suite.
    Aligned,
}

/// Phase table for Monte-Carlo draw `draw`, from stream `(PHASES, draw)`.
pub fn sample_phases(k: usize, m: usize, seed: u64, draw: u32, sampling: PhaseSampling) -> Vec<Vec<f64>> {
    let mut rng = rng::stream_rng(seed, tags::PHASES, draw);
    match sampling {
        PhaseSampling::Independent => rng::uniform_phases(k, m, &mut rng),
        PhaseSampling::Aligned => {
            let row = rng::uniform_phases(1, m, &mut rng).remove(0);
            vec![row; k]
        }
    }
}

/// Decoherence error for `draws` independent phase tables. Draw `d` always
/// uses the same stream, so the result is independent of thread count.
pub fn sample_decoherence_errors(
    c: &[C64],
    p: &[f64],
    observable: &MacroscopicObservable,
    draws: u32,
    seed: u64,
    sampling: PhaseSampling,
) -> Result<Vec<f64>> {
    (0..draws)
        .into_par_iter()
        .map(|d| {
            let theta = sample_phases(c.len(), p.len(), seed, d, sampling);
            let model = PointerMeasurementModel::new(c.to_vec(), p.to_vec(), theta)?;
            decoherence_error(&model, observable)
        })
        .collect()
}

/// `|Σ_s p_s e^{i(θ_{0,s} − θ_{1,s})}|` for `draws` independent phase tables.
pub fn sample_coherence_moduli(p: &[f64], draws: u32, seed: u64, sampling: PhaseSampling) -> Vec<f64> {
    (0..draws)
        .into_par_iter()
        .map(|d| {
            let theta = sample_phases(2, p.len(), seed, d, sampling);
            p.iter()
                .zip(theta[0].iter().zip(&theta[1]))
                .map(|(&w, (&a, &b))| C64::from_polar(w, a - b))
                .sum::<C64>()
                .norm()
        })
        .collect()
}
