//! Quantum mutual entropy, classical mutual information of local measurements,
//! and the accessible-information lower bounds compared against it.
//!
//! For a bipartite state the first factor is measured with `E` and the second
//! with `F`; `P_ij = tr[(E_i ⊗ F_j) ρ]`. In the measurement model the first
//! factor is the object and the second the device.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian, hermitian_deviation, shannon_entropy_in, spectrum_entropy, CMatrix, DensityOperator, LogBase,
    C64,
};
use crate::model::{BranchKind, BranchState, PointerMeasurementModel};
use crate::search::{projective_search, table_mutual_information, SearchOptions};

/// Slack allowed on `I ≤ S` for numerical noise.
pub const INEQUALITY_SLACK: f64 = 1e-6;

/// Largest dense dimension on which projective search is attempted.
pub const SEARCH_DIM_LIMIT: usize = 512;

/// Largest factor dimension for which POVM effects are materialized.
pub const POVM_DIM_LIMIT: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    effects: Vec<CMatrix>,
    labels: Vec<String>,
}

impl Povm {
    pub fn new(effects: Vec<CMatrix>) -> Result<Self> {
        let labels = (0..effects.len()).map(|i| i.to_string()).collect();
        Self::with_labels(effects, labels)
    }

    pub fn with_labels(effects: Vec<CMatrix>, labels: Vec<String>) -> Result<Self> {
        let first = effects.first().ok_or_else(|| Error::InvalidPovm("no effects".into()))?;
        let d = first.nrows();
        if labels.len() != effects.len() {
            return Err(Error::InvalidPovm(format!("{} labels for {} effects", labels.len(), effects.len())));
        }
        let mut sum = CMatrix::zeros(d, d);
        for (i, e) in effects.iter().enumerate() {
            if e.nrows() != d || e.ncols() != d {
                return Err(Error::InvalidPovm(format!("effect {i} is {}x{}, expected {d}x{d}", e.nrows(), e.ncols())));
            }
            if hermitian_deviation(e) > 1e-10 {
                return Err(Error::InvalidPovm(format!("effect {i} is not Hermitian")));
            }
            let min = eig_hermitian(e)?.values.last().copied().unwrap_or(0.0);
            if min < -1e-10 {
                return Err(Error::InvalidPovm(format!("effect {i} has eigenvalue {min:e}")));
            }
            sum += e;
        }
        let dev = (sum - CMatrix::identity(d, d)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > 1e-9 {
            return Err(Error::InvalidPovm(format!("effects sum to identity only within {dev:e}")));
        }
        Ok(Self { effects, labels })
    }

    /// Rank-1 projectors onto the columns of a unitary.
    pub fn projective(basis: &CMatrix) -> Result<Self> {
        if basis.ncols() > POVM_DIM_LIMIT {
            return Err(Error::DenseLimit { dim: basis.ncols(), limit: POVM_DIM_LIMIT });
        }
        let effects = (0..basis.ncols())
            .map(|k| {
                let v = basis.column(k);
                &v * v.adjoint()
            })
            .collect();
        Self::new(effects)
    }

    pub fn computational(dim: usize) -> Result<Self> {
        Self::projective(&CMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.effects[0].nrows()
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn effects(&self) -> &[CMatrix] {
        &self.effects
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.len() {
            return Err(Error::InvalidPovm("permutation length mismatch".into()));
        }
        let effects = order.iter().map(|&i| self.effects[i].clone()).collect();
        let labels = order.iter().map(|&i| self.labels[i].clone()).collect();
        Ok(Self { effects, labels })
    }
}

fn bipartite_dims(rho: &DensityOperator) -> Result<(usize, usize)> {
    match rho.space().dims() {
        [a, c] => Ok((*a, *c)),
        dims => Err(Error::InvalidInput(format!("expected a bipartite state, got {} factors", dims.len()))),
    }
}

/// `S(ρ_A) + S(ρ_C) − S(ρ_AC)` in bits for a two-factor state.
pub fn mutual_entropy(rho: &DensityOperator) -> Result<f64> {
    mutual_entropy_in(rho, LogBase::Two)
}

pub fn mutual_entropy_in(rho: &DensityOperator, base: LogBase) -> Result<f64> {
    bipartite_dims(rho)?;
    let labels = rho.space().labels();
    let sa = spectrum_entropy(&rho.partial_trace(&labels[..1])?.eigen()?.values, base)?;
    let sc = spectrum_entropy(&rho.partial_trace(&labels[1..])?.eigen()?.values, base)?;
    let sac = spectrum_entropy(&rho.eigen()?.values, base)?;
    clamp_information(sa + sc - sac)
}

/// Closed-form mutual entropy of a branch state from its three spectra.
pub fn branch_mutual_entropy(state: &BranchState, base: LogBase) -> Result<f64> {
    let sa = shannon_entropy_in(&state.object_spectrum(), base)?;
    let sc = shannon_entropy_in(&state.device_spectrum(), base)?;
    let sac = shannon_entropy_in(&state.joint_spectrum(), base)?;
    clamp_information(sa + sc - sac)
}

fn clamp_information(x: f64) -> Result<f64> {
    if x < -1e-9 {
        return Err(Error::InvalidInput(format!("negative mutual information {x:e}")));
    }
    Ok(x.max(0.0))
}

/// Outcome table `P_ij = tr[(E_i ⊗ F_j) ρ]`, row-major over `i`.
pub fn joint_probabilities(rho: &DensityOperator, first: &Povm, second: &Povm) -> Result<Vec<f64>> {
    let (da, dc) = bipartite_dims(rho)?;
    if first.dim() != da {
        return Err(Error::DimensionMismatch { expected: da, got: first.dim() });
    }
    if second.dim() != dc {
        return Err(Error::DimensionMismatch { expected: dc, got: second.dim() });
    }
    let m = rho.matrix();
    let mut table = vec![0.0; first.len() * second.len()];
    for (j, f) in second.effects().iter().enumerate() {
        // X[a', a] = Σ_{c,c'} F[c, c'] ρ[(a', c'), (a, c)]
        let mut x = CMatrix::zeros(da, da);
        for ap in 0..da {
            for a in 0..da {
                let mut acc = C64::new(0.0, 0.0);
                for c in 0..dc {
                    for cp in 0..dc {
                        acc += f[(c, cp)] * m[(ap * dc + cp, a * dc + c)];
                    }
                }
                x[(ap, a)] = acc;
            }
        }
        for (i, e) in first.effects().iter().enumerate() {
            let p: C64 = (0..da).flat_map(|a| (0..da).map(move |ap| (a, ap))).map(|(a, ap)| e[(a, ap)] * x[(ap, a)]).sum();
            table[i * second.len() + j] = p.re.max(0.0);
        }
    }
    Ok(table)
}

/// `H(E:F) = Σ P_ij log P_ij − Σ p_i log p_i − Σ q_j log q_j` in bits.
pub fn classical_mutual_information(rho: &DensityOperator, first: &Povm, second: &Povm) -> Result<f64> {
    classical_mutual_information_in(rho, first, second, LogBase::Two)
}

pub fn classical_mutual_information_in(
    rho: &DensityOperator,
    first: &Povm,
    second: &Povm,
    base: LogBase,
) -> Result<f64> {
    let table = joint_probabilities(rho, first, second)?;
    Ok(table_mutual_information(&table, first.len(), second.len(), base))
}

/// Measurements of the pointer construction: the device basis `|α_{σ,s}⟩`
/// (every sector, every microstate) and the object basis `|ψ_j⟩`.
#[derive(Clone, Debug)]
pub struct PointerPovms {
    pub device: Povm,
    pub object: Povm,
}

pub fn pointer_povm(model: &PointerMeasurementModel) -> Result<PointerPovms> {
    if model.device_dim() > POVM_DIM_LIMIT {
        return Err(Error::DenseLimit { dim: model.device_dim(), limit: POVM_DIM_LIMIT });
    }
    let (k, m) = (model.outcomes(), model.microstates());
    let mut labels = Vec::with_capacity(model.device_dim());
    for sector in 0..=k {
        for s in 0..m {
            labels.push(format!("alpha[{sector},{s}]"));
        }
    }
    let basis = CMatrix::identity(model.device_dim(), model.device_dim());
    let device = Povm::with_labels(Povm::projective(&basis)?.effects, labels)?;
    let object = Povm::with_labels(
        Povm::computational(k)?.effects,
        (0..k).map(|j| format!("psi[{j}]")).collect(),
    )?;
    Ok(PointerPovms { device, object })
}

/// Closed-form `H(E:F)` of a branch state under the pointer measurements.
///
/// Pointer outcomes only see the branch diagonal, so exact and reduced states
/// give the same table: `P(α_{i,s}, ψ_j) = δ_ij |c_i|² p_s`. The initial state
/// gives the product table `P(α_{0,s}, ψ_j) = p_s |c_j|²`.
pub fn pointer_information(state: &BranchState, base: LogBase) -> f64 {
    let model = state.model();
    let w = model.branch_probabilities();
    let p = model.weights();
    let mut mi = 0.0;
    match state.kind() {
        BranchKind::Initial => {}
        BranchKind::Exact | BranchKind::Reduced => {
            // each device outcome (i, s) has a single nonzero cell with column i
            for &wi in &w {
                for &ps in p {
                    let cell = wi * ps;
                    if cell > 0.0 {
                        // log(P / (r q)) with r = P, q = |c_i|²
                        mi += cell * base.log(1.0 / wi);
                    }
                }
            }
        }
    }
    mi.max(0.0)
}

/// A local measurement in a report: either a standard basis or an explicit one.
#[derive(Clone, Debug, PartialEq)]
pub enum LocalMeasurement {
    /// Computational basis of the given dimension (the pointer bases).
    Computational(usize),
    /// Projectors onto the columns of a unitary.
    Basis(CMatrix),
}

impl LocalMeasurement {
    pub fn dim(&self) -> usize {
        match self {
            LocalMeasurement::Computational(d) => *d,
            LocalMeasurement::Basis(b) => b.nrows(),
        }
    }

    pub fn to_povm(&self) -> Result<Povm> {
        match self {
            LocalMeasurement::Computational(d) => Povm::computational(*d),
            LocalMeasurement::Basis(b) => Povm::projective(b),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Closed-form pointer measurements; branch states only.
    PointerExact,
    /// Multi-start projective search.
    ProjectiveSearch,
    /// Best of both.
    Hybrid,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::PointerExact => "pointer-exact",
            Strategy::ProjectiveSearch => "projective-search",
            Strategy::Hybrid => "hybrid",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pointer-exact" => Ok(Strategy::PointerExact),
            "projective-search" => Ok(Strategy::ProjectiveSearch),
            "hybrid" => Ok(Strategy::Hybrid),
            other => Err(Error::InvalidInput(format!("unknown strategy `{other}`"))),
        }
    }
}

/// A bipartite state with or without pointer provenance.
#[derive(Clone, Copy, Debug)]
pub enum Bipartite<'a> {
    Dense(&'a DensityOperator),
    Branch(&'a BranchState),
}

impl<'a> From<&'a DensityOperator> for Bipartite<'a> {
    fn from(rho: &'a DensityOperator) -> Self {
        Bipartite::Dense(rho)
    }
}

impl<'a> From<&'a BranchState> for Bipartite<'a> {
    fn from(state: &'a BranchState) -> Self {
        Bipartite::Branch(state)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizerMeta {
    pub strategy: Strategy,
    /// Which route produced the reported value: `pointer` or `projective`.
    pub winner: &'static str,
    pub restarts: usize,
    pub iterations: usize,
    pub converged: bool,
    /// Hybrid on a branch state too large for dense search.
    pub projective_skipped: bool,
}

#[derive(Clone, Debug)]
pub struct CorrelationReport {
    /// `S(A:C)`, bits.
    pub mutual_entropy: f64,
    /// Lower bound on `I(A:C)`, bits.
    pub accessible_info: f64,
    /// `S(A:C) − I(A:C)`.
    pub gap: f64,
    /// Best measurements found, (first factor, second factor).
    pub measurements: (LocalMeasurement, LocalMeasurement),
    pub meta: OptimizerMeta,
}

impl CorrelationReport {
    pub fn satisfies_inequality(&self) -> bool {
        self.accessible_info <= self.mutual_entropy + INEQUALITY_SLACK
    }

    pub fn best_povms(&self) -> Result<(Povm, Povm)> {
        Ok((self.measurements.0.to_povm()?, self.measurements.1.to_povm()?))
    }
}

struct Candidate {
    value: f64,
    measurements: (LocalMeasurement, LocalMeasurement),
    winner: &'static str,
    restarts: usize,
    iterations: usize,
    converged: bool,
}

fn pointer_candidate(state: &BranchState) -> Candidate {
    let model = state.model();
    Candidate {
        value: pointer_information(state, LogBase::Two),
        measurements: (
            LocalMeasurement::Computational(model.object_dim()),
            LocalMeasurement::Computational(model.device_dim()),
        ),
        winner: "pointer",
        restarts: 0,
        iterations: 0,
        converged: true,
    }
}

fn projective_candidate(rho: &DensityOperator, opts: &SearchOptions) -> Result<Candidate> {
    let out = projective_search(rho, opts)?;
    Ok(Candidate {
        value: out.value,
        measurements: (LocalMeasurement::Basis(out.first_basis), LocalMeasurement::Basis(out.second_basis)),
        winner: "projective",
        restarts: opts.restarts,
        iterations: out.sweeps,
        converged: out.converged,
    })
}

fn searchable(state: &BranchState) -> bool {
    state.model().dense_dim() <= SEARCH_DIM_LIMIT
}

/// Lower bound on `I(A:C) = max H(E:F)` together with `S(A:C)`.
pub fn accessible_mutual_information<'a>(
    state: impl Into<Bipartite<'a>>,
    strategy: Strategy,
    opts: &SearchOptions,
) -> Result<CorrelationReport> {
    let state = state.into();
    let mutual = match state {
        Bipartite::Dense(rho) => mutual_entropy(rho)?,
        Bipartite::Branch(b) => branch_mutual_entropy(b, LogBase::Two)?,
    };

    let mut projective_skipped = false;
    let candidates: Vec<Candidate> = match (strategy, state) {
        (Strategy::PointerExact, Bipartite::Dense(_)) => return Err(Error::StrategyUnavailable("pointer-exact")),
        (Strategy::PointerExact, Bipartite::Branch(b)) => vec![pointer_candidate(b)],
        (Strategy::ProjectiveSearch, Bipartite::Dense(rho)) | (Strategy::Hybrid, Bipartite::Dense(rho)) => {
            vec![projective_candidate(rho, opts)?]
        }
        (Strategy::ProjectiveSearch, Bipartite::Branch(b)) => {
            if !searchable(b) {
                return Err(Error::DenseLimit { dim: b.model().dense_dim(), limit: SEARCH_DIM_LIMIT });
            }
            vec![projective_candidate(&b.to_dense()?, opts)?]
        }
        (Strategy::Hybrid, Bipartite::Branch(b)) => {
            let mut out = vec![pointer_candidate(b)];
            if searchable(b) {
                out.push(projective_candidate(&b.to_dense()?, opts)?);
            } else {
                projective_skipped = true;
            }
            out
        }
    };

    // strict improvement only, so the earlier route wins ties
    let mut best = 0;
    for (i, c) in candidates.iter().enumerate() {
        if c.value > candidates[best].value {
            best = i;
        }
    }
    let restarts = candidates.iter().map(|c| c.restarts).sum();
    let iterations = candidates.iter().map(|c| c.iterations).sum();
    let converged = candidates.iter().all(|c| c.converged);
    let winner = candidates.into_iter().nth(best).expect("non-empty");
    Ok(CorrelationReport {
        mutual_entropy: mutual,
        accessible_info: winner.value,
        gap: mutual - winner.value,
        measurements: winner.measurements,
        meta: OptimizerMeta {
            strategy,
            winner: winner.winner,
            restarts,
            iterations,
            converged,
            projective_skipped,
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub holds: bool,
    pub mutual_entropy: f64,
    pub accessible_info: f64,
    /// `S − I`; negative only if the inequality fails.
    pub slack: f64,
}

/// `I(A:C) ≤ S(A:C)`. Since `I` is a lower bound, a failure is a defect in the
/// computation, never optimizer noise.
pub fn verify_inequality<'a>(
    state: impl Into<Bipartite<'a>>,
    strategy: Strategy,
    opts: &SearchOptions,
) -> Result<InequalityCheck> {
    let report = accessible_mutual_information(state, strategy, opts)?;
    Ok(InequalityCheck {
        holds: report.satisfies_inequality(),
        mutual_entropy: report.mutual_entropy,
        accessible_info: report.accessible_info,
        slack: report.gap,
    })
}

/// `Δ = S(A:C) − I(A:C)`: zero in the decohered regime, positive when quantum
/// correlations are not reachable by local measurements.
pub fn macroscopicity_gap<'a>(
    state: impl Into<Bipartite<'a>>,
    strategy: Strategy,
    opts: &SearchOptions,
) -> Result<f64> {
    Ok(accessible_mutual_information(state, strategy, opts)?.gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{HilbertSpace, PureState};
    use crate::model::{apply_measurement, premeasurement_mixed};
    use crate::rng::{self, tags};
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn bell() -> DensityOperator {
        let space = HilbertSpace::new(&[("a", 2), ("c", 2)]).unwrap();
        let h = FRAC_1_SQRT_2;
        PureState::new(space, DVector::from_vec(vec![r(h), r(0.0), r(0.0), r(h)])).unwrap().to_density()
    }

    #[test]
    fn povm_validation() {
        assert!(Povm::new(vec![]).is_err());
        let half = CMatrix::identity(2, 2).unscale(2.0);
        assert!(Povm::new(vec![half.clone(), half.clone()]).is_ok());
        assert!(Povm::new(vec![half.clone()]).is_err());
        let neg = CMatrix::from_diagonal(&DVector::from_vec(vec![r(1.5), r(-0.5)]));
        let comp = CMatrix::from_diagonal(&DVector::from_vec(vec![r(-0.5), r(1.5)]));
        assert!(matches!(Povm::new(vec![neg, comp]), Err(Error::InvalidPovm(_))));
    }

    #[test]
    fn bell_shared_basis_gives_one_bit() {
        let z = Povm::computational(2).unwrap();
        assert_abs_diff_eq!(classical_mutual_information(&bell(), &z, &z).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mutual_entropy(&bell()).unwrap(), 2.0, epsilon = 1e-10);
        let table = joint_probabilities(&bell(), &z, &z).unwrap();
        assert_abs_diff_eq!(table[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(table[3], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn product_states_carry_nothing() {
        let mut g = rng::stream_rng(1, tags::STATES, 0);
        let a = DensityOperator::new(HilbertSpace::new(&[("a", 2)]).unwrap(), rng::random_density_matrix(2, 2, &mut g)).unwrap();
        let c = DensityOperator::new(HilbertSpace::new(&[("c", 3)]).unwrap(), rng::random_density_matrix(3, 3, &mut g)).unwrap();
        let rho = a.tensor(&c).unwrap();
        let e = Povm::projective(&rng::haar_unitary(2, &mut g)).unwrap();
        let f = Povm::projective(&rng::haar_unitary(3, &mut g)).unwrap();
        assert!(classical_mutual_information(&rho, &e, &f).unwrap() < 1e-10);
        assert!(mutual_entropy(&rho).unwrap() < 1e-10);
        let report = accessible_mutual_information(&rho, Strategy::Hybrid, &SearchOptions { restarts: 4, ..Default::default() }).unwrap();
        assert!(report.accessible_info < 1e-10 && report.gap.abs() < 1e-9);
    }

    #[test]
    fn relabeling_outcomes_is_harmless() {
        let mut g = rng::stream_rng(2, tags::STATES, 0);
        let space = HilbertSpace::new(&[("a", 3), ("c", 2)]).unwrap();
        let rho = DensityOperator::new(space, rng::random_density_matrix(6, 3, &mut g)).unwrap();
        let e = Povm::projective(&rng::haar_unitary(3, &mut g)).unwrap();
        let f = Povm::projective(&rng::haar_unitary(2, &mut g)).unwrap();
        let h0 = classical_mutual_information(&rho, &e, &f).unwrap();
        let h1 = classical_mutual_information(&rho, &e.permuted(&[2, 0, 1]).unwrap(), &f.permuted(&[1, 0]).unwrap()).unwrap();
        assert_abs_diff_eq!(h0, h1, epsilon = 1e-12);
    }

    #[test]
    fn pointer_povms_are_complete() {
        let model = PointerMeasurementModel::without_phases(vec![r(0.6), r(0.8)], vec![0.5, 0.5]).unwrap();
        let pp = pointer_povm(&model).unwrap();
        assert_eq!(pp.device.len(), 6);
        assert_eq!(pp.object.len(), 2);
        for povm in [&pp.device, &pp.object] {
            let d = povm.dim();
            let sum = povm.effects().iter().fold(CMatrix::zeros(d, d), |acc, e| acc + e);
            assert!((sum - CMatrix::identity(d, d)).iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn pointer_information_matches_dense_povm_evaluation() {
        let mut g = rng::stream_rng(4, tags::STATES, 0);
        let c = rng::random_amplitudes(3, &mut g);
        let p = rng::random_weights(3, &mut g);
        let model = PointerMeasurementModel::with_random_phases(c, p, &mut g).unwrap();
        let pp = pointer_povm(&model).unwrap();
        for state in [premeasurement_mixed(&model), apply_measurement(&model), apply_measurement(&model).reduce().unwrap()] {
            let dense = state.to_dense().unwrap();
            let h = classical_mutual_information(&dense, &pp.object, &pp.device).unwrap();
            assert_abs_diff_eq!(h, pointer_information(&state, LogBase::Two), epsilon = 1e-12);
            assert_abs_diff_eq!(branch_mutual_entropy(&state, LogBase::Two).unwrap(), mutual_entropy(&dense).unwrap(), epsilon = 1e-9);
        }
    }

    #[test]
    fn pointer_exact_needs_branch_provenance() {
        let err = accessible_mutual_information(&bell(), Strategy::PointerExact, &SearchOptions::default()).unwrap_err();
        assert_eq!(err, Error::StrategyUnavailable("pointer-exact"));
    }

    #[test]
    fn reduced_state_closes_the_gap() {
        let h = FRAC_1_SQRT_2;
        let model = PointerMeasurementModel::without_phases(vec![r(h), r(h)], rng::uniform_weights(16)).unwrap();
        let reduced = apply_measurement(&model).reduce().unwrap();
        let report = accessible_mutual_information(&reduced, Strategy::PointerExact, &SearchOptions::default()).unwrap();
        assert_abs_diff_eq!(report.mutual_entropy, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(report.accessible_info, 1.0, epsilon = 1e-12);
        assert!(report.gap.abs() < 1e-9);

        let exact = apply_measurement(&model);
        let gap = macroscopicity_gap(&exact, Strategy::PointerExact, &SearchOptions::default()).unwrap();
        assert_abs_diff_eq!(gap, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn single_outcome_has_no_gap() {
        let model = PointerMeasurementModel::without_phases(vec![r(1.0)], rng::uniform_weights(5)).unwrap();
        let exact = apply_measurement(&model);
        let report = accessible_mutual_information(&exact, Strategy::Hybrid, &SearchOptions { restarts: 2, ..Default::default() }).unwrap();
        assert_eq!(report.mutual_entropy, 0.0);
        assert!(report.accessible_info.abs() < 1e-12);
    }

    #[test]
    fn hybrid_skips_search_on_large_branch_states() {
        let model = PointerMeasurementModel::without_phases(vec![r(0.6), r(0.8)], rng::uniform_weights(1000)).unwrap();
        let exact = apply_measurement(&model);
        let report = accessible_mutual_information(&exact, Strategy::Hybrid, &SearchOptions::default()).unwrap();
        assert!(report.meta.projective_skipped);
        assert_eq!(report.meta.winner, "pointer");
        assert!(matches!(
            accessible_mutual_information(&exact, Strategy::ProjectiveSearch, &SearchOptions::default()),
            Err(Error::DenseLimit { .. })
        ));
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in [Strategy::PointerExact, Strategy::ProjectiveSearch, Strategy::Hybrid] {
            assert_eq!(s.as_str().parse::<Strategy>().unwrap(), s);
        }
        assert!("best".parse::<Strategy>().is_err());
    }
}
