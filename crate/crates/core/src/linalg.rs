//! Dense complex linear algebra on labeled tensor-product spaces.
//!
//! Composite indices are row-major over the factor list: the leftmost label is
//! the most significant digit. With the object listed first this matches the
//! `|ψ_i⟩|α⟩` ket ordering used throughout the crate.
//!
//! Entropies are reported in bits unless a [`LogBase`] is passed explicitly.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use std::fmt;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Hermiticity, trace and positivity tolerance for density operators.
pub const STATE_TOL: f64 = 1e-10;
/// Normalization tolerance for pure states.
pub const NORM_TOL: f64 = 1e-12;
/// Eigenvalues below this are treated as exact zeros in entropy sums.
pub const ZERO_EIGENVALUE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertSpace {
    dims: Vec<usize>,
    labels: Vec<String>,
}

impl HilbertSpace {
    pub fn new<S: AsRef<str>>(factors: &[(S, usize)]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidDimension("a space needs at least one factor".into()));
        }
        let mut dims = Vec::with_capacity(factors.len());
        let mut labels: Vec<String> = Vec::with_capacity(factors.len());
        for (label, dim) in factors {
            let label = label.as_ref();
            if *dim == 0 {
                return Err(Error::InvalidDimension(format!("factor `{label}` has dimension 0")));
            }
            if labels.iter().any(|l| l == label) {
                return Err(Error::DuplicateLabel(label.to_string()));
            }
            dims.push(*dim);
            labels.push(label.to_string());
        }
        Ok(Self { dims, labels })
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn num_factors(&self) -> usize {
        self.dims.len()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn factor_dim(&self, label: &str) -> Result<usize> {
        Ok(self.dims[self.index_of(label)?])
    }

    /// Concatenates factor lists; labels must stay unique.
    pub fn product(&self, other: &HilbertSpace) -> Result<HilbertSpace> {
        let factors: Vec<(&str, usize)> = self
            .labels
            .iter()
            .zip(&self.dims)
            .chain(other.labels.iter().zip(&other.dims))
            .map(|(l, d)| (l.as_str(), *d))
            .collect();
        HilbertSpace::new(&factors)
    }

    fn subspace(&self, positions: &[usize]) -> HilbertSpace {
        HilbertSpace {
            dims: positions.iter().map(|&p| self.dims[p]).collect(),
            labels: positions.iter().map(|&p| self.labels[p].clone()).collect(),
        }
    }

    /// Stride of each factor in the composite index.
    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }
}

impl fmt::Display for HilbertSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.labels.iter().zip(&self.dims).map(|(l, d)| format!("{l}:{d}")).collect();
        write!(f, "[{}]", parts.join(" ⊗ "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Two,
    E,
}

impl LogBase {
    /// `-x log x` in this base, with `0 log 0 = 0`.
    pub fn eta(self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -x * self.log(x)
        }
    }

    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Two => x.log2(),
            LogBase::E => x.ln(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    space: HilbertSpace,
    amplitudes: CVector,
}

impl PureState {
    pub fn new(space: HilbertSpace, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), got: amplitudes.len() });
        }
        let norm_sq = amplitudes.norm_squared();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm_sq));
        }
        Ok(Self { space, amplitudes })
    }

    /// Rescales to unit norm; fails only on the zero vector.
    pub fn normalized(space: HilbertSpace, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm * norm));
        }
        Self::new(space, amplitudes.unscale(norm))
    }

    pub fn basis(space: HilbertSpace, index: usize) -> Result<Self> {
        let dim = space.dim();
        if index >= dim {
            return Err(Error::InvalidInput(format!("basis index {index} out of range for dimension {dim}")));
        }
        let mut amplitudes = CVector::zeros(dim);
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self { space, amplitudes })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let space = self.space.product(&other.space)?;
        let amplitudes = self.amplitudes.kronecker(&other.amplitudes);
        Ok(PureState { space, amplitudes })
    }

    pub fn to_density(&self) -> DensityOperator {
        let matrix = &self.amplitudes * self.amplitudes.adjoint();
        DensityOperator { space: self.space.clone(), matrix }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    space: HilbertSpace,
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(space: HilbertSpace, matrix: CMatrix) -> Result<Self> {
        let rho = Self::from_parts(space, matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Shape check only; for operators that are valid by construction.
    pub(crate) fn from_parts(space: HilbertSpace, matrix: CMatrix) -> Result<Self> {
        let dim = space.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: matrix.nrows().max(matrix.ncols()) });
        }
        Ok(Self { space, matrix })
    }

    pub fn maximally_mixed(space: HilbertSpace) -> Self {
        let dim = space.dim();
        let matrix = CMatrix::identity(dim, dim).unscale(dim as f64);
        Self { space, matrix }
    }

    /// Diagonal operator from a probability vector.
    pub fn diagonal(space: HilbertSpace, probs: &[f64]) -> Result<Self> {
        if probs.len() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), got: probs.len() });
        }
        let diag = CVector::from_iterator(probs.len(), probs.iter().map(|&p| C64::new(p, 0.0)));
        Self::new(space, CMatrix::from_diagonal(&diag))
    }

    pub fn validate(&self) -> Result<()> {
        let dev = hermitian_deviation(&self.matrix);
        if dev > STATE_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidTrace(tr));
        }
        let eig = eig_hermitian(&self.matrix)?;
        if let Some(&min) = eig.values.last() {
            if min < -STATE_TOL {
                return Err(Error::NotPositive(min));
            }
        }
        Ok(())
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        // tr ρ² = Σ |ρ_ij|² for Hermitian ρ
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        let space = self.space.product(&other.space)?;
        let matrix = self.matrix.kronecker(&other.matrix);
        Ok(DensityOperator { space, matrix })
    }

    /// `tr(ρ A)`; real part only, which is exact for Hermitian `A`.
    pub fn expectation(&self, observable: &CMatrix) -> Result<f64> {
        if observable.nrows() != self.dim() || observable.ncols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: observable.nrows() });
        }
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                acc += self.matrix[(i, j)] * observable[(j, i)];
            }
        }
        Ok(acc.re)
    }

    pub fn eigen(&self) -> Result<HermitianEigen> {
        eig_hermitian(&self.matrix)
    }

    /// Keeps the labeled factors, in their original order, and traces out the rest.
    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityOperator> {
        let mut keep_pos = Vec::with_capacity(keep.len());
        for label in keep {
            let pos = self.space.index_of(label.as_ref())?;
            if !keep_pos.contains(&pos) {
                keep_pos.push(pos);
            }
        }
        keep_pos.sort_unstable();
        if keep_pos.is_empty() {
            return Err(Error::InvalidInput("partial trace must keep at least one factor".into()));
        }
        let traced_pos: Vec<usize> =
            (0..self.space.num_factors()).filter(|p| !keep_pos.contains(p)).collect();

        let strides = self.space.strides();
        let kept_space = self.space.subspace(&keep_pos);
        let traced_space = self.space.subspace(&traced_pos);
        let kept_offsets = offsets(&kept_space, &keep_pos, &strides);
        let traced_offsets = if traced_pos.is_empty() {
            vec![0]
        } else {
            offsets(&traced_space, &traced_pos, &strides)
        };

        let n = kept_offsets.len();
        let mut out = CMatrix::zeros(n, n);
        for (r, &ro) in kept_offsets.iter().enumerate() {
            for (c, &co) in kept_offsets.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for &t in &traced_offsets {
                    acc += self.matrix[(ro + t, co + t)];
                }
                out[(r, c)] = acc;
            }
        }
        Ok(DensityOperator { space: kept_space, matrix: out })
    }

    /// Conjugation `U ρ U†` by a unitary on the full space.
    pub fn conjugate(&self, unitary: &CMatrix) -> Result<DensityOperator> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: unitary.nrows() });
        }
        let matrix = unitary * &self.matrix * unitary.adjoint();
        Ok(DensityOperator { space: self.space.clone(), matrix })
    }
}

/// Composite-index offsets contributed by the given factors, enumerated in
/// row-major order of `sub`.
fn offsets(sub: &HilbertSpace, positions: &[usize], strides: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(sub.dim());
    let mut digits = vec![0usize; positions.len()];
    for _ in 0..sub.dim() {
        out.push(digits.iter().zip(positions).map(|(d, &p)| d * strides[p]).sum());
        for k in (0..digits.len()).rev() {
            digits[k] += 1;
            if digits[k] < sub.dims[k] {
                break;
            }
            digits[k] = 0;
        }
    }
    out
}

pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Sorted descending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.values.len();
        let diag = CVector::from_iterator(n, self.values.iter().map(|&v| C64::new(v, 0.0)));
        &self.vectors * CMatrix::from_diagonal(&diag) * self.vectors.adjoint()
    }
}

pub fn eig_hermitian(m: &CMatrix) -> Result<HermitianEigen> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidDimension(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
    }
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let dev = hermitian_deviation(m);
    if dev > STATE_TOL * scale {
        return Err(Error::NotHermitian(dev));
    }
    let n = m.nrows();
    // symmetrize so the solver sees an exactly Hermitian input
    let sym = (m + m.adjoint()).unscale(2.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(HermitianEigen { values, vectors })
}

/// Entropy of a spectrum after clamping numerical drift.
///
/// Eigenvalues in `[-STATE_TOL, 0)` are clamped to zero; anything more negative
/// is rejected.
pub fn spectrum_entropy(values: &[f64], base: LogBase) -> Result<f64> {
    let mut s = 0.0;
    for &v in values {
        if v < -STATE_TOL {
            return Err(Error::NotPositive(v));
        }
        if v > ZERO_EIGENVALUE {
            s += base.eta(v);
        }
    }
    Ok(s.max(0.0))
}

pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<f64> {
    von_neumann_entropy_in(rho, LogBase::Two)
}

pub fn von_neumann_entropy_in(rho: &DensityOperator, base: LogBase) -> Result<f64> {
    spectrum_entropy(&rho.eigen()?.values, base)
}

pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    shannon_entropy_in(p, LogBase::Two)
}

/// Shannon entropy of a probability vector. Entries down to `-1e-12` are
/// clamped to zero and the vector is renormalized.
pub fn shannon_entropy_in(p: &[f64], base: LogBase) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution("empty probability vector".into()));
    }
    let mut sum = 0.0;
    for &x in p {
        if !x.is_finite() || x < -ZERO_EIGENVALUE {
            return Err(Error::InvalidDistribution(format!("entry {x} is not a probability")));
        }
        sum += x.max(0.0);
    }
    if (sum - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidDistribution(format!("entries sum to {sum}")));
    }
    Ok(p.iter().map(|&x| base.eta(x.max(0.0) / sum)).sum::<f64>().max(0.0))
}

/// `½ Σ |λ(ρ − σ)|`, clamped into `[0, 1]`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.space != sigma.space {
        return Err(Error::SpaceMismatch(rho.space.to_string(), sigma.space.to_string()));
    }
    let diff = &rho.matrix - &sigma.matrix;
    let eig = eig_hermitian(&diff)?;
    let d = 0.5 * eig.values.iter().map(|v| v.abs()).sum::<f64>();
    Ok(d.clamp(0.0, 1.0))
}

pub fn partial_trace<S: AsRef<str>>(rho: &DensityOperator, keep: &[S]) -> Result<DensityOperator> {
    rho.partial_trace(keep)
}

pub fn tensor(a: &DensityOperator, b: &DensityOperator) -> Result<DensityOperator> {
    a.tensor(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn qubit(label: &str) -> HilbertSpace {
        HilbertSpace::new(&[(label, 2)]).unwrap()
    }

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn space_rejects_bad_factors() {
        assert!(matches!(HilbertSpace::new(&[("a", 0)]), Err(Error::InvalidDimension(_))));
        assert!(matches!(HilbertSpace::new(&[("a", 2), ("a", 3)]), Err(Error::DuplicateLabel(_))));
        let s = HilbertSpace::new(&[("a", 2), ("b", 3), ("c", 4)]).unwrap();
        assert_eq!(s.dim(), 24);
        assert_eq!(s.strides(), vec![12, 4, 1]);
    }

    #[test]
    fn tensor_of_basis_kets() {
        let zero = PureState::basis(qubit("a"), 0).unwrap();
        let zero_b = PureState::basis(qubit("b"), 0).unwrap();
        let prod = zero.tensor(&zero_b).unwrap();
        assert_eq!(prod.amplitudes().as_slice(), &[c(1.0), c(0.0), c(0.0), c(0.0)]);
    }

    #[test]
    fn tensor_of_plus_and_one() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = PureState::new(qubit("a"), CVector::from_vec(vec![c(h), c(h)])).unwrap();
        let one = PureState::basis(qubit("b"), 1).unwrap();
        let prod = plus.tensor(&one).unwrap();
        let expected = [0.0, h, 0.0, h];
        for (z, e) in prod.amplitudes().iter().zip(expected) {
            assert_abs_diff_eq!(z.re, e, epsilon = 1e-15);
            assert_abs_diff_eq!(z.im, 0.0);
        }
    }

    #[test]
    fn product_marginal_is_the_factor() {
        let rho = DensityOperator::diagonal(qubit("a"), &[0.7, 0.3]).unwrap();
        let mixed = DensityOperator::maximally_mixed(HilbertSpace::new(&[("b", 3)]).unwrap());
        let joint = rho.tensor(&mixed).unwrap();
        let back = joint.partial_trace(&["a"]).unwrap();
        assert!(max_abs(&(back.matrix() - rho.matrix())) < 1e-15);
        let other = joint.partial_trace(&["b"]).unwrap();
        assert!(max_abs(&(other.matrix() - mixed.matrix())) < 1e-15);
    }

    #[test]
    fn bell_marginals_are_maximally_mixed() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let space = HilbertSpace::new(&[("a", 2), ("b", 2)]).unwrap();
        let bell = PureState::new(space, CVector::from_vec(vec![c(h), c(0.0), c(0.0), c(h)])).unwrap();
        let rho = bell.to_density();
        for label in ["a", "b"] {
            let m = rho.partial_trace(&[label]).unwrap();
            let half = CMatrix::identity(2, 2).unscale(2.0);
            assert!(max_abs(&(m.matrix() - half)) < 1e-15);
        }
    }

    #[test]
    fn partial_trace_rejects_unknown_label() {
        let rho = DensityOperator::maximally_mixed(qubit("a"));
        assert_eq!(rho.partial_trace(&["z"]).unwrap_err(), Error::UnknownLabel("z".into()));
    }

    #[test]
    fn partial_trace_middle_factor() {
        // ρ_a ⊗ ρ_b ⊗ ρ_c, keep a and c
        let a = DensityOperator::diagonal(qubit("a"), &[0.9, 0.1]).unwrap();
        let b = DensityOperator::maximally_mixed(HilbertSpace::new(&[("b", 3)]).unwrap());
        let cc = DensityOperator::diagonal(qubit("c"), &[0.25, 0.75]).unwrap();
        let joint = a.tensor(&b).unwrap().tensor(&cc).unwrap();
        let kept = joint.partial_trace(&["c", "a"]).unwrap();
        assert_eq!(kept.space().labels(), &["a".to_string(), "c".to_string()]);
        let expected = a.tensor(&cc).unwrap();
        assert!(max_abs(&(kept.matrix() - expected.matrix())) < 1e-15);
    }

    #[test]
    fn eig_of_diagonal_and_projector() {
        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.3), c(0.7)]));
        let e = eig_hermitian(&d).unwrap();
        assert_abs_diff_eq!(e.values[0], 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(e.values[1], 0.3, epsilon = 1e-15);

        let proj = CMatrix::from_row_slice(2, 2, &[c(0.5), c(0.5), c(0.5), c(0.5)]);
        let e = eig_hermitian(&proj).unwrap();
        assert_abs_diff_eq!(e.values[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], 0.0, epsilon = 1e-14);
        assert!(max_abs(&(e.reconstruct() - proj)) < 1e-9);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(0.0), c(1.0)]);
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn entropies_of_simple_states() {
        let pure = PureState::basis(qubit("a"), 1).unwrap().to_density();
        assert_abs_diff_eq!(von_neumann_entropy(&pure).unwrap(), 0.0, epsilon = 1e-12);
        let mixed = DensityOperator::maximally_mixed(qubit("a"));
        assert_abs_diff_eq!(von_neumann_entropy(&mixed).unwrap(), 1.0, epsilon = 1e-12);
        // -0.3 log2 0.3 - 0.7 log2 0.7
        let rho = DensityOperator::diagonal(qubit("a"), &[0.3, 0.7]).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&rho).unwrap(), 0.881_290_899_230_728, epsilon = 1e-6);
    }

    #[test]
    fn shannon_cases() {
        assert_eq!(shannon_entropy(&[1.0, 0.0]).unwrap(), 0.0);
        assert_abs_diff_eq!(shannon_entropy(&[0.25; 4]).unwrap(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(shannon_entropy(&[0.3, 0.7]).unwrap(), 0.881_290_899_230_728, epsilon = 1e-12);
        assert!(shannon_entropy(&[0.5, 0.49]).is_err());
        assert!(shannon_entropy(&[1.1, -0.1]).is_err());
        // tiny negative drift is clamped
        assert_abs_diff_eq!(shannon_entropy(&[1.0 + 1e-13, -1e-13]).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn entropy_rejects_clearly_negative_spectrum() {
        assert!(spectrum_entropy(&[1.0 + 1e-9, -1e-9], LogBase::Two).is_err());
        assert!(spectrum_entropy(&[1.0, -1e-11], LogBase::Two).is_ok());
    }

    #[test]
    fn trace_distance_cases() {
        let rho = DensityOperator::diagonal(qubit("a"), &[0.7, 0.3]).unwrap();
        let sigma = DensityOperator::maximally_mixed(qubit("a"));
        assert_abs_diff_eq!(trace_distance(&rho, &rho).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(trace_distance(&rho, &sigma).unwrap(), 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(trace_distance(&sigma, &rho).unwrap(), 0.2, epsilon = 1e-12);
        let zero = PureState::basis(qubit("a"), 0).unwrap().to_density();
        let one = PureState::basis(qubit("a"), 1).unwrap().to_density();
        assert_abs_diff_eq!(trace_distance(&zero, &one).unwrap(), 1.0, epsilon = 1e-12);
        let other = DensityOperator::maximally_mixed(qubit("b"));
        assert!(matches!(trace_distance(&rho, &other), Err(Error::SpaceMismatch(..))));
    }

    #[test]
    fn density_validation() {
        let s = qubit("a");
        let bad_trace = CMatrix::identity(2, 2);
        assert!(matches!(DensityOperator::new(s.clone(), bad_trace), Err(Error::InvalidTrace(_))));
        let not_psd = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.5), c(-0.5)]));
        assert!(matches!(DensityOperator::new(s.clone(), not_psd), Err(Error::NotPositive(_))));
        let not_herm = CMatrix::from_row_slice(2, 2, &[c(0.5), c(0.1), c(0.0), c(0.5)]);
        assert!(matches!(DensityOperator::new(s, not_herm), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn entropy_base_rescales() {
        let p = [0.1, 0.2, 0.3, 0.4];
        let bits = shannon_entropy_in(&p, LogBase::Two).unwrap();
        let nats = shannon_entropy_in(&p, LogBase::E).unwrap();
        assert_abs_diff_eq!(nats, bits * std::f64::consts::LN_2, epsilon = 1e-14);
    }
}
