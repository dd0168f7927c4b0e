//! Multi-start ascent of `H(E:F)` over local rank-1 projective measurements.
//!
//! A measurement on each factor is an orthonormal basis (columns of a unitary).
//! One sweep visits every pair of basis vectors on the first factor, then on
//! the second, and applies the Givens rotation
//!
//! ```text
//! u_k ← cos t · u_k + e^{iφ} sin t · u_l
//! u_l ← −e^{−iφ} sin t · u_k + cos t · u_l
//! ```
//!
//! that maximizes the mutual information of the outcome table. Rotating a pair
//! only touches two rows of the table and leaves the other side's marginals
//! fixed, so each `(t, φ)` trial costs `O(d_other)`. The two-angle subproblem
//! is solved by a coarse grid followed by a Nelder–Mead polish.
//!
//! Restart 0 starts from the computational bases on both factors; restart
//! `r ≥ 1` starts from Haar-random bases drawn from stream `(RESTART, r)`.
//! Restarts run in parallel and the best value wins, ties going to the lowest
//! restart index, so the outcome never depends on scheduling.

use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, DensityOperator, LogBase, C64};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::rng::{self, tags};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchOptions {
    pub restarts: usize,
    /// Cap on full sweeps per restart.
    pub max_sweeps: usize,
    /// A restart has converged when a sweep gains less than this (in bits).
    pub tol: f64,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { restarts: 32, max_sweeps: 500, tol: 1e-9, seed: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    /// Best `H(E:F)` found, in bits.
    pub value: f64,
    pub first_basis: CMatrix,
    pub second_basis: CMatrix,
    pub best_restart: usize,
    /// Sweeps summed over all restarts.
    pub sweeps: usize,
    /// Every restart met the tolerance before the sweep cap.
    pub converged: bool,
    /// Final value of each restart, in restart order.
    pub restart_values: Vec<f64>,
}

/// Outcome table `P[k][j] = ⟨u_k ⊗ v_j| ρ |u_k ⊗ v_j⟩`, row-major over `k`.
pub fn outcome_table(rho: &CMatrix, first: &CMatrix, second: &CMatrix) -> Vec<f64> {
    let (da, dc) = (first.ncols(), second.ncols());
    let mut table = vec![0.0; da * dc];
    for k in 0..da {
        for j in 0..dc {
            let w = first.column(k).kronecker(&second.column(j));
            let rw = rho * &w;
            table[k * dc + j] = w.dotc(&rw).re.max(0.0);
        }
    }
    table
}

/// Mutual information of a joint distribution given row-major, in `base`.
/// Zero cells contribute nothing.
pub fn table_mutual_information(table: &[f64], rows: usize, cols: usize, base: LogBase) -> f64 {
    let mut r = vec![0.0; rows];
    let mut q = vec![0.0; cols];
    for k in 0..rows {
        for j in 0..cols {
            let p = table[k * cols + j];
            r[k] += p;
            q[j] += p;
        }
    }
    let mut mi = 0.0;
    for k in 0..rows {
        for j in 0..cols {
            let p = table[k * cols + j];
            if p > 0.0 {
                mi += p * base.log(p / (r[k] * q[j]));
            }
        }
    }
    mi.max(0.0)
}

fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// `(U ⊗ V)† ρ (U ⊗ V)`, applying each factor separately.
fn to_product_basis(rho: &CMatrix, u: &CMatrix, v: &CMatrix) -> CMatrix {
    let (da, dc) = (u.nrows(), v.nrows());
    let n = da * dc;
    // columns: X = ρ (U ⊗ V)
    let mut tmp = CMatrix::zeros(n, n);
    for r in 0..n {
        for a in 0..da {
            for c2 in 0..dc {
                let mut acc = C64::new(0.0, 0.0);
                for d in 0..dc {
                    acc += rho[(r, a * dc + d)] * v[(d, c2)];
                }
                tmp[(r, a * dc + c2)] = acc;
            }
        }
    }
    let mut x = CMatrix::zeros(n, n);
    for r in 0..n {
        for a2 in 0..da {
            for c in 0..dc {
                let mut acc = C64::new(0.0, 0.0);
                for b in 0..da {
                    acc += tmp[(r, b * dc + c)] * u[(b, a2)];
                }
                x[(r, a2 * dc + c)] = acc;
            }
        }
    }
    // rows: (U ⊗ V)† X
    for col in 0..n {
        for a in 0..da {
            for c2 in 0..dc {
                let mut acc = C64::new(0.0, 0.0);
                for d in 0..dc {
                    acc += v[(d, c2)].conj() * x[(a * dc + d, col)];
                }
                tmp[(a * dc + c2, col)] = acc;
            }
        }
    }
    for col in 0..n {
        for a2 in 0..da {
            for c in 0..dc {
                let mut acc = C64::new(0.0, 0.0);
                for b in 0..da {
                    acc += u[(b, a2)].conj() * tmp[(b * dc + c, col)];
                }
                x[(a2 * dc + c, col)] = acc;
            }
        }
    }
    x
}

/// Restricted operators for optimizing one factor with the other held at
/// its current basis: `blocks[o][k][l] = R[(k, o), (l, o)]` in the product
/// basis (factor order as in `R`).
fn side_blocks(r: &CMatrix, da: usize, dc: usize, first_side: bool) -> Vec<CMatrix> {
    if first_side {
        (0..dc).map(|o| CMatrix::from_fn(da, da, |k, l| r[(k * dc + o, l * dc + o)])).collect()
    } else {
        (0..da).map(|o| CMatrix::from_fn(dc, dc, |k, l| r[(o * dc + k, o * dc + l)])).collect()
    }
}

/// Change of `Σ_o Σ_r η(P_or) − Σ_r η(Σ_o P_or)` when rows `k, l` of every
/// block are rotated by `(t, φ)`.
fn pair_objective(blocks: &[CMatrix], k: usize, l: usize, t: f64, phi: f64) -> f64 {
    let (s, c) = t.sin_cos();
    let e = C64::from_polar(2.0 * c * s, phi);
    let (cc, ss) = (c * c, s * s);
    let mut g = 0.0;
    let (mut rk, mut rl) = (0.0, 0.0);
    for b in blocks {
        let (x, y) = (b[(k, k)].re, b[(l, l)].re);
        let pk = (cc * x + ss * y + (e * b[(k, l)]).re).max(0.0);
        let pl = (x + y - pk).max(0.0);
        g += xlogx(pk) + xlogx(pl);
        rk += pk;
        rl += pl;
    }
    g - xlogx(rk) - xlogx(rl)
}

/// Rows `k` and `l` carry no weight in any block.
fn pair_is_empty(blocks: &[CMatrix], k: usize, l: usize) -> bool {
    const EMPTY: f64 = 1e-15;
    blocks.iter().all(|b| b[(k, k)].re.abs() < EMPTY && b[(l, l)].re.abs() < EMPTY)
}

/// `M ← G† M G` restricted to indices `k, l`.
fn apply_rotation(m: &mut CMatrix, k: usize, l: usize, t: f64, phi: f64) {
    let (s, c) = t.sin_cos();
    let e = C64::from_polar(1.0, phi);
    // columns: new_k = c·col_k + e·s·col_l, new_l = −ē·s·col_k + c·col_l
    for r in 0..m.nrows() {
        let (a, b) = (m[(r, k)], m[(r, l)]);
        m[(r, k)] = a * c + b * e * s;
        m[(r, l)] = -a * e.conj() * s + b * c;
    }
    // rows: new_k = c·row_k + ē·s·row_l, new_l = −e·s·row_k + c·row_l
    for col in 0..m.ncols() {
        let (a, b) = (m[(k, col)], m[(l, col)]);
        m[(k, col)] = a * c + b * e.conj() * s;
        m[(l, col)] = -a * e * s + b * c;
    }
}

fn rotate_basis(basis: &mut CMatrix, k: usize, l: usize, t: f64, phi: f64) {
    let (s, c) = t.sin_cos();
    let e = C64::from_polar(1.0, phi);
    for r in 0..basis.nrows() {
        let (a, b) = (basis[(r, k)], basis[(r, l)]);
        basis[(r, k)] = a * c + b * e * s;
        basis[(r, l)] = -a * e.conj() * s + b * c;
    }
}

const GRID_T: usize = 8;
const GRID_PHI: usize = 4;
const POLISH: NelderMeadOptions = NelderMeadOptions { max_iters: 40, f_tol: 1e-14, initial_step: 0.08 };

/// One pass over all basis pairs of one factor. Returns the gain in bits.
fn sweep_side(blocks: &mut [CMatrix], basis: &mut CMatrix) -> f64 {
    let d = basis.ncols();
    let mut gain = 0.0;
    for k in 0..d {
        for l in (k + 1)..d {
            if pair_is_empty(blocks, k, l) {
                continue;
            }
            let g0 = pair_objective(blocks, k, l, 0.0, 0.0);
            let mut best = (g0, 0.0, 0.0);
            let mut lowest = g0;
            for a in 0..GRID_T {
                let t = -PI / 2.0 + PI * a as f64 / GRID_T as f64;
                for b in 0..GRID_PHI {
                    let phi = PI * b as f64 / GRID_PHI as f64;
                    let g = pair_objective(blocks, k, l, t, phi);
                    if g > best.0 {
                        best = (g, t, phi);
                    }
                    lowest = lowest.min(g);
                }
            }
            if best.0 - lowest < 1e-14 {
                continue;
            }
            let polished = nelder_mead(|x| -pair_objective(blocks, k, l, x[0], x[1]), &[best.1, best.2], POLISH);
            if -polished.value > best.0 {
                best = (-polished.value, polished.x[0], polished.x[1]);
            }
            if best.0 > g0 + 1e-13 {
                for b in blocks.iter_mut() {
                    apply_rotation(b, k, l, best.1, best.2);
                }
                rotate_basis(basis, k, l, best.1, best.2);
                gain += best.0 - g0;
            }
        }
    }
    gain
}

struct Ascent {
    value: f64,
    first: CMatrix,
    second: CMatrix,
    sweeps: usize,
    converged: bool,
}

fn ascend(rho: &CMatrix, mut first: CMatrix, mut second: CMatrix, opts: &SearchOptions) -> Ascent {
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < opts.max_sweeps {
        sweeps += 1;
        let (da, dc) = (first.ncols(), second.ncols());
        let mut blocks = side_blocks(&to_product_basis(rho, &first, &second), da, dc, true);
        let mut gain = sweep_side(&mut blocks, &mut first);
        let mut blocks = side_blocks(&to_product_basis(rho, &first, &second), da, dc, false);
        gain += sweep_side(&mut blocks, &mut second);
        if gain < opts.tol {
            converged = true;
            break;
        }
    }
    let (da, dc) = (first.ncols(), second.ncols());
    let value = table_mutual_information(&outcome_table(rho, &first, &second), da, dc, LogBase::Two);
    Ascent { value, first, second, sweeps, converged }
}

/// Maximizes `H(E:F)` over rank-1 projective measurements on the two factors
/// of a bipartite state. The result is a lower bound on the accessible
/// information.
pub fn projective_search(rho: &DensityOperator, opts: &SearchOptions) -> Result<SearchOutcome> {
    let dims = rho.space().dims();
    if dims.len() != 2 {
        return Err(Error::InvalidInput(format!(
            "projective search needs a bipartite state, got {} factors",
            dims.len()
        )));
    }
    if opts.restarts == 0 {
        return Err(Error::InvalidInput("at least one restart is required".into()));
    }
    let (da, dc) = (dims[0], dims[1]);
    let m = rho.matrix();
    let runs: Vec<Ascent> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let (u, v) = if r == 0 {
                (CMatrix::identity(da, da), CMatrix::identity(dc, dc))
            } else {
                let mut g = rng::stream_rng(opts.seed, tags::RESTART, r as u32);
                (rng::haar_unitary(da, &mut g), rng::haar_unitary(dc, &mut g))
            };
            ascend(m, u, v, opts)
        })
        .collect();

    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.value > runs[best].value {
            best = i;
        }
    }
    let sweeps = runs.iter().map(|r| r.sweeps).sum();
    let converged = runs.iter().all(|r| r.converged);
    let restart_values = runs.iter().map(|r| r.value).collect();
    let winner = runs.into_iter().nth(best).expect("at least one restart");
    Ok(SearchOutcome {
        value: winner.value,
        first_basis: winner.first,
        second_basis: winner.second,
        best_restart: best,
        sweeps,
        converged,
        restart_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{HilbertSpace, PureState};
    use nalgebra::DVector;

    fn two_qubits() -> HilbertSpace {
        HilbertSpace::new(&[("a", 2), ("b", 2)]).unwrap()
    }

    #[test]
    fn rotation_update_matches_recomputation() {
        let mut g = rng::stream_rng(3, tags::STATES, 0);
        let rho = rng::random_density_matrix(6, 6, &mut g);
        let u = rng::haar_unitary(3, &mut g);
        let v = rng::haar_unitary(2, &mut g);
        let mut blocks = side_blocks(&to_product_basis(&rho, &u, &v), 3, 2, true);
        let mut rotated = u.clone();
        for b in blocks.iter_mut() {
            apply_rotation(b, 0, 2, 0.37, 1.1);
        }
        rotate_basis(&mut rotated, 0, 2, 0.37, 1.1);
        let fresh = side_blocks(&to_product_basis(&rho, &rotated, &v), 3, 2, true);
        for (a, b) in blocks.iter().zip(&fresh) {
            let err = (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err < 1e-13, "{err}");
        }
        let unitary_err = (rotated.adjoint() * &rotated - CMatrix::identity(3, 3)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(unitary_err < 1e-14);
    }

    #[test]
    fn factorized_transform_matches_kronecker() {
        let mut g = rng::stream_rng(5, tags::STATES, 0);
        let rho = rng::random_density_matrix(6, 6, &mut g);
        let u = rng::haar_unitary(2, &mut g);
        let v = rng::haar_unitary(3, &mut g);
        let w = u.kronecker(&v);
        let want: CMatrix = w.adjoint() * &rho * &w;
        let got = to_product_basis(&rho, &u, &v);
        assert!((got - &want).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-13);
        let second = side_blocks(&want, 2, 3, false);
        assert_eq!(second.len(), 2);
        assert_eq!(second[1][(2, 0)], want[(5, 3)]);
    }

    #[test]
    fn pair_objective_tracks_full_table() {
        let mut g = rng::stream_rng(4, tags::STATES, 0);
        let rho = rng::random_density_matrix(6, 3, &mut g);
        let u = rng::haar_unitary(3, &mut g);
        let v = rng::haar_unitary(2, &mut g);
        let blocks = side_blocks(&to_product_basis(&rho, &u, &v), 3, 2, true);
        let mi0 = table_mutual_information(&outcome_table(&rho, &u, &v), 3, 2, LogBase::Two);
        let mut rotated = u.clone();
        rotate_basis(&mut rotated, 1, 2, -0.8, 2.0);
        let mi1 = table_mutual_information(&outcome_table(&rho, &rotated, &v), 3, 2, LogBase::Two);
        let delta = pair_objective(&blocks, 1, 2, -0.8, 2.0) - pair_objective(&blocks, 1, 2, 0.0, 0.0);
        assert!((mi1 - mi0 - delta).abs() < 1e-12);
    }

    #[test]
    fn bell_state_reaches_one_bit() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let amps = DVector::from_vec(vec![C64::new(h, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(h, 0.0)]);
        let rho = PureState::new(two_qubits(), amps).unwrap().to_density();
        let out = projective_search(&rho, &SearchOptions { restarts: 4, ..Default::default() }).unwrap();
        assert!((out.value - 1.0).abs() < 1e-9, "{}", out.value);
        assert!(out.converged);
    }

    #[test]
    fn product_state_has_no_information() {
        let mut g = rng::stream_rng(8, tags::STATES, 0);
        let a = rng::random_density_matrix(2, 2, &mut g);
        let b = rng::random_density_matrix(3, 2, &mut g);
        let space = HilbertSpace::new(&[("a", 2), ("b", 3)]).unwrap();
        let rho = DensityOperator::new(space, a.kronecker(&b)).unwrap();
        let out = projective_search(&rho, &SearchOptions { restarts: 3, ..Default::default() }).unwrap();
        assert!(out.value < 1e-10);
    }

    #[test]
    fn search_is_deterministic() {
        let mut g = rng::stream_rng(12, tags::STATES, 0);
        let space = HilbertSpace::new(&[("a", 3), ("b", 3)]).unwrap();
        let rho = DensityOperator::new(space, rng::random_density_matrix(9, 2, &mut g)).unwrap();
        let opts = SearchOptions { restarts: 6, seed: 5, ..Default::default() };
        let a = projective_search(&rho, &opts).unwrap();
        let b = projective_search(&rho, &opts).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.best_restart, b.best_restart);
        assert_eq!(a.restart_values, b.restart_values);
    }
}
