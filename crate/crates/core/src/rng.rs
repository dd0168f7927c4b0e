//! Seeded randomness.
//!
//! Every random quantity in the crate comes from ChaCha8 (`rand_chacha`).
//! A run seed `s` is split into independent streams: stream `(tag, index)` is
//! `ChaCha8Rng::seed_from_u64(s)` with `set_stream((tag << 32) | index)`.
//! Tags separate purposes (phase draws, search restarts, trials) so that
//! adding draws of one kind never shifts another, and parallel workers that
//! own distinct indices reproduce the sequential result exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::TAU;

use crate::linalg::{CMatrix, CVector, C64};

pub type Rng64 = ChaCha8Rng;

pub mod tags {
    pub const PHASES: u32 = 1;
    pub const WEIGHTS: u32 = 2;
    pub const AMPLITUDES: u32 = 3;
    pub const RESTART: u32 = 4;
    pub const TRIAL: u32 = 5;
    pub const ENERGIES: u32 = 6;
    pub const STATES: u32 = 7;
}

pub fn stream_rng(seed: u64, tag: u32, index: u32) -> Rng64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((tag as u64) << 32) | index as u64);
    rng
}

/// Derives a child seed, for handing a whole seeded sub-computation to a callee.
pub fn derive_seed(seed: u64, tag: u32, index: u32) -> u64 {
    stream_rng(seed, tag, index).random()
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random unitary: Gram–Schmidt on a complex Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| complex_normal(rng));
    gram_schmidt(&g)
}

/// Orthonormalizes columns in order. Columns must be linearly independent.
pub fn gram_schmidt(m: &CMatrix) -> CMatrix {
    let mut q = m.clone();
    for k in 0..q.ncols() {
        for _ in 0..2 {
            for j in 0..k {
                let proj = q.column(j).dotc(&q.column(k));
                let qj = q.column(j).clone_owned();
                let mut col = q.column_mut(k);
                col -= qj * proj;
            }
        }
        let norm = q.column(k).norm();
        q.column_mut(k).unscale_mut(norm);
    }
    q
}

pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    let v = CVector::from_fn(dim, |_, _| complex_normal(rng));
    let n = v.norm();
    v.unscale(n)
}

/// Random density matrix `G G† / tr(G G†)` with `G` a `dim × rank` Ginibre matrix.
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, rank.max(1), |_, _| complex_normal(rng));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    m.unscale(tr)
}

/// `rows × cols` table of i.i.d. phases uniform on `[0, 2π)`.
pub fn uniform_phases<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Vec<Vec<f64>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| rng.random::<f64>() * TAU).collect())
        .collect()
}

pub fn uniform_weights(m: usize) -> Vec<f64> {
    vec![1.0 / m as f64; m]
}

/// Flat-Dirichlet weights (normalized exponential draws).
pub fn random_weights<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..m).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / sum).collect()
}

/// Random normalized amplitude vector of length `k` (Haar on the unit sphere).
pub fn random_amplitudes<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<C64> {
    random_pure_state(k, rng).iter().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| stream_rng(7, tags::PHASES, 3).random()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let x: u64 = stream_rng(7, tags::PHASES, 3).random();
        let y: u64 = stream_rng(7, tags::PHASES, 4).random();
        let z: u64 = stream_rng(7, tags::WEIGHTS, 3).random();
        assert_ne!(x, y);
        assert_ne!(x, z);
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = stream_rng(1, tags::STATES, 0);
        for d in 1..6 {
            let u = haar_unitary(d, &mut rng);
            let err = (u.adjoint() * &u - CMatrix::identity(d, d)).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err < 1e-12, "d = {d}: {err}");
        }
    }

    #[test]
    fn weights_are_distributions() {
        let mut rng = stream_rng(2, tags::WEIGHTS, 0);
        let w = random_weights(50, &mut rng);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(w.iter().all(|&x| x > 0.0));
        let rho = random_density_matrix(4, 2, &mut rng);
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
    }
}
