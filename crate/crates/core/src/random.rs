//! Seeded random states, frames and observables for tests and demos.

use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::density::SeparableEnsemble;
use crate::fermions_n::{multisets, subsets};
use crate::linalg::{c, CMat, CVec};
use crate::permsym::{project, Symmetry};
use crate::state::{PureState, Sector, Tensor};
use crate::tol::Tolerances;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec<R: Rng>(d: usize, rng: &mut R) -> CVec {
    CVec::from_iterator(d, (0..d).map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal))))
}

pub fn unit_vec<R: Rng>(d: usize, rng: &mut R) -> CVec {
    gaussian_vec(d, rng).normalize()
}

/// Haar-random distinguishable state.
pub fn state_with<R: Rng>(dims: &[usize], rng: &mut R) -> PureState {
    let total = dims.iter().product();
    let t = Tensor::new(dims.to_vec(), gaussian_vec(total, rng)).expect("valid dims");
    PureState::normalized(t, Sector::Distinguishable, &Tolerances::default()).expect("nonzero")
}

pub fn state(dims: &[usize], seed: u64) -> PureState {
    state_with(dims, &mut rng(seed))
}

/// Haar-random unitary (QR of a Ginibre matrix with the R-diagonal phases removed).
pub fn unitary_with<R: Rng>(d: usize, rng: &mut R) -> CMat {
    let g = CMat::from_iterator(d, d, (0..d * d).map(|_| Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))));
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let z = r[(j, j)];
        let ph = if z.norm() > 0.0 { z / z.norm() } else { c(1.0, 0.0) };
        let col = q.column(j) * ph;
        q.set_column(j, &col);
    }
    q
}

pub fn unitary(d: usize, seed: u64) -> CMat {
    unitary_with(d, &mut rng(seed))
}

/// First `k` columns of a random unitary.
pub fn frame_with<R: Rng>(d: usize, k: usize, rng: &mut R) -> Vec<CVec> {
    let u = unitary_with(d, rng);
    (0..k).map(|j| u.column(j).into_owned()).collect()
}

pub fn hermitian_with<R: Rng>(d: usize, rng: &mut R) -> CMat {
    let g = CMat::from_iterator(d, d, (0..d * d).map(|_| Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))));
    (&g + g.adjoint()) * c(0.5, 0.0)
}

pub fn hermitian(d: usize, seed: u64) -> CMat {
    hermitian_with(d, &mut rng(seed))
}

/// Hermitian with spectrum in `[-1, 1]`: `U diag(±x) U†`.
pub fn bounded_observable_with<R: Rng>(d: usize, rng: &mut R) -> CMat {
    let u = unitary_with(d, rng);
    let diag = CMat::from_diagonal(&CVec::from_iterator(d, (0..d).map(|_| c(rng.random_range(-1.0..=1.0), 0.0))));
    &u * diag * u.adjoint()
}
/// Separable ensemble of `1..=max_components` random product states on `d1 x d2`.
pub fn separable_ensemble_with<R: Rng>(max_components: usize, d1: usize, d2: usize, rng: &mut R) -> SeparableEnsemble {
    let k = rng.random_range(1..=max_components.max(1));
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let entries = raw.iter().map(|w| (w / total, vec![state_with(&[d1], rng), state_with(&[d2], rng)])).collect();
    SeparableEnsemble::new(entries, &Tolerances::default()).expect("weights normalized")
}

/// Random identical-particle state on `n` slots whose one-particle support
/// lies in the span of `frame` (orthonormal): a random combination of
/// Slater states (fermions) or symmetrized products (bosons) of frame vectors.
pub fn group_state_with<R: Rng>(frame: &[CVec], n: usize, sector: Sector, rng: &mut R) -> PureState {
    let tol = Tolerances::default();
    let d = frame[0].len();
    let (picks, kind) = match sector {
        Sector::Fermionic => (subsets(frame.len(), n), Symmetry::Antisymmetrize),
        Sector::Bosonic => (multisets(frame.len(), n), Symmetry::Symmetrize),
        Sector::Distinguishable => panic!("group states are fermionic or bosonic"),
    };
    assert!(!picks.is_empty(), "frame too small for {n} fermions");
    let mut t = Tensor::zeros(vec![d; n]).expect("small dims");
    for ix in picks {
        let mut prod = Tensor::new(vec![d], frame[ix[0]].clone()).expect("vector");
        for &i in &ix[1..] {
            prod = prod.tensor(&Tensor::new(vec![d], frame[i].clone()).expect("vector")).expect("small dims");
        }
        let z = Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        t = t.add(&project(&prod, kind).expect("equal dims").scaled(z)).expect("same dims");
    }
    PureState::normalized(t, sector, &tol).expect("nonzero combination")
}
