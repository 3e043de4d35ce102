//! Named states used by the demos, the CLI and the tests.
//!
//! Spin states use the basis `(z-up, z-down)`. Particles with spin and a
//! position degree of freedom use the single-particle index `spin * n + x`
//! for `n` spatial cells.

use crate::density::Mixture;
use crate::linalg::{self, c, kron, CMat, CVec, C64};
use crate::state::{PureState, Sector, Tensor};
use crate::tol::Tolerances;

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn build(dims: Vec<usize>, entries: &[(&[usize], C64)], sector: Sector) -> PureState {
    let mut t = Tensor::zeros(dims).expect("valid dims");
    let mut data = t.data().clone();
    for (idx, z) in entries {
        data[t.flat_index(idx).expect("valid index")] += *z;
    }
    t = Tensor::new(t.dims().to_vec(), data).expect("same size");
    PureState::normalized(t, sector, &Tolerances::default()).expect("valid catalog state")
}

/// `(|↑↓> - |↓↑>)/√2` on two distinguishable spins.
pub fn singlet() -> PureState {
    build(vec![2, 2], &[(&[0, 1], c(H, 0.0)), (&[1, 0], c(-H, 0.0))], Sector::Distinguishable).with_label("singlet")
}

/// `(|↑↑↑> + |↓↓↓>)/√2`.
pub fn ghz3() -> PureState {
    build(vec![2, 2, 2], &[(&[0, 0, 0], c(H, 0.0)), (&[1, 1, 1], c(H, 0.0))], Sector::Distinguishable).with_label("ghz")
}

/// Operator on a spin ⊗ spatial single-particle space.
pub fn spin_times_spatial(spin: &CMat, spatial: &CMat) -> CMat {
    kron(spin, spatial)
}

/// Spin singlet with particle 1 in cell `R = 0` and particle 2 in cell `L = 1`.
pub fn spin_singlet_right_left(cells: usize) -> PureState {
    assert!(cells >= 2);
    let n = cells;
    build(vec![2 * n, 2 * n], &[(&[0, n + 1], c(H, 0.0)), (&[n, 1], c(-H, 0.0))], Sector::Distinguishable)
}

/// Spin singlet times `Σ_i c_i |i>|i>` on `coeffs.len()` spatial cells.
pub fn spin_singlet_spatially_entangled(coeffs: &[f64]) -> PureState {
    let n = coeffs.len();
    let mut entries: Vec<(Vec<usize>, C64)> = Vec::new();
    for (i, &ci) in coeffs.iter().enumerate() {
        entries.push((vec![i, n + i], c(H * ci, 0.0)));
        entries.push((vec![n + i, i], c(-H * ci, 0.0)));
    }
    let refs: Vec<(&[usize], C64)> = entries.iter().map(|(i, z)| (i.as_slice(), *z)).collect();
    build(vec![2 * n, 2 * n], &refs, Sector::Distinguishable)
}

/// `(|01> - |10>)/√2` as a fermion pair in dimension `d`.
pub fn fermion_pair(d: usize) -> PureState {
    build(vec![d, d], &[(&[0, 1], c(H, 0.0)), (&[1, 0], c(-H, 0.0))], Sector::Fermionic)
}

/// `(|↑↑>|ω_a> + (|↑↓> + |↓↑>)|ω_b>)/√3` with `ω_a = z↑`, `ω_b = z↓`:
/// outcome `a` on slot 3 leaves a product, outcome `b` an entangled pair.
pub fn outcome_dependent() -> PureState {
    let w = 1.0 / 3f64.sqrt();
    build(vec![2, 2, 2], &[(&[0, 0, 0], c(w, 0.0)), (&[0, 1, 1], c(w, 0.0)), (&[1, 0, 1], c(w, 0.0))], Sector::Distinguishable)
        .with_label("outcome-dependent")
}

/// Spin singlet times the symmetric spatial state `(|0 1> + |1 0>)/√2` on
/// `cells` cells, as a fermion pair.
pub fn singlet_times_symmetric_spatial(cells: usize) -> PureState {
    assert!(cells >= 2);
    let n = cells;
    let h2 = 0.5;
    let mut entries: Vec<(Vec<usize>, C64)> = Vec::new();
    for (s1, s2, sgn) in [(0usize, 1usize, 1.0), (1, 0, -1.0)] {
        for (x1, x2) in [(0usize, 1usize), (1, 0)] {
            entries.push((vec![s1 * n + x1, s2 * n + x2], c(sgn * h2, 0.0)));
        }
    }
    let refs: Vec<(&[usize], C64)> = entries.iter().map(|(i, z)| (i.as_slice(), *z)).collect();
    build(vec![2 * n, 2 * n], &refs, Sector::Fermionic)
}

/// Two ensembles with the same statistical operator: weights `(0.7, 0.3)` on
/// the orthogonal states `φ1 = |↑>|↑>`, `φ2 = |↓>|x+>`, and weights
/// `(0.4, 0.3, 0.3)` on `φ1` and `μ± = (φ1 ± φ2)/√2`.
pub fn equivalent_mixtures() -> (Mixture, Mixture) {
    let tol = Tolerances::default();
    let up = linalg::basis_vec(2, 0);
    let down = linalg::basis_vec(2, 1);
    let x_plus = (&up + &down) * c(H, 0.0);
    let phi1 = linalg::kron_vec(&up, &up);
    let phi2 = linalg::kron_vec(&down, &x_plus);
    let mk =
        |v: CVec| PureState::normalized(Tensor::new(vec![2, 2], v).expect("4 amplitudes"), Sector::Distinguishable, &tol).expect("nonzero");
    let mu_plus = (&phi1 + &phi2) * c(H, 0.0);
    let mu_minus = (&phi1 - &phi2) * c(H, 0.0);
    let (p1, p2) = (0.7, 0.3);
    (vec![(p1, mk(phi1.clone())), (p2, mk(phi2))], vec![(p1 - p2, mk(phi1)), (p2, mk(mu_plus)), (p2, mk(mu_minus))])
}

/// Spin states along `n` directions spread over the sphere, in antipodal
/// pairs (a Fibonacci lattice on the upper half and its reflection), each
/// with weight `1/n`. `n` must be even.
pub fn uniform_spin_ensemble(n: usize) -> Vec<(f64, PureState)> {
    assert!(n >= 2 && n.is_multiple_of(2), "need an even number of directions");
    let half = n / 2;
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let mut out = Vec::with_capacity(n);
    for i in 0..half {
        let z = 1.0 - (i as f64 + 0.5) / half as f64;
        let r = (1.0 - z * z).sqrt();
        let phi = golden * i as f64;
        for s in [1.0, -1.0] {
            let dir = [s * r * phi.cos(), s * r * phi.sin(), s * z];
            out.push((1.0 / n as f64, spin_up_along(dir)));
        }
    }
    out
}

/// The +1 eigenstate of `n·σ` for a unit vector `n`.
pub fn spin_up_along(n: [f64; 3]) -> PureState {
    let theta = n[2].clamp(-1.0, 1.0).acos();
    let phi = n[1].atan2(n[0]);
    let v = linalg::cvec(&[c((theta / 2.0).cos(), 0.0), C64::from_polar((theta / 2.0).sin(), phi)]);
    PureState::from_vector(&v).expect("unit vector")
}
