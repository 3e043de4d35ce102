//! Expectation values of separable mixtures, the CHSH combination, a
//! deterministic optimizer for the quantum maximum, and ensemble equivalence.

use std::f64::consts::PI;

use crate::density::{ensemble_to_density, mixture, DensityOperator, SeparableEnsemble};
use crate::error::{invalid, Result};
use crate::identical2::pair_expect;
use crate::linalg::{self, bloch, expectation, hermiticity_residual, kron, max_abs, operator_norm, spin_along, CMat};
use crate::state::PureState;
use crate::tol::Tolerances;

/// Two observables per side, each Hermitian with spectrum in `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct ChshSettings {
    pub a: CMat,
    pub a2: CMat,
    pub b: CMat,
    pub b2: CMat,
}

impl ChshSettings {
    pub fn new(a: CMat, a2: CMat, b: CMat, b2: CMat, tol: &Tolerances) -> Result<Self> {
        for (m, name) in [(&a, "A"), (&a2, "A'"), (&b, "B"), (&b2, "B'")] {
            if !m.is_square() || hermiticity_residual(m) > tol.eq_tol * max_abs(m).max(1.0) {
                return invalid(format!("{name} is not Hermitian"));
            }
            let n = operator_norm(m);
            if n > 1.0 + tol.eq_tol {
                return invalid(format!("{name} has operator norm {n} > 1"));
            }
        }
        if a.shape() != a2.shape() || b.shape() != b2.shape() {
            return invalid("both observables of a side must act on the same space");
        }
        Ok(ChshSettings { a, a2, b, b2 })
    }

    /// Spin observables `n·σ` along four unit vectors.
    pub fn spins(a: [f64; 3], a2: [f64; 3], b: [f64; 3], b2: [f64; 3], tol: &Tolerances) -> Result<Self> {
        Self::new(spin_along(a), spin_along(a2), spin_along(b), spin_along(b2), tol)
    }

    fn dims(&self) -> (usize, usize) {
        (self.a.nrows(), self.b.nrows())
    }

    fn combine(&self, e: impl Fn(&CMat, &CMat) -> f64) -> f64 {
        e(&self.a, &self.b) + e(&self.a, &self.b2) + e(&self.a2, &self.b) - e(&self.a2, &self.b2)
    }
}

fn check_ensemble_dims(e: &SeparableEnsemble, a: &CMat, b: &CMat) -> Result<()> {
    let dims = e.factor_dims();
    if dims.len() != 2 {
        return invalid(format!("expected two factors per component, got {}", dims.len()));
    }
    if a.shape() != (dims[0], dims[0]) || b.shape() != (dims[1], dims[1]) {
        return invalid(format!("observables {:?}, {:?} do not match factor dimensions {dims:?}", a.shape(), b.shape()));
    }
    Ok(())
}

/// `Σ_j p_j <φ_j|A|φ_j> <θ_j|B|θ_j>`.
pub fn separable_expectation(e: &SeparableEnsemble, a: &CMat, b: &CMat) -> Result<f64> {
    check_ensemble_dims(e, a, b)?;
    Ok(e.entries().iter().map(|(p, f)| p * expectation(a, f[0].amps()) * expectation(b, f[1].amps())).sum())
}

/// What the CHSH combination is evaluated on.
#[derive(Debug, Clone, Copy)]
pub enum Source<'a> {
    State(&'a PureState),
    Ensemble(&'a SeparableEnsemble),
    /// Any statistical operator on the joint space.
    Density(&'a DensityOperator),
}

/// `S = <A⊗B> + <A⊗B'> + <A'⊗B> - <A'⊗B'>`.
pub fn chsh_value(src: Source<'_>, s: &ChshSettings) -> Result<f64> {
    let (da, db) = s.dims();
    match src {
        Source::State(psi) => {
            if psi.n_slots() != 2 || psi.dims() != [da, db] {
                return invalid(format!("state dims {:?} do not match settings ({da}, {db})", psi.dims()));
            }
            let coef = psi.tensor().matricize(&[0])?;
            Ok(s.combine(|a, b| pair_expect(&coef, a, b)))
        }
        Source::Ensemble(e) => {
            check_ensemble_dims(e, &s.a, &s.b)?;
            let mut total = 0.0;
            for (a, b, sign) in [(&s.a, &s.b, 1.0), (&s.a, &s.b2, 1.0), (&s.a2, &s.b, 1.0), (&s.a2, &s.b2, -1.0)] {
                total += sign * separable_expectation(e, a, b)?;
            }
            Ok(total)
        }
        Source::Density(rho) => {
            if rho.dim() != da * db {
                return invalid(format!("operator dimension {} does not match settings ({da}, {db})", rho.dim()));
            }
            let mut total = 0.0;
            for (a, b, sign) in [(&s.a, &s.b, 1.0), (&s.a, &s.b2, 1.0), (&s.a2, &s.b, 1.0), (&s.a2, &s.b2, -1.0)] {
                total += sign * rho.expect(&kron(a, b))?;
            }
            Ok(total)
        }
    }
}

/// `Tr[(A⊗B) ρ]` for the ensemble's statistical operator.
pub fn density_expectation(e: &SeparableEnsemble, a: &CMat, b: &CMat, tol: &Tolerances) -> Result<f64> {
    check_ensemble_dims(e, a, b)?;
    ensemble_to_density(e, tol)?.expect(&kron(a, b))
}

/// Best spin settings found for a two-qubit state.
#[derive(Debug, Clone)]
pub struct ChshOptimum {
    pub value: f64,
    /// Unit vectors for `A, A', B, B'`.
    pub directions: [[f64; 3]; 4],
    pub settings: ChshSettings,
}

const GRID_THETA: usize = 4;
const GRID_PHI: usize = 8;

fn grid_angles() -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0), (PI, 0.0)];
    for i in 1..GRID_THETA {
        for j in 0..GRID_PHI {
            out.push((PI * i as f64 / GRID_THETA as f64, 2.0 * PI * j as f64 / GRID_PHI as f64));
        }
    }
    out
}

/// Maximizes `|S|` over spin directions for a two-qubit state: exhaustive
/// search on a fixed grid of Bloch directions, then a Hooke-Jeeves pattern
/// search on the eight angles. Deterministic.
pub fn optimize_chsh(psi: &PureState, tol: &Tolerances) -> Result<ChshOptimum> {
    if psi.dims() != [2, 2] {
        return invalid(format!("expected a two-qubit state, got dims {:?}", psi.dims()));
    }
    let coef = psi.tensor().matricize(&[0])?;
    let corr = |ta: f64, pa: f64, tb: f64, pb: f64| pair_expect(&coef, &spin_along(bloch(ta, pa)), &spin_along(bloch(tb, pb)));
    let s_of = |x: &[f64; 8]| -> f64 {
        (corr(x[0], x[1], x[4], x[5]) + corr(x[0], x[1], x[6], x[7]) + corr(x[2], x[3], x[4], x[5]) - corr(x[2], x[3], x[6], x[7])).abs()
    };

    let grid = grid_angles();
    let g = grid.len();
    let mut table = vec![0.0; g * g];
    for (i, &(ta, pa)) in grid.iter().enumerate() {
        for (j, &(tb, pb)) in grid.iter().enumerate() {
            table[i * g + j] = corr(ta, pa, tb, pb);
        }
    }
    let mut best = (f64::NEG_INFINITY, [0usize; 4]);
    for a in 0..g {
        for a2 in 0..g {
            for b in 0..g {
                for b2 in 0..g {
                    let v = (table[a * g + b] + table[a * g + b2] + table[a2 * g + b] - table[a2 * g + b2]).abs();
                    if v > best.0 + 1e-12 {
                        best = (v, [a, a2, b, b2]);
                    }
                }
            }
        }
    }
    let mut x = [0.0; 8];
    for (k, &ix) in best.1.iter().enumerate() {
        x[2 * k] = grid[ix].0;
        x[2 * k + 1] = grid[ix].1;
    }

    let mut fx = s_of(&x);
    let mut step = PI / (2.0 * GRID_THETA as f64);
    while step > 1e-10 {
        let mut improved = false;
        for k in 0..8 {
            for dir in [1.0, -1.0] {
                let mut y = x;
                y[k] += dir * step;
                let fy = s_of(&y);
                if fy > fx + 1e-15 {
                    x = y;
                    fx = fy;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    let directions = [bloch(x[0], x[1]), bloch(x[2], x[3]), bloch(x[4], x[5]), bloch(x[6], x[7])];
    let settings = ChshSettings::spins(directions[0], directions[1], directions[2], directions[3], tol)?;
    let value = chsh_value(Source::State(psi), &settings)?;
    Ok(ChshOptimum { value, directions, settings })
}

/// Outcome of [`ensemble_equivalence`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equivalence {
    pub equivalent: bool,
    /// Largest entry-wise modulus of `ρ1 - ρ2`.
    pub max_difference: f64,
}

/// Two ensembles are equivalent when their statistical operators agree;
/// they then give identical predictions for every measurement.
pub fn ensemble_equivalence(e1: &[(f64, PureState)], e2: &[(f64, PureState)], threshold: f64, tol: &Tolerances) -> Result<Equivalence> {
    let r1 = mixture(e1, tol)?;
    let r2 = mixture(e2, tol)?;
    if r1.dim() != r2.dim() {
        return invalid(format!("ensembles act on dimensions {} and {}", r1.dim(), r2.dim()));
    }
    let max_difference = linalg::max_abs(&(r1.mat() - r2.mat()));
    Ok(Equivalence { equivalent: max_difference <= threshold, max_difference })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::density::SeparableEnsemble;
    use crate::linalg::{basis_vec, pauli_x, pauli_z};
    use crate::random;
    use proptest::prelude::*;

    fn t() -> Tolerances {
        Tolerances::default()
    }

    fn spin(i: usize) -> PureState {
        PureState::from_vector(&basis_vec(2, i)).unwrap()
    }

    #[test]
    fn product_and_mixture_expectations() {
        let e = SeparableEnsemble::new(vec![(1.0, vec![spin(0), spin(1)])], &t()).unwrap();
        assert!((separable_expectation(&e, &pauli_z(), &pauli_z()).unwrap() + 1.0).abs() < 1e-15);
        let e = SeparableEnsemble::new(vec![(0.5, vec![spin(0), spin(1)]), (0.5, vec![spin(1), spin(0)])], &t()).unwrap();
        assert!((separable_expectation(&e, &pauli_z(), &pauli_z()).unwrap() + 1.0).abs() < 1e-15);
        let b = random::hermitian(2, 4);
        let id = CMat::identity(2, 2);
        let marginal: f64 = e.entries().iter().map(|(p, f)| p * expectation(&b, f[1].amps())).sum();
        assert!((separable_expectation(&e, &id, &b).unwrap() - marginal).abs() < 1e-14);
        assert!(separable_expectation(&e, &CMat::identity(3, 3), &b).is_err());
    }

    #[test]
    fn settings_are_validated() {
        let big = pauli_z() * crate::linalg::c(1.5, 0.0);
        assert!(ChshSettings::new(big, pauli_z(), pauli_z(), pauli_z(), &t()).is_err());
        let nh = CMat::from_row_slice(2, 2, &[crate::linalg::ZERO, crate::linalg::ONE, crate::linalg::ZERO, crate::linalg::ZERO]);
        assert!(ChshSettings::new(nh, pauli_z(), pauli_z(), pauli_z(), &t()).is_err());
    }

    #[test]
    fn degenerate_settings_stay_within_two() {
        let s = ChshSettings::new(pauli_x(), pauli_x(), pauli_z(), pauli_z(), &t()).unwrap();
        let v = chsh_value(Source::State(&catalog::singlet()), &s).unwrap();
        assert!(v.abs() <= 2.0 + 1e-12);
    }

    #[test]
    fn singlet_reaches_tsirelson() {
        let opt = optimize_chsh(&catalog::singlet(), &t()).unwrap();
        assert!((opt.value.abs() - 2.0 * 2f64.sqrt()).abs() < 1e-6, "{}", opt.value);
    }

    #[test]
    fn product_state_optimum_is_classical() {
        let psi = crate::state::tensor_product(&spin(0), &spin(1)).unwrap();
        let opt = optimize_chsh(&psi, &t()).unwrap();
        assert!(opt.value.abs() <= 2.0 + 1e-9);
    }

    #[test]
    fn equivalent_mixtures_agree() {
        let (e1, e2) = catalog::equivalent_mixtures();
        let eq = ensemble_equivalence(&e1, &e2, 1e-12, &t()).unwrap();
        assert!(eq.equivalent && eq.max_difference <= 1e-12);
        let up = vec![(1.0, spin(0))];
        let x_up = vec![(1.0, catalog::spin_up_along([1.0, 0.0, 0.0]))];
        assert!(!ensemble_equivalence(&up, &x_up, 1e-9, &t()).unwrap().equivalent);
    }

    #[test]
    fn uniform_directions_are_unpolarized() {
        let uni = catalog::uniform_spin_ensemble(100);
        let half = vec![(0.5, spin(0)), (0.5, spin(1))];
        let eq = ensemble_equivalence(&uni, &half, 1e-3, &t()).unwrap();
        assert!(eq.equivalent, "{}", eq.max_difference);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn separable_mixtures_obey_the_bound(seed in any::<u64>(), d1 in 2usize..5, d2 in 2usize..5) {
            let mut rng = random::rng(seed);
            let e = random::separable_ensemble_with(8, d1, d2, &mut rng);
            for _ in 0..5 {
                let s = ChshSettings::new(
                    random::bounded_observable_with(d1, &mut rng),
                    random::bounded_observable_with(d1, &mut rng),
                    random::bounded_observable_with(d2, &mut rng),
                    random::bounded_observable_with(d2, &mut rng),
                    &t(),
                ).unwrap();
                let v = chsh_value(Source::Ensemble(&e), &s).unwrap();
                prop_assert!(v.abs() <= 2.0 + 1e-9);
                let rho = ensemble_to_density(&e, &t()).unwrap();
                prop_assert!((chsh_value(Source::Density(&rho), &s).unwrap() - v).abs() < 1e-9);
                prop_assert!((density_expectation(&e, &s.a, &s.b, &t()).unwrap() - separable_expectation(&e, &s.a, &s.b).unwrap()).abs() < 1e-9);
            }
        }

        #[test]
        fn equivalent_ensembles_share_chsh(seed in any::<u64>()) {
            let mut rng = random::rng(seed);
            let (e1, e2) = catalog::equivalent_mixtures();
            let r1 = mixture(&e1, &t()).unwrap();
            let r2 = mixture(&e2, &t()).unwrap();
            let s = ChshSettings::new(
                random::bounded_observable_with(2, &mut rng),
                random::bounded_observable_with(2, &mut rng),
                random::bounded_observable_with(2, &mut rng),
                random::bounded_observable_with(2, &mut rng),
                &t(),
            ).unwrap();
            let v1 = chsh_value(Source::Density(&r1), &s).unwrap();
            let v2 = chsh_value(Source::Density(&r2), &s).unwrap();
            prop_assert!((v1 - v2).abs() < 1e-12);
        }
    }
}
