//! Projective measurements with collapse, and the demonstrations where the
//! entanglement left behind depends on which observable is measured or on
//! which outcome occurs.

use std::fmt;
use std::str::FromStr;

use crate::catalog;
use crate::distinguishable::{classify, schmidt_decompose, Cut, EntanglementClass, Kind};
use crate::error::{invalid, Error, Result};
use crate::linalg::{self, c, pauli_x, pauli_y, pauli_z, CMat, CVec};
use crate::permsym::{binomial, permutations};
use crate::state::{PureState, Sector, Tensor};
use crate::tol::{Tolerances, GRAY};

/// One outcome of a projective measurement.
#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    pub label: String,
    /// Eigenvalue of the measured observable.
    pub value: f64,
    pub probability: f64,
    pub collapsed: PureState,
}

/// Eigenvalue as a label: signed integer when integral, otherwise 12 significant digits.
pub fn value_label(v: f64) -> String {
    if (v - v.round()).abs() < 1e-9 {
        let r = v.round() as i64;
        if r > 0 {
            format!("+{r}")
        } else {
            format!("{r}")
        }
    } else {
        format!("{v:.11e}")
    }
}

/// Distinct eigenvalues (descending) with their spectral projectors.
pub fn spectral_projectors(obs: &CMat, tol: &Tolerances) -> Result<Vec<(f64, CMat)>> {
    let sp = linalg::hermitian_eigen(obs, tol)?;
    let d = obs.nrows();
    let mut out: Vec<(f64, CMat)> = Vec::new();
    for (l, v) in sp.values.iter().zip(&sp.vectors) {
        let p = linalg::projector(v);
        match out.last_mut() {
            Some((lv, pm)) if (*lv - l).abs() <= tol.eq_tol * GRAY * lv.abs().max(1.0) => *pm += p,
            _ => out.push((*l, p)),
        }
    }
    if out.is_empty() {
        return invalid(format!("empty observable of dimension {d}"));
    }
    Ok(out)
}

fn collapse_all(psi: &PureState, branches: Vec<(String, f64, Tensor)>, tol: &Tolerances) -> Result<Vec<MeasurementOutcome>> {
    let total: f64 = branches.iter().map(|b| b.2.norm().powi(2)).sum();
    if (total - 1.0).abs() > tol.eq_tol * GRAY {
        return Err(Error::Inconsistency(format!("outcome probabilities sum to {total}")));
    }
    let mut out = Vec::new();
    for (label, value, t) in branches {
        let probability = t.norm().powi(2);
        if probability <= tol.eq_tol {
            continue;
        }
        let collapsed = PureState::normalized(t, psi.sector(), tol)?;
        out.push(MeasurementOutcome { label, value, probability, collapsed });
    }
    Ok(out)
}

/// Measures a single-slot observable on `slot` of a distinguishable-particle
/// state. Zero-probability outcomes are omitted.
pub fn measure(psi: &PureState, slot: usize, observable: &CMat, tol: &Tolerances) -> Result<Vec<MeasurementOutcome>> {
    if psi.sector() != Sector::Distinguishable {
        return invalid("slot-labeled measurements are meaningless for identical particles; use an exchange-symmetric operator");
    }
    if slot >= psi.n_slots() {
        return invalid(format!("slot {} out of range for {} slots", slot + 1, psi.n_slots()));
    }
    let d = psi.dims()[slot];
    if observable.shape() != (d, d) {
        return invalid(format!("observable is {:?} but slot {} has dimension {d}", observable.shape(), slot + 1));
    }
    let branches = spectral_projectors(observable, tol)?
        .into_iter()
        .map(|(v, p)| Ok((value_label(v), v, psi.tensor().apply_on_slot(slot, &p)?)))
        .collect::<Result<Vec<_>>>()?;
    collapse_all(psi, branches, tol)
}

fn permutation_matrix(dims: &[usize], order: &[usize]) -> Result<CMat> {
    let total: usize = dims.iter().product();
    let mut m = CMat::zeros(total, total);
    for flat in 0..total {
        let t = Tensor::basis(dims.to_vec(), &Tensor::zeros(dims.to_vec())?.multi_index(flat))?;
        let moved = t.permute_slots(order)?;
        let (to, _) = moved.data().iter().enumerate().find(|(_, z)| z.norm() > 0.5).expect("basis vector");
        m[(to, flat)] = c(1.0, 0.0);
    }
    Ok(m)
}

const MAX_SYMMETRIC_DIM: usize = 1024;

/// Measures an exchange-symmetric observable on the whole space of an
/// identical-particle state. The collapsed states keep the sector.
pub fn measure_symmetric(psi: &PureState, observable: &CMat, tol: &Tolerances) -> Result<Vec<MeasurementOutcome>> {
    let total = psi.amps().len();
    if observable.shape() != (total, total) {
        return invalid(format!("observable is {:?} but the state space has dimension {total}", observable.shape()));
    }
    if total > MAX_SYMMETRIC_DIM {
        return invalid(format!("full-space observables are limited to dimension {MAX_SYMMETRIC_DIM}"));
    }
    let n = psi.n_slots();
    for k in 0..n.saturating_sub(1) {
        let mut order: Vec<usize> = (0..n).collect();
        order.swap(k, k + 1);
        let s = permutation_matrix(psi.dims(), &order)?;
        let r = linalg::max_abs(&(&s * observable - observable * &s));
        if r > tol.eq_tol * linalg::max_abs(observable).max(1.0) {
            return invalid(format!("observable does not commute with exchanging slots {} and {} (residual {r:e})", k + 1, k + 2));
        }
    }
    let branches = spectral_projectors(observable, tol)?
        .into_iter()
        .map(|(v, p)| Ok((value_label(v), v, Tensor::new(psi.dims().to_vec(), &p * psi.amps())?)))
        .collect::<Result<Vec<_>>>()?;
    collapse_all(psi, branches, tol)
}

/// Counts how many particles have property `p`: outcome `k` projects onto
/// states with exactly `k` particles in the range of `p`. Exchange-symmetric
/// for any number of slots, so it applies to every sector.
pub fn counting_measurement(psi: &PureState, p: &CMat, tol: &Tolerances) -> Result<Vec<MeasurementOutcome>> {
    let n = psi.n_slots();
    let d = psi.one_particle_dim().ok_or_else(|| Error::InvalidInput("counting needs equal slot dimensions".into()))?;
    if p.shape() != (d, d) || !linalg::is_projector(p, tol) {
        return invalid(format!("property must be a {d}x{d} orthogonal projector"));
    }
    let q = CMat::identity(d, d) - p;
    let mut branches = Vec::new();
    for k in (0..=n).rev() {
        let mut acc = Tensor::zeros(psi.dims().to_vec())?;
        let mut count = 0usize;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != k {
                continue;
            }
            count += 1;
            let mut t = psi.tensor().clone();
            for slot in 0..n {
                t = t.apply_on_slot(slot, if mask >> slot & 1 == 1 { p } else { &q })?;
            }
            acc = acc.add(&t)?;
        }
        debug_assert_eq!(count as f64, binomial(n, k));
        branches.push((format!("count={k}"), k as f64, acc));
    }
    collapse_all(psi, branches, tol)
}

/// Spin component measured in the demos.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinAxis {
    X,
    Y,
    Z,
}

impl SpinAxis {
    pub fn operator(self) -> CMat {
        match self {
            SpinAxis::X => pauli_x(),
            SpinAxis::Y => pauli_y(),
            SpinAxis::Z => pauli_z(),
        }
    }
}

impl FromStr for SpinAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "x" => Ok(SpinAxis::X),
            "y" => Ok(SpinAxis::Y),
            "z" => Ok(SpinAxis::Z),
            _ => Err(Error::Parse { field: "measure".into(), msg: format!("expected x, y or z, got `{s}`") }),
        }
    }
}

impl fmt::Display for SpinAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpinAxis::X => "x",
            SpinAxis::Y => "y",
            SpinAxis::Z => "z",
        })
    }
}

/// What is left on the unmeasured slots after one outcome.
#[derive(Debug, Clone)]
pub struct Remainder {
    pub label: String,
    pub probability: f64,
    pub state: PureState,
    pub schmidt_rank: usize,
    pub class: Option<EntanglementClass>,
}

impl Remainder {
    pub fn is_product(&self) -> bool {
        self.schmidt_rank == 1
    }
}

/// Measures `observable` on `slot` and, for each rank-1 outcome, strips the
/// measured slot off the collapsed state. Remainders with two or more slots
/// are classified across their first slot.
pub fn measure_and_reduce(psi: &PureState, slot: usize, observable: &CMat, tol: &Tolerances) -> Result<Vec<Remainder>> {
    let n = psi.n_slots();
    if n < 2 {
        return invalid("need at least two slots to leave a remainder");
    }
    let projectors = spectral_projectors(observable, tol)?;
    let outcomes = measure(psi, slot, observable, tol)?;
    let mut out = Vec::new();
    for o in outcomes {
        let p = &projectors.iter().find(|(v, _)| value_label(*v) == o.label).expect("outcome from this spectrum").1;
        if linalg::projector_rank(p) != 1 {
            return invalid(format!("outcome {} is degenerate; the remainder is not a pure state", o.label));
        }
        let sp = linalg::hermitian_eigen(p, tol)?;
        let v: &CVec = &sp.vectors[0];
        let mut order: Vec<usize> = (0..n).filter(|&k| k != slot).collect();
        order.push(slot);
        let moved = o.collapsed.tensor().permute_slots(&order)?;
        let rows: Vec<usize> = (0..n - 1).collect();
        let rest = moved.matricize(&rows)? * v.map(|z| z.conj());
        let dims: Vec<usize> = order[..n - 1].iter().map(|&k| psi.dims()[k]).collect();
        let state = PureState::normalized(Tensor::new(dims, rest)?, Sector::Distinguishable, tol)?;
        let (schmidt_rank, class) = if n > 2 {
            let cut = Cut::first(1, n - 1)?;
            (schmidt_decompose(&state, &cut, tol)?.rank, Some(classify(&state, &cut, tol)?))
        } else {
            (1, None)
        };
        out.push(Remainder { label: o.label, probability: o.probability, state, schmidt_rank, class });
    }
    Ok(out)
}

/// Three spins in `(|↑↑↑> + |↓↓↓>)/√2`; the third is measured along `axis`.
pub fn ghz_demo(axis: SpinAxis, tol: &Tolerances) -> Result<Vec<Remainder>> {
    measure_and_reduce(&catalog::ghz3(), 2, &axis.operator(), tol)
}

/// The third spin of `(|↑↑>|ω_a> + (|↑↓> + |↓↑>)|ω_b>)/√3` is measured
/// along z. Outcome `a` leaves a product, outcome `b` an entangled pair.
pub fn outcome_dependent_entanglement_demo(tol: &Tolerances) -> Result<Vec<Remainder>> {
    let mut out = measure_and_reduce(&catalog::outcome_dependent(), 2, &pauli_z(), tol)?;
    for r in &mut out {
        r.label = if r.label == "+1" { "a".into() } else { "b".into() };
        let expect_product = r.label == "a";
        let kind = r.class.expect("two-slot remainder").kind;
        if (kind == Kind::NonEntangled) != expect_product {
            return Err(Error::Inconsistency(format!("outcome {} left a {kind} pair", r.label)));
        }
    }
    Ok(out)
}

/// Whether every permutation of the slots leaves `t` invariant up to the sector sign.
pub fn keeps_sector(t: &Tensor, sector: Sector, tol: &Tolerances) -> Result<bool> {
    let sign = match sector {
        Sector::Distinguishable => return Ok(true),
        Sector::Fermionic => -1.0,
        Sector::Bosonic => 1.0,
    };
    for (perm, odd) in permutations(t.n_slots()) {
        let moved = t.permute_slots(&perm)?;
        let s = if odd { sign } else { 1.0 };
        let r = (moved.data() - t.data() * c(s, 0.0)).norm();
        if r > tol.eq_tol * GRAY {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identical2::e_projector;
    use crate::linalg::{basis_vec, kron, projector};
    use crate::random;
    use proptest::prelude::*;

    fn t() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn singlet_z_on_first_slot() {
        let out = measure(&catalog::singlet(), 0, &pauli_z(), &t()).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!((out[0].label.as_str(), out[1].label.as_str()), ("+1", "-1"));
        for (o, idx) in out.iter().zip([[0, 1], [1, 0]]) {
            assert!((o.probability - 0.5).abs() < 1e-14);
            assert!((o.collapsed.amp(&idx).unwrap().norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn ghz_z_leaves_products_x_leaves_entangled_pairs() {
        let z = ghz_demo(SpinAxis::Z, &t()).unwrap();
        assert_eq!(z.len(), 2);
        assert!(z.iter().all(|r| r.is_product() && (r.probability - 0.5).abs() < 1e-14));
        assert!((z[0].state.amp(&[0, 0]).unwrap().norm() - 1.0).abs() < 1e-14);
        for axis in [SpinAxis::X, SpinAxis::Y] {
            let x = ghz_demo(axis, &t()).unwrap();
            assert_eq!(x.len(), 2);
            for r in &x {
                assert_eq!(r.schmidt_rank, 2);
                assert_eq!(r.class.unwrap().kind, Kind::TotallyEntangled);
                let h = std::f64::consts::FRAC_1_SQRT_2;
                assert!((r.state.amp(&[0, 0]).unwrap().norm() - h).abs() < 1e-14);
                assert!((r.state.amp(&[1, 1]).unwrap().norm() - h).abs() < 1e-14);
            }
        }
        let x = ghz_demo(SpinAxis::X, &t()).unwrap();
        let rel = |r: &Remainder| r.state.amp(&[1, 1]).unwrap() / r.state.amp(&[0, 0]).unwrap();
        assert!((rel(&x[0]) - c(1.0, 0.0)).norm() < 1e-14);
        assert!((rel(&x[1]) - c(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn outcome_dependence() {
        let out = outcome_dependent_entanglement_demo(&t()).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].label, "a");
        assert!((out[0].probability - 1.0 / 3.0).abs() < 1e-14 && out[0].schmidt_rank == 1);
        assert!((out[1].probability - 2.0 / 3.0).abs() < 1e-14 && out[1].schmidt_rank == 2);
    }

    #[test]
    fn identical_particles_need_symmetric_operators() {
        let pair = catalog::fermion_pair(3);
        assert!(measure(&pair, 0, &pauli_z(), &t()).is_err());
        let one_side = kron(&projector(&basis_vec(3, 0)), &CMat::identity(3, 3));
        assert!(measure_symmetric(&pair, &one_side, &t()).is_err());
        let e = e_projector(&projector(&basis_vec(3, 0)), &t()).unwrap();
        let out = measure_symmetric(&pair, &e, &t()).unwrap();
        assert_eq!(out.len(), 1);
        assert!((out[0].probability - 1.0).abs() < 1e-14 && out[0].value == 1.0);
        assert!(measure(&pair, 0, &CMat::from_fn(3, 3, |i, j| c((i + 2 * j) as f64, 0.0)), &t()).is_err());
    }

    #[test]
    fn non_hermitian_observable_rejected() {
        let bad = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(measure(&catalog::singlet(), 0, &bad, &t()), Err(Error::InvalidInput(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn probabilities_are_projector_expectations(seed in any::<u64>(), d in 2usize..4) {
            let mut rng = random::rng(seed);
            let psi = random::state_with(&[d, d, 2], &mut rng);
            let obs = random::hermitian_with(d, &mut rng);
            let out = measure(&psi, 1, &obs, &t()).unwrap();
            let total: f64 = out.iter().map(|o| o.probability).sum();
            prop_assert!((total - 1.0).abs() < 1e-10);
            for (v, p) in spectral_projectors(&obs, &t()).unwrap() {
                let full = kron(&kron(&CMat::identity(d, d), &p), &CMat::identity(2, 2));
                let want = linalg::expectation(&full, psi.amps());
                let got = out.iter().find(|o| o.value == v).map(|o| o.probability).unwrap_or(0.0);
                prop_assert!((got - want).abs() < 1e-10);
            }
        }

        #[test]
        fn symmetric_collapse_keeps_sector(seed in any::<u64>(), fermions in any::<bool>()) {
            let mut rng = random::rng(seed);
            let d = 3;
            let sector = if fermions { Sector::Fermionic } else { Sector::Bosonic };
            let kind = crate::permsym::Symmetry::of(sector).unwrap();
            let raw = random::state_with(&[d, d, d], &mut rng);
            let proj = crate::permsym::project(raw.tensor(), kind).unwrap();
            let psi = PureState::normalized(proj, sector, &t()).unwrap();
            let p = projector(&random::unit_vec(d, &mut rng));
            let out = counting_measurement(&psi, &p, &t()).unwrap();
            let total: f64 = out.iter().map(|o| o.probability).sum();
            prop_assert!((total - 1.0).abs() < 1e-10);
            for o in &out {
                prop_assert!(keeps_sector(o.collapsed.tensor(), sector, &t()).unwrap());
            }
        }
    }
}
