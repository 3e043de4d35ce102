//! N identical bosons: split assembly with orthogonal, identical or oblique
//! factors, the subset property test, detection of states built from two
//! identical halves, and the two-boson bin measurement example.

use std::collections::HashMap;
use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::fermions_n::{assemble_generic, occupied_and_free, one_particle_orthogonal, subset_value, verify_generic, SubsetCheck};
use crate::linalg::{self, c, projector_onto, CMat, CVec, C64, ZERO};
use crate::permsym::{sym_product, Symmetry};
use crate::random;
use crate::state::{PureState, Sector, Tensor};
use crate::tol::{Tolerances, GRAY};

fn require_bosonic(psi: &PureState, what: &str) -> Result<()> {
    if psi.sector() != Sector::Bosonic {
        return invalid(format!("{what} must be bosonic, got {}", psi.sector()));
    }
    Ok(())
}

/// How the two factors of an assembled boson state relate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorRelation {
    Orthogonal,
    Identical,
    Oblique,
}

impl fmt::Display for FactorRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FactorRelation::Orthogonal => "orthogonal",
            FactorRelation::Identical => "identical",
            FactorRelation::Oblique => "oblique",
        })
    }
}

/// Attached to oblique assemblies: each factor's orbitals are certainly
/// occupied by at least one particle, yet the state does not split.
#[derive(Debug, Clone, PartialEq)]
pub struct ObliqueWarning {
    pub contraction_residual: f64,
    /// Probability that at least one particle occupies the first factor's orbitals.
    pub gamma_witness: f64,
    pub lambda_witness: f64,
}

#[derive(Debug, Clone)]
pub struct BosonAssembly {
    pub state: PureState,
    pub relation: FactorRelation,
    pub warning: Option<ObliqueWarning>,
}

/// `1 - ‖(I-P)^{⊗N} ψ‖²` for the projector onto `factor`'s orbitals.
fn at_least_one_in(psi: &PureState, factor: &PureState, tol: &Tolerances) -> Result<f64> {
    let d = psi.one_particle_dim().unwrap_or(0);
    let (occ, _) = occupied_and_free(factor, tol)?;
    let q = CMat::identity(d, d) - projector_onto(&occ, d);
    Ok(1.0 - psi.tensor().apply_on_all(&q)?.norm().powi(2))
}

/// `√C(N,L) P_S[Γ⊗Λ]`. Identical factors and oblique factors are
/// renormalized explicitly; oblique ones carry a warning.
pub fn assemble_boson_split(gamma: &PureState, lambda: &PureState, tol: &Tolerances) -> Result<BosonAssembly> {
    require_bosonic(gamma, "first factor")?;
    require_bosonic(lambda, "second factor")?;
    let ov = one_particle_orthogonal(gamma, lambda, tol)?;
    if ov.orthogonal {
        let s = assemble_generic(gamma, lambda, tol)?;
        return Ok(BosonAssembly { state: s.assembled, relation: FactorRelation::Orthogonal, warning: None });
    }
    let sp = sym_product(gamma, lambda, Symmetry::Symmetrize, tol)?;
    let identical = gamma.dims() == lambda.dims() && (gamma.fidelity(lambda)? - 1.0).abs() <= tol.eq_tol;
    if identical {
        return Ok(BosonAssembly { state: sp.state, relation: FactorRelation::Identical, warning: None });
    }
    let warning = ObliqueWarning {
        contraction_residual: ov.residual,
        gamma_witness: at_least_one_in(&sp.state, gamma, tol)?,
        lambda_witness: at_least_one_in(&sp.state, lambda, tol)?,
    };
    Ok(BosonAssembly { state: sp.state, relation: FactorRelation::Oblique, warning: Some(warning) })
}

/// Does `ψ` split into the group `Γ` and a one-particle-orthogonal rest?
pub fn boson_subset_property_check(psi: &PureState, gamma: &PureState, tol: &Tolerances) -> Result<SubsetCheck> {
    require_bosonic(psi, "state")?;
    subset_value(psi, gamma, tol)
}

/// Which kind of two-group split a boson state admits, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BosonSplitKind {
    DifferentProperties,
    IdenticalProperties,
    NotSplit,
}

impl fmt::Display for BosonSplitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BosonSplitKind::DifferentProperties => "different_properties",
            BosonSplitKind::IdenticalProperties => "identical_properties",
            BosonSplitKind::NotSplit => "not_split",
        })
    }
}

#[derive(Debug, Clone)]
pub struct BosonSplitReport {
    pub kind: BosonSplitKind,
    pub gamma: PureState,
    pub lambda: Option<PureState>,
    pub value: f64,
}

/// Tests `Γ` as a group with different properties first; when `ψ` has
/// twice as many slots as `Γ`, also tests whether it is built from two
/// copies of `Γ`.
pub fn boson_split_report(psi: &PureState, gamma: &PureState, tol: &Tolerances) -> Result<BosonSplitReport> {
    require_bosonic(psi, "state")?;
    let v = verify_generic(psi, gamma, tol)?;
    if v.holds {
        return Ok(BosonSplitReport { kind: BosonSplitKind::DifferentProperties, gamma: gamma.clone(), lambda: v.phi, value: v.value });
    }
    if psi.n_slots() == 2 * gamma.n_slots() {
        let twin = sym_product(gamma, gamma, Symmetry::Symmetrize, tol)?.state;
        let fid = twin.fidelity(psi)?;
        if (1.0 - fid).abs() <= tol.eq_tol {
            return Ok(BosonSplitReport {
                kind: BosonSplitKind::IdenticalProperties,
                gamma: gamma.clone(),
                lambda: Some(gamma.clone()),
                value: fid,
            });
        }
    }
    Ok(BosonSplitReport { kind: BosonSplitKind::NotSplit, gamma: gamma.clone(), lambda: None, value: v.value })
}

/// Outcome of [`identical_halves`].
#[derive(Debug, Clone)]
pub struct IdenticalHalves {
    pub flag: bool,
    /// Best candidate half, when one could be extracted.
    pub gamma: Option<PureState>,
    /// `|<ψ|S[Γ⊗Γ]>|²` for the normalized candidate.
    pub fidelity: f64,
}

type Exponent = Vec<u8>;

fn exponent_of(idx: &[usize], d: usize) -> Exponent {
    let mut e = vec![0u8; d];
    for &i in idx {
        e[i] += 1;
    }
    e
}

/// Coefficients of `x ↦ <x^{⊗N}|ψ>` (without conjugation) by exponent.
fn polynomial_of(t: &Tensor) -> HashMap<Exponent, C64> {
    let d = t.dims()[0];
    let mut p: HashMap<Exponent, C64> = HashMap::new();
    for (flat, z) in t.data().iter().enumerate() {
        *p.entry(exponent_of(&t.multi_index(flat), d)).or_insert(ZERO) += *z;
    }
    p
}

fn sub_exponents(beta: &[u8]) -> Vec<Exponent> {
    let mut out: Vec<Exponent> = vec![vec![]];
    for &b in beta {
        out = out.into_iter().flat_map(|pre| (0..=b).map(move |k| [pre.clone(), vec![k]].concat())).collect();
    }
    out
}

fn all_exponents(vars: usize, max_deg: usize) -> Vec<Exponent> {
    let mut out: Vec<Exponent> = vec![vec![]];
    for _ in 0..vars {
        out = out
            .into_iter()
            .flat_map(|pre| {
                let used: usize = pre.iter().map(|&x| x as usize).sum();
                (0..=(max_deg - used) as u8).map(move |k| [pre.clone(), vec![k]].concat())
            })
            .collect();
    }
    out.sort_by_key(|e| (e.iter().map(|&x| x as usize).sum::<usize>(), e.clone()));
    out
}

fn factorial_u(n: u8) -> f64 {
    (1..=n as usize).map(|k| k as f64).product()
}

/// Square root of the degree-`N` polynomial of `ψ` after setting the first
/// variable to one, as a power series truncated at degree `N/2`; returned
/// as a symmetric `N/2`-slot tensor. `None` when the constant term vanishes.
fn polynomial_root(t: &Tensor) -> Result<Option<Tensor>> {
    let d = t.dims()[0];
    let n = t.n_slots();
    let l = n / 2;
    let p = polynomial_of(t);
    let scale = p.values().map(|z| z.norm()).fold(0.0, f64::max);
    let tail = |e: &Exponent| -> Exponent { e[1..].to_vec() };
    let mut reduced: HashMap<Exponent, C64> = HashMap::new();
    for (e, z) in &p {
        reduced.insert(tail(e), *z);
    }
    let zero_exp = vec![0u8; d - 1];
    let p0 = reduced.get(&zero_exp).copied().unwrap_or(ZERO);
    if p0.norm() <= 1e-3 * scale {
        return Ok(None);
    }
    let mut q: HashMap<Exponent, C64> = HashMap::new();
    let q0 = p0.sqrt();
    q.insert(zero_exp.clone(), q0);
    for beta in all_exponents(d - 1, l).into_iter().skip(1) {
        let mut acc = reduced.get(&beta).copied().unwrap_or(ZERO);
        for g in sub_exponents(&beta) {
            if g == zero_exp || g == beta {
                continue;
            }
            let rest: Exponent = beta.iter().zip(&g).map(|(b, x)| b - x).collect();
            if let (Some(a), Some(b)) = (q.get(&g), q.get(&rest)) {
                acc -= a * b;
            }
        }
        q.insert(beta, acc / (q0 * c(2.0, 0.0)));
    }
    let dims = vec![d; l];
    let lf = factorial_u(l as u8);
    Tensor::from_fn(dims, |idx| {
        let e = exponent_of(idx, d);
        let mult: f64 = e.iter().map(|&k| factorial_u(k)).product();
        q.get(&e[1..]).copied().unwrap_or(ZERO) * c(mult / lf, 0.0)
    })
    .map(Some)
}

const ROOT_ATTEMPTS: u64 = 4;

/// Is `ψ ∝ P_S[Γ⊗Γ]` for some `Γ` on `N/2` slots? The candidate `Γ` is the
/// polynomial square root of `ψ` in a generic coordinate frame; the
/// decision is the exact fidelity check of the rebuilt state.
pub fn identical_halves(psi: &PureState, tol: &Tolerances) -> Result<IdenticalHalves> {
    require_bosonic(psi, "state")?;
    let n = psi.n_slots();
    if !n.is_multiple_of(2) {
        return invalid(format!("identical halves need an even number of particles, got {n}"));
    }
    let d = psi.one_particle_dim().unwrap_or(0);
    let mut best: Option<(f64, PureState)> = None;
    for seed in 0..ROOT_ATTEMPTS {
        let u = if seed == 0 { CMat::identity(d, d) } else { random::unitary(d, seed) };
        let rotated = psi.tensor().apply_on_all(&u)?;
        let Some(root) = polynomial_root(&rotated)? else { continue };
        let back = root.apply_on_all(&u.adjoint())?;
        if back.norm() <= f64::MIN_POSITIVE {
            continue;
        }
        let Ok(gamma) = PureState::normalized(back, Sector::Bosonic, tol) else { continue };
        let twin = sym_product(&gamma, &gamma, Symmetry::Symmetrize, tol)?.state;
        let fid = twin.fidelity(psi)?;
        if best.as_ref().is_none_or(|(f, _)| fid > *f) {
            best = Some((fid, gamma));
        }
        if 1.0 - fid <= tol.eq_tol * GRAY {
            break;
        }
    }
    match best {
        Some((fid, gamma)) => Ok(IdenticalHalves { flag: 1.0 - fid <= tol.eq_tol * GRAY, gamma: Some(gamma), fidelity: fid }),
        None => Ok(IdenticalHalves { flag: false, gamma: None, fidelity: 0.0 }),
    }
}

/// Result of the two-boson bin measurement.
#[derive(Debug, Clone)]
pub struct BinDemo {
    /// Probability that the second particle is in bin set 1 once one was found in bin set 2.
    pub conditional: f64,
    /// Probability that exactly one particle is in bin set 1, with no prior measurement.
    pub unconditional: f64,
    /// `(|δ1|, d - |δ2|)` as integers: the conditional probability as a fraction.
    pub conditional_ratio: (usize, usize),
    /// State after finding exactly one particle in bin set 2.
    pub collapsed: PureState,
}

fn bin_projector(d: usize, bins: &[usize]) -> CMat {
    let vs: Vec<CVec> = bins.iter().map(|&i| linalg::basis_vec(d, i)).collect();
    projector_onto(&vs, d)
}

fn exactly_one(coef: &CMat, p: &CMat) -> f64 {
    let d = p.nrows();
    let q = CMat::identity(d, d) - p;
    crate::identical2::pair_expect(coef, p, &q) + crate::identical2::pair_expect(coef, &q, p)
}

/// Two bosons, each spread uniformly over `d` bins. One particle is found
/// in bin set `delta2`; the other is then looked for in `delta1`.
pub fn bin_measurement_demo(d: usize, delta1: &[usize], delta2: &[usize], tol: &Tolerances) -> Result<BinDemo> {
    if d == 0 || delta1.is_empty() || delta2.is_empty() {
        return invalid("bin count and both bin sets must be nonempty");
    }
    let mut seen = vec![0u8; d];
    for (set, mark) in [(delta1, 1u8), (delta2, 2u8)] {
        for &b in set {
            if b >= d {
                return invalid(format!("bin {b} out of range 0..{d}"));
            }
            if seen[b] != 0 {
                return invalid(format!("bin {b} appears twice or in both sets"));
            }
            seen[b] = mark;
        }
    }
    if delta2.len() == d {
        return invalid("bin set 2 covers every bin, leaving no room for the other particle");
    }
    let u = CVec::from_element(d, c(1.0 / (d as f64).sqrt(), 0.0));
    let psi = PureState::new(Tensor::new(vec![d, d], linalg::kron_vec(&u, &u))?, Sector::Bosonic, tol)?;
    let p1 = bin_projector(d, delta1);
    let p2 = bin_projector(d, delta2);
    let q2 = CMat::identity(d, d) - &p2;
    let t = psi.tensor();
    let e2 = t.apply_on_slot(0, &p2)?.apply_on_slot(1, &q2)?.add(&t.apply_on_slot(0, &q2)?.apply_on_slot(1, &p2)?)?;
    let collapsed = PureState::normalized(e2, Sector::Bosonic, tol)?;
    let conditional = {
        let x = collapsed.tensor().matricize(&[0])?;
        let id = CMat::identity(d, d);
        crate::identical2::pair_expect(&x, &p1, &id) + crate::identical2::pair_expect(&x, &id, &p1)
            - crate::identical2::pair_expect(&x, &p1, &p1)
    };
    let unconditional = exactly_one(&t.matricize(&[0])?, &p1);
    let ratio = (delta1.len(), d - delta2.len());
    let want_c = ratio.0 as f64 / ratio.1 as f64;
    let f = delta1.len() as f64 / d as f64;
    let want_u = 2.0 * f * (1.0 - f);
    let worst = (conditional - want_c).abs().max((unconditional - want_u).abs());
    if worst > 1e-12_f64.max(tol.eq_tol / GRAY) {
        return Err(Error::Inconsistency(format!("bin probabilities miss their closed forms by {worst:e}")));
    }
    Ok(BinDemo { conditional, unconditional, conditional_ratio: ratio, collapsed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermions_n::theta_basis;
    use crate::linalg::{basis_vec, rvec};
    use crate::permsym::symmetrized_product;
    use proptest::prelude::*;
    use rand::Rng;

    fn t() -> Tolerances {
        Tolerances::default()
    }

    fn boson(v: &CVec) -> PureState {
        PureState::from_vector(v).unwrap().with_sector(Sector::Bosonic, &t()).unwrap()
    }

    fn e(d: usize, i: usize) -> CVec {
        basis_vec(d, i)
    }

    /// Random symmetric state on `m` slots supported on `frame`.
    fn random_group<R: Rng>(frame: &[CVec], m: usize, rng: &mut R) -> PureState {
        let th = theta_basis(frame, m, Symmetry::Symmetrize, &t()).unwrap();
        let d = frame[0].len();
        let mut acc = Tensor::zeros(vec![d; m]).unwrap();
        for s in th {
            let z = c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            acc = acc.add(&s.tensor().scaled(z)).unwrap();
        }
        PureState::normalized(acc, Sector::Bosonic, &t()).unwrap()
    }

    #[test]
    fn assemble_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let a = assemble_boson_split(&boson(&e(2, 0)), &boson(&e(2, 1)), &t()).unwrap();
        assert_eq!(a.relation, FactorRelation::Orthogonal);
        let want = PureState::from_amps(vec![2, 2], &[ZERO, c(h, 0.0), c(h, 0.0), ZERO], Sector::Bosonic).unwrap();
        assert!((a.state.fidelity(&want).unwrap() - 1.0).abs() < 1e-14);
        let a = assemble_boson_split(&boson(&e(2, 0)), &boson(&e(2, 0)), &t()).unwrap();
        assert_eq!(a.relation, FactorRelation::Identical);
        assert!((a.state.amp(&[0, 0]).unwrap().norm() - 1.0).abs() < 1e-14);
        let gamma = symmetrized_product(&[e(3, 0), e(3, 0)], &t()).unwrap();
        let a = assemble_boson_split(&gamma, &boson(&e(3, 1)), &t()).unwrap();
        assert_eq!(a.relation, FactorRelation::Orthogonal);
        assert!((a.state.tensor().norm() - 1.0).abs() < 1e-14);
        let want = symmetrized_product(&[e(3, 0), e(3, 0), e(3, 1)], &t()).unwrap();
        assert!((a.state.fidelity(&want).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn oblique_factors_warn_with_both_witnesses() {
        let g = boson(&e(3, 0));
        let l = boson(&rvec(&[0.6, 0.8, 0.0]));
        let a = assemble_boson_split(&g, &l, &t()).unwrap();
        assert_eq!(a.relation, FactorRelation::Oblique);
        let w = a.warning.unwrap();
        assert!(w.contraction_residual > 0.5);
        assert!((w.gamma_witness - 1.0).abs() < 1e-12 && (w.lambda_witness - 1.0).abs() < 1e-12);
        // neither factor splits the state off, and it overlaps the doubled factor
        assert!(!boson_subset_property_check(&a.state, &g, &t()).unwrap().holds);
        let twin = symmetrized_product(&[e(3, 0), e(3, 0)], &t()).unwrap();
        assert!(twin.inner(&a.state).unwrap().norm() > 0.1);
    }

    #[test]
    fn subset_check_examples() {
        let a = assemble_boson_split(&boson(&e(2, 0)), &boson(&e(2, 1)), &t()).unwrap();
        let chk = boson_subset_property_check(&a.state, &boson(&e(2, 0)), &t()).unwrap();
        assert!(chk.holds && (chk.value - 1.0).abs() < 1e-14);
        let twin = symmetrized_product(&[e(2, 0), e(2, 0)], &t()).unwrap();
        let chk = boson_subset_property_check(&twin, &boson(&e(2, 0)), &t()).unwrap();
        assert!(chk.value.abs() < 1e-14);
        let rep = boson_split_report(&twin, &boson(&e(2, 0)), &t()).unwrap();
        assert_eq!(rep.kind, BosonSplitKind::IdenticalProperties);
        let rep = boson_split_report(&a.state, &boson(&e(2, 0)), &t()).unwrap();
        assert_eq!(rep.kind, BosonSplitKind::DifferentProperties);
        assert!((rep.lambda.unwrap().fidelity(&boson(&e(2, 1))).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn halves_of_a_double_occupation() {
        let twin = symmetrized_product(&[e(3, 0), e(3, 0)], &t()).unwrap();
        let h = identical_halves(&twin, &t()).unwrap();
        assert!(h.flag);
        assert!((h.gamma.unwrap().fidelity(&boson(&e(3, 0))).unwrap() - 1.0).abs() < 1e-12);
        assert!(identical_halves(&boson(&e(3, 0)), &t()).is_err());
    }

    #[test]
    fn orthogonal_split_has_no_identical_halves() {
        let a = assemble_boson_split(&boson(&e(3, 0)), &boson(&e(3, 1)), &t()).unwrap();
        assert!(!identical_halves(&a.state, &t()).unwrap().flag);
        let g = symmetrized_product(&[e(4, 0), e(4, 1)], &t()).unwrap();
        let l = symmetrized_product(&[e(4, 2), e(4, 3)], &t()).unwrap();
        let a = assemble_boson_split(&g, &l, &t()).unwrap();
        assert!(!identical_halves(&a.state, &t()).unwrap().flag);
    }

    #[test]
    fn bins_closed_forms() {
        let b = bin_measurement_demo(10, &[0, 1], &[2, 3, 4], &t()).unwrap();
        assert!((b.conditional - 2.0 / 7.0).abs() < 1e-12);
        assert!((b.unconditional - 0.32).abs() < 1e-12);
        assert_eq!(b.conditional_ratio, (2, 7));
        assert!((b.conditional - b.unconditional).abs() > 0.01);
        let full = bin_measurement_demo(5, &[3, 4], &[0, 1, 2], &t()).unwrap();
        assert!((full.conditional - 1.0).abs() < 1e-12);
        assert!(bin_measurement_demo(5, &[1, 2], &[2], &t()).is_err());
        assert!(bin_measurement_demo(5, &[], &[2], &t()).is_err());
    }

    /// Classical model: two bins drawn independently and uniformly, order
    /// forgotten. Exact rational arithmetic.
    fn classical_bins(d: usize, d1: &[usize], d2: &[usize]) -> ((usize, usize), (usize, usize)) {
        let in1 = |b: usize| d1.contains(&b);
        let in2 = |b: usize| d2.contains(&b);
        let (mut cond_num, mut cond_den, mut unc) = (0, 0, 0);
        for i in 0..d {
            for j in 0..d {
                if in2(i) != in2(j) {
                    cond_den += 1;
                    let other = if in2(i) { j } else { i };
                    if in1(other) {
                        cond_num += 1;
                    }
                }
                if in1(i) != in1(j) {
                    unc += 1;
                }
            }
        }
        ((cond_num, cond_den), (unc, d * d))
    }

    #[test]
    fn bins_match_classical_enumeration_exhaustively() {
        for d in 2..=7 {
            for mask in 1..3usize.pow(d as u32) {
                let (mut a, mut b) = (vec![], vec![]);
                let mut m = mask;
                for bin in 0..d {
                    match m % 3 {
                        1 => a.push(bin),
                        2 => b.push(bin),
                        _ => {}
                    }
                    m /= 3;
                }
                if a.is_empty() || b.is_empty() {
                    continue;
                }
                let demo = bin_measurement_demo(d, &a, &b, &t()).unwrap();
                let ((cn, cd), (un, ud)) = classical_bins(d, &a, &b);
                assert!((demo.conditional - cn as f64 / cd as f64).abs() < 1e-12);
                assert!((demo.unconditional - un as f64 / ud as f64).abs() < 1e-12);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn doubled_random_half_is_recognized(seed in any::<u64>(), l in 1usize..3, d in 2usize..5) {
            let mut rng = random::rng(seed);
            let frame: Vec<CVec> = (0..d).map(|i| e(d, i)).collect();
            let gamma = random_group(&frame, l, &mut rng);
            let twin = sym_product(&gamma, &gamma, Symmetry::Symmetrize, &t()).unwrap().state;
            let h = identical_halves(&twin, &t()).unwrap();
            prop_assert!(h.flag, "fidelity {}", h.fidelity);
            let g = h.gamma.unwrap();
            let rebuilt = sym_product(&g, &g, Symmetry::Symmetrize, &t()).unwrap().state;
            prop_assert!(rebuilt.fidelity(&twin).unwrap() > 1.0 - 1e-9);
        }

        #[test]
        fn epsilon_basis_is_orthonormal(seed in any::<u64>(), l in 1usize..3, k in 1usize..3) {
            let d = 5;
            let mut rng = random::rng(seed);
            let u = random::unitary_with(d, &mut rng);
            let frame: Vec<CVec> = (0..d).map(|j| u.column(j).into_owned()).collect();
            let gamma = random_group(&frame[..2], l, &mut rng);
            let om = crate::fermions_n::omega_basis(&gamma, l + k, &t()).unwrap();
            for (i, a) in om.iter().enumerate() {
                for (j, b) in om.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((a.inner(b).unwrap() - c(want, 0.0)).norm() < 1e-10);
                }
            }
        }

        #[test]
        fn split_and_halves_exclude_each_other(seed in any::<u64>(), l in 1usize..3) {
            let d = 5;
            let mut rng = random::rng(seed);
            let u = random::unitary_with(d, &mut rng);
            let frame: Vec<CVec> = (0..d).map(|j| u.column(j).into_owned()).collect();
            let gamma = random_group(&frame[..2], l, &mut rng);
            let lambda = random_group(&frame[2..], l, &mut rng);
            let split = assemble_boson_split(&gamma, &lambda, &t()).unwrap().state;
            prop_assert!(boson_subset_property_check(&split, &gamma, &t()).unwrap().holds);
            prop_assert!(!identical_halves(&split, &t()).unwrap().flag);
            let twin = assemble_boson_split(&gamma, &gamma, &t()).unwrap().state;
            prop_assert!(identical_halves(&twin, &t()).unwrap().flag);
            prop_assert!(!boson_subset_property_check(&twin, &gamma, &t()).unwrap().holds);
        }
    }
}
