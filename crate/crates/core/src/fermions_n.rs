//! N identical fermions split into two one-particle-orthogonal groups: the
//! free single-particle subspace of a group state, split assembly and
//! verification, the subset property test, local factorizability, Slater
//! detection and the approximate-orthogonality family.
//!
//! The sector-generic pieces (`occupied_and_free`, `subset_value`,
//! `theta_basis`, ...) are shared with the boson module.

use crate::density::{one_body, spectral};
use crate::error::{invalid, Error, Result};
use crate::identical2::pair_expect;
use crate::linalg::{self, basis_vec, c, columns, max_abs, projector_onto, range_and_cokernel, CMat, CVec, ZERO};
use crate::permsym::{binomial, slater_state, sym_product, symmetrized_product, Symmetry};
use crate::state::{PureState, Sector, Tensor};
use crate::tol::{Tolerances, GRAY};

fn require_fermionic(psi: &PureState, what: &str) -> Result<()> {
    if psi.sector() != Sector::Fermionic {
        return invalid(format!("{what} must be fermionic, got {}", psi.sector()));
    }
    Ok(())
}

fn common_dim(a: &PureState, b: &PureState) -> Result<usize> {
    match (a.one_particle_dim(), b.one_particle_dim()) {
        (Some(x), Some(y)) if x == y => Ok(x),
        _ => invalid(format!("single-particle dimensions differ: {:?} vs {:?}", a.dims(), b.dims())),
    }
}

/// Orbitals a group state occupies (column space of its single-slot
/// coefficient matrix) and the orthogonal complement it leaves free.
/// Every slot is saturated in turn and must give the same subspace.
pub(crate) fn occupied_and_free(pi: &PureState, tol: &Tolerances) -> Result<(Vec<CVec>, Vec<CVec>)> {
    let d = pi.one_particle_dim().ok_or_else(|| Error::InvalidInput(format!("unequal slot dimensions {:?}", pi.dims())))?;
    let (occ, free) = range_and_cokernel(&pi.tensor().matricize(&[0])?, tol);
    let p0 = projector_onto(&occ, d);
    for j in 1..pi.n_slots() {
        let (occ_j, _) = range_and_cokernel(&pi.tensor().matricize(&[j])?, tol);
        let diff = max_abs(&(projector_onto(&occ_j, d) - &p0));
        if occ_j.len() != occ.len() || diff > tol.eq_tol * GRAY {
            return Err(Error::Inconsistency(format!("occupied subspace from slot {} differs from slot 1 (difference {diff:e})", j + 1)));
        }
    }
    Ok((occ, free))
}

/// Orthonormal basis of the single-particle vectors whose contraction with
/// `pi` vanishes. May be empty.
pub fn v_perp(pi: &PureState, tol: &Tolerances) -> Result<Vec<CVec>> {
    require_fermionic(pi, "group state")?;
    Ok(occupied_and_free(pi, tol)?.1)
}

/// A single-particle basis split into two index sets.
#[derive(Debug, Clone)]
pub struct Partition {
    pub basis: Vec<CVec>,
    pub delta: Vec<usize>,
    pub delta_perp: Vec<usize>,
}

impl Partition {
    fn from_blocks(first: Vec<CVec>, rest: Vec<CVec>) -> Self {
        let r = first.len();
        let n = r + rest.len();
        let mut basis = first;
        basis.extend(rest);
        Partition { basis, delta: (0..r).collect(), delta_perp: (r..n).collect() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Projector onto the span of the `delta` vectors.
    pub fn delta_projector(&self) -> CMat {
        let vs: Vec<CVec> = self.delta.iter().map(|&i| self.basis[i].clone()).collect();
        projector_onto(&vs, self.dim())
    }

    pub fn delta_perp_projector(&self) -> CMat {
        let vs: Vec<CVec> = self.delta_perp.iter().map(|&i| self.basis[i].clone()).collect();
        projector_onto(&vs, self.dim())
    }

    /// Coefficients of `psi` in this basis.
    pub fn expand(&self, psi: &PureState) -> Result<Tensor> {
        let u = columns(&self.basis, self.dim());
        psi.tensor().apply_on_all(&u.adjoint())
    }
}

pub(crate) fn partition_of(pi: &PureState, tol: &Tolerances) -> Result<Partition> {
    let (occ, free) = occupied_and_free(pi, tol)?;
    if free.is_empty() {
        return Err(Error::Unsplittable(
            "the group state occupies the whole single-particle space, so no other group can coexist with it".into(),
        ));
    }
    let part = Partition::from_blocks(occ, free);
    let expanded = part.expand(pi)?;
    let r = part.delta.len();
    let mut leak = 0.0;
    let mut weight = vec![0.0; r];
    for (flat, z) in expanded.data().iter().enumerate() {
        let idx = expanded.multi_index(flat);
        if idx.iter().any(|&i| i >= r) {
            leak += z.norm_sqr();
        } else {
            weight[idx[0]] += z.norm_sqr();
        }
    }
    let top = weight.iter().cloned().fold(0.0, f64::max);
    if leak.sqrt() > tol.eq_tol * GRAY || weight.iter().any(|&w| w <= tol.rank_tol * top) {
        return Err(Error::Inconsistency(format!(
            "re-expanded group state does not have support exactly on its occupied orbitals (leak {:e})",
            leak.sqrt()
        )));
    }
    Ok(part)
}

/// Occupied orbitals (`delta`) followed by the free ones (`delta_perp`).
pub fn delta_partition(pi: &PureState, tol: &Tolerances) -> Result<Partition> {
    require_fermionic(pi, "group state")?;
    partition_of(pi, tol)
}

/// Outcome of [`one_particle_orthogonal`].
#[derive(Debug, Clone)]
pub struct OneParticleOverlap {
    pub orthogonal: bool,
    /// Frobenius norm of the single-slot contraction.
    pub residual: f64,
    /// When orthogonal: a basis with the first state's orbitals in `delta`
    /// and the second state's orbitals inside `delta_perp`.
    pub common_basis: Option<Partition>,
}

/// Contracts one slot of `sigma` against one slot of `phi`.
pub fn one_particle_orthogonal(sigma: &PureState, phi: &PureState, tol: &Tolerances) -> Result<OneParticleOverlap> {
    if sigma.sector() == Sector::Distinguishable || sigma.sector() != phi.sector() {
        return invalid(format!("need two identical-particle states of one sector, got {} and {}", sigma.sector(), phi.sector()));
    }
    let d = common_dim(sigma, phi)?;
    let a_s = sigma.tensor().matricize(&[0])?;
    let a_p = phi.tensor().matricize(&[0])?;
    let residual = (a_s.transpose() * a_p.map(|z| z.conj())).norm();
    let orthogonal = residual <= tol.eq_tol;
    let common_basis = if orthogonal {
        let (occ_s, _) = occupied_and_free(sigma, tol)?;
        let (occ_p, _) = occupied_and_free(phi, tol)?;
        let mut both = occ_s.clone();
        both.extend(occ_p.iter().cloned());
        let (_, rest) = range_and_cokernel(&columns(&both, d), tol);
        let mut second = occ_p;
        second.extend(rest);
        Some(Partition::from_blocks(occ_s, second))
    } else {
        None
    };
    Ok(OneParticleOverlap { orthogonal, residual, common_basis })
}

/// Two one-particle-orthogonal group states and their normalized
/// (anti)symmetrized product.
#[derive(Debug, Clone)]
pub struct OrthogonalSplit {
    pub basis: Vec<CVec>,
    pub delta: Vec<usize>,
    pub delta_perp: Vec<usize>,
    pub pi_state: PureState,
    pub phi_state: PureState,
    pub assembled: PureState,
    /// Squared norm of the bare projection before the binomial factor.
    pub raw_norm_sq: f64,
}

pub(crate) fn assemble_generic(pi: &PureState, phi: &PureState, tol: &Tolerances) -> Result<OrthogonalSplit> {
    let kind = Symmetry::of(pi.sector())?;
    let ov = one_particle_orthogonal(pi, phi, tol)?;
    let part = match ov.common_basis {
        Some(p) => p,
        None => return invalid(format!("the two group states are not one-particle orthogonal (contraction residual {:e})", ov.residual)),
    };
    let sp = sym_product(pi, phi, kind, tol)?;
    if (sp.scaled_norm_sq - 1.0).abs() > tol.eq_tol * GRAY {
        return Err(Error::Tolerance { what: "binomial normalization".into(), residual: sp.scaled_norm_sq - 1.0 });
    }
    Ok(OrthogonalSplit {
        basis: part.basis,
        delta: part.delta,
        delta_perp: part.delta_perp,
        pi_state: pi.clone(),
        phi_state: phi.clone(),
        assembled: sp.state,
        raw_norm_sq: sp.raw_norm_sq,
    })
}

/// `√C(N,K) P_A[Π⊗Φ]` for one-particle-orthogonal fermion groups.
pub fn assemble_split(pi: &PureState, phi: &PureState, tol: &Tolerances) -> Result<OrthogonalSplit> {
    require_fermionic(pi, "first group")?;
    require_fermionic(phi, "second group")?;
    assemble_generic(pi, phi, tol)
}

/// `<Π|ψ>` over the first `M` slots: a `d^K` vector.
pub(crate) fn remainder(psi: &PureState, pi: &PureState) -> Result<CVec> {
    let m = pi.n_slots();
    let rows: Vec<usize> = (0..m).collect();
    let x = psi.tensor().matricize(&rows)?;
    Ok(x.transpose() * pi.amps().map(|z| z.conj()))
}

/// All `k`-element subsets of `0..n`, lexicographic.
pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// All `k`-element multisets of `0..n`, as non-decreasing index lists.
pub(crate) fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Orthonormal basis of the `k`-particle states built from `free` orbitals
/// in the given sector: Slater states for fermions, normalized symmetrized
/// products over multisets for bosons.
pub(crate) fn theta_basis(free: &[CVec], k: usize, kind: Symmetry, tol: &Tolerances) -> Result<Vec<PureState>> {
    let pick = |ix: &[usize]| -> Vec<CVec> { ix.iter().map(|&i| free[i].clone()).collect() };
    match kind {
        Symmetry::Antisymmetrize => subsets(free.len(), k).iter().map(|ix| slater_state(&pick(ix), tol)).collect(),
        Symmetry::Symmetrize => multisets(free.len(), k).iter().map(|ix| symmetrized_product(&pick(ix), tol)).collect(),
    }
}

/// Outcome of a subset property test.
#[derive(Debug, Clone)]
pub struct SubsetCheck {
    /// `<ψ|E|ψ>` for the projector onto the states that split along `Π`.
    pub value: f64,
    pub holds: bool,
    /// Number of basis states spanning that projector's range.
    pub n_omega: usize,
}

fn check_group_of(psi: &PureState, pi: &PureState) -> Result<(usize, usize, usize)> {
    if psi.sector() != pi.sector() || psi.sector() == Sector::Distinguishable {
        return invalid(format!("state and group must share an identical-particle sector, got {} and {}", psi.sector(), pi.sector()));
    }
    let d = common_dim(psi, pi)?;
    let (n, m) = (psi.n_slots(), pi.n_slots());
    if m >= n {
        return invalid(format!("group has {m} slots but the state only {n}"));
    }
    Ok((d, n, m))
}

fn unsplittable_as_invalid<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Unsplittable(msg) => Error::InvalidInput(format!("group state is unsplittable: {msg}")),
        other => other,
    })
}

/// `value = Σ_i |<ω_i|ψ>|²` with `ω_i = √C(N,K) P[Π⊗Θ_i]`. Because `ψ` is
/// already (anti)symmetric, each overlap equals `√C(N,K) <Θ_i|<Π|ψ>`, so the
/// `ω_i` never need to be materialized.
pub(crate) fn subset_value(psi: &PureState, pi: &PureState, tol: &Tolerances) -> Result<SubsetCheck> {
    let (d, n, m) = check_group_of(psi, pi)?;
    let k = n - m;
    let kind = Symmetry::of(psi.sector())?;
    let part = unsplittable_as_invalid(partition_of(pi, tol))?;
    let free: Vec<CVec> = part.delta_perp.iter().map(|&i| part.basis[i].clone()).collect();
    let rem = remainder(psi, pi)?;
    let thetas = theta_basis(&free, k, kind, tol)?;
    let scale = binomial(n, k);
    let value = scale * thetas.iter().map(|t| t.amps().dotc(&rem).norm_sqr()).sum::<f64>();

    let q = projector_onto(&free, d);
    let via_q = scale * Tensor::new(vec![d; k], rem.clone())?.apply_on_all(&q)?.norm().powi(2);
    if (via_q - value).abs() > tol.eq_tol * GRAY {
        return Err(Error::Inconsistency(format!("subset value {value} disagrees with the projected remainder {via_q}")));
    }
    if n == 2 {
        let x = psi.tensor().matricize(&[0])?;
        let p = part.delta_projector();
        let i = CMat::identity(d, d);
        let reduced = pair_expect(&x, &(&i - &p), &p) + pair_expect(&x, &p, &(&i - &p));
        if (reduced - value).abs() > tol.eq_tol * GRAY {
            return Err(Error::Inconsistency(format!("two-particle subset value {value} disagrees with the reduced form {reduced}")));
        }
    }
    Ok(SubsetCheck { value, holds: (value - 1.0).abs() <= tol.eq_tol, n_omega: thetas.len() })
}

/// Does `ψ` split into the group `Π` and a one-particle-orthogonal rest?
pub fn subset_property_check(psi: &PureState, pi: &PureState, tol: &Tolerances) -> Result<SubsetCheck> {
    require_fermionic(psi, "state")?;
    subset_value(psi, pi, tol)
}

/// The states `√C(N,K) P[Π⊗Θ_i]` spanning the split projector's range.
pub fn omega_basis(pi: &PureState, n: usize, tol: &Tolerances) -> Result<Vec<PureState>> {
    let m = pi.n_slots();
    if n <= m {
        return invalid(format!("total slot count {n} must exceed the group's {m}"));
    }
    let kind = Symmetry::of(pi.sector())?;
    let part = unsplittable_as_invalid(partition_of(pi, tol))?;
    let free: Vec<CVec> = part.delta_perp.iter().map(|&i| part.basis[i].clone()).collect();
    theta_basis(&free, n - m, kind, tol)?
        .iter()
        .map(|th| {
            let sp = sym_product(pi, th, kind, tol)?;
            if sp.renormalized {
                return Err(Error::Tolerance { what: "basis state normalization".into(), residual: sp.scaled_norm_sq - 1.0 });
            }
            Ok(sp.state)
        })
        .collect()
}

/// Outcome of [`verify_split`].
#[derive(Debug, Clone)]
pub struct SplitVerification {
    pub holds: bool,
    pub value: f64,
    /// The recovered second group, when the split holds.
    pub phi: Option<PureState>,
    /// `|<reassembled|ψ>|²`, when the split holds.
    pub fidelity: Option<f64>,
}

pub(crate) fn verify_generic(psi: &PureState, pi: &PureState, tol: &Tolerances) -> Result<SplitVerification> {
    let check = subset_value(psi, pi, tol)?;
    if !check.holds {
        return Ok(SplitVerification { holds: false, value: check.value, phi: None, fidelity: None });
    }
    let (d, n, m) = check_group_of(psi, pi)?;
    let k = n - m;
    let kind = Symmetry::of(psi.sector())?;
    let part = partition_of(pi, tol)?;
    let free: Vec<CVec> = part.delta_perp.iter().map(|&i| part.basis[i].clone()).collect();
    let rem = remainder(psi, pi)?;
    let root = binomial(n, k).sqrt();
    let mut phi_vec = CVec::from_element(d.pow(k as u32), ZERO);
    for th in theta_basis(&free, k, kind, tol)? {
        let b = th.amps().dotc(&rem) * c(root, 0.0);
        phi_vec += th.amps() * b;
    }
    let phi = PureState::normalized(Tensor::new(vec![d; k], phi_vec)?, psi.sector(), tol)?;
    let back = assemble_generic(pi, &phi, tol)?;
    let fidelity = back.assembled.fidelity(psi)?;
    if 1.0 - fidelity > tol.eq_tol * GRAY {
        return Err(Error::Tolerance { what: "split reassembly".into(), residual: 1.0 - fidelity });
    }
    Ok(SplitVerification { holds: true, value: check.value, phi: Some(phi), fidelity: Some(fidelity) })
}

/// Recovers the second group from a split state and checks that
/// reassembling it reproduces `ψ` up to phase.
pub fn verify_split(psi: &PureState, pi: &PureState, tol: &Tolerances) -> Result<SplitVerification> {
    require_fermionic(psi, "state")?;
    verify_generic(psi, pi, tol)
}

/// Joint and marginal probabilities for one projector per region.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFactorization {
    pub joint: f64,
    pub marginal1: f64,
    pub marginal2: f64,
    pub product: f64,
    pub factorizes: bool,
}

fn expect_slotwise(psi: &PureState, ops: &[&CMat]) -> Result<f64> {
    let mut t = psi.tensor().clone();
    for (slot, op) in ops.iter().enumerate() {
        t = t.apply_on_slot(slot, op)?;
    }
    Ok(psi.tensor().inner(&t)?.re)
}

fn check_inside(p: &CMat, region: &CMat, name: &str, tol: &Tolerances) -> Result<()> {
    if p.shape() != region.shape() {
        return invalid(format!("{name} has shape {:?}, expected {:?}", p.shape(), region.shape()));
    }
    if !linalg::is_projector(p, tol) {
        return invalid(format!("{name} is not an orthogonal projector"));
    }
    let leak = max_abs(&(region * p * region - p));
    if leak > tol.eq_tol * 10.0 {
        return invalid(format!("{name} leaks outside its region (residual {leak:e})"));
    }
    Ok(())
}

/// Probabilities of finding `M` particles with property `p` inside region 1
/// and `K` with property `q` inside region 2, for a fermion state that
/// splits into a group of `m` particles in region 1 and the rest in region 2.
pub fn local_factorizability(
    psi: &PureState,
    m: usize,
    region1: &CMat,
    region2: &CMat,
    p: &CMat,
    q: &CMat,
    tol: &Tolerances,
) -> Result<LocalFactorization> {
    require_fermionic(psi, "state")?;
    let n = psi.n_slots();
    if m == 0 || m >= n {
        return invalid(format!("group size must lie in 1..{n}, got {m}"));
    }
    let d = psi.one_particle_dim().unwrap_or(0);
    for (r, name) in [(region1, "region 1"), (region2, "region 2")] {
        if r.shape() != (d, d) || !linalg::is_projector(r, tol) {
            return invalid(format!("{name} must be a {d}x{d} orthogonal projector"));
        }
    }
    if max_abs(&(region1 * region2)) > tol.eq_tol * 10.0 {
        return invalid("the two regions overlap");
    }
    check_inside(p, region1, "first projector", tol)?;
    check_inside(q, region2, "second projector", tol)?;

    let k = n - m;
    let scale = binomial(n, k);
    let id = CMat::identity(d, d);
    let ops = |a: &CMat, b: &CMat| -> Vec<CMat> { (0..n).map(|i| if i < m { a.clone() } else { b.clone() }).collect() };
    let run = |list: Vec<CMat>| -> Result<f64> {
        let refs: Vec<&CMat> = list.iter().collect();
        Ok(scale * expect_slotwise(psi, &refs)?)
    };

    let weight = run(ops(region1, region2))?;
    if (weight - 1.0).abs() > tol.eq_tol * GRAY {
        return invalid(format!("state does not place {m} particles in region 1 and {k} in region 2 (weight {weight})"));
    }
    let mut comp = psi.tensor().clone();
    for slot in 0..n {
        comp = comp.apply_on_slot(slot, if slot < m { region1 } else { region2 })?;
    }
    let rows: Vec<usize> = (0..m).collect();
    let sv = linalg::svd(&comp.matricize(&rows)?);
    let sq: Vec<f64> = sv.values.iter().map(|s| s * s).collect();
    if tol.rank_of(&sq) != 1 {
        return invalid("state is entangled across the two regions");
    }

    let joint = run(ops(p, q))?;
    let marginal1 = run(ops(p, &id))?;
    let marginal2 = run(ops(&id, q))?;
    if n == 2 {
        let x = psi.tensor().matricize(&[0])?;
        let j2 = pair_expect(&x, p, q) + pair_expect(&x, q, p);
        let m1 = pair_expect(&x, p, &(&id - p)) + pair_expect(&x, &(&id - p), p);
        let m2 = pair_expect(&x, q, &(&id - q)) + pair_expect(&x, &(&id - q), q);
        let worst = (j2 - joint).abs().max((m1 - marginal1).abs()).max((m2 - marginal2).abs());
        if worst > tol.eq_tol * GRAY {
            return Err(Error::Inconsistency(format!("pair probabilities disagree with their general form by {worst:e}")));
        }
    }
    let product = marginal1 * marginal2;
    Ok(LocalFactorization { joint, marginal1, marginal2, product, factorizes: (joint - product).abs() <= tol.eq_tol })
}

/// Projectors on the +1 eigenvector of `|r><s| + h.c.` and on the -1
/// eigenvector of `i(|r><s| - h.c.)`: two observables that connect the
/// orbitals `r` and `s`.
pub fn connecting_projectors(r: &CVec, s: &CVec, tol: &Tolerances) -> Result<(CMat, CMat)> {
    if r.len() != s.len() {
        return invalid("orbitals differ in dimension");
    }
    if (r.norm() - 1.0).abs() > tol.eq_tol * 10.0 || (s.norm() - 1.0).abs() > tol.eq_tol * 10.0 || r.dotc(s).norm() > tol.eq_tol * 10.0 {
        return invalid("orbitals must be orthonormal");
    }
    let rs = linalg::outer(r, s);
    let a = &rs + rs.adjoint();
    let b = (&rs - rs.adjoint()) * c(0.0, 1.0);
    let pick = |m: &CMat, target: f64| -> Result<CMat> {
        let sp = linalg::hermitian_eigen(m, tol)?;
        let (i, _) =
            sp.values.iter().enumerate().min_by(|x, y| (x.1 - target).abs().total_cmp(&(y.1 - target).abs())).expect("nonempty spectrum");
        Ok(linalg::projector(&sp.vectors[i]))
    };
    Ok((pick(&a, 1.0)?, pick(&b, -1.0)?))
}

/// `Pr(A=1 & B=-1)` against `Pr(A=1)·Pr(B=-1)` on a fermion pair, for the
/// connecting observables of [`connecting_projectors`].
pub fn connecting_correlation(psi: &PureState, r: &CVec, s: &CVec, tol: &Tolerances) -> Result<LocalFactorization> {
    require_fermionic(psi, "state")?;
    if psi.n_slots() != 2 || psi.one_particle_dim() != Some(r.len()) {
        return invalid("expected a fermion pair matching the orbital dimension");
    }
    let (pa, pb) = connecting_projectors(r, s, tol)?;
    let x = psi.tensor().matricize(&[0])?;
    let id = CMat::identity(r.len(), r.len());
    let joint = pair_expect(&x, &pa, &pb) + pair_expect(&x, &pb, &pa);
    let exactly_one = |p: &CMat| pair_expect(&x, p, &(&id - p)) + pair_expect(&x, &(&id - p), p);
    let marginal1 = exactly_one(&pa);
    let marginal2 = exactly_one(&pb);
    let product = marginal1 * marginal2;
    Ok(LocalFactorization { joint, marginal1, marginal2, product, factorizes: (joint - product).abs() <= tol.eq_tol })
}

/// A single Slater state iff the one-body operator has rank `N` (its
/// spectrum is then flat at `1/N`). Orbitals are verified twice: each
/// "at least one particle in orbital i" projector has unit expectation and
/// the Slater state rebuilt from them matches `ψ`.
pub fn completely_non_entangled_fermions(psi: &PureState, tol: &Tolerances) -> Result<(bool, Option<Vec<CVec>>)> {
    require_fermionic(psi, "state")?;
    let n = psi.n_slots();
    let d = psi.one_particle_dim().unwrap_or(0);
    let sp = spectral(&one_body(psi)?, tol)?;
    let rank = sp.rank(tol);
    let flat = sp.values[..rank.min(n)].iter().all(|&l| (l - 1.0 / n as f64).abs() <= tol.eq_tol * GRAY);
    if rank != n || !flat {
        return Ok((false, None));
    }
    let orbitals = sp.vectors[..n].to_vec();
    let id = CMat::identity(d, d);
    for (i, o) in orbitals.iter().enumerate() {
        let q = &id - linalg::projector(o);
        let outside = psi.tensor().apply_on_all(&q)?.norm().powi(2);
        if outside > tol.eq_tol * GRAY {
            return Err(Error::Tolerance { what: format!("orbital {} occupation", i + 1), residual: outside });
        }
    }
    let fid = slater_state(&orbitals, tol)?.fidelity(psi)?;
    if 1.0 - fid > tol.eq_tol * GRAY {
        return Err(Error::Tolerance { what: "Slater reassembly".into(), residual: 1.0 - fid });
    }
    Ok((true, Some(orbitals)))
}

/// Outcome of [`discover_split`]. The search is a heuristic: a `None`
/// result does not prove that no split exists.
#[derive(Debug, Clone)]
pub struct SplitSearch {
    pub found: Option<(PureState, PureState)>,
    pub candidates_tried: usize,
    pub exhaustive: bool,
}

const MAX_CLUSTERS: usize = 12;

/// Looks for a group of `m` particles that splits off `ψ`. Candidate
/// occupied subspaces are unions of eigenspaces of the one-body operator;
/// each candidate group is then checked exactly with the subset test.
pub fn discover_split(psi: &PureState, m: usize, tol: &Tolerances) -> Result<SplitSearch> {
    require_fermionic(psi, "state")?;
    let n = psi.n_slots();
    if m == 0 || m >= n {
        return invalid(format!("group size must lie in 1..{n}, got {m}"));
    }
    let d = psi.one_particle_dim().unwrap_or(0);
    if let (true, Some(orbs)) = completely_non_entangled_fermions(psi, tol)? {
        let pi = slater_state(&orbs[..m], tol)?;
        let phi = slater_state(&orbs[m..], tol)?;
        return Ok(SplitSearch { found: Some((pi, phi)), candidates_tried: 1, exhaustive: false });
    }
    let sp = spectral(&one_body(psi)?, tol)?;
    let rank = sp.rank(tol);
    let mut clusters: Vec<Vec<CVec>> = Vec::new();
    let mut last = f64::NAN;
    for (l, v) in sp.values[..rank].iter().zip(&sp.vectors) {
        if (l - last).abs() <= tol.eq_tol * GRAY {
            clusters.last_mut().expect("started").push(v.clone());
        } else {
            clusters.push(vec![v.clone()]);
        }
        last = *l;
    }
    let nc = clusters.len().min(MAX_CLUSTERS);
    let mut masks: Vec<u32> = (1..(1u32 << nc)).collect();
    let size = |mask: u32| -> usize { (0..nc).filter(|i| mask >> i & 1 == 1).map(|i| clusters[i].len()).sum() };
    masks.sort_by_key(|&mask| (size(mask), mask));
    let mut tried = 0;
    for mask in masks {
        let dim = size(mask);
        if dim < m || rank - dim < n - m {
            continue;
        }
        tried += 1;
        let vs: Vec<CVec> = (0..nc).filter(|i| mask >> i & 1 == 1).flat_map(|i| clusters[i].iter().cloned()).collect();
        let p = projector_onto(&vs, d);
        let q = CMat::identity(d, d) - &p;
        let mut comp = psi.tensor().clone();
        for slot in 0..n {
            comp = comp.apply_on_slot(slot, if slot < m { &p } else { &q })?;
        }
        let rows: Vec<usize> = (0..m).collect();
        let sv = linalg::svd(&comp.matricize(&rows)?);
        let sq: Vec<f64> = sv.values.iter().map(|s| s * s).collect();
        if tol.rank_of(&sq) != 1 {
            continue;
        }
        let pi = match PureState::normalized(Tensor::new(vec![d; m], sv.left[0].clone())?, Sector::Fermionic, tol) {
            Ok(s) => s,
            Err(_) => continue,
        };
        if let Ok(v) = verify_split(psi, &pi, tol) {
            if let (true, Some(phi)) = (v.holds, v.phi) {
                return Ok(SplitSearch { found: Some((pi, phi)), candidates_tried: tried, exhaustive: false });
            }
        }
    }
    Ok(SplitSearch { found: None, candidates_tried: tried, exhaustive: false })
}

/// Contraction residual of the two groups and the property deficit
/// `1 - value` of their normalized antisymmetrized product.
pub fn approx_orthogonality(pi: &PureState, phi: &PureState, tol: &Tolerances) -> Result<(f64, f64)> {
    require_fermionic(pi, "first group")?;
    require_fermionic(phi, "second group")?;
    let residual = one_particle_orthogonal(pi, phi, tol)?.residual;
    let psi = sym_product(pi, phi, Symmetry::Antisymmetrize, tol)?.state;
    let value = subset_value(&psi, pi, tol)?.value;
    Ok((residual, (1.0 - value).max(0.0)))
}

const FAMILY_DIM: usize = 6;

fn e(i: usize) -> CVec {
    basis_vec(FAMILY_DIM, i)
}

fn pair_state(terms: &[(usize, usize)], tol: &Tolerances) -> Result<PureState> {
    let mut t = Tensor::zeros(vec![FAMILY_DIM; 2])?;
    for &(a, b) in terms {
        let s = slater_state(&[e(a), e(b)], tol)?;
        t = t.add(s.tensor())?;
    }
    PureState::normalized(t, Sector::Fermionic, tol)
}

/// Two fermion pairs in dimension 6: `Π = (e0∧e1 + e2∧e3)/√2` and
/// `Φ = ((e4 + ε e0)/‖·‖) ∧ e5`, which overlap on `e0` with strength `ε`.
pub fn overlap_family(eps: f64, tol: &Tolerances) -> Result<(PureState, PureState)> {
    let pi = pair_state(&[(0, 1), (2, 3)], tol)?;
    let a = (e(4) + e(0) * c(eps, 0.0)).normalize();
    let phi = slater_state(&[a, e(5)], tol)?;
    Ok((pi, phi))
}

/// Superposition of the family state with the same construction where the
/// two groups have swapped regions; no choice of groups splits it.
pub fn swapped_family_state(eps: f64, tol: &Tolerances) -> Result<PureState> {
    let (pi, phi) = overlap_family(eps, tol)?;
    let first = sym_product(&pi, &phi, Symmetry::Antisymmetrize, tol)?.state;
    let pi_b = pair_state(&[(2, 3), (4, 5)], tol)?;
    let a = (e(0) + e(4) * c(eps, 0.0)).normalize();
    let phi_b = slater_state(&[a, e(1)], tol)?;
    let second = sym_product(&pi_b, &phi_b, Symmetry::Antisymmetrize, tol)?.state;
    PureState::normalized(first.tensor().add(second.tensor())?, Sector::Fermionic, tol)
}

/// One line of [`approx_orthogonality_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxRow {
    pub eps: f64,
    pub residual: f64,
    pub deficit: f64,
    /// Deficit of the swapped superposition against the same group.
    pub entangled_deficit: f64,
}

/// Residual and deficit along the overlap family, plus the swapped
/// superposition, for each `ε`.
pub fn approx_orthogonality_report(eps: &[f64], tol: &Tolerances) -> Result<Vec<ApproxRow>> {
    eps.iter()
        .map(|&x| {
            let (pi, phi) = overlap_family(x, tol)?;
            let (residual, deficit) = approx_orthogonality(&pi, &phi, tol)?;
            let ent = swapped_family_state(x, tol)?;
            let entangled_deficit = 1.0 - subset_value(&ent, &pi, tol)?.value;
            Ok(ApproxRow { eps: x, residual, deficit, entangled_deficit })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identical2::has_complete_property;
    use crate::linalg::{projector, rvec};
    use crate::random;
    use proptest::prelude::*;
    use rand::Rng;

    fn t() -> Tolerances {
        Tolerances::default()
    }

    fn ev(d: usize, i: usize) -> CVec {
        basis_vec(d, i)
    }

    fn slater(d: usize, ix: &[usize]) -> PureState {
        let orbs: Vec<CVec> = ix.iter().map(|&i| ev(d, i)).collect();
        slater_state(&orbs, &t()).unwrap()
    }

    fn same_span(a: &[CVec], b: &[CVec], d: usize) -> bool {
        a.len() == b.len() && max_abs(&(projector_onto(a, d) - projector_onto(b, d))) < 1e-10
    }

    /// Random fermion state on `m` slots supported on the orbitals `frame`.
    fn random_group<R: Rng>(frame: &[CVec], m: usize, rng: &mut R) -> PureState {
        let d = frame[0].len();
        let mut t = Tensor::zeros(vec![d; m]).unwrap();
        for ix in subsets(frame.len(), m) {
            let orbs: Vec<CVec> = ix.iter().map(|&i| frame[i].clone()).collect();
            let z = c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            t = t.add(&slater_state(&orbs, &t0()).unwrap().tensor().scaled(z)).unwrap();
        }
        PureState::normalized(t, Sector::Fermionic, &t0()).unwrap()
    }

    fn t0() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn v_perp_of_pair_in_d4() {
        let v = v_perp(&catalog_pair(4), &t()).unwrap();
        assert!(same_span(&v, &[ev(4, 2), ev(4, 3)], 4));
    }

    fn catalog_pair(d: usize) -> PureState {
        crate::catalog::fermion_pair(d)
    }

    #[test]
    fn full_rank_pair_has_no_complement() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let pi = PureState::from_amps(vec![2, 2], &[ZERO, c(0.0, h), c(0.0, -h), ZERO], Sector::Fermionic).unwrap();
        assert!(v_perp(&pi, &t()).unwrap().is_empty());
        assert!(matches!(delta_partition(&pi, &t()), Err(Error::Unsplittable(_))));
    }

    #[test]
    fn slater_triple_complement() {
        let pi = slater(5, &[0, 1, 2]);
        assert!(same_span(&v_perp(&pi, &t()).unwrap(), &[ev(5, 3), ev(5, 4)], 5));
        let part = delta_partition(&pi, &t()).unwrap();
        assert_eq!(part.delta, vec![0, 1, 2]);
        assert_eq!(part.delta_perp, vec![3, 4]);
    }

    #[test]
    fn partition_of_pair() {
        let part = delta_partition(&catalog_pair(4), &t()).unwrap();
        assert_eq!((part.delta.clone(), part.delta_perp.clone()), (vec![0, 1], vec![2, 3]));
        assert!(max_abs(&(part.delta_projector() + part.delta_perp_projector() - CMat::identity(4, 4))) < 1e-12);
    }

    #[test]
    fn one_particle_orthogonality_examples() {
        let pi = slater(4, &[0, 1]);
        let ov =
            one_particle_orthogonal(&pi, &PureState::from_vector(&ev(4, 2)).unwrap().with_sector(Sector::Fermionic, &t()).unwrap(), &t())
                .unwrap();
        assert!(ov.orthogonal && ov.residual < 1e-15);
        let part = ov.common_basis.unwrap();
        assert_eq!(part.delta.len(), 2);
        let ov = one_particle_orthogonal(&pi, &fermion_one(4, 1), &t()).unwrap();
        assert!(!ov.orthogonal && ov.residual > 0.1);
    }

    fn fermion_one(d: usize, i: usize) -> PureState {
        PureState::from_vector(&ev(d, i)).unwrap().with_sector(Sector::Fermionic, &t()).unwrap()
    }

    #[test]
    fn small_overlap_is_reported() {
        let (pi, phi) = overlap_family(1e-3, &t()).unwrap();
        let ov = one_particle_orthogonal(&pi, &phi, &t()).unwrap();
        assert!(!ov.orthogonal);
        assert!(ov.residual > 1e-4 && ov.residual < 1e-2, "{}", ov.residual);
    }

    #[test]
    fn assemble_examples() {
        let s = assemble_split(&slater(3, &[0, 1]), &fermion_one(3, 2), &t()).unwrap();
        assert!((s.assembled.fidelity(&slater(3, &[0, 1, 2])).unwrap() - 1.0).abs() < 1e-14);
        assert!((s.raw_norm_sq - 2.0 / 6.0).abs() < 1e-14);
        let s = assemble_split(&slater(4, &[0, 1]), &slater(4, &[2, 3]), &t()).unwrap();
        assert!((s.assembled.fidelity(&slater(4, &[0, 1, 2, 3])).unwrap() - 1.0).abs() < 1e-14);
        assert!((s.assembled.tensor().norm() - 1.0).abs() < 1e-14);
        assert!(assemble_split(&slater(4, &[0, 1]), &fermion_one(4, 1), &t()).is_err());
    }

    #[test]
    fn subset_value_of_assembled_and_perturbed() {
        let s = assemble_split(&slater(4, &[0, 1]), &fermion_one(4, 2), &t()).unwrap();
        let chk = subset_property_check(&s.assembled, &s.pi_state, &t()).unwrap();
        assert!(chk.holds && (chk.value - 1.0).abs() < 1e-13);
        assert_eq!(chk.n_omega, 2);
        let cross = slater(4, &[0, 2, 3]);
        let mix = s.assembled.tensor().scaled(c(0.9, 0.0)).add(&cross.tensor().scaled(c(0.436, 0.0))).unwrap();
        let psi = PureState::normalized(mix, Sector::Fermionic, &t()).unwrap();
        let chk = subset_property_check(&psi, &s.pi_state, &t()).unwrap();
        assert!(!chk.holds);
        assert!((chk.value - 0.81 / (0.81 + 0.436 * 0.436)).abs() < 1e-12);
    }

    #[test]
    fn pair_subset_matches_complete_property() {
        let psi = catalog_pair(2);
        let chk = subset_property_check(&psi, &fermion_one(2, 0), &t()).unwrap();
        assert!(chk.holds);
        assert!(has_complete_property(&psi, &projector(&ev(2, 0)), &t()).unwrap().holds(&t()));
    }

    #[test]
    fn unsplittable_group_is_invalid_for_subset_test() {
        let full = pair_state_d4();
        let psi = slater(4, &[0, 1, 2]);
        assert!(matches!(subset_property_check(&psi, &full, &t()), Err(Error::InvalidInput(_))));
    }

    /// `(e0∧e1 + e2∧e3)/√2` in dimension 4: occupies everything.
    fn pair_state_d4() -> PureState {
        let sum = slater(4, &[0, 1]).tensor().add(slater(4, &[2, 3]).tensor()).unwrap();
        PureState::normalized(sum, Sector::Fermionic, &t()).unwrap()
    }

    #[test]
    fn verify_recovers_single_orbital() {
        let s = assemble_split(&slater(4, &[0, 1]), &fermion_one(4, 2), &t()).unwrap();
        let v = verify_split(&s.assembled, &s.pi_state, &t()).unwrap();
        assert!(v.holds);
        assert!((v.phi.unwrap().fidelity(&fermion_one(4, 2)).unwrap() - 1.0).abs() < 1e-13);
    }

    /// Antisymmetrized `(|↑↑↑> + |↓↓↓>) ⊗ |c0 c1 c2>` with index `spin*3 + cell`.
    fn spin_ghz_fermions() -> PureState {
        let d = 6;
        let mut t = Tensor::zeros(vec![d; 3]).unwrap();
        for s in 0..2 {
            let orbs: Vec<CVec> = (0..3).map(|x| ev(d, s * 3 + x)).collect();
            let prod = crate::state::product_of(&orbs).unwrap();
            t = t.add(prod.tensor()).unwrap();
        }
        let a = crate::permsym::project(&t, Symmetry::Antisymmetrize).unwrap();
        PureState::normalized(a, Sector::Fermionic, &t0()).unwrap()
    }

    #[test]
    fn genuinely_entangled_fermions_do_not_split() {
        let psi = spin_ghz_fermions();
        let v = verify_split(&psi, &fermion_one(6, 0), &t()).unwrap();
        assert!(!v.holds);
        assert!((v.value - 0.5).abs() < 1e-12);
        assert!(discover_split(&psi, 1, &t()).unwrap().found.is_none());
        assert!(!completely_non_entangled_fermions(&psi, &t()).unwrap().0);
    }

    #[test]
    fn spin_up_at_right_splits_off() {
        // index spin*2 + cell, R = cell 0, L = cell 1
        let d = 4;
        let up_r = ev(d, 0);
        let down_l = ev(d, 3);
        let psi = slater_state(&[up_r.clone(), down_l.clone()], &t()).unwrap();
        let pi = PureState::from_vector(&up_r).unwrap().with_sector(Sector::Fermionic, &t()).unwrap();
        let v = verify_split(&psi, &pi, &t()).unwrap();
        assert!(v.holds);
        assert!((v.phi.unwrap().amps()[3].norm() - 1.0).abs() < 1e-13);
    }

    fn regions(d: usize, a: &[usize], b: &[usize]) -> (CMat, CMat) {
        let pa: Vec<CVec> = a.iter().map(|&i| ev(d, i)).collect();
        let pb: Vec<CVec> = b.iter().map(|&i| ev(d, i)).collect();
        (projector_onto(&pa, d), projector_onto(&pb, d))
    }

    #[test]
    fn local_probabilities_factorize_for_a_split_pair() {
        let d = 4;
        let pi = fermion_vec(&(ev(d, 0) + ev(d, 1) * c(0.0, 1.0)));
        let phi = fermion_vec(&(ev(d, 2) - ev(d, 3)));
        let psi = assemble_split(&pi, &phi, &t()).unwrap().assembled;
        let (r1, r2) = regions(d, &[0, 1], &[2, 3]);
        let lf = local_factorizability(&psi, 1, &r1, &r2, &projector(&ev(d, 0)), &projector(&ev(d, 2)), &t()).unwrap();
        assert!(lf.factorizes);
        assert!((lf.joint - 0.25).abs() < 1e-14 && (lf.marginal1 - 0.5).abs() < 1e-14 && (lf.marginal2 - 0.5).abs() < 1e-14);
        let zero = CMat::zeros(d, d);
        let lf = local_factorizability(&psi, 1, &r1, &r2, &zero, &projector(&ev(d, 2)), &t()).unwrap();
        assert!(lf.joint.abs() < 1e-15 && lf.product.abs() < 1e-15);
        assert!(local_factorizability(&psi, 1, &r1, &r2, &projector(&ev(d, 2)), &projector(&ev(d, 2)), &t()).is_err());
    }

    fn fermion_vec(v: &CVec) -> PureState {
        PureState::from_vector(v).unwrap().with_sector(Sector::Fermionic, &t()).unwrap()
    }

    #[test]
    fn connecting_observables_correlate() {
        let d = 4;
        let psi = slater(d, &[0, 2]);
        let (pa, pb) = connecting_projectors(&ev(d, 0), &ev(d, 2), &t()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let a_plus = rvec(&[h, 0.0, h, 0.0]);
        let b_minus = (ev(d, 0) + ev(d, 2) * c(0.0, 1.0)) * c(h, 0.0);
        assert!(max_abs(&(pa - projector(&a_plus))) < 1e-12);
        assert!(max_abs(&(pb - projector(&b_minus))) < 1e-12);
        let cc = connecting_correlation(&psi, &ev(d, 0), &ev(d, 2), &t()).unwrap();
        assert!((cc.joint - 0.5).abs() < 1e-12 && (cc.product - 1.0).abs() < 1e-12);
        assert!(!cc.factorizes);
    }

    #[test]
    fn slater_detection() {
        let (flag, orbs) = completely_non_entangled_fermions(&slater(5, &[0, 1, 2]), &t()).unwrap();
        assert!(flag);
        assert!(same_span(&orbs.unwrap(), &[ev(5, 0), ev(5, 1), ev(5, 2)], 5));
        let sum = slater(5, &[0, 1, 2]).tensor().add(slater(5, &[0, 1, 3]).tensor()).unwrap();
        let psi = PureState::normalized(sum, Sector::Fermionic, &t()).unwrap();
        // e0∧e1∧(e2+e3) is itself a Slater state
        assert!(completely_non_entangled_fermions(&psi, &t()).unwrap().0);
        let sum = slater(6, &[0, 1, 2]).tensor().add(slater(6, &[3, 4, 5]).tensor()).unwrap();
        let psi = PureState::normalized(sum, Sector::Fermionic, &t()).unwrap();
        assert!(!completely_non_entangled_fermions(&psi, &t()).unwrap().0);
        assert!(completely_non_entangled_fermions(&catalog_pair(2), &t()).unwrap().0);
    }

    #[test]
    fn discovery_finds_planted_split() {
        let mut rng = random::rng(7);
        let u = random::unitary_with(6, &mut rng);
        let frame: Vec<CVec> = (0..6).map(|j| u.column(j).into_owned()).collect();
        let pi = random_group(&frame[..4], 2, &mut rng);
        let phi = slater_state(&frame[4..5], &t()).unwrap();
        let psi = assemble_split(&pi, &phi, &t()).unwrap().assembled;
        let found = discover_split(&psi, 2, &t()).unwrap();
        let (pi2, _) = found.found.expect("split found");
        assert!(subset_property_check(&psi, &pi2, &t()).unwrap().holds);
        assert!(!found.exhaustive);
    }

    #[test]
    fn overlap_family_deficit_shrinks() {
        let rows = approx_orthogonality_report(&[0.1, 0.01, 0.001, 0.0], &t()).unwrap();
        assert!(rows[3].deficit < 1e-14 && rows[3].residual < 1e-15);
        for w in rows.windows(2) {
            assert!(w[1].deficit < w[0].deficit);
        }
        assert!(rows.iter().all(|r| r.entangled_deficit > 0.1));
        assert!((rows[3].entangled_deficit - 0.25).abs() < 1e-12);
    }

    /// Annihilation of cross placements: contracting any state built from
    /// free orbitals against the antisymmetrized product, on the last `K`
    /// slots, leaves exactly `K!M!/N!` times the original group.
    #[test]
    fn cross_placements_vanish() {
        let mut rng = random::rng(3);
        let u = random::unitary_with(5, &mut rng);
        let frame: Vec<CVec> = (0..5).map(|j| u.column(j).into_owned()).collect();
        let pi = random_group(&frame[..3], 2, &mut rng);
        let phi = random_group(&frame[3..], 2, &mut rng);
        let chi = random_group(&frame[3..], 2, &mut rng);
        let raw = crate::permsym::project(&pi.tensor().tensor(phi.tensor()).unwrap(), Symmetry::Antisymmetrize).unwrap();
        let x = raw.matricize(&[0, 1]).unwrap();
        let got = x * chi.amps().map(|z| z.conj());
        let want = pi.amps() * (chi.amps().dotc(phi.amps()) * c(2.0 * 2.0 / 24.0, 0.0));
        assert!((got - want).norm() < 1e-13);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn complement_independent_of_saturated_slot(seed in any::<u64>(), m in 1usize..4, d in 4usize..7) {
            let mut rng = random::rng(seed);
            let u = random::unitary_with(d, &mut rng);
            // fewer orbitals than m + 2 force a Slater state for m >= 2
            let occ = if m == 1 { 1 } else { m + 2 };
            prop_assume!(occ < d);
            let frame: Vec<CVec> = (0..occ).map(|j| u.column(j).into_owned()).collect();
            let pi = random_group(&frame, m, &mut rng);
            // occupied_and_free raises Inconsistency when slots disagree
            let free = v_perp(&pi, &t()).unwrap();
            let rest: Vec<CVec> = (occ..d).map(|j| u.column(j).into_owned()).collect();
            prop_assert!(same_span(&free, &rest, d));
        }

        #[test]
        fn split_round_trip(seed in any::<u64>(), m in 1usize..4, k in 1usize..3, extra in 0usize..2) {
            let d = (m + k + 1 + extra).min(6);
            prop_assume!(m + k <= 5 && m + k < d);
            let mut rng = random::rng(seed);
            let u = random::unitary_with(d, &mut rng);
            let frame: Vec<CVec> = (0..d).map(|j| u.column(j).into_owned()).collect();
            let split_at = (m + 1).min(d - k);
            let pi = random_group(&frame[..split_at], m, &mut rng);
            let phi = random_group(&frame[split_at..], k, &mut rng);
            let s = assemble_split(&pi, &phi, &t()).unwrap();
            let n = m + k;
            let want = crate::permsym::factorial(k) * crate::permsym::factorial(m) / crate::permsym::factorial(n);
            prop_assert!((s.raw_norm_sq / want - 1.0).abs() < 1e-10);
            let chk = subset_property_check(&s.assembled, &pi, &t()).unwrap();
            prop_assert!((chk.value - 1.0).abs() < 1e-10);
            let v = verify_split(&s.assembled, &pi, &t()).unwrap();
            prop_assert!(v.phi.unwrap().fidelity(&phi).unwrap() >= 1.0 - 1e-9);
        }

        #[test]
        fn omega_basis_is_orthonormal(seed in any::<u64>(), m in 1usize..3, n_extra in 1usize..3) {
            let d = 5;
            let mut rng = random::rng(seed);
            let u = random::unitary_with(d, &mut rng);
            let frame: Vec<CVec> = (0..d).map(|j| u.column(j).into_owned()).collect();
            let pi = random_group(&frame[..m + 1], m, &mut rng);
            let n = m + n_extra;
            let om = omega_basis(&pi, n, &t()).unwrap();
            for (i, a) in om.iter().enumerate() {
                for (j, b) in om.iter().enumerate() {
                    let g = a.inner(b).unwrap();
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((g - c(want, 0.0)).norm() < 1e-10);
                }
            }
            // the explicit basis reproduces the implicit value on a random state
            let psi = random_group(&frame, n, &mut rng);
            let direct: f64 = om.iter().map(|w| w.inner(&psi).unwrap().norm_sqr()).sum();
            prop_assert!((direct - subset_property_check(&psi, &pi, &t()).unwrap().value).abs() < 1e-10);
        }

        #[test]
        fn pair_projector_reduces(seed in any::<u64>(), d in 3usize..6) {
            let mut rng = random::rng(seed);
            let u = random::unitary_with(d, &mut rng);
            let all: Vec<CVec> = (0..d).map(|j| u.column(j).into_owned()).collect();
            let psi = random_group(&all, 2, &mut rng);
            let pi = fermion_vec(&random::unit_vec(d, &mut rng));
            // subset_value cross-checks against the reduced pair form internally
            let v = subset_property_check(&psi, &pi, &t()).unwrap().value;
            let x = psi.tensor().matricize(&[0]).unwrap();
            let p = projector(pi.amps());
            let q = CMat::identity(d, d) - &p;
            let reduced = pair_expect(&x, &q, &p) + pair_expect(&x, &p, &q);
            prop_assert!((v - reduced).abs() < 1e-10);
        }

        #[test]
        fn transition_sums_inside_regions(seed in any::<u64>()) {
            let (d, m, k) = (6, 2, 2);
            let mut rng = random::rng(seed);
            let u = random::unitary_with(d, &mut rng);
            let frame: Vec<CVec> = (0..d).map(|j| u.column(j).into_owned()).collect();
            let (r1, r2) = (&frame[..3], &frame[3..]);
            let chi = random_group(r1, m, &mut rng);
            let tau = random_group(r1, m, &mut rng);
            let mu = random_group(r2, k, &mut rng);
            let nu = random_group(r2, k, &mut rng);
            let target = assemble_split(&tau, &nu, &t()).unwrap().assembled;
            let sum_over = |fixed: &PureState, others: Vec<PureState>, fixed_first: bool| -> f64 {
                others.iter().map(|o| {
                    let (a, b) = if fixed_first { (fixed, o) } else { (o, fixed) };
                    let s = assemble_split(a, b, &t()).unwrap().assembled;
                    s.inner(&target).unwrap().norm_sqr()
                }).sum()
            };
            let xis = theta_basis(r2, k, Symmetry::Antisymmetrize, &t()).unwrap();
            let ups = theta_basis(r1, m, Symmetry::Antisymmetrize, &t()).unwrap();
            let lhs1 = sum_over(&chi, xis, true);
            let lhs2 = sum_over(&mu, ups, false);
            prop_assert!((lhs1 - chi.fidelity(&tau).unwrap()).abs() < 1e-10);
            prop_assert!((lhs2 - mu.fidelity(&nu).unwrap()).abs() < 1e-10);
        }
    }
}
