//! Two identical particles: the "at least one particle has property P"
//! projector, complete and unsharp property tests, the fermion and boson pair
//! decisions with witness extraction, and position-tagged correlations.

use std::fmt;

use crate::density::{one_body, spectral};
use crate::error::{invalid, Error, Result};
use crate::linalg::{self, c, kron, lex_cmp, CMat, CVec, C64};
use crate::permsym::{self, Symmetry};
use crate::state::{PureState, Sector, Tensor};
use crate::tol::Tolerances;

fn identical_pair(psi: &PureState) -> Result<(CMat, Symmetry)> {
    if psi.n_slots() != 2 {
        return invalid(format!("expected a two-particle state, got {} slots", psi.n_slots()));
    }
    let kind = Symmetry::of(psi.sector())?;
    Ok((psi.tensor().matricize(&[0])?, kind))
}

/// `<ψ|A⊗B|ψ>` for a two-slot coefficient matrix.
pub(crate) fn pair_expect(coef: &CMat, a: &CMat, b: &CMat) -> f64 {
    (coef.adjoint() * a * coef * b.transpose()).trace().re
}

fn check_projector(p: &CMat, tol: &Tolerances) -> Result<()> {
    if !p.is_square() {
        return invalid("projector must be square");
    }
    if !linalg::is_projector(p, tol) {
        return invalid("operator is not an orthogonal projector");
    }
    Ok(())
}

/// `P⊗I + I⊗P - P⊗P`.
pub fn e_projector(p: &CMat, tol: &Tolerances) -> Result<CMat> {
    check_projector(p, tol)?;
    let i = CMat::identity(p.nrows(), p.nrows());
    Ok(kron(p, &i) + kron(&i, p) - kron(p, p))
}

/// `P⊗(I-P) + (I-P)⊗P + P⊗P`, the exclusive rewrite of [`e_projector`].
pub fn e_projector_exclusive(p: &CMat, tol: &Tolerances) -> Result<CMat> {
    check_projector(p, tol)?;
    let q = CMat::identity(p.nrows(), p.nrows()) - p;
    Ok(kron(p, &q) + kron(&q, p) + kron(p, p))
}

/// `P⊗I + I⊗P`, which agrees with [`e_projector`] on antisymmetric states
/// when `P` has rank one.
pub fn e_projector_fermionic(p: &CMat, tol: &Tolerances) -> Result<CMat> {
    check_projector(p, tol)?;
    let i = CMat::identity(p.nrows(), p.nrows());
    Ok(kron(p, &i) + kron(&i, p))
}

/// `<E>` from the inclusive form and from the exclusive rewrite.
fn e_values(coef: &CMat, p: &CMat) -> (f64, f64) {
    let i = CMat::identity(p.nrows(), p.nrows());
    let q = &i - p;
    let inclusive = pair_expect(coef, p, &i) + pair_expect(coef, &i, p) - pair_expect(coef, p, p);
    let exclusive = pair_expect(coef, p, &q) + pair_expect(coef, &q, p) + pair_expect(coef, p, p);
    (inclusive, exclusive)
}

#[derive(Debug, Clone)]
pub struct PropertyWitness {
    pub projector: CMat,
    pub trace_value: f64,
    pub complete: bool,
}

impl PropertyWitness {
    pub fn holds(&self, tol: &Tolerances) -> bool {
        (self.trace_value - 1.0).abs() <= tol.eq_tol
    }
}

/// `<ψ|E|ψ>` for a rank-one single-particle projector.
pub fn has_complete_property(psi: &PureState, p: &CMat, tol: &Tolerances) -> Result<PropertyWitness> {
    let (coef, _) = identical_pair(psi)?;
    check_projector(p, tol)?;
    if p.nrows() != coef.nrows() {
        return invalid(format!("projector is {}x{}, particles have dimension {}", p.nrows(), p.ncols(), coef.nrows()));
    }
    let rank = linalg::projector_rank(p);
    if rank != 1 {
        return invalid(format!("a complete property needs a rank-1 projector, got rank {rank}"));
    }
    let (inclusive, exclusive) = e_values(&coef, p);
    if (inclusive - exclusive).abs() > tol.eq_tol {
        return Err(Error::Tolerance { what: "E-projector rewrite".into(), residual: (inclusive - exclusive).abs() });
    }
    Ok(PropertyWitness { projector: p.clone(), trace_value: inclusive, complete: true })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unsharp {
    pub holds: bool,
    pub value: f64,
    /// `‖(I-P)⊗(I-P)ψ‖²`, which must equal `1 - value`.
    pub annihilation_residual: f64,
}

/// `<E_M>` for a projector of any rank.
pub fn unsharp_property(psi: &PureState, p_m: &CMat, tol: &Tolerances) -> Result<Unsharp> {
    let (coef, _) = identical_pair(psi)?;
    check_projector(p_m, tol)?;
    if p_m.nrows() != coef.nrows() {
        return invalid("projector dimension does not match the particles");
    }
    let (value, exclusive) = e_values(&coef, p_m);
    let q = CMat::identity(p_m.nrows(), p_m.nrows()) - p_m;
    let outside = (&q * &coef * q.transpose()).norm_squared();
    let drift = (value - exclusive).abs().max((1.0 - outside - value).abs());
    if drift > tol.eq_tol {
        return Err(Error::Tolerance { what: "unsharp property cross-check".into(), residual: drift });
    }
    Ok(Unsharp { holds: (value - 1.0).abs() <= tol.eq_tol, value, annihilation_residual: outside })
}

/// Smallest span of leading one-body eigenvectors that carries an unsharp
/// property. This is a greedy heuristic, not an exhaustive search; `None`
/// means no proper subspace was found along that path.
pub fn greedy_unsharp_search(psi: &PureState, tol: &Tolerances) -> Result<Option<(CMat, usize)>> {
    identical_pair(psi)?;
    let sp = spectral(&one_body(psi)?, tol)?;
    let d = sp.values.len();
    for k in 1..d {
        let p = linalg::projector_onto(&sp.vectors[..k], d);
        if unsharp_property(psi, &p, tol)?.holds {
            return Ok(Some((p, k)));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairFormKind {
    FermionSlater,
    BosonDual,
}

/// Canonical expansion of a two-particle state.
///
/// Fermions: `ψ = Σ_k c_k (a_k⊗b_k - b_k⊗a_k)/√2`, vectors stored as
/// `a_1, b_1, a_2, b_2, ...`. Bosons: `ψ = Σ_k c_k u_k⊗u_k`.
#[derive(Debug, Clone)]
pub struct PairCanonicalForm {
    pub kind: PairFormKind,
    pub coeffs: Vec<f64>,
    pub vectors: Vec<CVec>,
}

impl PairCanonicalForm {
    pub fn reassemble(&self) -> CMat {
        let d = self.vectors[0].len();
        let mut m = CMat::zeros(d, d);
        match self.kind {
            PairFormKind::FermionSlater => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                for (k, ck) in self.coeffs.iter().enumerate() {
                    let (a, b) = (&self.vectors[2 * k], &self.vectors[2 * k + 1]);
                    m += (a * b.transpose() - b * a.transpose()) * c(ck * s, 0.0);
                }
            }
            PairFormKind::BosonDual => {
                for (ck, u) in self.coeffs.iter().zip(&self.vectors) {
                    m += u * u.transpose() * c(*ck, 0.0);
                }
            }
        }
        m
    }
}

/// Slater normal form by deflation along leading one-body eigenvectors.
fn fermion_form(coef: &CMat, tol: &Tolerances) -> Result<PairCanonicalForm> {
    let d = coef.nrows();
    let mut rest = coef.clone();
    let mut coeffs = Vec::new();
    let mut vectors = Vec::new();
    let s2 = 2f64.sqrt();
    for _ in 0..d / 2 {
        let rho = &rest * rest.adjoint();
        let sp = linalg::hermitian_eigen(&((&rho + rho.adjoint()) * c(0.5, 0.0)), tol)?;
        if sp.values[0] <= tol.rank_tol {
            break;
        }
        let a = sp.vectors[0].clone();
        let b_raw = rest.transpose() * a.conjugate();
        let norm = b_raw.norm();
        let ck = s2 * norm;
        let b = b_raw / c(norm, 0.0);
        rest -= (&a * b.transpose() - &b * a.transpose()) * c(ck / s2, 0.0);
        coeffs.push(ck);
        vectors.push(a);
        vectors.push(b);
    }
    let form = PairCanonicalForm { kind: PairFormKind::FermionSlater, coeffs, vectors };
    let err = linalg::max_abs(&(form.reassemble() - coef));
    if err > tol.eq_tol * 10.0 {
        return Err(Error::Tolerance { what: "fermion normal form reassembly".into(), residual: err });
    }
    Ok(form)
}

/// Takagi factorisation `C = Σ s_k u_k u_kᵀ` of a complex symmetric matrix,
/// through the real symmetric embedding `[[Re C, Im C], [Im C, -Re C]]`.
pub fn takagi(coef: &CMat, tol: &Tolerances) -> (Vec<f64>, Vec<CVec>) {
    let d = coef.nrows();
    let mut m = nalgebra::DMatrix::<f64>::zeros(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            let z = (coef[(i, j)] + coef[(j, i)]) * 0.5;
            m[(i, j)] = z.re;
            m[(i, j + d)] = z.im;
            m[(i + d, j)] = z.im;
            m[(i + d, j + d)] = -z.re;
        }
    }
    let eig = m.symmetric_eigen();
    let mut idx: Vec<usize> = (0..2 * d).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let top = eig.eigenvalues[idx[0]].max(0.0);
    let mut values = Vec::new();
    let mut vectors = Vec::new();
    for &k in idx.iter().take(d) {
        let s = eig.eigenvalues[k];
        if s * s <= tol.rank_tol * top * top || s <= 0.0 {
            break;
        }
        let col = eig.eigenvectors.column(k);
        let mut u = CVec::from_iterator(d, (0..d).map(|i| c(col[i], col[i + d])));
        sign_fix(&mut u);
        values.push(s);
        vectors.push(u);
    }
    (values, vectors)
}

/// Flips the overall sign so that the first significant entry is
/// lexicographically positive; leaves `u⊗u` unchanged.
fn sign_fix(u: &mut CVec) {
    let top = u.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(z) = u.iter().find(|z| z.norm() > 1e-9 * top).copied() {
        if z.re < -1e-12 * top || (z.re.abs() <= 1e-12 * top && z.im < 0.0) {
            u.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Shape of a two-particle state relative to the product forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairShape {
    /// Antisymmetrized product of two orthogonal states.
    Slater,
    /// Both bosons in one state.
    SameState,
    /// Symmetrized product of two orthogonal states.
    OrthogonalSymmetrized,
    /// Symmetrized product of two non-orthogonal, non-parallel states.
    ObliqueSymmetrized {
        overlap: f64,
    },
    Entangled,
}

impl fmt::Display for PairShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairShape::Slater => f.write_str("slater"),
            PairShape::SameState => f.write_str("same_state"),
            PairShape::OrthogonalSymmetrized => f.write_str("orthogonal_symmetrized"),
            PairShape::ObliqueSymmetrized { .. } => f.write_str("oblique_symmetrized"),
            PairShape::Entangled => f.write_str("entangled"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PairDecision {
    pub non_entangled: bool,
    pub shape: PairShape,
    pub form: PairCanonicalForm,
    /// Nonzero one-body eigenvalues, descending.
    pub spectrum: Vec<f64>,
    /// `Φ0, Ξ` (fermions), `Φ0` / `Φ0, Θ` (bosons), or the two one-sided
    /// witnesses of an oblique boson pair.
    pub witnesses: Vec<CVec>,
}

/// Fermions: non-entangled iff the one-body spectrum is `{1/2, 1/2}`.
/// Bosons: non-entangled iff it is `{1}` or `{1/2, 1/2}`.
pub fn decide_pair(psi: &PureState, tol: &Tolerances) -> Result<PairDecision> {
    let (coef, kind) = identical_pair(psi)?;
    let sp = spectral(&one_body(psi)?, tol)?;
    let r = sp.rank(tol);
    let spectrum = sp.values[..r].to_vec();
    let decision = match kind {
        Symmetry::Antisymmetrize => {
            let form = fermion_form(&coef, tol)?;
            if r == 2 {
                if spectrum.iter().any(|l| (l - 0.5).abs() > tol.eq_tol * 10.0) {
                    return Err(Error::Inconsistency(format!("rank-2 fermion spectrum {spectrum:?} is not flat")));
                }
                let phi0 = sp.vectors[0].clone();
                let xi = coef.transpose() * phi0.conjugate() * c(2f64.sqrt(), 0.0);
                PairDecision { non_entangled: true, shape: PairShape::Slater, form, spectrum, witnesses: vec![phi0, xi] }
            } else {
                PairDecision { non_entangled: false, shape: PairShape::Entangled, form, spectrum, witnesses: vec![] }
            }
        }
        Symmetry::Symmetrize => {
            let (s, u) = takagi(&coef, tol);
            let form = PairCanonicalForm { kind: PairFormKind::BosonDual, coeffs: s.clone(), vectors: u.clone() };
            let err = linalg::max_abs(&(form.reassemble() - &coef));
            if err > tol.eq_tol * 10.0 {
                return Err(Error::Tolerance { what: "boson normal form reassembly".into(), residual: err });
            }
            match s.len() {
                1 => PairDecision { non_entangled: true, shape: PairShape::SameState, form, spectrum, witnesses: vec![u[0].clone()] },
                2 => {
                    let (r1, r2) = (s[0].sqrt(), s[1].sqrt());
                    let i = c(0.0, 1.0);
                    let mut phi = (&u[0] * c(r1, 0.0) + &u[1] * (i * r2)).normalize();
                    let mut chi = (&u[0] * c(r1, 0.0) - &u[1] * (i * r2)).normalize();
                    linalg::fix_phase(&mut phi);
                    linalg::fix_phase(&mut chi);
                    if lex_cmp(&phi, &chi) == std::cmp::Ordering::Less {
                        std::mem::swap(&mut phi, &mut chi);
                    }
                    let pair = &phi * chi.transpose() + &chi * phi.transpose();
                    let amp = pair.dotc(&coef) / c(pair.norm_squared(), 0.0);
                    chi *= amp / amp.norm();
                    let overlap = phi.dotc(&chi).norm();
                    let orthogonal = (spectrum[0] - spectrum[1]).abs() <= tol.eq_tol * 10.0;
                    let shape = if orthogonal { PairShape::OrthogonalSymmetrized } else { PairShape::ObliqueSymmetrized { overlap } };
                    PairDecision { non_entangled: orthogonal, shape, form, spectrum, witnesses: vec![phi, chi] }
                }
                _ => PairDecision { non_entangled: false, shape: PairShape::Entangled, form, spectrum, witnesses: vec![] },
            }
        }
    };
    verify_witnesses(psi, &coef, &decision, tol)?;
    Ok(decision)
}

fn verify_witnesses(psi: &PureState, coef: &CMat, dec: &PairDecision, tol: &Tolerances) -> Result<()> {
    for w in &dec.witnesses {
        let v = has_complete_property(psi, &linalg::projector(w), tol)?.trace_value;
        if (v - 1.0).abs() > tol.eq_tol * 10.0 {
            return Err(Error::Tolerance { what: "witness property value".into(), residual: (v - 1.0).abs() });
        }
    }
    let rebuilt = match (dec.shape, dec.witnesses.as_slice()) {
        (PairShape::Slater, [a, b]) => (a * b.transpose() - b * a.transpose()) * c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        (PairShape::SameState, [u]) => u * u.transpose(),
        (PairShape::OrthogonalSymmetrized, [a, b]) => (a * b.transpose() + b * a.transpose()) * c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        _ => return Ok(()),
    };
    let err = linalg::max_abs(&(rebuilt - coef));
    if err > tol.eq_tol * 10.0 {
        return Err(Error::Tolerance { what: "witness reassembly".into(), residual: err });
    }
    Ok(())
}

/// `|<alt|ψ>|` where `alt` is the (anti)symmetrized pair built from
/// `α = a w1 + b w2`, `β = -b* w1 + a* w2`.
pub fn alternative_pair_overlap(psi: &PureState, w1: &CVec, w2: &CVec, a: C64, b: C64) -> Result<f64> {
    let (coef, kind) = identical_pair(psi)?;
    let alpha = w1 * a + w2 * b;
    let beta = w1 * (-b.conj()) + w2 * a.conj();
    let sign = if kind == Symmetry::Antisymmetrize { -1.0 } else { 1.0 };
    let alt = (&alpha * beta.transpose() + &beta * alpha.transpose() * c(sign, 0.0)) * c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Ok(alt.dotc(&coef).norm())
}

/// True iff the orthogonal factor pair of a non-entangled pair state is
/// unique up to phases and exchange. Fermion pairs are never unique; a
/// same-state boson pair is unique trivially.
pub fn boson_uniqueness_check(psi: &PureState, tol: &Tolerances) -> Result<bool> {
    let dec = decide_pair(psi, tol)?;
    match dec.shape {
        PairShape::SameState => return Ok(true),
        PairShape::Slater | PairShape::OrthogonalSymmetrized => {}
        _ => return invalid("uniqueness is only defined for a non-entangled pair with orthogonal factors"),
    }
    let (w1, w2) = (&dec.witnesses[0], &dec.witnesses[1]);
    let steps = 12;
    for ti in 1..steps {
        let theta = std::f64::consts::FRAC_PI_2 * ti as f64 / steps as f64;
        for pi in 0..4 {
            let mu = std::f64::consts::FRAC_PI_2 * pi as f64;
            let a = c(theta.cos(), 0.0);
            let b = C64::from_polar(theta.sin(), mu);
            if alternative_pair_overlap(psi, w1, w2, a, b)? >= 1.0 - tol.eq_tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Two-particle state `[ς⊗R ⊗ χ⊗L ± χ⊗L ⊗ ς⊗R]/√2` on the single-particle
/// space internal ⊗ spatial.
pub fn tagged_pair(varsigma: &CVec, r: &CVec, chi: &CVec, l: &CVec, sector: Sector, tol: &Tolerances) -> Result<PureState> {
    check_disjoint(r, l, tol)?;
    let a = linalg::kron_vec(varsigma, r);
    let b = linalg::kron_vec(chi, l);
    let kind = Symmetry::of(sector)?;
    let d = a.len();
    let t = Tensor::new(vec![d, d], linalg::kron_vec(&a, &b))?;
    PureState::normalized(permsym::project(&t, kind)?, sector, tol)
}

/// `[ς χ - χ ς] ⊗ [R L ± L R] / 2`, internal part antisymmetric; the spatial
/// sign is `+` for fermions and `-` for bosons.
pub fn entangled_tagged_pair(varsigma: &CVec, r: &CVec, chi: &CVec, l: &CVec, sector: Sector, tol: &Tolerances) -> Result<PureState> {
    check_disjoint(r, l, tol)?;
    let sign = match sector {
        Sector::Fermionic => 1.0,
        Sector::Bosonic => -1.0,
        Sector::Distinguishable => return invalid("identical sector required"),
    };
    let (di, ds) = (varsigma.len(), r.len());
    let internal = linalg::kron_vec(varsigma, chi) - linalg::kron_vec(chi, varsigma);
    let spatial = linalg::kron_vec(r, l) + linalg::kron_vec(l, r) * c(sign, 0.0);
    let t = Tensor::from_fn(vec![di * ds, di * ds], |idx| {
        let (s1, x1) = (idx[0] / ds, idx[0] % ds);
        let (s2, x2) = (idx[1] / ds, idx[1] % ds);
        internal[s1 * di + s2] * spatial[x1 * ds + x2]
    })?;
    PureState::normalized(t, sector, tol)
}

fn check_disjoint(r: &CVec, l: &CVec, tol: &Tolerances) -> Result<()> {
    if r.len() != l.len() {
        return invalid("R and L must live in the same spatial space");
    }
    let o = r.dotc(l).norm();
    if o > tol.eq_tol {
        return invalid(format!("R and L supports overlap (|<R|L>| = {o:e})"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdenticalCorrelation {
    pub joint: f64,
    pub marginal1: f64,
    pub marginal2: f64,
    pub product: f64,
    pub factorizes: bool,
}

/// Position-tagged internal observables `Ω` at `R` and `Σ` at `L`, each
/// symmetrized over the two particles.
pub fn identical_correlation_test(
    psi: &PureState,
    omega: &CMat,
    sigma: &CMat,
    r_proj: &CMat,
    l_proj: &CMat,
    tol: &Tolerances,
) -> Result<IdenticalCorrelation> {
    let (coef, _) = identical_pair(psi)?;
    for (name, m) in [("Ω", omega), ("Σ", sigma), ("R", r_proj), ("L", l_proj)] {
        if linalg::hermiticity_residual(m) > tol.eq_tol * linalg::max_abs(m).max(1.0) {
            return invalid(format!("{name} is not Hermitian"));
        }
    }
    if linalg::max_abs(&(r_proj * l_proj)) > tol.eq_tol {
        return invalid("R and L projectors overlap");
    }
    let o1 = kron(omega, r_proj);
    let o2 = kron(sigma, l_proj);
    if o1.nrows() != coef.nrows() || o2.nrows() != coef.nrows() {
        return invalid("internal ⊗ spatial dimension does not match the particles");
    }
    let i = CMat::identity(coef.nrows(), coef.nrows());
    let joint = pair_expect(&coef, &o1, &o2) + pair_expect(&coef, &o2, &o1);
    let marginal1 = pair_expect(&coef, &o1, &i) + pair_expect(&coef, &i, &o1);
    let marginal2 = pair_expect(&coef, &o2, &i) + pair_expect(&coef, &i, &o2);
    let product = marginal1 * marginal2;
    Ok(IdenticalCorrelation { joint, marginal1, marginal2, product, factorizes: (joint - product).abs() <= tol.eq_tol })
}
