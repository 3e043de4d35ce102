//! Entanglement of distinguishable subsystems: Schmidt decomposition,
//! three-way non-entanglement check, range-based classification, correlation
//! tests and multi-slot splits.

use std::fmt;

use crate::density::{reduced_density, spectral, DensityOperator};
use crate::error::{invalid, Error, Result};
use crate::linalg::{self, c, canonical_basis, projector_onto, CMat, CVec};
use crate::state::{product_of, PureState, Sector, Tensor};
use crate::tol::{Tolerances, GRAY};

/// A bipartition of the slots (0-based) into two nonempty groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    pub side1: Vec<usize>,
    pub side2: Vec<usize>,
}

impl Cut {
    pub fn new(side1: Vec<usize>, side2: Vec<usize>, n_slots: usize) -> Result<Self> {
        if side1.is_empty() || side2.is_empty() {
            return invalid("both sides of a cut must be nonempty");
        }
        let mut seen = vec![false; n_slots];
        for &k in side1.iter().chain(&side2) {
            if k >= n_slots || std::mem::replace(&mut seen[k], true) {
                return invalid(format!("slot {} is out of range or listed twice in the cut", k + 1));
            }
        }
        if seen.iter().any(|s| !s) {
            return invalid("cut does not cover every slot");
        }
        Ok(Cut { side1, side2 })
    }

    /// First `m` slots against the rest.
    pub fn first(m: usize, n_slots: usize) -> Result<Self> {
        if m == 0 || m >= n_slots {
            return invalid(format!("split point {m} must satisfy 1 <= M < {n_slots}"));
        }
        Self::new((0..m).collect(), (m..n_slots).collect(), n_slots)
    }

    /// Parses `"1,2|3"` (1-based slot numbers).
    pub fn parse(text: &str, n_slots: usize) -> Result<Self> {
        let (a, b) =
            text.split_once('|').ok_or_else(|| Error::Parse { field: "cut".into(), msg: format!("expected `A|B`, got `{text}`") })?;
        let side = |s: &str| -> Result<Vec<usize>> {
            s.split(',')
                .map(|t| match t.trim().parse::<usize>() {
                    Ok(k) if k >= 1 => Ok(k - 1),
                    _ => Err(Error::Parse { field: "cut".into(), msg: format!("bad slot number `{t}`") }),
                })
                .collect()
        };
        Self::new(side(a)?, side(b)?, n_slots)
    }

    pub fn flip(&self) -> Cut {
        Cut { side1: self.side2.clone(), side2: self.side1.clone() }
    }
}

fn require_distinguishable(psi: &PureState) -> Result<()> {
    if psi.sector() != Sector::Distinguishable {
        return invalid(format!("expected a distinguishable-particle state, got {}", psi.sector()));
    }
    Ok(())
}

/// `ψ = Σ_k π_k l_k ⊗ r_k` with descending positive `π_k`.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub coeffs: Vec<f64>,
    pub left: Vec<CVec>,
    pub right: Vec<CVec>,
    pub rank: usize,
}

impl SchmidtDecomposition {
    /// Coefficient matrix `Σ π_k l_k r_kᵀ` (rows: side 1).
    pub fn reassemble(&self) -> CMat {
        let (r, c_) = (self.left[0].len(), self.right[0].len());
        let mut m = CMat::zeros(r, c_);
        for k in 0..self.rank {
            m += &self.left[k] * self.right[k].transpose() * c(self.coeffs[k], 0.0);
        }
        m
    }
}

/// Schmidt decomposition across `cut`. Left vectors inside a degenerate
/// cluster use the canonical projector basis; right vectors follow from them.
pub fn schmidt_decompose(psi: &PureState, cut: &Cut, tol: &Tolerances) -> Result<SchmidtDecomposition> {
    require_distinguishable(psi)?;
    Cut::new(cut.side1.clone(), cut.side2.clone(), psi.n_slots())?;
    let x = psi.tensor().matricize(&cut.side1)?;
    schmidt_of_matrix(&x, tol)
}

pub(crate) fn schmidt_of_matrix(x: &CMat, tol: &Tolerances) -> Result<SchmidtDecomposition> {
    let sv = linalg::svd(x);
    // rank is read off the squared coefficients, i.e. the reduced spectrum
    let squares: Vec<f64> = sv.values.iter().map(|s| s * s).collect();
    let rank = tol.rank_of(&squares);
    let d1 = x.nrows();
    let mut coeffs = Vec::with_capacity(rank);
    let mut left = Vec::with_capacity(rank);
    let mut start = 0;
    while start < rank {
        let mut end = start + 1;
        while end < rank && (sv.values[end - 1] - sv.values[end]).abs() <= tol.eq_tol {
            end += 1;
        }
        if end - start == 1 {
            let mut v = sv.left[start].clone();
            linalg::fix_phase(&mut v);
            left.push(v);
        } else {
            let p = projector_onto(&sv.left[start..end], d1);
            left.extend(canonical_basis(&p, end - start));
        }
        coeffs.extend_from_slice(&sv.values[start..end]);
        start = end;
    }
    let xt = x.transpose();
    let right = left.iter().zip(&coeffs).map(|(l, &p)| (&xt * l.conjugate()) / c(p, 0.0)).collect();
    Ok(SchmidtDecomposition { coeffs, left, right, rank })
}

/// Residuals of the three equivalent non-entanglement conditions.
#[derive(Debug, Clone)]
pub struct NonEntanglementReport {
    pub verdict: bool,
    /// `1 - Tr[P ρ₁]` for `P` the top Schmidt projector.
    pub witness_residual: f64,
    /// `‖ρ₁² - ρ₁‖_F`.
    pub idempotency_residual: f64,
    /// `1 - |<φ⊗ξ|ψ>|²` for an independently built product candidate.
    pub factorization_residual: f64,
    /// Top left Schmidt vector (range of the witness projector).
    pub witness: CVec,
    /// Factors when the state is a product.
    pub factors: Option<(CVec, CVec)>,
}

impl NonEntanglementReport {
    pub fn residuals(&self) -> [f64; 3] {
        [self.witness_residual, self.idempotency_residual, self.factorization_residual]
    }
}

/// Evaluates all three conditions and fails with `Inconsistency` if they
/// clearly disagree.
pub fn is_non_entangled(psi: &PureState, cut: &Cut, tol: &Tolerances) -> Result<NonEntanglementReport> {
    let sd = schmidt_decompose(psi, cut, tol)?;
    let x = psi.tensor().matricize(&cut.side1)?;
    let verdict = sd.rank == 1;

    let l1 = &sd.left[0];
    let proj = x.transpose() * l1.conjugate();
    let witness_residual = (1.0 - proj.norm_squared()).max(0.0);

    let rho = &x * x.adjoint();
    let idempotency_residual = (&rho * &rho - &rho).norm();

    let (mut bi, mut bj, mut best) = (0, 0, -1.0);
    for j in 0..x.ncols() {
        for i in 0..x.nrows() {
            if x[(i, j)].norm() > best {
                best = x[(i, j)].norm();
                bi = i;
                bj = j;
            }
        }
    }
    let phi = x.column(bj).into_owned().normalize();
    let xi = x.row(bi).transpose().normalize();
    let overlap = phi.dotc(&(&x * xi.conjugate()));
    let factorization_residual = (1.0 - overlap.norm_sqr()).max(0.0);

    let residuals = [witness_residual, idempotency_residual, factorization_residual];
    for (i, r) in residuals.iter().enumerate() {
        let clearly_holds = *r <= tol.eq_tol / GRAY;
        let clearly_fails = *r > tol.eq_tol * GRAY;
        if (verdict && clearly_fails) || (!verdict && clearly_holds) {
            return Err(Error::Inconsistency(format!(
                "condition {} disagrees with the Schmidt rank {} (residuals {:e}, {:e}, {:e})",
                i + 1,
                sd.rank,
                residuals[0],
                residuals[1],
                residuals[2]
            )));
        }
    }
    let factors = verdict.then(|| (sd.left[0].clone(), sd.right[0].clone()));
    Ok(NonEntanglementReport { verdict, witness_residual, idempotency_residual, factorization_residual, witness: l1.clone(), factors })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    NonEntangled,
    PartiallyEntangled,
    TotallyEntangled,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::NonEntangled => "non_entangled",
            Kind::PartiallyEntangled => "partially_entangled",
            Kind::TotallyEntangled => "totally_entangled",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntanglementClass {
    pub kind: Kind,
    pub maximal: bool,
    pub range_dim: usize,
}

pub(crate) fn class_of(rho: &DensityOperator, tol: &Tolerances) -> Result<EntanglementClass> {
    let sp = spectral(rho, tol)?;
    let range_dim = sp.rank(tol);
    let d = rho.dim();
    let kind = match range_dim {
        1 => Kind::NonEntangled,
        r if r == d => Kind::TotallyEntangled,
        _ => Kind::PartiallyEntangled,
    };
    let flat = 1.0 / d as f64;
    let maximal = kind == Kind::TotallyEntangled && sp.values.iter().all(|l| (l - flat).abs() <= tol.eq_tol);
    Ok(EntanglementClass { kind, maximal, range_dim })
}

/// Classification of side 1 from the range of its reduced operator.
pub fn classify(psi: &PureState, cut: &Cut, tol: &Tolerances) -> Result<EntanglementClass> {
    require_distinguishable(psi)?;
    Cut::new(cut.side1.clone(), cut.side2.clone(), psi.n_slots())?;
    class_of(&reduced_density(psi, &cut.side1)?, tol)
}

/// Classes of both sides; they share `range_dim` but may differ in kind.
pub fn classify_both(psi: &PureState, cut: &Cut, tol: &Tolerances) -> Result<(EntanglementClass, EntanglementClass)> {
    Ok((classify(psi, cut, tol)?, classify(psi, &cut.flip(), tol)?))
}

/// Projector onto the range of the side-1 reduced operator.
#[derive(Debug, Clone)]
pub struct PropertyManifold {
    pub projector: CMat,
    pub basis: Vec<CVec>,
    rho: CMat,
}

impl PropertyManifold {
    pub fn range_dim(&self) -> usize {
        self.basis.len()
    }

    /// `Tr[P ρ₁]`.
    pub fn trace_value(&self) -> f64 {
        (&self.projector * &self.rho).trace().re
    }

    /// True iff the Hermitian `omega` commutes with the projector.
    pub fn certify(&self, omega: &CMat, tol: &Tolerances) -> Result<bool> {
        if omega.shape() != self.projector.shape() {
            return invalid(format!("observable is {:?}, subsystem needs {:?}", omega.shape(), self.projector.shape()));
        }
        if linalg::hermiticity_residual(omega) > tol.eq_tol * linalg::max_abs(omega).max(1.0) {
            return invalid("observable is not Hermitian");
        }
        let comm = omega * &self.projector - &self.projector * omega;
        Ok(linalg::max_abs(&comm) <= tol.eq_tol * linalg::max_abs(omega).max(1.0))
    }

    /// Whether a projector `q` carries unit probability; any such `q` has rank
    /// at least `range_dim`.
    pub fn admits(&self, q: &CMat, tol: &Tolerances) -> bool {
        ((q * &self.rho).trace().re - 1.0).abs() <= tol.eq_tol
    }

    /// ρ₁ restricted to the range is full rank, so no smaller projector has unit trace.
    pub fn is_minimal(&self, tol: &Tolerances) -> bool {
        let b = linalg::columns(&self.basis, self.projector.nrows());
        let restricted = b.adjoint() * &self.rho * &b;
        let sv = linalg::svd(&restricted);
        tol.rank_of(&sv.values.iter().map(|x| x * x).collect::<Vec<_>>()) == self.basis.len()
    }
}

pub fn property_manifold(psi: &PureState, cut: &Cut, tol: &Tolerances) -> Result<PropertyManifold> {
    require_distinguishable(psi)?;
    let rho = reduced_density(psi, &cut.side1)?;
    let sp = spectral(&rho, tol)?;
    let r = sp.rank(tol);
    let d = rho.dim();
    let projector = projector_onto(&sp.vectors[..r], d);
    let basis = canonical_basis(&projector, r);
    Ok(PropertyManifold { projector, basis, rho: rho.mat().clone() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub joint: f64,
    pub product: f64,
    pub factorizes: bool,
}

/// `<A⊗B>` against `<A⊗I><I⊗B>`.
pub fn correlation_test(psi: &PureState, cut: &Cut, a: &CMat, b: &CMat, tol: &Tolerances) -> Result<Correlation> {
    require_distinguishable(psi)?;
    Cut::new(cut.side1.clone(), cut.side2.clone(), psi.n_slots())?;
    let x = psi.tensor().matricize(&cut.side1)?;
    for (name, m, d) in [("A", a, x.nrows()), ("B", b, x.ncols())] {
        if m.nrows() != d || m.ncols() != d {
            return invalid(format!("{name} must be {d}x{d}"));
        }
        if linalg::hermiticity_residual(m) > tol.eq_tol * linalg::max_abs(m).max(1.0) {
            return invalid(format!("{name} is not Hermitian"));
        }
    }
    let xa = x.adjoint();
    let joint = (&xa * a * &x * b.transpose()).trace().re;
    let m1 = (&xa * a * &x).trace().re;
    let m2 = (&xa * &x * b.transpose()).trace().re;
    let product = m1 * m2;
    Ok(Correlation { joint, product, factorizes: (joint - product).abs() <= tol.eq_tol })
}

/// Outcome of a grouped split test.
#[derive(Debug, Clone)]
pub struct SplitOutcome {
    pub non_entangled: bool,
    pub factors: Option<(PureState, PureState)>,
}

/// First `m` slots against the remaining ones.
pub fn split_non_entangled(psi: &PureState, m: usize, tol: &Tolerances) -> Result<SplitOutcome> {
    let cut = Cut::first(m, psi.n_slots())?;
    let sd = schmidt_decompose(psi, &cut, tol)?;
    if sd.rank != 1 {
        return Ok(SplitOutcome { non_entangled: false, factors: None });
    }
    let mk = |v: &CVec, dims: &[usize]| -> Result<PureState> {
        PureState::normalized(Tensor::new(dims.to_vec(), v.clone())?, Sector::Distinguishable, tol)
    };
    let a = mk(&sd.left[0], &psi.dims()[..m])?;
    let b = mk(&sd.right[0], &psi.dims()[m..])?;
    Ok(SplitOutcome { non_entangled: true, factors: Some((a, b)) })
}

/// Every single-slot reduced operator is a rank-1 projector.
pub fn completely_non_entangled(psi: &PureState, tol: &Tolerances) -> Result<(bool, Option<Vec<CVec>>)> {
    require_distinguishable(psi)?;
    let n = psi.n_slots();
    if n == 1 {
        return Ok((true, Some(vec![psi.amps().clone()])));
    }
    let mut factors = Vec::with_capacity(n);
    for k in 0..n {
        let rho = reduced_density(psi, &[k])?;
        let sp = spectral(&rho, tol)?;
        if sp.rank(tol) != 1 {
            return Ok((false, None));
        }
        factors.push(sp.vectors[0].clone());
    }
    let prod = product_of(&factors)?;
    let fid = prod.fidelity(psi)?;
    if (1.0 - fid).abs() > tol.eq_tol * GRAY {
        return Err(Error::Tolerance { what: "product reassembly".into(), residual: 1.0 - fid });
    }
    Ok((true, Some(factors)))
}
