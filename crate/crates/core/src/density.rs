//! Statistical operators, partial traces and ensembles.

use crate::error::{invalid, Result};
use crate::linalg::{self, c, CMat, Spectrum};
use crate::state::{product_of, PureState, Tensor};
use crate::tol::Tolerances;

/// Hermitian, unit-trace, positive-semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    mat: CMat,
}

impl DensityOperator {
    pub fn new(mat: CMat, tol: &Tolerances) -> Result<Self> {
        if !mat.is_square() || mat.nrows() == 0 {
            return invalid("density matrix must be square and nonempty");
        }
        let h = linalg::hermiticity_residual(&mat);
        if h > tol.eq_tol {
            return invalid(format!("density matrix is not Hermitian (residual {h:e})"));
        }
        let tr = linalg::trace_real(&mat);
        if (tr - 1.0).abs() > tol.eq_tol * 10.0 {
            return invalid(format!("density matrix has trace {tr}"));
        }
        let herm = (&mat + mat.adjoint()) * c(0.5, 0.0);
        let min = herm.clone().symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -tol.eq_tol * 10.0 {
            return invalid(format!("density matrix has negative eigenvalue {min}"));
        }
        Ok(DensityOperator { mat: herm })
    }

    pub fn from_pure(psi: &PureState) -> Self {
        DensityOperator { mat: linalg::projector(psi.amps()) }
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Tr(ρ²).
    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }

    /// Tr(ρ A).
    pub fn expect(&self, a: &CMat) -> Result<f64> {
        if a.shape() != self.mat.shape() {
            return invalid(format!("operator shape {:?} does not match density matrix {:?}", a.shape(), self.mat.shape()));
        }
        Ok((&self.mat * a).trace().re)
    }
}

fn check_keep(dims: &[usize], keep: &[usize]) -> Result<()> {
    if keep.is_empty() || keep.len() >= dims.len() {
        return invalid("keep must be a nonempty proper subset of the slots");
    }
    let mut seen = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() || std::mem::replace(&mut seen[k], true) {
            return invalid(format!("bad slot {} in keep set", k + 1));
        }
    }
    Ok(())
}

/// Traces out every slot not listed in `keep` (0-based, in the listed order).
pub fn partial_trace(rho: &DensityOperator, dims: &[usize], keep: &[usize]) -> Result<DensityOperator> {
    let total = crate::state::check_dims(dims)?;
    if total != rho.dim() {
        return invalid(format!("dims {dims:?} multiply to {total}, density matrix has dimension {}", rho.dim()));
    }
    check_keep(dims, keep)?;
    // decompose ρ = Σ λ |v><v| and reuse the pure-state path
    let sp = rho.mat.clone().symmetric_eigen();
    let kd: usize = keep.iter().map(|&k| dims[k]).product();
    let mut out = CMat::zeros(kd, kd);
    for (i, &l) in sp.eigenvalues.iter().enumerate() {
        if l.abs() <= f64::EPSILON * 4.0 {
            continue;
        }
        let v = sp.eigenvectors.column(i).into_owned();
        let t = Tensor::new(dims.to_vec(), v)?;
        let m = t.matricize(keep)?;
        out += (&m * m.adjoint()) * c(l, 0.0);
    }
    Ok(DensityOperator { mat: (&out + out.adjoint()) * c(0.5, 0.0) })
}

/// Reduced density operator of a pure state on the slots in `keep`.
pub fn reduced_density(psi: &PureState, keep: &[usize]) -> Result<DensityOperator> {
    check_keep(psi.dims(), keep)?;
    let m = psi.tensor().matricize(keep)?;
    let r = &m * m.adjoint();
    Ok(DensityOperator { mat: (&r + r.adjoint()) * c(0.5, 0.0) })
}

/// One-particle reduced operator (slot 1 kept).
pub fn one_body(psi: &PureState) -> Result<DensityOperator> {
    reduced_density(psi, &[0])
}

/// Descending eigen-decomposition with the deterministic degenerate tie-break.
pub fn spectral(rho: &DensityOperator, tol: &Tolerances) -> Result<Spectrum> {
    linalg::hermitian_eigen(&rho.mat, tol)
}

/// Weighted list of product states with positive weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableEnsemble {
    entries: Vec<(f64, Vec<PureState>)>,
}

impl SeparableEnsemble {
    pub fn new(entries: Vec<(f64, Vec<PureState>)>, tol: &Tolerances) -> Result<Self> {
        if entries.is_empty() {
            return invalid("ensemble has no entries");
        }
        let dims: Vec<usize> = entries[0].1.iter().flat_map(|f| f.dims().to_vec()).collect();
        let mut sum = 0.0;
        for (j, (p, factors)) in entries.iter().enumerate() {
            if p.is_nan() || *p <= 0.0 {
                return invalid(format!("entry {j} has non-positive weight {p}"));
            }
            if factors.is_empty() {
                return invalid(format!("entry {j} has no factors"));
            }
            let d: Vec<usize> = factors.iter().flat_map(|f| f.dims().to_vec()).collect();
            if d != dims {
                return invalid(format!("entry {j} has dims {d:?}, expected {dims:?}"));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > tol.eq_tol * 10.0 {
            return invalid(format!("ensemble weights sum to {sum}"));
        }
        Ok(SeparableEnsemble { entries })
    }

    pub fn entries(&self) -> &[(f64, Vec<PureState>)] {
        &self.entries
    }

    /// Per-factor dimensions (taken from the first entry).
    pub fn factor_dims(&self) -> Vec<usize> {
        self.entries[0].1.iter().map(|f| f.amps().len()).collect()
    }

    /// Flattens each entry into one product state.
    pub fn as_weighted_states(&self) -> Result<Vec<(f64, PureState)>> {
        self.entries
            .iter()
            .map(|(p, fs)| {
                let vs: Vec<_> = fs.iter().map(|f| f.amps().clone()).collect();
                Ok((*p, product_of(&vs)?))
            })
            .collect()
    }
}

/// Weighted pure states.
pub type Mixture = Vec<(f64, PureState)>;

/// `Σ p_r |φ_r><φ_r|` for a weighted list of pure states of equal dimension.
pub fn mixture(states: &[(f64, PureState)], tol: &Tolerances) -> Result<DensityOperator> {
    let first = states.first().ok_or_else(|| crate::Error::InvalidInput("empty ensemble".into()))?;
    let d = first.1.amps().len();
    let mut sum = 0.0;
    let mut m = CMat::zeros(d, d);
    for (j, (p, s)) in states.iter().enumerate() {
        if *p < 0.0 {
            return invalid(format!("entry {j} has negative weight {p}"));
        }
        if s.amps().len() != d {
            return invalid(format!("entry {j} has dimension {}, expected {d}", s.amps().len()));
        }
        sum += p;
        m += linalg::projector(s.amps()) * c(*p, 0.0);
    }
    if (sum - 1.0).abs() > tol.eq_tol * 10.0 {
        return invalid(format!("weights sum to {sum}, not 1"));
    }
    DensityOperator::new(m, tol)
}

pub fn ensemble_to_density(e: &SeparableEnsemble, tol: &Tolerances) -> Result<DensityOperator> {
    mixture(&e.as_weighted_states()?, tol)
}
