//! Dense complex linear-algebra helpers on top of nalgebra.
//!
//! Every decomposition here returns results in a deterministic order:
//! eigenvalues and singular values descending, and inside a cluster of
//! (numerically) equal values the basis is rebuilt from the cluster projector
//! by pivoted Gram-Schmidt on the standard basis, phase-fixed, and sorted
//! lexicographically. Callers therefore never see solver-dependent rotations.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::tol::Tolerances;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cvec(entries: &[C64]) -> CVec {
    CVec::from_column_slice(entries)
}

/// Real-valued vector promoted to complex.
pub fn rvec(entries: &[f64]) -> CVec {
    CVec::from_iterator(entries.len(), entries.iter().map(|&x| c(x, 0.0)))
}

pub fn basis_vec(d: usize, i: usize) -> CVec {
    let mut v = CVec::zeros(d);
    v[i] = ONE;
    v
}

/// `|u><v|`
pub fn outer(u: &CVec, v: &CVec) -> CMat {
    u * v.adjoint()
}

pub fn projector(v: &CVec) -> CMat {
    outer(v, v)
}

/// Sum of `|v><v|` over an orthonormal family; zero matrix of size `d` when empty.
pub fn projector_onto(vectors: &[CVec], d: usize) -> CMat {
    let mut p = CMat::zeros(d, d);
    for v in vectors {
        p += projector(v);
    }
    p
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVec, b: &CVec) -> CVec {
    let mut out = CVec::zeros(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i * b.len() + j] = x * y;
        }
    }
    out
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_residual(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// `<u|A|u>` real part; callers pass Hermitian `A`.
pub fn expectation(a: &CMat, u: &CVec) -> f64 {
    u.dotc(&(a * u)).re
}

pub fn trace_real(m: &CMat) -> f64 {
    m.trace().re
}

/// Spectral (largest singular value) norm.
pub fn operator_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let g = m.adjoint() * m;
    ((&g + g.adjoint()) * c(0.5, 0.0)).symmetric_eigenvalues().iter().cloned().fold(0.0, f64::max).max(0.0).sqrt()
}

/// Multiplies `v` by the phase that makes its first entry with modulus above
/// `1e-12 * max|v_i|` real and nonnegative.
pub fn fix_phase(v: &mut CVec) {
    let top = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if top == 0.0 {
        return;
    }
    if let Some(first) = v.iter().find(|z| z.norm() > 1e-12 * top) {
        let phase = first.conj() / first.norm();
        v.iter_mut().for_each(|z| *z *= phase);
    }
}

/// Lexicographic comparison of coefficient sequences on `(re, im)` pairs.
pub fn lex_cmp(a: &CVec, b: &CVec) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let o = x.re.partial_cmp(&y.re).unwrap_or(Ordering::Equal).then(x.im.partial_cmp(&y.im).unwrap_or(Ordering::Equal));
        if o != Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

/// Deterministic orthonormal basis of the range of an orthogonal projector of
/// known rank: pivoted Gram-Schmidt over `P e_0, P e_1, ...`, taking at each
/// step the lowest index whose residual is at least half the largest one.
pub fn canonical_basis(p: &CMat, rank: usize) -> Vec<CVec> {
    let d = p.nrows();
    let mut chosen: Vec<CVec> = Vec::with_capacity(rank);
    let mut residuals: Vec<CVec> = (0..d).map(|i| p.column(i).into_owned()).collect();
    while chosen.len() < rank {
        let norms: Vec<f64> = residuals.iter().map(|r| r.norm()).collect();
        let top = norms.iter().cloned().fold(0.0, f64::max);
        if top <= 1e-300 {
            break;
        }
        let pick = norms.iter().position(|&n| n >= 0.5 * top).unwrap();
        let mut v = residuals[pick].clone();
        // two passes of re-orthogonalisation
        for _ in 0..2 {
            for q in &chosen {
                let proj = q.dotc(&v);
                v -= q * proj;
            }
        }
        let n = v.norm();
        if n <= 1e-300 {
            residuals[pick] = CVec::zeros(d);
            continue;
        }
        v /= c(n, 0.0);
        fix_phase(&mut v);
        for r in residuals.iter_mut() {
            let proj = v.dotc(r);
            *r -= &v * proj;
        }
        residuals[pick] = CVec::zeros(d);
        chosen.push(v);
    }
    chosen.sort_by(|a, b| lex_cmp(b, a));
    chosen
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Descending eigenvalues.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors matching `values`.
    pub vectors: Vec<CVec>,
}

impl Spectrum {
    pub fn rank(&self, tol: &Tolerances) -> usize {
        let mags: Vec<f64> = self.values.iter().map(|v| v.max(0.0)).collect();
        tol.rank_of(&mags)
    }

    pub fn reconstruct(&self) -> CMat {
        let d = self.vectors.first().map(|v| v.len()).unwrap_or(0);
        let mut m = CMat::zeros(d, d);
        for (l, v) in self.values.iter().zip(&self.vectors) {
            m += projector(v) * c(*l, 0.0);
        }
        m
    }

    /// Eigenvectors with eigenvalue above the relative rank cutoff.
    pub fn range(&self, tol: &Tolerances) -> Vec<CVec> {
        self.vectors[..self.rank(tol)].to_vec()
    }
}

/// Hermitian eigen-decomposition with the deterministic tie-break described
/// in the module docs.
pub fn hermitian_eigen(m: &CMat, tol: &Tolerances) -> Result<Spectrum> {
    if !m.is_square() {
        return invalid("eigen-decomposition of a non-square matrix");
    }
    let scale = max_abs(m).max(1.0);
    let herm = hermiticity_residual(m);
    if herm > tol.eq_tol * scale {
        return invalid(format!("matrix is not Hermitian (residual {herm:e})"));
    }
    let d = m.nrows();
    if d == 0 {
        return Ok(Spectrum { values: vec![], vectors: vec![] });
    }
    let sym = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut pairs: Vec<(f64, CVec)> =
        eig.eigenvalues.iter().enumerate().map(|(i, &l)| (l, eig.eigenvectors.column(i).into_owned())).collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal));

    let cluster_tol = tol.eq_tol * pairs.iter().map(|p| p.0.abs()).fold(1.0, f64::max);
    let mut values = Vec::with_capacity(d);
    let mut vectors = Vec::with_capacity(d);
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && (pairs[end - 1].0 - pairs[end].0).abs() <= cluster_tol {
            end += 1;
        }
        let members = &pairs[start..end];
        if members.len() == 1 {
            let mut v = members[0].1.clone();
            fix_phase(&mut v);
            values.push(members[0].0);
            vectors.push(v);
        } else {
            let vs: Vec<CVec> = members.iter().map(|p| p.1.clone()).collect();
            let p = projector_onto(&vs, d);
            let basis = canonical_basis(&p, vs.len());
            for (k, v) in basis.into_iter().enumerate() {
                values.push(members[k].0);
                vectors.push(v);
            }
        }
        start = end;
    }
    Ok(Spectrum { values, vectors })
}

/// Thin singular value decomposition with descending singular values.
#[derive(Debug, Clone)]
pub struct Svd {
    pub values: Vec<f64>,
    /// Left singular vectors (columns of U).
    pub left: Vec<CVec>,
    /// Right singular vectors (columns of V, so `m = Σ s_k u_k v_k†`).
    pub right: Vec<CVec>,
}

/// Thin SVD built from the Hermitian eigen-decomposition of the smaller Gram
/// matrix. Right (left) vectors belonging to zero singular values are zero.
pub fn svd(m: &CMat) -> Svd {
    let (r, cdim) = m.shape();
    let k = r.min(cdim);
    if k == 0 {
        return Svd { values: vec![], left: vec![], right: vec![] };
    }
    let wide = r <= cdim;
    let gram = if wide { m * m.adjoint() } else { m.adjoint() * m };
    let gram = (&gram + gram.adjoint()) * c(0.5, 0.0);
    let eig = gram.symmetric_eigen();
    let mut idx: Vec<usize> = (0..k).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap_or(Ordering::Equal));
    let top = eig.eigenvalues[idx[0]].max(0.0);
    let mut values = Vec::with_capacity(k);
    let mut left = Vec::with_capacity(k);
    let mut right = Vec::with_capacity(k);
    for &i in &idx {
        let s = eig.eigenvalues[i].max(0.0).sqrt();
        let g = eig.eigenvectors.column(i).into_owned();
        let usable = s * s > top * 1e-28 && s > 0.0;
        let other = if !usable {
            CVec::zeros(if wide { cdim } else { r })
        } else if wide {
            m.adjoint() * &g / c(s, 0.0)
        } else {
            m * &g / c(s, 0.0)
        };
        values.push(s);
        if wide {
            left.push(g);
            right.push(other);
        } else {
            left.push(other);
            right.push(g);
        }
    }
    Svd { values, left, right }
}

/// Orthonormal bases of the column space of `m` and of its orthogonal
/// complement (the kernel of `m†`), split at the relative rank cutoff.
pub fn range_and_cokernel(m: &CMat, tol: &Tolerances) -> (Vec<CVec>, Vec<CVec>) {
    let d = m.nrows();
    let sv = svd(m);
    let r = tol.rank_of(&sv.values.iter().map(|x| x * x).collect::<Vec<_>>());
    let p_range = if r == 0 {
        CMat::zeros(d, d)
    } else {
        let vs: Vec<CVec> = sv.left[..r].to_vec();
        projector_onto(&vs, d)
    };
    let p_null = CMat::identity(d, d) - &p_range;
    (canonical_basis(&p_range, r), canonical_basis(&p_null, d - r))
}

/// Columns as a matrix.
pub fn columns(vs: &[CVec], d: usize) -> CMat {
    let mut m = CMat::zeros(d, vs.len());
    for (j, v) in vs.iter().enumerate() {
        m.set_column(j, v);
    }
    m
}

pub fn is_projector(p: &CMat, tol: &Tolerances) -> bool {
    let scale = max_abs(p).max(1.0);
    hermiticity_residual(p) <= tol.eq_tol * scale && max_abs(&(p * p - p)) <= tol.eq_tol * scale
}

/// Rank of a projector, read off its trace.
pub fn projector_rank(p: &CMat) -> usize {
    trace_real(p).round().max(0.0) as usize
}

/// Pauli matrices in the `(z-up, z-down)` basis.
pub fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO])
}

pub fn pauli_z() -> CMat {
    CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, c(-1.0, 0.0)])
}

/// `n·σ` for a (not necessarily unit) real 3-vector.
pub fn spin_along(n: [f64; 3]) -> CMat {
    pauli_x() * c(n[0], 0.0) + pauli_y() * c(n[1], 0.0) + pauli_z() * c(n[2], 0.0)
}

/// Unit vector from polar/azimuthal angles.
pub fn bloch(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}
