//! Coefficient tensors and normalized pure states.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{c, fix_phase, CMat, CVec, C64, ZERO};
use crate::tol::Tolerances;

/// Largest accepted number of coefficients in a dense tensor.
pub const MAX_COEFFS: usize = 1 << 20;

/// Exchange symmetry of a multi-slot state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Distinguishable,
    Fermionic,
    Bosonic,
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sector::Distinguishable => "distinguishable",
            Sector::Fermionic => "fermionic",
            Sector::Bosonic => "bosonic",
        })
    }
}

/// Dense complex tensor in row-major order (last slot fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    dims: Vec<usize>,
    data: CVec,
}

pub(crate) fn check_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() {
        return invalid("a state needs at least one slot");
    }
    if dims.contains(&0) {
        return invalid("slot dimension zero");
    }
    let mut total: usize = 1;
    for &d in dims {
        total = total
            .checked_mul(d)
            .filter(|&t| t <= MAX_COEFFS)
            .ok_or_else(|| crate::Error::InvalidInput(format!("total dimension exceeds {MAX_COEFFS}")))?;
    }
    Ok(total)
}

pub(crate) fn strides_of(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

impl Tensor {
    pub fn new(dims: Vec<usize>, data: CVec) -> Result<Self> {
        let total = check_dims(&dims)?;
        if data.len() != total {
            return invalid(format!("expected {total} coefficients, got {}", data.len()));
        }
        Ok(Tensor { dims, data })
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        let total = check_dims(&dims)?;
        Ok(Tensor { dims, data: CVec::zeros(total) })
    }

    pub fn basis(dims: Vec<usize>, idx: &[usize]) -> Result<Self> {
        let mut t = Self::zeros(dims)?;
        let f = t.flat_index(idx)?;
        t.data[f] = c(1.0, 0.0);
        Ok(t)
    }

    /// Builds `Σ_idx f(idx) |idx>`.
    pub fn from_fn(dims: Vec<usize>, mut f: impl FnMut(&[usize]) -> C64) -> Result<Self> {
        let mut t = Self::zeros(dims)?;
        for flat in 0..t.data.len() {
            let idx = t.multi_index(flat);
            t.data[flat] = f(&idx);
        }
        Ok(t)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &CVec {
        &self.data
    }

    pub fn into_data(self) -> CVec {
        self.data
    }

    pub fn n_slots(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.data.len()
    }

    pub fn strides(&self) -> Vec<usize> {
        strides_of(&self.dims)
    }

    pub fn flat_index(&self, idx: &[usize]) -> Result<usize> {
        if idx.len() != self.dims.len() {
            return invalid(format!("index has {} entries, state has {} slots", idx.len(), self.dims.len()));
        }
        let mut f = 0;
        for (k, (&i, &d)) in idx.iter().zip(&self.dims).enumerate() {
            if i >= d {
                return invalid(format!("index {i} out of range for slot {} of dimension {d}", k + 1));
            }
            f = f * d + i;
        }
        Ok(f)
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            idx[k] = flat % self.dims[k];
            flat /= self.dims[k];
        }
        idx
    }

    pub fn get(&self, idx: &[usize]) -> Result<C64> {
        Ok(self.data[self.flat_index(idx)?])
    }

    pub fn norm(&self) -> f64 {
        self.data.norm()
    }

    /// `<self|other>`; dims must agree.
    pub fn inner(&self, other: &Tensor) -> Result<C64> {
        if self.dims != other.dims {
            return invalid(format!("dims {:?} and {:?} differ", self.dims, other.dims));
        }
        Ok(self.data.dotc(&other.data))
    }

    pub fn scaled(&self, z: C64) -> Tensor {
        Tensor { dims: self.dims.clone(), data: &self.data * z }
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        if self.dims != other.dims {
            return invalid(format!("dims {:?} and {:?} differ", self.dims, other.dims));
        }
        Ok(Tensor { dims: self.dims.clone(), data: &self.data + &other.data })
    }

    /// Outer product; slots of `self` come first.
    pub fn tensor(&self, other: &Tensor) -> Result<Tensor> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        check_dims(&dims)?;
        Ok(Tensor { dims, data: crate::linalg::kron_vec(&self.data, &other.data) })
    }

    /// Reorders slots so that new slot `k` is old slot `order[k]`.
    pub fn permute_slots(&self, order: &[usize]) -> Result<Tensor> {
        let n = self.dims.len();
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&o| o >= n || std::mem::replace(&mut seen[o], true)) {
            return invalid(format!("{order:?} is not a permutation of {n} slots"));
        }
        let new_dims: Vec<usize> = order.iter().map(|&o| self.dims[o]).collect();
        let old_strides = self.strides();
        let mut out = CVec::zeros(self.data.len());
        let mut idx = vec![0usize; n];
        for slot in out.iter_mut() {
            let src: usize = (0..n).map(|k| idx[k] * old_strides[order[k]]).sum();
            *slot = self.data[src];
            for k in (0..n).rev() {
                idx[k] += 1;
                if idx[k] < new_dims[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        Ok(Tensor { dims: new_dims, data: out })
    }

    /// Coefficient matrix with the listed slots as rows and the rest as columns.
    pub fn matricize(&self, row_slots: &[usize]) -> Result<CMat> {
        let n = self.dims.len();
        let mut order: Vec<usize> = row_slots.to_vec();
        order.extend((0..n).filter(|k| !row_slots.contains(k)));
        let t = self.permute_slots(&order)?;
        let rows: usize = row_slots.iter().map(|&k| self.dims[k]).product();
        let cols = self.data.len() / rows;
        // row-major data to column-major matrix
        Ok(CMat::from_row_slice(rows, cols, t.data.as_slice()))
    }

    /// Applies a single-slot operator to slot `slot`.
    pub fn apply_on_slot(&self, slot: usize, op: &CMat) -> Result<Tensor> {
        let d = *self.dims.get(slot).ok_or_else(|| crate::Error::InvalidInput(format!("slot {} out of range", slot + 1)))?;
        if op.nrows() != d || op.ncols() != d {
            return invalid(format!("operator is {}x{}, slot {} has dimension {d}", op.nrows(), op.ncols(), slot + 1));
        }
        let stride = self.strides()[slot];
        let block = d * stride;
        let mut out = CVec::zeros(self.data.len());
        for base in (0..self.data.len()).step_by(block) {
            for inner in 0..stride {
                for i in 0..d {
                    let mut acc = ZERO;
                    for j in 0..d {
                        acc += op[(i, j)] * self.data[base + j * stride + inner];
                    }
                    out[base + i * stride + inner] = acc;
                }
            }
        }
        Ok(Tensor { dims: self.dims.clone(), data: out })
    }

    /// Applies the same single-slot operator on every slot.
    pub fn apply_on_all(&self, op: &CMat) -> Result<Tensor> {
        let mut t = self.clone();
        for k in 0..self.dims.len() {
            t = t.apply_on_slot(k, op)?;
        }
        Ok(t)
    }

    /// Largest deviation from `T(.., i, .., j, ..) = sign * T(.., j, .., i, ..)`
    /// over all adjacent transpositions.
    pub fn exchange_residual(&self, sign: f64) -> f64 {
        let n = self.dims.len();
        if n < 2 || self.dims.iter().any(|&d| d != self.dims[0]) {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for k in 0..n - 1 {
            let mut order: Vec<usize> = (0..n).collect();
            order.swap(k, k + 1);
            let swapped = self.permute_slots(&order).expect("valid swap");
            let r = (&swapped.data * c(sign, 0.0) - &self.data).iter().map(|z| z.norm()).fold(0.0, f64::max);
            worst = worst.max(r);
        }
        worst
    }
}

/// A normalized coefficient tensor tagged with its exchange symmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    tensor: Tensor,
    sector: Sector,
    label: Option<String>,
}

impl PureState {
    /// Validates normalization and sector symmetry, then fixes the global phase.
    pub fn new(tensor: Tensor, sector: Sector, tol: &Tolerances) -> Result<Self> {
        let n = tensor.norm();
        if (n * n - 1.0).abs() > tol.eq_tol.max(1e-12) * 10.0 {
            return invalid(format!("state is not normalized (norm² = {})", n * n));
        }
        Self::check_sector(&tensor, sector, tol)?;
        let mut tensor = tensor;
        tensor.data /= c(n, 0.0);
        fix_phase(&mut tensor.data);
        Ok(PureState { tensor, sector, label: None })
    }

    /// Rescales to unit norm first; a zero tensor is rejected.
    pub fn normalized(tensor: Tensor, sector: Sector, tol: &Tolerances) -> Result<Self> {
        let n = tensor.norm();
        if n <= f64::MIN_POSITIVE {
            return invalid("cannot normalize the zero vector");
        }
        Self::new(tensor.scaled(c(1.0 / n, 0.0)), sector, tol)
    }

    /// Single-slot state from a vector, normalized.
    pub fn from_vector(v: &CVec) -> Result<Self> {
        let t = Tensor::new(vec![v.len()], v.clone())?;
        Self::normalized(t, Sector::Distinguishable, &Tolerances::default())
    }

    pub fn from_amps(dims: Vec<usize>, amps: &[C64], sector: Sector) -> Result<Self> {
        let t = Tensor::new(dims, CVec::from_column_slice(amps))?;
        Self::normalized(t, sector, &Tolerances::default())
    }

    pub fn basis(dims: Vec<usize>, idx: &[usize]) -> Result<Self> {
        Self::new(Tensor::basis(dims, idx)?, Sector::Distinguishable, &Tolerances::default())
    }

    fn check_sector(t: &Tensor, sector: Sector, tol: &Tolerances) -> Result<()> {
        let sign = match sector {
            Sector::Distinguishable => return Ok(()),
            Sector::Fermionic => -1.0,
            Sector::Bosonic => 1.0,
        };
        if t.dims.iter().any(|&d| d != t.dims[0]) {
            return invalid(format!("{sector} state needs equal slot dimensions, got {:?}", t.dims));
        }
        if t.n_slots() >= 2 {
            let r = t.exchange_residual(sign) / t.norm().max(f64::MIN_POSITIVE);
            if r > tol.eq_tol * 10.0 {
                let what = if sign < 0.0 { "antisymmetric" } else { "symmetric" };
                return invalid(format!("amplitudes are not totally {what} (residual {r:e})"));
            }
        }
        Ok(())
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Re-tags the sector after checking the symmetry.
    pub fn with_sector(self, sector: Sector, tol: &Tolerances) -> Result<Self> {
        Self::check_sector(&self.tensor, sector, tol)?;
        Ok(PureState { sector, ..self })
    }

    pub fn tensor(&self) -> &Tensor {
        &self.tensor
    }

    pub fn amps(&self) -> &CVec {
        &self.tensor.data
    }

    pub fn dims(&self) -> &[usize] {
        &self.tensor.dims
    }

    pub fn n_slots(&self) -> usize {
        self.tensor.dims.len()
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// Common slot dimension, if all slots agree.
    pub fn one_particle_dim(&self) -> Option<usize> {
        let d = self.tensor.dims[0];
        self.tensor.dims.iter().all(|&x| x == d).then_some(d)
    }

    pub fn amp(&self, idx: &[usize]) -> Result<C64> {
        self.tensor.get(idx)
    }

    pub fn inner(&self, other: &PureState) -> Result<C64> {
        self.tensor.inner(&other.tensor)
    }

    /// `|<self|other>|²`.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }
}

/// Outer product of two normalized states; the result is tagged distinguishable.
pub fn tensor_product(a: &PureState, b: &PureState) -> Result<PureState> {
    let t = a.tensor.tensor(&b.tensor)?;
    PureState::new(t, Sector::Distinguishable, &Tolerances::default())
}

/// Product of several single-slot vectors.
pub fn product_of(vectors: &[CVec]) -> Result<PureState> {
    let first = vectors.first().ok_or_else(|| crate::Error::InvalidInput("empty product".into()))?;
    let mut s = PureState::from_vector(first)?;
    for v in &vectors[1..] {
        s = tensor_product(&s, &PureState::from_vector(v)?)?;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_vec, rvec};

    #[test]
    fn basis_outer_product() {
        let s = tensor_product(&PureState::basis(vec![2], &[0]).unwrap(), &PureState::basis(vec![2], &[1]).unwrap()).unwrap();
        assert_eq!(s.dims(), &[2, 2]);
        assert_eq!(s.amp(&[0, 1]).unwrap(), c(1.0, 0.0));
        assert_eq!(s.amps().iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn product_is_linear() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = product_of(&[rvec(&[1.0, 1.0]), basis_vec(2, 0)]).unwrap();
        assert!((s.amp(&[0, 0]).unwrap().re - h).abs() < 1e-15);
        assert!((s.amp(&[1, 0]).unwrap().re - h).abs() < 1e-15);
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(Tensor::zeros(vec![2, 0]).is_err());
        assert!(PureState::from_vector(&CVec::zeros(0)).is_err());
    }

    #[test]
    fn phase_convention_applied() {
        let s = PureState::from_amps(vec![2], &[c(0.0, 0.0), c(0.0, -1.0)], Sector::Distinguishable).unwrap();
        assert_eq!(s.amps()[1], c(1.0, 0.0));
    }

    #[test]
    fn sector_checks() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let anti = [c(0.0, 0.0), c(h, 0.0), c(-h, 0.0), c(0.0, 0.0)];
        assert!(PureState::from_amps(vec![2, 2], &anti, Sector::Fermionic).is_ok());
        assert!(PureState::from_amps(vec![2, 2], &anti, Sector::Bosonic).is_err());
        assert!(PureState::from_amps(vec![2, 3], &[c(1.0, 0.0); 6], Sector::Bosonic).is_err());
    }

    #[test]
    fn permute_and_matricize() {
        let t = Tensor::from_fn(vec![2, 3, 4], |i| c((i[0] * 100 + i[1] * 10 + i[2]) as f64, 0.0)).unwrap();
        let p = t.permute_slots(&[2, 0, 1]).unwrap();
        assert_eq!(p.dims(), &[4, 2, 3]);
        assert_eq!(p.get(&[3, 1, 2]).unwrap().re, 123.0);
        let m = t.matricize(&[1]).unwrap();
        assert_eq!(m.shape(), (3, 8));
        assert_eq!(m[(2, 4 + 3)].re, 123.0);
    }

    #[test]
    fn slot_operator() {
        let t = Tensor::basis(vec![2, 2], &[0, 0]).unwrap();
        let x = crate::linalg::pauli_x();
        let u = t.apply_on_slot(1, &x).unwrap();
        assert_eq!(u.get(&[0, 1]).unwrap(), c(1.0, 0.0));
    }
}
