//! Symmetric-group projectors on equal-dimension slot tensors.

use crate::error::{invalid, Result};
use crate::linalg::{c, kron_vec, CVec, ZERO};
use crate::state::{strides_of, PureState, Sector, Tensor};
use crate::tol::Tolerances;

/// Largest supported number of slots for explicit permutation sums.
pub const MAX_SLOTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    Antisymmetrize,
    Symmetrize,
}

impl Symmetry {
    pub fn sector(self) -> Sector {
        match self {
            Symmetry::Antisymmetrize => Sector::Fermionic,
            Symmetry::Symmetrize => Sector::Bosonic,
        }
    }

    pub fn of(sector: Sector) -> Result<Self> {
        match sector {
            Sector::Fermionic => Ok(Symmetry::Antisymmetrize),
            Sector::Bosonic => Ok(Symmetry::Symmetrize),
            Sector::Distinguishable => invalid("distinguishable states have no exchange symmetry"),
        }
    }

    fn sign(self, odd: bool) -> f64 {
        if odd && self == Symmetry::Antisymmetrize {
            -1.0
        } else {
            1.0
        }
    }
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64).round()
}

/// All permutations of `0..n` in Heap's order with their parity (`true` = odd).
pub fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    let mut a: Vec<usize> = (0..n).collect();
    let mut out = vec![(a.clone(), false)];
    let mut cnt = vec![0usize; n];
    let mut odd = false;
    let mut i = 1;
    while i < n {
        if cnt[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(cnt[i], i);
            }
            odd = !odd;
            out.push((a.clone(), odd));
            cnt[i] += 1;
            i = 1;
        } else {
            cnt[i] = 0;
            i += 1;
        }
    }
    out
}

fn common_dim(dims: &[usize]) -> Result<usize> {
    let d = dims[0];
    if dims.iter().any(|&x| x != d) {
        return invalid(format!("all slot dimensions must agree, got {dims:?}"));
    }
    if dims.len() > MAX_SLOTS {
        return invalid(format!("at most {MAX_SLOTS} slots are supported, got {}", dims.len()));
    }
    Ok(d)
}

/// Unnormalized permutation sum `Σ_σ (±)^σ σ t` scaled by `scale`.
fn permutation_sum(t: &Tensor, kind: Symmetry, scale: f64) -> Result<Tensor> {
    let dims = t.dims();
    let d = common_dim(dims)?;
    let n = dims.len();
    let total = t.total_dim();
    let strides = strides_of(dims);
    let mut digits = vec![0u32; total * n];
    for flat in 0..total {
        let mut r = flat;
        for k in (0..n).rev() {
            digits[flat * n + k] = (r % d) as u32;
            r /= d;
        }
    }
    let src = t.data();
    let mut out = CVec::from_element(total, ZERO);
    for (perm, odd) in permutations(n) {
        let w = c(kind.sign(odd) * scale, 0.0);
        for flat in 0..total {
            let dg = &digits[flat * n..flat * n + n];
            let s: usize = (0..n).map(|k| dg[perm[k]] as usize * strides[k]).sum();
            out[flat] += src[s] * w;
        }
    }
    Tensor::new(dims.to_vec(), out)
}

/// `P_A t` or `P_S t`, i.e. the permutation average.
pub fn project(t: &Tensor, kind: Symmetry) -> Result<Tensor> {
    permutation_sum(t, kind, 1.0 / factorial(t.n_slots()))
}

/// Result of a sector projection: the (unnormalized) tensor, flagged zero
/// when its norm is at most `rank_tol`.
#[derive(Debug, Clone)]
pub struct Projected {
    pub tensor: Tensor,
    pub is_zero: bool,
}

pub fn project_sector(psi: &PureState, kind: Symmetry, tol: &Tolerances) -> Result<Projected> {
    let mut tensor = project(psi.tensor(), kind)?;
    let is_zero = tensor.norm() <= tol.rank_tol;
    if is_zero {
        tensor = Tensor::zeros(tensor.dims().to_vec())?;
    }
    Ok(Projected { tensor, is_zero })
}

fn check_orthonormal(vs: &[CVec], tol: &Tolerances) -> Result<()> {
    for (i, a) in vs.iter().enumerate() {
        for (j, b) in vs.iter().enumerate() {
            let g = a.dotc(b);
            let want = if i == j { 1.0 } else { 0.0 };
            if (g - c(want, 0.0)).norm() > tol.eq_tol * 10.0 {
                return invalid(format!("orbitals {} and {} are not orthonormal (overlap {g})", i + 1, j + 1));
            }
        }
    }
    Ok(())
}

fn product_tensor(vs: &[CVec]) -> Result<Tensor> {
    let d = vs[0].len();
    if vs.iter().any(|v| v.len() != d) {
        return invalid("orbitals must share one dimension");
    }
    let mut data = vs[0].clone();
    for v in &vs[1..] {
        data = kron_vec(&data, v);
    }
    Tensor::new(vec![d; vs.len()], data)
}

/// Normalized antisymmetrized product `√N! P_A[φ_1 ⊗ ... ⊗ φ_N]`.
pub fn slater_state(orbitals: &[CVec], tol: &Tolerances) -> Result<PureState> {
    if orbitals.is_empty() {
        return invalid("a Slater state needs at least one orbital");
    }
    let t = product_tensor(orbitals)?;
    let n = orbitals.len();
    let a = permutation_sum(&t, Symmetry::Antisymmetrize, 1.0 / factorial(n).sqrt())?;
    if a.norm() <= tol.rank_tol {
        return invalid("orbitals are linearly dependent: the antisymmetrized product vanishes");
    }
    check_orthonormal(orbitals, tol)?;
    PureState::new(a, Sector::Fermionic, tol)
}

/// Normalized symmetrized product of single-particle vectors.
pub fn symmetrized_product(vectors: &[CVec], tol: &Tolerances) -> Result<PureState> {
    if vectors.is_empty() {
        return invalid("need at least one vector");
    }
    let t = project(&product_tensor(vectors)?, Symmetry::Symmetrize)?;
    PureState::normalized(t, Sector::Bosonic, tol)
}

/// Output of [`sym_product`].
#[derive(Debug, Clone)]
pub struct SymProduct {
    pub state: PureState,
    /// Squared norm of `P[Γ⊗Λ]` before any scaling.
    pub raw_norm_sq: f64,
    /// Squared norm after the binomial factor; 1 for one-particle-orthogonal inputs.
    pub scaled_norm_sq: f64,
    /// Set when the binomial-scaled state was not already normalized.
    pub renormalized: bool,
}

/// `√C(N,J) P[Γ⊗Λ]` in the sector of the inputs.
pub fn sym_product(gamma: &PureState, lambda: &PureState, kind: Symmetry, tol: &Tolerances) -> Result<SymProduct> {
    let d = gamma.dims()[0];
    if gamma.one_particle_dim() != Some(d) || lambda.one_particle_dim() != Some(d) {
        return invalid(format!("single-particle dimensions differ: {:?} vs {:?}", gamma.dims(), lambda.dims()));
    }
    let (l, j) = (gamma.n_slots(), lambda.n_slots());
    let n = l + j;
    if n > MAX_SLOTS {
        return invalid(format!("at most {MAX_SLOTS} slots are supported"));
    }
    let raw = project(&gamma.tensor().tensor(lambda.tensor())?, kind)?;
    let raw_norm_sq = raw.norm().powi(2);
    let scaled_norm_sq = raw_norm_sq * binomial(n, j);
    if raw.norm() <= tol.rank_tol {
        return invalid("the (anti)symmetrized product vanishes");
    }
    let renormalized = (scaled_norm_sq - 1.0).abs() > tol.eq_tol * 10.0;
    let state = PureState::normalized(raw, kind.sector(), tol)?;
    Ok(SymProduct { state, raw_norm_sq, scaled_norm_sq, renormalized })
}
