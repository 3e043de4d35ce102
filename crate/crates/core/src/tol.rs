use crate::error::{invalid, Result};

/// Width of the gray zone around `eq_tol`: residuals within a factor `GRAY`
/// of the tolerance are treated as undecided by cross-checks.
pub(crate) const GRAY: f64 = 100.0;

/// Numerical thresholds shared by all decisions.
///
/// `eq_tol` bounds scalar equalities; `rank_tol` is a singular/eigenvalue cutoff
/// relative to the largest one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub eq_tol: f64,
    pub rank_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { eq_tol: 1e-9, rank_tol: 1e-9 }
    }
}

impl Tolerances {
    pub fn new(eq_tol: f64, rank_tol: f64) -> Result<Self> {
        for (name, v) in [("eq_tol", eq_tol), ("rank_tol", rank_tol)] {
            if !(v > 0.0 && v < 1e-2) {
                return invalid(format!("{name} must lie in (0, 1e-2), got {v}"));
            }
        }
        Ok(Tolerances { eq_tol, rank_tol })
    }

    pub fn with_eq_tol(self, eq_tol: f64) -> Result<Self> {
        Self::new(eq_tol, self.rank_tol)
    }

    pub fn with_rank_tol(self, rank_tol: f64) -> Result<Self> {
        Self::new(self.eq_tol, rank_tol)
    }

    /// Numerical rank of a descending list of nonnegative magnitudes.
    pub fn rank_of(&self, descending: &[f64]) -> usize {
        let top = descending.first().copied().unwrap_or(0.0);
        if top <= f64::MIN_POSITIVE {
            return 0;
        }
        descending.iter().take_while(|&&s| s > self.rank_tol * top).count()
    }
}
