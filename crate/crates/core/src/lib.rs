//! Entanglement decisions and property attribution for finite-dimensional
//! composite quantum systems: distinguishable particles, fermions and bosons.

pub mod bell;
pub mod bosons_n;
pub mod catalog;
pub mod cli;
pub mod density;
pub mod distinguishable;
pub mod error;
pub mod fermions_n;
pub mod identical2;
pub mod io;
pub mod linalg;
pub mod measure;
pub mod permsym;
pub mod random;
pub mod report;
pub mod state;
pub mod tol;

pub use density::{ensemble_to_density, partial_trace, spectral, DensityOperator, SeparableEnsemble};
pub use distinguishable::{classify, is_non_entangled, schmidt_decompose, Cut, EntanglementClass, Kind};
pub use error::{Error, Result};
pub use linalg::{CMat, CVec, Spectrum, C64};
pub use state::{tensor_product, PureState, Sector, Tensor};
pub use tol::Tolerances;
