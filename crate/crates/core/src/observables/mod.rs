//! Quantities measured on hybrid states.

mod negativity;
mod plateau;
mod reduce;
mod series;
mod squeezing;
mod wigner;

pub use crate::fock::Branch;
pub use negativity::{negativity, negativity_partial_transpose, Negativity, StateRef};
pub use plateau::{plateau_detect, PlateauOptions, PlateauReport};
pub use reduce::{conditioned_osc, reduce_osc, reduce_qubit, QubitDensity};
pub use series::TimeSeries;
pub use squeezing::{squeezing_scan, QuadratureMoments, SqueezingRecord};
pub use wigner::{
    wigner, wigner_displaced_parity, wigner_overlap, wigner_overlap_exact, GridSpec, WignerConvention, WignerGrid,
    MAX_RADIUS as WIGNER_MAX_RADIUS, MAX_STEP as WIGNER_MAX_STEP,
};
