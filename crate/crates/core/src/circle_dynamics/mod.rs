//! Transverse dynamics: the doubling map, its antipodal symmetry, g-functions
//! and g-measures.

mod angle;
mod gfunction;
mod measure;
mod transfer;

pub use angle::{antipode, doubling_map, CircleAngle};
pub use gfunction::{validate_g, GFunction, GValidation, IDENTITY_TOLERANCE};
pub use measure::{CircleMeasure, MASS_TOLERANCE};
pub use transfer::{compute_g_measure, radon_nikodym_check, transfer_dual_step, GMeasure};
