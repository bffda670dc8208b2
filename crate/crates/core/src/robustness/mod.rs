//! Perturbative robustness analysis.

mod dmatrix;
mod fidelity;
mod fit;
mod frames;
mod src;

pub use dmatrix::{d_matrix, d_matrix_exact, magnus_gate_approx, magnus_terms, DMatrix, MagnusTerms};
pub use fidelity::{fidelity_prediction, gate_fidelity, leakage};
pub use fit::{order_fit, quadratic_quartic_fit};
pub use frames::{
    auxiliary_basis, frame_at, frame_coordinates, frame_vectors, initial_frame, loop_index,
    AuxiliaryBasis, COMPUTATIONAL_DIM,
};
pub use src::{
    geometric_phase, src_residual_2level, src_residual_3level, src_residual_any,
    src_from_dmatrix, src_residual_numeric, wrap_phase, CYCLIC_TOL,
};
