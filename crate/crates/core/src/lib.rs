//! Non-adiabatic geometric gate construction and robustness analysis for
//! two-level and three-level Lambda systems.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gates;
pub mod harness;
pub mod linalg;
pub mod lindblad;
pub mod propagate;
pub mod pulses;
pub mod robustness;
pub mod simulate;

pub use error::{Error, Result};
pub use linalg::{SquareOperator, StateVector, C64};
pub use propagate::{propagate_state, propagate_unitary, TimeGrid};
pub use pulses::{ErrorModel, PulseSchedule, PulseSegment, System};
