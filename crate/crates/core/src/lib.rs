#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod basis;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod forcing;
pub mod multiharmonic;
pub mod params;
pub mod stability;
pub mod state;
pub mod timedomain;

pub use basis::{BasisKind, BasisSpec, SpectralBasis};
pub use error::{LabError, Result};
pub use forcing::ForcingSpec;
pub use params::PhysicalParams;
pub use stability::{Regime, RegimeReport};
pub use state::{ModalNorms, ModalState};
pub use timedomain::{InitialData, Scheme, SolverConfig, Termination, Trajectory};
