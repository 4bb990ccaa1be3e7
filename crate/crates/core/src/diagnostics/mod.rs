//! Post-processing of trajectories: energy, energy-identity residual, decay
//! and blow-up fits, and the `z = τu_t + u` reformulation.

mod decay;
mod energy;
mod identity;
mod zform;

pub use decay::{detect_blowup, fit_decay_rate, linear_fit, BlowupEvent, DecayFit};
pub use energy::{energy, Energy, EnergyTrace, EnergyWeights};
pub use identity::{energy_identity_residual, IdentityResidual};
pub use zform::{
    memory_z_residual, reconstruct_u_from_z, wave_z_residual, z_transform, ZResidual, ZState,
};
