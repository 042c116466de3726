//! Slowness reconstruction from eikonal sinograms.

mod adjoint_bp;
mod advection;
mod two_step;

pub use adjoint_bp::{
    background_directions, reconstruct_adjoint_bp, AdjointBPResult, AdjointOptions, DIRECTION_FLOOR,
};
pub use advection::{solve_advection_diffusion, DEFAULT_KAPPA, RESIDUAL_TOL};
pub use two_step::{fbp_estimate, reconstruct_two_step, CombineMode, TwoStepOptions, TwoStepResult};
