//! Point-source eikonal solver, boundary travel-time sinograms and the
//! linearisation diagnostics built on them.

mod p1;
pub(crate) mod sinogram;
mod solver;

pub use p1::{p1_field, p1_l1_check, L1Check};
pub use sinogram::{
    boundary_trace, forward_sinogram, forward_solutions, sinogram_from_solutions, EikonalSinogram,
    EIK_SINO_TAG,
};
pub use solver::{
    check_slowness, solve_eikonal, upwind_gradient, EikonalSolution, SolverOptions,
    SOURCE_INIT_CELLS,
};
