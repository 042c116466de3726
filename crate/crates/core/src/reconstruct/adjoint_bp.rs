//! Back projection of travel-time residuals along the characteristics of an
//! assumed background medium.

use rayon::prelude::*;
use serde::Serialize;

use crate::eikonal::{boundary_trace, solve_eikonal, EikonalSinogram, SolverOptions};
use crate::error::{Error, Result};
use crate::grid::{gaussian_smooth_vector, gradient, normalize_direction, ScalarField2D, VectorField2D};

use super::advection::{solve_advection_diffusion, DEFAULT_KAPPA};

/// Gradients below this are treated as degenerate (the source node).
pub const DIRECTION_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdjointOptions {
    /// Viscosity `ε`; `None` means `2h`.
    pub epsilon: Option<f64>,
    /// Mollification width of the directions; `None` means `3h`.
    pub sigma: Option<f64>,
    pub kappa: f64,
    pub solver: SolverOptions,
}

impl Default for AdjointOptions {
    fn default() -> Self {
        Self {
            epsilon: None,
            sigma: None,
            kappa: DEFAULT_KAPPA,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AdjointBPResult {
    pub lambdas: Vec<ScalarField2D>,
    /// `Σₖ λₖ`, an estimate of `f − f̄`.
    pub reconstruction: ScalarField2D,
    pub epsilon: f64,
    pub sigma: f64,
    /// Whether every background eikonal solve converged.
    pub converged: bool,
}

/// Mollified unit characteristic directions of the background travel time
/// `ū`. Nodes that are degenerate before or after smoothing get zero.
pub fn background_directions(ubar: &ScalarField2D, sigma: f64) -> Result<VectorField2D> {
    let d0 = normalize_direction(&gradient(ubar), DIRECTION_FLOOR)?;
    let smoothed = gaussian_smooth_vector(&d0.field, sigma)?;
    let d = normalize_direction(&smoothed, DIRECTION_FLOOR)?;
    let (mut vx, mut vy) = (d.field.vx().to_vec(), d.field.vy().to_vec());
    for (k, &deg) in d0.degenerate.iter().enumerate() {
        if deg {
            vx[k] = 0.0;
            vy[k] = 0.0;
        }
    }
    VectorField2D::new(*ubar.grid(), vx, vy)
}

/// For each source: solve the background eikonal equation in `f̄`, take the
/// residual `p − p̄` on the receivers, and transport it back along the
/// mollified background directions by [`solve_advection_diffusion`]. The
/// reconstruction is the sum of the per-source multipliers, added in
/// source order.
pub fn reconstruct_adjoint_bp(
    p: &EikonalSinogram,
    f_bar: &ScalarField2D,
    opts: &AdjointOptions,
) -> Result<AdjointBPResult> {
    let grid = *f_bar.grid();
    let geo = p.geometry;
    let epsilon = opts.epsilon.unwrap_or(2.0 * grid.h());
    let sigma = opts.sigma.unwrap_or(3.0 * grid.h());
    if !(sigma >= 0.0) {
        return Err(Error::InvalidParameter(format!("sigma must be non-negative, got {sigma}")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let r = geo.radius;
    if !grid.contains([-r, -r]) || !grid.contains([r, r]) {
        return Err(Error::GeometryMismatch(format!(
            "background grid does not cover the acquisition circle of radius {r}"
        )));
    }

    let per_source: Vec<(ScalarField2D, bool)> = (0..geo.n_sources)
        .into_par_iter()
        .map(|k| {
            let wrap = |e: Error| Error::SourceSolve {
                source_index: k,
                reason: e.to_string(),
            };
            let sol = solve_eikonal(f_bar, geo.source(k), opts.solver).map_err(wrap)?;
            let pbar = boundary_trace(&sol, &geo)?;
            let data: Vec<f64> = p.row(k).iter().zip(&pbar).map(|(a, b)| a - b).collect();
            let d = background_directions(&sol.u, sigma)?;
            let lam = solve_advection_diffusion(&d, &data, epsilon, &geo, opts.kappa)?;
            Ok((lam, sol.converged))
        })
        .collect::<Result<Vec<_>>>()?;

    let converged = per_source.iter().all(|(_, c)| *c);
    let lambdas: Vec<ScalarField2D> = per_source.into_iter().map(|(l, _)| l).collect();
    let mut sum = vec![0.0; grid.len()];
    for lam in &lambdas {
        for (s, v) in sum.iter_mut().zip(lam.values()) {
            *s += v;
        }
    }
    Ok(AdjointBPResult {
        reconstruction: ScalarField2D::new(grid, sum)?,
        lambdas,
        epsilon,
        sigma,
        converged,
    })
}
