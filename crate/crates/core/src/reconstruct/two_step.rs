//! Two-step probing reconstruction: linear FBP estimate, then a nonlinear
//! correction from eikonal solves in that estimate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eikonal::{solve_eikonal, upwind_gradient, EikonalSinogram, SolverOptions};
use crate::error::{Error, Result};
use crate::grid::{Grid2D, ScalarField2D};
use crate::transforms::{fbp_fanbeam_with, FanbeamSinogram, FilterSpec, RebinLayout};

/// How per-source corrections are merged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombineMode {
    #[default]
    Mean,
    Sum,
}

impl std::str::FromStr for CombineMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Self::Mean),
            "sum" => Ok(Self::Sum),
            other => Err(Error::InvalidParameter(format!(
                "combine mode must be `mean` or `sum`, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoStepOptions {
    pub filter: FilterSpec,
    pub combine: CombineMode,
    pub solver: SolverOptions,
    /// Lower clamp applied to the FBP estimate before the eikonal solves.
    pub f_min: f64,
    /// Parallel layout for rebinning; `None` derives it from the grid.
    pub layout: Option<RebinLayout>,
}

impl Default for TwoStepOptions {
    fn default() -> Self {
        Self {
            filter: FilterSpec::ramp(),
            combine: CombineMode::Mean,
            solver: SolverOptions::default(),
            f_min: 0.5,
            layout: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TwoStepResult {
    /// Linear estimate `1 + FBP(p − p̄₀)`, clamped and set to 1 off the disk.
    pub f_hat: ScalarField2D,
    /// Per-source corrections `p̂ᵏ`.
    pub corrections: Vec<ScalarField2D>,
    /// `f̂ + combine(p̂ᵏ)` on the disk, 1 outside.
    pub f_final: ScalarField2D,
    pub combine: CombineMode,
    /// Whether every step-3 eikonal solve converged.
    pub converged: bool,
}

/// `p̂ = |∇v| − 1 − d·(∇v − ∇ū)` with `ū = |x − x₀|` and `d` analytic,
/// which reduces to `|∇v| − d·∇v`.
fn correction(v: &ScalarField2D, x0: [f64; 2]) -> Vec<f64> {
    let g = upwind_gradient(v);
    let grid = *v.grid();
    (0..grid.len())
        .map(|k| {
            let p = grid.node_at(k);
            let (dx, dy) = (p[0] - x0[0], p[1] - x0[1]);
            let r = dx.hypot(dy);
            if r < 1e-12 {
                return 0.0;
            }
            let [gx, gy] = g.at(k);
            gx.hypot(gy) - (dx * gx + dy * gy) / r
        })
        .collect()
}

/// Linear estimate `1 + FBP(p − p̄₀)` on the disk (1 outside), where `p̄₀`
/// holds the unit-medium chord lengths.
pub fn fbp_estimate(
    p: &EikonalSinogram,
    grid: &Grid2D,
    filter: &FilterSpec,
    layout: Option<RebinLayout>,
) -> Result<ScalarField2D> {
    let r = p.geometry.radius;
    let baseline = EikonalSinogram::homogeneous(p.geometry);
    let residual = FanbeamSinogram::from_residual(p, &baseline)?;
    let layout = layout.unwrap_or_else(|| RebinLayout::for_grid(r, grid));
    let lin = fbp_fanbeam_with(&residual, grid, filter, layout)?;
    let vals: Vec<f64> = (0..grid.len())
        .map(|k| {
            let q = grid.node_at(k);
            if q[0].hypot(q[1]) <= r {
                1.0 + lin.values()[k]
            } else {
                1.0
            }
        })
        .collect();
    ScalarField2D::new(*grid, vals)
}

/// Reconstructs slowness from an eikonal sinogram in four steps:
/// subtract the unit-medium chords, invert the fanbeam transform, solve
/// the eikonal equation in that estimate from every source, and add the
/// combined nonlinear corrections.
pub fn reconstruct_two_step(
    p: &EikonalSinogram,
    grid: &Grid2D,
    opts: &TwoStepOptions,
) -> Result<TwoStepResult> {
    if !(opts.f_min > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "f_min must be positive, got {}",
            opts.f_min
        )));
    }
    let geo = p.geometry;
    let r = geo.radius;
    let lin = fbp_estimate(p, grid, &opts.filter, opts.layout)?;
    let in_disk = |k: usize| {
        let q = grid.node_at(k);
        q[0].hypot(q[1]) <= r
    };
    let f_hat = lin.map(|v| v.max(opts.f_min));

    let solved: Vec<(ScalarField2D, bool)> = (0..geo.n_sources)
        .into_par_iter()
        .map(|k| {
            let x0 = geo.source(k);
            let sol = solve_eikonal(&f_hat, x0, opts.solver).map_err(|e| Error::SourceSolve {
                source_index: k,
                reason: e.to_string(),
            })?;
            let c = ScalarField2D::new(*grid, correction(&sol.u, x0))?;
            Ok((c, sol.converged))
        })
        .collect::<Result<Vec<_>>>()?;
    let converged = solved.iter().all(|(_, c)| *c);
    let corrections: Vec<ScalarField2D> = solved.into_iter().map(|(c, _)| c).collect();

    let scale = match opts.combine {
        CombineMode::Mean => 1.0 / corrections.len().max(1) as f64,
        CombineMode::Sum => 1.0,
    };
    let mut total = vec![0.0; grid.len()];
    for c in &corrections {
        for (t, v) in total.iter_mut().zip(c.values()) {
            *t += v;
        }
    }
    let final_vals: Vec<f64> = (0..grid.len())
        .map(|k| if in_disk(k) { f_hat.values()[k] + scale * total[k] } else { 1.0 })
        .collect();
    Ok(TwoStepResult {
        f_final: ScalarField2D::new(*grid, final_vals)?,
        f_hat,
        corrections,
        combine: opts.combine,
        converged,
    })
}
