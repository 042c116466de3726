//! The nonlinear remainder `p₁ = f − 1 + d·(∇ū − ∇u)` of the linearised
//! travel-time map about the unit medium.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{AcquisitionGeometry, Point, ScalarField2D, VectorField2D};
use crate::transforms::fanbeam_row;

use super::sinogram::boundary_trace;
use super::solver::{upwind_gradient, EikonalSolution};

/// Radial unit field `(x − x₀)/|x − x₀|`, zero at `x₀`.
fn radial(grid: &crate::grid::Grid2D, x0: Point) -> VectorField2D {
    VectorField2D::from_fn(*grid, |p| {
        let (dx, dy) = (p[0] - x0[0], p[1] - x0[1]);
        let r = dx.hypot(dy);
        if r < 1e-12 {
            [0.0, 0.0]
        } else {
            [dx / r, dy / r]
        }
    })
}

fn remainder(f: &ScalarField2D, d: &VectorField2D, grad_ubar: &VectorField2D, grad_u: &VectorField2D) -> Vec<f64> {
    (0..f.values().len())
        .map(|k| {
            let [dx, dy] = d.at(k);
            if dx == 0.0 && dy == 0.0 {
                return 0.0;
            }
            let [bx, by] = grad_ubar.at(k);
            let [ux, uy] = grad_u.at(k);
            f.values()[k] - 1.0 + dx * (bx - ux) + dy * (by - uy)
        })
        .collect()
}

/// `p₁` for the solution `u` of `|∇u| = f` from `source`, with the unit-medium
/// travel time `ū = |x − x₀|` and direction `d` taken analytically.
///
/// `∇u` is the solver's upwind gradient, so `|∇u| = f` holds node by node
/// and `p₁ = f − d·∇u ≥ 0` up to solver tolerance.
pub fn p1_field(u: &EikonalSolution, f: &ScalarField2D, source: Point) -> Result<ScalarField2D> {
    f.check_same_grid(&u.u)?;
    let grid = *f.grid();
    let d = radial(&grid, source);
    let grad_u = upwind_gradient(&u.u);
    // ∇ū = d analytically
    let v = remainder(f, &d, &d, &grad_u);
    ScalarField2D::new(grid, v)
}

/// Both sides of the integrated identity for `p₁`, summed over sources.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct L1Check {
    /// Fan integrals of `p₁`.
    pub lhs: f64,
    /// Fan integrals of `f − 1` minus the boundary residual `u − ū`.
    pub rhs: f64,
}

impl L1Check {
    /// `|lhs − rhs| / max(|lhs|, floor)`.
    pub fn relative_gap(&self, floor: f64) -> f64 {
        (self.lhs - self.rhs).abs() / self.lhs.abs().max(floor)
    }
}

/// Integrating `p₁` along the ray from `x₀` in direction `θ` gives
/// `∫(f − 1) − (u − ū)(receiver)`, because `d` is the ray direction and
/// `u = ū = 0` at the source. Both sides are weighted by the fan measure
/// and summed over sources and receivers.
///
/// `us[k]` and `ubars[k]` are the solutions in `f` and in the unit medium
/// for source `k`. Using a numerical `ū` (rather than `|x − x₀|`) makes
/// the solver's discretisation error appear on both sides alike.
pub fn p1_l1_check(
    f: &ScalarField2D,
    geometry: &AcquisitionGeometry,
    us: &[EikonalSolution],
    ubars: &[EikonalSolution],
) -> Result<L1Check> {
    let m = geometry.n_sources;
    if us.len() != m || ubars.len() != m {
        return Err(Error::GeometryMismatch(format!(
            "expected {m} solutions per medium, got {} and {}",
            us.len(),
            ubars.len()
        )));
    }
    let grid = *f.grid();
    let excess = f.map(|v| v - 1.0);
    let weight = (2.0 * std::f64::consts::PI / m as f64) * (std::f64::consts::PI / geometry.n_receivers as f64);
    let per_source: Vec<(f64, f64)> = (0..m)
        .into_par_iter()
        .map(|k| -> Result<(f64, f64)> {
            f.check_same_grid(&us[k].u)?;
            f.check_same_grid(&ubars[k].u)?;
            let x0 = geometry.source(k);
            let d = radial(&grid, x0);
            let p1 = ScalarField2D::new(
                grid,
                remainder(f, &d, &upwind_gradient(&ubars[k].u), &upwind_gradient(&us[k].u)),
            )?;
            let lhs: f64 = fanbeam_row(&p1, geometry, k).iter().sum();
            let fan = fanbeam_row(&excess, geometry, k);
            let tu = boundary_trace(&us[k], geometry)?;
            let tb = boundary_trace(&ubars[k], geometry)?;
            let rhs: f64 = fan
                .iter()
                .zip(tu.iter().zip(&tb))
                .map(|(a, (u, b))| a - (u - b))
                .sum();
            Ok((lhs, rhs))
        })
        .collect::<Result<Vec<_>>>()?;
    let (lhs, rhs) = per_source
        .iter()
        .fold((0.0, 0.0), |(a, b), (l, r)| (a + l, b + r));
    Ok(L1Check {
        lhs: lhs * weight,
        rhs: rhs * weight,
    })
}
