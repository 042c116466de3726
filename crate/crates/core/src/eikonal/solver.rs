//! Godunov upwind fast sweeping for the point-source eikonal equation
//! `|∇u| = f`, `u(x₀) = 0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{sample_bilinear, Point, ScalarField2D, VectorField2D};

/// Stopping rule for the sweeping iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverOptions {
    /// Stop once no node changes by more than this during a full pass.
    pub tol: f64,
    /// Cap on full passes (each pass runs the four sweep orderings).
    pub max_sweeps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_sweeps: 100,
        }
    }
}

/// Nodes within this many cells of the source are set to the exact local
/// distance and frozen.
pub const SOURCE_INIT_CELLS: f64 = 2.0;

#[derive(Debug, Clone)]
pub struct EikonalSolution {
    pub u: ScalarField2D,
    pub source: Point,
    pub iterations: usize,
    pub converged: bool,
}

/// One-dimensional-in-each-axis Godunov update for `|∇u| = f` given the
/// smallest neighbour values `a` (x) and `b` (y) and `fh = f·h`.
#[inline]
fn godunov(a: f64, b: f64, fh: f64) -> f64 {
    if (a - b).abs() >= fh {
        a.min(b) + fh
    } else {
        0.5 * (a + b + (2.0 * fh * fh - (a - b) * (a - b)).sqrt())
    }
}

pub fn check_slowness(f: &ScalarField2D) -> Result<()> {
    match f.values().iter().position(|&v| !(v > 0.0)) {
        Some(node) => Err(Error::NonPositiveSlowness {
            node,
            value: f.values()[node],
        }),
        None => Ok(()),
    }
}

/// Viscosity solution of `|∇u| = f` with `u(source) = 0`.
///
/// Nodes within `2h` of the source get `f(x₀)·|x − x₀|` and are never
/// updated. The remaining nodes are relaxed by Gauss-Seidel sweeps in the
/// four diagonal orderings until a pass changes no node by more than
/// `opts.tol`; hitting `opts.max_sweeps` passes returns the current iterate
/// with `converged = false`.
pub fn solve_eikonal(
    f: &ScalarField2D,
    source: Point,
    opts: SolverOptions,
) -> Result<EikonalSolution> {
    check_slowness(f)?;
    let grid = *f.grid();
    let f_src = sample_bilinear(f, source)?;
    let (nx, ny, h) = (grid.nx(), grid.ny(), grid.h());
    let fv = f.values();

    let mut u = vec![f64::INFINITY; grid.len()];
    let mut frozen = vec![false; grid.len()];
    let r_init = SOURCE_INIT_CELLS * h * (1.0 + 1e-12);
    for (k, (uk, fk)) in u.iter_mut().zip(frozen.iter_mut()).enumerate() {
        let p = grid.node_at(k);
        let r = (p[0] - source[0]).hypot(p[1] - source[1]);
        if r <= r_init {
            *uk = f_src * r;
            *fk = true;
        }
    }

    let orders = [(false, false), (true, false), (true, true), (false, true)];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_sweeps {
        iterations += 1;
        let mut max_change: f64 = 0.0;
        for &(rev_i, rev_j) in &orders {
            for jj in 0..ny {
                let j = if rev_j { ny - 1 - jj } else { jj };
                for ii in 0..nx {
                    let i = if rev_i { nx - 1 - ii } else { ii };
                    let k = j * nx + i;
                    if frozen[k] {
                        continue;
                    }
                    let a = match (i > 0, i + 1 < nx) {
                        (true, true) => u[k - 1].min(u[k + 1]),
                        (true, false) => u[k - 1],
                        (false, _) => u[k + 1],
                    };
                    let b = match (j > 0, j + 1 < ny) {
                        (true, true) => u[k - nx].min(u[k + nx]),
                        (true, false) => u[k - nx],
                        (false, _) => u[k + nx],
                    };
                    if a.is_infinite() && b.is_infinite() {
                        continue;
                    }
                    let cand = godunov(a, b, fv[k] * h);
                    if cand < u[k] {
                        max_change = max_change.max(u[k] - cand);
                        u[k] = cand;
                    }
                }
            }
        }
        if max_change < opts.tol {
            converged = true;
            break;
        }
    }
    if u.iter().any(|v| !v.is_finite()) {
        // only possible with max_sweeps == 0
        return Err(Error::InvalidParameter(
            "eikonal solve left unreached nodes; max_sweeps must be at least 1".into(),
        ));
    }
    Ok(EikonalSolution {
        u: ScalarField2D::from_raw(grid, u),
        source,
        iterations,
        converged,
    })
}

/// Upwind one-sided gradient that the Godunov update is built from.
///
/// For each axis the smaller neighbour is the upwind one; the component is
/// the one-sided difference towards it, or zero when the node is not above
/// that neighbour. At a converged node `|∇⁺u| = f` holds to solver
/// tolerance.
pub fn upwind_gradient(u: &ScalarField2D) -> VectorField2D {
    let grid = *u.grid();
    let (nx, ny, h) = (grid.nx(), grid.ny(), grid.h());
    let v = u.values();
    let mut gx = vec![0.0; grid.len()];
    let mut gy = vec![0.0; grid.len()];
    let comp = |c: f64, lo: Option<f64>, hi: Option<f64>| -> f64 {
        // lo: neighbour at smaller coordinate, hi: larger
        match (lo, hi) {
            (Some(l), Some(r)) if l <= r => ((c - l) / h).max(0.0),
            (Some(_), Some(r)) => -((c - r) / h).max(0.0),
            (Some(l), None) => ((c - l) / h).max(0.0),
            (None, Some(r)) => -((c - r) / h).max(0.0),
            (None, None) => 0.0,
        }
    };
    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            let xl = (i > 0).then(|| v[k - 1]);
            let xr = (i + 1 < nx).then(|| v[k + 1]);
            let yl = (j > 0).then(|| v[k - nx]);
            let yr = (j + 1 < ny).then(|| v[k + nx]);
            gx[k] = comp(v[k], xl, xr);
            gy[k] = comp(v[k], yl, yr);
        }
    }
    VectorField2D::from_raw(grid, gx, gy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{disk_mask, Grid2D};

    fn linf_disk_error(h: f64, src: Point) -> f64 {
        let g = Grid2D::square(-0.8, 0.8, h).unwrap();
        let f = ScalarField2D::constant(g, 1.0);
        let sol = solve_eikonal(&f, src, SolverOptions::default()).unwrap();
        assert!(sol.converged);
        let mask = disk_mask(&g, 0.75);
        (0..g.len())
            .filter(|&k| mask[k])
            .map(|k| {
                let p = g.node_at(k);
                (sol.u.values()[k] - (p[0] - src[0]).hypot(p[1] - src[1])).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn godunov_update_cases() {
        assert_eq!(godunov(1.0, f64::INFINITY, 0.1), 1.1);
        // symmetric two-sided: (2a + sqrt(2 fh^2))/2
        let v = godunov(1.0, 1.0, 0.1);
        assert!((v - (1.0 + 0.1 / 2f64.sqrt())).abs() < 1e-15);
        // the update satisfies the discrete equation
        let (a, b, fh) = (1.0, 1.05, 0.1);
        let u = godunov(a, b, fh);
        assert!(((u - a).powi(2) + (u - b).powi(2) - fh * fh).abs() < 1e-14);
    }

    #[test]
    fn homogeneous_medium_matches_distance() {
        let e = linf_disk_error(0.01, [0.0, -0.75]);
        assert!(e <= 0.02, "L∞ error {e}");
    }

    #[test]
    fn constant_slowness_rescales() {
        let g = Grid2D::square(-0.8, 0.8, 0.01).unwrap();
        let c = 1.7;
        let src = [0.0, -0.75];
        let sol = solve_eikonal(&ScalarField2D::constant(g, c), src, SolverOptions::default()).unwrap();
        let mask = disk_mask(&g, 0.75);
        for k in (0..g.len()).filter(|&k| mask[k]) {
            let p = g.node_at(k);
            let exact = c * (p[0] - src[0]).hypot(p[1] - src[1]);
            assert!((sol.u.values()[k] - exact).abs() <= c * 0.02);
        }
    }

    #[test]
    fn rejects_non_positive_slowness() {
        let g = Grid2D::square(-1.0, 1.0, 0.1).unwrap();
        let mut f = ScalarField2D::constant(g, 1.0);
        f.values_mut()[7] = 0.0;
        assert!(matches!(
            solve_eikonal(&f, [0.0, 0.0], SolverOptions::default()),
            Err(Error::NonPositiveSlowness { node: 7, .. })
        ));
    }

    #[test]
    fn sweep_cap_reports_non_convergence() {
        let g = Grid2D::square(-1.0, 1.0, 0.05).unwrap();
        // a maze-like field needs more than one pass
        let f = ScalarField2D::from_fn(g, |p| if p[1].abs() < 0.3 && p[0] > -0.6 { 5.0 } else { 1.0 });
        let sol = solve_eikonal(&f, [0.5, -0.8], SolverOptions { tol: 1e-12, max_sweeps: 1 }).unwrap();
        assert!(!sol.converged);
        assert_eq!(sol.iterations, 1);
        let full = solve_eikonal(&f, [0.5, -0.8], SolverOptions::default()).unwrap();
        assert!(full.converged);
        assert!(full.iterations > 1);
    }

    #[test]
    fn solution_nonnegative_and_small_only_near_source() {
        let g = Grid2D::square(-0.8, 0.8, 0.02).unwrap();
        let f = ScalarField2D::from_fn(g, |p| 1.0 + 0.5 * (-(p[0] * p[0] + p[1] * p[1]) * 10.0).exp());
        let src = [0.3, -0.5];
        let sol = solve_eikonal(&f, src, SolverOptions::default()).unwrap();
        for k in 0..g.len() {
            let u = sol.u.values()[k];
            assert!(u >= 0.0);
            if u <= 2.0 * g.h() {
                let p = g.node_at(k);
                assert!((p[0] - src[0]).hypot(p[1] - src[1]) <= 3.0 * g.h());
            }
        }
    }

    #[test]
    fn upwind_gradient_magnitude_matches_slowness() {
        let g = Grid2D::square(-0.8, 0.8, 0.01).unwrap();
        let f = ScalarField2D::from_fn(g, |p| if p[0].abs() <= 0.2 && p[1].abs() <= 0.2 { 1.5 } else { 1.0 });
        let sol = solve_eikonal(&f, [0.0, -0.75], SolverOptions::default()).unwrap();
        let gu = upwind_gradient(&sol.u);
        let mask = disk_mask(&g, 0.75);
        for k in (0..g.len()).filter(|&k| mask[k]) {
            let p = g.node_at(k);
            if (p[0]).hypot(p[1] + 0.75) <= 2.5 * g.h() {
                continue;
            }
            let m = gu.vx()[k].hypot(gu.vy()[k]);
            assert!((m - f.values()[k]).abs() < 1e-6, "node {k}: |g|={m}, f={}", f.values()[k]);
        }
    }
}
