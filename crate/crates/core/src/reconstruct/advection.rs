//! Viscous transport of boundary residuals along characteristic directions.

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};

use crate::error::{Error, Result};
use crate::grid::{AcquisitionGeometry, ScalarField2D, VectorField2D};
use crate::transforms::PeriodicSpline;

/// Rows with `|n·d|` below this get the averaging closure instead of the
/// flux condition.
pub const DEFAULT_KAPPA: f64 = 0.2;

/// Relative residual the sparse solve must reach.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Solves `−εΔλ − ∇·(d λ) = 0` on the disk of radius `geometry.radius`
/// with `(n·d) λ = g` on the boundary, where `g` is `boundary_data` given
/// at the receiver angles and interpolated periodically in angle.
///
/// The sign makes information travel along `−d`, from the boundary back
/// towards the point the characteristics emanate from; the equation is
/// the adjoint of the viscous linearised eikonal operator.
///
/// Unknowns are the grid nodes with `|x| ≤ R`; a node is a boundary node
/// if one of its four neighbours lies outside. Boundary nodes with
/// `|n·d| ≥ κ` take `λ = g/(n·d)`; the rest equal the mean of their
/// in-disk neighbours. Interior rows use centred diffusion and a
/// first-order upwind flux in divergence form. Nodes outside the disk
/// are returned as 0.
pub fn solve_advection_diffusion(
    d: &VectorField2D,
    boundary_data: &[f64],
    epsilon: f64,
    geometry: &AcquisitionGeometry,
    kappa: f64,
) -> Result<ScalarField2D> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::InvalidParameter(format!("kappa must lie in (0, 1], got {kappa}")));
    }
    if boundary_data.len() != geometry.n_receivers {
        return Err(Error::LengthMismatch {
            expected: geometry.n_receivers,
            got: boundary_data.len(),
        });
    }
    if let Some(k) = boundary_data.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(k));
    }
    let grid = *d.grid();
    let (nx, ny, h) = (grid.nx(), grid.ny(), grid.h());
    let r = geometry.radius;
    if !grid.contains([-r, -r]) || !grid.contains([r, r]) {
        return Err(Error::GeometryMismatch(format!(
            "grid does not cover the disk of radius {r}"
        )));
    }

    let inside: Vec<bool> = (0..grid.len())
        .map(|k| {
            let p = grid.node_at(k);
            p[0].hypot(p[1]) <= r
        })
        .collect();
    let mut unknown = vec![usize::MAX; grid.len()];
    let mut nodes = Vec::new();
    for k in 0..grid.len() {
        if inside[k] {
            unknown[k] = nodes.len();
            nodes.push(k);
        }
    }
    let n = nodes.len();
    if n == 0 {
        return Err(Error::GeometryMismatch("no grid nodes inside the disk".into()));
    }

    let neighbours = |k: usize| -> [Option<usize>; 4] {
        let (i, j) = (k % nx, k / nx);
        [
            (i + 1 < nx).then(|| k + 1),
            (i > 0).then(|| k - 1),
            (j + 1 < ny).then(|| k + nx),
            (j > 0).then(|| k - nx),
        ]
    };

    let spline = PeriodicSpline::new(boundary_data.to_vec(), geometry.receiver_start);
    // b = −d is the transport velocity
    let (bx, by) = (d.vx(), d.vy());
    let diff = epsilon / (h * h);

    let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    let mut rhs = vec![0.0; n];
    for (row, &k) in nodes.iter().enumerate() {
        let nb = neighbours(k);
        let boundary = nb.iter().any(|o| o.is_none_or(|q| !inside[q]));
        let mut entries: Vec<(usize, f64)> = Vec::with_capacity(5);
        if boundary {
            let p = grid.node_at(k);
            let rho = p[0].hypot(p[1]);
            let (nxv, nyv) = if rho > 0.0 { (p[0] / rho, p[1] / rho) } else { (0.0, 0.0) };
            let [dx, dy] = d.at(k);
            let nd = nxv * dx + nyv * dy;
            if nd.abs() >= kappa {
                entries.push((row, 1.0));
                rhs[row] = spline.eval(p[1].atan2(p[0])) / nd;
            } else {
                let inner: Vec<usize> = nb.iter().flatten().copied().filter(|&q| inside[q]).collect();
                entries.push((row, 1.0));
                let w = 1.0 / inner.len().max(1) as f64;
                for q in inner {
                    entries.push((unknown[q], -w));
                }
            }
        } else {
            // interior: every neighbour is an unknown
            let [e, w, nn, s] = nb.map(|o| o.expect("interior node has four neighbours"));
            let face = |a: &[f64], q: usize| -0.5 * (a[k] + a[q]);
            let (be, bw, bn, bs) = (face(bx, e), face(bx, w), face(by, nn), face(by, s));
            let pos = |v: f64| v.max(0.0);
            let neg = |v: f64| v.min(0.0);
            let centre = 4.0 * diff + (pos(be) - neg(bw) + pos(bn) - neg(bs)) / h;
            entries.push((row, centre));
            entries.push((unknown[e], -diff + neg(be) / h));
            entries.push((unknown[w], -diff - pos(bw) / h));
            entries.push((unknown[nn], -diff + neg(bn) / h));
            entries.push((unknown[s], -diff - pos(bs) / h));
        }
        rows.push(entries);
    }

    let mut triplets = Vec::with_capacity(5 * n);
    for (row, entries) in rows.iter().enumerate() {
        for &(col, val) in entries {
            triplets.push(Triplet::new(row, col, val));
        }
    }
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::InvalidParameter(format!("sparse assembly failed: {e:?}")))?;
    let lu = a.sp_lu().map_err(|_| Error::IllConditioned {
        residual: f64::INFINITY,
    })?;
    let b = Col::<f64>::from_fn(n, |i| rhs[i]);
    let x = lu.solve(&b);
    let sol: Vec<f64> = (0..n).map(|i| x[i]).collect();

    let res_norm = rows
        .iter()
        .zip(&rhs)
        .map(|(entries, &bi)| {
            let ax: f64 = entries.iter().map(|&(c, v)| v * sol[c]).sum();
            (ax - bi) * (ax - bi)
        })
        .sum::<f64>()
        .sqrt();
    let rhs_norm = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    let rel = if rhs_norm > 0.0 { res_norm / rhs_norm } else { res_norm };
    if !(rel <= RESIDUAL_TOL) {
        return Err(Error::IllConditioned { residual: rel });
    }

    let mut out = vec![0.0; grid.len()];
    for (row, &k) in nodes.iter().enumerate() {
        out[k] = sol[row];
    }
    ScalarField2D::new(grid, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid2D;

    fn uniform(g: Grid2D, v: [f64; 2]) -> VectorField2D {
        VectorField2D::from_fn(g, |_| v)
    }

    /// `λ = exp(−y/ε)` solves the equation for `d = (0, 1)`.
    fn mms_error(h: f64, eps: f64) -> f64 {
        let g = Grid2D::square(-0.8, 0.8, h).unwrap();
        let geo = AcquisitionGeometry::new(0.75, 1, 720).unwrap();
        let exact = |p: [f64; 2]| (-p[1] / eps).exp();
        let data: Vec<f64> = (0..720)
            .map(|j| {
                let a = geo.receiver_angle(j);
                a.sin() * exact(geo.on_circle(a))
            })
            .collect();
        let lam = solve_advection_diffusion(&uniform(g, [0.0, 1.0]), &data, eps, &geo, DEFAULT_KAPPA).unwrap();
        let mut num = 0.0;
        for k in 0..g.len() {
            let p = g.node_at(k);
            if p[0].hypot(p[1]) <= 0.75 {
                let e = lam.values()[k] - exact(p);
                num += e * e * g.cell_area();
            }
        }
        num.sqrt()
    }

    #[test]
    fn manufactured_solution_converges() {
        let errs: Vec<f64> = [0.04, 0.02, 0.01].iter().map(|&h| mms_error(h, 0.5)).collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= 0.8, "errors {errs:?}");
        }
    }

    #[test]
    fn zero_data_gives_zero() {
        let g = Grid2D::square(-0.8, 0.8, 0.02).unwrap();
        let geo = AcquisitionGeometry::new(0.75, 1, 60).unwrap();
        let lam = solve_advection_diffusion(&uniform(g, [0.6, 0.8]), &vec![0.0; 60], 0.04, &geo, DEFAULT_KAPPA).unwrap();
        assert!(lam.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn boundary_bump_travels_back_along_the_chord() {
        let h = 0.01;
        let g = Grid2D::square(-0.8, 0.8, h).unwrap();
        let geo = AcquisitionGeometry::new(0.75, 1, 153).unwrap();
        let src = [0.0, -0.75];
        let d = VectorField2D::from_fn(g, |p| {
            let (dx, dy) = (p[0] - src[0], p[1] - src[1]);
            let r = dx.hypot(dy);
            if r < 1e-12 {
                [0.0, 0.0]
            } else {
                [dx / r, dy / r]
            }
        });
        let j0 = 50;
        let mut data = vec![0.0; 153];
        data[j0] = 1.0;
        let eps = 1e-3;
        let lam = solve_advection_diffusion(&d, &data, eps, &geo, DEFAULT_KAPPA).unwrap();
        let rec = geo.receiver(j0);
        let (ux, uy) = (rec[0] - src[0], rec[1] - src[1]);
        let len = ux.hypot(uy);
        let tube = 5.0 * eps.sqrt();
        let (mut on, mut off) = (0.0f64, 0.0f64);
        for k in 0..g.len() {
            let p = g.node_at(k);
            if p[0].hypot(p[1]) > 0.75 {
                continue;
            }
            let (px, py) = (p[0] - src[0], p[1] - src[1]);
            let along = (px * ux + py * uy) / len;
            // distance to the segment, endpoints included
            let t = along.clamp(0.0, len) / len;
            let dist = (px - t * ux).hypot(py - t * uy);
            let v = lam.values()[k].abs();
            if dist <= tube {
                on = on.max(v);
            } else {
                off = off.max(v);
            }
        }
        assert!(off <= 0.2 * on, "off-tube {off} vs on-tube {on}");
    }

    #[test]
    fn rejects_bad_parameters() {
        let g = Grid2D::square(-0.8, 0.8, 0.05).unwrap();
        let geo = AcquisitionGeometry::new(0.75, 1, 10).unwrap();
        let d = uniform(g, [1.0, 0.0]);
        assert!(solve_advection_diffusion(&d, &[0.0; 10], 0.0, &geo, 0.2).is_err());
        assert!(solve_advection_diffusion(&d, &[0.0; 9], 0.1, &geo, 0.2).is_err());
        assert!(solve_advection_diffusion(&d, &[0.0; 10], 0.1, &geo, 0.0).is_err());
    }
}
