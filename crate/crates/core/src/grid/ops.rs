use crate::error::{Error, Result};

use super::{Grid2D, Point, ScalarField2D, VectorField2D};

/// Second-order finite-difference gradient.
///
/// Central differences in the interior and one-sided three-point stencils on
/// the edges, so affine and quadratic fields are differentiated exactly.
pub fn gradient(field: &ScalarField2D) -> VectorField2D {
    let g = *field.grid();
    let (nx, ny, h) = (g.nx(), g.ny(), g.h());
    let u = field.values();
    let mut vx = vec![0.0; g.len()];
    let mut vy = vec![0.0; g.len()];
    let inv2h = 0.5 / h;
    for j in 0..ny {
        for i in 0..nx {
            let k = g.index(i, j);
            vx[k] = if i == 0 {
                (-3.0 * u[k] + 4.0 * u[k + 1] - u[k + 2]) * inv2h
            } else if i == nx - 1 {
                (3.0 * u[k] - 4.0 * u[k - 1] + u[k - 2]) * inv2h
            } else {
                (u[k + 1] - u[k - 1]) * inv2h
            };
            vy[k] = if j == 0 {
                (-3.0 * u[k] + 4.0 * u[k + nx] - u[k + 2 * nx]) * inv2h
            } else if j == ny - 1 {
                (3.0 * u[k] - 4.0 * u[k - nx] + u[k - 2 * nx]) * inv2h
            } else {
                (u[k + nx] - u[k - nx]) * inv2h
            };
        }
    }
    VectorField2D::from_raw(g, vx, vy)
}

/// Unit direction field with the nodes where the input was too small to
/// normalise.
#[derive(Debug, Clone)]
pub struct Direction {
    pub field: VectorField2D,
    pub degenerate: Vec<bool>,
}

impl Direction {
    pub fn degenerate_count(&self) -> usize {
        self.degenerate.iter().filter(|&&d| d).count()
    }
}

/// Maps every node to `v / |v|`, or to zero (flagged degenerate) when
/// `|v| < floor`.
pub fn normalize_direction(v: &VectorField2D, floor: f64) -> Result<Direction> {
    if !(floor > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "normalisation floor must be positive, got {floor}"
        )));
    }
    let n = v.grid().len();
    let mut vx = Vec::with_capacity(n);
    let mut vy = Vec::with_capacity(n);
    let mut degenerate = Vec::with_capacity(n);
    for k in 0..n {
        let [a, b] = v.at(k);
        let m = a.hypot(b);
        if m >= floor {
            vx.push(a / m);
            vy.push(b / m);
            degenerate.push(false);
        } else {
            vx.push(0.0);
            vy.push(0.0);
            degenerate.push(true);
        }
    }
    Ok(Direction {
        field: VectorField2D::from_raw(*v.grid(), vx, vy),
        degenerate,
    })
}

fn gaussian_kernel(sigma: f64, h: f64) -> Vec<f64> {
    let radius = (3.0 * sigma / h).ceil() as usize;
    let mut w: Vec<f64> = (0..=2 * radius)
        .map(|k| {
            let x = (k as f64 - radius as f64) * h;
            (-x * x / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w
}

/// Half-sample symmetric reflection into `0..n`, valid for any offset.
#[inline]
fn reflect(k: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let m = k.rem_euclid(period) as usize;
    if m < n {
        m
    } else {
        2 * n - 1 - m
    }
}

fn convolve_lines(
    src: &[f64],
    dst: &mut [f64],
    count: usize,
    len: usize,
    stride_line: usize,
    stride_elem: usize,
    kernel: &[f64],
) {
    let r = (kernel.len() / 2) as isize;
    for line in 0..count {
        let base = line * stride_line;
        for e in 0..len {
            let mut acc = 0.0;
            for (t, w) in kernel.iter().enumerate() {
                let src_e = reflect(e as isize + t as isize - r, len);
                acc += w * src[base + src_e * stride_elem];
            }
            dst[base + e * stride_elem] = acc;
        }
    }
}

fn smooth_values(grid: &Grid2D, values: &[f64], sigma: f64) -> Vec<f64> {
    let kernel = gaussian_kernel(sigma, grid.h());
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut tmp = vec![0.0; values.len()];
    let mut out = vec![0.0; values.len()];
    convolve_lines(values, &mut tmp, ny, nx, nx, 1, &kernel);
    convolve_lines(&tmp, &mut out, nx, ny, 1, nx, &kernel);
    out
}

/// Separable Gaussian smoothing with standard deviation `sigma` (a length).
///
/// The kernel extends `⌈3σ/h⌉` nodes each way and sums to one. Boundaries
/// are handled by mirror reflection, which keeps the smoothing matrix
/// symmetric and doubly stochastic: constants are reproduced and the total
/// mass of the field is conserved.
pub fn gaussian_smooth(field: &ScalarField2D, sigma: f64) -> Result<ScalarField2D> {
    check_sigma(sigma)?;
    if sigma == 0.0 {
        return Ok(field.clone());
    }
    let out = smooth_values(field.grid(), field.values(), sigma);
    Ok(ScalarField2D::from_raw(*field.grid(), out))
}

/// Component-wise [`gaussian_smooth`].
pub fn gaussian_smooth_vector(v: &VectorField2D, sigma: f64) -> Result<VectorField2D> {
    check_sigma(sigma)?;
    if sigma == 0.0 {
        return Ok(v.clone());
    }
    let g = *v.grid();
    Ok(VectorField2D::from_raw(
        g,
        smooth_values(&g, v.vx(), sigma),
        smooth_values(&g, v.vy(), sigma),
    ))
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma >= 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "smoothing width must be non-negative, got {sigma}"
        )))
    }
}

/// Snap fractional coordinates that are within rounding of a node.
#[inline]
fn snap(f: f64) -> f64 {
    let r = f.round();
    if (f - r).abs() < 1e-9 {
        r
    } else {
        f
    }
}

/// Bilinear interpolation weights of the four nodes around `p`, or `None`
/// when `p` is outside the bounding box.
#[inline]
pub fn bilinear_weights(grid: &Grid2D, p: Point) -> Option<[(usize, f64); 4]> {
    let fx = snap((p[0] - grid.origin()[0]) / grid.h());
    let fy = snap((p[1] - grid.origin()[1]) / grid.h());
    let (mx, my) = ((grid.nx() - 1) as f64, (grid.ny() - 1) as f64);
    if !(fx >= 0.0 && fy >= 0.0 && fx <= mx && fy <= my) {
        return None;
    }
    let i = (fx.floor() as usize).min(grid.nx() - 2);
    let j = (fy.floor() as usize).min(grid.ny() - 2);
    let tx = fx - i as f64;
    let ty = fy - j as f64;
    let k = grid.index(i, j);
    let nx = grid.nx();
    Some([
        (k, (1.0 - tx) * (1.0 - ty)),
        (k + 1, tx * (1.0 - ty)),
        (k + nx, (1.0 - tx) * ty),
        (k + nx + 1, tx * ty),
    ])
}

/// Bilinear interpolation of `field` at `p`.
pub fn sample_bilinear(field: &ScalarField2D, p: Point) -> Result<f64> {
    let w = bilinear_weights(field.grid(), p).ok_or(Error::OutOfBounds { x: p[0], y: p[1] })?;
    let v = field.values();
    // skip zero weights so a node query returns the node value bit-exactly
    Ok(w
        .iter()
        .filter(|(_, c)| *c != 0.0)
        .map(|&(k, c)| c * v[k])
        .sum())
}

/// Nodes with `|x| ≤ radius`.
pub fn disk_mask(grid: &Grid2D, radius: f64) -> Vec<bool> {
    let r2 = radius * radius;
    (0..grid.len())
        .map(|k| {
            let [x, y] = grid.node_at(k);
            x * x + y * y <= r2
        })
        .collect()
}
