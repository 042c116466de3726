use crate::grid::{bilinear_weights, Grid2D, Point};

/// Composite trapezoid rule on the segment `a → b` with step at most
/// `max_step`, over bilinear samples of the grid.
///
/// `visit(node, weight)` is called once per (sample, interpolation corner)
/// with the product of quadrature and bilinear weights; samples outside the
/// grid contribute nothing. Forward integration and its transpose both go
/// through this routine so they stay exact adjoints of each other.
#[inline]
pub(crate) fn segment_quadrature(
    grid: &Grid2D,
    a: Point,
    b: Point,
    max_step: f64,
    mut visit: impl FnMut(usize, f64),
) {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len = dx.hypot(dy);
    if len <= 0.0 {
        return;
    }
    let n = (len / max_step).ceil().max(1.0) as usize;
    let ds = len / n as f64;
    for s in 0..=n {
        let tau = s as f64 / n as f64;
        let w = if s == 0 || s == n { 0.5 * ds } else { ds };
        let p = [a[0] + tau * dx, a[1] + tau * dy];
        if let Some(corners) = bilinear_weights(grid, p) {
            for (k, c) in corners {
                if c != 0.0 {
                    visit(k, w * c);
                }
            }
        }
    }
}

/// Quadrature step used along every ray: half a grid cell.
#[inline]
pub(crate) fn ray_step(grid: &Grid2D) -> f64 {
    0.5 * grid.h()
}

/// Sums equally sized partial buffers in their given order.
pub(crate) fn sum_partials(partials: Vec<Vec<f64>>, len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for p in partials {
        for (o, v) in out.iter_mut().zip(p) {
            *o += v;
        }
    }
    out
}
