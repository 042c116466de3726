use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::io::{fmt_f64, next_parsed};
use crate::grid::{Grid2D, ScalarField2D};

use super::ray::{ray_step, segment_quadrature, sum_partials};

/// Radon-layout sinogram: `n_angles` normal directions `φ_a = a·π/n_angles`
/// in `[0, π)` by `n_offsets` signed offsets equally spaced on `[−R, R]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParallelSinogram {
    pub n_angles: usize,
    pub n_offsets: usize,
    pub radius: f64,
    pub data: Vec<f64>,
    /// Set by the rebinner when the requested offsets are much finer than
    /// the fan rays they were interpolated from.
    pub undersampled: bool,
}

pub const PAR_SINO_TAG: &str = "PAR-SINO";

impl ParallelSinogram {
    pub fn zeros(n_angles: usize, n_offsets: usize, radius: f64) -> Result<Self> {
        Self::new(n_angles, n_offsets, radius, vec![0.0; n_angles * n_offsets])
    }

    pub fn new(n_angles: usize, n_offsets: usize, radius: f64, data: Vec<f64>) -> Result<Self> {
        if n_angles == 0 || n_offsets < 2 {
            return Err(Error::InvalidParameter(format!(
                "parallel sinogram needs at least 1 angle and 2 offsets, got {n_angles}x{n_offsets}"
            )));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
        }
        if data.len() != n_angles * n_offsets {
            return Err(Error::LengthMismatch {
                expected: n_angles * n_offsets,
                got: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        Ok(Self {
            n_angles,
            n_offsets,
            radius,
            data,
            undersampled: false,
        })
    }

    pub fn angle(&self, a: usize) -> f64 {
        a as f64 * PI / self.n_angles as f64
    }

    pub fn offset_step(&self) -> f64 {
        2.0 * self.radius / (self.n_offsets - 1) as f64
    }

    pub fn offset(&self, b: usize) -> f64 {
        -self.radius + b as f64 * self.offset_step()
    }

    pub fn row(&self, a: usize) -> &[f64] {
        &self.data[a * self.n_offsets..(a + 1) * self.n_offsets]
    }

    /// Weight of one bin in the sinogram inner product. Each stored angle
    /// stands for itself and its antipode, so the angular measure covers the
    /// full circle.
    pub fn bin_weight(&self) -> f64 {
        2.0 * (PI / self.n_angles as f64) * self.offset_step()
    }

    pub fn dot(&self, other: &ParallelSinogram) -> f64 {
        let s: f64 = self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum();
        s * self.bin_weight()
    }

    /// End points of the chord of the radius-`R` disk with normal angle
    /// `φ_a` and offset `t_b`, or `None` for |t| ≥ R.
    pub(crate) fn chord(&self, a: usize, b: usize) -> Option<([f64; 2], [f64; 2])> {
        let t = self.offset(b);
        let half = (self.radius * self.radius - t * t).max(0.0).sqrt();
        if half <= 0.0 {
            return None;
        }
        let (s, c) = self.angle(a).sin_cos();
        let mid = [t * c, t * s];
        let dir = [-s, c];
        Some((
            [mid[0] - half * dir[0], mid[1] - half * dir[1]],
            [mid[0] + half * dir[0], mid[1] + half * dir[1]],
        ))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{PAR_SINO_TAG} {} {} {}\n",
            self.n_angles,
            self.n_offsets,
            fmt_f64(self.radius)
        );
        for row in self.data.chunks(self.n_offsets) {
            let line: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        match tokens.next() {
            Some(PAR_SINO_TAG) => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected {PAR_SINO_TAG} header, found {other:?}"
                )))
            }
        }
        let na: usize = next_parsed(&mut tokens, "n_angles")?;
        let no: usize = next_parsed(&mut tokens, "n_offsets")?;
        let r: f64 = next_parsed(&mut tokens, "R")?;
        let data = tokens
            .map(|t| t.parse::<f64>().map_err(|e| Error::Parse(format!("bad value `{t}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(na, no, r, data)
    }
}

/// Discrete Radon transform: trapezoid quadrature (step `h/2`) of bilinear
/// samples of `f` along every chord of the disk of radius `radius`.
pub fn radon(
    f: &ScalarField2D,
    n_angles: usize,
    n_offsets: usize,
    radius: f64,
) -> Result<ParallelSinogram> {
    let mut out = ParallelSinogram::zeros(n_angles, n_offsets, radius)?;
    let grid = *f.grid();
    let step = ray_step(&grid);
    let values = f.values();
    let layout = out.clone();
    out.data
        .par_chunks_mut(n_offsets)
        .enumerate()
        .for_each(|(a, row)| {
            for (b, slot) in row.iter_mut().enumerate() {
                if let Some((p, q)) = layout.chord(a, b) {
                    let mut acc = 0.0;
                    segment_quadrature(&grid, p, q, step, |k, w| acc += w * values[k]);
                    *slot = acc;
                }
            }
        });
    Ok(out)
}

/// Exact transpose of [`radon`] with respect to the cell-area inner product
/// on the grid and [`ParallelSinogram::dot`] on the sinogram.
pub fn radon_adjoint(p: &ParallelSinogram, grid: &Grid2D) -> ScalarField2D {
    let step = ray_step(grid);
    let scale = p.bin_weight() / grid.cell_area();
    let len = grid.len();
    const ANGLES_PER_TASK: usize = 8;
    let tasks: Vec<usize> = (0..p.n_angles).step_by(ANGLES_PER_TASK).collect();
    let partials: Vec<Vec<f64>> = tasks
        .par_iter()
        .map(|&a0| {
            let mut buf = vec![0.0; len];
            for a in a0..(a0 + ANGLES_PER_TASK).min(p.n_angles) {
                for (b, &g) in p.row(a).iter().enumerate() {
                    if g == 0.0 {
                        continue;
                    }
                    if let Some((s, e)) = p.chord(a, b) {
                        let gs = g * scale;
                        segment_quadrature(grid, s, e, step, |k, w| buf[k] += w * gs);
                    }
                }
            }
            buf
        })
        .collect();
    ScalarField2D::from_raw(*grid, sum_partials(partials, len))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_in_zero_out() {
        let g = Grid2D::square(-0.8, 0.8, 0.02).unwrap();
        let s = radon(&ScalarField2D::zeros(g), 12, 31, 0.75).unwrap();
        assert!(s.data.iter().all(|&v| v == 0.0));
        let back = radon_adjoint(&s, &g);
        assert!(back.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn disk_indicator_projects_to_chord_lengths() {
        let g = Grid2D::square(-0.8, 0.8, 0.005).unwrap();
        let r = 0.5;
        let f = ScalarField2D::from_fn(g, |p| if p[0].hypot(p[1]) <= r { 1.0 } else { 0.0 });
        let s = radon(&f, 8, 61, 0.75).unwrap();
        for a in 0..8 {
            for b in 0..61 {
                let t = s.offset(b);
                let chord = |r: f64| if t.abs() < r { 2.0 * (r * r - t * t).sqrt() } else { 0.0 };
                // pixelisation moves the rim by up to a node spacing
                let lo = chord(r - g.h()) - 2.0 * g.h();
                let hi = chord(r + g.h()) + 2.0 * g.h();
                let got = s.data[a * 61 + b];
                assert!(got >= lo && got <= hi, "a={a} t={t} {got} not in [{lo}, {hi}]");
            }
        }
    }

    #[test]
    fn gaussian_projection_is_angle_independent() {
        let g = Grid2D::square(-0.8, 0.8, 0.01).unwrap();
        let sigma: f64 = 0.1;
        let f = ScalarField2D::from_fn(g, |p| (-(p[0] * p[0] + p[1] * p[1]) / (2.0 * sigma * sigma)).exp());
        let s = radon(&f, 18, 101, 0.75).unwrap();
        let peak = (2.0 * PI).sqrt() * sigma;
        for a in 0..18 {
            for b in 0..101 {
                let t = s.offset(b);
                let exact = peak * (-t * t / (2.0 * sigma * sigma)).exp();
                let got = s.data[a * 101 + b];
                assert!((got - exact).abs() <= 0.01 * peak, "a={a} t={t}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn adjoint_identity_holds_to_roundoff() {
        let g = Grid2D::new(64, 64, 1.6 / 63.0, [-0.8, -0.8]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = ScalarField2D::from_fn(g, |_| rng.random::<f64>() - 0.5);
        let mut q = ParallelSinogram::zeros(45, 64, 0.75).unwrap();
        q.data.iter_mut().for_each(|v| *v = rng.random::<f64>() - 0.5);
        let lhs = radon(&f, 45, 64, 0.75).unwrap().dot(&q);
        let rhs = f.dot(&radon_adjoint(&q, &g));
        assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn single_bin_backprojects_onto_a_strip() {
        let g = Grid2D::square(-0.8, 0.8, 0.01).unwrap();
        let mut q = ParallelSinogram::zeros(4, 151, 0.75).unwrap();
        // angle 0: normal along x, offset 0.25 -> the vertical line x = 0.25
        let b = 100;
        q.data[b] = 1.0;
        let back = radon_adjoint(&q, &g);
        let t = q.offset(b);
        for k in 0..g.len() {
            if back.values()[k] != 0.0 {
                let x = g.node_at(k)[0];
                assert!((x - t).abs() < g.h() + 1e-12, "support at x={x}, line at {t}");
            }
        }
        assert!(back.max() > 0.0);
    }

    #[test]
    fn text_round_trip() {
        let mut s = ParallelSinogram::zeros(3, 4, 0.75).unwrap();
        s.data[5] = 1.25;
        let back = ParallelSinogram::parse(&s.to_text()).unwrap();
        assert_eq!(back, s);
    }
}
