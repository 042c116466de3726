use std::f64::consts::PI;

use rayon::prelude::*;

use crate::eikonal::sinogram::{parse_sino, sino_to_string, EikonalSinogram};
use crate::error::{Error, Result};
use crate::grid::{AcquisitionGeometry, Grid2D, ScalarField2D};

use super::ray::{ray_step, segment_quadrature, sum_partials};

/// Line integrals along the chords joining every source to every receiver.
///
/// Same layout as [`EikonalSinogram`]; the ray of entry `(k, j)` has
/// direction `(receiver_j − source_k) / |receiver_j − source_k|`.
#[derive(Debug, Clone, PartialEq)]
pub struct FanbeamSinogram {
    pub geometry: AcquisitionGeometry,
    pub data: Vec<f64>,
}

pub const FAN_SINO_TAG: &str = "FAN-SINO";

impl FanbeamSinogram {
    pub fn new(geometry: AcquisitionGeometry, data: Vec<f64>) -> Result<Self> {
        let expected = geometry.n_sources * geometry.n_receivers;
        if data.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        Ok(Self { geometry, data })
    }

    pub fn zeros(geometry: AcquisitionGeometry) -> Self {
        Self {
            geometry,
            data: vec![0.0; geometry.n_sources * geometry.n_receivers],
        }
    }

    /// `measured − reference` travel times, read as line-integral data.
    pub fn from_residual(measured: &EikonalSinogram, reference: &EikonalSinogram) -> Result<Self> {
        Self::new(measured.geometry, measured.residual(reference)?)
    }

    pub fn row(&self, k: usize) -> &[f64] {
        let n = self.geometry.n_receivers;
        &self.data[k * n..(k + 1) * n]
    }

    /// Fan angle `γ ∈ (−π/2, π/2]` of entry `(k, j)`: the angle between the
    /// ray and the line from the source through the centre.
    pub fn fan_angle(&self, k: usize, j: usize) -> f64 {
        let d = self.geometry.receiver_angle(j) - self.geometry.source_angle(k) - PI;
        let g = 0.5 * d;
        // wrap into (-π/2, π/2]
        g - PI * ((g + 0.5 * PI) / PI).ceil() + PI
    }

    /// Weight of one entry in the sinogram inner product: source arc
    /// `2π/m` times ray-angle step `π/n` (the inscribed angle moves at half
    /// the receiver rate).
    pub fn bin_weight(&self) -> f64 {
        (2.0 * PI / self.geometry.n_sources as f64) * (PI / self.geometry.n_receivers as f64)
    }

    pub fn dot(&self, other: &FanbeamSinogram) -> f64 {
        let s: f64 = self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum();
        s * self.bin_weight()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn to_text(&self) -> String {
        sino_to_string(FAN_SINO_TAG, &self.geometry, &self.data)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let (tag, geometry, data) = parse_sino(text)?;
        if tag != FAN_SINO_TAG {
            return Err(Error::Parse(format!("expected {FAN_SINO_TAG}, found {tag}")));
        }
        Self::new(geometry, data)
    }
}

/// Discrete fanbeam transform: trapezoid quadrature (step `h/2`) of bilinear
/// samples of `f` from each source to each receiver.
pub fn fanbeam(f: &ScalarField2D, geometry: &AcquisitionGeometry) -> FanbeamSinogram {
    let mut out = FanbeamSinogram::zeros(*geometry);
    out.data
        .par_chunks_mut(geometry.n_receivers)
        .enumerate()
        .for_each(|(k, row)| row.copy_from_slice(&fanbeam_row(f, geometry, k)));
    out
}

/// Row `k` of [`fanbeam`] alone.
pub(crate) fn fanbeam_row(f: &ScalarField2D, geometry: &AcquisitionGeometry, k: usize) -> Vec<f64> {
    let grid = *f.grid();
    let step = ray_step(&grid);
    let values = f.values();
    let s = geometry.source(k);
    geometry
        .receivers()
        .into_iter()
        .map(|r| {
            let mut acc = 0.0;
            segment_quadrature(&grid, s, r, step, |n, w| acc += w * values[n]);
            acc
        })
        .collect()
}

/// Exact transpose of [`fanbeam`] for the cell-area grid inner product and
/// [`FanbeamSinogram::dot`].
pub fn fanbeam_adjoint(p: &FanbeamSinogram, grid: &Grid2D) -> ScalarField2D {
    let step = ray_step(grid);
    let scale = p.bin_weight() / grid.cell_area();
    let receivers = p.geometry.receivers();
    let len = grid.len();
    let partials: Vec<Vec<f64>> = (0..p.geometry.n_sources)
        .into_par_iter()
        .map(|k| {
            let mut buf = vec![0.0; len];
            let s = p.geometry.source(k);
            for (&g, &r) in p.row(k).iter().zip(&receivers) {
                if g == 0.0 {
                    continue;
                }
                let gs = g * scale;
                segment_quadrature(grid, s, r, step, |n, w| buf[n] += w * gs);
            }
            buf
        })
        .collect();
    ScalarField2D::from_raw(*grid, sum_partials(partials, len))
}
