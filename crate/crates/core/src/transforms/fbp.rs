use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::{Grid2D, ScalarField2D};

use super::fanbeam::FanbeamSinogram;
use super::filter::{apply_filter, FilterSpec};
use super::radon::{radon_adjoint, ParallelSinogram};
use super::rebin::rebin_fan_to_parallel;

/// Parallel layout used when fan data is rebinned for reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RebinLayout {
    pub n_angles: usize,
    pub n_offsets: usize,
}

impl RebinLayout {
    pub const DEFAULT_ANGLES: usize = 180;

    /// 180 angles and offsets at the grid spacing across `[−R, R]`.
    pub fn for_grid(radius: f64, grid: &Grid2D) -> Self {
        let half = (radius / grid.h()).ceil() as usize;
        Self {
            n_angles: Self::DEFAULT_ANGLES,
            n_offsets: 2 * half + 1,
        }
    }
}

/// Filtered back projection of parallel data.
pub fn fbp_parallel(p: &ParallelSinogram, grid: &Grid2D, spec: &FilterSpec) -> Result<ScalarField2D> {
    let q = apply_filter(p, spec)?;
    Ok(radon_adjoint(&q, grid))
}

/// Rebins fan data to the default parallel layout, then applies
/// [`fbp_parallel`].
pub fn fbp_fanbeam(p: &FanbeamSinogram, grid: &Grid2D, spec: &FilterSpec) -> Result<ScalarField2D> {
    fbp_fanbeam_with(p, grid, spec, RebinLayout::for_grid(p.geometry.radius, grid))
}

pub fn fbp_fanbeam_with(
    p: &FanbeamSinogram,
    grid: &Grid2D,
    spec: &FilterSpec,
    layout: RebinLayout,
) -> Result<ScalarField2D> {
    let par = rebin_fan_to_parallel(p, layout.n_angles, layout.n_offsets)?;
    fbp_parallel(&par, grid, spec)
}
