//! Uniform Cartesian grids and the fields that live on them.
//!
//! Every field is stored row-major with `x` varying fastest: node `(i, j)`
//! sits at `origin + (i·h, j·h)` and has flat index `j·nx + i`.

mod field;
mod geometry;
pub mod io;
mod ops;

pub use field::{ScalarField2D, VectorField2D};
pub use geometry::AcquisitionGeometry;
pub use ops::{
    bilinear_weights, disk_mask, gaussian_smooth, gaussian_smooth_vector, gradient,
    normalize_direction, sample_bilinear, Direction,
};

use serde::Serialize;

use crate::error::{Error, Result};

/// Coordinates in the plane.
pub type Point = [f64; 2];

/// Uniform square-cell grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid2D {
    nx: usize,
    ny: usize,
    h: f64,
    origin: Point,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, h: f64, origin: Point) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3x3 nodes, got {nx}x{ny}"
            )));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {h}")));
        }
        if !(origin[0].is_finite() && origin[1].is_finite()) {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        Ok(Self { nx, ny, h, origin })
    }

    /// Square grid whose nodes span `[lo, hi]²` with spacing `h`.
    ///
    /// The node count is rounded to the nearest integer, so `hi` is hit up to
    /// rounding of `(hi - lo) / h`.
    pub fn square(lo: f64, hi: f64, h: f64) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::InvalidGrid(format!("empty extent [{lo}, {hi}]")));
        }
        if !(h > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {h}")));
        }
        let n = ((hi - lo) / h).round() as usize + 1;
        Self::new(n, n, h, [lo, lo])
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Inverse of [`Grid2D::index`].
    #[inline]
    pub fn ij(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.origin[0] + i as f64 * self.h
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.origin[1] + j as f64 * self.h
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> Point {
        [self.x(i), self.y(j)]
    }

    #[inline]
    pub fn node_at(&self, idx: usize) -> Point {
        let (i, j) = self.ij(idx);
        self.node(i, j)
    }

    /// Upper-right corner of the bounding box.
    pub fn max_corner(&self) -> Point {
        [self.x(self.nx - 1), self.y(self.ny - 1)]
    }

    pub fn contains(&self, p: Point) -> bool {
        let [x1, y1] = self.max_corner();
        let tol = 1e-12 * self.h;
        p[0] >= self.origin[0] - tol
            && p[0] <= x1 + tol
            && p[1] >= self.origin[1] - tol
            && p[1] <= y1 + tol
    }

    /// True when the closed disk of radius `r` about the origin lies inside
    /// the bounding box.
    pub fn contains_disk(&self, r: f64) -> bool {
        let [x1, y1] = self.max_corner();
        self.origin[0] <= -r && self.origin[1] <= -r && x1 >= r && y1 >= r
    }

    pub fn cell_area(&self) -> f64 {
        self.h * self.h
    }

    /// Index of the node nearest to `p`, clamped to the grid.
    pub fn nearest(&self, p: Point) -> (usize, usize) {
        let fi = ((p[0] - self.origin[0]) / self.h).round();
        let fj = ((p[1] - self.origin[1]) / self.h).round();
        let i = fi.clamp(0.0, (self.nx - 1) as f64) as usize;
        let j = fj.clamp(0.0, (self.ny - 1) as f64) as usize;
        (i, j)
    }

    /// Same node layout up to floating-point rounding.
    pub fn same_extent(&self, other: &Grid2D) -> bool {
        self.nx == other.nx
            && self.ny == other.ny
            && (self.h - other.h).abs() <= 1e-12 * self.h
            && (self.origin[0] - other.origin[0]).abs() <= 1e-12
            && (self.origin[1] - other.origin[1]).abs() <= 1e-12
    }
}
