//! Travel-time tomography on the disk: a fast-sweeping eikonal solver,
//! Radon and fanbeam transforms with filtered back projection, and two
//! reconstruction methods built on them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eikonal;
pub mod error;
pub mod grid;
pub mod metrics;
pub mod noise;
pub mod phantom;
pub mod reconstruct;
pub mod transforms;

pub use error::{Error, Result};
pub use grid::{AcquisitionGeometry, Grid2D, Point, ScalarField2D, VectorField2D};
