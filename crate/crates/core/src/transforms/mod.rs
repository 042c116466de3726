//! Line-integral transforms, their adjoints, and filtered back projection.

mod fanbeam;
mod fbp;
mod filter;
mod radon;
mod ray;
mod rebin;
mod spline;

pub(crate) use fanbeam::fanbeam_row;
pub use fanbeam::{fanbeam, fanbeam_adjoint, FanbeamSinogram, FAN_SINO_TAG};
pub use fbp::{fbp_fanbeam, fbp_fanbeam_with, fbp_parallel, RebinLayout};
pub use filter::{apply_filter, default_c, FilterKind, FilterSpec, Normalization, Padding};
pub use radon::{radon, radon_adjoint, ParallelSinogram, PAR_SINO_TAG};
pub use rebin::rebin_fan_to_parallel;
pub use spline::PeriodicSpline;
