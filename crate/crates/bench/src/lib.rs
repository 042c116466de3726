//! Shared fixtures for the benchmarks in `benches/`.

use eikotomo::phantom::{build_phantom, preset};
use eikotomo::{AcquisitionGeometry, Grid2D, ScalarField2D};

/// Four-inclusion model on `[-0.8, 0.8]^2` at spacing `h`.
pub fn inclusions(h: f64) -> ScalarField2D {
    let grid = Grid2D::square(-0.8, 0.8, h).expect("valid grid");
    build_phantom(&preset("example3", None).expect("preset exists"), &grid).expect("phantom builds")
}

pub fn geometry(sources: usize, receivers: usize) -> AcquisitionGeometry {
    AcquisitionGeometry::new(0.75, sources, receivers).expect("valid geometry")
}
