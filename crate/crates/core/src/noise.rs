//! Additive Gaussian measurement noise scaled by the size of the data.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::eikonal::EikonalSinogram;
use crate::error::{Error, Result};

/// Which maximum scales the noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseScale {
    /// Maximum over receivers, separately for each source.
    #[default]
    PerSource,
    /// Maximum over the whole sinogram.
    Global,
}

/// `p + level · max(p) · ξ` with `ξ` standard normal, the maximum taken per
/// source row. Draws come from a ChaCha8 stream seeded with `seed`, in
/// row-major order.
pub fn add_noise(p: &EikonalSinogram, level: f64, seed: u64) -> Result<EikonalSinogram> {
    add_noise_scaled(p, level, seed, NoiseScale::PerSource)
}

pub fn add_noise_scaled(
    p: &EikonalSinogram,
    level: f64,
    seed: u64,
    scale: NoiseScale,
) -> Result<EikonalSinogram> {
    if !(level >= 0.0 && level.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "noise level must be finite and non-negative, got {level}"
        )));
    }
    if level == 0.0 {
        return Ok(p.clone());
    }
    let n = p.geometry.n_receivers;
    let global = p.data.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = p.clone();
    for row in out.data.chunks_mut(n) {
        let m = match scale {
            NoiseScale::PerSource => row.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            NoiseScale::Global => global,
        };
        for v in row.iter_mut() {
            let xi: f64 = StandardNormal.sample(&mut rng);
            *v += level * m * xi;
        }
    }
    out.label = format!("{} + {level} noise (seed {seed})", p.label);
    Ok(out)
}
