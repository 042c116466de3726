use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::Result;

use super::fanbeam::FanbeamSinogram;
use super::radon::ParallelSinogram;
use super::spline::PeriodicSpline;

/// Resamples fan data onto the parallel grid `φ_a = a·π/n_angles`,
/// `t_b ∈ [−R, R]`.
///
/// The ray with source angle `β` and fan angle `γ` is the line with normal
/// angle `φ = β + γ − π/2` and offset `t = R sin γ`. Every line is seen twice
/// (once from each end), so each target value is the mean of the two fan
/// samples `(φ − γ + π/2, γ)` and `(φ + γ + 3π/2, −γ)`. Fan data is
/// interpolated with periodic cubic splines, first over receiver angle for
/// each source, then across sources.
pub fn rebin_fan_to_parallel(
    p: &FanbeamSinogram,
    n_angles: usize,
    n_offsets: usize,
) -> Result<ParallelSinogram> {
    let geo = p.geometry;
    let r = geo.radius;
    let mut out = ParallelSinogram::zeros(n_angles, n_offsets, r)?;
    let m = geo.n_sources;
    let receiver_splines: Vec<PeriodicSpline> = (0..m)
        .map(|k| PeriodicSpline::new(p.row(k).to_vec(), geo.receiver_start))
        .collect();
    let sources = geo.source_angles();

    let sample = |beta: f64, gamma: f64| -> f64 {
        let across: Vec<f64> = sources
            .iter()
            .zip(&receiver_splines)
            .map(|(&bk, s)| s.eval(bk + PI + 2.0 * gamma))
            .collect();
        PeriodicSpline::new(across, geo.source_start).eval(beta)
    };

    let layout = out.clone();
    out.data
        .par_chunks_mut(n_offsets)
        .enumerate()
        .for_each(|(a, row)| {
            let phi = layout.angle(a);
            for (b, slot) in row.iter_mut().enumerate() {
                let t = layout.offset(b);
                if t.abs() >= r {
                    continue;
                }
                let gamma = (t / r).asin();
                let v1 = sample(phi - gamma + 0.5 * PI, gamma);
                let v2 = sample(phi + gamma + 1.5 * PI, -gamma);
                *slot = 0.5 * (v1 + v2);
            }
        });
    // offsets finer than half the central fan-ray spacing R·π/n carry no
    // new information
    let central_spacing = r * PI / geo.n_receivers as f64;
    out.undersampled = out.offset_step() < 0.5 * central_spacing;
    Ok(out)
}
