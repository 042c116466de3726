use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::Point;

/// Sources and receivers equally spaced on the circle of radius `radius`
/// centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcquisitionGeometry {
    pub radius: f64,
    pub n_sources: usize,
    pub n_receivers: usize,
    /// Angle of source 0; later sources follow at steps of `2π / n_sources`.
    pub source_start: f64,
    /// Angle of receiver 0.
    pub receiver_start: f64,
}

impl AcquisitionGeometry {
    /// Receivers start at angle 0, sources are offset by half a source step
    /// (`π / m`).
    pub fn new(radius: f64, n_sources: usize, n_receivers: usize) -> Result<Self> {
        let start = if n_sources > 0 { PI / n_sources as f64 } else { 0.0 };
        Self::with_offsets(radius, n_sources, n_receivers, start, 0.0)
    }

    pub fn with_offsets(
        radius: f64,
        n_sources: usize,
        n_receivers: usize,
        source_start: f64,
        receiver_start: f64,
    ) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "acquisition radius must be positive, got {radius}"
            )));
        }
        if n_sources == 0 || n_receivers == 0 {
            return Err(Error::InvalidParameter(
                "need at least one source and one receiver".into(),
            ));
        }
        if !(source_start.is_finite() && receiver_start.is_finite()) {
            return Err(Error::InvalidParameter("start angles must be finite".into()));
        }
        Ok(Self {
            radius,
            n_sources,
            n_receivers,
            source_start,
            receiver_start,
        })
    }

    pub fn source_step(&self) -> f64 {
        2.0 * PI / self.n_sources as f64
    }

    pub fn receiver_step(&self) -> f64 {
        2.0 * PI / self.n_receivers as f64
    }

    pub fn source_angle(&self, k: usize) -> f64 {
        self.source_start + k as f64 * self.source_step()
    }

    pub fn receiver_angle(&self, j: usize) -> f64 {
        self.receiver_start + j as f64 * self.receiver_step()
    }

    pub fn source_angles(&self) -> Vec<f64> {
        (0..self.n_sources).map(|k| self.source_angle(k)).collect()
    }

    pub fn receiver_angles(&self) -> Vec<f64> {
        (0..self.n_receivers).map(|j| self.receiver_angle(j)).collect()
    }

    pub fn source(&self, k: usize) -> Point {
        self.on_circle(self.source_angle(k))
    }

    pub fn receiver(&self, j: usize) -> Point {
        self.on_circle(self.receiver_angle(j))
    }

    pub fn sources(&self) -> Vec<Point> {
        (0..self.n_sources).map(|k| self.source(k)).collect()
    }

    pub fn receivers(&self) -> Vec<Point> {
        (0..self.n_receivers).map(|j| self.receiver(j)).collect()
    }

    pub fn on_circle(&self, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        [self.radius * c, self.radius * s]
    }

    /// Straight-line distance between source `k` and receiver `j`.
    pub fn chord_length(&self, k: usize, j: usize) -> f64 {
        let s = self.source(k);
        let r = self.receiver(j);
        (r[0] - s[0]).hypot(r[1] - s[1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_lie_on_circle() {
        let g = AcquisitionGeometry::new(0.75, 18, 153).unwrap();
        for p in g.sources().into_iter().chain(g.receivers()) {
            assert!((p[0].hypot(p[1]) - 0.75).abs() < 1e-15);
        }
    }

    #[test]
    fn angles_equally_spaced_and_increasing() {
        let g = AcquisitionGeometry::new(0.75, 18, 153).unwrap();
        let a = g.source_angles();
        assert!((a[0] - PI / 18.0).abs() < 1e-15);
        for w in a.windows(2) {
            assert!((w[1] - w[0] - 2.0 * PI / 18.0).abs() < 1e-14);
        }
        let r = g.receiver_angles();
        assert_eq!(r[0], 0.0);
        assert!(r.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn chord_matches_sine_formula() {
        let g = AcquisitionGeometry::new(0.75, 18, 153).unwrap();
        for (k, j) in [(0, 0), (3, 70), (17, 152)] {
            let d = g.receiver_angle(j) - g.source_angle(k);
            let expect = 2.0 * 0.75 * (d / 2.0).sin().abs();
            assert!((g.chord_length(k, j) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(AcquisitionGeometry::new(0.0, 18, 153).is_err());
        assert!(AcquisitionGeometry::new(0.75, 0, 153).is_err());
        assert!(AcquisitionGeometry::new(0.75, 18, 0).is_err());
    }
}
