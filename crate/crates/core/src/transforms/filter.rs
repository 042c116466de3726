//! Offset-direction filters applied to each angle of a parallel sinogram.
//!
//! Fourier convention: `F(ν) = ∫ p(t) e^{−2πiνt} dt`, so every symbol below
//! is a function of `ω = 2π|ν|`.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::radon::ParallelSinogram;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterKind {
    /// `|ν|` ramp.
    Ramp,
    /// Hilbert transform of the derivative; the same symbol as the ramp.
    HilbertDerivative,
    /// Regularised ramp `(−Δ_t)^{1/2} (c − Δ_t)^{−1}`.
    ScalingS,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Bare operator symbols, no constants.
    PaperLiteral,
    /// Scaled so the ramp (and `ScalingS` as `c → ∞`) inverts the Radon
    /// transform under [`super::radon_adjoint`].
    Calibrated,
}

/// How each angle row is extended before the FFT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Padding {
    /// Zeros up to the next power of two at least twice the row length:
    /// linear (not circular) convolution for data that vanishes at `±R`.
    Zero,
    /// The row repeated twice: the row is treated as one period, so
    /// constants and on-grid cosines are exact eigenfunctions.
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub kind: FilterKind,
    /// Regularisation parameter of `ScalingS`; `None` picks
    /// [`default_c`] from the offset spacing.
    pub c: Option<f64>,
    pub normalization: Normalization,
    pub padding: Padding,
}

impl Default for FilterSpec {
    fn default() -> Self {
        Self::ramp()
    }
}

impl FilterSpec {
    pub fn ramp() -> Self {
        Self {
            kind: FilterKind::Ramp,
            c: None,
            normalization: Normalization::Calibrated,
            padding: Padding::Zero,
        }
    }

    pub fn scaling(c: Option<f64>) -> Self {
        Self {
            kind: FilterKind::ScalingS,
            c,
            ..Self::ramp()
        }
    }

    pub fn with_padding(mut self, padding: Padding) -> Self {
        self.padding = padding;
        self
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    /// The regularisation parameter in effect for offset spacing `dt`.
    pub fn effective_c(&self, dt: f64) -> f64 {
        self.c.unwrap_or_else(|| default_c(dt))
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(c) = self.c {
            if !(c >= 0.0 && c.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "filter parameter c must be finite and non-negative, got {c}"
                )));
            }
            if self.kind == FilterKind::ScalingS
                && self.normalization == Normalization::PaperLiteral
                && c == 0.0
            {
                return Err(Error::InvalidParameter(
                    "paper-literal scaling filter needs c > 0".into(),
                ));
            }
        }
        Ok(())
    }

    /// Filter multiplier at angular frequency `ω = 2π|ν|`.
    pub fn symbol(&self, omega: f64, dt: f64) -> f64 {
        let w = omega.abs();
        let calib = 1.0 / (4.0 * PI);
        match (self.kind, self.normalization) {
            (FilterKind::Ramp | FilterKind::HilbertDerivative, Normalization::Calibrated) => w * calib,
            (FilterKind::Ramp | FilterKind::HilbertDerivative, Normalization::PaperLiteral) => w,
            (FilterKind::ScalingS, Normalization::PaperLiteral) => {
                let c = self.effective_c(dt);
                w / (c + w * w)
            }
            (FilterKind::ScalingS, Normalization::Calibrated) => {
                let c = self.effective_c(dt);
                if c == 0.0 {
                    return 0.0;
                }
                w * calib * c / (c + w * w)
            }
        }
    }
}

/// Cut-off at half the Nyquist frequency: `c = (2π · 1/(4Δt))²`.
pub fn default_c(dt: f64) -> f64 {
    let nu_cut = 1.0 / (4.0 * dt);
    (2.0 * PI * nu_cut).powi(2)
}

fn padded_len(n: usize, padding: Padding) -> usize {
    match padding {
        Padding::Zero => (2 * n).next_power_of_two(),
        Padding::Periodic => 2 * n,
    }
}

/// Filters every angle row along the offset variable.
pub fn apply_filter(p: &ParallelSinogram, spec: &FilterSpec) -> Result<ParallelSinogram> {
    spec.validate()?;
    let n = p.n_offsets;
    if n < 8 {
        return Err(Error::InvalidParameter(format!(
            "filtering needs at least 8 offsets, got {n}"
        )));
    }
    let dt = p.offset_step();
    let big_n = padded_len(n, spec.padding);
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(big_n);
    let inv = planner.plan_fft_inverse(big_n);
    let symbol: Vec<f64> = (0..big_n)
        .map(|k| {
            let kk = if k <= big_n / 2 { k as f64 } else { k as f64 - big_n as f64 };
            let nu = kk / (big_n as f64 * dt);
            spec.symbol(2.0 * PI * nu, dt)
        })
        .collect();

    let mut out = p.clone();
    out.data.par_chunks_mut(n).for_each(|row| {
        let mut buf = vec![Complex::new(0.0, 0.0); big_n];
        match spec.padding {
            Padding::Zero => {
                for (b, &v) in buf.iter_mut().zip(row.iter()) {
                    b.re = v;
                }
            }
            Padding::Periodic => {
                for (i, b) in buf.iter_mut().enumerate() {
                    b.re = row[i % n];
                }
            }
        }
        fwd.process(&mut buf);
        for (b, s) in buf.iter_mut().zip(&symbol) {
            *b *= *s;
        }
        inv.process(&mut buf);
        let scale = 1.0 / big_n as f64;
        for (r, b) in row.iter_mut().zip(&buf) {
            *r = b.re * scale;
        }
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_specs() -> Vec<FilterSpec> {
        let mut v = Vec::new();
        for kind in [FilterKind::Ramp, FilterKind::HilbertDerivative, FilterKind::ScalingS] {
            for normalization in [Normalization::Calibrated, Normalization::PaperLiteral] {
                for padding in [Padding::Zero, Padding::Periodic] {
                    v.push(FilterSpec {
                        kind,
                        c: Some(50.0),
                        normalization,
                        padding,
                    });
                }
            }
        }
        v
    }

    #[test]
    fn zero_rows_stay_zero() {
        let p = ParallelSinogram::zeros(4, 33, 0.75).unwrap();
        for spec in all_specs() {
            assert!(apply_filter(&p, &spec).unwrap().data.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn cosine_mode_is_scaled_by_ramp_symbol() {
        let n = 64;
        let mut p = ParallelSinogram::zeros(2, n, 0.75).unwrap();
        let dt = p.offset_step();
        let nu0 = 5.0 / (n as f64 * dt);
        for a in 0..2 {
            for b in 0..n {
                let t = p.offset(b);
                p.data[a * n + b] = (2.0 * PI * nu0 * t).cos();
            }
        }
        let spec = FilterSpec::ramp().with_padding(Padding::Periodic);
        let q = apply_filter(&p, &spec).unwrap();
        let gain = 2.0 * PI * nu0 / (4.0 * PI);
        for (got, orig) in q.data.iter().zip(&p.data) {
            assert!((got - gain * orig).abs() < 1e-6, "{got} vs {}", gain * orig);
        }
    }

    #[test]
    fn constant_rows_are_annihilated_under_periodic_extension() {
        let mut p = ParallelSinogram::zeros(3, 40, 0.75).unwrap();
        p.data.iter_mut().for_each(|v| *v = 2.5);
        for spec in all_specs().into_iter().filter(|s| s.padding == Padding::Periodic) {
            let q = apply_filter(&p, &spec).unwrap();
            assert!(q.data.iter().all(|v| v.abs() < 1e-10), "{spec:?}");
        }
    }

    #[test]
    fn symbols_vanish_at_zero_and_are_nonnegative() {
        for spec in all_specs() {
            assert_eq!(spec.symbol(0.0, 0.01), 0.0);
            for i in 1..200 {
                assert!(spec.symbol(i as f64 * 3.7, 0.01) >= 0.0);
            }
        }
    }

    #[test]
    fn literal_scaling_symbol_peaks_at_sqrt_c() {
        let c: f64 = 400.0;
        let spec = FilterSpec::scaling(Some(c)).with_normalization(Normalization::PaperLiteral);
        let grid: Vec<f64> = (1..=40_000).map(|i| i as f64 * 0.001).collect();
        let (mut best_w, mut best) = (0.0, f64::NEG_INFINITY);
        for &w in &grid {
            let s = spec.symbol(w, 0.01);
            if s > best {
                best = s;
                best_w = w;
            }
        }
        assert!((best_w - c.sqrt()).abs() <= 0.001, "peak at {best_w}");
    }

    #[test]
    fn calibrated_scaling_tends_to_ramp() {
        let ramp = FilterSpec::ramp();
        let s = FilterSpec::scaling(Some(1e12));
        for w in [1.0, 10.0, 300.0] {
            assert!((s.symbol(w, 0.01) - ramp.symbol(w, 0.01)).abs() < 1e-6 * ramp.symbol(w, 0.01));
        }
    }

    #[test]
    fn rejects_short_rows_and_bad_c() {
        let p = ParallelSinogram::zeros(1, 7, 0.75).unwrap();
        assert!(apply_filter(&p, &FilterSpec::ramp()).is_err());
        let lit = FilterSpec::scaling(Some(0.0)).with_normalization(Normalization::PaperLiteral);
        assert!(lit.validate().is_err());
        assert!(FilterSpec::scaling(Some(-1.0)).validate().is_err());
    }

    #[test]
    fn default_c_is_half_nyquist() {
        let dt = 0.01;
        assert!((default_c(dt) - (2.0 * PI * 25.0).powi(2)).abs() < 1e-9);
    }
}
