use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::io::{fmt_f64, next_parsed};
use crate::grid::{sample_bilinear, AcquisitionGeometry, ScalarField2D};

use super::solver::{solve_eikonal, EikonalSolution, SolverOptions};

/// Boundary first-arrival times: row `k` holds source `k`, column `j`
/// receiver `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct EikonalSinogram {
    pub geometry: AcquisitionGeometry,
    pub data: Vec<f64>,
    pub label: String,
}

impl EikonalSinogram {
    pub fn new(geometry: AcquisitionGeometry, data: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        let expected = geometry.n_sources * geometry.n_receivers;
        if data.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: data.len(),
            });
        }
        Ok(Self {
            geometry,
            data,
            label: label.into(),
        })
    }

    /// Straight-ray travel times `|receiver − source|` of the unit-slowness
    /// medium.
    pub fn homogeneous(geometry: AcquisitionGeometry) -> Self {
        let mut data = Vec::with_capacity(geometry.n_sources * geometry.n_receivers);
        for k in 0..geometry.n_sources {
            for j in 0..geometry.n_receivers {
                data.push(geometry.chord_length(k, j));
            }
        }
        Self {
            geometry,
            data,
            label: "homogeneous".into(),
        }
    }

    pub fn n_sources(&self) -> usize {
        self.geometry.n_sources
    }

    pub fn n_receivers(&self) -> usize {
        self.geometry.n_receivers
    }

    pub fn row(&self, k: usize) -> &[f64] {
        let n = self.n_receivers();
        &self.data[k * n..(k + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n_receivers())
    }

    /// Entry-wise `self − other` on matching geometry.
    pub fn residual(&self, other: &EikonalSinogram) -> Result<Vec<f64>> {
        if self.geometry != other.geometry {
            return Err(Error::GeometryMismatch(
                "sinograms were acquired with different geometries".into(),
            ));
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect())
    }

    pub fn to_text(&self) -> String {
        sino_to_string(EIK_SINO_TAG, &self.geometry, &self.data)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let (tag, geometry, data) = parse_sino(text)?;
        if tag != EIK_SINO_TAG {
            return Err(Error::Parse(format!("expected {EIK_SINO_TAG}, found {tag}")));
        }
        Self::new(geometry, data, "")
    }
}

pub const EIK_SINO_TAG: &str = "EIK-SINO";

/// `TAG m n R source_start receiver_start` followed by `m` rows of `n`
/// values.
pub(crate) fn sino_to_string(tag: &str, geometry: &AcquisitionGeometry, data: &[f64]) -> String {
    let mut s = format!(
        "{tag} {} {} {} {} {}\n",
        geometry.n_sources,
        geometry.n_receivers,
        fmt_f64(geometry.radius),
        fmt_f64(geometry.source_start),
        fmt_f64(geometry.receiver_start)
    );
    for row in data.chunks(geometry.n_receivers) {
        let line: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    s
}

pub(crate) fn parse_sino(text: &str) -> Result<(String, AcquisitionGeometry, Vec<f64>)> {
    let mut tokens = text.split_whitespace();
    let tag = tokens
        .next()
        .ok_or_else(|| Error::Parse("empty sinogram file".into()))?
        .to_string();
    let m: usize = next_parsed(&mut tokens, "m")?;
    let n: usize = next_parsed(&mut tokens, "n")?;
    let r: f64 = next_parsed(&mut tokens, "R")?;
    let s0: f64 = next_parsed(&mut tokens, "source_start")?;
    let r0: f64 = next_parsed(&mut tokens, "receiver_start")?;
    let geometry = AcquisitionGeometry::with_offsets(r, m, n, s0, r0)?;
    let data = tokens
        .map(|t| t.parse::<f64>().map_err(|e| Error::Parse(format!("bad value `{t}`: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    if data.len() != m * n {
        return Err(Error::LengthMismatch {
            expected: m * n,
            got: data.len(),
        });
    }
    Ok((tag, geometry, data))
}

/// Travel times of `sol` sampled (bilinearly) at every receiver.
pub fn boundary_trace(sol: &EikonalSolution, geometry: &AcquisitionGeometry) -> Result<Vec<f64>> {
    geometry
        .receivers()
        .into_iter()
        .map(|r| sample_bilinear(&sol.u, r))
        .collect()
}

/// Solves the eikonal equation once per source. Sources run in parallel;
/// the output order is the source order.
pub fn forward_solutions(
    f: &ScalarField2D,
    geometry: &AcquisitionGeometry,
    opts: SolverOptions,
) -> Result<Vec<EikonalSolution>> {
    (0..geometry.n_sources)
        .into_par_iter()
        .map(|k| {
            solve_eikonal(f, geometry.source(k), opts).map_err(|e| match e {
                e @ Error::NonPositiveSlowness { .. } => e,
                other => Error::SourceSolve {
                    source_index: k,
                    reason: other.to_string(),
                },
            })
        })
        .collect()
}

pub fn sinogram_from_solutions(
    solutions: &[EikonalSolution],
    geometry: &AcquisitionGeometry,
    label: impl Into<String>,
) -> Result<EikonalSinogram> {
    let mut data = Vec::with_capacity(geometry.n_sources * geometry.n_receivers);
    for sol in solutions {
        data.extend(boundary_trace(sol, geometry)?);
    }
    EikonalSinogram::new(*geometry, data, label)
}

/// Eikonal sinogram of slowness `f`.
pub fn forward_sinogram(
    f: &ScalarField2D,
    geometry: &AcquisitionGeometry,
    opts: SolverOptions,
) -> Result<EikonalSinogram> {
    let solutions = forward_solutions(f, geometry, opts)?;
    sinogram_from_solutions(&solutions, geometry, "eikonal")
}
