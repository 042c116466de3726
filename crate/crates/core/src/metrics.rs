//! Comparison metrics between fields: norms of the difference and
//! localisation of local maxima.

use serde::Serialize;

use crate::error::Result;
use crate::grid::{Point, ScalarField2D};

/// Cell-area weighted L² norm of `a − b`.
pub fn l2_diff(a: &ScalarField2D, b: &ScalarField2D) -> Result<f64> {
    a.check_same_grid(b)?;
    let s: f64 = a.values().iter().zip(b.values()).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok((s * a.grid().cell_area()).sqrt())
}

pub fn linf_diff(a: &ScalarField2D, b: &ScalarField2D) -> Result<f64> {
    a.check_same_grid(b)?;
    Ok(a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// Mean of `f` over the nodes where `inside` holds (`NaN` when none do).
pub fn region_mean(f: &ScalarField2D, inside: impl Fn(Point) -> bool) -> f64 {
    let g = f.grid();
    let (mut s, mut n) = (0.0, 0usize);
    for k in 0..g.len() {
        if inside(g.node_at(k)) {
            s += f.values()[k];
            n += 1;
        }
    }
    s / n as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaximaOptions {
    /// Only nodes in `[−half, half]²` are considered.
    pub region_half: f64,
    /// A maximum dominates every node within this distance.
    pub window: f64,
    /// Keep maxima above `baseline + fraction·(peak − baseline)`.
    pub fraction: f64,
    /// Value that counts as "no feature"; 1 for slowness, 0 for
    /// perturbations.
    pub baseline: f64,
}

impl Default for MaximaOptions {
    fn default() -> Self {
        Self {
            region_half: 0.5,
            window: 0.05,
            fraction: 0.5,
            baseline: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalMax {
    pub position: Point,
    pub value: f64,
}

/// Centroid of the connected set of nodes sharing the value at `k`.
fn plateau_centroid(f: &ScalarField2D, k: usize) -> Point {
    let g = f.grid();
    let v = f.values();
    let (nx, ny) = (g.nx(), g.ny());
    let mut seen = vec![false; g.len()];
    let mut stack = vec![k];
    seen[k] = true;
    let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
    while let Some(q) = stack.pop() {
        let p = g.node_at(q);
        sx += p[0];
        sy += p[1];
        n += 1;
        let (i, j) = (q % nx, q / nx);
        let mut push = |a: usize, b: usize| {
            let r = b * nx + a;
            if !seen[r] && v[r] == v[k] {
                seen[r] = true;
                stack.push(r);
            }
        };
        if i > 0 {
            push(i - 1, j);
        }
        if i + 1 < nx {
            push(i + 1, j);
        }
        if j > 0 {
            push(i, j - 1);
        }
        if j + 1 < ny {
            push(i, j + 1);
        }
    }
    [sx / n as f64, sy / n as f64]
}

/// Local maxima of `f` in the region, strongest first.
///
/// A node is a maximum when no node within `window` is larger and every
/// equal node within `window` has a larger index. A plateau therefore
/// yields one maximum, reported at its centroid.
pub fn local_maxima(f: &ScalarField2D, opts: &MaximaOptions) -> Vec<LocalMax> {
    let g = f.grid();
    let v = f.values();
    let half = opts.region_half + 1e-9;
    let in_region = |k: usize| {
        let p = g.node_at(k);
        p[0].abs() <= half && p[1].abs() <= half
    };
    let peak = (0..g.len()).filter(|&k| in_region(k)).map(|k| v[k]).fold(f64::NEG_INFINITY, f64::max);
    if !peak.is_finite() || peak <= opts.baseline {
        return Vec::new();
    }
    let threshold = opts.baseline + opts.fraction * (peak - opts.baseline);
    let w = (opts.window / g.h()).floor() as isize;
    let (nx, ny) = (g.nx() as isize, g.ny() as isize);
    let mut out = Vec::new();
    for k in 0..g.len() {
        if !in_region(k) || v[k] < threshold {
            continue;
        }
        let (i, j) = ((k % g.nx()) as isize, (k / g.nx()) as isize);
        let mut is_max = true;
        'scan: for dj in -w..=w {
            for di in -w..=w {
                if (di == 0 && dj == 0) || ((di * di + dj * dj) as f64) * g.h() * g.h() > opts.window * opts.window + 1e-12 {
                    continue;
                }
                let (a, b) = (i + di, j + dj);
                if a < 0 || b < 0 || a >= nx || b >= ny {
                    continue;
                }
                let q = (b * nx + a) as usize;
                if v[q] > v[k] || (v[q] == v[k] && q < k) {
                    is_max = false;
                    break 'scan;
                }
            }
        }
        if is_max {
            out.push(LocalMax {
                position: plateau_centroid(f, k),
                value: v[k],
            });
        }
    }
    out.sort_by(|a, b| b.value.total_cmp(&a.value));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Localization {
    pub maxima: Vec<LocalMax>,
    /// For each target, the distance to its matched maximum.
    pub distances: Vec<Option<f64>>,
    pub matched: usize,
}

impl Localization {
    /// Every target matched within `radius` and no extra maxima.
    pub fn exact(&self, radius: f64) -> bool {
        self.maxima.len() == self.distances.len()
            && self.distances.iter().all(|d| d.is_some_and(|d| d <= radius))
    }

    /// Number of targets whose match lies within `radius`.
    pub fn within(&self, radius: f64) -> usize {
        self.distances.iter().filter(|d| d.is_some_and(|d| d <= radius)).count()
    }

    /// Every target matched within `radius`; extra maxima allowed.
    pub fn covers(&self, radius: f64) -> bool {
        self.distances.iter().all(|d| d.is_some_and(|d| d <= radius))
    }
}

/// Matches maxima to targets greedily by increasing distance, each maximum
/// used at most once.
pub fn localize(maxima: Vec<LocalMax>, targets: &[Point]) -> Localization {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (t, c) in targets.iter().enumerate() {
        for (m, mx) in maxima.iter().enumerate() {
            pairs.push(((mx.position[0] - c[0]).hypot(mx.position[1] - c[1]), t, m));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut distances = vec![None; targets.len()];
    let mut used = vec![false; maxima.len()];
    for (d, t, m) in pairs {
        if distances[t].is_none() && !used[m] {
            distances[t] = Some(d);
            used[m] = true;
        }
    }
    let matched = distances.iter().filter(|d| d.is_some()).count();
    Localization {
        maxima,
        distances,
        matched,
    }
}

/// Smallest pairwise distance between maxima (infinite for fewer than two).
pub fn min_separation(maxima: &[LocalMax]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in maxima.iter().enumerate() {
        for b in &maxima[i + 1..] {
            best = best.min((a.position[0] - b.position[0]).hypot(a.position[1] - b.position[1]));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid2D;

    fn bumps(g: Grid2D, centres: &[Point]) -> ScalarField2D {
        ScalarField2D::from_fn(g, |p| {
            centres
                .iter()
                .map(|c| (-((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)) / 0.002).exp())
                .sum()
        })
    }

    #[test]
    fn identical_fields_have_zero_metrics() {
        let g = Grid2D::square(-0.8, 0.8, 0.02).unwrap();
        let f = bumps(g, &[[0.1, 0.2]]);
        assert_eq!(l2_diff(&f, &f).unwrap(), 0.0);
        assert_eq!(linf_diff(&f, &f).unwrap(), 0.0);
    }

    #[test]
    fn one_node_shift_matches_gradient_times_h() {
        let g = Grid2D::square(-0.8, 0.8, 0.01).unwrap();
        let f = ScalarField2D::from_fn(g, |p| (3.0 * p[0]).sin() + p[1] * p[1]);
        let shifted = ScalarField2D::from_fn(g, |p| (3.0 * (p[0] + g.h())).sin() + p[1] * p[1]);
        let linf = linf_diff(&f, &shifted).unwrap();
        assert!((linf - 3.0 * g.h()).abs() <= 0.1 * 3.0 * g.h(), "{linf}");
    }

    #[test]
    fn finds_and_matches_separated_bumps() {
        let g = Grid2D::square(-0.8, 0.8, 0.01).unwrap();
        let centres = [[-0.25, -0.25], [0.3, -0.35], [0.25, 0.35], [-0.2, 0.2]];
        let f = bumps(g, &centres);
        let loc = localize(local_maxima(&f, &MaximaOptions::default()), &centres);
        assert_eq!(loc.maxima.len(), 4);
        assert!(loc.exact(0.011));
        assert!(min_separation(&loc.maxima) > 0.3);
    }

    #[test]
    fn plateaus_report_one_maximum_and_low_peaks_are_dropped() {
        let g = Grid2D::square(-0.8, 0.8, 0.01).unwrap();
        let f = ScalarField2D::from_fn(g, |p| {
            if p[0].abs() <= 0.02 && p[1].abs() <= 0.02 {
                2.0
            } else if (p[0] - 0.3).abs() <= 0.01 && p[1].abs() <= 0.01 {
                1.2
            } else {
                1.0
            }
        });
        let opts = MaximaOptions {
            baseline: 1.0,
            ..Default::default()
        };
        let m = local_maxima(&f, &opts);
        assert_eq!(m.len(), 1);
        assert!(m[0].position[0].abs() < 1e-9 && m[0].position[1].abs() < 1e-9);
    }

    #[test]
    fn region_mean_of_constant() {
        let g = Grid2D::square(-0.8, 0.8, 0.05).unwrap();
        let f = ScalarField2D::constant(g, 3.0);
        assert_eq!(region_mean(&f, |p| p[0] > 0.0), 3.0);
    }
}
