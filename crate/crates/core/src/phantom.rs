//! Piecewise-constant slowness models on the square `Ω₂ = [−0.5, 0.5]²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid2D, Point, ScalarField2D};

/// Half side of the square that carries every inhomogeneity.
pub const SUPPORT_HALF: f64 = 0.5;

const EDGE_TOL: f64 = 1e-9;

/// Axis-aligned rectangle of constant slowness. Closed: nodes on an edge
/// belong to the box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxInclusion {
    pub center: Point,
    pub width: f64,
    pub height: f64,
    pub value: f64,
}

impl BoxInclusion {
    pub fn square(center: Point, side: f64, value: f64) -> Self {
        Self {
            center,
            width: side,
            height: side,
            value,
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        (p[0] - self.center[0]).abs() <= 0.5 * self.width + EDGE_TOL
            && (p[1] - self.center[1]).abs() <= 0.5 * self.height + EDGE_TOL
    }
}

/// Slowness away from the boxes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Background {
    Constant(f64),
    /// `base + amplitude·exp(−|x|²/(2·width²))` inside `Ω₂`, `base` outside.
    GaussianBump { base: f64, amplitude: f64, width: f64 },
}

impl Default for Background {
    fn default() -> Self {
        Self::Constant(1.0)
    }
}

impl Background {
    fn value(&self, p: Point) -> f64 {
        match *self {
            Self::Constant(v) => v,
            Self::GaussianBump { base, amplitude, width } => {
                if in_support(p) {
                    base + amplitude * (-(p[0] * p[0] + p[1] * p[1]) / (2.0 * width * width)).exp()
                } else {
                    base
                }
            }
        }
    }
}

fn in_support(p: Point) -> bool {
    p[0].abs() <= SUPPORT_HALF + EDGE_TOL && p[1].abs() <= SUPPORT_HALF + EDGE_TOL
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PhantomSpec {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub background: Background,
    /// Painted in order; later boxes overwrite earlier ones.
    #[serde(default)]
    pub boxes: Vec<BoxInclusion>,
}

impl PhantomSpec {
    pub fn new(name: impl Into<String>, background: Background, boxes: Vec<BoxInclusion>) -> Self {
        Self {
            name: name.into(),
            background,
            boxes,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("phantom spec: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("phantom spec serialises")
    }

    /// Slowness at least 1 everywhere and every box inside `Ω₂`.
    pub fn validate(&self) -> Result<()> {
        let low = match self.background {
            Background::Constant(v) => v,
            Background::GaussianBump { base, amplitude, width } => {
                if !(width > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "bump width must be positive, got {width}"
                    )));
                }
                base + amplitude.min(0.0)
            }
        };
        if !(low >= 1.0) {
            return Err(Error::PhantomValue {
                name: self.name.clone(),
                value: low,
            });
        }
        for b in &self.boxes {
            if !(b.value >= 1.0 && b.value.is_finite()) {
                return Err(Error::PhantomValue {
                    name: self.name.clone(),
                    value: b.value,
                });
            }
            if !(b.width > 0.0 && b.height > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "box at {:?} has non-positive size",
                    b.center
                )));
            }
            let (x0, x1) = (b.center[0] - 0.5 * b.width, b.center[0] + 0.5 * b.width);
            let (y0, y1) = (b.center[1] - 0.5 * b.height, b.center[1] + 0.5 * b.height);
            if !(in_support([x0, y0]) && in_support([x1, y1])) {
                return Err(Error::InvalidParameter(format!(
                    "box at {:?} extends outside [-0.5, 0.5]^2",
                    b.center
                )));
            }
        }
        Ok(())
    }

    pub fn value_at(&self, p: Point) -> f64 {
        self.boxes
            .iter()
            .rev()
            .find(|b| b.contains(p))
            .map_or_else(|| self.background.value(p), |b| b.value)
    }
}

/// Samples the phantom at every node.
pub fn build_phantom(spec: &PhantomSpec, grid: &Grid2D) -> Result<ScalarField2D> {
    spec.validate()?;
    let s = SUPPORT_HALF;
    if !grid.contains([-s, -s]) || !grid.contains([s, s]) {
        return Err(Error::GeometryMismatch(
            "grid does not cover [-0.5, 0.5]^2".into(),
        ));
    }
    ScalarField2D::new(*grid, (0..grid.len()).map(|k| spec.value_at(grid.node_at(k))).collect())
}

pub const PRESETS: &[&str] = &[
    "homogeneous",
    "example1",
    "example2",
    "example3",
    "ring",
    "example6_truth",
    "example6_background",
    "example7_truth",
    "example7_background",
];

/// Box of contrast `f0` filling `Ω₂`.
pub fn example1(f0: f64) -> PhantomSpec {
    PhantomSpec::new(
        "example1",
        Background::Constant(1.0),
        vec![BoxInclusion::square([0.0, 0.0], 1.0, f0)],
    )
}

/// Two 0.2 × 0.2 inclusions; the one at (0.20, −0.10) is the stronger.
pub fn example2() -> PhantomSpec {
    PhantomSpec::new(
        "example2",
        Background::Constant(1.0),
        vec![
            BoxInclusion::square([-0.2, -0.2], 0.2, 1.3),
            BoxInclusion::square([0.2, -0.1], 0.2, 1.5),
        ],
    )
}

pub const EXAMPLE3_CENTRES: [Point; 4] = [[-0.25, -0.25], [0.30, -0.35], [0.25, 0.35], [-0.20, 0.20]];

/// Four 0.1 × 0.1 inclusions of slowness 1.5.
pub fn example3() -> PhantomSpec {
    PhantomSpec::new(
        "example3",
        Background::Constant(1.0),
        EXAMPLE3_CENTRES
            .iter()
            .map(|&c| BoxInclusion::square(c, 0.1, 1.5))
            .collect(),
    )
}

/// Square ring of slowness 1.05 between sides 0.5 and 0.6.
pub fn ring() -> PhantomSpec {
    PhantomSpec::new(
        "ring",
        Background::Constant(1.0),
        vec![
            BoxInclusion::square([0.0, 0.0], 0.6, 1.05),
            BoxInclusion::square([0.0, 0.0], 0.5, 1.0),
        ],
    )
}

pub const EXAMPLE6_CENTRES: [Point; 2] = [[0.20, 0.0], [-0.25, -0.25]];

fn example6_obstacle() -> BoxInclusion {
    BoxInclusion {
        center: [-0.125, -0.025],
        width: 0.65,
        height: 0.45,
        value: 1.1,
    }
}

/// Assumed background: one large obstacle of slowness 1.1.
pub fn example6_background() -> PhantomSpec {
    PhantomSpec::new("example6_background", Background::Constant(1.0), vec![example6_obstacle()])
}

/// The background plus two small boxes, one inside the obstacle.
pub fn example6_truth() -> PhantomSpec {
    PhantomSpec::new(
        "example6_truth",
        Background::Constant(1.0),
        vec![
            example6_obstacle(),
            BoxInclusion::square(EXAMPLE6_CENTRES[0], 0.1, 1.05),
            BoxInclusion::square(EXAMPLE6_CENTRES[1], 0.1, 1.15),
        ],
    )
}

pub const EXAMPLE7_CENTRES: [Point; 2] = [[-0.25, 0.15], [0.20, -0.20]];

fn example7_bump() -> Background {
    Background::GaussianBump {
        base: 1.0,
        amplitude: 0.2,
        width: 0.3,
    }
}

/// Smooth radial bump, peak 1.2 at the origin.
pub fn example7_background() -> PhantomSpec {
    PhantomSpec::new("example7_background", example7_bump(), vec![])
}

/// The smooth background with two 0.1 × 0.1 regions raised to 1.3.
pub fn example7_truth() -> PhantomSpec {
    PhantomSpec::new(
        "example7_truth",
        example7_bump(),
        EXAMPLE7_CENTRES
            .iter()
            .map(|&c| BoxInclusion::square(c, 0.1, 1.3))
            .collect(),
    )
}

/// Looks up a preset by name (`-` and `_` are interchangeable). `f0` only
/// applies to `example1` and defaults to 1.5.
pub fn preset(name: &str, f0: Option<f64>) -> Result<PhantomSpec> {
    let key = name.trim().to_ascii_lowercase().replace('-', "_");
    let spec = match key.as_str() {
        "homogeneous" => PhantomSpec::new("homogeneous", Background::Constant(1.0), vec![]),
        "example1" => example1(f0.unwrap_or(1.5)),
        "example2" => example2(),
        "example3" | "example4" => example3(),
        "ring" | "example5" => ring(),
        "example6_truth" => example6_truth(),
        "example6_background" => example6_background(),
        "example7_truth" => example7_truth(),
        "example7_background" => example7_background(),
        _ => {
            return Err(Error::UnknownPreset {
                name: name.to_string(),
                available: PRESETS.join(", "),
            })
        }
    };
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid2D {
        Grid2D::square(-0.8, 0.8, 0.01).unwrap()
    }

    #[test]
    fn example3_has_four_boxes_of_contrast_one_and_a_half() {
        let f = build_phantom(&example3(), &grid()).unwrap();
        assert_eq!(f.max(), 1.5);
        assert_eq!(f.min(), 1.0);
        for c in EXAMPLE3_CENTRES {
            let s = example3();
            assert_eq!(s.value_at(c), 1.5);
            assert_eq!(s.value_at([c[0] + 0.05, c[1] - 0.05]), 1.5);
            assert_eq!(s.value_at([c[0] + 0.06, c[1]]), 1.0);
        }
    }

    #[test]
    fn ring_is_an_annular_square() {
        let s = ring();
        assert_eq!(s.value_at([0.0, 0.0]), 1.0);
        assert_eq!(s.value_at([0.275, 0.0]), 1.05);
        assert_eq!(s.value_at([0.2, 0.29]), 1.05);
        assert_eq!(s.value_at([0.31, 0.0]), 1.0);
        assert_eq!(s.value_at([0.24, 0.24]), 1.0);
    }

    #[test]
    fn empty_spec_is_homogeneous() {
        let f = build_phantom(&PhantomSpec::default(), &grid()).unwrap();
        assert!(f.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn later_boxes_overwrite_and_edges_are_closed() {
        let s = example6_truth();
        assert_eq!(s.value_at([-0.25, -0.25]), 1.15);
        assert_eq!(s.value_at([-0.3, 0.1]), 1.1);
        assert_eq!(s.value_at([0.25, 0.0]), 1.05);
        let e1 = example1(2.0);
        assert_eq!(e1.value_at([0.5, 0.5]), 2.0);
        assert_eq!(e1.value_at([0.51, 0.0]), 1.0);
    }

    #[test]
    fn rejects_sub_unit_slowness_and_unknown_names() {
        let bad = PhantomSpec::new("bad", Background::Constant(1.0), vec![BoxInclusion::square([0.0, 0.0], 0.1, 0.9)]);
        assert!(matches!(build_phantom(&bad, &grid()), Err(Error::PhantomValue { .. })));
        let outside = PhantomSpec::new("o", Background::Constant(1.0), vec![BoxInclusion::square([0.48, 0.0], 0.1, 1.2)]);
        assert!(outside.validate().is_err());
        match preset("example9", None) {
            Err(Error::UnknownPreset { available, .. }) => assert!(available.contains("example3")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn every_preset_builds_with_slowness_at_least_one() {
        for name in PRESETS {
            let f = build_phantom(&preset(name, None).unwrap(), &grid()).unwrap();
            assert!(f.min() >= 1.0, "{name}");
        }
    }

    #[test]
    fn example7_background_peaks_at_origin() {
        let s = example7_background();
        assert!((s.value_at([0.0, 0.0]) - 1.2).abs() < 1e-12);
        assert_eq!(s.value_at([0.6, 0.0]), 1.0);
    }

    #[test]
    fn json_round_trip() {
        let s = example6_truth();
        assert_eq!(PhantomSpec::from_json(&s.to_json()).unwrap(), s);
        let custom = PhantomSpec::from_json(r#"{"boxes":[{"center":[0.1,0.1],"width":0.2,"height":0.1,"value":1.2}]}"#).unwrap();
        assert_eq!(custom.background, Background::Constant(1.0));
        assert_eq!(custom.value_at([0.1, 0.14]), 1.2);
    }

    #[test]
    fn painted_indicator_error_shrinks_with_h() {
        let b = BoxInclusion {
            center: [0.013, -0.021],
            width: 0.237,
            height: 0.173,
            value: 2.0,
        };
        let s = PhantomSpec::new("t", Background::Constant(1.0), vec![b]);
        let overlap = |lo: f64, hi: f64, c: f64, half: f64| (hi.min(c + half) - lo.max(c - half)).max(0.0);
        // L1 distance between node-cell painting and the exact indicator
        let err = |h: f64| {
            let g = Grid2D::square(-0.8, 0.8, h).unwrap();
            let f = build_phantom(&s, &g).unwrap();
            (0..g.len())
                .map(|k| {
                    let p = g.node_at(k);
                    let ox = overlap(p[0] - 0.5 * h, p[0] + 0.5 * h, b.center[0], 0.5 * b.width);
                    let oy = overlap(p[1] - 0.5 * h, p[1] + 0.5 * h, b.center[1], 0.5 * b.height);
                    ((f.values()[k] - 1.0) * h * h - ox * oy).abs()
                })
                .sum::<f64>()
        };
        let perimeter = b.width + b.width + b.height + b.height;
        let (e1, e2, e3) = (err(0.02), err(0.01), err(0.005));
        // only rim cells are wrong, each by at most h^2
        for (e, h) in [(e1, 0.02), (e2, 0.01), (e3, 0.005)] {
            assert!(e <= perimeter * h, "{e} at h={h}");
        }
        assert!(e3 < 0.5 * e1, "{e1} {e2} {e3}");
    }
}
