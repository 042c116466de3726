//! Named end-to-end experiments.

use std::path::{Path, PathBuf};

use serde_json::json;

use eikotomo::eikonal::{forward_sinogram, SolverOptions};
use eikotomo::metrics::{local_maxima, localize, min_separation, region_mean, MaximaOptions};
use eikotomo::noise::NoiseScale;
use eikotomo::phantom::{build_phantom, preset, EXAMPLE3_CENTRES, EXAMPLE6_CENTRES, EXAMPLE7_CENTRES};
use eikotomo::{AcquisitionGeometry, Error, Grid2D, Point, Result};

use crate::args::*;
use crate::commands::{forward_sinograms, reconstruct_into};
use crate::output::Run;

#[derive(Debug, Clone, Copy)]
pub enum Check {
    /// Local maxima match `targets` one to one within `radius`.
    Localize {
        targets: &'static [Point],
        radius: f64,
        baseline: f64,
        /// Maxima below `baseline + fraction·(peak − baseline)` are ignored.
        fraction: f64,
        /// Keep only the strongest maxima.
        top: Option<usize>,
        /// Require exactly one maximum per target.
        exact: bool,
        min_separation: Option<f64>,
    },
    /// Mean over the true ring exceeds the mean over `[−0.2, 0.2]²` by 0.01.
    Ring,
    /// Results are recorded without a pass/fail bound.
    Record,
}

#[derive(Debug, Clone, Copy)]
pub struct Pipeline {
    pub truth: &'static str,
    pub sources: usize,
    pub noise: f64,
    pub seed: u64,
    pub mode: Mode,
    pub filter: FilterArg,
    pub c: Option<f64>,
    pub background: Option<&'static str>,
    pub check: Check,
}

#[derive(Debug, Clone, Copy)]
pub enum Kind {
    IllPosed,
    Pipeline(Pipeline),
}

#[derive(Debug, Clone, Copy)]
pub struct Recipe {
    pub name: &'static str,
    pub about: &'static str,
    pub kind: Kind,
}

const DEFAULT_SEED: u64 = 20_240_607;

const fn pipeline(truth: &'static str, sources: usize, noise: f64, mode: Mode, check: Check) -> Pipeline {
    Pipeline {
        truth,
        sources,
        noise,
        seed: DEFAULT_SEED,
        mode,
        filter: FilterArg::ScalingS,
        c: None,
        background: None,
        check,
    }
}

const FOUR: Check = Check::Localize {
    targets: &EXAMPLE3_CENTRES,
    radius: 0.07,
    baseline: 1.0,
    fraction: 0.5,
    top: None,
    exact: true,
    min_separation: None,
};

/// Scaling-filter parameter for the 5% noise run; the default cut-off is
/// kept for exact and 1% data.
pub const C_HIGH_NOISE: f64 = 300.0;

/// The two strongest positive maxima sit on the two inclusions.
const fn two_inclusions(targets: &'static [Point]) -> Check {
    Check::Localize {
        targets,
        radius: 0.1,
        baseline: 0.0,
        fraction: 0.0,
        top: Some(2),
        exact: true,
        min_separation: Some(0.3),
    }
}

pub const RECIPES: &[Recipe] = &[
    Recipe {
        name: "example1",
        about: "box contrasts 1.5 and 2 give the same boundary data; 1.1 does not",
        kind: Kind::IllPosed,
    },
    Recipe {
        name: "example2",
        about: "FBP of two 0.2 x 0.2 inclusions from eikonal data",
        kind: Kind::Pipeline(pipeline(
            "example2",
            18,
            0.0,
            Mode::Fbp,
            Check::Localize {
                targets: &[[-0.2, -0.2], [0.2, -0.1]],
                radius: 0.1,
                baseline: 1.0,
                fraction: 0.5,
                top: None,
                exact: true,
                min_separation: None,
            },
        )),
    },
    Recipe {
        name: "example3",
        about: "FBP of four small inclusions",
        kind: Kind::Pipeline(pipeline(
            "example3",
            18,
            0.0,
            Mode::Fbp,
            Check::Localize {
                targets: &EXAMPLE3_CENTRES,
                radius: 0.07,
                baseline: 1.0,
                fraction: 0.5,
                top: None,
                exact: false,
                min_separation: None,
            },
        )),
    },
    Recipe {
        name: "example4",
        about: "two-step reconstruction of four inclusions, exact data",
        kind: Kind::Pipeline(pipeline("example3", 18, 0.0, Mode::Twostep, FOUR)),
    },
    Recipe {
        name: "example4-noisy5",
        about: "two-step reconstruction of four inclusions, 5% noise",
        kind: Kind::Pipeline(Pipeline {
            c: Some(C_HIGH_NOISE),
            ..pipeline(
                "example3",
                18,
                0.05,
                Mode::Twostep,
                Check::Localize {
                    targets: &EXAMPLE3_CENTRES,
                    radius: 0.1,
                    baseline: 1.0,
                    fraction: 0.5,
                    top: None,
                    exact: true,
                    min_separation: None,
                },
            )
        }),
    },
    Recipe {
        name: "example5",
        about: "two-step reconstruction of the square ring, 36 sources, exact data",
        kind: Kind::Pipeline(pipeline("ring", 36, 0.0, Mode::Twostep, Check::Ring)),
    },
    Recipe {
        name: "example5-noisy1",
        about: "two-step reconstruction of the square ring, 36 sources, 1% noise",
        kind: Kind::Pipeline(pipeline("ring", 36, 0.01, Mode::Twostep, Check::Ring)),
    },
    Recipe {
        name: "example6-noisy1",
        about: "adjoint back projection with a discontinuous assumed background, 1% noise",
        kind: Kind::Pipeline(Pipeline {
            background: Some("example6_background"),
            ..pipeline(
                "example6_truth",
                18,
                0.01,
                Mode::AdjointBp,
                two_inclusions(&EXAMPLE6_CENTRES),
            )
        }),
    },
    Recipe {
        name: "example6-noisy10",
        about: "as example6-noisy1 with 10% noise; recorded only",
        kind: Kind::Pipeline(Pipeline {
            background: Some("example6_background"),
            ..pipeline("example6_truth", 18, 0.10, Mode::AdjointBp, Check::Record)
        }),
    },
    Recipe {
        name: "example7-noisy1",
        about: "adjoint back projection with a smooth assumed background, 1% noise",
        kind: Kind::Pipeline(Pipeline {
            background: Some("example7_background"),
            ..pipeline(
                "example7_truth",
                18,
                0.01,
                Mode::AdjointBp,
                two_inclusions(&EXAMPLE7_CENTRES),
            )
        }),
    },
];

pub fn find(name: &str) -> Result<&'static Recipe> {
    RECIPES.iter().find(|r| r.name == name).ok_or_else(|| {
        Error::InvalidParameter(format!(
            "unknown recipe `{name}`; available: {}",
            RECIPES.iter().map(|r| r.name).collect::<Vec<_>>().join(", ")
        ))
    })
}

pub fn list() {
    for r in RECIPES {
        println!("{:<18} {}", r.name, r.about);
    }
}

/// Runs the recipe, writes its files under `out`, prints a summary and
/// returns whether its check passed.
pub fn run(recipe: &Recipe, out: &Path) -> Result<bool> {
    match recipe.kind {
        Kind::IllPosed => ill_posed(recipe, out),
        Kind::Pipeline(p) => run_pipeline(recipe, &p, out),
    }
}

fn ill_posed(recipe: &Recipe, out: &Path) -> Result<bool> {
    // the source (0, −1) lies outside the usual disk, so use the unit circle
    let h = 0.01;
    let grid = Grid2D::square(-1.1, 1.1, h)?;
    let geo = AcquisitionGeometry::new(1.0, 18, 153)?;
    let mut run = Run::new(out)?;
    let mut sinos = Vec::new();
    for f0 in [1.5, 2.0, 1.1] {
        let f = build_phantom(&preset("example1", Some(f0))?, &grid)?;
        let s = run.time(&format!("forward_f0_{f0}"), || forward_sinogram(&f, &geo, SolverOptions::default()))?;
        run.write(&format!("sinogram_f0_{f0}.eik"), s.to_text().as_bytes())?;
        sinos.push(s);
    }
    let max_diff = |a: usize, b: usize| -> f64 {
        sinos[a].data.iter().zip(&sinos[b].data).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    };
    let same = max_diff(0, 1);
    let differ = max_diff(0, 2);
    let pass = same <= 2.0 * h && differ > 2.0 * h;
    println!("max |p(1.5) - p(2.0)| = {same:.5}  (<= {:.3})", 2.0 * h);
    println!("max |p(1.5) - p(1.1)| = {differ:.5}  (> {:.3})", 2.0 * h);
    println!("{}", if pass { "PASS" } else { "FAIL" });
    run.record("max_diff_1.5_2.0", json!(same));
    run.record("max_diff_1.5_1.1", json!(differ));
    run.record("pass", json!(pass));
    run.finish(
        &format!("run {}", recipe.name),
        json!({ "geometry": geo, "grid": grid, "f0": [1.5, 2.0, 1.1] }),
    )?;
    Ok(pass)
}

fn run_pipeline(recipe: &Recipe, p: &Pipeline, out: &Path) -> Result<bool> {
    let grid_args = GridArgs { h: 0.01, extent: 0.8 };
    let grid = crate::commands::grid_of(&grid_args)?;
    let geo = AcquisitionGeometry::new(0.75, p.sources, 153)?;
    let truth = build_phantom(&preset(p.truth, None)?, &grid)?;
    let mut run = Run::new(out)?;
    run.write_field("truth", &truth)?;
    let (sino, converged) = forward_sinograms(
        &mut run,
        &truth,
        &geo,
        SolverOptions::default(),
        p.noise,
        p.seed,
        NoiseScale::PerSource,
    )?;
    let cmd = ReconstructCmd {
        mode: p.mode,
        sinogram: PathBuf::from(if p.noise > 0.0 { "sinogram_noisy.eik" } else { "sinogram.eik" }),
        background: p.background.map(String::from),
        grid: grid_args,
        radius: None,
        sources: None,
        receivers: None,
        solver: SolverArgs { tol: 1e-9, max_sweeps: 100 },
        filter: FilterArgs {
            filter: p.filter,
            c: p.c,
            normalization: NormalizationArg::Calibrated,
            padding: PaddingArg::Zero,
        },
        epsilon: None,
        sigma: None,
        kappa: eikotomo::reconstruct::DEFAULT_KAPPA,
        combine: CombineArg::Mean,
        save_intermediates: false,
        out: out.to_path_buf(),
    };
    let rec = reconstruct_into(&mut run, &cmd, &sino)?;
    let pass = match p.check {
        Check::Localize {
            targets,
            radius,
            baseline,
            fraction,
            top,
            exact,
            min_separation: sep,
        } => {
            let opts = MaximaOptions {
                baseline,
                fraction,
                ..MaximaOptions::default()
            };
            let mut maxima = local_maxima(&rec.field, &opts);
            if let Some(n) = top {
                maxima.truncate(n);
            }
            let loc = localize(maxima, targets);
            for m in &loc.maxima {
                println!("max ({:+.3}, {:+.3}) {:.5}", m.position[0], m.position[1], m.value);
            }
            let spread = min_separation(&loc.maxima);
            let mut ok = if exact { loc.exact(radius) } else { loc.covers(radius) };
            if let Some(s) = sep {
                ok &= spread >= s;
            }
            println!("matched {}/{} within {radius}", loc.within(radius), targets.len());
            run.record("localization", json!(loc));
            ok
        }
        Check::Ring => {
            let ring = region_mean(&rec.field, |q| {
                let m = q[0].abs().max(q[1].abs());
                m > 0.25 + 1e-9 && m <= 0.3 + 1e-9
            });
            let inner = region_mean(&rec.field, |q| q[0].abs() <= 0.2 + 1e-9 && q[1].abs() <= 0.2 + 1e-9);
            println!("ring mean {ring:.5}, inner mean {inner:.5}, gap {:.5}", ring - inner);
            run.record("ring_gap", json!(ring - inner));
            ring - inner >= 0.01
        }
        Check::Record => {
            let opts = MaximaOptions::default();
            let maxima = local_maxima(&rec.field, &opts);
            run.record("maxima", json!(maxima));
            true
        }
    };
    println!("{}", if pass { "PASS" } else { "FAIL" });
    run.record("pass", json!(pass));
    run.record("forward_converged", json!(converged));
    run.record("reconstruction_converged", json!(rec.converged));
    run.finish(
        &format!("run {}", recipe.name),
        json!({
            "recipe": recipe.name,
            "truth": p.truth,
            "geometry": geo,
            "noise": { "level": p.noise, "seed": p.seed },
            "reconstruct": crate::commands::reconstruct_parameters(&cmd, &sino),
        }),
    )?;
    Ok(pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recipe_names_are_unique_and_findable() {
        for (i, r) in RECIPES.iter().enumerate() {
            assert!(RECIPES[i + 1..].iter().all(|o| o.name != r.name));
            assert_eq!(find(r.name).unwrap().name, r.name);
        }
        assert!(find("nope").is_err());
    }
}
