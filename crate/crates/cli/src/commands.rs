use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use eikotomo::eikonal::{forward_solutions, sinogram_from_solutions, EikonalSinogram, SolverOptions};
use eikotomo::grid::io::parse_grid;
use eikotomo::metrics::{l2_diff, linf_diff, local_maxima, localize, MaximaOptions};
use eikotomo::noise::{add_noise_scaled, NoiseScale};
use eikotomo::phantom::{build_phantom, preset, PhantomSpec};
use eikotomo::reconstruct::{
    fbp_estimate, reconstruct_adjoint_bp, reconstruct_two_step, AdjointOptions, TwoStepOptions,
};
use eikotomo::{AcquisitionGeometry, Error, Grid2D, Result, ScalarField2D};

use crate::args::*;
use crate::output::Run;

pub fn grid_of(g: &GridArgs) -> Result<Grid2D> {
    if !(g.extent > 0.0) {
        return Err(Error::InvalidParameter(format!("extent must be positive, got {}", g.extent)));
    }
    Grid2D::square(-g.extent, g.extent, g.h)
}

pub fn solver_of(s: &SolverArgs) -> SolverOptions {
    SolverOptions {
        tol: s.tol,
        max_sweeps: s.max_sweeps,
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

pub fn phantom_spec(src: &PhantomSource) -> Result<PhantomSpec> {
    match (&src.phantom, &src.phantom_file) {
        (_, Some(path)) => PhantomSpec::from_json(&read_text(path)?),
        (Some(name), None) => preset(name, src.f0),
        (None, None) => Err(Error::InvalidParameter(
            "give a phantom with --phantom NAME or --phantom-file SPEC.json".into(),
        )),
    }
}

pub fn cmd_phantom(cmd: &PhantomCmd) -> Result<()> {
    let spec = phantom_spec(&cmd.source)?;
    let grid = grid_of(&cmd.grid)?;
    let f = build_phantom(&spec, &grid)?;
    let mut run = Run::new(&cmd.out)?;
    let path = run.write_field("phantom", &f)?;
    run.write("phantom.json", spec.to_json().as_bytes())?;
    run.record("min", json!(f.min()));
    run.record("max", json!(f.max()));
    run.finish(
        "phantom",
        json!({ "phantom": spec, "h": cmd.grid.h, "extent": cmd.grid.extent }),
    )?;
    println!("wrote {}", path.display());
    Ok(())
}

pub fn cmd_forward(cmd: &ForwardCmd) -> Result<()> {
    let geo = AcquisitionGeometry::new(cmd.geometry.radius, cmd.geometry.sources, cmd.geometry.receivers)?;
    let (f, phantom): (ScalarField2D, Value) = match &cmd.slowness {
        Some(path) => (parse_grid(&read_text(path)?)?, json!({ "slowness_file": path })),
        None => {
            let spec = phantom_spec(&cmd.source)?;
            let grid = grid_of(&cmd.grid)?;
            (build_phantom(&spec, &grid)?, json!(spec))
        }
    };
    let scale = match cmd.noise_scale {
        NoiseScaleArg::PerSource => NoiseScale::PerSource,
        NoiseScaleArg::Global => NoiseScale::Global,
    };
    let mut run = Run::new(&cmd.out)?;
    let (_, converged) = forward_sinograms(&mut run, &f, &geo, solver_of(&cmd.solver), cmd.noise, cmd.seed, scale)?;
    run.finish(
        "forward",
        json!({
            "phantom": phantom,
            "geometry": geo,
            "h": f.grid().h(),
            "grid": f.grid(),
            "solver": solver_of(&cmd.solver),
            "noise": { "level": cmd.noise, "seed": cmd.seed, "scale": format!("{scale:?}") },
        }),
    )?;
    if !converged {
        eprintln!("warning: some eikonal solves hit the sweep cap");
    }
    Ok(())
}

/// Writes `sinogram.eik` and, for positive noise, `sinogram_noisy.eik`;
/// returns the sinogram to reconstruct from and the convergence flag.
pub fn forward_sinograms(
    run: &mut Run,
    f: &ScalarField2D,
    geo: &AcquisitionGeometry,
    solver: SolverOptions,
    noise: f64,
    seed: u64,
    scale: NoiseScale,
) -> Result<(EikonalSinogram, bool)> {
    let sols = run.time("forward", || forward_solutions(f, geo, solver))?;
    let converged = sols.iter().all(|s| s.converged);
    let sweeps: Vec<usize> = sols.iter().map(|s| s.iterations).collect();
    let clean = sinogram_from_solutions(&sols, geo, "eikonal")?;
    run.write("sinogram.eik", clean.to_text().as_bytes())?;
    run.record("converged", json!(converged));
    run.record("sweeps_per_source", json!(sweeps));
    let out = if noise > 0.0 {
        let noisy = add_noise_scaled(&clean, noise, seed, scale)?;
        run.write("sinogram_noisy.eik", noisy.to_text().as_bytes())?;
        noisy
    } else {
        clean
    };
    Ok((out, converged))
}

/// A preset name, a JSON phantom spec, or an EIK-GRID file.
pub fn load_background(arg: &str, grid: &Grid2D) -> Result<ScalarField2D> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = read_text(path)?;
        if arg.ends_with(".json") {
            build_phantom(&PhantomSpec::from_json(&text)?, grid)
        } else {
            parse_grid(&text)
        }
    } else {
        build_phantom(&preset(arg, None)?, grid)
    }
}

fn check_header(cmd: &ReconstructCmd, geo: &AcquisitionGeometry) -> Result<()> {
    let mut problems = Vec::new();
    if let Some(r) = cmd.radius {
        if (r - geo.radius).abs() > 1e-12 {
            problems.push(format!("radius {r} vs {}", geo.radius));
        }
    }
    if let Some(m) = cmd.sources {
        if m != geo.n_sources {
            problems.push(format!("sources {m} vs {}", geo.n_sources));
        }
    }
    if let Some(n) = cmd.receivers {
        if n != geo.n_receivers {
            problems.push(format!("receivers {n} vs {}", geo.n_receivers));
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::GeometryMismatch(format!(
            "configuration disagrees with sinogram header: {}",
            problems.join(", ")
        )))
    }
}

pub struct Reconstruction {
    pub field: ScalarField2D,
    pub converged: bool,
}

pub fn cmd_reconstruct(cmd: &ReconstructCmd) -> Result<()> {
    let p = EikonalSinogram::parse(&read_text(&cmd.sinogram)?)?;
    check_header(cmd, &p.geometry)?;
    let mut run = Run::new(&cmd.out)?;
    let rec = reconstruct_into(&mut run, cmd, &p)?;
    run.record("converged", json!(rec.converged));
    run.finish("reconstruct", reconstruct_parameters(cmd, &p))?;
    println!("wrote {}", run_dir_file(&cmd.out, "reconstruction.grid"));
    Ok(())
}

fn run_dir_file(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

pub fn reconstruct_parameters(cmd: &ReconstructCmd, p: &EikonalSinogram) -> Value {
    let h = cmd.grid.h;
    json!({
        "mode": format!("{:?}", cmd.mode),
        "sinogram": cmd.sinogram,
        "geometry": p.geometry,
        "h": h,
        "extent": cmd.grid.extent,
        "solver": solver_of(&cmd.solver),
        "filter": cmd.filter.spec(),
        "epsilon": cmd.epsilon.unwrap_or(2.0 * h),
        "sigma": cmd.sigma.unwrap_or(3.0 * h),
        "kappa": cmd.kappa,
        "combine": format!("{:?}", cmd.combine),
        "background": cmd.background,
    })
}

pub fn reconstruct_into(run: &mut Run, cmd: &ReconstructCmd, p: &EikonalSinogram) -> Result<Reconstruction> {
    let grid = grid_of(&cmd.grid)?;
    let filter = cmd.filter.spec();
    match cmd.mode {
        Mode::Fbp => {
            let f = run.time("fbp", || fbp_estimate(p, &grid, &filter, None))?;
            run.write_field("reconstruction", &f)?;
            Ok(Reconstruction {
                field: f,
                converged: true,
            })
        }
        Mode::Twostep => {
            let opts = TwoStepOptions {
                filter,
                combine: cmd.combine.into(),
                solver: solver_of(&cmd.solver),
                ..TwoStepOptions::default()
            };
            let res = run.time("twostep", || reconstruct_two_step(p, &grid, &opts))?;
            run.write_field("f_hat", &res.f_hat)?;
            run.write_field("reconstruction", &res.f_final)?;
            if cmd.save_intermediates {
                for (k, c) in res.corrections.iter().enumerate() {
                    run.write_field(&format!("correction_{k:03}"), c)?;
                }
            }
            Ok(Reconstruction {
                field: res.f_final,
                converged: res.converged,
            })
        }
        Mode::AdjointBp => {
            let bg = cmd.background.as_deref().ok_or_else(|| {
                Error::InvalidParameter("adjoint-bp needs --background".into())
            })?;
            let f_bar = load_background(bg, &grid)?;
            let opts = AdjointOptions {
                epsilon: cmd.epsilon,
                sigma: cmd.sigma,
                kappa: cmd.kappa,
                solver: solver_of(&cmd.solver),
            };
            let res = run.time("adjoint_bp", || reconstruct_adjoint_bp(p, &f_bar, &opts))?;
            run.write_field("background", &f_bar)?;
            run.write_field("reconstruction", &res.reconstruction)?;
            if cmd.save_intermediates {
                for (k, l) in res.lambdas.iter().enumerate() {
                    run.write_field(&format!("lambda_{k:03}"), l)?;
                }
            }
            Ok(Reconstruction {
                field: res.reconstruction,
                converged: res.converged,
            })
        }
    }
}

pub fn parse_targets(s: &str) -> Result<Vec<[f64; 2]>> {
    s.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let xy: Vec<&str> = t.split(',').collect();
            let parse = |v: &str| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidParameter(format!("bad target coordinate `{v}`: {e}")))
            };
            match xy.as_slice() {
                [x, y] => Ok([parse(x)?, parse(y)?]),
                _ => Err(Error::InvalidParameter(format!("target `{t}` is not `x,y`"))),
            }
        })
        .collect()
}

/// Prints the report; returns whether every requested tolerance held.
pub fn cmd_compare(cmd: &CompareCmd) -> Result<bool> {
    let a = parse_grid(&read_text(&cmd.a)?)?;
    let b = parse_grid(&read_text(&cmd.b)?)?;
    let l2 = l2_diff(&a, &b)?;
    let linf = linf_diff(&a, &b)?;
    let mut ok = true;
    println!("l2    {l2:.6e}");
    println!("linf  {linf:.6e}");
    if let Some(t) = cmd.max_l2 {
        ok &= l2 <= t;
    }
    if let Some(t) = cmd.max_linf {
        ok &= linf <= t;
    }
    let mut report = json!({ "l2": l2, "linf": linf });
    if let Some(spec) = &cmd.targets {
        let targets = parse_targets(spec)?;
        let opts = MaximaOptions {
            window: cmd.window,
            fraction: cmd.fraction,
            baseline: cmd.baseline,
            ..MaximaOptions::default()
        };
        let loc = localize(local_maxima(&a, &opts), &targets);
        for m in &loc.maxima {
            println!("max   ({:+.3}, {:+.3})  {:.5}", m.position[0], m.position[1], m.value);
        }
        for (t, d) in targets.iter().zip(&loc.distances) {
            match d {
                Some(d) => println!("target ({:+.3}, {:+.3})  distance {d:.4}", t[0], t[1]),
                None => println!("target ({:+.3}, {:+.3})  unmatched", t[0], t[1]),
            }
        }
        let exact = loc.exact(cmd.match_radius);
        println!("matched {}/{} within {} ({} maxima)", loc.within(cmd.match_radius), targets.len(), cmd.match_radius, loc.maxima.len());
        ok &= exact;
        report["localization"] = json!(loc);
    }
    println!("{}", if ok { "PASS" } else { "FAIL" });
    if let Some(path) = &cmd.report {
        report["pass"] = json!(ok);
        crate::output::atomic_write(path, serde_json::to_string_pretty(&report).unwrap().as_bytes())?;
    }
    Ok(ok)
}
