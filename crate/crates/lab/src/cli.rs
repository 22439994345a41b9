//! Command-line front end.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use canetoads_core::front::{
    envelope_compare, fit_power_law, rho_front_position, FrontSeries, FrontSource, PowerFit,
};
use canetoads_core::grid::integrate_theta;
use canetoads_core::hj::{self, HjPoint};
use canetoads_core::solver::{run_with, top_band_fraction};
use canetoads_core::spectral::{
    coefficients, principal_eigenpair, DiscGrid, DriftScheme, EigenOptions, Laplacian, TrajectoryFamily,
};
use canetoads_core::supersolution::{
    amplitude_for, classify_region, envelope_x, relative_residual, tilde_u, RegionTag, SupersolParams,
};
use canetoads_core::{Field, GridSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::acceptance;
use crate::analysis::{envelope_rho_front, profiles_from_rows};
use crate::config::{parse_config, ModelChoice};
use crate::error::{LabError, Result};
use crate::io::{echo_json, json_bytes, read_csv, read_json, write_bytes, write_csv, Provenance};
use crate::svg::{contour_svg, loglog_svg};

/// Environment variable that overrides the output directory of a config.
pub const OUTPUT_ENV: &str = "CANETOADS_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "canetoads", version, about = "Numerical laboratory for accelerating cane toads fronts")]
pub struct Cli {
    /// Output directory; beats the environment variable and the config file.
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the PDE solver from a TOML config.
    Simulate {
        config: PathBuf,
    },
    /// Evaluate ψ, Z and the finite-difference residuals at a point.
    HjEval {
        #[arg(long)]
        t: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long)]
        theta: f64,
    },
    /// Sample the three-region super-solution residual.
    VerifySupersolution {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        amplitude: f64,
        #[arg(long, default_value_t = 1.0)]
        theta_lower: f64,
        /// Also draw the level set {ũ = 1} at t = 1, 2, 3.
        #[arg(long)]
        svg: bool,
    },
    /// Principal Dirichlet eigenpair of the moving-frame operator on a disc.
    Eigen {
        #[arg(long, value_enum, default_value_t = Family::Laplacian)]
        family: Family,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 101)]
        n: usize,
        /// Time at which the frame coefficients are frozen.
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 1000.0)]
        horizon: f64,
        /// Starting trait height of the optimal path.
        #[arg(long, default_value_t = 1000.0)]
        height: f64,
        #[arg(long, default_value_t = 60.0)]
        theta_c: f64,
        #[arg(long)]
        centered: bool,
    },
    /// Fit `x(t) = c t^p` to the fronts of a `simulate` output directory.
    FrontFit {
        input: PathBuf,
        #[arg(long)]
        level: Option<f64>,
        #[arg(long, value_enum)]
        source: Option<Source>,
        /// Fit window as `lo,hi`; defaults to the last half of the run.
        #[arg(long, value_parser = parse_window)]
        window: Option<(f64, f64)>,
        #[arg(long)]
        svg: bool,
    },
    /// Run the acceptance suite and print a pass/fail table.
    Acceptance {
        /// Comma-separated criterion numbers; all by default.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Laplacian,
    Fixed,
    LocalOptimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Source {
    Field,
    Rho,
}

fn parse_window(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected lo,hi")?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if !(hi > lo) {
        return Err("window must satisfy lo < hi".into());
    }
    Ok((lo, hi))
}

/// Flag, then environment, then config, then `out`.
pub fn resolve_output_dir(flag: Option<&Path>, from_config: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os(OUTPUT_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(p);
    }
    from_config.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("out"))
}

/// Executes one command, writing human output to `out`.
pub fn execute(cli: &Cli, out: &mut dyn std::io::Write) -> Result<()> {
    let flag = cli.output_dir.as_deref();
    let emit = |out: &mut dyn std::io::Write, v: &Value| {
        out.write_all(&json_bytes(v)).map_err(LabError::io("<stdout>"))
    };
    match &cli.command {
        Command::Simulate { config } => {
            let report = simulate(config, flag)?;
            emit(out, &report)
        }
        Command::HjEval { t, x, theta } => emit(out, &hj_eval(*t, *x, *theta)?),
        Command::VerifySupersolution { samples, seed, a, amplitude, theta_lower, svg } => {
            let p = SupersolParams::new(*a, *amplitude, *theta_lower)?;
            let mut v = verify_supersolution(&p, *samples, *seed)?;
            if *svg {
                let dir = resolve_output_dir(flag, None);
                let path = dir.join("supersolution_level_sets.svg");
                write_bytes(&path, supersolution_svg(&p)?.as_bytes())?;
                v["svg"] = json!(path.display().to_string());
            }
            emit(out, &v)
        }
        Command::Eigen { family, radius, n, t, eps, horizon, height, theta_c, centered } => {
            let scheme = if *centered { DriftScheme::Centered } else { DriftScheme::Upwind };
            let f = match family {
                Family::Laplacian => None,
                Family::Fixed => Some(TrajectoryFamily::fixed(0.0, *theta_c)?),
                Family::LocalOptimal => Some(TrajectoryFamily::local_optimal(*horizon, *height, *eps)?),
            };
            emit(out, &eigen(f, *radius, *n, *t, *eps, scheme)?)
        }
        Command::FrontFit { input, level, source, window, svg } => {
            let v = front_fit(input, *level, *source, *window, *svg, flag)?;
            emit(out, &v)
        }
        Command::Acceptance { only } => {
            let ids = if only.is_empty() { acceptance::ALL.to_vec() } else { only.clone() };
            if let Some(bad) = ids.iter().find(|id| !acceptance::ALL.contains(id)) {
                return Err(LabError::Usage(format!("no acceptance criterion {bad}")));
            }
            let mut rows = Vec::new();
            let mut failed = 0;
            for id in ids {
                let o = acceptance::run_criterion(id);
                writeln!(out, "{o}").map_err(LabError::io("<stdout>"))?;
                failed += usize::from(!o.passed);
                rows.push(json!({"id": o.id, "title": o.title, "passed": o.passed, "seconds": o.seconds, "detail": o.detail}));
            }
            let dir = resolve_output_dir(flag, None);
            write_bytes(&dir.join("acceptance.json"), &json_bytes(&json!({"criteria": rows, "failed": failed})))?;
            if failed > 0 {
                Err(LabError::Acceptance { failed })
            } else {
                Ok(())
            }
        }
    }
}

pub fn hj_eval(t: f64, x: f64, theta: f64) -> Result<Value> {
    let p = HjPoint::new(t, x, theta)?;
    let (lx, lt) = hj::intrinsic_scales(x, theta);
    let (hx, ht) = (1e-3 * lx, 1e-3 * lt);
    let residual_ok = theta >= ht;
    Ok(json!({
        "t": t,
        "x": x,
        "theta": theta,
        "z": p.z(),
        "cubic_residual": hj::cubic_residual(p.z(), x, theta),
        "psi": p.psi(),
        "theta_star": hj::theta_star(x),
        "psi_min": hj::psi_min(t, x),
        "steps": {"t": 1e-3 * t, "x": hx, "theta": ht},
        "hj_residual": if residual_ok { json!(hj::hj_residual(t, x, theta, 1e-3 * t, hx, ht)) } else { Value::Null },
        "harmonicity_residual": if residual_ok { json!(hj::harmonicity_residual_steps(x, theta, hx, ht)) } else { Value::Null },
    }))
}

fn region_name(r: RegionTag) -> &'static str {
    match r {
        RegionTag::LeftHalf => "left_half",
        RegionTag::Omega => "omega",
        RegionTag::OmegaComplementRight => "omega_complement",
    }
}

/// Uniform samples of `t ∈ [1, 20]`, `x ∈ [−60, 200]`, `θ ∈ [θ̲ + 2h, θ̲ + 60]`.
/// Stencils that cross a region interface are skipped.
pub fn verify_supersolution(p: &SupersolParams, samples: usize, seed: u64) -> Result<Value> {
    let h = 1e-3;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats: Vec<(RegionTag, usize, f64)> = [RegionTag::LeftHalf, RegionTag::Omega, RegionTag::OmegaComplementRight]
        .iter()
        .map(|&r| (r, 0, f64::INFINITY))
        .collect();
    let mut skipped = 0usize;
    for _ in 0..samples {
        let t = rng.gen_range(1.0..20.0);
        let x = rng.gen_range(-60.0..200.0);
        let th = rng.gen_range(p.theta_lower + 2.0 * h..p.theta_lower + 60.0);
        let region = classify_region(x, th, p.theta_lower)?;
        match relative_residual(t, x, th, p, h) {
            Ok(r) => {
                let s = stats.iter_mut().find(|s| s.0 == region).expect("all regions listed");
                s.1 += 1;
                s.2 = s.2.min(r);
            }
            Err(_) => skipped += 1,
        }
    }
    let min = stats.iter().map(|s| s.2).fold(f64::INFINITY, f64::min);
    let regions: serde_json::Map<String, Value> = stats
        .iter()
        .map(|s| (region_name(s.0).to_string(), json!({"samples": s.1, "min_relative_residual": finite_or_null(s.2)})))
        .collect();
    Ok(json!({
        "a": p.a,
        "amplitude": p.amplitude,
        "theta_lower": p.theta_lower,
        "step": h,
        "min_relative_residual": finite_or_null(min),
        "passed": min >= -1e-6,
        "skipped_interface_stencils": skipped,
        "regions": regions,
    }))
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

/// `{ũ = 1}` at `t = 1, 2, 3`.
pub fn supersolution_svg(p: &SupersolParams) -> Result<String> {
    let reach = envelope_x(3.0, 1.0, p)? * 1.2;
    let grid = GridSpec::with_spacing(-reach, reach, reach / 200.0, p.theta_lower, p.theta_lower + 4.0 * (3.0 + p.a), 0.05, 0.1)?;
    let fields: Vec<(String, Field)> = [1.0, 2.0, 3.0]
        .iter()
        .map(|&t| (format!("ũ(t={t})"), Field::from_fn(grid, |x, th| tilde_u(t, x, th, p))))
        .collect();
    let refs: Vec<(&str, &Field)> = fields.iter().map(|(n, f)| (n.as_str(), f)).collect();
    Ok(contour_svg(&refs, &[1.0], "level sets {ũ = 1}"))
}

pub fn eigen(f: Option<TrajectoryFamily>, radius: f64, n: usize, t: f64, eps: f64, scheme: DriftScheme) -> Result<Value> {
    let disc = DiscGrid::new(radius, n)?;
    let opts = EigenOptions { scheme, ..EigenOptions::default() };
    let (pair, extra) = match f {
        None => (principal_eigenpair(&disc, &Laplacian, opts)?, Value::Null),
        Some(f) => {
            let c = coefficients(&f, t, eps);
            c.check_disc(radius)?;
            let extra = json!({"g0": c.g0(), "min_g": c.min_g_on_disc(radius), "theta": c.state.theta});
            (principal_eigenpair(&disc, &c, opts)?, extra)
        }
    };
    Ok(json!({
        "radius": radius,
        "n": n,
        "unknowns": disc.len(),
        "lambda": pair.lambda,
        "residual": pair.residual,
        "iterations": pair.iterations,
        "l2_norm": pair.l2_norm,
        "frame": extra,
    }))
}

/// Runs a config and writes `rho.csv`, `colmax.csv`, `fronts.csv`, optional
/// slices, `final_contours.svg` and `manifest.json`.
pub fn simulate(config: &Path, flag: Option<&Path>) -> Result<Value> {
    let text = fs::read_to_string(config).map_err(LabError::io(config))?;
    let cfg = parse_config(&text)?;
    let dir = resolve_output_dir(flag, cfg.output_dir.as_deref());
    let solver = cfg.solver_config();
    let initial = cfg.initial_field()?;
    let g = cfg.grid;
    let echo = cfg.echo();
    let hash = cfg.hash();
    let prov = |kind: &str| Provenance { kind: kind.into(), config_hash: hash.clone(), echo: echo.clone() };
    let amplitude = amplitude_for(&initial, 1.0, g.theta_min).ok();

    let mut rho_rows = Vec::new();
    let mut colmax_rows = Vec::new();
    let mut front_rows = Vec::new();
    let mut slices = Vec::new();
    let (mut max_rho, mut max_top) = (0.0f64, 0.0f64);
    let final_field = run_with(&solver, &initial, |f| {
        let rho = integrate_theta(f);
        let cm = f.column_max();
        for i in 0..g.nx {
            rho_rows.push(vec![f.time, g.x(i), rho.values[i]]);
            colmax_rows.push(vec![f.time, g.x(i), cm[i]]);
        }
        let ff = canetoads_core::front::front_position(f, cfg.front_level).unwrap_or(f64::NAN);
        let rf = rho_front_position(&rho, cfg.front_level).unwrap_or(f64::NAN);
        let top = top_band_fraction(f);
        front_rows.push(vec![f.time, ff, rf, f.max(), rho.max(), top]);
        max_rho = max_rho.max(rho.max());
        max_top = max_top.max(top);
        if cfg.write_slices {
            slices.push(f.clone());
        }
        Ok(())
    })?;

    let mut files = serde_json::Map::new();
    let mut put = |name: String, sha: String| {
        files.insert(name, json!(sha));
    };
    put("rho.csv".into(), write_csv(&dir.join("rho.csv"), &prov("rho"), &["t", "x", "rho"], &rho_rows)?);
    put("colmax.csv".into(), write_csv(&dir.join("colmax.csv"), &prov("colmax"), &["t", "x", "colmax"], &colmax_rows)?);
    put(
        "fronts.csv".into(),
        write_csv(
            &dir.join("fronts.csv"),
            &prov("fronts"),
            &["t", "field_front", "rho_front", "max_u", "max_rho", "top_band_fraction"],
            &front_rows,
        )?,
    );
    for (k, f) in slices.iter().enumerate() {
        let rows: Vec<Vec<f64>> =
            (0..g.len()).map(|n| vec![g.x(n / g.ntheta), g.theta(n % g.ntheta), f.values[n]]).collect();
        let name = format!("slices/u_{k:04}.csv");
        put(name.clone(), write_csv(&dir.join(&name), &prov(&format!("slice t={}", f.time)), &["x", "theta", "u"], &rows)?);
    }
    let svg = contour_svg(&[("u", &final_field)], &[0.1, 0.5, 0.9], &format!("u at t = {}", final_field.time));
    put("final_contours.svg".into(), write_bytes(&dir.join("final_contours.svg"), svg.as_bytes())?);

    let manifest = json!({
        "config": echo_json(&echo),
        "config_sha256": hash,
        "grid": {"x_min": g.x_min, "x_max": g.x_max, "nx": g.nx, "theta_min": g.theta_min,
                 "theta_max": g.theta_max, "ntheta": g.ntheta, "hx": g.hx(), "htheta": g.htheta(), "dt": g.dt},
        "supersolution": {"a": 1.0, "amplitude": amplitude, "theta_lower": g.theta_min},
        "front_level": cfg.front_level,
        "saved_slices": front_rows.len(),
        "final_time": final_field.time,
        "final_max": final_field.max(),
        "max_rho": max_rho,
        "max_top_band_fraction": max_top,
        "files": files,
    });
    write_bytes(&dir.join("manifest.json"), &json_bytes(&manifest))?;
    Ok(json!({"output_dir": dir.display().to_string(), "config_sha256": manifest["config_sha256"],
              "final_max": manifest["final_max"], "max_rho": max_rho}))
}

fn manifest_grid(m: &Value, path: &Path) -> Result<GridSpec> {
    let gv = &m["grid"];
    let num = |k: &str| gv[k].as_f64().ok_or_else(|| LabError::format(path, format!("grid.{k} missing")));
    let grid = GridSpec {
        x_min: num("x_min")?,
        x_max: num("x_max")?,
        theta_min: num("theta_min")?,
        theta_max: num("theta_max")?,
        nx: num("nx")? as usize,
        ntheta: num("ntheta")? as usize,
        dt: num("dt")?,
    };
    grid.validate().map_err(|e| LabError::format(path, e))?;
    Ok(grid)
}

/// Power-law fit of one front series plus the envelope comparison and the
/// exponent at half and double the level.
pub fn front_fit(
    input: &Path,
    level: Option<f64>,
    source: Option<Source>,
    window: Option<(f64, f64)>,
    svg: bool,
    flag: Option<&Path>,
) -> Result<Value> {
    let mpath = input.join("manifest.json");
    let m = read_json(&mpath)?;
    let grid = manifest_grid(&m, &mpath)?;
    let model = m["config"]["model"].as_str().unwrap_or("local");
    let source = source.unwrap_or(if model == ModelChoice::Nonlocal.name() { Source::Rho } else { Source::Field });
    let level = level.or_else(|| m["front_level"].as_f64()).unwrap_or(0.1);
    if !(level > 0.0) {
        return Err(LabError::Usage("level must be positive".into()));
    }
    let params = m["supersolution"]["amplitude"]
        .as_f64()
        .map(|c| SupersolParams::new(1.0, c, grid.theta_min))
        .transpose()?;

    let file = match source {
        Source::Field => "colmax.csv",
        Source::Rho => "rho.csv",
    };
    let table = read_csv(&input.join(file))?;
    if table.columns.len() != 3 {
        return Err(LabError::format(input.join(file), "expected three columns"));
    }
    let profiles = profiles_from_rows(grid, &table.rows);
    let series_at = |lvl: f64| -> Result<FrontSeries> {
        let mut s = FrontSeries::new(lvl, if source == Source::Rho { FrontSource::RhoLevel } else { FrontSource::FieldLevel });
        for p in profiles.iter().filter(|p| p.time > 0.0) {
            if let Some(x) = rho_front_position(p, lvl) {
                s.push(p.time, x)?;
            }
        }
        Ok(s)
    };
    let series = series_at(level)?;
    let fit = fit_power_law(&series, window)?;

    let envelope = match (params, source) {
        (Some(p), Source::Field) => {
            let r = envelope_compare(&series, &p, level, grid.hx())?;
            json!({"violations": r.violations, "worst_margin": r.worst_margin, "worst_time": finite_or_null(r.worst_time)})
        }
        (Some(p), Source::Rho) => {
            let mut violations = 0;
            let mut worst = f64::INFINITY;
            for (&t, &x) in series.times.iter().zip(&series.positions) {
                let env = envelope_rho_front(grid, t, level, &p).unwrap_or(f64::INFINITY);
                worst = worst.min(env - x);
                violations += usize::from(env - x < -grid.hx());
            }
            json!({"violations": violations, "worst_margin": finite_or_null(worst)})
        }
        (None, _) => Value::Null,
    };
    let mut sensitivity = Vec::new();
    for lvl in [0.5 * level, 2.0 * level] {
        let fit = series_at(lvl).and_then(|s| Ok(fit_power_law(&s, window)?));
        sensitivity.push(match fit {
            Ok(f) => json!({"level": lvl, "exponent": f.exponent, "coefficient": f.coefficient}),
            Err(e) => json!({"level": lvl, "error": e.to_string()}),
        });
    }
    let mut report = json!({
        "source": if source == Source::Rho { "rho" } else { "field" },
        "level": level,
        "exponent": fit.exponent,
        "coefficient": fit.coefficient,
        "r_squared": fit.r_squared,
        "window": [fit.window.0, fit.window.1],
        "n_points": fit.n_points,
        "envelope_violations": envelope.get("violations").cloned().unwrap_or(Value::Null),
        "envelope": envelope,
        "level_sensitivity": sensitivity,
        "config_sha256": m["config_sha256"],
    });
    let dir = resolve_output_dir(flag, Some(input));
    write_bytes(&dir.join("front_fit.json"), &json_bytes(&report))?;
    if svg {
        let path = dir.join("front_fit.svg");
        write_bytes(&path, plot(&series, &fit).as_bytes())?;
        report["svg"] = json!(path.display().to_string());
    }
    Ok(report)
}

fn plot(s: &FrontSeries, fit: &PowerFit) -> String {
    loglog_svg(&s.times, &s.positions, Some(fit), &format!("front at level {}", s.level))
}
