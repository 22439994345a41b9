//! `simulate` run configuration: a TOML document with a fixed key set.
//!
//! Unknown keys are rejected and every problem is reported at once.

use std::fmt;
use std::path::PathBuf;

use canetoads_core::solver::{make_initial_bump, Boundary, EllipsePath, ModelKind, SolverConfig, MAX_DT};
use canetoads_core::spectral::TrajectoryFamily;
use canetoads_core::{Field, GridSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use toml::{Table, Value};

/// Mesh width used when node counts are left out.
pub const DEFAULT_MESH: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

/// All validation failures of one document.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl ConfigErrors {
    pub fn mentions(&self, key: &str) -> bool {
        self.0.iter().any(|e| e.key == key)
    }
}

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} configuration error(s):", self.0.len())?;
        for e in &self.0 {
            writeln!(f, "  {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelChoice {
    Local,
    Nonlocal,
    Linearized,
    /// Linearized with `u = 0` off a fixed ellipse.
    Ellipse,
}

impl ModelChoice {
    pub fn name(self) -> &'static str {
        match self {
            ModelChoice::Local => "local",
            ModelChoice::Nonlocal => "nonlocal",
            ModelChoice::Linearized => "linearized",
            ModelChoice::Ellipse => "ellipse",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub x0: f64,
    pub theta0: f64,
    pub radius: f64,
    pub height: f64,
    /// Relative amplitude of multiplicative uniform noise drawn from `seed`.
    pub noise: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseChoice {
    pub x_c: f64,
    pub theta_c: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelChoice,
    pub grid: GridSpec,
    pub t_end: f64,
    pub save_every: usize,
    pub ic: Bump,
    pub bc_top: Boundary,
    pub bc_x: Boundary,
    pub ellipse: Option<EllipseChoice>,
    /// Level of the tracked fronts.
    pub front_level: f64,
    pub write_slices: bool,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    /// Keys that were filled from defaults.
    pub defaulted: Vec<&'static str>,
}

const KNOWN: &[&str] = &[
    "model",
    "x_min",
    "x_max",
    "theta_min",
    "theta_max",
    "nx",
    "ntheta",
    "dt",
    "t_end",
    "save_every",
    "seed",
    "ic.x0",
    "ic.theta0",
    "ic.radius",
    "ic.height",
    "ic.noise",
    "bc.top",
    "bc.x",
    "ellipse.x_c",
    "ellipse.theta_c",
    "ellipse.radius",
    "output.dir",
    "output.write_slices",
    "output.front_level",
];

/// Flattens nested tables to dotted keys.
fn flatten(prefix: &str, t: &Table, out: &mut Vec<(String, Value)>) {
    for (k, v) in t {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            Value::Table(inner) => flatten(&key, inner, out),
            _ => out.push((key, v.clone())),
        }
    }
}

struct Reader {
    values: Vec<(String, Value)>,
    errors: Vec<ConfigError>,
    defaulted: Vec<&'static str>,
}

impl Reader {
    fn err(&mut self, key: &str, message: impl Into<String>) {
        self.errors.push(ConfigError { key: key.to_string(), message: message.into() });
    }

    fn raw(&self, key: &str) -> Option<&Value> {
        self.values.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    fn float(&mut self, key: &'static str) -> Option<f64> {
        match self.raw(key).cloned() {
            None => None,
            Some(Value::Float(x)) if x.is_finite() => Some(x),
            Some(Value::Integer(i)) => Some(i as f64),
            Some(_) => {
                self.err(key, "expected a finite number");
                None
            }
        }
    }

    fn float_or(&mut self, key: &'static str, default: f64) -> f64 {
        self.float(key).unwrap_or_else(|| {
            if self.raw(key).is_none() {
                self.defaulted.push(key);
            }
            default
        })
    }

    fn count(&mut self, key: &'static str) -> Option<usize> {
        match self.raw(key).cloned() {
            None => None,
            Some(Value::Integer(i)) if i > 0 => Some(i as usize),
            Some(_) => {
                self.err(key, "expected a positive integer");
                None
            }
        }
    }

    fn string(&mut self, key: &'static str) -> Option<String> {
        match self.raw(key).cloned() {
            None => None,
            Some(Value::String(s)) => Some(s),
            Some(_) => {
                self.err(key, "expected a string");
                None
            }
        }
    }

    fn boundary(&mut self, key: &'static str, default: Boundary) -> Boundary {
        match self.string(key).as_deref() {
            None => {
                if self.raw(key).is_none() {
                    self.defaulted.push(key);
                }
                default
            }
            Some("neumann") => Boundary::NeumannZero,
            Some("dirichlet") => Boundary::DirichletZero,
            Some(other) => {
                self.err(key, format!("unknown boundary `{other}`, expected `neumann` or `dirichlet`"));
                default
            }
        }
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigErrors> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| {
        ConfigErrors(vec![ConfigError { key: "<document>".into(), message: e.message().to_string() }])
    })?;
    let mut values = Vec::new();
    flatten("", &table, &mut values);
    let mut r = Reader { values, errors: Vec::new(), defaulted: Vec::new() };
    let unknown: Vec<String> =
        r.values.iter().map(|(k, _)| k.clone()).filter(|k| !KNOWN.contains(&k.as_str())).collect();
    for k in unknown {
        r.err(&k, "unknown key");
    }

    let model = match r.string("model").as_deref() {
        None => {
            if r.raw("model").is_none() {
                r.err("model", "required: one of local, nonlocal, linearized, ellipse");
            }
            ModelChoice::Local
        }
        Some("local") => ModelChoice::Local,
        Some("nonlocal") => ModelChoice::Nonlocal,
        Some("linearized") => ModelChoice::Linearized,
        Some("ellipse") => ModelChoice::Ellipse,
        Some(other) => {
            r.err("model", format!("unknown model `{other}`"));
            ModelChoice::Local
        }
    };

    let t_end = r.float_or("t_end", 10.0);
    if !(t_end >= 0.0) {
        r.err("t_end", "must be non-negative");
    }
    let dt = r.float_or("dt", 0.05);
    if !(dt > 0.0) {
        r.err("dt", "must be positive");
    } else if dt > MAX_DT {
        r.err("dt", format!("must not exceed {MAX_DT} (reaction step bound)"));
    }
    let save_every = r.count("save_every").unwrap_or_else(|| {
        if r.raw("save_every").is_none() {
            r.defaulted.push("save_every");
        }
        20
    });
    let seed = match r.raw("seed").cloned() {
        None => {
            r.defaulted.push("seed");
            0
        }
        Some(Value::Integer(i)) if i >= 0 => i as u64,
        Some(_) => {
            r.err("seed", "expected a non-negative integer");
            0
        }
    };

    // domain defaults follow the envelope: |x| ≤ 1.5·(4/3)·t^{3/2}, θ ≤ 3t
    let theta_min = r.float_or("theta_min", 1.0);
    if !(theta_min > 0.0) {
        r.err("theta_min", "must be positive");
    }
    let theta_max = match r.float("theta_max") {
        Some(v) => v,
        None if r.raw("theta_max").is_some() => theta_min + 1.0,
        None if model == ModelChoice::Nonlocal => {
            r.err("theta_max", "required for the nonlocal model: the trait truncation must be explicit");
            theta_min + 1.0
        }
        None => {
            r.defaulted.push("theta_max");
            (3.0 * t_end).max(theta_min + 10.0)
        }
    };
    if !(theta_max > theta_min) {
        r.err("theta_max", "must exceed theta_min");
    }
    let reach = (2.0 * t_end.max(0.0).powf(1.5)).max(10.0);
    let x_max = r.float_or("x_max", reach);
    let x_min = r.float_or("x_min", -x_max);
    if !(x_max > x_min) {
        r.err("x_max", "must exceed x_min");
    }
    let nodes = |span: f64| ((span / DEFAULT_MESH).round().max(2.0) as usize) + 1;
    let nx = r.count("nx").unwrap_or_else(|| {
        r.defaulted.push("nx");
        nodes(x_max - x_min)
    });
    let ntheta = r.count("ntheta").unwrap_or_else(|| {
        r.defaulted.push("ntheta");
        nodes(theta_max - theta_min)
    });
    for (key, n) in [("nx", nx), ("ntheta", ntheta)] {
        if n < 3 {
            r.err(key, "needs at least 3 nodes");
        }
    }

    let ic = Bump {
        x0: r.float_or("ic.x0", 0.0),
        theta0: r.float_or("ic.theta0", theta_min + 1.5),
        radius: r.float_or("ic.radius", 1.0),
        height: r.float_or("ic.height", 1.0),
        noise: r.float_or("ic.noise", 0.0),
    };
    if !(ic.radius > 0.0) {
        r.err("ic.radius", "must be positive");
    }
    if !(ic.height > 0.0) {
        r.err("ic.height", "must be positive");
    }
    if !(0.0..1.0).contains(&ic.noise) {
        r.err("ic.noise", "must lie in [0, 1)");
    }

    let bc_top = r.boundary("bc.top", Boundary::NeumannZero);
    let bc_x = r.boundary("bc.x", Boundary::DirichletZero);

    let ellipse_keys = ["ellipse.x_c", "ellipse.theta_c", "ellipse.radius"];
    let ellipse = if model == ModelChoice::Ellipse {
        let vals: Vec<Option<f64>> = ellipse_keys.iter().map(|k| r.float(k)).collect();
        for (k, v) in ellipse_keys.iter().zip(&vals) {
            if v.is_none() && r.raw(k).is_none() {
                r.err(k, "required for the ellipse model");
            }
        }
        match vals[..] {
            [Some(x_c), Some(theta_c), Some(radius)] => {
                if !(radius > 0.0) {
                    r.err("ellipse.radius", "must be positive");
                }
                if !(theta_c - radius > 0.0) {
                    r.err("ellipse.theta_c", "ellipse must stay in theta > 0");
                }
                Some(EllipseChoice { x_c, theta_c, radius })
            }
            _ => None,
        }
    } else {
        for k in ellipse_keys {
            if r.raw(k).is_some() {
                r.err(k, "only valid with model = \"ellipse\"");
            }
        }
        None
    };

    let output_dir = r.string("output.dir").map(PathBuf::from);
    let write_slices = match r.raw("output.write_slices").cloned() {
        None => false,
        Some(Value::Boolean(b)) => b,
        Some(_) => {
            r.err("output.write_slices", "expected true or false");
            false
        }
    };
    let front_level = r.float_or("output.front_level", 0.1);
    if !(front_level > 0.0) {
        r.err("output.front_level", "must be positive");
    }

    let grid = GridSpec { x_min, x_max, theta_min, theta_max, nx, ntheta, dt };
    if r.errors.is_empty() {
        if let Err(e) = grid.validate() {
            r.err("grid", e.to_string());
        }
        if t_end > 0.0 {
            let steps = t_end / dt;
            if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
                r.err("t_end", "must be a whole number of time steps dt");
            }
        }
    }

    let cfg = RunConfig {
        model,
        grid,
        t_end,
        save_every,
        ic,
        bc_top,
        bc_x,
        ellipse,
        front_level,
        write_slices,
        seed,
        output_dir,
        defaulted: std::mem::take(&mut r.defaulted),
    };
    if r.errors.is_empty() {
        if let Err(e) = cfg.initial_field() {
            r.errors.push(ConfigError { key: "ic".into(), message: e.to_string() });
        }
        if let Some(e) = cfg.ellipse {
            let inside = e.theta_c - e.radius > theta_min
                && e.theta_c + e.radius < theta_max
                && (e.x_c - e.radius * e.theta_c.sqrt()) > x_min
                && (e.x_c + e.radius * e.theta_c.sqrt()) < x_max;
            if !inside {
                r.err("ellipse", "ellipse must lie strictly inside the grid");
            }
        }
    }
    if r.errors.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigErrors(r.errors))
    }
}

impl RunConfig {
    pub fn model_kind(&self) -> ModelKind {
        match self.model {
            ModelChoice::Local => ModelKind::Local,
            ModelChoice::Nonlocal => ModelKind::Nonlocal,
            ModelChoice::Linearized => ModelKind::Linearized,
            ModelChoice::Ellipse => {
                let e = self.ellipse.expect("validated ellipse");
                let trajectory = TrajectoryFamily::Fixed { x_c: e.x_c, theta_c: e.theta_c };
                ModelKind::LinearizedDirichletEllipse(EllipsePath { trajectory, radius: e.radius })
            }
        }
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            save_every: self.save_every,
            boundary_top: self.bc_top,
            boundary_x: self.bc_x,
            ..SolverConfig::new(self.grid, self.model_kind(), self.t_end)
        }
    }

    /// The bump, with optional seeded multiplicative noise.
    pub fn initial_field(&self) -> canetoads_core::Result<Field> {
        let b = self.ic;
        let mut f = make_initial_bump(self.grid, b.x0, b.theta0, b.radius, b.height)?;
        if b.noise > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            for v in &mut f.values {
                *v *= 1.0 + b.noise * rng.gen_range(-1.0..1.0);
            }
        }
        Ok(f)
    }

    /// Resolved configuration as `key = value` lines in a fixed order.
    /// Defaulted keys are marked.
    pub fn echo(&self) -> Vec<String> {
        let g = &self.grid;
        let mut pairs: Vec<(&str, String)> = vec![
            ("model", format!("\"{}\"", self.model.name())),
            ("x_min", fmt_f(g.x_min)),
            ("x_max", fmt_f(g.x_max)),
            ("theta_min", fmt_f(g.theta_min)),
            ("theta_max", fmt_f(g.theta_max)),
            ("nx", g.nx.to_string()),
            ("ntheta", g.ntheta.to_string()),
            ("dt", fmt_f(g.dt)),
            ("t_end", fmt_f(self.t_end)),
            ("save_every", self.save_every.to_string()),
            ("seed", self.seed.to_string()),
            ("ic.x0", fmt_f(self.ic.x0)),
            ("ic.theta0", fmt_f(self.ic.theta0)),
            ("ic.radius", fmt_f(self.ic.radius)),
            ("ic.height", fmt_f(self.ic.height)),
            ("ic.noise", fmt_f(self.ic.noise)),
            ("bc.top", boundary_name(self.bc_top)),
            ("bc.x", boundary_name(self.bc_x)),
            ("output.front_level", fmt_f(self.front_level)),
            ("output.write_slices", self.write_slices.to_string()),
        ];
        if let Some(e) = self.ellipse {
            pairs.push(("ellipse.x_c", fmt_f(e.x_c)));
            pairs.push(("ellipse.theta_c", fmt_f(e.theta_c)));
            pairs.push(("ellipse.radius", fmt_f(e.radius)));
        }
        pairs
            .into_iter()
            .map(|(k, v)| {
                let mark = if self.defaulted.contains(&k) { "  # default" } else { "" };
                format!("{k} = {v}{mark}")
            })
            .collect()
    }

    /// SHA-256 of the echo, hex encoded.
    pub fn hash(&self) -> String {
        sha256_hex(self.echo().join("\n").as_bytes())
    }
}

fn boundary_name(b: Boundary) -> String {
    match b {
        Boundary::NeumannZero => "\"neumann\"".into(),
        Boundary::DirichletZero => "\"dirichlet\"".into(),
    }
}

/// Shortest round-trip representation, always with a decimal point.
fn fmt_f(x: f64) -> String {
    let s = format!("{x:?}");
    if s.contains(['.', 'e', 'N', 'i']) {
        s
    } else {
        format!("{s}.0")
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_local_fills_defaults() {
        let c = parse_config("model = \"local\"\nt_end = 4.0\n").unwrap();
        assert_eq!(c.model, ModelChoice::Local);
        assert_eq!(c.grid.theta_min, 1.0);
        assert_eq!(c.grid.theta_max, 12.0_f64.max(11.0));
        assert_eq!(c.grid.x_max, 16.0);
        assert_eq!(c.grid.x_min, -16.0);
        assert!((c.grid.hx() - DEFAULT_MESH).abs() < 1e-12);
        for k in ["theta_max", "x_max", "dt", "nx", "bc.top"] {
            assert!(c.defaulted.contains(&k), "{k}");
            assert!(c.echo().iter().any(|l| l.starts_with(k) && l.ends_with("# default")));
        }
        assert_eq!(c.bc_top, Boundary::NeumannZero);
        assert_eq!(c.bc_x, Boundary::DirichletZero);
    }

    #[test]
    fn zero_dt_names_the_key() {
        let e = parse_config("model = \"local\"\ndt = 0.0\n").unwrap_err();
        assert!(e.mentions("dt"));
    }

    #[test]
    fn nonlocal_needs_theta_max() {
        let e = parse_config("model = \"nonlocal\"\n").unwrap_err();
        assert!(e.mentions("theta_max"));
        assert!(parse_config("model = \"nonlocal\"\ntheta_max = 30.0\n").is_ok());
    }

    #[test]
    fn unknown_keys_rejected_and_all_errors_reported() {
        let e = parse_config("model = \"local\"\ndt = -1\nbogus = 3\n[ic]\nwidth = 2\n").unwrap_err();
        assert!(e.mentions("dt"));
        assert!(e.mentions("bogus"));
        assert!(e.mentions("ic.width"));
        assert_eq!(e.0.len(), 3);
    }

    #[test]
    fn type_errors() {
        let e = parse_config("model = 3\nnx = 2.5\nbc.top = \"open\"\n").unwrap_err();
        assert!(e.mentions("model") && e.mentions("nx") && e.mentions("bc.top"));
    }

    #[test]
    fn ellipse_keys() {
        let e = parse_config("model = \"ellipse\"\n").unwrap_err();
        assert!(e.mentions("ellipse.x_c") && e.mentions("ellipse.radius"));
        let e = parse_config("model = \"local\"\nellipse.radius = 2.0\n").unwrap_err();
        assert!(e.mentions("ellipse.radius"));
        let ok = "model = \"ellipse\"\ntheta_max = 30.0\nx_min = -20.0\nx_max = 20.0\n\
                  ic.theta0 = 15.0\n[ellipse]\nx_c = 0.0\ntheta_c = 15.0\nradius = 3.0\n";
        let c = parse_config(ok).unwrap();
        assert!(matches!(c.model_kind(), ModelKind::LinearizedDirichletEllipse(_)));
    }

    #[test]
    fn bump_outside_grid_is_reported() {
        let e = parse_config("model = \"local\"\nic.x0 = 1000.0\n").unwrap_err();
        assert!(e.mentions("ic"));
    }

    #[test]
    fn steps_must_divide() {
        let e = parse_config("model = \"local\"\nt_end = 1.0\ndt = 0.3\n").unwrap_err();
        assert!(e.mentions("t_end"));
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = parse_config("model = \"local\"\n").unwrap();
        let b = parse_config("# comment\nmodel = \"local\"\n").unwrap();
        let c = parse_config("model = \"local\"\nseed = 1\n").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn noise_is_seeded() {
        let src = |s: u64| format!("model = \"local\"\nt_end = 1.0\nic.noise = 0.1\nseed = {s}\n");
        let f1 = parse_config(&src(7)).unwrap().initial_field().unwrap();
        let f2 = parse_config(&src(7)).unwrap().initial_field().unwrap();
        let f3 = parse_config(&src(8)).unwrap().initial_field().unwrap();
        assert_eq!(f1, f2);
        assert_ne!(f1, f3);
        assert!(f1.min() >= 0.0);
    }

    #[test]
    fn sha_known_vector() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
