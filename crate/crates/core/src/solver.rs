//! Finite-difference time stepping of the cane toads equations.
//!
//! Each step runs two backward-Euler diffusion sweeps (θ lines, then x lines)
//! followed by the exact flow of the pointwise reaction. Both sweeps solve
//! diagonally dominant M-matrix systems, so the scheme is monotone and keeps
//! the density non-negative for any `dt`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{integrate_theta, Field, GridSpec, RhoProfile};
use crate::math;
use crate::spectral::trajectory::TrajectoryFamily;

/// Ellipse `(x − x_c)²/θ_c + (θ − θ_c)² ≤ R²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseSpec {
    pub x_c: f64,
    pub theta_c: f64,
    pub radius: f64,
}

impl EllipseSpec {
    pub fn contains(&self, x: f64, theta: f64) -> bool {
        let dx = x - self.x_c;
        let dt = theta - self.theta_c;
        dx * dx / self.theta_c + dt * dt < self.radius * self.radius
    }

    pub fn area(&self) -> f64 {
        core::f64::consts::PI * self.radius * self.radius * math::sqrt(self.theta_c)
    }
}

/// An ellipse of fixed shape parameter `R` carried along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipsePath {
    pub trajectory: TrajectoryFamily,
    pub radius: f64,
}

impl EllipsePath {
    pub fn at(&self, t: f64) -> EllipseSpec {
        let s = self.trajectory.eval(t);
        EllipseSpec { x_c: s.x, theta_c: s.theta, radius: self.radius }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    /// `u_t = θu_xx + u_θθ + u(1 − u)`
    Local,
    /// `n_t = θn_xx + n_θθ + n(1 − ρ)`, `ρ = ∫ n dθ`
    Nonlocal,
    /// `u_t = θu_xx + u_θθ + u`
    Linearized,
    /// The linearized equation with `u = 0` off a moving ellipse.
    LinearizedDirichletEllipse(EllipsePath),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    NeumannZero,
    DirichletZero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub grid: GridSpec,
    pub model: ModelKind,
    pub t_end: f64,
    pub save_every: usize,
    pub boundary_top: Boundary,
    pub boundary_x: Boundary,
}

/// Largest admissible time step.
pub const MAX_DT: f64 = 0.5;

impl SolverConfig {
    pub fn new(grid: GridSpec, model: ModelKind, t_end: f64) -> Self {
        SolverConfig {
            grid,
            model,
            t_end,
            save_every: 1,
            boundary_top: Boundary::NeumannZero,
            boundary_x: Boundary::DirichletZero,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.grid.dt > MAX_DT {
            return Err(Error::Precondition("dt must not exceed 0.5"));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Precondition("t_end must be finite and non-negative"));
        }
        if self.save_every == 0 {
            return Err(Error::Precondition("save_every must be positive"));
        }
        self.n_steps().map(|_| ())
    }

    /// Number of steps of size `dt` that reach `t_end`.
    pub fn n_steps(&self) -> Result<usize> {
        let n = math::round(self.t_end / self.grid.dt);
        if math::abs(n * self.grid.dt - self.t_end) > 1e-9 * self.t_end.max(1.0) {
            return Err(Error::Precondition("t_end must be a whole number of steps"));
        }
        Ok(n as usize)
    }
}

/// Smooth bump `height · e^{1 − 1/(1 − r²)}` with `r = |(x, θ) − (x0, θ0)| / radius`.
pub fn make_initial_bump(grid: GridSpec, x0: f64, theta0: f64, radius: f64, height: f64) -> Result<Field> {
    grid.validate()?;
    if !(height > 0.0) {
        return Err(Error::Domain("bump height must be positive"));
    }
    if !(radius >= grid.hx().max(grid.htheta())) {
        return Err(Error::Domain("bump radius is smaller than one cell"));
    }
    if x0 - radius < grid.x_min
        || x0 + radius > grid.x_max
        || theta0 - radius < grid.theta_min
        || theta0 + radius > grid.theta_max
    {
        return Err(Error::Domain("bump support leaves the grid"));
    }
    Ok(Field::from_fn(grid, |x, th| {
        let r2 = ((x - x0) * (x - x0) + (th - theta0) * (th - theta0)) / (radius * radius);
        if r2 < 1.0 {
            height * math::exp(1.0 - 1.0 / (1.0 - r2))
        } else {
            0.0
        }
    }))
}

/// Nodes strictly inside an ellipse.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipseMask {
    pub inside: Vec<bool>,
    pub count: usize,
    /// The ellipse reaches `θ̲` or an edge of the grid.
    pub touches_boundary: bool,
}

pub fn dirichlet_ellipse_mask(grid: &GridSpec, e: &EllipseSpec) -> EllipseMask {
    let mut inside = vec![false; grid.len()];
    let mut count = 0;
    let half_x = e.radius * math::sqrt(e.theta_c);
    let i_lo = math::floor(((e.x_c - half_x - grid.x_min) / grid.hx()).max(0.0)) as usize;
    let i_hi = (math::ceil(((e.x_c + half_x - grid.x_min) / grid.hx()).max(0.0)) as usize).min(grid.nx - 1);
    let j_lo = math::floor(((e.theta_c - e.radius - grid.theta_min) / grid.htheta()).max(0.0)) as usize;
    let j_hi = (math::ceil(((e.theta_c + e.radius - grid.theta_min) / grid.htheta()).max(0.0)) as usize)
        .min(grid.ntheta - 1);
    for i in i_lo..=i_hi {
        for j in j_lo..=j_hi {
            if e.contains(grid.x(i), grid.theta(j)) {
                inside[grid.index(i, j)] = true;
                count += 1;
            }
        }
    }
    let touches_boundary = e.x_c - half_x <= grid.x_min
        || e.x_c + half_x >= grid.x_max
        || e.theta_c - e.radius <= grid.theta_min
        || e.theta_c + e.radius >= grid.theta_max;
    EllipseMask { inside, count, touches_boundary }
}

/// Fraction of the mass carried by the top 5% of the θ range.
pub fn top_band_fraction(f: &Field) -> f64 {
    let g = &f.grid;
    let j0 = math::ceil(0.95 * (g.ntheta - 1) as f64) as usize;
    let (mut top, mut all) = (0.0, 0.0);
    for i in 0..g.nx {
        let col = f.column(i);
        all += col.iter().sum::<f64>();
        top += col[j0..].iter().sum::<f64>();
    }
    if all > 0.0 {
        top / all
    } else {
        0.0
    }
}

/// Factored tridiagonal system: `l` sub-diagonal, `cp` modified super-diagonal
/// and `ib` reciprocal pivots of the Thomas algorithm.
#[derive(Debug, Clone)]
struct Factored {
    l: Vec<f64>,
    cp: Vec<f64>,
    ib: Vec<f64>,
}

/// `(lower, diag, upper)` of `I − μ∂²` with the given end conditions.
fn implicit_rows(n: usize, mu: f64, low: Boundary, high: Boundary) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut a = vec![-mu; n];
    let mut b = vec![1.0 + 2.0 * mu; n];
    let mut c = vec![-mu; n];
    a[0] = 0.0;
    c[n - 1] = 0.0;
    match low {
        Boundary::NeumannZero => c[0] = -2.0 * mu,
        Boundary::DirichletZero => {
            b[0] = 1.0;
            c[0] = 0.0;
        }
    }
    match high {
        Boundary::NeumannZero => a[n - 1] = -2.0 * mu,
        Boundary::DirichletZero => {
            b[n - 1] = 1.0;
            a[n - 1] = 0.0;
        }
    }
    (a, b, c)
}

fn factor(a: &[f64], b: &[f64], c: &[f64]) -> Factored {
    let n = b.len();
    let mut cp = vec![0.0; n];
    let mut ib = vec![0.0; n];
    let mut beta = b[0];
    ib[0] = 1.0 / beta;
    cp[0] = c[0] / beta;
    for i in 1..n {
        beta = b[i] - a[i] * cp[i - 1];
        ib[i] = 1.0 / beta;
        cp[i] = c[i] / beta;
    }
    Factored { l: a.to_vec(), cp, ib }
}

/// Pre-factored time stepper for one configuration.
#[derive(Debug, Clone)]
pub struct Stepper {
    cfg: SolverConfig,
    theta_sys: Factored,
    /// Per-node factors of the x sweeps, stored like the field (x-major).
    x_l: Vec<f64>,
    x_cp: Vec<f64>,
    x_ib: Vec<f64>,
    rho: Vec<f64>,
    time: f64,
}

impl Stepper {
    pub fn new(cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let g = cfg.grid;
        let dt = g.dt;
        let mu = dt / (g.htheta() * g.htheta());
        let (a, b, c) = implicit_rows(g.ntheta, mu, Boundary::NeumannZero, cfg.boundary_top);
        let theta_sys = factor(&a, &b, &c);

        let (nx, nt) = (g.nx, g.ntheta);
        let mut x_l = vec![0.0; g.len()];
        let mut x_cp = vec![0.0; g.len()];
        let mut x_ib = vec![0.0; g.len()];
        for j in 0..nt {
            let kappa = dt * g.theta(j) / (g.hx() * g.hx());
            let (a, b, c) = implicit_rows(nx, kappa, cfg.boundary_x, cfg.boundary_x);
            let fac = factor(&a, &b, &c);
            for i in 0..nx {
                let k = g.index(i, j);
                x_l[k] = fac.l[i];
                x_cp[k] = fac.cp[i];
                x_ib[k] = fac.ib[i];
            }
        }
        Ok(Stepper { cfg, theta_sys, x_l, x_cp, x_ib, rho: vec![0.0; nx], time: 0.0 })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    fn theta_sweep(&self, u: &mut [f64]) {
        let nt = self.cfg.grid.ntheta;
        let s = &self.theta_sys;
        let pin_top = self.cfg.boundary_top == Boundary::DirichletZero;
        for col in u.chunks_exact_mut(nt) {
            if pin_top {
                col[nt - 1] = 0.0;
            }
            col[0] *= s.ib[0];
            for j in 1..nt {
                col[j] = (col[j] - s.l[j] * col[j - 1]) * s.ib[j];
            }
            for j in (0..nt - 1).rev() {
                col[j] -= s.cp[j] * col[j + 1];
            }
        }
    }

    fn x_sweep(&self, u: &mut [f64]) {
        let g = &self.cfg.grid;
        let (nx, nt) = (g.nx, g.ntheta);
        if self.cfg.boundary_x == Boundary::DirichletZero {
            u[..nt].fill(0.0);
            u[(nx - 1) * nt..].fill(0.0);
        }
        for j in 0..nt {
            u[j] *= self.x_ib[j];
        }
        for i in 1..nx {
            let (prev, cur) = u[(i - 1) * nt..(i + 1) * nt].split_at_mut(nt);
            let r = i * nt..(i + 1) * nt;
            for (((c, p), l), ib) in cur.iter_mut().zip(prev.iter()).zip(&self.x_l[r.clone()]).zip(&self.x_ib[r]) {
                *c = (*c - l * p) * ib;
            }
        }
        for i in (0..nx - 1).rev() {
            let (cur, next) = u[i * nt..(i + 2) * nt].split_at_mut(nt);
            let r = i * nt..(i + 1) * nt;
            for ((c, n), cp) in cur.iter_mut().zip(next.iter()).zip(&self.x_cp[r]) {
                *c -= cp * n;
            }
        }
    }

    /// Advances `f` by one step of size `dt`.
    pub fn step(&mut self, f: &mut Field) -> Result<()> {
        let g = self.cfg.grid;
        if f.grid != g {
            return Err(Error::GridMismatch);
        }
        let dt = g.dt;
        let nt = g.ntheta;
        if let ModelKind::Nonlocal = self.cfg.model {
            let h = g.htheta();
            for (i, r) in self.rho.iter_mut().enumerate() {
                *r = crate::grid::trapezoid(f.column(i), h);
            }
        }
        self.theta_sweep(&mut f.values);
        self.x_sweep(&mut f.values);
        let growth = math::exp(dt);
        match self.cfg.model {
            ModelKind::Local => {
                for u in f.values.iter_mut() {
                    *u = *u * growth / (1.0 + *u * (growth - 1.0));
                }
            }
            ModelKind::Linearized | ModelKind::LinearizedDirichletEllipse(_) => {
                f.values.iter_mut().for_each(|u| *u *= growth);
            }
            ModelKind::Nonlocal => {
                for (col, &r) in f.values.chunks_exact_mut(nt).zip(&self.rho) {
                    let k = math::exp(dt * (1.0 - r));
                    col.iter_mut().for_each(|u| *u *= k);
                }
            }
        }
        let t_new = f.time + dt;
        if let ModelKind::LinearizedDirichletEllipse(path) = self.cfg.model {
            let mask = dirichlet_ellipse_mask(&g, &path.at(t_new));
            for (u, &keep) in f.values.iter_mut().zip(&mask.inside) {
                if !keep {
                    *u = 0.0;
                }
            }
        }
        f.time = t_new;
        self.time = t_new;
        check_and_clip(f)
    }
}

fn check_and_clip(f: &mut Field) -> Result<()> {
    let mut max: f64 = 0.0;
    let mut min: f64 = 0.0;
    for &u in &f.values {
        if !u.is_finite() {
            return Err(Error::NonFinite { time: f.time });
        }
        max = max.max(u);
        min = min.min(u);
    }
    if min < 0.0 {
        if -min > 1e-12 * max {
            return Err(Error::LostPositivity { time: f.time, value: min });
        }
        f.values.iter_mut().for_each(|u| *u = u.max(0.0));
    }
    Ok(())
}

/// One step of `cfg` applied to a copy of `f`.
pub fn step(f: &Field, cfg: &SolverConfig) -> Result<Field> {
    let mut s = Stepper::new(*cfg)?;
    let mut out = f.clone();
    s.step(&mut out)?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub field: Field,
    pub rho: RhoProfile,
    pub top_band_fraction: f64,
}

/// Runs to `t_end`, handing the field to `visit` at `t = 0`, every
/// `save_every` steps and at the final time. Returns the final field.
pub fn run_with(
    cfg: &SolverConfig,
    initial: &Field,
    mut visit: impl FnMut(&Field) -> Result<()>,
) -> Result<Field> {
    cfg.validate()?;
    if initial.grid != cfg.grid {
        return Err(Error::GridMismatch);
    }
    if !initial.is_finite() {
        return Err(Error::NonFinite { time: initial.time });
    }
    if initial.min() < 0.0 {
        return Err(Error::Precondition("initial data must be non-negative"));
    }
    let n = cfg.n_steps()?;
    let mut stepper = Stepper::new(*cfg)?;
    let mut f = initial.clone();
    f.time = 0.0;
    visit(&f)?;
    for k in 1..=n {
        stepper.step(&mut f)?;
        // keep time stamps free of accumulated round-off
        f.time = k as f64 * cfg.grid.dt;
        if k % cfg.save_every == 0 || k == n {
            visit(&f)?;
        }
    }
    Ok(f)
}

/// Runs to `t_end` and keeps every saved slice.
pub fn run(cfg: &SolverConfig, initial: &Field) -> Result<Vec<Snapshot>> {
    let mut out = Vec::new();
    run_with(cfg, initial, |f| {
        out.push(Snapshot {
            time: f.time,
            field: f.clone(),
            rho: integrate_theta(f),
            top_band_fraction: top_band_fraction(f),
        });
        Ok(())
    })?;
    Ok(out)
}
