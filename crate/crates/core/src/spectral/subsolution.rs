//! Growing sub-solution carried by a moving Dirichlet ellipse.
//!
//! In the frame of the trajectory, `w = κ e^{ρt} φ_t` with `φ_t` the
//! principal eigenfunction of the frozen operator at time `t`; the density
//! itself is `v = e^{−tilt} w` mapped back through
//! `y = (x − X)/√Θ`, `η = θ − Θ`.

use alloc::vec::Vec;

use super::coefficients::{coefficients, FrameCoefficients};
use super::disc::DiscGrid;
use super::eigen::{principal_eigenpair, EigenOptions, EigenPair};
use super::trajectory::TrajectoryFamily;
use crate::error::{Error, Result};
use crate::math;

/// Sup of `|φ(t+dt) − φ(t)| / (dt φ(t))` over the nodes of `B_{R/2}`.
pub fn eigen_time_derivative_check(
    f: &TrajectoryFamily,
    g: &DiscGrid,
    eps: f64,
    t: f64,
    dt: f64,
    opts: EigenOptions,
) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::Domain("dt must be positive"));
    }
    if let TrajectoryFamily::Fixed { .. } = f {
        return Ok(0.0);
    }
    let a = principal_eigenpair(g, &coefficients(f, t, eps), opts)?;
    let b = principal_eigenpair(g, &coefficients(f, t + dt, eps), opts)?;
    Ok(inner_ratio(g, &a.phi, &b.phi, dt))
}

fn inner_ratio(g: &DiscGrid, a: &[f64], b: &[f64], dt: f64) -> f64 {
    let half = 0.5 * g.radius;
    let mut worst: f64 = 0.0;
    for k in 0..g.len() {
        let (y, e) = g.position(k);
        if y * y + e * e <= half * half {
            worst = worst.max(math::abs(b[k] - a[k]) / (dt * a[k]));
        }
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsolutionConfig {
    pub eps: f64,
    pub delta: f64,
    pub horizon: f64,
    /// Number of time intervals on `[0, T]` at which eigenpairs are computed.
    pub n_times: usize,
    /// Upper bound for the relative discrete residual.
    pub residual_tol: f64,
    pub eigen: EigenOptions,
}

impl SubsolutionConfig {
    pub fn new(eps: f64, delta: f64, horizon: f64) -> Self {
        SubsolutionConfig {
            eps,
            delta,
            horizon,
            n_times: 20,
            residual_tol: 1e-8,
            eigen: EigenOptions::default(),
        }
    }
}

/// Frozen-time data at one sample time.
#[derive(Debug, Clone, PartialEq)]
pub struct SubFrame {
    pub t: f64,
    pub coeffs: FrameCoefficients,
    pub eigen: EigenPair,
    /// `φ` on the full `n × n` node array, zero off the disc.
    pub phi_full: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsolutionReport {
    /// `κ` and `ρ` in `w = κ e^{ρt} φ`.
    pub kappa: f64,
    pub rate: f64,
    pub max_lambda: f64,
    pub min_g: f64,
    pub max_dphi_ratio: f64,
    /// `sup v(0)` and `sup v(T)` over the disc nodes.
    pub sup_v0: f64,
    pub sup_vt: f64,
    /// `min v(T)` over the nodes of the inner half-disc.
    pub c_r: f64,
    /// `e^{max |tilt|}` over the disc and all sample times.
    pub m_r: f64,
    /// Largest `(w_t + L_h w − G w) / sup w` over nodes and time steps.
    pub max_residual: f64,
    pub l2_norm_final: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subsolution {
    pub trajectory: TrajectoryFamily,
    pub disc: DiscGrid,
    pub config: SubsolutionConfig,
    pub frames: Vec<SubFrame>,
    pub report: SubsolutionReport,
}

impl Subsolution {
    fn frame_at(&self, t: f64) -> (usize, f64) {
        let n = self.frames.len() - 1;
        let s = (t / self.config.horizon * n as f64).clamp(0.0, n as f64);
        let k = (math::floor(s) as usize).min(n.saturating_sub(1));
        (k, s - k as f64)
    }

    /// `v(t, x, θ)`; zero outside the ellipse. `φ` is interpolated linearly
    /// between sample times.
    pub fn v(&self, t: f64, x: f64, theta: f64) -> f64 {
        let st = self.trajectory.eval(t);
        let y = (x - st.x) / math::sqrt(st.theta);
        let eta = theta - st.theta;
        let r = self.disc.radius;
        if y * y + eta * eta >= r * r {
            return 0.0;
        }
        let (k, s) = self.frame_at(t);
        let mut phi = self.disc.interpolate(&self.frames[k].phi_full, y, eta);
        if self.frames.len() > 1 && s > 0.0 {
            let next = self.disc.interpolate(&self.frames[k + 1].phi_full, y, eta);
            phi = (1.0 - s) * phi + s * next;
        }
        let c = coefficients(&self.trajectory, t, self.config.eps);
        self.report.kappa * math::exp(self.report.rate * t - c.tilt(y, eta)) * phi
    }
}

/// Builds `w` and `v` along `f` and checks every precondition of the growth
/// construction.
pub fn assemble_subsolution(f: &TrajectoryFamily, g: &DiscGrid, cfg: SubsolutionConfig) -> Result<Subsolution> {
    let (eps, delta, horizon) = (cfg.eps, cfg.delta, cfg.horizon);
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Domain("eps must lie in (0, 1/2)"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain("delta must lie in (0, 1)"));
    }
    if !(horizon > 0.0) || cfg.n_times == 0 {
        return Err(Error::Domain("need a positive horizon and at least one time step"));
    }
    let nt = cfg.n_times;
    let mut frames = Vec::with_capacity(nt + 1);
    let mut min_g = f64::INFINITY;
    let mut max_lambda: f64 = 0.0;
    let mut max_tilt: f64 = 0.0;
    for k in 0..=nt {
        let t = horizon * k as f64 / nt as f64;
        let c = coefficients(f, t, eps);
        c.check_disc(g.radius)?;
        min_g = min_g.min(c.min_g_on_disc(g.radius));
        // the operator of a fixed point does not depend on time
        let reuse = matches!(f, TrajectoryFamily::Fixed { .. });
        let eigen = if let (true, Some(prev)) = (reuse, frames.last()) {
            let prev: &SubFrame = prev;
            prev.eigen.clone()
        } else {
            principal_eigenpair(g, &c, cfg.eigen)?
        };
        max_lambda = max_lambda.max(eigen.lambda);
        for q in 0..g.len() {
            let (y, e) = g.position(q);
            max_tilt = max_tilt.max(math::abs(c.tilt(y, e)));
        }
        let phi_full = g.to_full(&eigen.phi);
        frames.push(SubFrame { t, coeffs: c, eigen, phi_full });
    }

    let dt = horizon / nt as f64;
    let mut max_dphi: f64 = 0.0;
    for w in frames.windows(2) {
        max_dphi = max_dphi.max(inner_ratio(g, &w[0].eigen.phi, &w[1].eigen.phi, dt));
    }

    let sup_tilted = |fr: &SubFrame| {
        (0..g.len())
            .map(|q| {
                let (y, e) = g.position(q);
                math::exp(-fr.coeffs.tilt(y, e)) * fr.eigen.phi[q]
            })
            .fold(0.0, f64::max)
    };
    let kappa = delta / sup_tilted(&frames[0]);
    let rate = math::ln(1.0 / (kappa * sup_tilted(&frames[nt]))) / horizon;

    if !(rate < eps / 4.0) {
        return Err(Error::Precondition("growth rate r must be below eps/4 (increase T)"));
    }
    if !(max_lambda < eps / 4.0) {
        return Err(Error::Precondition("principal eigenvalue must stay below eps/4"));
    }
    if !(max_dphi <= eps / 4.0) {
        return Err(Error::Precondition("time derivative of phi exceeds eps/4"));
    }

    // discrete residual of w_t + L_h w − G w, backward in time
    let mut max_residual = f64::NEG_INFINITY;
    for k in 1..=nt {
        let (prev, cur) = (&frames[k - 1], &frames[k]);
        let decay = math::exp(-rate * dt);
        for q in 0..g.len() {
            let (y, e) = g.position(q);
            let phi = cur.eigen.phi[q];
            let res = (phi - decay * prev.eigen.phi[q]) / dt + cur.eigen.lambda * phi - cur.coeffs.g(y, e) * phi;
            max_residual = max_residual.max(res + cur.eigen.residual);
        }
    }

    let sup_v = |k: usize| kappa * math::exp(rate * frames[k].t) * sup_tilted(&frames[k]);
    let last = &frames[nt];
    let scale_t = kappa * math::exp(rate * horizon);
    let half = 0.5 * g.radius;
    let c_r = (0..g.len())
        .filter(|&q| {
            let (y, e) = g.position(q);
            y * y + e * e <= half * half
        })
        .map(|q| {
            let (y, e) = g.position(q);
            scale_t * math::exp(-last.coeffs.tilt(y, e)) * last.eigen.phi[q]
        })
        .fold(f64::INFINITY, f64::min);

    let report = SubsolutionReport {
        kappa,
        rate,
        max_lambda,
        min_g,
        max_dphi_ratio: max_dphi,
        sup_v0: sup_v(0),
        sup_vt: sup_v(nt),
        c_r,
        m_r: math::exp(max_tilt),
        max_residual,
        l2_norm_final: last.eigen.l2_norm,
    };
    if !(report.max_residual <= cfg.residual_tol) {
        return Err(Error::Precondition("discrete sub-solution residual is positive"));
    }
    Ok(Subsolution { trajectory: *f, disc: g.clone(), config: cfg, frames, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_has_zero_time_derivative() {
        let f = TrajectoryFamily::fixed(0.0, 30.0).unwrap();
        let g = DiscGrid::new(5.0, 21).unwrap();
        assert_eq!(eigen_time_derivative_check(&f, &g, 0.1, 1.0, 0.5, EigenOptions::default()).unwrap(), 0.0);
    }

    #[test]
    fn fixed_growth_from_delta_to_one() {
        let f = TrajectoryFamily::fixed(0.0, 60.0).unwrap();
        let g = DiscGrid::new(20.0, 41).unwrap();
        let cfg = SubsolutionConfig { n_times: 10, ..SubsolutionConfig::new(0.1, 1e-3, 300.0) };
        let s = assemble_subsolution(&f, &g, cfg).unwrap();
        let r = s.report;
        assert!((r.sup_v0 - 1e-3).abs() < 1e-15);
        assert!((r.sup_vt - 1.0).abs() < 1e-12);
        assert!((r.rate - (1000f64).ln() / 300.0).abs() < 1e-12);
        assert!(r.c_r > 0.0 && r.c_r < 1.0);
        assert_eq!(r.m_r, 1.0);
        assert!(r.max_residual < 0.0);
        // v vanishes off the ellipse and peaks at δ initially
        assert_eq!(s.v(0.0, 0.0, 60.0 + 20.0), 0.0);
        assert!(s.v(0.0, 0.0, 60.0) <= 1e-3 + 1e-15);
    }

    #[test]
    fn short_horizon_is_rejected() {
        let f = TrajectoryFamily::fixed(0.0, 60.0).unwrap();
        let g = DiscGrid::new(20.0, 21).unwrap();
        let err = assemble_subsolution(&f, &g, SubsolutionConfig::new(0.1, 1e-3, 100.0)).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn small_disc_has_large_eigenvalue() {
        let f = TrajectoryFamily::fixed(0.0, 60.0).unwrap();
        let g = DiscGrid::new(2.0, 21).unwrap();
        let err = assemble_subsolution(&f, &g, SubsolutionConfig::new(0.1, 1e-3, 400.0)).unwrap_err();
        assert_eq!(err, Error::Precondition("principal eigenvalue must stay below eps/4"));
    }

    #[test]
    fn derivative_shrinks_with_scale() {
        let g = DiscGrid::new(4.0, 31).unwrap();
        let ratio = |s: f64| {
            let f = TrajectoryFamily::local_optimal(s, s, 0.1).unwrap();
            eigen_time_derivative_check(&f, &g, 0.1, 0.5 * s, 0.01 * s, EigenOptions::default()).unwrap()
        };
        assert!(ratio(1000.0) < ratio(100.0));
    }
}
