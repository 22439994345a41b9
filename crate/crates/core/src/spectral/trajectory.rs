//! Paths `t ↦ (X(t), Θ(t))` along which the Dirichlet ellipse is carried.

use crate::error::{Error, Result};
use crate::math;

/// `8 / (3 √(3√3))`, the speed constant of the straight non-local paths.
pub fn straight_path_constant() -> f64 {
    8.0 / (3.0 * math::sqrt(3.0 * math::sqrt(3.0)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrajectoryFamily {
    /// Slowed-down optimal Hamilton-Jacobi path on `[0, T]`, starting at
    /// trait height `H`.
    LocalOptimal { horizon: f64, h: f64, eps: f64 },
    /// `X = c_γ (t + t_ε)^{3/2}`, `Θ = (1 − 2γε)^{1/2} [2(t + t_ε)/√3 + H]`.
    NonlocalStraight { t_eps: f64, h: f64, gamma: f64, eps: f64, horizon: f64 },
    /// A point that does not move.
    Fixed { x_c: f64, theta_c: f64 },
}

/// Position, velocity and acceleration of a trajectory at one time.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrajectoryState {
    pub x: f64,
    pub theta: f64,
    pub vx: f64,
    pub vtheta: f64,
    pub ax: f64,
    pub atheta: f64,
}

impl TrajectoryState {
    /// `Ẋ²/4Θ + Θ̇²/4`.
    pub fn lagrangian(&self) -> f64 {
        self.vx * self.vx / (4.0 * self.theta) + 0.25 * self.vtheta * self.vtheta
    }
}

impl TrajectoryFamily {
    pub fn local_optimal(horizon: f64, h: f64, eps: f64) -> Result<Self> {
        if !(horizon > 0.0) {
            return Err(Error::Domain("horizon T must be positive"));
        }
        if !(h > 0.0) {
            return Err(Error::Domain("starting height H must be positive"));
        }
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::Domain("eps must lie in (0, 1/2)"));
        }
        Ok(TrajectoryFamily::LocalOptimal { horizon, h, eps })
    }

    pub fn nonlocal_straight(t_eps: f64, h: f64, gamma: f64, eps: f64, horizon: f64) -> Result<Self> {
        if !(t_eps >= 0.0 && horizon > 0.0) {
            return Err(Error::Domain("need t_eps >= 0 and horizon > 0"));
        }
        if !(h >= 0.0 && t_eps + h > 0.0) {
            return Err(Error::Domain("trait height must stay positive"));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::Domain("gamma must lie in (0, 1)"));
        }
        if !(eps > 0.0 && 2.0 * gamma * eps < 1.0) {
            return Err(Error::Domain("need 0 < 2 gamma eps < 1"));
        }
        Ok(TrajectoryFamily::NonlocalStraight { t_eps, h, gamma, eps, horizon })
    }

    pub fn fixed(x_c: f64, theta_c: f64) -> Result<Self> {
        if !(theta_c > 0.0) {
            return Err(Error::Domain("theta_c must be positive"));
        }
        Ok(TrajectoryFamily::Fixed { x_c, theta_c })
    }

    /// Time horizon, if the family has one.
    pub fn horizon(&self) -> Option<f64> {
        match *self {
            TrajectoryFamily::LocalOptimal { horizon, .. } => Some(horizon),
            TrajectoryFamily::NonlocalStraight { horizon, .. } => Some(horizon),
            TrajectoryFamily::Fixed { .. } => None,
        }
    }

    /// Upper bound the Lagrangian must respect along the whole path.
    pub fn lagrangian_bound(&self) -> f64 {
        match *self {
            TrajectoryFamily::LocalOptimal { eps, .. } => 1.0 - 2.0 * eps,
            TrajectoryFamily::NonlocalStraight { gamma, eps, .. } => 1.0 - 2.0 * gamma * eps,
            TrajectoryFamily::Fixed { .. } => 0.0,
        }
    }

    pub fn eval(&self, t: f64) -> TrajectoryState {
        match *self {
            TrajectoryFamily::LocalOptimal { horizon, h, eps } => {
                let k1 = math::powf(1.0 - 2.0 * eps, 0.75);
                let k2 = math::sqrt(1.0 - 2.0 * eps);
                let rt = math::sqrt(horizon);
                let t15 = horizon * rt;
                TrajectoryState {
                    x: k1 * (2.0 * t * t / rt - 2.0 * t * t * t / (3.0 * t15)),
                    theta: k2 * (2.0 * t - t * t / horizon) + h,
                    vx: k1 * (4.0 * t / rt - 2.0 * t * t / t15),
                    vtheta: k2 * (2.0 - 2.0 * t / horizon),
                    ax: 4.0 * k1 / rt * (1.0 - t / horizon),
                    atheta: -2.0 * k2 / horizon,
                }
            }
            TrajectoryFamily::NonlocalStraight { t_eps, h, gamma, eps, .. } => {
                let c = straight_path_constant() * math::powf(1.0 - 2.0 * gamma * eps, 0.75);
                let k = math::sqrt(1.0 - 2.0 * gamma * eps);
                let tau = t + t_eps;
                let st = math::sqrt(tau);
                let r3 = math::sqrt(3.0);
                TrajectoryState {
                    x: c * tau * st,
                    theta: k * (2.0 * tau / r3 + h),
                    vx: 1.5 * c * st,
                    vtheta: 2.0 * k / r3,
                    ax: if st > 0.0 { 0.75 * c / st } else { f64::INFINITY },
                    atheta: 0.0,
                }
            }
            TrajectoryFamily::Fixed { x_c, theta_c } => {
                TrajectoryState { x: x_c, theta: theta_c, ..TrajectoryState::default() }
            }
        }
    }
}

/// Closed-form state of `f` at time `t`.
pub fn trajectory_eval(f: &TrajectoryFamily, t: f64) -> TrajectoryState {
    f.eval(t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintReport {
    pub max_lagrangian: f64,
    pub at_time: f64,
    pub bound: f64,
    /// Smallest `Ẋ` and `Θ̇` seen; both must be non-negative.
    pub min_vx: f64,
    pub min_vtheta: f64,
}

impl ConstraintReport {
    pub fn passed(&self) -> bool {
        self.max_lagrangian <= self.bound + 1e-12 && self.min_vx >= 0.0 && self.min_vtheta >= 0.0
    }
}

/// Samples the Lagrangian on `n_samples + 1` equispaced times over the
/// horizon and reports its maximum.
pub fn constraint_sweep(f: &TrajectoryFamily, n_samples: usize) -> Result<ConstraintReport> {
    if n_samples < 100 {
        return Err(Error::Precondition("constraint sweep needs at least 100 samples"));
    }
    let Some(horizon) = f.horizon() else {
        return Ok(ConstraintReport { max_lagrangian: 0.0, at_time: 0.0, bound: 0.0, min_vx: 0.0, min_vtheta: 0.0 });
    };
    let mut rep = ConstraintReport {
        max_lagrangian: f64::NEG_INFINITY,
        at_time: 0.0,
        bound: f.lagrangian_bound(),
        min_vx: f64::INFINITY,
        min_vtheta: f64::INFINITY,
    };
    for k in 0..=n_samples {
        let t = horizon * k as f64 / n_samples as f64;
        let s = f.eval(t);
        let l = s.lagrangian();
        if l > rep.max_lagrangian {
            rep.max_lagrangian = l;
            rep.at_time = t;
        }
        rep.min_vx = rep.min_vx.min(s.vx);
        rep.min_vtheta = rep.min_vtheta.min(s.vtheta);
    }
    Ok(rep)
}
