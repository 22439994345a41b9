//! Coefficients of the moving-frame operator `L = −A∂_y − D∂_yy − ∂_ηη` and
//! the zeroth-order term `G`.
//!
//! In the frame `y = (x − X)/√Θ`, `η = θ − Θ` with the tilt
//! `w = e^{(Ẋ/2√Θ) y + (Θ̇/2) η} ṽ`, the inequality
//! `v_t − θv_xx − v_θθ ≤ (1 − ε) v` becomes
//! `w_t − A w_y − D w_yy − w_ηη ≤ G w` with
//!
//! * `A = yΘ̇/2Θ − (Ẋ/√Θ)(η/Θ)`
//! * `D = 1 + η/Θ`
//! * `G = 1 − ε − Ẋ²/4Θ − Θ̇²/4 + (Ẍ/2√Θ − ẊΘ̇/2Θ^{3/2}) y + (Ẋ²/4Θ² + Θ̈/2) η`

use super::trajectory::{TrajectoryFamily, TrajectoryState};
use crate::error::{Error, Result};
use crate::math;

/// Pointwise coefficients of a second-order operator `−A∂_y − D∂_yy − ∂_ηη`.
pub trait OperatorCoefficients {
    fn drift(&self, y: f64, eta: f64) -> f64;
    fn diffusion(&self, y: f64, eta: f64) -> f64;
}

/// `A = 0`, `D = 1`: the Dirichlet Laplacian.
#[derive(Debug, Clone, Copy, Default)]
pub struct Laplacian;

impl OperatorCoefficients for Laplacian {
    fn drift(&self, _: f64, _: f64) -> f64 {
        0.0
    }

    fn diffusion(&self, _: f64, _: f64) -> f64 {
        1.0
    }
}

/// Frozen-time coefficients of the moving-frame operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameCoefficients {
    pub state: TrajectoryState,
    pub eps: f64,
}

impl FrameCoefficients {
    pub fn a(&self, y: f64, eta: f64) -> f64 {
        let s = &self.state;
        y * s.vtheta / (2.0 * s.theta) - s.vx / math::sqrt(s.theta) * eta / s.theta
    }

    pub fn d(&self, eta: f64) -> f64 {
        1.0 + eta / self.state.theta
    }

    /// `G` at the origin of the frame.
    pub fn g0(&self) -> f64 {
        1.0 - self.eps - self.state.lagrangian()
    }

    /// `(∂_y G, ∂_η G)`; `G` is affine in `(y, η)`.
    pub fn g_gradient(&self) -> (f64, f64) {
        let s = &self.state;
        let rt = math::sqrt(s.theta);
        let gy = s.ax / (2.0 * rt) - s.vx * s.vtheta / (2.0 * s.theta * rt);
        let ge = s.vx * s.vx / (4.0 * s.theta * s.theta) + 0.5 * s.atheta;
        (gy, ge)
    }

    pub fn g(&self, y: f64, eta: f64) -> f64 {
        let (gy, ge) = self.g_gradient();
        self.g0() + gy * y + ge * eta
    }

    /// Exact minimum of the affine `G` over the closed disc of radius `r`.
    pub fn min_g_on_disc(&self, r: f64) -> f64 {
        let (gy, ge) = self.g_gradient();
        self.g0() - r * math::sqrt(gy * gy + ge * ge)
    }

    /// Exponent `(Ẋ/2√Θ) y + (Θ̇/2) η` of the tilt relating `w` and `ṽ`.
    pub fn tilt(&self, y: f64, eta: f64) -> f64 {
        let s = &self.state;
        s.vx / (2.0 * math::sqrt(s.theta)) * y + 0.5 * s.vtheta * eta
    }

    /// Fails when `D` is not positive on the disc of radius `r`.
    pub fn check_disc(&self, r: f64) -> Result<()> {
        if r >= self.state.theta {
            return Err(Error::Precondition("disc radius must stay below Theta (D > 0)"));
        }
        Ok(())
    }
}

impl OperatorCoefficients for FrameCoefficients {
    fn drift(&self, y: f64, eta: f64) -> f64 {
        self.a(y, eta)
    }

    fn diffusion(&self, _: f64, eta: f64) -> f64 {
        self.d(eta)
    }
}

/// Evaluators for `A`, `D` and `G` at time `t` along `f`.
pub fn coefficients(f: &TrajectoryFamily, t: f64, eps: f64) -> FrameCoefficients {
    FrameCoefficients { state: f.eval(t), eps }
}

/// `min_{t, B_R} G` over `n_samples + 1` times on `[0, horizon]`.
pub fn min_g_sweep(f: &TrajectoryFamily, eps: f64, r: f64, horizon: f64, n_samples: usize) -> f64 {
    (0..=n_samples)
        .map(|k| coefficients(f, horizon * k as f64 / n_samples as f64, eps).min_g_on_disc(r))
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_trajectory_coefficients() {
        let f = TrajectoryFamily::fixed(3.0, 20.0).unwrap();
        let c = coefficients(&f, 1.0, 0.1);
        assert_eq!(c.a(1.5, -2.0), 0.0);
        assert_eq!(c.d(4.0), 1.2);
        assert!((c.g(3.0, -1.0) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn g_at_origin() {
        let f = TrajectoryFamily::local_optimal(200.0, 30.0, 0.1).unwrap();
        for &t in &[0.0, 50.0, 199.0] {
            let c = coefficients(&f, t, 0.1);
            let s = f.eval(t);
            let expect = 0.9 - s.vx * s.vx / (4.0 * s.theta) - s.vtheta * s.vtheta / 4.0;
            assert!((c.g(0.0, 0.0) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn min_on_disc_matches_boundary_scan() {
        let f = TrajectoryFamily::local_optimal(100.0, 20.0, 0.1).unwrap();
        let c = coefficients(&f, 37.0, 0.1);
        let r = 5.0;
        let scan = (0..3600)
            .map(|k| {
                let a = k as f64 * core::f64::consts::PI / 1800.0;
                c.g(r * math::cos(a), r * math::sin(a))
            })
            .fold(f64::INFINITY, f64::min);
        assert!((scan - c.min_g_on_disc(r)).abs() < 1e-9);
    }

    #[test]
    fn min_g_large_h_t() {
        // large H, T: the lower-order corrections vanish and G ≥ 3ε/4
        let eps = 0.1;
        let f = TrajectoryFamily::local_optimal(1e6, 1e6, eps).unwrap();
        assert!(min_g_sweep(&f, eps, 4.0, 1e6, 2000) >= 0.75 * eps);
    }

    #[test]
    fn disc_too_large() {
        let f = TrajectoryFamily::fixed(0.0, 5.0).unwrap();
        assert!(coefficients(&f, 0.0, 0.1).check_disc(6.0).is_err());
        assert!(coefficients(&f, 0.0, 0.1).check_disc(4.0).is_ok());
    }
}
