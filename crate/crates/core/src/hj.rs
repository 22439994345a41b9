//! Closed-form solution of `ψ_t + θ ψ_x² + ψ_θ² = 0` started from a point
//! mass at the origin, and the geometry that goes with it.
//!
//! Everything here is a pure function of its arguments. The central object is
//! the real root `Z(x, θ)` of `Z³ + 3θZ + 3x = 0`, in terms of which
//! `ψ(t, x, θ) = (θ + Z²)² / 4t`.

use crate::error::{Error, Result};
use crate::math;

/// Argument triple of `ψ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HjPoint {
    pub t: f64,
    pub x: f64,
    pub theta: f64,
}

impl HjPoint {
    pub fn new(t: f64, x: f64, theta: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::Domain("psi needs t > 0"));
        }
        if !(theta >= 0.0) {
            return Err(Error::Domain("psi needs theta >= 0"));
        }
        Ok(HjPoint { t, x, theta })
    }

    pub fn z(&self) -> f64 {
        cubic_real_root(self.x, self.theta)
    }

    pub fn psi(&self) -> f64 {
        psi(self.t, self.x, self.theta)
    }
}

/// Rightmost point of the zero level set `{ψ = t}` at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgePoint {
    pub x_edge: f64,
    pub theta_edge: f64,
    pub t: f64,
}

impl EdgePoint {
    pub fn at(t: f64) -> Self {
        EdgePoint { x_edge: 4.0 / 3.0 * t * math::sqrt(t), theta_edge: t, t }
    }
}

/// Real root of the depressed cubic `Z³ + pZ + q = 0` when its discriminant
/// `q²/4 + p³/27` is non-negative.
///
/// The larger-magnitude Cardano cube root is taken first and the partner term
/// recovered as `-p / 3u`, which avoids the cancellation of the textbook form
/// when `|q|` is small against `|p|^{3/2}`. One Newton step polishes the
/// result.
fn depressed_cubic_root(p: f64, q: f64) -> f64 {
    if q == 0.0 {
        return 0.0;
    }
    let disc = 0.25 * q * q + p * p * p / 27.0;
    let s = math::sqrt(disc.max(0.0));
    // -q/2 - sign(q) * sqrt(disc): same sign as -q, no cancellation
    let big = if q > 0.0 { -0.5 * q - s } else { -0.5 * q + s };
    let u = math::cbrt(big);
    let mut z = if u == 0.0 { 0.0 } else { u - p / (3.0 * u) };
    let d = 3.0 * z * z + p;
    if d != 0.0 {
        let f = (z * z + p) * z + q;
        let step = f / d;
        if step.is_finite() {
            z -= step;
        }
    }
    z
}

/// The unique real solution of `Z³ + 3θZ + 3x = 0` for `θ ≥ 0`.
///
/// `Z` has the opposite sign of `x` and vanishes exactly when `x = 0`. The
/// routine also accepts slightly negative `θ` as long as the cubic still has a
/// single real root, which the finite-difference stencils below rely on.
pub fn cubic_real_root(x: f64, theta: f64) -> f64 {
    depressed_cubic_root(3.0 * theta, 3.0 * x)
}

/// `Z³ + 3θZ + 3x` evaluated at `z`.
pub fn cubic_residual(z: f64, x: f64, theta: f64) -> f64 {
    (z * z + 3.0 * theta) * z + 3.0 * x
}

/// Rate function `ψ(t, x, θ) = (θ + Z²)² / 4t`.
pub fn psi(t: f64, x: f64, theta: f64) -> f64 {
    let z = cubic_real_root(x, theta);
    let s = theta + z * z;
    s * s / (4.0 * t)
}

/// Threshold `r_c = (4/3) θ̲^{3/2}` beyond which `ψ(t, x, ·)` has an interior
/// minimum in `[θ̲, ∞)`.
pub fn critical_radius(theta_lower: f64) -> f64 {
    4.0 / 3.0 * theta_lower * math::sqrt(theta_lower)
}

/// Minimiser `θ*(x) = (3|x|/4)^{2/3}` of `ψ(t, x, ·)` over `θ ≥ 0`.
pub fn theta_star(x: f64) -> f64 {
    math::powf(0.75 * math::abs(x), 2.0 / 3.0)
}

/// `ψ(t, x, θ*(x)) = (3|x|/4)^{4/3} / t`.
pub fn psi_min(t: f64, x: f64) -> f64 {
    math::powf(0.75 * math::abs(x), 4.0 / 3.0) / t
}

/// Location of the minimum of `ψ(t, x, ·)` over `Θ = [θ̲, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PsiMinimum {
    /// `|x| ≥ r_c`: the minimum sits at `θ*(x)`.
    Interior { theta: f64, psi: f64 },
    /// `|x| < r_c`: the minimum sits on the boundary `θ = θ̲`.
    Boundary { theta: f64, psi: f64 },
}

impl PsiMinimum {
    pub fn theta(&self) -> f64 {
        match *self {
            PsiMinimum::Interior { theta, .. } | PsiMinimum::Boundary { theta, .. } => theta,
        }
    }

    pub fn psi(&self) -> f64 {
        match *self {
            PsiMinimum::Interior { psi, .. } | PsiMinimum::Boundary { psi, .. } => psi,
        }
    }

    pub fn is_boundary(&self) -> bool {
        matches!(self, PsiMinimum::Boundary { .. })
    }
}

pub fn minimize_over_theta(t: f64, x: f64, theta_lower: f64) -> PsiMinimum {
    if math::abs(x) >= critical_radius(theta_lower) {
        PsiMinimum::Interior { theta: theta_star(x), psi: psi_min(t, x) }
    } else {
        PsiMinimum::Boundary { theta: theta_lower, psi: psi(t, x, theta_lower) }
    }
}

/// Non-negative branch of the level set `{ψ = t}`:
/// `x² = 4/9 (2t − θ)(θ + t)²` for `0 ≤ θ ≤ 2t`.
pub fn level_set_x(t: f64, theta: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain("level set needs t > 0"));
    }
    if theta > 2.0 * t {
        return Err(Error::Domain("level set is empty for theta > 2t"));
    }
    if theta < 0.0 {
        return Err(Error::Domain("level set needs theta >= 0"));
    }
    let s = theta + t;
    Ok(2.0 / 3.0 * s * math::sqrt(2.0 * t - theta))
}

/// Forward optimal trajectory reaching `(x_edge(t), θ_edge(t))` at `s = t`.
pub fn optimal_trajectory(t_final: f64, s: f64) -> (f64, f64) {
    let t = t_final;
    let r = s / t;
    let x = (1.5 - 0.5 * r) * r * r * (4.0 / 3.0) * t * math::sqrt(t);
    let th = s * (2.0 - r);
    (x, th)
}

/// Velocity `(Ẋ, Θ̇)` along [`optimal_trajectory`].
pub fn optimal_velocity(t_final: f64, s: f64) -> (f64, f64) {
    let t = t_final;
    let vx = 2.0 * s * (2.0 * t - s) / (t * math::sqrt(t));
    let vth = 2.0 - 2.0 * s / t;
    (vx, vth)
}

/// `L((x,θ),(v_x,v_θ)) = v_x²/4θ + v_θ²/4`.
pub fn lagrangian(theta: f64, vx: f64, vtheta: f64) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::Domain("lagrangian needs theta > 0"));
    }
    Ok(vx * vx / (4.0 * theta) + 0.25 * vtheta * vtheta)
}

/// Midpoint-rule action of the Lagrangian along the optimal path to the edge.
pub fn action_along_optimal(t_final: f64, n_steps: usize) -> f64 {
    let h = t_final / n_steps as f64;
    let mut acc = 0.0;
    for k in 0..n_steps {
        let s = (k as f64 + 0.5) * h;
        let (_, th) = optimal_trajectory(t_final, s);
        let (vx, vth) = optimal_velocity(t_final, s);
        // th > 0 at every interior midpoint
        acc += vx * vx / (4.0 * th) + 0.25 * vth * vth;
    }
    acc * h
}

/// Default stencil width `10⁻³ (1 + |x| + θ)`.
pub fn default_step(x: f64, theta: f64) -> f64 {
    1e-3 * (1.0 + math::abs(x) + theta)
}

/// Intrinsic lengths `(ℓ_x, ℓ_θ)` of `Z` near `(x, θ)`.
///
/// `Z` is quasi-homogeneous, `Z(λ³x, λ²θ) = λ Z(x, θ)`, so the natural
/// θ-length is `ℓ_θ = Z² + θ` and the natural x-length is `ℓ_θ^{3/2}`.
pub fn intrinsic_scales(x: f64, theta: f64) -> (f64, f64) {
    let z = cubic_real_root(x, theta);
    let lt = z * z + theta;
    (lt * math::sqrt(lt), lt)
}

/// `θ Z_xx + Z_θθ` by central second differences with one step `h`.
pub fn harmonicity_residual(x: f64, theta: f64, h: f64) -> f64 {
    harmonicity_residual_steps(x, theta, h, h)
}

/// `θ Z_xx + Z_θθ` with separate steps per axis.
pub fn harmonicity_residual_steps(x: f64, theta: f64, hx: f64, htheta: f64) -> f64 {
    let z0 = cubic_real_root(x, theta);
    let zxx = (cubic_real_root(x + hx, theta) - 2.0 * z0 + cubic_real_root(x - hx, theta)) / (hx * hx);
    let ztt = (cubic_real_root(x, theta + htheta) - 2.0 * z0 + cubic_real_root(x, theta - htheta))
        / (htheta * htheta);
    theta * zxx + ztt
}

/// Central first derivatives `(ψ_t, ψ_x, ψ_θ)`.
pub fn psi_gradient_fd(t: f64, x: f64, theta: f64, ht: f64, hx: f64, htheta: f64) -> (f64, f64, f64) {
    let pt = (psi(t + ht, x, theta) - psi(t - ht, x, theta)) / (2.0 * ht);
    let px = (psi(t, x + hx, theta) - psi(t, x - hx, theta)) / (2.0 * hx);
    let pth = (psi(t, x, theta + htheta) - psi(t, x, theta - htheta)) / (2.0 * htheta);
    (pt, px, pth)
}

/// `ψ_t + θ ψ_x² + ψ_θ²` by central differences.
pub fn hj_residual(t: f64, x: f64, theta: f64, ht: f64, hx: f64, htheta: f64) -> f64 {
    let (pt, px, pth) = psi_gradient_fd(t, x, theta, ht, hx, htheta);
    pt + theta * px * px + pth * pth
}
