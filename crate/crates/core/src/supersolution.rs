//! Three-region super-solution of the linearised equation
//! `u_t = θ u_xx + u_θθ + u` on `ℝ × [θ̲, ∞)`.
//!
//! With `s = t + a`:
//!
//! * `x ≤ 0`: `C e^{s − θ²/4s}` (spatially uniform, no decay in x);
//! * `Ω = {x ≥ r_c, θ̲ ≤ θ ≤ θ*(x)}`: `C e^{s − (3x/4)^{4/3}/s}`, constant in θ;
//! * everywhere else with `x ≥ 0`: `C e^{s − ψ(s, x, θ)}`.
//!
//! Values are computed in log space; the public evaluators exponentiate at the
//! end so very negative exponents underflow to zero instead of producing NaN.

use crate::error::{Error, Result};
use crate::grid::Field;
use crate::hj;
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupersolParams {
    /// Time shift `a > 0`.
    pub a: f64,
    /// Amplitude `C(a) > 0`.
    pub amplitude: f64,
    /// Lower trait bound `θ̲ > 0`.
    pub theta_lower: f64,
}

impl SupersolParams {
    pub fn new(a: f64, amplitude: f64, theta_lower: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::Domain("time shift a must be positive"));
        }
        if !(amplitude > 0.0) || !amplitude.is_finite() {
            return Err(Error::Domain("amplitude C(a) must be positive and finite"));
        }
        if !(theta_lower > 0.0) {
            return Err(Error::Domain("theta_lower must be positive"));
        }
        Ok(SupersolParams { a, amplitude, theta_lower })
    }

    pub fn critical_radius(&self) -> f64 {
        hj::critical_radius(self.theta_lower)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionTag {
    LeftHalf,
    OmegaComplementRight,
    Omega,
}

fn region_of(x: f64, theta: f64, theta_lower: f64) -> RegionTag {
    if x >= hj::critical_radius(theta_lower) && theta <= hj::theta_star(x) {
        RegionTag::Omega
    } else if x <= 0.0 {
        RegionTag::LeftHalf
    } else {
        RegionTag::OmegaComplementRight
    }
}

/// Region containing `(x, θ)`. Points on `Γ = {θ = θ*(x)}` belong to `Omega`.
pub fn classify_region(x: f64, theta: f64, theta_lower: f64) -> Result<RegionTag> {
    if !(theta >= theta_lower) {
        return Err(Error::Domain("theta below theta_lower"));
    }
    Ok(region_of(x, theta, theta_lower))
}

fn log_profile(region: RegionTag, s: f64, x: f64, theta: f64) -> f64 {
    match region {
        RegionTag::LeftHalf => s - theta * theta / (4.0 * s),
        RegionTag::OmegaComplementRight => s - hj::psi(s, x, theta),
        RegionTag::Omega => s - math::powf(0.75 * x, 4.0 / 3.0) / s,
    }
}

/// `log ũ(t, x, θ)`. The region is picked from `(x, θ)` without checking
/// `θ ≥ θ̲`, so stencils may reach slightly below the boundary.
pub fn log_tilde_u(t: f64, x: f64, theta: f64, p: &SupersolParams) -> f64 {
    let s = t + p.a;
    math::ln(p.amplitude) + log_profile(region_of(x, theta, p.theta_lower), s, x, theta)
}

/// `ũ(t, x, θ)`.
pub fn tilde_u(t: f64, x: f64, theta: f64, p: &SupersolParams) -> f64 {
    math::exp(log_tilde_u(t, x, theta, p))
}

/// `C e^{s − ψ(s, x, θ)}`, the unmodified Hopf-Cole profile that `ũ`
/// dominates everywhere.
pub fn log_bar_u(t: f64, x: f64, theta: f64, p: &SupersolParams) -> f64 {
    let s = t + p.a;
    math::ln(p.amplitude) + s - hj::psi(s, x, theta)
}

/// `(ũ_t − θũ_xx − ũ_θθ − ũ) / ũ` by central differences with step `h` on
/// every axis.
///
/// Fails when any stencil node lies in a different region from the centre.
pub fn relative_residual(t: f64, x: f64, theta: f64, p: &SupersolParams, h: f64) -> Result<f64> {
    let region = region_of(x, theta, p.theta_lower);
    let nodes = [(x + h, theta), (x - h, theta), (x, theta + h), (x, theta - h)];
    if nodes.iter().any(|&(xx, tt)| region_of(xx, tt, p.theta_lower) != region) {
        return Err(Error::Precondition("stencil crosses a region interface"));
    }
    if region == RegionTag::LeftHalf && x + h > 0.0 {
        return Err(Error::Precondition("stencil crosses x = 0"));
    }
    if t + p.a - h <= 0.0 {
        return Err(Error::Precondition("time stencil leaves s > 0"));
    }
    let s = t + p.a;
    let l0 = log_profile(region, s, x, theta);
    let ratio = |ds: f64, xx: f64, tt: f64| math::exp(log_profile(region, s + ds, xx, tt) - l0);
    let ut = (ratio(h, x, theta) - ratio(-h, x, theta)) / (2.0 * h);
    let uxx = (ratio(0.0, x + h, theta) - 2.0 + ratio(0.0, x - h, theta)) / (h * h);
    let utt = (ratio(0.0, x, theta + h) - 2.0 + ratio(0.0, x, theta - h)) / (h * h);
    Ok(ut - theta * uxx - utt - 1.0)
}

/// `ũ_t − θũ_xx − ũ_θθ − ũ` by central differences.
pub fn residual(t: f64, x: f64, theta: f64, p: &SupersolParams, h: f64) -> Result<f64> {
    Ok(relative_residual(t, x, theta, p, h)? * tilde_u(t, x, theta, p))
}

/// Closed-form `(ũ_t − θũ_xx − ũ_θθ − ũ)/ũ` inside `Ω`:
/// `(3x/4)^{2/3}(θ*(x) − θ)/s² + θ/(4s)·(3x/4)^{−2/3}`.
pub fn omega_relative_residual_exact(t: f64, x: f64, theta: f64, p: &SupersolParams) -> f64 {
    let s = t + p.a;
    let q = math::powf(0.75 * x, 2.0 / 3.0);
    q * (q - theta) / (s * s) + theta / (4.0 * s * q)
}

/// Rightmost point of `{ũ(t, ·, ·) = m}`:
/// `x̃_m(t) = (4/3) s^{3/2} (1 − log(m/C)/s)^{3/4}`.
pub fn envelope_x(t: f64, m: f64, p: &SupersolParams) -> Result<f64> {
    let s = t + p.a;
    if !(m > 0.0) {
        return Err(Error::Domain("level must be positive"));
    }
    let base = 1.0 - math::ln(m / p.amplitude) / s;
    if !(base > 0.0) {
        return Err(Error::Domain("level set empty: m >= C e^{t+a}"));
    }
    Ok(4.0 / 3.0 * s * math::sqrt(s) * math::powf(base, 0.75))
}

/// Split θ-integral of `ũ` at the far edge of `{ũ ≤ m/10(t+a)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoEnvelope {
    /// `x_{m,t} = x̃_{m/10(t+a)}(t)`.
    pub x_mt: f64,
    /// `θ*(x_{m,t})`.
    pub theta_star: f64,
    /// `∫_{θ̲}^{5θ*} ũ(t, x_{m,t}, θ) dθ`.
    pub bulk: f64,
    /// `∫_{5θ*}^{∞} ũ(t, x_{m,t}, θ) dθ`.
    pub tail: f64,
    /// Gaussian majorant `C ∫_{5θ*}^{∞} e^{s − θ²/4s} dθ` of the tail.
    pub tail_majorant: f64,
    /// `bulk + tail`.
    pub bound: f64,
}

/// Composite Simpson rule on `[a, b]` with `n` (even) panels.
pub fn simpson(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let n = if n % 2 == 1 { n + 1 } else { n.max(2) };
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + k as f64 * h);
    }
    acc * h / 3.0
}

pub fn rho_envelope_check(t: f64, m: f64, p: &SupersolParams) -> Result<RhoEnvelope> {
    let s = t + p.a;
    let m_tilde = m / (10.0 * s);
    let x_mt = envelope_x(t, m_tilde, p)?;
    let ts = hj::theta_star(x_mt);
    if !(5.0 / 6.0 * s <= ts && ts <= 7.0 / 6.0 * s) {
        return Err(Error::Precondition("t too small: theta*(x_mt) outside [5s/6, 7s/6]"));
    }
    let split = 5.0 * ts;
    let f = |th: f64| tilde_u(t, x_mt, th, p);
    let bulk = simpson(p.theta_lower, split, 20_000, f);
    // e^{-θ²/4s} is below 1e-300 relative to its value at `split` after this many widths
    let far = split + 60.0 * math::sqrt(s) + 10.0;
    let tail = simpson(split, far, 20_000, f);
    let tail_majorant =
        p.amplitude * math::exp(s) * math::sqrt(core::f64::consts::PI * s) * libm::erfc(split / (2.0 * math::sqrt(s)));
    Ok(RhoEnvelope { x_mt, theta_star: ts, bulk, tail, tail_majorant, bound: bulk + tail })
}

/// Smallest amplitude with `ũ(0, ·, ·) ≥ u₀` at every node of `initial`.
pub fn amplitude_for(initial: &Field, a: f64, theta_lower: f64) -> Result<f64> {
    let unit = SupersolParams::new(a, 1.0, theta_lower)?;
    let g = &initial.grid;
    let mut log_c = f64::NEG_INFINITY;
    for i in 0..g.nx {
        let x = g.x(i);
        for j in 0..g.ntheta {
            let u = initial.get(i, j);
            if u > 0.0 {
                log_c = log_c.max(math::ln(u) - log_tilde_u(0.0, x, g.theta(j), &unit));
            }
        }
    }
    if log_c == f64::NEG_INFINITY {
        return Err(Error::Domain("initial condition is identically zero"));
    }
    Ok(math::exp(log_c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(a: f64, c: f64) -> SupersolParams {
        SupersolParams::new(a, c, 1.0).unwrap()
    }

    #[test]
    fn region_examples() {
        assert_eq!(classify_region(-1.0, 2.0, 1.0).unwrap(), RegionTag::LeftHalf);
        let th = hj::theta_star(10.0) / 2.0;
        assert!(th >= 1.0);
        assert_eq!(classify_region(10.0, th, 1.0).unwrap(), RegionTag::Omega);
        assert_eq!(classify_region(1.0, 5.0, 1.0).unwrap(), RegionTag::OmegaComplementRight);
        assert!(classify_region(1.0, 0.5, 1.0).is_err());
        // Γ belongs to Omega
        assert_eq!(classify_region(10.0, hj::theta_star(10.0), 1.0).unwrap(), RegionTag::Omega);
    }

    #[test]
    fn tilde_u_examples() {
        let p = params(1.0, 1.0);
        assert!((tilde_u(0.0, 0.0, 2.0, &p) - 1.0).abs() < 1e-15);
        let x = 40.0;
        let th = 2.0;
        assert_eq!(classify_region(x, th, 1.0).unwrap(), RegionTag::Omega);
        let expect = (1.0 - (0.75 * x).powf(4.0 / 3.0)).exp();
        assert!((tilde_u(0.0, x, th, &p) / expect - 1.0).abs() < 1e-12);
        let p2 = params(1.0, 2.0);
        let v = tilde_u(1.0, -3.0, 2.0, &p2);
        assert!((v - 2.0 * 1.5f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn continuous_across_x_zero_and_gamma() {
        let p = params(1.0, 1.0);
        for &th in &[1.0, 2.0, 7.5] {
            let l = tilde_u(0.5, -1e-12, th, &p);
            let r = tilde_u(0.5, 1e-12, th, &p);
            assert!((l - r).abs() <= 1e-10 * l);
        }
        for &x in &[2.0, 10.0, 55.0] {
            let ts = hj::theta_star(x);
            let below = tilde_u(2.0, x, ts - 1e-9, &p);
            let above = tilde_u(2.0, x, ts + 1e-9, &p);
            assert!((below - above).abs() <= 1e-8 * below);
        }
    }

    #[test]
    fn c1_matching_across_gamma() {
        let p = params(1.0, 1.0);
        let t = 3.0;
        for &x in &[3.0, 12.0, 40.0] {
            let ts = hj::theta_star(x);
            let h = 1e-4;
            let lu = |xx: f64, th: f64| log_tilde_u(t, xx, th, &p);
            // θ-derivative: Ω side is flat; the other side vanishes at the minimum
            let d_out = (lu(x, ts + 2.0 * h) - lu(x, ts + h)) / h;
            assert!(d_out.abs() < 1e-2 * (1.0 + 1.0 / ts), "{d_out}");
            // x-derivative from both sides at θ slightly off Γ
            let th_in = ts - 1e-6;
            let th_out = ts + 1e-6;
            let dx_in = (lu(x + h, th_in) - lu(x - h, th_in)) / (2.0 * h);
            let dx_out = (lu(x + h, th_out) - lu(x - h, th_out)) / (2.0 * h);
            assert!((dx_in - dx_out).abs() <= 1e-3 * dx_in.abs(), "{dx_in} {dx_out}");
        }
    }

    #[test]
    fn residual_examples() {
        let p = params(1.0, 1.0);
        let h = 1e-3;
        assert!(relative_residual(1.0, 10.0, 2.0, &p, h).unwrap() >= -1e-6);
        // left half: v̄ leaves exactly ũ/2s
        let r = relative_residual(1.0, -3.0, 2.0, &p, h).unwrap();
        assert!((r - 1.0 / (2.0 * 2.0)).abs() < 1e-5, "{r}");
        assert!(relative_residual(1.0, 1.0, 5.0, &p, h).unwrap() >= -1e-6);
    }

    #[test]
    fn residual_rejects_interface_stencils() {
        let p = params(1.0, 1.0);
        assert!(relative_residual(1.0, 0.0, 2.0, &p, 1e-3).is_err());
        let x = 10.0;
        assert!(relative_residual(1.0, x, hj::theta_star(x), &p, 1e-3).is_err());
    }

    #[test]
    fn omega_residual_matches_closed_form() {
        let p = params(1.0, 1.0);
        for &(t, x, th) in &[(1.0, 10.0, 2.0), (5.0, 30.0, 4.0), (15.0, 80.0, 1.5)] {
            assert_eq!(classify_region(x, th, 1.0).unwrap(), RegionTag::Omega);
            let fd = relative_residual(t, x, th, &p, 1e-3).unwrap();
            let exact = omega_relative_residual_exact(t, x, th, &p);
            assert!((fd - exact).abs() < 1e-5 * (1.0 + exact.abs()), "{fd} {exact}");
            assert!(exact >= 0.0);
        }
    }

    #[test]
    fn random_region_residual_sweep() {
        let p = params(1.0, 1.0);
        let h = 1e-3;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut worst: f64 = f64::INFINITY;
        let mut counted = 0;
        while counted < 3000 {
            let t = rng.gen_range(1.0..20.0);
            let x = rng.gen_range(-60.0..200.0);
            let th = rng.gen_range(1.0..60.0);
            if let Ok(r) = relative_residual(t, x, th, &p, h) {
                worst = worst.min(r);
                counted += 1;
            }
        }
        assert!(worst >= -1e-6, "{worst:e}");
    }

    #[test]
    fn dominates_hopf_cole_profile() {
        let p = params(1.0, 2.5);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5000 {
            let t = rng.gen_range(0.0..20.0);
            let x = rng.gen_range(-50.0..200.0);
            let th = rng.gen_range(1.0..60.0);
            assert!(log_tilde_u(t, x, th, &p) >= log_bar_u(t, x, th, &p) - 1e-9);
        }
    }

    #[test]
    fn nonincreasing_in_x_on_right() {
        let p = params(1.0, 1.0);
        for &t in &[0.0, 3.0, 15.0] {
            for &th in &[1.0, 3.0, 12.0, 40.0] {
                let mut prev = f64::INFINITY;
                for k in 0..2000 {
                    let v = log_tilde_u(t, k as f64 * 0.1, th, &p);
                    assert!(v <= prev + 1e-12);
                    prev = v;
                }
            }
        }
    }

    #[test]
    fn theta_derivative_at_lower_boundary() {
        let p = params(1.0, 1.0);
        let h = 1e-5;
        for &t in &[0.0, 2.0, 9.0] {
            for k in -100..100 {
                let x = k as f64 * 0.05;
                if x > p.critical_radius() {
                    continue;
                }
                let d = (tilde_u(t, x, 1.0 + h, &p) - tilde_u(t, x, 1.0, &p)) / h;
                assert!(d <= 1e-9 * tilde_u(t, x, 1.0, &p), "x={x} d={d}");
            }
            // θ-independent in Ω
            let x = 20.0;
            let d = tilde_u(t, x, 1.0 + h, &p) - tilde_u(t, x, 1.0, &p);
            assert_eq!(d, 0.0);
        }
    }

    #[test]
    fn envelope_examples() {
        let p = params(1.0, 1.0);
        let t = 3.0;
        let e = envelope_x(t, 1.0, &p).unwrap();
        assert!((e - 4.0 / 3.0 * 4f64.powf(1.5)).abs() < 1e-12);

        let p = params(1.0, core::f64::consts::E);
        let t = 1e4;
        let r = envelope_x(t, 0.5, &p).unwrap() / t.powf(1.5);
        assert!((r / (4.0 / 3.0) - 1.0).abs() < 0.02);

        for &(t, m) in &[(1.0, 0.5), (10.0, 0.1), (30.0, 0.9)] {
            let x = envelope_x(t, m, &p).unwrap();
            let v = tilde_u(t, x, hj::theta_star(x), &p);
            assert!((v / m - 1.0).abs() < 1e-8, "{v} {m}");
        }
        assert!(envelope_x(0.0, 100.0, &params(1.0, 1.0)).is_err());
    }

    #[test]
    fn rho_envelope_example() {
        let p = params(1.0, 1.0);
        let m = 0.5;
        let r = rho_envelope_check(50.0, m, &p).unwrap();
        assert!(r.bound <= m * 1.01, "{r:?}");
        assert!(r.bulk <= 5.0 * m / 6.0);
        assert!(r.tail <= r.tail_majorant * (1.0 + 1e-6));
        assert!(rho_envelope_check(0.0, m, &p).is_err());
    }
}
