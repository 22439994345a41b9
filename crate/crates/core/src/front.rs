//! Front extraction from simulated fields and power-law fits of the front
//! position.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{Field, RhoProfile};
use crate::math;
use crate::spectral::trajectory::straight_path_constant;
use crate::supersolution::{envelope_x, SupersolParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrontSource {
    /// `max{x : max_θ u(t, x, θ) ≥ m}`
    FieldLevel,
    /// `max{x : ρ(t, x) ≥ c}`
    RhoLevel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontSeries {
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    pub level: f64,
    pub source: FrontSource,
}

impl FrontSeries {
    pub fn new(level: f64, source: FrontSource) -> Self {
        FrontSeries { times: Vec::new(), positions: Vec::new(), level, source }
    }

    pub fn push(&mut self, t: f64, x: f64) -> Result<()> {
        if !x.is_finite() {
            return Err(Error::Fit("front position must be finite"));
        }
        if let Some(&last) = self.times.last() {
            if !(t > last) {
                return Err(Error::Fit("times must be strictly increasing"));
            }
        }
        self.times.push(t);
        self.positions.push(x);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Rightmost crossing of `level` by nodal values on an equispaced axis.
fn last_crossing(values: &[f64], x0: f64, h: f64, level: f64) -> Option<f64> {
    let i = values.iter().rposition(|&v| v >= level)?;
    if i + 1 == values.len() {
        return Some(x0 + i as f64 * h);
    }
    let (a, b) = (values[i], values[i + 1]);
    Some(x0 + h * (i as f64 + (a - level) / (a - b)))
}

/// Largest `x` whose column maximum reaches `m`, linearly interpolated
/// between the last pair of nodes that straddles the level.
pub fn front_position(f: &Field, m: f64) -> Option<f64> {
    last_crossing(&f.column_max(), f.grid.x_min, f.grid.hx(), m)
}

pub fn rho_front_position(r: &RhoProfile, level: f64) -> Option<f64> {
    last_crossing(&r.values, r.grid.x_min, r.grid.hx(), level)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFit {
    pub exponent: f64,
    pub coefficient: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    pub n_points: usize,
}

/// Least-squares line through `(ln t, ln x)` over the window (inclusive).
/// The default window is the second half of the time span.
pub fn fit_power_law(s: &FrontSeries, window: Option<(f64, f64)>) -> Result<PowerFit> {
    if s.is_empty() {
        return Err(Error::Fit("empty series"));
    }
    let (lo, hi) = window.unwrap_or_else(|| {
        let (a, b) = (s.times[0], s.times[s.len() - 1]);
        (0.5 * (a + b), b)
    });
    if !(hi > lo) {
        return Err(Error::Fit("empty fit window"));
    }
    let tol = 1e-9 * hi.abs().max(1.0);
    let mut pts = Vec::new();
    for (&t, &x) in s.times.iter().zip(&s.positions) {
        if t >= lo - tol && t <= hi + tol {
            if !(t > 0.0 && x > 0.0) {
                return Err(Error::Fit("times and positions must be positive in the window"));
            }
            pts.push((math::ln(t), math::ln(x)));
        }
    }
    if pts.len() < 5 {
        return Err(Error::Fit("need at least 5 points in the window"));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("window spans a single time"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Ok(PowerFit { exponent: slope, coefficient: math::exp(intercept), r_squared, window: (lo, hi), n_points: pts.len() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeReport {
    /// Saved times where `x(t) > x̃_m(t) + hx`.
    pub violations: usize,
    /// `min_t (x̃_m(t) − x(t))`; negative means the front got ahead.
    pub worst_margin: f64,
    pub worst_time: f64,
}

impl EnvelopeReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Checks `x(t) ≤ x̃_m(t) + hx` at every time of the series.
pub fn envelope_compare(s: &FrontSeries, p: &SupersolParams, m: f64, hx: f64) -> Result<EnvelopeReport> {
    let mut rep = EnvelopeReport { violations: 0, worst_margin: f64::INFINITY, worst_time: f64::NAN };
    for (&t, &x) in s.times.iter().zip(&s.positions) {
        let margin = envelope_x(t, m, p)? - x;
        if margin < rep.worst_margin {
            rep.worst_margin = margin;
            rep.worst_time = t;
        }
        if margin < -hx {
            rep.violations += 1;
        }
    }
    Ok(rep)
}

/// Upper constant `4/3` and lower constant `c₁(ε) = 8/(3√(3√3)) (1 − 2ε)^{3/4}`
/// for the non-local front.
pub fn nonlocal_constants(eps: f64) -> Result<(f64, f64)> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Domain("eps must lie in (0, 1/2)"));
    }
    Ok((4.0 / 3.0, straight_path_constant() * math::powf(1.0 - 2.0 * eps, 0.75)))
}
