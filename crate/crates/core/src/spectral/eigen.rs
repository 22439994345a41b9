//! Principal Dirichlet eigenpair of `−A∂_y − D∂_yy − ∂_ηη` on a disc.
//!
//! Five-point stencils with Shortley–Weller treatment of the curved wall,
//! a banded LU factorization, and inverse power iteration.

use alloc::vec;
use alloc::vec::Vec;

use super::coefficients::OperatorCoefficients;
use super::disc::{DiscGrid, Neighbour};
use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DriftScheme {
    /// One-sided differences taken from the upwind side (M-matrix).
    #[default]
    Upwind,
    /// Second-order differences, kept for convergence studies.
    Centered,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    pub scheme: DriftScheme,
    pub max_iter: usize,
    /// Relative change in successive eigenvalue estimates at which to stop.
    pub tol: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { scheme: DriftScheme::Upwind, max_iter: 500, tol: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub lambda: f64,
    /// Values on the unknowns of the disc grid, `max φ = 1`.
    pub phi: Vec<f64>,
    /// `‖L_h φ − λφ‖_∞`.
    pub residual: f64,
    pub iterations: usize,
    /// Discrete `L²(B_R)` norm of the sup-normalised `φ`.
    pub l2_norm: f64,
}

/// Sparse rows of the discrete operator, at most five entries each.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscOperator {
    rows: Vec<Vec<(usize, f64)>>,
}

impl DiscOperator {
    pub fn assemble<C: OperatorCoefficients>(g: &DiscGrid, c: &C, scheme: DriftScheme) -> Self {
        let h = g.h();
        let mut rows = Vec::with_capacity(g.len());
        for k in 0..g.len() {
            let (y, e) = g.position(k);
            let a = c.drift(y, e);
            let d = c.diffusion(y, e);
            let nb = g.neighbours(k);
            let dist = |n: Neighbour| match n {
                Neighbour::Node(_) => h,
                Neighbour::Wall(s) => s,
            };
            let (hym, hyp, hem, hep) = (dist(nb[0]), dist(nb[1]), dist(nb[2]), dist(nb[3]));
            // weights of (u_k, u_−y, u_+y, u_−η, u_+η)
            let mut w = [0.0; 5];
            let sy = 2.0 / (hym + hyp);
            let se = 2.0 / (hem + hep);
            // −D u_yy
            w[1] -= d * sy / hym;
            w[2] -= d * sy / hyp;
            w[0] += d * sy * (1.0 / hym + 1.0 / hyp);
            // −u_ηη
            w[3] -= se / hem;
            w[4] -= se / hep;
            w[0] += se * (1.0 / hem + 1.0 / hep);
            // −A u_y
            match scheme {
                DriftScheme::Upwind => {
                    if a > 0.0 {
                        w[2] -= a / hyp;
                        w[0] += a / hyp;
                    } else {
                        w[1] += a / hym;
                        w[0] -= a / hym;
                    }
                }
                DriftScheme::Centered => {
                    let den = hyp * hym * (hyp + hym);
                    w[2] -= a * hym * hym / den;
                    w[1] += a * hyp * hyp / den;
                    w[0] -= a * (hyp * hyp - hym * hym) / den;
                }
            }
            let mut row = Vec::with_capacity(5);
            row.push((k, w[0]));
            for (slot, n) in nb.iter().enumerate() {
                if let Neighbour::Node(m) = *n {
                    row.push((m, w[slot + 1]));
                }
            }
            rows.push(row);
        }
        DiscOperator { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (k, row) in self.rows.iter().enumerate() {
            out[k] = row.iter().map(|&(m, v)| v * x[m]).sum();
        }
    }

    fn bandwidths(&self) -> (usize, usize) {
        let mut kl = 0;
        let mut ku = 0;
        for (k, row) in self.rows.iter().enumerate() {
            for &(m, _) in row {
                if m < k {
                    kl = kl.max(k - m);
                } else {
                    ku = ku.max(m - k);
                }
            }
        }
        (kl, ku)
    }

    pub fn factor(&self) -> Result<BandedLu> {
        let (kl, ku) = self.bandwidths();
        let mut lu = BandedLu::zeros(self.len(), kl, ku);
        for (k, row) in self.rows.iter().enumerate() {
            for &(m, v) in row {
                *lu.at_mut(k, m) += v;
            }
        }
        lu.factor_in_place()?;
        Ok(lu)
    }
}

/// LU factors of a banded matrix, no pivoting. Row `i` stores columns
/// `i − kl ..= i + ku`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

impl BandedLu {
    fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        BandedLu { n, kl, ku, data: vec![0.0; n * (kl + ku + 1)] }
    }

    #[inline]
    fn width(&self) -> usize {
        self.kl + self.ku + 1
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        let w = self.width();
        &mut self.data[i * w + j + self.kl - i]
    }

    fn factor_in_place(&mut self) -> Result<()> {
        let (n, kl, ku, w) = (self.n, self.kl, self.ku, self.width());
        for k in 0..n {
            let pivot = self.data[k * w + kl];
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::SingularSystem);
            }
            let jmax = (k + ku).min(n - 1);
            for i in k + 1..=(k + kl).min(n - 1) {
                let off = i * w + kl - i;
                let l = self.data[off + k] / pivot;
                if l == 0.0 {
                    continue;
                }
                self.data[off + k] = l;
                let (head, tail) = self.data.split_at_mut(i * w);
                let src = &head[k * w + kl + 1..k * w + kl + jmax - k + 1];
                let dst = &mut tail[kl + k + 1 - i..kl + jmax + 1 - i];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d -= l * s;
                }
            }
        }
        Ok(())
    }

    /// Solves `LU x = b` in place.
    pub fn solve(&self, b: &mut [f64]) {
        let (n, kl, ku, w) = (self.n, self.kl, self.ku, self.width());
        for i in 0..n {
            let off = i * w + kl - i;
            let mut s = b[i];
            for j in i.saturating_sub(kl)..i {
                s -= self.data[off + j] * b[j];
            }
            b[i] = s;
        }
        for i in (0..n).rev() {
            let off = i * w + kl - i;
            let mut s = b[i];
            for j in i + 1..=(i + ku).min(n - 1) {
                s -= self.data[off + j] * b[j];
            }
            b[i] = s / self.data[off + i];
        }
    }
}

/// Inverse power iteration for the eigenvalue of smallest modulus, which for
/// these operators is the real principal eigenvalue.
pub fn principal_eigenpair<C: OperatorCoefficients>(
    g: &DiscGrid,
    c: &C,
    opts: EigenOptions,
) -> Result<EigenPair> {
    if g.is_empty() {
        return Err(Error::InvalidGrid("disc grid has no interior nodes"));
    }
    for k in 0..g.len() {
        let (y, e) = g.position(k);
        if !(c.diffusion(y, e) > 0.0) {
            return Err(Error::Precondition("diffusion coefficient D must be positive on the disc"));
        }
    }
    let op = DiscOperator::assemble(g, c, opts.scheme);
    let lu = op.factor()?;
    let n = g.len();
    // start from a positive bump
    let r2 = g.radius * g.radius;
    let mut x: Vec<f64> = (0..n)
        .map(|k| {
            let (y, e) = g.position(k);
            (r2 - y * y - e * e).max(0.0)
        })
        .collect();
    normalize_sup(&mut x);
    let mut lambda = f64::NAN;
    let mut change = f64::INFINITY;
    let mut y = vec![0.0; n];
    for it in 1..=opts.max_iter {
        y.copy_from_slice(&x);
        lu.solve(&mut y);
        let xx: f64 = x.iter().map(|v| v * v).sum();
        let xy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let next = xx / xy;
        normalize_sup(&mut y);
        core::mem::swap(&mut x, &mut y);
        change = math::abs(next - lambda) / math::abs(next);
        lambda = next;
        if change < opts.tol {
            return finish(g, &op, lambda, x, it);
        }
    }
    Err(Error::NoConvergence { iterations: opts.max_iter, last_change: change })
}

fn normalize_sup(v: &mut [f64]) {
    let (mut big, mut sign) = (0.0, 1.0);
    for &a in v.iter() {
        if math::abs(a) > big {
            big = math::abs(a);
            sign = if a < 0.0 { -1.0 } else { 1.0 };
        }
    }
    if big > 0.0 {
        let s = sign / big;
        v.iter_mut().for_each(|a| *a *= s);
    }
}

fn finish(g: &DiscGrid, op: &DiscOperator, lambda: f64, mut phi: Vec<f64>, iterations: usize) -> Result<EigenPair> {
    let min = phi.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -1e-12 {
        return Err(Error::LostPositivity { time: 0.0, value: min });
    }
    phi.iter_mut().for_each(|v| *v = v.max(0.0));
    let mut lphi = vec![0.0; phi.len()];
    op.apply(&phi, &mut lphi);
    let residual = lphi.iter().zip(&phi).map(|(a, b)| math::abs(a - lambda * b)).fold(0.0, f64::max);
    let l2_norm = math::sqrt(phi.iter().map(|v| v * v).sum::<f64>()) * g.h();
    Ok(EigenPair { lambda, phi, residual, iterations, l2_norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::coefficients::{coefficients, Laplacian};
    use crate::spectral::trajectory::TrajectoryFamily;

    /// First zero of `J₀` from its power series, by bisection on `[2, 3]`.
    fn bessel_j0_zero() -> f64 {
        fn j0(x: f64) -> f64 {
            let q = -x * x / 4.0;
            let (mut term, mut sum) = (1.0, 1.0);
            for k in 1..60 {
                term *= q / (k as f64 * k as f64);
                sum += term;
            }
            sum
        }
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if j0(lo) * j0(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn bessel_oracle() {
        assert!((bessel_j0_zero() - 2.404825557695773).abs() < 1e-12);
    }

    #[test]
    fn banded_lu_solves() {
        let g = DiscGrid::new(1.0, 15).unwrap();
        let f = TrajectoryFamily::local_optimal(10.0, 3.0, 0.1).unwrap();
        let c = coefficients(&f, 4.0, 0.1);
        let op = DiscOperator::assemble(&g, &c, DriftScheme::Centered);
        let lu = op.factor().unwrap();
        let x: Vec<f64> = (0..op.len()).map(|k| 1.0 + (k % 7) as f64).collect();
        let mut b = vec![0.0; op.len()];
        op.apply(&x, &mut b);
        lu.solve(&mut b);
        for (a, e) in b.iter().zip(&x) {
            assert!((a - e).abs() < 1e-10);
        }
    }

    #[test]
    fn laplacian_converges_to_bessel() {
        let exact = bessel_j0_zero().powi(2);
        let mut errs = Vec::new();
        for &n in &[21, 41, 81] {
            let g = DiscGrid::new(1.0, n).unwrap();
            let ep = principal_eigenpair(&g, &Laplacian, EigenOptions::default()).unwrap();
            assert!(ep.residual < 1e-6 * ep.lambda);
            errs.push((ep.lambda - exact).abs());
        }
        assert!(errs[2] / exact < 1e-3);
        let r1 = errs[0] / errs[1];
        let r2 = errs[1] / errs[2];
        assert!(r1 > 3.0 && r1 < 5.0, "{r1}");
        assert!(r2 > 3.0 && r2 < 5.0, "{r2}");
    }

    #[test]
    fn scaling_in_radius() {
        let l1 = principal_eigenpair(&DiscGrid::new(1.0, 41).unwrap(), &Laplacian, EigenOptions::default())
            .unwrap()
            .lambda;
        let l3 = principal_eigenpair(&DiscGrid::new(3.0, 41).unwrap(), &Laplacian, EigenOptions::default())
            .unwrap()
            .lambda;
        assert!((l3 * 9.0 - l1).abs() < 1e-10 * l1);
    }

    #[test]
    fn monotone_in_radius() {
        let lam = |r: f64| {
            principal_eigenpair(&DiscGrid::new(r, 41).unwrap(), &Laplacian, EigenOptions::default())
                .unwrap()
                .lambda
        };
        let (a, b, c) = (lam(1.0), lam(2.0), lam(4.0));
        assert!(a > b && b > c);
    }

    #[test]
    fn laplacian_mode_is_symmetric() {
        let g = DiscGrid::new(1.0, 41).unwrap();
        let ep = principal_eigenpair(&g, &Laplacian, EigenOptions::default()).unwrap();
        let full = g.to_full(&ep.phi);
        let n = g.n;
        let at = |iy: usize, ie: usize| full[ie * n + iy];
        let mut worst: f64 = 0.0;
        for ie in 0..n {
            for iy in 0..n {
                let v = at(iy, ie);
                for w in [at(ie, iy), at(n - 1 - iy, ie), at(iy, n - 1 - ie), at(n - 1 - ie, n - 1 - iy)] {
                    worst = worst.max((v - w).abs());
                }
            }
        }
        assert!(worst < 1e-6, "{worst}");
        assert!(ep.phi.iter().all(|&v| v > 0.0));
        let max = ep.phi.iter().cloned().fold(0.0, f64::max);
        assert!((max - 1.0).abs() < 1e-15);
    }

    #[test]
    fn drift_schemes_agree_as_h_shrinks() {
        let f = TrajectoryFamily::local_optimal(20.0, 5.0, 0.1).unwrap();
        let c = coefficients(&f, 5.0, 0.1);
        let g = DiscGrid::new(2.0, 61).unwrap();
        let up = principal_eigenpair(&g, &c, EigenOptions::default()).unwrap();
        let opts = EigenOptions { scheme: DriftScheme::Centered, ..EigenOptions::default() };
        let ce = principal_eigenpair(&g, &c, opts).unwrap();
        assert!((up.lambda - ce.lambda).abs() < 1e-2 * ce.lambda);
    }

    #[test]
    fn nonpositive_diffusion_rejected() {
        struct Bad;
        impl OperatorCoefficients for Bad {
            fn drift(&self, _: f64, _: f64) -> f64 {
                0.0
            }
            fn diffusion(&self, _: f64, eta: f64) -> f64 {
                eta
            }
        }
        let g = DiscGrid::new(1.0, 11).unwrap();
        assert!(principal_eigenpair(&g, &Bad, EigenOptions::default()).is_err());
    }
}
