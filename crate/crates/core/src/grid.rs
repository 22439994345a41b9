//! Node-centred rectangular grids on `(x, θ)` and the fields that live on them.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Uniform node-centred discretisation of `[x_min, x_max] × [θ̲, θ_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub nx: usize,
    pub ntheta: usize,
    pub dt: f64,
}

impl GridSpec {
    pub fn new(
        x_min: f64,
        x_max: f64,
        theta_min: f64,
        theta_max: f64,
        nx: usize,
        ntheta: usize,
        dt: f64,
    ) -> Result<Self> {
        let g = GridSpec { x_min, x_max, theta_min, theta_max, nx, ntheta, dt };
        g.validate()?;
        Ok(g)
    }

    /// Builds a grid from mesh widths rather than node counts. The upper
    /// bounds are stretched to the next whole cell.
    pub fn with_spacing(
        x_min: f64,
        x_max: f64,
        hx: f64,
        theta_min: f64,
        theta_max: f64,
        htheta: f64,
        dt: f64,
    ) -> Result<Self> {
        if !(hx > 0.0 && htheta > 0.0) {
            return Err(Error::InvalidGrid("mesh widths must be positive"));
        }
        let cx = math::ceil((x_max - x_min) / hx - 1e-9).max(2.0) as usize;
        let ct = math::ceil((theta_max - theta_min) / htheta - 1e-9).max(2.0) as usize;
        Self::new(
            x_min,
            x_min + cx as f64 * hx,
            theta_min,
            theta_min + ct as f64 * htheta,
            cx + 1,
            ct + 1,
            dt,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.theta_min, self.theta_max, self.dt]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidGrid("non-finite bound"));
        }
        if !(self.theta_min > 0.0) {
            return Err(Error::InvalidGrid("theta_min must be positive"));
        }
        if !(self.theta_max > self.theta_min) {
            return Err(Error::InvalidGrid("theta_max must exceed theta_min"));
        }
        if !(self.x_max > self.x_min) {
            return Err(Error::InvalidGrid("x_max must exceed x_min"));
        }
        if self.nx < 3 || self.ntheta < 3 {
            return Err(Error::InvalidGrid("need at least 3 nodes per axis"));
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidGrid("dt must be positive"));
        }
        Ok(())
    }

    #[inline]
    pub fn hx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    #[inline]
    pub fn htheta(&self) -> f64 {
        (self.theta_max - self.theta_min) / (self.ntheta - 1) as f64
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.hx()
    }

    #[inline]
    pub fn theta(&self, j: usize) -> f64 {
        self.theta_min + j as f64 * self.htheta()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ntheta
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat index of node `(i, j)`; storage is x-major.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ntheta + j
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.nx).map(move |i| self.x(i))
    }

    pub fn thetas(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.ntheta).map(move |j| self.theta(j))
    }

    /// Same spatial box with a different time step.
    pub fn with_dt(&self, dt: f64) -> Result<Self> {
        Self::new(self.x_min, self.x_max, self.theta_min, self.theta_max, self.nx, self.ntheta, dt)
    }
}

/// One time slice of a scalar density on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub time: f64,
}

impl Field {
    pub fn zeros(grid: GridSpec) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: GridSpec, value: f64) -> Self {
        Field { grid, values: vec![value; grid.len()], time: 0.0 }
    }

    /// Samples `f(x, θ)` at every node.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.nx {
            let x = grid.x(i);
            for j in 0..grid.ntheta {
                values.push(f(x, grid.theta(j)));
            }
        }
        Field { grid, values, time: 0.0 }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.grid.index(i, j);
        self.values[k] = v;
    }

    /// The θ-column at spatial node `i`.
    #[inline]
    pub fn column(&self, i: usize) -> &[f64] {
        let n = self.grid.ntheta;
        &self.values[i * n..(i + 1) * n]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Maximum over θ of each column.
    pub fn column_max(&self) -> Vec<f64> {
        (0..self.grid.nx)
            .map(|i| self.column(i).iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .collect()
    }

    /// `∫∫ f dx dθ` by the tensor trapezoid rule.
    pub fn mass(&self) -> f64 {
        let rho = integrate_theta(self);
        trapezoid(&rho.values, self.grid.hx())
    }
}

/// Spatial profile `ρ(t, x)` of a [`Field`].
#[derive(Debug, Clone, PartialEq)]
pub struct RhoProfile {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub time: f64,
}

impl RhoProfile {
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Trapezoid rule for equally spaced samples.
pub fn trapezoid(samples: &[f64], h: f64) -> f64 {
    match samples.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = samples[1..n - 1].iter().sum();
            h * (inner + 0.5 * (samples[0] + samples[n - 1]))
        }
    }
}

/// Column-wise trapezoid integral over `[θ̲, θ_max]`.
pub fn integrate_theta(f: &Field) -> RhoProfile {
    let h = f.grid.htheta();
    let values = (0..f.grid.nx).map(|i| trapezoid(f.column(i), h)).collect();
    RhoProfile { grid: f.grid, values, time: f.time }
}

/// Largest nodewise absolute difference between two fields on the same grid.
pub fn linf_distance(a: &Field, b: &Field) -> Result<f64> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    Ok(a
        .values
        .iter()
        .zip(&b.values)
        .map(|(p, q)| math::abs(p - q))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(t0: f64, t1: f64, nt: usize) -> GridSpec {
        GridSpec::new(-1.0, 1.0, t0, t1, 5, nt, 0.1).unwrap()
    }

    #[test]
    fn zero_integrand() {
        let f = Field::zeros(grid(1.0, 5.0, 9));
        assert!(integrate_theta(&f).values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_integrand_is_exact() {
        let f = Field::constant(grid(1.0, 5.0, 9), 1.0);
        for v in integrate_theta(&f).values {
            assert!((v - 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn linear_in_theta_three_nodes() {
        let g = grid(1.0, 3.0, 3);
        let f = Field::from_fn(g, |_, th| th);
        for v in integrate_theta(&f).values {
            assert!((v - 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn linf_examples() {
        let g = grid(1.0, 5.0, 9);
        let one = Field::constant(g, 1.0);
        assert_eq!(linf_distance(&one, &one).unwrap(), 0.0);
        assert_eq!(linf_distance(&one, &Field::zeros(g)).unwrap(), 1.0);
        assert_eq!(linf_distance(&Field::constant(g, 2.0), &Field::constant(g, -1.0)).unwrap(), 3.0);
    }

    #[test]
    fn linf_rejects_mismatched_grids() {
        let a = Field::zeros(grid(1.0, 5.0, 9));
        let b = Field::zeros(grid(1.0, 5.0, 7));
        assert_eq!(linf_distance(&a, &b), Err(Error::GridMismatch));
    }

    #[test]
    fn grid_invariants() {
        assert!(GridSpec::new(0.0, 1.0, 0.0, 1.0, 3, 3, 0.1).is_err());
        assert!(GridSpec::new(0.0, 1.0, 1.0, 1.0, 3, 3, 0.1).is_err());
        assert!(GridSpec::new(1.0, 1.0, 1.0, 2.0, 3, 3, 0.1).is_err());
        assert!(GridSpec::new(0.0, 1.0, 1.0, 2.0, 2, 3, 0.1).is_err());
        assert!(GridSpec::new(0.0, 1.0, 1.0, 2.0, 3, 3, 0.0).is_err());
        let g = GridSpec::with_spacing(-2.0, 3.0, 0.5, 1.0, 2.0, 0.25, 0.1).unwrap();
        assert_eq!(g.nx, 11);
        assert_eq!(g.ntheta, 5);
        assert!((g.hx() - 0.5).abs() < 1e-15);
    }

    fn field_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        let n = 5 * 7;
        (
            proptest::collection::vec(-10.0..10.0f64, n),
            proptest::collection::vec(-10.0..10.0f64, n),
        )
    }

    proptest! {
        #[test]
        fn integrate_is_linear((a, b) in field_strategy(), alpha in -3.0..3.0f64, beta in -3.0..3.0f64) {
            let g = grid(1.0, 4.0, 7);
            let fa = Field { grid: g, values: a, time: 0.0 };
            let fb = Field { grid: g, values: b, time: 0.0 };
            let comb = Field {
                grid: g,
                values: fa.values.iter().zip(&fb.values).map(|(p, q)| alpha * p + beta * q).collect(),
                time: 0.0,
            };
            let ra = integrate_theta(&fa);
            let rb = integrate_theta(&fb);
            let rc = integrate_theta(&comb);
            for k in 0..g.nx {
                let expect = alpha * ra.values[k] + beta * rb.values[k];
                prop_assert!((rc.values[k] - expect).abs() <= 1e-12 * (1.0 + expect.abs()));
            }
        }

        #[test]
        fn integrate_is_monotone((a, d) in field_strategy()) {
            let g = grid(1.0, 4.0, 7);
            let fa = Field { grid: g, values: a.clone(), time: 0.0 };
            let fb = Field {
                grid: g,
                values: a.iter().zip(&d).map(|(p, q)| p + q.abs()).collect(),
                time: 0.0,
            };
            let ra = integrate_theta(&fa);
            let rb = integrate_theta(&fb);
            for k in 0..g.nx {
                prop_assert!(ra.values[k] <= rb.values[k] + 1e-12);
            }
        }
    }
}
