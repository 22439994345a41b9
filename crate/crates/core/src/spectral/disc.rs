//! Square node grids restricted to the disc `B_R` in the frame `(y, η)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// `n × n` nodes on `[−R, R]²`; the unknowns are the nodes strictly inside
/// the open disc. Nodes on or outside the circle carry the Dirichlet value 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscGrid {
    pub radius: f64,
    pub n: usize,
    /// Unknown number of node `(iy, ie)` at `ie * n + iy`, if interior.
    index: Vec<Option<usize>>,
    /// Interior nodes `(iy, ie)` in unknown order (η rows outer, y inner).
    nodes: Vec<(usize, usize)>,
}

/// Neighbour of an interior node along one axis direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Neighbour {
    /// Another unknown at distance `h`.
    Node(usize),
    /// The circle, at distance `dist ∈ (0, h]` along the grid line.
    Wall(f64),
}

impl DiscGrid {
    pub fn new(radius: f64, n: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain("disc radius must be positive"));
        }
        if n < 5 || n.is_multiple_of(2) {
            return Err(Error::InvalidGrid("disc grid needs an odd node count >= 5"));
        }
        let h = 2.0 * radius / (n - 1) as f64;
        // nodes within this distance of the circle are treated as on it
        let snap = 1e-9 * h;
        let mut index = vec![None; n * n];
        let mut nodes = Vec::new();
        for ie in 0..n {
            for iy in 0..n {
                let y = -radius + iy as f64 * h;
                let e = -radius + ie as f64 * h;
                if math::sqrt(y * y + e * e) < radius - snap {
                    index[ie * n + iy] = Some(nodes.len());
                    nodes.push((iy, ie));
                }
            }
        }
        Ok(DiscGrid { radius, n, index, nodes })
    }

    #[inline]
    pub fn h(&self) -> f64 {
        2.0 * self.radius / (self.n - 1) as f64
    }

    #[inline]
    pub fn coord(&self, k: usize) -> f64 {
        -self.radius + k as f64 * self.h()
    }

    /// Number of unknowns.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn unknown(&self, iy: usize, ie: usize) -> Option<usize> {
        self.index[ie * self.n + iy]
    }

    pub fn node(&self, k: usize) -> (usize, usize) {
        self.nodes[k]
    }

    /// `(y, η)` of unknown `k`.
    pub fn position(&self, k: usize) -> (f64, f64) {
        let (iy, ie) = self.nodes[k];
        (self.coord(iy), self.coord(ie))
    }

    pub fn is_interior(&self, iy: usize, ie: usize) -> bool {
        self.unknown(iy, ie).is_some()
    }

    /// Neighbours of unknown `k` as `[−y, +y, −η, +η]`.
    pub fn neighbours(&self, k: usize) -> [Neighbour; 4] {
        let (iy, ie) = self.nodes[k];
        let (y, e) = (self.coord(iy), self.coord(ie));
        let r2 = self.radius * self.radius;
        let h = self.h();
        // distance from the node to the circle along a grid line through it
        let wall_y = || math::sqrt((r2 - e * e).max(0.0));
        let wall_e = || math::sqrt((r2 - y * y).max(0.0));
        let pick = |other: Option<usize>, dist: f64| match other {
            Some(m) => Neighbour::Node(m),
            None => Neighbour::Wall(dist.clamp(1e-9 * h, h)),
        };
        [
            pick(if iy > 0 { self.unknown(iy - 1, ie) } else { None }, y + wall_y()),
            pick(if iy + 1 < self.n { self.unknown(iy + 1, ie) } else { None }, wall_y() - y),
            pick(if ie > 0 { self.unknown(iy, ie - 1) } else { None }, e + wall_e()),
            pick(if ie + 1 < self.n { self.unknown(iy, ie + 1) } else { None }, wall_e() - e),
        ]
    }

    /// Scatters unknown values onto the full `n × n` node array (zeros outside).
    pub fn to_full(&self, values: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.n * self.n];
        for (k, &(iy, ie)) in self.nodes.iter().enumerate() {
            full[ie * self.n + iy] = values[k];
        }
        full
    }

    /// Bilinear interpolation of a full node array at `(y, η)`; zero outside
    /// the square.
    pub fn interpolate(&self, full: &[f64], y: f64, eta: f64) -> f64 {
        let h = self.h();
        let fy = (y + self.radius) / h;
        let fe = (eta + self.radius) / h;
        let last = (self.n - 1) as f64;
        if !(fy >= 0.0 && fy <= last && fe >= 0.0 && fe <= last) {
            return 0.0;
        }
        let iy = (math::floor(fy) as usize).min(self.n - 2);
        let ie = (math::floor(fe) as usize).min(self.n - 2);
        let (sy, se) = (fy - iy as f64, fe - ie as f64);
        let at = |a: usize, b: usize| full[b * self.n + a];
        (1.0 - sy) * (1.0 - se) * at(iy, ie)
            + sy * (1.0 - se) * at(iy + 1, ie)
            + (1.0 - sy) * se * at(iy, ie + 1)
            + sy * se * at(iy + 1, ie + 1)
    }
}
