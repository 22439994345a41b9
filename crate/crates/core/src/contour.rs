//! Marching squares on a [`Field`].

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::grid::Field;

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    /// `(x, θ)` vertices.
    pub points: Vec<(f64, f64)>,
    pub closed: bool,
}

impl Polyline {
    pub fn max_x(&self) -> f64 {
        self.points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Edge key: `2·node` for the edge towards `+x`, `2·node + 1` towards `+θ`.
type EdgeKey = usize;

/// Level curves `{f = level}` joined into polylines. Saddle cells are
/// resolved with the cell-centre average.
pub fn contour_lines(f: &Field, level: f64) -> Vec<Polyline> {
    let g = &f.grid;
    let (nx, nt) = (g.nx, g.ntheta);
    let above = |i: usize, j: usize| f.get(i, j) > level;
    let node = |i: usize, j: usize| i * nt + j;

    let mut points: BTreeMap<EdgeKey, (f64, f64)> = BTreeMap::new();
    let mut crossing = |key: EdgeKey, (ia, ja): (usize, usize), (ib, jb): (usize, usize)| {
        points.entry(key).or_insert_with(|| {
            let (va, vb) = (f.get(ia, ja), f.get(ib, jb));
            let s = (level - va) / (vb - va);
            let (xa, ta) = (g.x(ia), g.theta(ja));
            let (xb, tb) = (g.x(ib), g.theta(jb));
            (xa + s * (xb - xa), ta + s * (tb - ta))
        });
        key
    };

    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for i in 0..nx - 1 {
        for j in 0..nt - 1 {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let up = corners.map(|(a, b)| above(a, b));
            let edges = [
                (2 * node(i, j), corners[0], corners[1]),
                (2 * node(i + 1, j) + 1, corners[1], corners[2]),
                (2 * node(i, j + 1), corners[3], corners[2]),
                (2 * node(i, j) + 1, corners[0], corners[3]),
            ];
            let cut: Vec<usize> = (0..4).filter(|&e| up[e] != up[(e + 1) % 4]).collect();
            let mut key = |e: usize| crossing(edges[e].0, edges[e].1, edges[e].2);
            match cut.len() {
                2 => segments.push((key(cut[0]), key(cut[1]))),
                4 => {
                    let centre = corners.iter().map(|&(a, b)| f.get(a, b)).sum::<f64>() / 4.0 > level;
                    // corners on the opposite side of the centre get cut off
                    for k in 0..4 {
                        if up[k] != centre {
                            segments.push((key((k + 3) % 4), key(k)));
                        }
                    }
                }
                _ => {}
            }
        }
    }
    chain(&segments, &points)
}

fn chain(segments: &[(EdgeKey, EdgeKey)], points: &BTreeMap<EdgeKey, (f64, f64)>) -> Vec<Polyline> {
    let mut adj: BTreeMap<EdgeKey, Vec<usize>> = BTreeMap::new();
    for (s, &(a, b)) in segments.iter().enumerate() {
        adj.entry(a).or_default().push(s);
        adj.entry(b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    let walk = |start: EdgeKey, used: &mut Vec<bool>| {
        let mut keys = vec![start];
        let mut at = start;
        loop {
            let next = adj[&at].iter().copied().find(|&s| !used[s]);
            let Some(s) = next else { break };
            used[s] = true;
            let (a, b) = segments[s];
            at = if a == at { b } else { a };
            keys.push(at);
        }
        keys
    };
    // open chains start at a point that belongs to one segment only
    let starts: Vec<EdgeKey> = adj.iter().filter(|(_, v)| v.len() == 1).map(|(&k, _)| k).collect();
    for k in starts {
        if adj[&k].iter().all(|&s| used[s]) {
            continue;
        }
        let keys = walk(k, &mut used);
        out.push(Polyline { points: keys.iter().map(|k| points[k]).collect(), closed: false });
    }
    for s in 0..segments.len() {
        if !used[s] {
            let keys = walk(segments[s].0, &mut used);
            let closed = keys.first() == keys.last();
            out.push(Polyline { points: keys.iter().map(|k| points[k]).collect(), closed });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn grid() -> GridSpec {
        GridSpec::new(-2.0, 2.0, 1.0, 5.0, 41, 41, 0.1).unwrap()
    }

    #[test]
    fn constant_has_no_contours() {
        assert!(contour_lines(&Field::constant(grid(), 1.0), 0.5).is_empty());
        assert!(contour_lines(&Field::constant(grid(), 0.5), 0.5).is_empty());
    }

    #[test]
    fn radial_bump_gives_one_circle() {
        let f = Field::from_fn(grid(), |x, th| (-(x * x) - (th - 3.0) * (th - 3.0)).exp());
        let lines = contour_lines(&f, (-1.0f64).exp());
        assert_eq!(lines.len(), 1);
        assert!(lines[0].closed);
        for &(x, th) in &lines[0].points {
            let r = (x * x + (th - 3.0) * (th - 3.0)).sqrt();
            assert!((r - 1.0).abs() < 0.01);
        }
        assert!((lines[0].max_x() - 1.0).abs() < 0.01);
    }

    #[test]
    fn half_plane_gives_open_line() {
        let f = Field::from_fn(grid(), |x, _| x);
        let lines = contour_lines(&f, 0.3);
        assert_eq!(lines.len(), 1);
        assert!(!lines[0].closed);
        assert_eq!(lines[0].points.len(), 41);
        assert!(lines[0].points.iter().all(|p| (p.0 - 0.3).abs() < 1e-12));
    }

    #[test]
    fn deterministic() {
        let f = Field::from_fn(grid(), |x, th| (3.0 * x).sin() * (2.0 * th).cos());
        assert_eq!(contour_lines(&f, 0.1), contour_lines(&f, 0.1));
    }
}
