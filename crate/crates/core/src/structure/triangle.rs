//! Triangles `{i >= -a, j >= -b, i + j <= c}`, the triangle norm of a point
//! set and the erosion check for noiseless Toom dynamics.
//!
//! Covers must be *separated*: no two triangles may contain sites at
//! Chebyshev distance 1, otherwise the union would not erode independently.

use serde::{Deserialize, Serialize};

use super::clusters::Point;
use super::toom::toom_step;
use crate::error::{Error, Result};
use crate::lattice::Site;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triangle {
    pub anchor: Point,
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl Triangle {
    pub const fn new(anchor: Point, a: i64, b: i64, c: i64) -> Self {
        Triangle { anchor, a, b, c }
    }

    pub fn norm(&self) -> i64 {
        self.a + self.b + self.c
    }

    pub fn is_empty(&self) -> bool {
        self.norm() < 0
    }

    /// The triangle after `s` erosion steps.
    pub fn eroded(&self, s: i64) -> Triangle {
        Triangle { c: self.c - s, ..*self }
    }

    fn contains_rel(&self, di: i64, dj: i64) -> bool {
        di >= -self.a && dj >= -self.b && di + dj <= self.c
    }

    pub fn contains(&self, p: Point) -> bool {
        self.contains_rel(p.0 - self.anchor.0, p.1 - self.anchor.1)
    }

    /// Containment on an `n`-torus, taking the displacement in `[-n/2, n/2)`.
    pub fn contains_on_torus(&self, p: Point, n: i64) -> bool {
        let wrap = |d: i64| (d + n / 2).rem_euclid(n) - n / 2;
        self.contains_rel(wrap(p.0 - self.anchor.0), wrap(p.1 - self.anchor.1))
    }

    /// Sites of the triangle, row-major.
    pub fn sites(&self) -> Vec<Point> {
        let mut out = Vec::new();
        if self.is_empty() {
            return out;
        }
        for di in -self.a..=self.c + self.b {
            for dj in -self.b..=self.c - di {
                out.push((self.anchor.0 + di, self.anchor.1 + dj));
            }
        }
        out
    }

    /// Smallest triangle containing every point; `None` for an empty set.
    pub fn bounding(points: &[Point]) -> Option<Triangle> {
        let i0 = points.iter().map(|p| p.0).min()?;
        let j0 = points.iter().map(|p| p.1).min()?;
        let s = points.iter().map(|p| p.0 + p.1).max()?;
        Some(Triangle::new((i0, j0), 0, 0, s - i0 - j0))
    }

    /// Whether some site of `other` lies within Chebyshev distance 1 of `self`.
    pub fn touches(&self, other: &Triangle) -> bool {
        if self.is_empty() || other.is_empty() {
            return false;
        }
        other.sites().into_iter().any(|p| {
            let di = p.0 - self.anchor.0;
            let dj = p.1 - self.anchor.1;
            di >= -self.a - 1
                && dj >= -self.b - 1
                && di + dj <= self.c + 2
                && di <= self.c + self.b + 1
                && dj <= self.c + self.a + 1
        })
    }
}

/// Result of [`triangle_norm`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleCover {
    pub norm: i64,
    pub triangles: Vec<Triangle>,
    /// False when the search was skipped and `norm` is only an upper bound.
    pub exact: bool,
}

pub const DEFAULT_SITE_CAP: usize = 32;
const GROUP_CAP: usize = 10;

fn components(points: &[Point]) -> Vec<Vec<Point>> {
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    let mut parent: Vec<usize> = (0..pts.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            if (pts[a].0 - pts[b].0).abs() <= 1 && (pts[a].1 - pts[b].1).abs() <= 1 {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<Point>> = Default::default();
    for k in 0..pts.len() {
        let r = find(&mut parent, k);
        groups.entry(r).or_default().push(pts[k]);
    }
    groups.into_values().collect()
}

/// Merges groups until their bounding triangles are pairwise separated.
fn close(mut groups: Vec<Vec<Point>>) -> Vec<(Vec<Point>, Triangle)> {
    loop {
        let tris: Vec<Triangle> = groups.iter().map(|g| Triangle::bounding(g).expect("nonempty")).collect();
        let hit = (0..groups.len())
            .flat_map(|a| (a + 1..groups.len()).map(move |b| (a, b)))
            .find(|&(a, b)| tris[a].touches(&tris[b]) || tris[b].touches(&tris[a]));
        match hit {
            Some((a, b)) => {
                let g = groups.swap_remove(b);
                groups[a].extend(g);
            }
            None => return groups.into_iter().zip(tris).collect(),
        }
    }
}

fn cost(closed: &[(Vec<Point>, Triangle)]) -> i64 {
    closed.iter().map(|(_, t)| t.norm()).sum()
}

/// Minimal total norm over separated triangle covers of `points`.
///
/// Exact for at most `site_cap` sites whose connected pieces number at most
/// ten; otherwise the cost of the finest separated cover is returned with
/// `exact = false`.
pub fn triangle_norm(points: &[Point], site_cap: usize) -> TriangleCover {
    if points.is_empty() {
        return TriangleCover { norm: 0, triangles: Vec::new(), exact: true };
    }
    let comps = components(points);
    let finest = close(comps.clone());
    let mut best = (cost(&finest), finest.iter().map(|(_, t)| *t).collect::<Vec<_>>());
    let n_sites: usize = comps.iter().map(Vec::len).sum();
    if n_sites > site_cap || comps.len() > GROUP_CAP {
        return TriangleCover { norm: best.0, triangles: best.1, exact: false };
    }
    // Enumerate set partitions of the components (restricted growth strings).
    let k = comps.len();
    let mut labels = vec![0usize; k];
    fn rec(
        pos: usize,
        max_label: usize,
        labels: &mut Vec<usize>,
        comps: &[Vec<Point>],
        best: &mut (i64, Vec<Triangle>),
    ) {
        if pos == comps.len() {
            let mut groups = vec![Vec::new(); max_label + 1];
            for (c, &l) in comps.iter().zip(labels.iter()) {
                groups[l].extend_from_slice(c);
            }
            let closed = close(groups);
            let c = cost(&closed);
            if c < best.0 {
                *best = (c, closed.into_iter().map(|(_, t)| t).collect());
            }
            return;
        }
        for l in 0..=max_label + 1 {
            labels[pos] = l;
            rec(pos + 1, max_label.max(l), labels, comps, best);
        }
    }
    labels[0] = 0;
    rec(1, 0, &mut labels, &comps, &mut best);
    TriangleCover { norm: best.0, triangles: best.1, exact: true }
}

/// Runs `steps` noiseless Toom steps from the error set `sites` on an
/// `n`-torus and checks, after every step `k`, that all errors lie in the
/// cover with each `c` reduced by `k`.
///
/// Errors when the initial sites are not inside the cover.
pub fn erosion_check(sites: &[Site], cover: &[Triangle], steps: usize, n: usize) -> Result<bool> {
    let ni = n as i64;
    let inside = |p: Point, k: i64| cover.iter().any(|t| t.eroded(k).contains_on_torus(p, ni));
    let pt = |s: &Site| (s.i as i64, s.j as i64);
    if let Some(s) = sites.iter().find(|s| !inside(pt(s), 0)) {
        return Err(Error::Config(format!("site ({}, {}) lies outside the cover", s.i, s.j)));
    }
    let mut field = vec![0u8; n * n];
    for s in sites {
        field[s.i * n + s.j] = 1;
    }
    for k in 1..=steps {
        field = toom_step(&field, n);
        for (idx, _) in field.iter().enumerate().filter(|(_, &v)| v == 1) {
            if !inside(((idx / n) as i64, (idx % n) as i64), k as i64) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_examples() {
        assert_eq!(triangle_norm(&[(4, 4)], DEFAULT_SITE_CAP).norm, 0);
        let d = Triangle::new((0, 0), 1, 1, 1).sites();
        assert_eq!(d.len(), 10);
        let cov = triangle_norm(&d, DEFAULT_SITE_CAP);
        assert_eq!(cov.norm, 3);
        assert!(cov.exact);
        assert_eq!(triangle_norm(&[(0, 0), (0, 10)], DEFAULT_SITE_CAP).norm, 0);
    }

    #[test]
    fn full_box_has_norm_four() {
        let b: Vec<Point> = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).collect();
        assert_eq!(triangle_norm(&b, DEFAULT_SITE_CAP).norm, 4);
    }

    #[test]
    fn diagonal_neighbors_must_share_a_triangle() {
        // (1,0) and (0,1) would seed a new error at (0,0) if covered apart.
        let cov = triangle_norm(&[(1, 0), (0, 1)], DEFAULT_SITE_CAP);
        assert_eq!(cov.norm, 1);
        assert_eq!(cov.triangles.len(), 1);
    }

    #[test]
    fn bounding_triangle_contains_its_points() {
        let pts = [(3, 7), (5, 2), (4, 4)];
        let t = Triangle::bounding(&pts).unwrap();
        assert!(pts.iter().all(|&p| t.contains(p)));
        assert_eq!(t.norm(), 10 - 3 - 2);
    }

    #[test]
    fn erosion_examples() {
        let t = Triangle::new((10, 10), 2, 2, 4);
        let sites: Vec<Site> = t.sites().into_iter().map(|(i, j)| Site::new(i as usize, j as usize)).collect();
        assert!(erosion_check(&sites, &[t], 1, 32).unwrap());
        // Running for the full norm leaves nothing behind.
        assert!(erosion_check(&sites, &[t], t.norm() as usize + 1, 32).unwrap());
        let mut field = vec![0u8; 32 * 32];
        for s in &sites {
            field[s.i * 32 + s.j] = 1;
        }
        for _ in 0..=t.norm() {
            field = toom_step(&field, 32);
        }
        assert!(field.iter().all(|&v| v == 0));
        assert!(erosion_check(&[], &[t], 5, 32).unwrap());
    }

    #[test]
    fn outside_cover_is_rejected() {
        let t = Triangle::new((10, 10), 0, 0, 0);
        assert!(erosion_check(&[Site::new(3, 3)], &[t], 1, 32).is_err());
    }
}
