//! Singular sites, 3x3 cluster decomposition and h-health.
//!
//! Cluster routines work on planar points `(i, j)` with no wrap-around;
//! callers translate a lattice region into local coordinates first.

use serde::{Deserialize, Serialize};

use crate::lattice::{ideal_structure, LatticeState, Site};

pub type Point = (i64, i64);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cluster {
    pub sites: Vec<Point>,
    /// Lower-left corner of the covering 3x3 box.
    pub anchor: Point,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HealthReport {
    pub clusters: Vec<Cluster>,
    pub residual: Vec<Point>,
    pub h_value: usize,
    /// Sum over clusters of the larger side of each cluster's bounding box.
    pub extent: usize,
}

/// An axis-aligned lattice rectangle `[i0, i0 + rows) x [j0, j0 + cols)`, wrapped on the torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub i0: usize,
    pub j0: usize,
    pub rows: usize,
    pub cols: usize,
}

impl Region {
    pub fn block(bi: usize, bj: usize, m: usize) -> Self {
        Region { i0: bi * m, j0: bj * m, rows: m, cols: m }
    }
}

/// Sites whose structure registers differ from the codeword at `t`, row-major.
pub fn singular_sites(lat: &LatticeState, t: u64) -> Vec<Site> {
    (0..lat.len())
        .filter(|&k| {
            let s = lat.site(k);
            lat.structure(k) != ideal_structure(t, s.i, s.j, &lat.params)
        })
        .map(|k| lat.site(k))
        .collect()
}

/// Singular sites inside `region`, in region-local coordinates.
pub fn singular_in_region(lat: &LatticeState, t: u64, region: Region) -> Vec<Point> {
    let n = lat.n;
    let mut out = Vec::new();
    for di in 0..region.rows {
        for dj in 0..region.cols {
            let s = Site::new((region.i0 + di) % n, (region.j0 + dj) % n);
            let k = lat.idx(s);
            if lat.structure(k) != ideal_structure(t, s.i, s.j, &lat.params) {
                out.push((di as i64, dj as i64));
            }
        }
    }
    out
}

fn in_box(p: Point, a: Point) -> bool {
    p.0 >= a.0 && p.0 < a.0 + 3 && p.1 >= a.1 && p.1 < a.1 + 3
}

fn sorted_unique(sites: &[Point]) -> Vec<Point> {
    let mut v = sites.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Greedy row-major cover by 3x3 boxes.
///
/// The first uncovered site fixes the box's bottom row; of the three column
/// placements that contain it, the one covering the most uncovered sites wins
/// (leftmost on ties).
pub fn decompose_clusters(sites: &[Point]) -> HealthReport {
    let mut remaining = sorted_unique(sites);
    let mut clusters = Vec::new();
    while let Some(&first) = remaining.first() {
        let anchor = (0..3)
            .map(|d| (first.0, first.1 - 2 + d))
            .max_by_key(|&a| (remaining.iter().filter(|&&p| in_box(p, a)).count(), -a.1))
            .expect("three candidates");
        let (inside, rest): (Vec<Point>, Vec<Point>) = remaining.into_iter().partition(|&p| in_box(p, anchor));
        clusters.push(Cluster { sites: inside, anchor });
        remaining = rest;
    }
    let extent = clusters
        .iter()
        .map(|c| {
            let (lo_i, hi_i) = c.sites.iter().fold((i64::MAX, i64::MIN), |(a, b), p| (a.min(p.0), b.max(p.0)));
            let (lo_j, hi_j) = c.sites.iter().fold((i64::MAX, i64::MIN), |(a, b), p| (a.min(p.1), b.max(p.1)));
            ((hi_i - lo_i).max(hi_j - lo_j) + 1) as usize
        })
        .sum();
    HealthReport { h_value: clusters.len(), clusters, residual: Vec::new(), extent }
}

/// Exact minimum number of 3x3 boxes covering `sites`, or `None` when the
/// search would need more than `budget` boxes.
pub fn min_box_cover(sites: &[Point], budget: usize) -> Option<usize> {
    fn go(rem: &[Point], used: usize, best: &mut usize) {
        let Some(&first) = rem.first() else {
            *best = (*best).min(used);
            return;
        };
        if used + 1 >= *best {
            return;
        }
        for d in 0..3 {
            let a = (first.0, first.1 - 2 + d);
            let rest: Vec<Point> = rem.iter().copied().filter(|&p| !in_box(p, a)).collect();
            go(&rest, used + 1, best);
        }
    }
    let s = sorted_unique(sites);
    let mut best = decompose_clusters(&s).h_value.min(budget + 1);
    go(&s, 0, &mut best);
    (best <= budget).then_some(best)
}

/// Cluster count: exact when it is at most `exact_cap`, greedy otherwise.
pub fn cluster_count(sites: &[Point], exact_cap: usize) -> usize {
    let greedy = decompose_clusters(sites).h_value;
    if greedy <= 1 {
        return greedy;
    }
    min_box_cover(sites, exact_cap.min(greedy)).unwrap_or(greedy)
}

/// Whether `region` holds at most `h` clusters at reference time `t`.
pub fn is_h_healthy(region: Region, lat: &LatticeState, t: u64, h: usize) -> bool {
    let report = decompose_clusters(&singular_in_region(lat, t, region));
    report.h_value <= h && report.extent <= 3 * h
}
