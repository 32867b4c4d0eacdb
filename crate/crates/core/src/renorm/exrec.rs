//! Extended rectangles: `M`x`M` blocks over one `T0` cycle, their fault
//! accounting with boundary truncation, and good/bad classification.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{LatticeState, ScheduleParams};
use crate::noise::{FaultEvent, FaultPath};
use crate::schedule::ScheduleStats;
use crate::structure::{cluster_count, singular_in_region, Region};

/// Exact cluster counting is attempted up to this many boxes.
pub const EXACT_CLUSTER_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ExRecId {
    pub level: u32,
    pub bi: usize,
    pub bj: usize,
    /// Cycle index: the exRec spans steps `[slice * T0, (slice + 1) * T0)`.
    pub slice: u64,
}

impl ExRecId {
    pub fn new(bi: usize, bj: usize, slice: u64) -> Self {
        ExRecId { level: 1, bi, bj, slice }
    }
}

/// Block tiling of an `n`x`n` torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tiling {
    pub n: usize,
    pub m: usize,
    pub t0: u64,
}

impl Tiling {
    pub fn new(n: usize, params: &ScheduleParams) -> Result<Self> {
        let m = params.m as usize;
        if m == 0 || n % m != 0 {
            return Err(Error::Config(format!("lattice size {n} is not tiled by blocks of {m}")));
        }
        Ok(Tiling { n, m, t0: params.t0 as u64 })
    }

    pub fn blocks(&self) -> usize {
        self.n / self.m
    }

    /// ExRec holding the site of `support[0]` at the event's step.
    pub fn owner(&self, ev: &FaultEvent) -> ExRecId {
        let s = ev.location.support[0];
        ExRecId::new(s.i / self.m, s.j / self.m, ev.location.time / self.t0)
    }

    /// ExRecs whose blocks hold any support site, owner first.
    pub fn touched(&self, ev: &FaultEvent) -> Vec<ExRecId> {
        let own = self.owner(ev);
        let mut out = vec![own];
        for s in &ev.location.support[1..] {
            let id = ExRecId::new(s.i / self.m, s.j / self.m, own.slice);
            if !out.contains(&id) {
                out.push(id);
            }
        }
        out
    }
}

/// `{self, north, east}`: the exRecs whose defects can reach `id` within
/// one cycle.
pub fn influence_neighborhood(id: ExRecId, params: &ScheduleParams, blocks: usize) -> Result<[ExRecId; 3]> {
    if params.m < params.t0 {
        return Err(Error::UnsupportedGeometry(format!(
            "influence neighborhood needs M >= T0 (M = {}, T0 = {})",
            params.m, params.t0
        )));
    }
    Ok([
        id,
        ExRecId { bi: (id.bi + 1) % blocks, ..id },
        ExRecId { bj: (id.bj + 1) % blocks, ..id },
    ])
}

/// Cluster counts of every block of `lat`, keyed by the slice starting at
/// `lat.global_time`.
pub fn block_health(lat: &LatticeState) -> Result<BTreeMap<ExRecId, usize>> {
    let tl = Tiling::new(lat.n, &lat.params)?;
    let slice = lat.global_time / tl.t0;
    let mut out = BTreeMap::new();
    for bi in 0..tl.blocks() {
        for bj in 0..tl.blocks() {
            let pts = singular_in_region(lat, lat.global_time, Region::block(bi, bj, tl.m));
            let h = cluster_count(&pts, EXACT_CLUSTER_CAP);
            if h > 0 {
                out.insert(ExRecId::new(bi, bj, slice), h);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepOrder {
    /// Reassign every location from the previous round's classification.
    Jacobi,
    /// Reassign one location at a time in path order, reclassifying after each.
    Sequential,
    /// As `Sequential`, in reverse path order.
    Reverse,
}

/// Assignment of each fault event to one exRec.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub owner: Vec<ExRecId>,
    pub rounds: usize,
    pub converged: bool,
}

struct Ledger<'a> {
    params: &'a ScheduleParams,
    health: &'a BTreeMap<ExRecId, usize>,
    counts: BTreeMap<ExRecId, usize>,
}

impl Ledger<'_> {
    fn is_direct_bad(&self, id: ExRecId) -> bool {
        let own = self.health.get(&id).copied().unwrap_or(0) + self.counts.get(&id).copied().unwrap_or(0);
        own > self.params.t_ec_s as usize
    }

    fn assign(&self, tl: &Tiling, ev: &FaultEvent) -> ExRecId {
        let touched = tl.touched(ev);
        let own = touched[0];
        if touched.len() > 1 && !self.is_direct_bad(own) {
            if let Some(&b) = touched[1..].iter().filter(|&&b| self.is_direct_bad(b)).min() {
                return b;
            }
        }
        own
    }

    fn bump(&mut self, id: ExRecId, up: bool) {
        let c = self.counts.entry(id).or_insert(0);
        if up {
            *c += 1;
        } else {
            *c -= 1;
        }
    }
}

const MAX_ROUNDS: usize = 256;

/// Assigns every fault to an exRec. A block-crossing fault whose geometric
/// owner is not directly bad is charged to a directly bad exRec it touches;
/// the rule is iterated until the assignment stops changing.
///
/// Judging the charge against neighborhood badness instead admits several
/// fixpoints that depend on the sweep order.
pub fn partition_exrecs(
    path: &FaultPath,
    health: &BTreeMap<ExRecId, usize>,
    params: &ScheduleParams,
    n: usize,
    order: SweepOrder,
) -> Result<Partition> {
    let tl = Tiling::new(n, params)?;
    influence_neighborhood(ExRecId::new(0, 0, 0), params, tl.blocks())?;
    let mut owner: Vec<ExRecId> = path.events.iter().map(|e| tl.owner(e)).collect();
    let mut ledger = Ledger { params, health, counts: BTreeMap::new() };
    for &o in &owner {
        ledger.bump(o, true);
    }
    let crossing: Vec<usize> = (0..owner.len()).filter(|&k| tl.touched(&path.events[k]).len() > 1).collect();
    for round in 1..=MAX_ROUNDS {
        let mut changed = false;
        match order {
            SweepOrder::Jacobi => {
                let next: Vec<(usize, ExRecId)> =
                    crossing.iter().map(|&k| (k, ledger.assign(&tl, &path.events[k]))).collect();
                for (k, id) in next {
                    if owner[k] != id {
                        ledger.bump(owner[k], false);
                        ledger.bump(id, true);
                        owner[k] = id;
                        changed = true;
                    }
                }
            }
            SweepOrder::Sequential | SweepOrder::Reverse => {
                let seq: Vec<usize> = if order == SweepOrder::Reverse {
                    crossing.iter().rev().copied().collect()
                } else {
                    crossing.clone()
                };
                for k in seq {
                    let id = ledger.assign(&tl, &path.events[k]);
                    if owner[k] != id {
                        ledger.bump(owner[k], false);
                        ledger.bump(id, true);
                        owner[k] = id;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return Ok(Partition { owner, rounds: round, converged: true });
        }
    }
    Ok(Partition { owner, rounds: MAX_ROUNDS, converged: false })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExRecReport {
    pub id: ExRecId,
    /// Largest initial cluster count over the influence neighborhood.
    pub h: usize,
    /// Faults assigned anywhere in the influence neighborhood.
    pub r: usize,
    pub good: bool,
    /// Own health plus own faults exceed `t_EC_S`, neighbors ignored.
    pub direct_bad: bool,
    /// Events charged here although their geometric owner is elsewhere.
    pub truncated_locations: Vec<usize>,
}

pub fn classify_exrec(
    id: ExRecId,
    partition: &Partition,
    path: &FaultPath,
    health: &BTreeMap<ExRecId, usize>,
    params: &ScheduleParams,
    n: usize,
) -> Result<ExRecReport> {
    let tl = Tiling::new(n, params)?;
    let nb = influence_neighborhood(id, params, tl.blocks())?;
    let hv = |x: &ExRecId| health.get(x).copied().unwrap_or(0);
    let count = |x: &ExRecId| partition.owner.iter().filter(|o| *o == x).count();
    let h = nb.iter().map(hv).max().unwrap_or(0);
    let r = nb.iter().map(count).sum();
    let t = params.t_ec_s as usize;
    let truncated_locations = (0..path.events.len())
        .filter(|&k| partition.owner[k] == id && tl.owner(&path.events[k]) != id)
        .collect();
    Ok(ExRecReport { id, h, r, good: h + r <= t, direct_bad: hv(&id) + count(&id) > t, truncated_locations })
}

/// Classifies every exRec of one slice in a single pass.
pub fn classify_slice(
    slice: u64,
    partition: &Partition,
    health: &BTreeMap<ExRecId, usize>,
    params: &ScheduleParams,
    n: usize,
) -> Result<Vec<ExRecReport>> {
    let tl = Tiling::new(n, params)?;
    let b = tl.blocks();
    let mut counts: BTreeMap<ExRecId, usize> = BTreeMap::new();
    for o in partition.owner.iter().filter(|o| o.slice == slice) {
        *counts.entry(*o).or_insert(0) += 1;
    }
    let t = params.t_ec_s as usize;
    let mut out = Vec::with_capacity(b * b);
    for bi in 0..b {
        for bj in 0..b {
            let id = ExRecId::new(bi, bj, slice);
            let nb = influence_neighborhood(id, params, b)?;
            let h = nb.iter().map(|x| health.get(x).copied().unwrap_or(0)).max().unwrap_or(0);
            let r: usize = nb.iter().map(|x| counts.get(x).copied().unwrap_or(0)).sum();
            let own = health.get(&id).copied().unwrap_or(0) + counts.get(&id).copied().unwrap_or(0);
            out.push(ExRecReport { id, h, r, good: h + r <= t, direct_bad: own > t, truncated_locations: vec![] });
        }
    }
    Ok(out)
}

/// Whether the exRec's block in `output` (the lattice at the end of its
/// cycle) holds at most `t_EC_S` clusters.
pub fn verify_good_correct(id: ExRecId, output: &LatticeState) -> Result<bool> {
    let tl = Tiling::new(output.n, &output.params)?;
    let pts = singular_in_region(output, output.global_time, Region::block(id.bi, id.bj, tl.m));
    Ok(cluster_count(&pts, EXACT_CLUSTER_CAP) <= output.params.t_ec_s as usize)
}

/// Largest per-block count of miscontrolled data locations over completed
/// macro-locations.
pub fn count_c_bound(stats: &ScheduleStats) -> u64 {
    stats.miscontrolled_max
}

/// Distinct exRecs touched by a fault path.
pub fn exrecs_in(path: &FaultPath, tl: &Tiling) -> BTreeSet<ExRecId> {
    path.events.iter().flat_map(|e| tl.touched(e)).collect()
}
