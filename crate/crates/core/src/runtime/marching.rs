//! Marching-soldier asynchrony: a site may update only while its counter is
//! a weak local minimum, so neighboring counters never differ by more than
//! one and every update can read its neighbors at the matching slice.
//!
//! Each site keeps its current registers and the previous slice; this
//! two-deep history is all the rule needs. Full per-slice history is
//! optional and only used to compare slices against synchronous runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{neighbor, DataState, Dir, LatticeState, Site, StructureState};
use crate::noise::{apply_fault, derive_seed, FaultPath, KeyedRng, NoiseMode, NoiseParams};
use crate::schedule::{site_faults, Neighborhood, SiteRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    CorrectionAttempt,
    NoiseJump,
}

/// One scheduler event; `t` is the event time in continuous mode and the
/// sequence index otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsyncEvent {
    pub t: f64,
    pub site: usize,
    pub kind: EventKind,
    pub accepted: bool,
}

impl AsyncEvent {
    /// `t site kind accepted`
    pub fn to_line(&self) -> String {
        let kind = match self.kind {
            EventKind::CorrectionAttempt => "attempt",
            EventKind::NoiseJump => "noise",
        };
        format!("{} {} {} {}", self.t, self.site, kind, self.accepted as u8)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsyncStats {
    pub attempts: u64,
    pub accepted: u64,
    pub rejected: u64,
    /// Largest neighbor counter difference seen after any event.
    pub max_gap: u64,
    pub gap_violations: u64,
}

/// Lattice under asynchronous updates. `cur.counter` holds the per-site
/// update counters; slice `c` is the synchronous time `base + c`.
#[derive(Debug, Clone)]
pub struct AsyncLattice {
    pub cur: LatticeState,
    prev: LatticeState,
    history: Option<Vec<Vec<(StructureState, DataState)>>>,
    base: u64,
    pub stats: AsyncStats,
}

impl AsyncLattice {
    /// Starts from a lattice whose counters are all equal.
    pub fn new(lat: LatticeState, keep_history: bool) -> Result<Self> {
        let c0 = lat.counter.first().copied().unwrap_or(0);
        if lat.counter.iter().any(|&c| c != c0) {
            return Err(Error::Invariant("asynchronous start needs equal counters".into()));
        }
        let base = lat.global_time.checked_sub(c0).unwrap_or(0);
        let history = keep_history.then(|| (0..lat.len()).map(|k| vec![(lat.structure(k), lat.data.get(k))]).collect());
        Ok(AsyncLattice { prev: lat.clone(), cur: lat, history, base, stats: AsyncStats::default() })
    }

    pub fn counter(&self, k: usize) -> u64 {
        self.cur.counter[k]
    }

    pub fn min_counter(&self) -> u64 {
        self.cur.counter.iter().copied().min().unwrap_or(0)
    }

    pub fn is_local_min(&self, k: usize) -> bool {
        let c = self.cur.counter[k];
        Dir::ALL.iter().all(|&d| c <= self.cur.counter[self.cur.neighbor_idx(k, d)])
    }

    /// Registers of site `j` at slice `c`, from the two-deep history.
    fn at_slice(&self, j: usize, c: u64) -> Result<(StructureState, DataState)> {
        let cj = self.cur.counter[j];
        if cj == c {
            Ok((self.cur.structure(j), self.cur.data.get(j)))
        } else if cj == c + 1 {
            Ok((self.prev.structure(j), self.prev.data.get(j)))
        } else {
            Err(Error::Invariant(format!("site {j} at counter {cj} cannot serve slice {c}")))
        }
    }

    /// One correction attempt at site `k`; returns whether it was accepted.
    pub fn attempt(
        &mut self,
        k: usize,
        rule: &SiteRule,
        noise: &NoiseParams,
        rng: &KeyedRng,
        path: &mut FaultPath,
    ) -> Result<bool> {
        self.stats.attempts += 1;
        if !self.is_local_min(k) {
            self.stats.rejected += 1;
            return Ok(false);
        }
        let n = self.cur.n;
        let c = self.cur.counter[k];
        let kn = self.cur.neighbor_idx(k, Dir::N);
        let ke = self.cur.neighbor_idx(k, Dir::E);
        let (sc, dc) = (self.cur.structure(k), self.cur.data.get(k));
        let (sn, dn) = self.at_slice(kn, c)?;
        let (se, de) = self.at_slice(ke, c)?;
        let out = rule.update(&Neighborhood { c: sc, n: sn, e: se, dc, dn, de });
        self.prev.set_structure(k, sc);
        self.prev.data.set(k, dc)?;
        self.cur.set_structure(k, out.structure);
        self.cur.data.set(k, out.data)?;
        self.cur.counter[k] = c + 1;

        let t = self.base + c;
        let site = self.cur.site(k);
        let partners: Vec<Site> = out.selected.partners().iter().map(|&d| neighbor(site, d, n)).collect();
        let (fs, fd) = site_faults(t, k, site, n, &partners, rule, noise, rng, self.cur.data.rule());
        let mut evs: Vec<_> = fs.into_iter().chain(fd).collect();
        if let NoiseMode::Adversarial(list) = &noise.mode {
            evs.extend(list.iter().filter(|e| e.location.time == t && e.location.support.first() == Some(&site)).cloned());
        }
        for ev in evs {
            if ev.touched().iter().any(|&i| i != 0) {
                return Err(Error::UnsupportedGeometry(
                    "asynchronous runs accept only faults on the updating site".into(),
                ));
            }
            apply_fault(&mut self.cur, &ev)?;
            path.events.push(ev);
        }
        if let Some(h) = self.history.as_mut() {
            h[k].push((self.cur.structure(k), self.cur.data.get(k)));
        }
        for d in Dir::ALL {
            let cj = self.cur.counter[self.cur.neighbor_idx(k, d)];
            let gap = (c + 1).abs_diff(cj);
            self.stats.max_gap = self.stats.max_gap.max(gap);
            self.stats.gap_violations += (gap > 1) as u64;
        }
        self.stats.accepted += 1;
        Ok(true)
    }

    /// Overwrites the current registers of `k` (a noise jump outside the
    /// keyed fault model).
    pub(crate) fn cur_mut(&mut self) -> &mut LatticeState {
        &mut self.cur
    }

    /// The lattice at slice `c`, if every site has reached it and the
    /// history still holds it.
    pub fn slice(&self, c: u64) -> Option<LatticeState> {
        let mut out = self.cur.clone();
        for k in 0..out.len() {
            let ck = self.cur.counter[k];
            let (s, d) = if ck < c {
                return None;
            } else if let Some(h) = &self.history {
                let first = ck + 1 - h[k].len() as u64;
                *h[k].get(c.checked_sub(first)? as usize)?
            } else {
                self.at_slice(k, c).ok()?
            };
            out.set_structure(k, s);
            out.data.set(k, d).ok()?;
            out.counter[k] = c;
        }
        out.global_time = self.base + c;
        Some(out)
    }

    pub fn local_min_fraction(&self) -> f64 {
        local_min_fraction(&self.cur.counter, self.cur.n)
    }
}

/// Fraction of sites whose counter is a weak minimum among its four neighbors.
pub fn local_min_fraction(counter: &[u64], n: usize) -> f64 {
    let len = n * n;
    let hits = (0..len)
        .filter(|&k| {
            let s = Site::new(k / n, k % n);
            Dir::ALL.iter().all(|&d| {
                let t = neighbor(s, d, n);
                counter[k] <= counter[t.i * n + t.j]
            })
        })
        .count();
    hits as f64 / len as f64
}

#[derive(Debug, Clone)]
pub struct AsyncTrajectory {
    pub lattice: AsyncLattice,
    /// Accepted updates as `(site, counter before the update)`.
    pub accepted: Vec<(usize, u64)>,
    pub events: Option<Vec<AsyncEvent>>,
    pub path: FaultPath,
    /// `(event index, local-minimum fraction)` every `sample_every` events.
    pub density: Vec<(u64, f64)>,
}

/// `n_events` uniformly chosen correction attempts.
#[allow(clippy::too_many_arguments)]
pub fn run_async(
    lat: LatticeState,
    rule: &SiteRule,
    n_events: u64,
    noise: &NoiseParams,
    rng: &KeyedRng,
    keep_history: bool,
    log_events: bool,
    sample_every: u64,
) -> Result<AsyncTrajectory> {
    noise.validate()?;
    let mut al = AsyncLattice::new(lat, keep_history)?;
    let mut order = ChaCha8Rng::seed_from_u64(derive_seed(rng.seed, "async-order"));
    let mut path = FaultPath::new(rng.seed, noise.p);
    let mut accepted = Vec::new();
    let mut events = log_events.then(Vec::new);
    let mut density = Vec::new();
    let len = al.cur.len();
    for e in 0..n_events {
        if sample_every > 0 && e % sample_every == 0 {
            density.push((e, al.local_min_fraction()));
        }
        let k = order.random_range(0..len);
        let c = al.counter(k);
        let ok = al.attempt(k, rule, noise, rng, &mut path)?;
        if ok {
            accepted.push((k, c));
        }
        if let Some(ev) = events.as_mut() {
            ev.push(AsyncEvent { t: e as f64, site: k, kind: EventKind::CorrectionAttempt, accepted: ok });
        }
    }
    Ok(AsyncTrajectory { lattice: al, accepted, events, path, density })
}

/// Reorders accepted updates level by level, sites in index order within a
/// level. The result is always a legal marching-soldier sequence.
pub fn level_order(accepted: &[(usize, u64)]) -> Vec<(usize, u64)> {
    let mut v = accepted.to_vec();
    v.sort_by_key(|&(k, c)| (c, k));
    v
}
