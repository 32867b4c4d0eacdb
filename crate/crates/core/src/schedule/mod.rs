//! The error-correcting cycle: `T_ref` refresh steps in which only the
//! structure registers update, then `T_code` simulation steps in which each
//! site also runs the data gate selected by its own Toom-corrected
//! `(tau, x, y)`. Within one step the structure update and the data gate
//! read the same previous-step registers.

mod feasibility;
mod table;

pub use feasibility::{feasibility_checks, polylog, solve_params, Feasibility, FeasibilityConstraints};
pub use table::{GateKind, ScheduleTable};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lattice::{ideal_structure, DataState, Dir, LatticeState, ScheduleParams, Site, StructureState};
use crate::noise::{apply_fault, draw_effect, FaultEvent, FaultPath, KeyedRng, LocKind, Location, NoiseMode, NoiseParams};
use crate::structure::{maj, toom_adjusted};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseKind {
    Refresh,
    Simulation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclePhase {
    pub kind: PhaseKind,
    pub step_in_cycle: u32,
}

impl CyclePhase {
    pub fn at(time: u64, p: &ScheduleParams) -> Self {
        let step_in_cycle = (time % p.t0 as u64) as u32;
        let kind = if p.is_refresh(step_in_cycle) { PhaseKind::Refresh } else { PhaseKind::Simulation };
        CyclePhase { kind, step_in_cycle }
    }
}

/// One emitted data operation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCall {
    pub time: u64,
    pub op_id: u64,
    pub site: Site,
    pub kind: GateKind,
    pub partners: Vec<Site>,
    pub crosses_block_boundary: bool,
    /// Replaced by identity because a cross-block partner disagreed.
    pub gated: bool,
}

/// Whether `b`, the neighbor of `a` in direction `dir`, carries the
/// coordinates `a` expects there. Clock registers must agree as well.
pub fn coord_consistent(a: &StructureState, b: &StructureState, dir: Dir, m: u32) -> bool {
    let (dx, dy) = match dir {
        Dir::N => (1, 0),
        Dir::S => (m - 1, 0),
        Dir::E => (0, 1),
        Dir::W => (0, m - 1),
    };
    a.tau == b.tau && b.x == (a.x + dx) % m && b.y == (a.y + dy) % m
}

/// The site-local update rule shared by every scheduler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteRule {
    pub params: ScheduleParams,
    /// `None` leaves the data registers idle in every step.
    pub table: Option<ScheduleTable>,
    pub gating: bool,
}

/// Registers of a site and its north and east neighbors at one slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighborhood {
    pub c: StructureState,
    pub n: StructureState,
    pub e: StructureState,
    pub dc: DataState,
    pub dn: DataState,
    pub de: DataState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalOutcome {
    pub structure: StructureState,
    pub data: DataState,
    /// Gate chosen from the corrected registers.
    pub selected: GateKind,
    /// Gate actually run (identity when gated).
    pub executed: GateKind,
    pub cross: bool,
    pub gated: bool,
    /// A cross-block gate ran although a partner's coordinates disagreed.
    pub inconsistent_exec: bool,
}

fn apply_data(op: GateKind, dc: DataState, dn: DataState, de: DataState) -> DataState {
    use DataState::*;
    match (op, dc, dn, de) {
        (GateKind::Id, ..) => dc,
        (GateKind::Not, ClassicalBit(b), ..) => ClassicalBit(b ^ 1),
        (GateKind::Not, Opaque(v), ..) => Opaque(v.wrapping_add(1)),
        (GateKind::Not, PauliFrame { .. }, ..) => dc,
        (GateKind::Maj, ClassicalBit(a), ClassicalBit(b), ClassicalBit(c)) => ClassicalBit((a & b) | (a & c) | (b & c)),
        (GateKind::Maj, PauliFrame { x: a, z: za }, PauliFrame { x: b, z: zb }, PauliFrame { x: c, z: zc }) => {
            PauliFrame { x: (a & b) | (a & c) | (b & c), z: (za & zb) | (za & zc) | (zb & zc) }
        }
        (GateKind::Maj, Opaque(a), Opaque(b), Opaque(c)) => Opaque(maj(a, b, c)),
        (GateKind::CnotN | GateKind::CnotE, ..) => {
            let p = if op == GateKind::CnotN { dn } else { de };
            match (dc, p) {
                (ClassicalBit(a), ClassicalBit(b)) => ClassicalBit(a ^ b),
                (PauliFrame { x, z }, PauliFrame { x: px, .. }) => PauliFrame { x: x ^ px, z },
                (Opaque(a), Opaque(b)) => Opaque(a.wrapping_add(b)),
                _ => dc,
            }
        }
        _ => dc,
    }
}

impl SiteRule {
    pub fn structure_only(params: ScheduleParams) -> Self {
        SiteRule { params, table: None, gating: true }
    }

    pub fn with_table(params: ScheduleParams, table: ScheduleTable, gating: bool) -> Self {
        SiteRule { params, table: Some(table), gating }
    }

    /// Gate the nominal schedule runs at `(t, i, j)` on an ideal lattice.
    pub fn nominal(&self, t: u64, i: usize, j: usize) -> GateKind {
        let p = &self.params;
        let s = ideal_structure(t, i, j, p);
        match &self.table {
            Some(tb) => tb.lookup(p.is_refresh(s.tau), s.tau, s.x, s.y, p.m),
            None => GateKind::Id,
        }
    }

    #[inline]
    pub fn update(&self, nb: &Neighborhood) -> LocalOutcome {
        let p = &self.params;
        let m = p.m;
        let adj = toom_adjusted(nb.c, nb.n, nb.e, p);
        let structure = StructureState { tau: (adj.tau + 1) % p.t0, ..adj };
        let selected = match &self.table {
            Some(t) => t.lookup(p.is_refresh(adj.tau), adj.tau, adj.x, adj.y, m),
            None => GateKind::Id,
        };
        let mut cross = false;
        let mut bad = false;
        for &d in selected.partners() {
            let (partner, c) = match d {
                Dir::N => (&nb.n, adj.x + 1 == m || nb.n.x == 0),
                _ => (&nb.e, adj.y + 1 == m || nb.e.y == 0),
            };
            if c {
                cross = true;
                bad |= !coord_consistent(&nb.c, partner, d, m);
            }
        }
        let gated = self.gating && bad;
        let executed = if gated { GateKind::Id } else { selected };
        LocalOutcome {
            structure,
            data: apply_data(executed, nb.dc, nb.dn, nb.de),
            selected,
            executed,
            cross,
            gated,
            inconsistent_exec: bad && !gated,
        }
    }
}

/// Counters accumulated while stepping.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleStats {
    pub steps: u64,
    /// Executed non-identity data gates.
    pub data_ops: u64,
    pub cross_block_calls: u64,
    pub gated: u64,
    /// Cross-block gates (as judged by the sites) that ran with inconsistent coordinates.
    pub inconsistent_cross_exec: u64,
    /// Same, judged by the true block geometry instead.
    pub inconsistent_cross_exec_actual: u64,
    /// Data locations whose executed gate differs from the nominal one or
    /// whose control registers were singular.
    pub miscontrolled: u64,
    /// Per-block counts for the macro-location in progress.
    pub miscontrolled_by_block: Vec<u64>,
    /// Largest per-block count over completed macro-locations.
    pub miscontrolled_max: u64,
}

impl ScheduleStats {
    /// Closes the current macro-location.
    pub fn end_macro_location(&mut self) {
        let m = self.miscontrolled_by_block.iter().copied().max().unwrap_or(0);
        self.miscontrolled_max = self.miscontrolled_max.max(m);
        self.miscontrolled_by_block.iter_mut().for_each(|v| *v = 0);
    }
}

/// Optional trace output of the stepping functions.
#[derive(Debug, Default)]
pub struct Recorder {
    pub stats: ScheduleStats,
    pub calls: Option<Vec<GateCall>>,
}

impl Recorder {
    pub fn with_calls() -> Self {
        Recorder { calls: Some(Vec::new()), ..Default::default() }
    }
}

/// Fault decisions for the two locations of site `k` in step `t`.
pub(crate) fn site_faults(
    t: u64,
    k: usize,
    site: Site,
    n: usize,
    partners: &[Site],
    rule: &SiteRule,
    noise: &NoiseParams,
    rng: &KeyedRng,
    data_rule: crate::lattice::DataRule,
) -> (Option<FaultEvent>, Option<FaultEvent>) {
    if noise.p <= 0.0 || !matches!(noise.mode, NoiseMode::Iid) {
        return (None, None);
    }
    let nn = (n * n) as u64;
    let mut out = (None, None);
    if noise.targets.structure && rng.fires(t, k as u64, noise.p) {
        let loc = Location {
            time: t,
            op_id: k as u64,
            kind: LocKind::Structure,
            support: vec![
                site,
                crate::lattice::neighbor(site, Dir::N, n),
                crate::lattice::neighbor(site, Dir::E, n),
            ],
        };
        let effect = draw_effect(&loc, rng, &rule.params, data_rule);
        out.0 = Some(FaultEvent { location: loc, effect });
    }
    if noise.targets.data && rng.fires(t, nn + k as u64, noise.p) {
        let mut support = vec![site];
        support.extend_from_slice(partners);
        let loc = Location { time: t, op_id: nn + k as u64, kind: LocKind::Data, support };
        let effect = draw_effect(&loc, rng, &rule.params, data_rule);
        out.1 = Some(FaultEvent { location: loc, effect });
    }
    out
}

/// One synchronous step of the full rule with noise; faults are appended to `path`.
pub fn step(
    lat: &mut LatticeState,
    rule: &SiteRule,
    noise: &NoiseParams,
    rng: &KeyedRng,
    path: &mut FaultPath,
    rec: &mut Recorder,
) -> Result<()> {
    let n = lat.n;
    let t = lat.global_time;
    let p = rule.params;
    let m = p.m as usize;
    let prev = lat.clone();
    let nblocks = n / m;
    if rec.stats.miscontrolled_by_block.len() != nblocks * nblocks {
        rec.stats.miscontrolled_by_block = vec![0; nblocks * nblocks];
    }
    let data_rule = lat.data.rule();
    let mut sampled = Vec::new();
    for k in 0..lat.len() {
        let site = lat.site(k);
        let kn = prev.neighbor_idx(k, Dir::N);
        let ke = prev.neighbor_idx(k, Dir::E);
        let nb = Neighborhood {
            c: prev.structure(k),
            n: prev.structure(kn),
            e: prev.structure(ke),
            dc: prev.data.get(k),
            dn: prev.data.get(kn),
            de: prev.data.get(ke),
        };
        let out = rule.update(&nb);
        lat.set_structure(k, out.structure);
        lat.data.set(k, out.data)?;

        let st = &mut rec.stats;
        let partners: Vec<Site> = out
            .selected
            .partners()
            .iter()
            .map(|&d| crate::lattice::neighbor(site, d, n))
            .collect();
        if out.executed != GateKind::Id {
            st.data_ops += 1;
        }
        st.cross_block_calls += out.cross as u64;
        st.gated += out.gated as u64;
        st.inconsistent_cross_exec += out.inconsistent_exec as u64;
        if out.executed != GateKind::Id {
            for &d in out.executed.partners() {
                let (edge, partner) = match d {
                    Dir::N => (site.i % m == m - 1, nb.n),
                    _ => (site.j % m == m - 1, nb.e),
                };
                if edge && !coord_consistent(&nb.c, &partner, d, p.m) {
                    st.inconsistent_cross_exec_actual += 1;
                    break;
                }
            }
        }
        let nominal = rule.nominal(t, site.i, site.j);
        let singular = |s: Site, v: StructureState| v != ideal_structure(t, s.i, s.j, &p);
        let control_bad = out.executed != GateKind::Id
            && (singular(site, nb.c)
                || out.executed.partners().iter().any(|&d| {
                    let s = crate::lattice::neighbor(site, d, n);
                    singular(s, if d == Dir::N { nb.n } else { nb.e })
                }));
        if out.executed != nominal || control_bad {
            st.miscontrolled += 1;
            st.miscontrolled_by_block[(site.i / m) * nblocks + site.j / m] += 1;
        }
        if let Some(calls) = rec.calls.as_mut() {
            if out.selected != GateKind::Id {
                calls.push(GateCall {
                    time: t,
                    op_id: (n * n + k) as u64,
                    site,
                    kind: out.selected,
                    partners: partners.clone(),
                    crosses_block_boundary: out.cross,
                    gated: out.gated,
                });
            }
        }
        let (fs, fd) = site_faults(t, k, site, n, &partners, rule, noise, rng, data_rule);
        sampled.extend(fs);
        sampled.extend(fd);
    }
    if let NoiseMode::Adversarial(events) = &noise.mode {
        sampled.extend(events.iter().filter(|e| e.location.time == t).cloned());
    }
    for ev in &sampled {
        apply_fault(lat, ev)?;
    }
    path.events.extend(sampled);
    lat.global_time += 1;
    rec.stats.steps += 1;
    Ok(())
}

/// `T0` steps: refresh then simulation.
pub fn run_cycle(
    lat: &mut LatticeState,
    rule: &SiteRule,
    noise: &NoiseParams,
    rng: &KeyedRng,
    rec: &mut Recorder,
) -> Result<FaultPath> {
    let mut path = FaultPath::new(rng.seed, noise.p);
    for _ in 0..rule.params.t0 {
        step(lat, rule, noise, rng, &mut path, rec)?;
    }
    Ok(path)
}

/// `T_sim` cycles, simulating one step of the next level.
pub fn run_macro_step(
    lat: &mut LatticeState,
    rule: &SiteRule,
    noise: &NoiseParams,
    rng: &KeyedRng,
    rec: &mut Recorder,
) -> Result<FaultPath> {
    let mut path = FaultPath::new(rng.seed, noise.p);
    for _ in 0..rule.params.t_sim {
        path.append(run_cycle(lat, rule, noise, rng, rec)?);
    }
    rec.stats.end_macro_location();
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{DataRule, Init};

    fn params() -> ScheduleParams {
        ScheduleParams::new(8, 4, 4, 2)
    }

    #[test]
    fn coord_consistency_examples() {
        let a = StructureState::new(0, 3, 4);
        assert!(coord_consistent(&a, &StructureState::new(0, 3, 5), Dir::E, 24));
        assert!(!coord_consistent(&a, &StructureState::new(0, 3, 4), Dir::E, 24));
        let edge = StructureState::new(0, 23, 0);
        assert!(coord_consistent(&edge, &StructureState::new(0, 0, 0), Dir::N, 24));
        assert!(!coord_consistent(&a, &StructureState::new(1, 3, 5), Dir::E, 24));
    }

    #[test]
    fn noiseless_cycle_keeps_codeword_and_runs_nominal_calls() {
        let p = params();
        let rule = SiteRule::with_table(p, ScheduleTable::exercise(), true);
        let mut lat = LatticeState::new(16, p, Init::Ideal, DataRule::default()).unwrap();
        let mut rec = Recorder::with_calls();
        let path = run_cycle(&mut lat, &rule, &NoiseParams::noiseless(), &KeyedRng::new(1), &mut rec).unwrap();
        assert!(path.is_empty());
        assert!(lat.is_ideal_at(p.t0 as u64));
        let calls = rec.calls.unwrap();
        let mut expected = Vec::new();
        for t in 0..p.t0 as u64 {
            for k in 0..256 {
                let (i, j) = (k / 16, k % 16);
                let g = rule.nominal(t, i, j);
                if g != GateKind::Id {
                    expected.push((t, Site::new(i, j), g));
                }
            }
        }
        let got: Vec<_> = calls.iter().map(|c| (c.time, c.site, c.kind)).collect();
        assert_eq!(got, expected);
        assert!(calls.iter().all(|c| !c.gated));
        assert_eq!(rec.stats.miscontrolled, 0);
    }

    #[test]
    fn identity_schedule_leaves_data() {
        let p = params();
        let rule = SiteRule::with_table(p, ScheduleTable::identity(), true);
        let mut lat = LatticeState::new(16, p, Init::Ideal, DataRule::ClassicalBit { initial: 0 }).unwrap();
        let b = lat.data.bits_mut().unwrap();
        b[3] = 1;
        b[77] = 1;
        let before = lat.data.clone();
        run_cycle(&mut lat, &rule, &NoiseParams::noiseless(), &KeyedRng::new(1), &mut Recorder::default()).unwrap();
        assert_eq!(lat.data, before);
    }

    #[test]
    fn refresh_keeps_data_fixed() {
        let p = params();
        let rule = SiteRule::with_table(p, ScheduleTable::exercise(), true);
        let mut lat = LatticeState::new(16, p, Init::Ideal, DataRule::default()).unwrap();
        lat.data.bits_mut().unwrap()[5] = 1;
        let h = lat.data_digest();
        let mut path = FaultPath::default();
        for _ in 0..p.t_ref {
            step(&mut lat, &rule, &NoiseParams::noiseless(), &KeyedRng::new(0), &mut path, &mut Recorder::default())
                .unwrap();
            assert_eq!(lat.data_digest(), h);
        }
    }

    #[test]
    fn macro_step_is_cycles_composed() {
        let p = params();
        let rule = SiteRule::with_table(p, ScheduleTable::exercise(), true);
        let noise = NoiseParams::iid(0.01);
        let rng = KeyedRng::new(4);
        let mut a = LatticeState::new(16, p, Init::Ideal, DataRule::default()).unwrap();
        let mut b = a.clone();
        let pa = run_macro_step(&mut a, &rule, &noise, &rng, &mut Recorder::default()).unwrap();
        let mut pb = FaultPath::new(4, 0.01);
        for _ in 0..p.t_sim {
            pb.append(run_cycle(&mut b, &rule, &noise, &rng, &mut Recorder::default()).unwrap());
        }
        assert_eq!(a, b);
        assert_eq!(pa.events, pb.events);
        assert_eq!(a.global_time, p.t);
    }

    #[test]
    fn cluster_at_refresh_start_is_gone_before_simulation() {
        let p = ScheduleParams::default();
        let rule = SiteRule::with_table(p, ScheduleTable::repetition(), true);
        let mut lat = LatticeState::new(24, p, Init::Ideal, DataRule::default()).unwrap();
        for (i, j) in [(5, 5), (5, 6), (6, 5), (7, 7)] {
            let k = lat.idx(Site::new(i, j));
            lat.set_structure(k, StructureState::new(9, 1, 2));
        }
        let mut path = FaultPath::default();
        for _ in 0..p.t_ref {
            step(&mut lat, &rule, &NoiseParams::noiseless(), &KeyedRng::new(0), &mut path, &mut Recorder::default())
                .unwrap();
        }
        assert!(lat.is_ideal_at(p.t_ref as u64));
    }
}
