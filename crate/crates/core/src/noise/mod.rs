//! Fault injection: locations, sampled and scripted fault events, and the
//! text format used to replay fault paths.

mod io;
mod rng;

pub use rng::{derive_seed, mix64, trial_seed, KeyedRng};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{width_mask, DataRule, DataState, LatticeState, ScheduleParams, Site, StructureState};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LocKind {
    Structure,
    Data,
}

/// One local operation at a fixed step. `support[0]` is the site the
/// operation writes; the remaining sites are the ones it reads.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Location {
    pub time: u64,
    pub op_id: u64,
    pub kind: LocKind,
    pub support: Vec<Site>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FaultEffect {
    /// New register values for the listed support positions.
    StructureScramble(Vec<(usize, StructureState)>),
    DataBitFlip(usize),
    DataPauli { index: usize, x: u64, z: u64 },
    Custom { tag: String, payload: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultEvent {
    pub location: Location,
    pub effect: FaultEffect,
}

impl FaultEvent {
    /// Support positions the effect touches.
    pub fn touched(&self) -> Vec<usize> {
        match &self.effect {
            FaultEffect::StructureScramble(v) => v.iter().map(|(k, _)| *k).collect(),
            FaultEffect::DataBitFlip(k) | FaultEffect::DataPauli { index: k, .. } => vec![*k],
            FaultEffect::Custom { .. } => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FaultPath {
    pub events: Vec<FaultEvent>,
    pub seed: u64,
    pub p: f64,
}

impl FaultPath {
    pub fn new(seed: u64, p: f64) -> Self {
        FaultPath { events: Vec::new(), seed, p }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn append(&mut self, other: FaultPath) {
        self.events.extend(other.events);
    }

    /// Sorts into (time, op_id) order.
    pub fn normalize(&mut self) {
        self.events.sort_by_key(|e| (e.location.time, e.location.op_id));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoiseTargets {
    pub structure: bool,
    pub data: bool,
}

impl Default for NoiseTargets {
    fn default() -> Self {
        NoiseTargets { structure: true, data: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NoiseMode {
    Iid,
    /// Only the listed events occur; each fires when its location executes.
    Adversarial(Vec<FaultEvent>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub p: f64,
    pub mode: NoiseMode,
    pub targets: NoiseTargets,
}

impl NoiseParams {
    pub fn iid(p: f64) -> Self {
        NoiseParams { p, mode: NoiseMode::Iid, targets: NoiseTargets::default() }
    }

    pub fn noiseless() -> Self {
        Self::iid(0.0)
    }

    pub fn structure_only(p: f64) -> Self {
        NoiseParams { targets: NoiseTargets { structure: true, data: false }, ..Self::iid(p) }
    }

    pub fn data_only(p: f64) -> Self {
        NoiseParams { targets: NoiseTargets { structure: false, data: true }, ..Self::iid(p) }
    }

    pub fn adversarial(events: Vec<FaultEvent>) -> Self {
        NoiseParams { p: 0.0, mode: NoiseMode::Adversarial(events), targets: NoiseTargets::default() }
    }

    pub fn eta(&self) -> f64 {
        eta_from_p(self.p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::Config(format!("fault probability p = {} outside [0, 1]", self.p)));
        }
        Ok(())
    }
}

/// Local noise strength for a stochastic fault rate: `eta = sqrt(p)`.
pub fn eta_from_p<T: Real>(p: T) -> T {
    p.sqrt()
}

/// Draws the effect of a fault at `loc`.
///
/// Structure faults overwrite the written register with a uniform value of
/// the full `(tau, x, y)` alphabet; data faults draw a uniform non-identity
/// error on the written register.
pub fn draw_effect(loc: &Location, rng: &KeyedRng, params: &ScheduleParams, rule: DataRule) -> FaultEffect {
    let mut s = rng.stream(loc.time, loc.op_id);
    match loc.kind {
        LocKind::Structure => FaultEffect::StructureScramble(vec![(
            0,
            StructureState::new(
                s.random_range(0..params.t0),
                s.random_range(0..params.m),
                s.random_range(0..params.m),
            ),
        )]),
        LocKind::Data => match rule {
            DataRule::ClassicalBit { .. } => FaultEffect::DataBitFlip(0),
            DataRule::PauliFrame { width } => {
                let mask = width_mask(width);
                loop {
                    let (x, z) = (s.random::<u64>() & mask, s.random::<u64>() & mask);
                    if x | z != 0 {
                        break FaultEffect::DataPauli { index: 0, x, z };
                    }
                }
            }
            DataRule::Opaque { alphabet } => FaultEffect::Custom {
                tag: "shift".into(),
                payload: s.random_range(1..alphabet.max(2)).to_string(),
            },
        },
    }
}

/// Independently faults each location with probability `p`.
pub fn sample_faults(
    locations: &[Location],
    p: f64,
    rng: &KeyedRng,
    params: &ScheduleParams,
    rule: DataRule,
) -> Vec<FaultEvent> {
    locations
        .iter()
        .filter(|loc| rng.fires(loc.time, loc.op_id, p))
        .map(|loc| FaultEvent { location: loc.clone(), effect: draw_effect(loc, rng, params, rule) })
        .collect()
}

/// Applies one fault to the lattice registers it names.
pub fn apply_fault(lat: &mut LatticeState, ev: &FaultEvent) -> Result<()> {
    let sup = &ev.location.support;
    for s in sup {
        lat.check_site(*s)?;
    }
    let idxs: Vec<usize> = sup.iter().map(|s| lat.idx(*s)).collect();
    let at = |k: usize| -> Result<usize> {
        idxs.get(k)
            .copied()
            .ok_or_else(|| Error::Config(format!("effect names support position {k} of {}", sup.len())))
    };
    match &ev.effect {
        FaultEffect::StructureScramble(v) => {
            for (k, st) in v {
                let idx = at(*k)?;
                if !st.in_range(&lat.params) {
                    return Err(Error::Config(format!("scramble value {st:?} outside the register alphabet")));
                }
                lat.set_structure(idx, *st);
            }
        }
        FaultEffect::DataBitFlip(k) => {
            let idx = at(*k)?;
            match lat.data.get(idx) {
                DataState::ClassicalBit(b) => lat.data.set(idx, DataState::ClassicalBit(b ^ 1))?,
                other => return Err(Error::Config(format!("bit flip on non-bit register {other:?}"))),
            }
        }
        FaultEffect::DataPauli { index, x, z } => {
            let idx = at(*index)?;
            match lat.data.get(idx) {
                DataState::PauliFrame { x: fx, z: fz } => {
                    lat.data.set(idx, DataState::PauliFrame { x: fx ^ x, z: fz ^ z })?
                }
                other => return Err(Error::Config(format!("Pauli fault on non-frame register {other:?}"))),
            }
        }
        FaultEffect::Custom { tag, payload } if tag == "shift" => {
            let idx = at(0)?;
            let shift: u32 = payload.parse().map_err(|_| Error::Config(format!("bad shift `{payload}`")))?;
            match lat.data.get(idx) {
                DataState::Opaque(v) => lat.data.set(idx, DataState::Opaque(v + shift))?,
                other => return Err(Error::Config(format!("shift on non-opaque register {other:?}"))),
            }
        }
        FaultEffect::Custom { tag, .. } => {
            return Err(Error::Config(format!("no handler for custom effect `{tag}`")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Init, LatticeState};

    fn locs(n: usize, count: u64) -> Vec<Location> {
        (0..count)
            .map(|k| Location {
                time: k / n as u64,
                op_id: k % n as u64,
                kind: LocKind::Data,
                support: vec![Site::new(0, 0)],
            })
            .collect()
    }

    #[test]
    fn extreme_probabilities() {
        let p = ScheduleParams::default();
        let rng = KeyedRng::new(5);
        let l = locs(10, 1000);
        assert!(sample_faults(&l, 0.0, &rng, &p, DataRule::default()).is_empty());
        assert_eq!(sample_faults(&l, 1.0, &rng, &p, DataRule::default()).len(), 1000);
    }

    #[test]
    fn binomial_concentration() {
        let p = ScheduleParams::default();
        let l = locs(1000, 100_000);
        let k = sample_faults(&l, 0.1, &KeyedRng::new(11), &p, DataRule::default()).len() as f64;
        let sigma = (100_000.0f64 * 0.1 * 0.9).sqrt();
        assert!((k - 10_000.0).abs() < 5.0 * sigma, "{k}");
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta_from_p(0.0f64), 0.0);
        assert_eq!(eta_from_p(1.0f64), 1.0);
        assert!((eta_from_p(0.01f64) - 0.1).abs() < 1e-15);
        assert!((eta_from_p(0.01f32) - 0.1).abs() < 1e-6);
    }

    #[test]
    fn bit_flip_is_local() {
        let p = ScheduleParams::new(4, 2, 1, 1);
        let mut lat = LatticeState::new(8, p, Init::Ideal, DataRule::default()).unwrap();
        let before = lat.clone();
        let ev = FaultEvent {
            location: Location { time: 0, op_id: 0, kind: LocKind::Data, support: vec![Site::new(2, 3)] },
            effect: FaultEffect::DataBitFlip(0),
        };
        apply_fault(&mut lat, &ev).unwrap();
        let changed: Vec<usize> = (0..lat.len()).filter(|&k| lat.cell(k) != before.cell(k)).collect();
        assert_eq!(changed, vec![lat.idx(Site::new(2, 3))]);
    }

    #[test]
    fn out_of_lattice_event_is_rejected() {
        let p = ScheduleParams::new(4, 2, 1, 1);
        let mut lat = LatticeState::new(4, p, Init::Ideal, DataRule::default()).unwrap();
        let ev = FaultEvent {
            location: Location { time: 0, op_id: 0, kind: LocKind::Data, support: vec![Site::new(9, 0)] },
            effect: FaultEffect::DataBitFlip(0),
        };
        assert!(apply_fault(&mut lat, &ev).is_err());
    }

    #[test]
    fn scramble_to_current_value_is_a_noop() {
        let p = ScheduleParams::new(4, 2, 1, 1);
        let mut lat = LatticeState::new(4, p, Init::Ideal, DataRule::default()).unwrap();
        let before = lat.clone();
        let cur = lat.structure(lat.idx(Site::new(1, 1)));
        let ev = FaultEvent {
            location: Location { time: 0, op_id: 5, kind: LocKind::Structure, support: vec![Site::new(1, 1)] },
            effect: FaultEffect::StructureScramble(vec![(0, cur)]),
        };
        apply_fault(&mut lat, &ev).unwrap();
        assert_eq!(lat, before);
    }
}
