//! Execution regimes over the site rule: synchronous steps, the
//! marching-soldier asynchronous discipline and continuous-time jumps.

mod ct;
mod marching;

pub use ct::{effective_fault_rate, local_min_density, run_ct, CtParams, CtTrajectory, DensityEstimate};
pub use marching::{
    level_order, local_min_fraction, run_async, AsyncEvent, AsyncLattice, AsyncStats, AsyncTrajectory, EventKind,
};

use crate::error::Result;
use crate::lattice::LatticeState;
use crate::noise::{FaultPath, KeyedRng, NoiseParams};
use crate::schedule::{step, Recorder, ScheduleStats, SiteRule};

/// Output of [`run_sync`].
#[derive(Debug, Clone)]
pub struct SyncTrajectory {
    /// States at every `stride`-th step, starting with the initial one.
    pub snapshots: Vec<LatticeState>,
    pub path: FaultPath,
    pub stats: ScheduleStats,
}

/// `n_steps` synchronous applications of `rule` with keyed noise.
/// `stride == 0` keeps only the initial and final states.
pub fn run_sync(
    lat: &mut LatticeState,
    rule: &SiteRule,
    n_steps: u64,
    noise: &NoiseParams,
    rng: &KeyedRng,
    stride: u64,
) -> Result<SyncTrajectory> {
    noise.validate()?;
    let mut path = FaultPath::new(rng.seed, noise.p);
    let mut rec = Recorder::default();
    let mut snapshots = vec![lat.clone()];
    for s in 1..=n_steps {
        step(lat, rule, noise, rng, &mut path, &mut rec)?;
        if stride > 0 && s % stride == 0 {
            snapshots.push(lat.clone());
        }
    }
    if stride == 0 || n_steps % stride != 0 {
        if n_steps > 0 {
            snapshots.push(lat.clone());
        }
    }
    Ok(SyncTrajectory { snapshots, path, stats: rec.stats })
}

/// Whether two lattices carry the same structure and data registers.
pub fn same_registers(a: &LatticeState, b: &LatticeState) -> bool {
    a.n == b.n && a.tau == b.tau && a.x == b.x && a.y == b.y && a.data == b.data
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{DataRule, Init, ScheduleParams};
    use crate::schedule::{run_cycle, ScheduleTable};

    #[test]
    fn zero_steps_is_identity() {
        let p = ScheduleParams::new(8, 4, 4, 1);
        let mut lat = LatticeState::new(16, p, Init::Ideal, DataRule::default()).unwrap();
        let before = lat.clone();
        let tr = run_sync(&mut lat, &SiteRule::structure_only(p), 0, &NoiseParams::iid(0.1), &KeyedRng::new(3), 1)
            .unwrap();
        assert_eq!(lat, before);
        assert_eq!(tr.snapshots.len(), 1);
        assert!(tr.path.is_empty());
    }

    #[test]
    fn split_runs_compose() {
        let p = ScheduleParams::new(8, 4, 4, 1);
        let rule = SiteRule::with_table(p, ScheduleTable::exercise(), true);
        let noise = NoiseParams::iid(0.02);
        let rng = KeyedRng::new(11);
        let mut a = LatticeState::new(16, p, Init::Ideal, DataRule::default()).unwrap();
        let mut b = a.clone();
        let whole = run_sync(&mut a, &rule, 13, &noise, &rng, 0).unwrap();
        let mut first = run_sync(&mut b, &rule, 5, &noise, &rng, 0).unwrap();
        let second = run_sync(&mut b, &rule, 8, &noise, &rng, 0).unwrap();
        first.path.append(second.path);
        assert_eq!(a, b);
        assert_eq!(whole.path.events, first.path.events);
    }

    #[test]
    fn noiseless_cycle_matches_run_cycle() {
        let p = ScheduleParams::new(8, 4, 4, 1);
        let rule = SiteRule::with_table(p, ScheduleTable::exercise(), true);
        let mut a = LatticeState::new(16, p, Init::Ideal, DataRule::default()).unwrap();
        let mut b = a.clone();
        run_sync(&mut a, &rule, p.t0 as u64, &NoiseParams::noiseless(), &KeyedRng::new(0), 1).unwrap();
        run_cycle(&mut b, &rule, &NoiseParams::noiseless(), &KeyedRng::new(0), &mut Recorder::default()).unwrap();
        assert_eq!(a, b);
    }
}
