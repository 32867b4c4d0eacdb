//! Adversarial placements inside one influence neighborhood: `h` clusters
//! in each of its three blocks plus `r` single-operation faults, followed
//! by one noiseless structural cycle.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::exrec::{influence_neighborhood, ExRecId, Tiling, EXACT_CLUSTER_CAP};
use crate::error::Result;
use crate::lattice::{neighbor, DataRule, Dir, Init, LatticeState, ScheduleParams, Site, StructureState};
use crate::noise::{apply_fault, trial_seed, FaultEffect, FaultEvent, LocKind, Location};
use crate::structure::{cluster_count, singular_in_region, structural_toom_step, Region};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacementOutcome {
    pub trial: u64,
    pub target: ExRecId,
    pub h: usize,
    pub r: usize,
    /// Clusters in the target block after the cycle.
    pub clusters_out: usize,
    pub correct: bool,
}

fn random_state(rng: &mut impl Rng, p: &ScheduleParams) -> StructureState {
    StructureState::new(rng.random_range(0..p.t0), rng.random_range(0..p.m), rng.random_range(0..p.m))
}

/// One sampled placement with `h + r <= t_EC_S`, run for one cycle from an
/// ideal lattice of side `n`.
pub fn placement_trial(params: &ScheduleParams, n: usize, seed: u64, trial: u64) -> Result<PlacementOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, trial));
    let tl = Tiling::new(n, params)?;
    let b = tl.blocks();
    let m = tl.m;
    let t = params.t_ec_s as usize;
    let h = rng.random_range(0..=t);
    let r = if rng.random_bool(0.5) { t - h } else { rng.random_range(0..=t - h) };
    let target = ExRecId::new(rng.random_range(0..b), rng.random_range(0..b), 0);
    let hood = influence_neighborhood(target, params, b)?;
    let mut lat = LatticeState::new(n, *params, Init::Ideal, DataRule::default())?;

    for id in &hood {
        for _ in 0..h {
            let (ai, aj) = (rng.random_range(0..=m - 3), rng.random_range(0..=m - 3));
            let mask = rng.random_range(1u32..512);
            for c in (0..9).filter(|c| mask >> c & 1 == 1) {
                let k = lat.idx(Site::new(id.bi * m + ai + c / 3, id.bj * m + aj + c % 3));
                let s = random_state(&mut rng, params);
                lat.set_structure(k, s);
            }
        }
    }

    let mut events: Vec<FaultEvent> = (0..r)
        .map(|_| {
            let id = hood[rng.random_range(0..3)];
            let site = Site::new(id.bi * m + rng.random_range(0..m), id.bj * m + rng.random_range(0..m));
            let support = vec![site, neighbor(site, Dir::N, n), neighbor(site, Dir::E, n)];
            let count = rng.random_range(1..=3);
            let hit: Vec<(usize, StructureState)> = sample(&mut rng, 3, count)
                .into_iter()
                .map(|k| (k, random_state(&mut rng, params)))
                .collect();
            FaultEvent {
                location: Location {
                    time: rng.random_range(0..params.t0 as u64),
                    op_id: (site.i * n + site.j) as u64,
                    kind: LocKind::Structure,
                    support,
                },
                effect: FaultEffect::StructureScramble(hit),
            }
        })
        .collect();
    events.sort_by_key(|e| e.location.time);

    for step in 0..params.t0 as u64 {
        structural_toom_step(&mut lat);
        for ev in events.iter().filter(|e| e.location.time == step) {
            apply_fault(&mut lat, ev)?;
        }
    }
    let pts = singular_in_region(&lat, lat.global_time, Region::block(target.bi, target.bj, m));
    let clusters_out = cluster_count(&pts, EXACT_CLUSTER_CAP);
    Ok(PlacementOutcome { trial, target, h, r, clusters_out, correct: clusters_out <= t })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub trials: u64,
    pub failures: u64,
    pub max_clusters_out: usize,
    pub first_failure: Option<PlacementOutcome>,
}

pub fn placement_sweep(params: &ScheduleParams, n: usize, seed: u64, trials: u64) -> Result<SweepSummary> {
    use rayon::prelude::*;
    let outs: Vec<PlacementOutcome> =
        (0..trials).into_par_iter().map(|k| placement_trial(params, n, seed, k)).collect::<Result<_>>()?;
    Ok(SweepSummary {
        trials,
        failures: outs.iter().filter(|o| !o.correct).count() as u64,
        max_clusters_out: outs.iter().map(|o| o.clusters_out).max().unwrap_or(0),
        first_failure: outs.iter().find(|o| !o.correct).copied(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::renorm::verify_good_correct;

    #[test]
    fn small_sweep_is_correct() {
        let p = ScheduleParams::new(24, 18, 6, 1);
        let s = placement_sweep(&p, 72, 7, 40).unwrap();
        assert_eq!(s.failures, 0, "{s:?}");
    }

    #[test]
    fn noiseless_exrec_outputs_codeword() {
        let p = ScheduleParams::new(24, 18, 6, 1);
        let mut lat = LatticeState::new(48, p, Init::Ideal, DataRule::default()).unwrap();
        for _ in 0..p.t0 {
            structural_toom_step(&mut lat);
        }
        assert!(lat.is_ideal_at(lat.global_time));
        assert!(verify_good_correct(ExRecId::new(1, 0, 0), &lat).unwrap());
    }

    #[test]
    fn late_faults_overwhelm_the_output() {
        // Eight well separated faults in the final step stay as eight clusters.
        let p = ScheduleParams::new(24, 18, 6, 1);
        let mut lat = LatticeState::new(48, p, Init::Ideal, DataRule::default()).unwrap();
        for _ in 0..p.t0 {
            structural_toom_step(&mut lat);
        }
        for c in 0..8 {
            let k = lat.idx(Site::new(2 + 5 * (c / 4), 2 + 5 * (c % 4)));
            let mut s = lat.structure(k);
            s.x = (s.x + 1) % p.m;
            lat.set_structure(k, s);
        }
        assert!(!verify_good_correct(ExRecId::new(0, 0, 0), &lat).unwrap());
    }
}
