//! Continuous-time trajectories: every site attempts a correction at rate 1
//! and suffers a noise jump at rate `p`, simulated event by event.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use super::marching::{AsyncEvent, AsyncLattice, EventKind};
use crate::error::{Error, Result};
use crate::lattice::{neighbor, Dir, LatticeState};
use crate::noise::{apply_fault, derive_seed, draw_effect, FaultEvent, FaultPath, KeyedRng, LocKind, Location, NoiseParams, NoiseTargets};
use crate::schedule::SiteRule;
use crate::stats::batched_means;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CtParams {
    /// Total noise rate per site.
    pub p: f64,
    pub duration: f64,
    /// Layers a noise jump may hit, chosen uniformly among the enabled ones.
    pub targets: NoiseTargets,
    /// Rate of the Poisson clock at which the local-minimum density is sampled.
    pub sample_rate: f64,
    pub log_events: bool,
    /// Cap on recorded inter-event times. Each site contributes its first
    /// `max(gap_cap / sites, 1)` gaps, so the sample is not biased towards
    /// short gaps by a global time cutoff.
    pub gap_cap: usize,
    /// Keep every slice of every site (needed to compare against synchronous runs).
    pub keep_history: bool,
}

impl CtParams {
    pub fn new(p: f64, duration: f64) -> Self {
        CtParams { p, duration, targets: NoiseTargets::default(), sample_rate: 1.0, log_events: false, gap_cap: 100_000, keep_history: false }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 0.0 && self.p.is_finite()) {
            return Err(Error::Config(format!("noise rate {} must be finite and >= 0", self.p)));
        }
        if !(self.duration >= 0.0) || !(self.sample_rate > 0.0) {
            return Err(Error::Config("duration must be >= 0 and the sample rate > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct CtTrajectory {
    pub params: CtParams,
    pub lattice: AsyncLattice,
    pub events: Option<Vec<AsyncEvent>>,
    pub path: FaultPath,
    /// `(time, local-minimum fraction)` at the sampling clock.
    pub density: Vec<(f64, f64)>,
    pub attempts: u64,
    pub accepted: u64,
    /// Accepted updates preceded by a noise jump at the same site since its
    /// previous accepted update.
    pub noisy_accepted: u64,
    pub noise_events: u64,
    /// Waiting times between consecutive events at a site.
    pub gaps: Vec<f64>,
}

/// Next-event simulation of attempts and noise jumps up to `params.duration`.
pub fn run_ct(lat: LatticeState, rule: &SiteRule, params: &CtParams, seed: u64) -> Result<CtTrajectory> {
    params.validate()?;
    let n = lat.n;
    let len = lat.len();
    let nn = len as u64;
    let data_rule = lat.data.rule();
    let mut al = AsyncLattice::new(lat, params.keep_history)?;
    let mut clock = ChaCha8Rng::seed_from_u64(derive_seed(seed, "ct-clock"));
    let mut sampler = ChaCha8Rng::seed_from_u64(derive_seed(seed, "ct-sample"));
    let effects = KeyedRng::new(derive_seed(seed, "ct-noise"));
    let quiet = NoiseParams::noiseless();
    let total = len as f64 * (1.0 + params.p);
    let wait = Exp::new(total).map_err(|e| Error::Config(e.to_string()))?;
    let sample_wait = Exp::new(params.sample_rate).map_err(|e| Error::Config(e.to_string()))?;
    let layers: Vec<LocKind> = [(params.targets.structure, LocKind::Structure), (params.targets.data, LocKind::Data)]
        .into_iter()
        .filter_map(|(on, k)| on.then_some(k))
        .collect();

    let mut tr = CtTrajectory {
        params: *params,
        lattice: al.clone(),
        events: params.log_events.then(Vec::new),
        path: FaultPath::new(seed, params.p),
        density: Vec::new(),
        attempts: 0,
        accepted: 0,
        noisy_accepted: 0,
        noise_events: 0,
        gaps: Vec::new(),
    };
    let mut dirty = vec![false; len];
    let mut last = vec![0.0f64; len];
    let mut recorded = vec![0usize; len];
    let quota = (params.gap_cap / len).max(1);
    let mut t = 0.0;
    let mut next_sample = sample_wait.sample(&mut sampler);
    let mut index = 0u64;
    loop {
        t += wait.sample(&mut clock);
        while next_sample <= t.min(params.duration) {
            tr.density.push((next_sample, al.local_min_fraction()));
            next_sample += sample_wait.sample(&mut sampler);
        }
        if t > params.duration {
            break;
        }
        let k = clock.random_range(0..len);
        let noise = clock.random::<f64>() * (1.0 + params.p) >= 1.0;
        if recorded[k] < quota {
            tr.gaps.push(t - last[k]);
            recorded[k] += 1;
        }
        last[k] = t;
        let accepted = if noise && !layers.is_empty() {
            let kind = layers[clock.random_range(0..layers.len())];
            let site = al.cur.site(k);
            let support = vec![site, neighbor(site, Dir::N, n), neighbor(site, Dir::E, n)];
            let op_id = if kind == LocKind::Structure { k as u64 } else { nn + k as u64 };
            let location = Location { time: index, op_id, kind, support };
            let effect = draw_effect(&location, &effects, &rule.params, data_rule);
            let ev = FaultEvent { location, effect };
            apply_fault(al.cur_mut(), &ev)?;
            tr.path.events.push(ev);
            tr.noise_events += 1;
            dirty[k] = true;
            true
        } else if noise {
            tr.noise_events += 1;
            dirty[k] = true;
            true
        } else {
            tr.attempts += 1;
            let ok = al.attempt(k, rule, &quiet, &effects, &mut tr.path)?;
            if ok {
                tr.accepted += 1;
                tr.noisy_accepted += dirty[k] as u64;
                dirty[k] = false;
            }
            ok
        };
        if let Some(ev) = tr.events.as_mut() {
            let kind = if noise { EventKind::NoiseJump } else { EventKind::CorrectionAttempt };
            ev.push(AsyncEvent { t, site: k, kind, accepted });
        }
        index += 1;
    }
    tr.lattice = al;
    Ok(tr)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub v: f64,
    pub half_width: f64,
    pub samples: usize,
}

/// Local-minimum density over samples taken at or after `t_min`, with a
/// batched-means confidence interval.
pub fn local_min_density(tr: &CtTrajectory, t_min: f64, batches: usize, conf: f64) -> Option<DensityEstimate> {
    let v: Vec<f64> = tr.density.iter().filter(|(t, _)| *t >= t_min).map(|&(_, f)| f).collect();
    let (mean, hw) = batched_means(&v, batches, conf)?;
    Some(DensityEstimate { v: mean, half_width: hw, samples: v.len() })
}

/// Fraction of accepted updates that followed at least one noise jump at
/// the same site since its previous accepted update.
pub fn effective_fault_rate(tr: &CtTrajectory) -> f64 {
    if tr.accepted == 0 {
        0.0
    } else {
        tr.noisy_accepted as f64 / tr.accepted as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{DataRule, Init, ScheduleParams};
    use crate::runtime::{run_sync, same_registers};
    use crate::stats::ks_exponential;

    fn lat(n: usize) -> (LatticeState, SiteRule) {
        let p = ScheduleParams::new(4, 2, 2, 1);
        (LatticeState::new(n, p, Init::Ideal, DataRule::default()).unwrap(), SiteRule::structure_only(p))
    }

    #[test]
    fn zero_duration_is_identity() {
        let (l, rule) = lat(8);
        let tr = run_ct(l.clone(), &rule, &CtParams::new(0.5, 0.0), 1).unwrap();
        assert_eq!(tr.lattice.cur, l);
        assert_eq!(tr.attempts + tr.noise_events, 0);
    }

    #[test]
    fn noiseless_counters_grow_and_match_sync() {
        let (l, rule) = lat(8);
        let mut cp = CtParams::new(0.0, 40.0);
        cp.keep_history = true;
        let tr = run_ct(l.clone(), &rule, &cp, 4).unwrap();
        let c = tr.lattice.min_counter();
        assert!(c > 3);
        assert_eq!(effective_fault_rate(&tr), 0.0);
        let mut s = l;
        run_sync(&mut s, &rule, c, &NoiseParams::noiseless(), &KeyedRng::new(0), 0).unwrap();
        assert!(same_registers(&tr.lattice.slice(c).unwrap(), &s));
    }

    #[test]
    fn waiting_times_are_exponential() {
        let (l, rule) = lat(8);
        let mut cp = CtParams::new(0.3, 200.0);
        cp.gap_cap = 10_000;
        let tr = run_ct(l, &rule, &cp, 5).unwrap();
        assert_eq!(tr.gaps.len(), 156 * 64);
        assert!(ks_exponential(&tr.gaps, 1.3).p_value > 0.01);
    }

    #[test]
    fn density_is_one_when_nothing_moves() {
        let (l, rule) = lat(8);
        let mut cp = CtParams::new(0.0, 0.5);
        cp.sample_rate = 1e4;
        let tr = run_ct(l, &rule, &cp, 2).unwrap();
        assert_eq!(tr.density[0].1, 1.0);
    }
}
