//! Monte Carlo estimate of how often level-1 structure exRecs fail.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::exrec::{block_health, classify_slice, partition_exrecs, SweepOrder};
use crate::error::{Error, Result};
use crate::lattice::{DataRule, Init, LatticeState, ScheduleParams};
use crate::noise::{eta_from_p, trial_seed, KeyedRng, NoiseParams};
use crate::schedule::{run_cycle, Recorder, SiteRule};
use crate::stats::{loglog_fit, wilson, z_value, LinearFit};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsityConfig {
    pub params: ScheduleParams,
    pub n: usize,
    pub p_grid: Vec<f64>,
    /// Points with fewer direct-bad events are left out of the fit.
    pub min_events: u64,
    /// Sampling at one p stops at this many exRecs.
    pub max_exrecs: u64,
    pub cycles_per_trial: u64,
    pub seed: u64,
    pub conf: f64,
}

impl SparsityConfig {
    /// Small exRecs (`M = T0 = t_EC_S + 1`) so that failures are frequent
    /// enough to count. These parameters deliberately ignore the schedule
    /// inequalities that only matter for the full construction.
    pub fn small(t_ec_s: u32, seed: u64) -> Self {
        let t = t_ec_s.max(1);
        let mut params = ScheduleParams::new(t + 1, t, 1, 1);
        params.t_ec_s = t;
        let m = (t + 1) as usize;
        SparsityConfig {
            params,
            n: m * (64 / m),
            p_grid: vec![1e-3, 1.8e-3, 3.2e-3, 5.6e-3, 1e-2],
            min_events: 50,
            max_exrecs: 20_000_000,
            cycles_per_trial: 8,
            seed,
            conf: 0.95,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SparsityPoint {
    pub p: f64,
    pub eta: f64,
    pub exrecs: u64,
    pub direct_bad: u64,
    pub p_direct_bad: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub bad: u64,
    pub p_bad: f64,
    pub bad_lo: f64,
    pub bad_hi: f64,
    /// `sqrt(P[direct_bad])`, the failure rate on the strength scale.
    pub eta_eff: f64,
    /// Derived: `P[bad]^(1/R)`.
    pub p_bad_root_r: f64,
    pub retained: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsityReport {
    pub t_ec_s: u32,
    pub points: Vec<SparsityPoint>,
    /// Fit of `ln P[direct_bad]` against `ln eta`.
    pub raw_fit: Option<LinearFit<f64>>,
    /// Fit of `ln sqrt(P[direct_bad])` against `ln eta`.
    pub strength_fit: Option<LinearFit<f64>>,
    /// `exp(intercept)` of the strength fit.
    pub implied_a_s: Option<f64>,
}

#[derive(Default, Clone, Copy)]
struct Tally {
    exrecs: u64,
    direct_bad: u64,
    bad: u64,
}

fn run_trial(cfg: &SparsityConfig, p: f64, trial: u64) -> Result<Tally> {
    let params = cfg.params;
    let rule = SiteRule::structure_only(params);
    let noise = NoiseParams::structure_only(p);
    let rng = KeyedRng::new(trial_seed(cfg.seed, trial));
    let mut lat = LatticeState::new(cfg.n, params, Init::Ideal, DataRule::default())?;
    let mut tally = Tally::default();
    let mut rec = Recorder::default();
    for _ in 0..cfg.cycles_per_trial {
        let slice = lat.global_time / params.t0 as u64;
        let health = block_health(&lat)?;
        let path = run_cycle(&mut lat, &rule, &noise, &rng, &mut rec)?;
        let part = partition_exrecs(&path, &health, &params, cfg.n, SweepOrder::Jacobi)?;
        for rep in classify_slice(slice, &part, &health, &params, cfg.n)? {
            tally.exrecs += 1;
            tally.direct_bad += rep.direct_bad as u64;
            tally.bad += !rep.good as u64;
        }
    }
    Ok(tally)
}

/// Estimates `P[direct_bad]` and `P[bad]` per exRec on `cfg.p_grid`.
/// Trial `k` uses the same keyed stream at every p, so fault sets are
/// nested across the grid.
pub fn estimate_level_noise(cfg: &SparsityConfig) -> Result<SparsityReport> {
    if cfg.p_grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::Config("p grid values must lie in [0, 1]".into()));
    }
    let per_trial = (cfg.n / cfg.params.m as usize).pow(2) as u64 * cfg.cycles_per_trial;
    let z = z_value(cfg.conf);
    let batch = rayon::current_num_threads().max(1) as u64 * 4;
    let mut points = Vec::new();
    for &p in &cfg.p_grid {
        let mut total = Tally::default();
        let mut next = 0u64;
        while p > 0.0 && total.direct_bad < cfg.min_events && total.exrecs + per_trial <= cfg.max_exrecs.max(per_trial) {
            let room = (cfg.max_exrecs.saturating_sub(total.exrecs) / per_trial).clamp(1, batch);
            let tallies: Vec<Tally> =
                (next..next + room).into_par_iter().map(|k| run_trial(cfg, p, k)).collect::<Result<_>>()?;
            next += room;
            for t in tallies {
                total.exrecs += t.exrecs;
                total.direct_bad += t.direct_bad;
                total.bad += t.bad;
            }
        }
        if p == 0.0 {
            total = run_trial(cfg, p, 0)?;
        }
        let nn = total.exrecs.max(1);
        let (lo, hi) = wilson(total.direct_bad, nn, z);
        let (blo, bhi) = wilson(total.bad, nn, z);
        let pd = total.direct_bad as f64 / nn as f64;
        let pb = total.bad as f64 / nn as f64;
        points.push(SparsityPoint {
            p,
            eta: eta_from_p(p),
            exrecs: total.exrecs,
            direct_bad: total.direct_bad,
            p_direct_bad: pd,
            ci_lo: lo,
            ci_hi: hi,
            bad: total.bad,
            p_bad: pb,
            bad_lo: blo,
            bad_hi: bhi,
            eta_eff: pd.sqrt(),
            p_bad_root_r: pb.powf(1.0 / cfg.params.r as f64),
            retained: p > 0.0 && total.direct_bad >= cfg.min_events,
        });
    }
    let kept: Vec<&SparsityPoint> = points.iter().filter(|q| q.retained).collect();
    let x: Vec<f64> = kept.iter().map(|q| q.eta).collect();
    let w: Vec<f64> = kept.iter().map(|q| q.direct_bad as f64).collect();
    let raw_fit = loglog_fit(&x, &kept.iter().map(|q| q.p_direct_bad).collect::<Vec<_>>(), &w);
    let strength_fit = loglog_fit(&x, &kept.iter().map(|q| q.eta_eff).collect::<Vec<_>>(), &w);
    Ok(SparsityReport {
        t_ec_s: cfg.params.t_ec_s,
        points,
        raw_fit,
        implied_a_s: strength_fit.map(|f| f.intercept.exp()),
        strength_fit,
    })
}
