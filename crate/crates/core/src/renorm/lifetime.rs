//! Memory lifetime of a classical bit stored in a plain Toom lattice under
//! independent bit flips.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{derive_seed, trial_seed};
use crate::stats::median_ci;
use crate::structure::BitGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LifetimeRow {
    pub l: usize,
    pub p_index: usize,
    pub trial: u64,
    pub lifetime: u64,
    pub censored: bool,
}

/// Steps until the majority of an `l`x`l` lattice, started all zero, stops
/// reading zero (ties count as failure). Each step applies Toom's rule and
/// then flips every bit with probability `p`. Returns `(steps, censored)`.
pub fn lifetime_trial(l: usize, p: f64, cap: u64, seed: u64) -> Result<(u64, bool)> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Config(format!("flip probability {p} outside [0, 1]")));
    }
    let len = (l * l) as u64;
    let mut a = BitGrid::new(l);
    let mut b = BitGrid::new(l);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let geo = if p > 0.0 { Some(Geometric::new(p).map_err(|e| Error::Config(e.to_string()))?) } else { None };
    // Position of the next flip in the (step, site) sequence, relative to the current step.
    let mut next = geo.as_ref().map(|g| g.sample(&mut rng));
    for step in 1..=cap {
        a.toom_step_into(&mut b);
        std::mem::swap(&mut a, &mut b);
        if let (Some(g), Some(pos)) = (geo.as_ref(), next.as_mut()) {
            while *pos < len {
                a.flip_index(*pos as usize);
                *pos += 1 + g.sample(&mut rng);
            }
            *pos -= len;
        }
        if 2 * a.count_ones() as u64 >= len {
            return Ok((step, false));
        }
    }
    Ok((cap, true))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifetimeConfig {
    pub sizes: Vec<usize>,
    pub p_grid: Vec<f64>,
    pub trials: u64,
    pub cap: u64,
    pub seed: u64,
    pub conf: f64,
    /// Block size used to report the deepest level that fits.
    pub m: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LifetimeSummary {
    pub l: usize,
    pub p: f64,
    pub trials: u64,
    pub censored: u64,
    pub median: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// The median itself is a censored value.
    pub median_censored: bool,
    /// The upper confidence bound is a censored value.
    pub ci_censored: bool,
    pub k_max: u32,
}

/// Largest `k` with `m^k <= l`.
pub fn k_max(l: usize, m: usize) -> u32 {
    if m < 2 {
        return 0;
    }
    let mut k = 0;
    let mut size = m;
    while size <= l {
        k += 1;
        size = match size.checked_mul(m) {
            Some(s) => s,
            None => break,
        };
    }
    k
}

pub fn lifetime_experiment(cfg: &LifetimeConfig) -> Result<(Vec<LifetimeRow>, Vec<LifetimeSummary>)> {
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for &l in &cfg.sizes {
        for (pi, &p) in cfg.p_grid.iter().enumerate() {
            let base = derive_seed(cfg.seed, &format!("lifetime-{l}-{pi}"));
            let runs: Vec<(u64, bool)> = (0..cfg.trials)
                .into_par_iter()
                .map(|k| lifetime_trial(l, p, cfg.cap, trial_seed(base, k)))
                .collect::<Result<_>>()?;
            let mut sorted: Vec<f64> = runs.iter().map(|r| r.0 as f64).collect();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let (median, lo, hi) = median_ci(&sorted, cfg.conf).unwrap_or((f64::NAN, f64::NAN, f64::NAN));
            let censored = runs.iter().filter(|r| r.1).count() as u64;
            let capf = cfg.cap as f64;
            summaries.push(LifetimeSummary {
                l,
                p,
                trials: cfg.trials,
                censored,
                median,
                ci_lo: lo,
                ci_hi: hi,
                median_censored: censored > 0 && median >= capf,
                ci_censored: censored > 0 && hi >= capf,
                k_max: k_max(l, cfg.m),
            });
            rows.extend(runs.iter().enumerate().map(|(k, r)| LifetimeRow {
                l,
                p_index: pi,
                trial: k as u64,
                lifetime: r.0,
                censored: r.1,
            }));
        }
    }
    Ok((rows, summaries))
}
