//! The level-to-level recursion `eta' = A * eta^(t + 1)`.
//!
//! Iteration runs on `l = ln(eta / eta_th)`, where the recursion reads
//! `l' = (t + 1) * l`. This keeps deep levels accurate long after `eta`
//! itself would underflow in a direct product.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenormFlow<T> {
    pub a: T,
    pub t_ec: u32,
    pub eta0: T,
    pub k: u32,
    pub eta_th: T,
    /// Iterated strengths for levels `0..=k`.
    pub eta_per_level: Vec<T>,
    /// `eta_th * (eta0 / eta_th)^((t + 1)^l)` for the same levels, evaluated
    /// from the same `ln(eta0 / eta_th)` as the iteration.
    pub closed_form: Vec<T>,
    /// Largest relative deviation between the two (zero when both vanish).
    pub max_rel_err: T,
    /// `eta0 < eta_th`: strengths shrink with the level.
    pub suppressing: bool,
}

impl<T: Real> RenormFlow<T> {
    pub fn eta_log(&self) -> T {
        *self.eta_per_level.last().expect("level 0 is always present")
    }
}

pub fn threshold<T: Real>(a: T, t_ec: u32) -> T {
    a.powf(-T::one() / T::from_u32(t_ec).unwrap())
}

fn rel_err<T: Real>(x: T, y: T) -> T {
    if x == y {
        return T::zero();
    }
    let s = x.abs().max(y.abs());
    if !s.is_finite() {
        return T::infinity();
    }
    (x - y).abs() / s
}

pub fn renorm_flow<T: Real>(eta0: T, a: T, t_ec: u32, k: u32) -> Result<RenormFlow<T>> {
    if !(a > T::zero()) || t_ec == 0 || !(eta0 >= T::zero()) {
        return Err(Error::Config("flow needs A > 0, t_EC >= 1 and eta0 >= 0".into()));
    }
    let eta_th = threshold(a, t_ec);
    let ln_th = eta_th.ln();
    let l0 = eta0.ln() - ln_th;
    let mult = T::from_u32(t_ec + 1).unwrap();
    let mut l = l0;
    let mut eta_per_level = Vec::with_capacity(k as usize + 1);
    let mut closed_form = Vec::with_capacity(k as usize + 1);
    let mut max_rel_err = T::zero();
    for level in 0..=k {
        if level > 0 {
            l = mult * l;
        }
        let it = (l + ln_th).exp();
        let cf = eta_th * (l0 * mult.powi(level as i32)).exp();
        max_rel_err = max_rel_err.max(rel_err(it, cf));
        eta_per_level.push(it);
        closed_form.push(cf);
    }
    Ok(RenormFlow { a, t_ec, eta0, k, eta_th, eta_per_level, closed_form, max_rel_err, suppressing: eta0 < eta_th })
}

/// Levels needed for `N * D * eta_k <= delta`; `None` when `eta0 >= eta_th`
/// and the flow never shrinks.
pub fn required_levels(n: f64, d: f64, delta: f64, eta0: f64, a: f64, t_ec: u32) -> Result<Option<u32>> {
    if !(n > 0.0 && d > 0.0 && delta > 0.0) {
        return Err(Error::Config("N, D and delta must be positive".into()));
    }
    Ok(levels_for_log_ratio(n.ln() + d.ln() - delta.ln(), eta0, a, t_ec))
}

/// [`required_levels`] in terms of `x = ln(N D / delta)`.
pub fn levels_for_log_ratio(x: f64, eta0: f64, a: f64, t_ec: u32) -> Option<u32> {
    let target = -x;
    let eta_th = threshold(a, t_ec);
    if eta0.ln() <= target {
        return Some(0);
    }
    if eta0 >= eta_th {
        return None;
    }
    let ln_th = eta_th.ln();
    let mut l = eta0.ln() - ln_th;
    for k in 1..=512u32 {
        l *= (t_ec + 1) as f64;
        if l + ln_th <= target {
            return Some(k);
        }
    }
    None
}

/// Largest increase of [`required_levels`] when `ln(N D / delta)` doubles,
/// over the grid `x0 * 2^j`, `j <= doublings`.
pub fn max_levels_per_doubling(x0: f64, doublings: u32, eta0: f64, a: f64, t_ec: u32) -> Option<u32> {
    let mut prev = None;
    let mut worst = 0;
    for j in 0..=doublings {
        let x = x0 * 2f64.powi(j as i32);
        let k = levels_for_log_ratio(x, eta0, a, t_ec)?;
        if let Some(p) = prev {
            worst = worst.max(k - p);
        }
        prev = Some(k);
    }
    Some(worst)
}
