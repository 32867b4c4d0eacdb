//! Increasing search for scale constants satisfying the self-consistency
//! constraints between block size, cycle length and program length.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Check, ScheduleParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityConstraints {
    pub d_d: u64,
    /// `T_sim >= c_sim * M`
    pub c_sim: f64,
    /// `M >= c_prog * polylog(T0)`
    pub c_prog: f64,
    /// `d = c_dim * d_D * T0 * M^2`
    pub c_dim: f64,
    pub t_code: u32,
    pub t_ref_min: u32,
}

impl Default for FeasibilityConstraints {
    fn default() -> Self {
        FeasibilityConstraints { d_d: 12, c_sim: 1.0, c_prog: 1.0, c_dim: 1.0, t_code: 6, t_ref_min: 18 }
    }
}

/// The program-length bound, fixed to `(log2 T0)^2`.
pub fn polylog(t0: u32) -> f64 {
    (t0 as f64).log2().powi(2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feasibility {
    pub params: ScheduleParams,
    pub checks: Vec<(String, bool)>,
    pub consistent: bool,
}

fn dimension(c: &FeasibilityConstraints, t0: u32, m: u32) -> u64 {
    (c.c_dim * c.d_d as f64 * t0 as f64 * (m as f64).powi(2)).ceil() as u64
}

/// The six inequalities, evaluated independently of the search.
pub fn feasibility_checks(p: &ScheduleParams, c: &FeasibilityConstraints) -> Vec<Check> {
    let chk = |name, holds| Check { name, holds };
    vec![
        chk("T0 = T_ref + T_code", p.t0 == p.t_ref + p.t_code && p.t_code == c.t_code),
        chk("M >= T0", p.m >= p.t0),
        chk("T_ref >= T_ref_min", p.t_ref >= c.t_ref_min),
        chk("T_sim >= c_sim*M", p.t_sim as f64 >= c.c_sim * p.m as f64),
        chk("M >= c_prog*(log2 T0)^2", p.m as f64 >= c.c_prog * polylog(p.t0)),
        chk("d = c_dim*d_D*T0*M^2", p.d_d == c.d_d && p.d == dimension(c, p.t0, p.m)),
    ]
}

fn report(params: ScheduleParams, c: &FeasibilityConstraints) -> Feasibility {
    let checks: Vec<(String, bool)> =
        feasibility_checks(&params, c).into_iter().map(|k| (k.name.to_string(), k.holds)).collect();
    let consistent = checks.iter().all(|(_, h)| *h);
    Feasibility { params, checks, consistent }
}

/// Lexicographically smallest `(M, T0, T_sim, d)` meeting every constraint,
/// searching `M = 1, 2, ..., m_cap`. A feasible `candidate` is returned as is.
pub fn solve_params(
    c: &FeasibilityConstraints,
    candidate: Option<&ScheduleParams>,
    m_cap: u32,
) -> Result<Feasibility> {
    if c.c_sim < 1.0 || c.c_prog < 1.0 || c.c_dim < 1.0 || c.d_d < 1 {
        return Err(Error::Config("feasibility constants must be >= 1".into()));
    }
    if let Some(p) = candidate {
        let r = report(*p, c);
        if r.consistent {
            return Ok(r);
        }
    }
    let t_ref = c.t_ref_min;
    let t0 = t_ref + c.t_code;
    for m in 1..=m_cap {
        if m < t0 || (m as f64) < c.c_prog * polylog(t0) {
            continue;
        }
        let t_sim = (c.c_sim * m as f64).ceil() as u32;
        let mut p = ScheduleParams::new(m, t_ref, c.t_code, t_sim);
        p.d_d = c.d_d;
        p.rederive();
        p.d = dimension(c, t0, m);
        return Ok(report(p, c));
    }
    Err(Error::Infeasible { cap: m_cap })
}
