use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scale constants of the error-correcting schedule.
///
/// `t0` and `t` are stored so that a serialized manifest carries them, but
/// they are derived: use [`ScheduleParams::new`] or [`ScheduleParams::rederive`]
/// after editing the primary fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScheduleParams {
    pub m: u32,
    pub t_ref: u32,
    pub t_code: u32,
    pub t_sim: u32,
    pub t0: u32,
    pub t: u64,
    pub t_ec: u32,
    pub t_ec_s: u32,
    pub t_ec_d: u32,
    pub w: u32,
    pub r: u32,
    pub c_bound: u32,
    pub d_d: u64,
    pub d_s: u64,
    pub d: u64,
}

impl Default for ScheduleParams {
    fn default() -> Self {
        Self::new(24, 18, 6, 1)
    }
}

/// One checked inequality: its name and whether it holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub holds: bool,
}

impl ScheduleParams {
    /// Builds parameters with the default correction constants
    /// (`t_ec = 1`, `t_ec_s = 6`, `w = 3`, `R = 3`, `C = 1`).
    pub fn new(m: u32, t_ref: u32, t_code: u32, t_sim: u32) -> Self {
        let mut p = ScheduleParams {
            m,
            t_ref,
            t_code,
            t_sim,
            t0: 0,
            t: 0,
            t_ec: 1,
            t_ec_s: 6,
            t_ec_d: 7,
            w: 3,
            r: 3,
            c_bound: 1,
            d_d: 2,
            d_s: 0,
            d: 0,
        };
        p.rederive();
        p
    }

    /// Recomputes `t0`, `t`, `d_s` and `d` from the primary fields.
    pub fn rederive(&mut self) {
        self.t0 = self.t_ref + self.t_code;
        self.t = self.t0 as u64 * self.t_sim as u64;
        self.d_s = self.t0 as u64 * self.m as u64 * self.m as u64;
        self.d = self.d_s * self.d_d;
    }

    pub fn with_correction(mut self, t_ec_s: u32, w: u32) -> Self {
        self.t_ec_s = t_ec_s;
        self.w = w;
        self
    }

    /// Every structural inequality, in a fixed order.
    pub fn checks(&self) -> Vec<Check> {
        let c = |name, holds| Check { name, holds };
        vec![
            c("M >= 1", self.m >= 1),
            c("T_code >= 1", self.t_code >= 1),
            c("T_sim >= 1", self.t_sim >= 1),
            c("T0 = T_ref + T_code", self.t0 == self.t_ref + self.t_code),
            c("T = T0 * T_sim", self.t == self.t0 as u64 * self.t_sim as u64),
            c("M >= T0", self.m >= self.t0),
            c("T_ref >= w*t_EC_S", self.t_ref >= self.w * self.t_ec_s),
            c(
                "t_EC_D >= C*t_EC_S + t_EC",
                self.t_ec_d >= self.c_bound * self.t_ec_s + self.t_ec,
            ),
            c("t_EC_S >= 2*R", self.t_ec_s >= 2 * self.r),
        ]
    }

    /// Rejects the first violated inequality, naming it.
    pub fn validate(&self) -> Result<()> {
        match self.checks().into_iter().find(|c| !c.holds) {
            Some(c) => Err(Error::Config(format!("violates {}", c.name))),
            None => Ok(()),
        }
    }

    pub fn is_refresh(&self, step_in_cycle: u32) -> bool {
        step_in_cycle < self.t_ref
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_consistent() {
        let p = ScheduleParams::default();
        assert_eq!(p.t0, 24);
        assert_eq!(p.t, 24);
        p.validate().unwrap();
    }

    #[test]
    fn short_refresh_is_named() {
        let p = ScheduleParams::new(24, 10, 6, 1);
        let e = p.validate().unwrap_err();
        assert!(e.to_string().contains("T_ref >= w*t_EC_S"), "{e}");
    }

    #[test]
    fn small_block_is_named() {
        let e = ScheduleParams::new(20, 18, 6, 1).validate().unwrap_err();
        assert!(e.to_string().contains("M >= T0"), "{e}");
    }
}
