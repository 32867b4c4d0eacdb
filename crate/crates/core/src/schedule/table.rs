//! Data schedule tables: `(phase, tau, x-class, y-class) -> gate`.
//!
//! Grammar, one rule per line, first match wins, unmatched entries idle:
//!
//! ```text
//! # phase  tau    x      y      gate
//! sim      *      *      *      maj
//! sim      20-23  last   *      cnot_n
//! ```
//!
//! - phase: `ref`, `sim` or `*`; refresh rules may only use `id`
//! - tau: `*`, `k` or `a-b` (inclusive)
//! - x, y: `*`, `first`, `last`, `interior`, `even`, `odd` or `k`
//! - gate: `id`, `not`, `maj`, `cnot_n`, `cnot_e`
//!
//! `maj` replaces the target by the majority of itself and its north and
//! east partners; `cnot_d` adds the partner in direction `d` to the target.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Dir;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    Id,
    Not,
    Maj,
    CnotN,
    CnotE,
}

impl GateKind {
    pub fn partners(self) -> &'static [Dir] {
        match self {
            GateKind::Id | GateKind::Not => &[],
            GateKind::Maj => &[Dir::N, Dir::E],
            GateKind::CnotN => &[Dir::N],
            GateKind::CnotE => &[Dir::E],
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            GateKind::Id => "id",
            GateKind::Not => "not",
            GateKind::Maj => "maj",
            GateKind::CnotN => "cnot_n",
            GateKind::CnotE => "cnot_e",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "id" => GateKind::Id,
            "not" => GateKind::Not,
            "maj" => GateKind::Maj,
            "cnot_n" => GateKind::CnotN,
            "cnot_e" => GateKind::CnotE,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
enum PhaseSel {
    Refresh,
    Simulation,
    Any,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
enum TauSel {
    Any,
    Range(u32, u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
enum CoordSel {
    Any,
    First,
    Last,
    Interior,
    Even,
    Odd,
    Exact(u32),
}

impl CoordSel {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "*" => CoordSel::Any,
            "first" => CoordSel::First,
            "last" => CoordSel::Last,
            "interior" => CoordSel::Interior,
            "even" => CoordSel::Even,
            "odd" => CoordSel::Odd,
            k => CoordSel::Exact(k.parse().ok()?),
        })
    }

    fn matches(self, v: u32, m: u32) -> bool {
        match self {
            CoordSel::Any => true,
            CoordSel::First => v == 0,
            CoordSel::Last => v + 1 == m,
            CoordSel::Interior => v != 0 && v + 1 != m,
            CoordSel::Even => v % 2 == 0,
            CoordSel::Odd => v % 2 == 1,
            CoordSel::Exact(k) => v == k,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct Rule {
    phase: PhaseSel,
    tau: TauSel,
    x: CoordSel,
    y: CoordSel,
    gate: GateKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleTable {
    pub name: String,
    rules: Vec<Rule>,
}

impl ScheduleTable {
    pub fn parse(name: &str, text: &str) -> Result<Self> {
        let mut rules = Vec::new();
        for (no, raw) in text.lines().enumerate().map(|(k, l)| (k + 1, l)) {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 5 {
                return Err(Error::parse(no, format!("expected 5 fields, found {}", f.len())));
            }
            let phase = match f[0] {
                "ref" => PhaseSel::Refresh,
                "sim" => PhaseSel::Simulation,
                "*" => PhaseSel::Any,
                p => return Err(Error::parse(no, format!("unknown phase `{p}`"))),
            };
            let tau = if f[1] == "*" {
                TauSel::Any
            } else if let Some((a, b)) = f[1].split_once('-') {
                let a = a.parse().map_err(|_| Error::parse(no, "bad tau range"))?;
                let b = b.parse().map_err(|_| Error::parse(no, "bad tau range"))?;
                TauSel::Range(a, b)
            } else {
                let k = f[1].parse().map_err(|_| Error::parse(no, "bad tau"))?;
                TauSel::Range(k, k)
            };
            let x = CoordSel::parse(f[2]).ok_or_else(|| Error::parse(no, format!("bad x class `{}`", f[2])))?;
            let y = CoordSel::parse(f[3]).ok_or_else(|| Error::parse(no, format!("bad y class `{}`", f[3])))?;
            let gate = GateKind::parse(f[4]).ok_or_else(|| Error::parse(no, format!("unknown gate `{}`", f[4])))?;
            if gate != GateKind::Id && phase != PhaseSel::Simulation {
                return Err(Error::parse(no, "data registers are idle during refresh; only `id` may match it"));
            }
            rules.push(Rule { phase, tau, x, y, gate });
        }
        Ok(ScheduleTable { name: name.to_string(), rules })
    }

    /// Gate selected by the given (Toom-adjusted) registers.
    pub fn lookup(&self, refresh: bool, tau: u32, x: u32, y: u32, m: u32) -> GateKind {
        if refresh {
            return GateKind::Id;
        }
        self.rules
            .iter()
            .find(|r| {
                r.phase != PhaseSel::Refresh
                    && match r.tau {
                        TauSel::Any => true,
                        TauSel::Range(a, b) => (a..=b).contains(&tau),
                    }
                    && r.x.matches(x, m)
                    && r.y.matches(y, m)
            })
            .map_or(GateKind::Id, |r| r.gate)
    }

    /// Pure memory: every data location idles.
    pub fn identity() -> Self {
        Self::parse("identity", "* * * * id").expect("builtin table")
    }

    /// Classical repetition correction: Toom majority on the data bits in
    /// every simulation step.
    pub fn repetition() -> Self {
        Self::parse("repetition", "sim * * * maj").expect("builtin table")
    }

    /// A mixed table exercising every gate kind, used in schedule tests.
    pub fn exercise() -> Self {
        Self::parse(
            "exercise",
            "sim * last * cnot_n\n\
             sim * * last cnot_e\n\
             sim * even even not\n\
             sim * * * maj\n",
        )
        .expect("builtin table")
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "identity" => Some(Self::identity()),
            "repetition" => Some(Self::repetition()),
            "exercise" => Some(Self::exercise()),
            _ => None,
        }
    }
}
