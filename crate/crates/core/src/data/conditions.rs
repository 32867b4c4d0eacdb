//! Exhaustive checks of the two gadget conditions and of extended-rectangle
//! correctness.
//!
//! A1 (decoder commutation): for input error weight `r` and `s` faults with
//! `r + s <= t`, decoding the output gives the same logical result as
//! running the noiseless gadget on the decoded input.
//!
//! A2 (output confinement, EC gadgets only): for any input and `s <= t`
//! faults, every output block lies within `s` errors of the code space.

use serde::{Deserialize, Serialize};

use super::code::{errors_of_weight, CodeKind, CodeSpec, PauliOp};
use super::pauli::{run_gadget, GadgetCircuit, PauliFault, PauliFrameState, Role};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub condition: String,
    /// Logical input values (basis mode), bit `b` for block `b`.
    pub logical_input: u64,
    pub input_error: PauliOp,
    pub faults: Vec<PauliFault>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub gadget: String,
    pub code: String,
    pub t_ec_d: usize,
    pub max_faults: usize,
    pub a1_pass: bool,
    pub a1_cases: u64,
    pub a1_counterexample: Option<Counterexample>,
    /// `None` for gadgets that are not error corrections.
    pub a2_pass: Option<bool>,
    pub a2_cases: u64,
    pub a2_counterexample: Option<Counterexample>,
    /// Enumeration stopped at the case cap.
    pub partial: bool,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.a1_pass && self.a2_pass.unwrap_or(true) && !self.partial
    }
}

pub const DEFAULT_CASE_CAP: u64 = 20_000_000;

/// Every single-location fault on `g`: all non-identity errors on its support.
pub fn single_faults(g: &GadgetCircuit, bit_only: bool) -> Vec<PauliFault> {
    let mut out = Vec::new();
    for (loc, gate) in g.gates.iter().enumerate() {
        let sup = gate.support();
        let k = sup.len();
        let spread = |m: u64| sup.iter().enumerate().fold(0u64, |a, (b, &q)| a | (m >> b & 1) << q);
        for xm in 0..1u64 << k {
            for zm in 0..if bit_only { 1 } else { 1u64 << k } {
                if xm | zm != 0 {
                    out.push(PauliFault { location: loc, x: spread(xm), z: spread(zm) });
                }
            }
        }
    }
    out
}

/// Calls `f` on every set of `s` faults at distinct locations.
pub fn for_each_fault_set(choices: &[PauliFault], s: usize, f: &mut impl FnMut(&[PauliFault]) -> bool) -> bool {
    fn go(
        choices: &[PauliFault],
        start: usize,
        left: usize,
        acc: &mut Vec<PauliFault>,
        f: &mut impl FnMut(&[PauliFault]) -> bool,
    ) -> bool {
        if left == 0 {
            return f(acc);
        }
        for k in start..choices.len() {
            if acc.iter().any(|a| a.location == choices[k].location) {
                continue;
            }
            acc.push(choices[k]);
            let go_on = go(choices, k + 1, left - 1, acc, f);
            acc.pop();
            if !go_on {
                return false;
            }
        }
        true
    }
    go(choices, 0, s, &mut Vec::new(), f)
}

struct Layout<'a> {
    g: &'a GadgetCircuit,
    code: &'a CodeSpec,
    basis_mode: bool,
}

impl Layout<'_> {
    fn data_qubits(&self) -> Vec<usize> {
        self.g.blocks.iter().flatten().copied().collect()
    }

    fn block_op(&self, b: usize, x: u64, z: u64) -> PauliOp {
        let qs = &self.g.blocks[b];
        let pick = |v: u64| qs.iter().enumerate().fold(0u64, |a, (k, &q)| a | (v >> q & 1) << k);
        PauliOp::new(pick(x), pick(z))
    }

    fn embed(&self, b: usize, op: PauliOp) -> (u64, u64) {
        let qs = &self.g.blocks[b];
        let put = |v: u64| qs.iter().enumerate().fold(0u64, |a, (k, &q)| a | (v >> k & 1) << q);
        (put(op.x), put(op.z))
    }

    fn spread(&self, e: PauliOp) -> (u64, u64) {
        let dq = self.data_qubits();
        let put = |v: u64| dq.iter().enumerate().fold(0u64, |a, (k, &q)| a | (v >> k & 1) << q);
        (put(e.x), put(e.z))
    }

    fn basis_for(&self, logical: u64) -> u64 {
        (0..self.g.blocks.len())
            .map(|b| self.embed(b, PauliOp::new(self.code.codeword_bits((logical >> b & 1) as u8), 0)).0)
            .fold(0, |a, v| a | v)
    }

    /// Per-block logical content of a state, as (x, z) flags packed two bits per block.
    fn decode(&self, st: &PauliFrameState) -> u64 {
        let mut out = 0;
        for b in 0..self.g.blocks.len() {
            let d = if self.basis_mode {
                let bits = st.bits().expect("basis mode");
                let v = self.code.decode_bits(self.block_op(b, bits, 0).x);
                (v as u64, 0)
            } else {
                let r = self.code.ideal_decode(&self.block_op(b, st.x, st.z));
                (r.logical_x as u64, r.logical_z as u64)
            };
            out |= d.0 << (2 * b) | d.1 << (2 * b + 1);
        }
        out
    }

    /// The input with every block replaced by its decoded codeword.
    fn corrected(&self, st: &PauliFrameState) -> PauliFrameState {
        if self.basis_mode {
            let bits = st.bits().expect("basis mode");
            let mut logical = 0;
            for b in 0..self.g.blocks.len() {
                logical |= (self.code.decode_bits(self.block_op(b, bits, 0).x) as u64) << b;
            }
            PauliFrameState::classical(self.basis_for(logical), 0)
        } else {
            let (mut x, mut z) = (st.x, st.z);
            for b in 0..self.g.blocks.len() {
                let c = self.code.ideal_decode(&self.block_op(b, st.x, st.z)).correction;
                let (cx, cz) = self.embed(b, c);
                x ^= cx;
                z ^= cz;
            }
            PauliFrameState::frame(x, z)
        }
    }

    /// Whether every block of the output is within `s` errors of the code space.
    fn confined(&self, st: &PauliFrameState, ok: &std::collections::HashSet<u64>) -> bool {
        (0..self.g.blocks.len()).all(|b| {
            let op = match st.bits() {
                Some(bits) if self.basis_mode => self.block_op(b, bits, 0),
                _ => self.block_op(b, st.x, st.z),
            };
            ok.contains(&self.code.syndrome(&op))
        })
    }
}

fn mode_for(g: &GadgetCircuit, code: &CodeSpec) -> Result<bool> {
    match (code.kind, g.is_classical()) {
        (CodeKind::BitFlip, true) => Ok(true),
        (_, _) if g.gates.iter().all(|x| !matches!(x, super::pauli::Gate::Toffoli(..))) => Ok(false),
        _ => Err(Error::UnsupportedGate(format!(
            "{} mixes non-Clifford gates with a stabilizer code",
            g.name
        ))),
    }
}

/// Exhaustive A1/A2 enumeration with at most `max_faults <= t_ec_d` faults.
pub fn check_gadget_conditions(
    g: &GadgetCircuit,
    code: &CodeSpec,
    t_ec_d: usize,
    max_faults: usize,
    case_cap: u64,
) -> Result<ConditionReport> {
    if max_faults > t_ec_d {
        return Err(Error::Config(format!("max_faults {max_faults} exceeds t_EC_D {t_ec_d}")));
    }
    if g.blocks.iter().any(|b| b.len() != code.n) {
        return Err(Error::Config(format!("gadget {} blocks do not match code size {}", g.name, code.n)));
    }
    let lay = Layout { g, code, basis_mode: mode_for(g, code)? };
    let choices = single_faults(g, lay.basis_mode);
    let nblocks = g.blocks.len();
    let ndata = nblocks * code.n;
    let logicals: Vec<u64> = if lay.basis_mode { (0..1u64 << nblocks).collect() } else { vec![0] };
    let state = |logical: u64, e: (u64, u64)| {
        if lay.basis_mode {
            PauliFrameState::classical(lay.basis_for(logical), e.0)
        } else {
            PauliFrameState::frame(e.0, e.1)
        }
    };
    let mut report = ConditionReport {
        gadget: g.name.clone(),
        code: code.name.clone(),
        t_ec_d,
        max_faults,
        a1_pass: true,
        a1_cases: 0,
        a1_counterexample: None,
        a2_pass: None,
        a2_cases: 0,
        a2_counterexample: None,
        partial: false,
    };
    let mut err = None;
    'a1: for r in 0..=t_ec_d {
        for s in 0..=max_faults.min(t_ec_d - r) {
            for e in errors_of_weight(ndata, r, code.kind) {
                for &logical in &logicals {
                    let input = state(logical, lay.spread(e));
                    let want = match run_gadget(g, &lay.corrected(&input), &[]) {
                        Ok(o) => lay.decode(&o),
                        Err(x) => {
                            err = Some(x);
                            break 'a1;
                        }
                    };
                    let mut cex = None;
                    let completed = for_each_fault_set(&choices, s, &mut |fs| {
                        report.a1_cases += 1;
                        if report.a1_cases > case_cap {
                            report.partial = true;
                            return false;
                        }
                        match run_gadget(g, &input, fs) {
                            Ok(out) => {
                                let got = lay.decode(&out);
                                if got != want {
                                    cex = Some(Counterexample {
                                        condition: "A1".into(),
                                        logical_input: logical,
                                        input_error: e,
                                        faults: fs.to_vec(),
                                        detail: format!("decoded output {got:#b}, expected {want:#b}"),
                                    });
                                    return false;
                                }
                                true
                            }
                            Err(x) => {
                                err = Some(x);
                                false
                            }
                        }
                    });
                    if let Some(c) = cex {
                        report.a1_pass = false;
                        report.a1_counterexample = Some(c);
                        break 'a1;
                    }
                    if !completed {
                        break 'a1;
                    }
                }
            }
        }
    }
    if let Some(e) = err {
        return Err(e);
    }
    if g.role == Role::EC && !report.partial {
        report.a2_pass = Some(true);
        let inputs: Vec<PauliOp> = (0..=ndata).flat_map(|w| errors_of_weight(ndata, w, code.kind)).collect();
        'a2: for s in 0..=max_faults {
            let ok = code.correctable_syndromes(s);
            for e in &inputs {
                let input = state(0, lay.spread(*e));
                let mut cex = None;
                let completed = for_each_fault_set(&choices, s, &mut |fs| {
                    report.a2_cases += 1;
                    if report.a2_cases > case_cap {
                        report.partial = true;
                        return false;
                    }
                    let out = run_gadget(g, &input, fs).expect("validated above");
                    if !lay.confined(&out, &ok) {
                        cex = Some(Counterexample {
                            condition: "A2".into(),
                            logical_input: 0,
                            input_error: *e,
                            faults: fs.to_vec(),
                            detail: format!("output leaves the {s}-correctable set"),
                        });
                        return false;
                    }
                    true
                });
                if let Some(c) = cex {
                    report.a2_pass = Some(false);
                    report.a2_counterexample = Some(c);
                    break 'a2;
                }
                if !completed {
                    break 'a2;
                }
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExRecCheck {
    pub exrec: String,
    pub max_faults: usize,
    /// Cases with at most `max_faults` faults (good extended rectangles).
    pub good_cases: u64,
    pub good_failures: u64,
    pub counterexample: Option<Counterexample>,
    /// Failures among cases with `max_faults + 1` faults on codeword inputs,
    /// for contrast.
    pub bad_cases: u64,
    pub bad_failures: u64,
}

impl ExRecCheck {
    pub fn passed(&self) -> bool {
        self.good_failures == 0
    }
}

/// Checks that the ideal decoder commutes through an extended rectangle:
/// decoding its output equals the ideal gate applied to the decoded state
/// after the leading corrections, for every input and every fault set of at
/// most `t` faults. `lead_len` is the gate count of the leading part.
pub fn exrec_correctness(exrec: &GadgetCircuit, lead_len: usize, code: &CodeSpec, t: usize) -> Result<ExRecCheck> {
    let lay = Layout { g: exrec, code, basis_mode: mode_for(exrec, code)? };
    if !lay.basis_mode {
        return Err(Error::Config("extended-rectangle check runs in basis mode only".into()));
    }
    let mut lead = exrec.clone();
    lead.gates.truncate(lead_len);
    let mut rest = exrec.clone();
    rest.gates.drain(..lead_len);
    let choices = single_faults(exrec, true);
    let ndata = exrec.blocks.len() * code.n;
    let mut out = ExRecCheck {
        exrec: exrec.name.clone(),
        max_faults: t,
        good_cases: 0,
        good_failures: 0,
        counterexample: None,
        bad_cases: 0,
        bad_failures: 0,
    };
    for input_bits in 0..1u64 << ndata {
        let input = PauliFrameState::classical(0, lay.spread(PauliOp::new(input_bits, 0)).0);
        let codeword_input = (0..exrec.blocks.len()).all(|b| {
            let v = lay.block_op(b, lay.spread(PauliOp::new(input_bits, 0)).0, 0).x;
            v == 0 || v == code.codeword_bits(1)
        });
        let top = if codeword_input { t + 1 } else { t };
        for s in 0..=top {
            for_each_fault_set(&choices, s, &mut |fs| {
                let full = run_gadget(exrec, &input, fs).expect("classical circuit");
                let lead_faults: Vec<PauliFault> = fs.iter().copied().filter(|f| f.location < lead_len).collect();
                let mid = run_gadget(&lead, &input, &lead_faults).expect("classical circuit");
                let ideal = run_gadget(&rest, &lay.corrected(&mid), &[]).expect("classical circuit");
                let ok = lay.decode(&full) == lay.decode(&ideal);
                if s <= t {
                    out.good_cases += 1;
                    if !ok {
                        out.good_failures += 1;
                        out.counterexample.get_or_insert_with(|| Counterexample {
                            condition: "exRec".into(),
                            logical_input: 0,
                            input_error: PauliOp::new(input_bits, 0),
                            faults: fs.to_vec(),
                            detail: "decoder does not commute".into(),
                        });
                    }
                } else {
                    out.bad_cases += 1;
                    out.bad_failures += (!ok) as u64;
                }
                true
            });
        }
    }
    Ok(out)
}
