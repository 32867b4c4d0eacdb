//! Gadget circuits and Pauli-frame propagation.
//!
//! Two modes share one entry point. Without a basis reference the circuit
//! must be Clifford and the frame `(x, z)` is pushed through gate by gate.
//! With a basis reference the circuit must be classical-reversible
//! (X, CNOT, SWAP, Toffoli, reset); the faulty and ideal bit strings are
//! simulated side by side and the frame is their difference.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    S(usize),
    X(usize),
    Z(usize),
    Cnot(usize, usize),
    Cz(usize, usize),
    Swap(usize, usize),
    Toffoli(usize, usize, usize),
    Reset(usize),
    Idle(usize),
    /// Anything else, e.g. a `T` gate; always rejected by the simulator.
    Other(String, Vec<usize>),
}

impl Gate {
    pub fn support(&self) -> Vec<usize> {
        match self {
            Gate::H(q) | Gate::S(q) | Gate::X(q) | Gate::Z(q) | Gate::Reset(q) | Gate::Idle(q) => vec![*q],
            Gate::Cnot(a, b) | Gate::Cz(a, b) | Gate::Swap(a, b) => vec![*a, *b],
            Gate::Toffoli(a, b, c) => vec![*a, *b, *c],
            Gate::Other(_, q) => q.clone(),
        }
    }

    pub fn support_mask(&self) -> u64 {
        self.support().iter().fold(0, |m, q| m | 1 << q)
    }

    fn name(&self) -> String {
        match self {
            Gate::Other(n, _) => n.clone(),
            g => format!("{g:?}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    Prep,
    Gate1,
    Gate2,
    EC,
    Measure,
}

/// A fixed, measurement-free circuit over `width` qubits. `blocks` lists
/// the data qubits of each code block in code order; the rest are ancillas.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetCircuit {
    pub name: String,
    pub role: Role,
    pub width: usize,
    pub blocks: Vec<Vec<usize>>,
    pub gates: Vec<Gate>,
}

impl GadgetCircuit {
    pub fn ancillas(&self) -> Vec<usize> {
        (0..self.width).filter(|q| !self.blocks.iter().flatten().any(|d| d == q)).collect()
    }

    pub fn is_classical(&self) -> bool {
        self.gates
            .iter()
            .all(|g| matches!(g, Gate::X(_) | Gate::Cnot(..) | Gate::Swap(..) | Gate::Toffoli(..) | Gate::Reset(_) | Gate::Idle(_)))
    }

    /// Concatenates circuits over the same register layout.
    pub fn then(mut self, other: &GadgetCircuit) -> GadgetCircuit {
        self.name = format!("{}+{}", self.name, other.name);
        self.width = self.width.max(other.width);
        self.gates.extend(other.gates.iter().cloned());
        self
    }

    /// Relabels qubits through `map`.
    pub fn remap(&self, map: &[usize], width: usize) -> GadgetCircuit {
        let r = |q: usize| map[q];
        let gates = self
            .gates
            .iter()
            .map(|g| match g {
                Gate::H(q) => Gate::H(r(*q)),
                Gate::S(q) => Gate::S(r(*q)),
                Gate::X(q) => Gate::X(r(*q)),
                Gate::Z(q) => Gate::Z(r(*q)),
                Gate::Reset(q) => Gate::Reset(r(*q)),
                Gate::Idle(q) => Gate::Idle(r(*q)),
                Gate::Cnot(a, b) => Gate::Cnot(r(*a), r(*b)),
                Gate::Cz(a, b) => Gate::Cz(r(*a), r(*b)),
                Gate::Swap(a, b) => Gate::Swap(r(*a), r(*b)),
                Gate::Toffoli(a, b, c) => Gate::Toffoli(r(*a), r(*b), r(*c)),
                Gate::Other(n, q) => Gate::Other(n.clone(), q.iter().map(|&q| r(q)).collect()),
            })
            .collect();
        GadgetCircuit {
            name: self.name.clone(),
            role: self.role,
            width,
            blocks: self.blocks.iter().map(|b| b.iter().map(|&q| r(q)).collect()).collect(),
            gates,
        }
    }
}

/// X/Z error masks over the circuit width, plus the ideal classical bit
/// values when simulating in basis mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PauliFrameState {
    pub x: u64,
    pub z: u64,
    pub basis: Option<u64>,
}

impl PauliFrameState {
    pub fn frame(x: u64, z: u64) -> Self {
        PauliFrameState { x, z, basis: None }
    }

    pub fn classical(basis: u64, x: u64) -> Self {
        PauliFrameState { x, z: 0, basis: Some(basis) }
    }

    /// Actual bit values in basis mode.
    pub fn bits(&self) -> Option<u64> {
        self.basis.map(|b| b ^ self.x)
    }
}

/// A Pauli error injected right after gate `location`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliFault {
    pub location: usize,
    pub x: u64,
    pub z: u64,
}

#[inline]
fn bit(v: u64, q: usize) -> u64 {
    v >> q & 1
}

#[inline]
fn swap_bits(v: u64, a: usize, b: usize) -> u64 {
    let d = (bit(v, a) ^ bit(v, b)) & 1;
    v ^ (d << a) ^ (d << b)
}

fn classical_gate(g: &Gate, v: u64) -> Result<u64> {
    Ok(match g {
        Gate::X(q) => v ^ 1 << q,
        Gate::Cnot(c, t) => v ^ bit(v, *c) << t,
        Gate::Swap(a, b) => swap_bits(v, *a, *b),
        Gate::Toffoli(a, b, t) => v ^ (bit(v, *a) & bit(v, *b)) << t,
        Gate::Reset(q) => v & !(1 << q),
        Gate::Idle(_) => v,
        other => return Err(Error::UnsupportedGate(format!("{} in basis mode", other.name()))),
    })
}

fn frame_gate(g: &Gate, (mut x, mut z): (u64, u64)) -> Result<(u64, u64)> {
    match g {
        Gate::H(q) => {
            let (bx, bz) = (bit(x, *q), bit(z, *q));
            x = x & !(1 << q) | bz << q;
            z = z & !(1 << q) | bx << q;
        }
        Gate::S(q) => z ^= bit(x, *q) << q,
        Gate::X(_) | Gate::Z(_) | Gate::Idle(_) => {}
        Gate::Cnot(c, t) => {
            x ^= bit(x, *c) << t;
            z ^= bit(z, *t) << c;
        }
        Gate::Cz(a, b) => {
            z ^= bit(x, *b) << a;
            z ^= bit(x, *a) << b;
        }
        Gate::Swap(a, b) => {
            x = swap_bits(x, *a, *b);
            z = swap_bits(z, *a, *b);
        }
        Gate::Reset(q) => {
            x &= !(1 << q);
            z &= !(1 << q);
        }
        other => return Err(Error::UnsupportedGate(other.name())),
    }
    Ok((x, z))
}

/// Propagates `input` through `gadget` with `faults` injected.
pub fn run_gadget(gadget: &GadgetCircuit, input: &PauliFrameState, faults: &[PauliFault]) -> Result<PauliFrameState> {
    if let Some(g) = gadget.gates.iter().find(|g| matches!(g, Gate::Other(..))) {
        return Err(Error::UnsupportedGate(g.name()));
    }
    for f in faults {
        let g = gadget
            .gates
            .get(f.location)
            .ok_or_else(|| Error::Config(format!("fault at location {} of {}", f.location, gadget.gates.len())))?;
        if (f.x | f.z) & !g.support_mask() != 0 {
            return Err(Error::Config(format!("fault at location {} leaves the gate's support", f.location)));
        }
    }
    let at = |k: usize| faults.iter().filter(move |f| f.location == k);
    match input.basis {
        Some(basis) => {
            let mut ideal = basis;
            let mut actual = basis ^ input.x;
            for (k, g) in gadget.gates.iter().enumerate() {
                ideal = classical_gate(g, ideal)?;
                actual = classical_gate(g, actual)?;
                for f in at(k) {
                    actual ^= f.x;
                }
            }
            Ok(PauliFrameState { x: actual ^ ideal, z: 0, basis: Some(ideal) })
        }
        None => {
            let mut xz = (input.x, input.z);
            for (k, g) in gadget.gates.iter().enumerate() {
                xz = frame_gate(g, xz)?;
                for f in at(k) {
                    xz.0 ^= f.x;
                    xz.1 ^= f.z;
                }
            }
            Ok(PauliFrameState::frame(xz.0, xz.1))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circuit(gates: Vec<Gate>, width: usize) -> GadgetCircuit {
        GadgetCircuit { name: "t".into(), role: Role::Gate2, width, blocks: vec![vec![0], vec![1]], gates }
    }

    #[test]
    fn empty_frame_stays_empty() {
        let c = circuit(vec![Gate::H(0), Gate::Cnot(0, 1), Gate::S(1), Gate::Cz(0, 1)], 2);
        assert_eq!(run_gadget(&c, &PauliFrameState::default(), &[]).unwrap(), PauliFrameState::default());
    }

    #[test]
    fn cnot_copies_control_x() {
        let c = circuit(vec![Gate::Cnot(0, 1)], 2);
        let out = run_gadget(&c, &PauliFrameState::frame(0b01, 0), &[]).unwrap();
        assert_eq!(out, PauliFrameState::frame(0b11, 0));
        let out = run_gadget(&c, &PauliFrameState::frame(0, 0b10), &[]).unwrap();
        assert_eq!(out, PauliFrameState::frame(0, 0b11));
    }

    #[test]
    fn hadamard_exchanges_x_and_z() {
        let c = circuit(vec![Gate::H(0)], 1);
        assert_eq!(run_gadget(&c, &PauliFrameState::frame(1, 0), &[]).unwrap(), PauliFrameState::frame(0, 1));
    }

    #[test]
    fn non_clifford_is_rejected() {
        let c = circuit(vec![Gate::Other("T".into(), vec![0])], 1);
        assert!(matches!(run_gadget(&c, &PauliFrameState::default(), &[]), Err(Error::UnsupportedGate(_))));
        let c = circuit(vec![Gate::Toffoli(0, 1, 2)], 3);
        assert!(run_gadget(&c, &PauliFrameState::default(), &[]).is_err());
        assert!(run_gadget(&c, &PauliFrameState::classical(0b011, 0), &[]).is_ok());
    }

    #[test]
    fn basis_mode_tracks_toffoli() {
        let c = circuit(vec![Gate::Toffoli(0, 1, 2)], 3);
        // Flipping one control of an active Toffoli also flips the target.
        let out = run_gadget(&c, &PauliFrameState::classical(0b011, 0b001), &[]).unwrap();
        assert_eq!(out.x, 0b101);
        assert_eq!(out.basis, Some(0b111));
    }

    #[test]
    fn fault_outside_support_is_rejected() {
        let c = circuit(vec![Gate::Cnot(0, 1), Gate::H(2)], 3);
        let f = PauliFault { location: 1, x: 0b1, z: 0 };
        assert!(run_gadget(&c, &PauliFrameState::default(), &[f]).is_err());
    }
}
