//! Built-in measurement-free gadgets for the three-bit repetition code.

use super::pauli::{GadgetCircuit, Gate, Role};

/// Majority EC: every data bit is fanned out to three fresh copies, output
/// slot `m` takes the in-place majority of the `m`-th copies, is swapped into
/// the data slot and the discarded data is reset. No gate touches two data
/// bits or copies belonging to two output slots.
pub fn repetition_ec() -> GadgetCircuit {
    use Gate::*;
    let copy = |k: usize, m: usize| 3 + 3 * m + k;
    let mut gates = Vec::new();
    for k in 0..3 {
        gates.extend((0..3).map(|m| Cnot(k, copy(k, m))));
    }
    for m in 0..3 {
        let (a, b, c) = (copy(0, m), copy(1, m), copy(2, m));
        gates.extend([Cnot(a, b), Cnot(a, c), Toffoli(b, c, a)]);
    }
    gates.extend((0..3).map(|m| Swap(m, copy(0, m))));
    gates.extend((3..12).map(Reset));
    GadgetCircuit { name: "rep3-majority-ec".into(), role: Role::EC, width: 12, blocks: vec![vec![0, 1, 2]], gates }
}

/// [`repetition_ec`] with the corrective swaps removed.
pub fn repetition_ec_without_correction() -> GadgetCircuit {
    let mut g = repetition_ec();
    g.name = "rep3-majority-ec-no-correction".into();
    g.gates.retain(|g| !matches!(g, Gate::Swap(..)));
    g
}

/// Two-ancilla syndrome copy followed by Toffoli-controlled correction.
///
/// Not fault tolerant: a flip of the middle bit between its two syndrome
/// CNOTs yields a wrong syndrome and a weight-two output.
pub fn repetition_syndrome_ec() -> GadgetCircuit {
    use Gate::*;
    let gates = vec![
        Cnot(0, 3),
        Cnot(1, 3),
        Cnot(1, 4),
        Cnot(2, 4),
        X(4),
        Toffoli(3, 4, 0),
        X(4),
        Toffoli(3, 4, 1),
        X(3),
        Toffoli(3, 4, 2),
        X(3),
        Reset(3),
        Reset(4),
    ];
    GadgetCircuit { name: "rep3-syndrome-ec".into(), role: Role::EC, width: 5, blocks: vec![vec![0, 1, 2]], gates }
}

/// Transversal CNOT from block `[0, 1, 2]` to block `[3, 4, 5]`.
pub fn transversal_cnot(n: usize) -> GadgetCircuit {
    GadgetCircuit {
        name: format!("transversal-cnot-{n}"),
        role: Role::Gate2,
        width: 2 * n,
        blocks: vec![(0..n).collect(), (n..2 * n).collect()],
        gates: (0..n).map(|k| Gate::Cnot(k, n + k)).collect(),
    }
}

/// No gates at all on one block of `n` qubits.
pub fn identity(n: usize) -> GadgetCircuit {
    GadgetCircuit { name: format!("identity-{n}"), role: Role::EC, width: n, blocks: vec![(0..n).collect()], gates: vec![] }
}

/// Leading EC on both blocks, transversal CNOT, trailing EC on both blocks,
/// for the repetition code. Qubits: block A `0..3`, block B `3..6`,
/// shared ancillas `6..15`. Returns the circuit and the number of gates in
/// the leading part.
pub fn repetition_cnot_exrec() -> (GadgetCircuit, usize) {
    let ec = repetition_ec();
    let anc: Vec<usize> = (6..15).collect();
    let ec_a = ec.remap(&[&[0, 1, 2][..], &anc].concat(), 15);
    let ec_b = ec.remap(&[&[3, 4, 5][..], &anc].concat(), 15);
    let gate = transversal_cnot(3).remap(&[0, 1, 2, 3, 4, 5], 15);
    let lead = ec_a.clone().then(&ec_b);
    let lead_len = lead.gates.len();
    let mut full = lead.then(&gate).then(&ec_a).then(&ec_b);
    full.name = "rep3-cnot-exrec".into();
    full.role = Role::Gate2;
    full.blocks = vec![vec![0, 1, 2], vec![3, 4, 5]];
    (full, lead_len)
}

/// Looks up a built-in gadget by name.
pub fn builtin(name: &str) -> Option<GadgetCircuit> {
    Some(match name {
        "rep3-majority-ec" => repetition_ec(),
        "rep3-majority-ec-no-correction" => repetition_ec_without_correction(),
        "rep3-syndrome-ec" => repetition_syndrome_ec(),
        "transversal-cnot-3" => transversal_cnot(3),
        "transversal-cnot-7" => transversal_cnot(7),
        "identity-7" => identity(7),
        _ => return None,
    })
}
