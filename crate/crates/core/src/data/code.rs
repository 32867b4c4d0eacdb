//! Small codes with one logical qubit and a minimum-weight table decoder.
//!
//! Text format:
//!
//! ```text
//! name steane
//! n 7
//! t 1
//! kind stabilizer        # or bitflip
//! stab XXXXIII           # one generator per line, qubit k = column k
//! logical_x XXXXXXX
//! logical_z ZZZZZZZ
//! ```

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PauliOp {
    pub x: u64,
    pub z: u64,
}

impl PauliOp {
    pub const fn new(x: u64, z: u64) -> Self {
        PauliOp { x, z }
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn anticommutes(&self, o: &PauliOp) -> bool {
        ((self.x & o.z).count_ones() + (self.z & o.x).count_ones()) % 2 == 1
    }

    pub fn mul(&self, o: &PauliOp) -> PauliOp {
        PauliOp::new(self.x ^ o.x, self.z ^ o.z)
    }

    pub fn parse(s: &str) -> Option<PauliOp> {
        let mut p = PauliOp::default();
        for (k, c) in s.chars().enumerate() {
            match c {
                'I' => {}
                'X' => p.x |= 1 << k,
                'Z' => p.z |= 1 << k,
                'Y' => {
                    p.x |= 1 << k;
                    p.z |= 1 << k;
                }
                _ => return None,
            }
        }
        Some(p)
    }
}

/// Which error components a code protects against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CodeKind {
    /// Classical repetition-type code: only X components matter.
    BitFlip,
    Stabilizer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSpec {
    pub name: String,
    pub n: usize,
    pub t_ec_d: usize,
    pub kind: CodeKind,
    pub stabilizers: Vec<PauliOp>,
    pub logical_x: PauliOp,
    pub logical_z: PauliOp,
    #[serde(skip)]
    table: HashMap<u64, PauliOp>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeResult {
    /// Residual logical X after correction.
    pub logical_x: bool,
    /// Residual logical Z after correction.
    pub logical_z: bool,
    /// Check outcomes, bit `k` for generator `k`; kept as the decoder's side record.
    pub syndrome: u64,
    pub correction: PauliOp,
}

impl DecodeResult {
    pub fn is_trivial(&self) -> bool {
        !self.logical_x && !self.logical_z
    }
}

fn for_each_subset(n: usize, w: usize, f: &mut impl FnMut(u64)) {
    fn go(start: usize, n: usize, left: usize, acc: u64, f: &mut impl FnMut(u64)) {
        if left == 0 {
            f(acc);
            return;
        }
        for q in start..n {
            go(q + 1, n, left - 1, acc | 1 << q, f);
        }
    }
    go(0, n, w, 0, f);
}

/// Every Pauli of weight exactly `w` on `n` qubits, X-only for bit-flip codes.
pub fn errors_of_weight(n: usize, w: usize, kind: CodeKind) -> Vec<PauliOp> {
    let mut out = Vec::new();
    for_each_subset(n, w, &mut |mask| {
        let qs: Vec<usize> = (0..n).filter(|q| mask >> q & 1 == 1).collect();
        let choices: &[(u64, u64)] = match kind {
            CodeKind::BitFlip => &[(1, 0)],
            CodeKind::Stabilizer => &[(1, 0), (0, 1), (1, 1)],
        };
        let mut combos = vec![PauliOp::default()];
        for &q in &qs {
            combos = combos
                .into_iter()
                .flat_map(|p| choices.iter().map(move |&(x, z)| PauliOp::new(p.x | x << q, p.z | z << q)))
                .collect();
        }
        out.extend(combos);
    });
    out
}

impl CodeSpec {
    pub fn new(
        name: &str,
        n: usize,
        t_ec_d: usize,
        kind: CodeKind,
        stabilizers: Vec<PauliOp>,
        logical_x: PauliOp,
        logical_z: PauliOp,
    ) -> Result<Self> {
        if t_ec_d < 1 {
            return Err(Error::Config("a code must correct at least one error".into()));
        }
        if n > 16 {
            return Err(Error::Config(format!("block size {n} too large for table decoding")));
        }
        for (a, s) in stabilizers.iter().enumerate() {
            if let Some(b) = stabilizers[a + 1..].iter().position(|o| s.anticommutes(o)) {
                return Err(Error::Config(format!("generators {a} and {} anticommute", a + 1 + b)));
            }
            if s.anticommutes(&logical_x) || s.anticommutes(&logical_z) {
                return Err(Error::Config(format!("generator {a} anticommutes with a logical operator")));
            }
        }
        if !logical_x.anticommutes(&logical_z) {
            return Err(Error::Config("logical X and Z must anticommute".into()));
        }
        let mut code = CodeSpec {
            name: name.into(),
            n,
            t_ec_d,
            kind,
            stabilizers,
            logical_x,
            logical_z,
            table: HashMap::new(),
        };
        for w in 0..=n {
            for e in errors_of_weight(n, w, kind) {
                code.table.entry(code.syndrome(&e)).or_insert(e);
            }
        }
        Ok(code)
    }

    /// Three-bit repetition code against bit flips.
    pub fn repetition3() -> Self {
        let p = |s| PauliOp::parse(s).unwrap();
        Self::new("rep3", 3, 1, CodeKind::BitFlip, vec![p("ZZI"), p("IZZ")], p("XXX"), p("ZII")).expect("valid code")
    }

    /// The seven-qubit Steane code.
    pub fn steane() -> Self {
        let text = "name steane\nn 7\nt 1\nkind stabilizer\n\
                    stab XIXIXIX\nstab IXXIIXX\nstab IIIXXXX\n\
                    stab ZIZIZIZ\nstab IZZIIZZ\nstab IIIZZZZ\n\
                    logical_x XXXXXXX\nlogical_z ZZZZZZZ\n";
        Self::parse(text).expect("valid code")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let (mut name, mut n, mut t, mut kind) = (String::new(), 0usize, 1usize, CodeKind::Stabilizer);
        let (mut stabs, mut lx, mut lz) = (Vec::new(), None, None);
        for (no, raw) in text.lines().enumerate().map(|(k, l)| (k + 1, l)) {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, val) = line.split_once(char::is_whitespace).ok_or_else(|| Error::parse(no, "expected key value"))?;
            let val = val.trim();
            let op = || PauliOp::parse(val).ok_or_else(|| Error::parse(no, format!("bad Pauli string `{val}`")));
            match key {
                "name" => name = val.into(),
                "n" => n = val.parse().map_err(|_| Error::parse(no, "bad n"))?,
                "t" => t = val.parse().map_err(|_| Error::parse(no, "bad t"))?,
                "kind" => {
                    kind = match val {
                        "bitflip" => CodeKind::BitFlip,
                        "stabilizer" => CodeKind::Stabilizer,
                        _ => return Err(Error::parse(no, format!("unknown kind `{val}`"))),
                    }
                }
                "stab" => stabs.push(op()?),
                "logical_x" => lx = Some(op()?),
                "logical_z" => lz = Some(op()?),
                _ => return Err(Error::parse(no, format!("unknown key `{key}`"))),
            }
        }
        let lx = lx.ok_or_else(|| Error::parse(0, "missing logical_x"))?;
        let lz = lz.ok_or_else(|| Error::parse(0, "missing logical_z"))?;
        Self::new(&name, n, t, kind, stabs, lx, lz)
    }

    /// Restricts an error to the components this code tracks.
    pub fn relevant(&self, e: &PauliOp) -> PauliOp {
        let mask = crate::lattice::width_mask(self.n as u32);
        match self.kind {
            CodeKind::BitFlip => PauliOp::new(e.x & mask, 0),
            CodeKind::Stabilizer => PauliOp::new(e.x & mask, e.z & mask),
        }
    }

    pub fn syndrome(&self, e: &PauliOp) -> u64 {
        let e = self.relevant(e);
        self.stabilizers
            .iter()
            .enumerate()
            .fold(0, |s, (k, g)| s | (g.anticommutes(&e) as u64) << k)
    }

    /// Syndromes of all tracked errors of weight at most `s`.
    pub fn correctable_syndromes(&self, s: usize) -> HashSet<u64> {
        (0..=s.min(self.n))
            .flat_map(|w| errors_of_weight(self.n, w, self.kind))
            .map(|e| self.syndrome(&e))
            .collect()
    }

    /// Minimum-weight decoding of an error frame on one block.
    pub fn ideal_decode(&self, e: &PauliOp) -> DecodeResult {
        let e = self.relevant(e);
        let syndrome = self.syndrome(&e);
        let correction = self.table[&syndrome];
        let r = e.mul(&correction);
        DecodeResult {
            logical_x: r.anticommutes(&self.logical_z),
            logical_z: self.kind == CodeKind::Stabilizer && r.anticommutes(&self.logical_x),
            syndrome,
            correction,
        }
    }

    /// Decodes a bit string of a bit-flip code to its logical value.
    pub fn decode_bits(&self, bits: u64) -> u8 {
        self.ideal_decode(&PauliOp::new(bits, 0)).logical_x as u8
    }

    /// The codeword bit string encoding logical `v` (bit-flip codes).
    pub fn codeword_bits(&self, v: u8) -> u64 {
        if v & 1 == 1 {
            self.logical_x.x
        } else {
            0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repetition_examples() {
        let c = CodeSpec::repetition3();
        let zero = c.ideal_decode(&PauliOp::default());
        assert!(zero.is_trivial());
        assert_eq!(zero.syndrome, 0);
        assert!(c.ideal_decode(&PauliOp::new(0b010, 0)).is_trivial());
        assert!(c.ideal_decode(&PauliOp::new(0b011, 0)).logical_x);
        // Phase errors are outside the model of a bit-flip code.
        assert!(c.ideal_decode(&PauliOp::new(0, 0b111)).is_trivial());
    }

    #[test]
    fn steane_corrects_every_single_error() {
        let c = CodeSpec::steane();
        assert_eq!(errors_of_weight(7, 1, CodeKind::Stabilizer).len(), 21);
        for e in errors_of_weight(7, 1, CodeKind::Stabilizer) {
            assert!(c.ideal_decode(&e).is_trivial(), "{e:?}");
        }
        assert!(c.ideal_decode(&c.logical_x).logical_x);
        assert!(c.ideal_decode(&c.logical_z).logical_z);
    }

    #[test]
    fn anticommuting_generators_are_rejected() {
        let p = |s| PauliOp::parse(s).unwrap();
        assert!(CodeSpec::new("bad", 2, 1, CodeKind::Stabilizer, vec![p("XI"), p("ZI")], p("XX"), p("ZZ")).is_err());
    }

    #[test]
    fn parse_round_trip_of_builtin() {
        let c = CodeSpec::steane();
        assert_eq!(c.stabilizers.len(), 6);
        assert_eq!(c.correctable_syndromes(1).len(), 22);
    }
}
