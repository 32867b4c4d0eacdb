//! Periodic lattice storage, indexing and the ideal structural trajectory.
//!
//! Rows grow "north": the northern neighbor of `(i, j)` is `(i + 1, j)` and
//! the eastern neighbor is `(i, j + 1)`, both modulo `n`.

mod params;
mod snapshot;

pub use params::{Check, ScheduleParams};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub i: usize,
    pub j: usize,
}

impl Site {
    pub const fn new(i: usize, j: usize) -> Self {
        Site { i, j }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dir {
    N,
    E,
    S,
    W,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::N, Dir::E, Dir::S, Dir::W];

    pub fn opposite(self) -> Dir {
        match self {
            Dir::N => Dir::S,
            Dir::S => Dir::N,
            Dir::E => Dir::W,
            Dir::W => Dir::E,
        }
    }
}

/// Periodic neighbor on an `n`x`n` torus.
#[inline]
pub fn neighbor(s: Site, dir: Dir, n: usize) -> Site {
    match dir {
        Dir::N => Site::new((s.i + 1) % n, s.j),
        Dir::S => Site::new((s.i + n - 1) % n, s.j),
        Dir::E => Site::new(s.i, (s.j + 1) % n),
        Dir::W => Site::new(s.i, (s.j + n - 1) % n),
    }
}

/// Believed coordinates `(tau, x, y)` of one site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct StructureState {
    pub tau: u32,
    pub x: u32,
    pub y: u32,
}

impl StructureState {
    pub const fn new(tau: u32, x: u32, y: u32) -> Self {
        StructureState { tau, x, y }
    }

    pub fn in_range(&self, p: &ScheduleParams) -> bool {
        self.tau < p.t0 && self.x < p.m && self.y < p.m
    }
}

/// The codeword value of the structure registers at `(t, i, j)`.
pub fn ideal_structure(t: u64, i: usize, j: usize, p: &ScheduleParams) -> StructureState {
    StructureState {
        tau: (t % p.t0 as u64) as u32,
        x: (i % p.m as usize) as u32,
        y: (j % p.m as usize) as u32,
    }
}

/// Which data register every cell carries; fixed for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataRule {
    ClassicalBit { initial: u8 },
    PauliFrame { width: u32 },
    Opaque { alphabet: u32 },
}

impl Default for DataRule {
    fn default() -> Self {
        DataRule::ClassicalBit { initial: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DataState {
    ClassicalBit(u8),
    PauliFrame { x: u64, z: u64 },
    Opaque(u32),
}

/// Struct-of-arrays storage of the data registers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DataPlane {
    Bits(Vec<u8>),
    Frames { x: Vec<u64>, z: Vec<u64>, width: u32 },
    Opaque { values: Vec<u32>, alphabet: u32 },
}

impl DataPlane {
    fn filled(rule: DataRule, len: usize) -> Self {
        match rule {
            DataRule::ClassicalBit { initial } => DataPlane::Bits(vec![initial & 1; len]),
            DataRule::PauliFrame { width } => DataPlane::Frames {
                x: vec![0; len],
                z: vec![0; len],
                width,
            },
            DataRule::Opaque { alphabet } => DataPlane::Opaque {
                values: vec![0; len],
                alphabet,
            },
        }
    }

    pub fn get(&self, k: usize) -> DataState {
        match self {
            DataPlane::Bits(b) => DataState::ClassicalBit(b[k]),
            DataPlane::Frames { x, z, .. } => DataState::PauliFrame { x: x[k], z: z[k] },
            DataPlane::Opaque { values, .. } => DataState::Opaque(values[k]),
        }
    }

    pub fn set(&mut self, k: usize, v: DataState) -> Result<()> {
        match (self, v) {
            (DataPlane::Bits(b), DataState::ClassicalBit(v)) => b[k] = v & 1,
            (DataPlane::Frames { x, z, width }, DataState::PauliFrame { x: vx, z: vz }) => {
                let mask = width_mask(*width);
                x[k] = vx & mask;
                z[k] = vz & mask;
            }
            (DataPlane::Opaque { values, alphabet }, DataState::Opaque(v)) => {
                values[k] = v % (*alphabet).max(1)
            }
            (_, v) => return Err(Error::Config(format!("data value {v:?} does not match the run's data rule"))),
        }
        Ok(())
    }

    pub fn rule(&self) -> DataRule {
        match self {
            DataPlane::Bits(_) => DataRule::ClassicalBit { initial: 0 },
            DataPlane::Frames { width, .. } => DataRule::PauliFrame { width: *width },
            DataPlane::Opaque { alphabet, .. } => DataRule::Opaque { alphabet: *alphabet },
        }
    }

    pub fn bits(&self) -> Option<&[u8]> {
        match self {
            DataPlane::Bits(b) => Some(b),
            _ => None,
        }
    }

    pub fn bits_mut(&mut self) -> Option<&mut Vec<u8>> {
        match self {
            DataPlane::Bits(b) => Some(b),
            _ => None,
        }
    }
}

pub(crate) fn width_mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub structure: StructureState,
    pub data: DataState,
    pub counter: u64,
}

/// Initial condition for [`LatticeState::new`].
#[derive(Debug, Clone)]
pub enum Init {
    Ideal,
    /// Row-major list of `n * n` cells.
    Custom(Vec<Cell>),
}

/// An `n`x`n` periodic lattice of cells, stored plane by plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeState {
    pub n: usize,
    pub params: ScheduleParams,
    pub tau: Vec<u32>,
    pub x: Vec<u32>,
    pub y: Vec<u32>,
    pub data: DataPlane,
    pub counter: Vec<u64>,
    pub global_time: u64,
}

impl LatticeState {
    pub fn new(n: usize, params: ScheduleParams, init: Init, rule: DataRule) -> Result<Self> {
        let m = params.m as usize;
        if m == 0 || n < m {
            return Err(Error::Config(format!("lattice size n = {n} is below M = {m}")));
        }
        if n % m != 0 {
            return Err(Error::Config(format!("lattice size n = {n} is not a multiple of M = {m}")));
        }
        let len = n * n;
        let mut lat = LatticeState {
            n,
            params,
            tau: vec![0; len],
            x: vec![0; len],
            y: vec![0; len],
            data: DataPlane::filled(rule, len),
            counter: vec![0; len],
            global_time: 0,
        };
        match init {
            Init::Ideal => {
                for k in 0..len {
                    let s = lat.site(k);
                    lat.set_structure(k, ideal_structure(0, s.i, s.j, &params));
                }
            }
            Init::Custom(cells) => {
                if cells.len() != len {
                    return Err(Error::Config(format!("custom init has {} cells, expected {len}", cells.len())));
                }
                for (k, c) in cells.into_iter().enumerate() {
                    lat.set_cell(k, c)?;
                }
            }
        }
        Ok(lat)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn idx(&self, s: Site) -> usize {
        s.i * self.n + s.j
    }

    #[inline]
    pub fn site(&self, k: usize) -> Site {
        Site::new(k / self.n, k % self.n)
    }

    pub fn check_site(&self, s: Site) -> Result<usize> {
        if s.i < self.n && s.j < self.n {
            Ok(self.idx(s))
        } else {
            Err(Error::OutOfBounds { i: s.i, j: s.j, n: self.n })
        }
    }

    #[inline]
    pub fn neighbor_idx(&self, k: usize, dir: Dir) -> usize {
        self.idx(neighbor(self.site(k), dir, self.n))
    }

    #[inline]
    pub fn structure(&self, k: usize) -> StructureState {
        StructureState::new(self.tau[k], self.x[k], self.y[k])
    }

    #[inline]
    pub fn set_structure(&mut self, k: usize, s: StructureState) {
        self.tau[k] = s.tau;
        self.x[k] = s.x;
        self.y[k] = s.y;
    }

    pub fn cell(&self, k: usize) -> Cell {
        Cell {
            structure: self.structure(k),
            data: self.data.get(k),
            counter: self.counter[k],
        }
    }

    pub fn set_cell(&mut self, k: usize, c: Cell) -> Result<()> {
        if !c.structure.in_range(&self.params) {
            return Err(Error::Config(format!("structure value {:?} outside the register alphabet", c.structure)));
        }
        self.set_structure(k, c.structure);
        self.data.set(k, c.data)?;
        self.counter[k] = c.counter;
        Ok(())
    }

    /// Whether every site holds the codeword for `t`.
    pub fn is_ideal_at(&self, t: u64) -> bool {
        (0..self.len()).all(|k| {
            let s = self.site(k);
            self.structure(k) == ideal_structure(t, s.i, s.j, &self.params)
        })
    }

    pub fn blocks_per_side(&self) -> usize {
        self.n / self.params.m as usize
    }

    /// Hash of the data plane, for cheap equality checks across steps.
    pub fn data_digest(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        match &self.data {
            DataPlane::Bits(b) => b.hash(&mut h),
            DataPlane::Frames { x, z, .. } => {
                x.hash(&mut h);
                z.hash(&mut h);
            }
            DataPlane::Opaque { values, .. } => values.hash(&mut h),
        }
        h.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p9() -> ScheduleParams {
        ScheduleParams::new(9, 2, 6, 1)
    }

    #[test]
    fn ideal_init_is_codeword_at_zero() {
        let lat = LatticeState::new(9, p9(), Init::Ideal, DataRule::default()).unwrap();
        for k in 0..lat.len() {
            let s = lat.site(k);
            assert_eq!(lat.structure(k), StructureState::new(0, s.i as u32, s.j as u32));
        }
    }

    #[test]
    fn ideal_init_tiles_with_period_m() {
        let lat = LatticeState::new(18, p9(), Init::Ideal, DataRule::default()).unwrap();
        for i in 0..18 {
            for j in 0..18 {
                let a = lat.structure(lat.idx(Site::new(i, j)));
                let b = lat.structure(lat.idx(Site::new((i + 9) % 18, (j + 9) % 18)));
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn size_preconditions() {
        assert!(LatticeState::new(10, p9(), Init::Ideal, DataRule::default()).is_err());
        assert!(LatticeState::new(8, ScheduleParams::new(9, 2, 6, 1), Init::Ideal, DataRule::default()).is_err());
    }

    #[test]
    fn ideal_structure_examples() {
        let p = ScheduleParams::new(9, 18, 6, 1);
        assert_eq!(ideal_structure(0, 3, 5, &p), StructureState::new(0, 3, 5));
        assert_eq!(ideal_structure(24, 0, 0, &p), StructureState::new(0, 0, 0));
        assert_eq!(ideal_structure(7, 11, 2, &p), StructureState::new(7, 2, 2));
    }

    #[test]
    fn neighbor_examples() {
        assert_eq!(neighbor(Site::new(0, 0), Dir::N, 4), Site::new(1, 0));
        assert_eq!(neighbor(Site::new(3, 3), Dir::E, 4), Site::new(3, 0));
        let w = neighbor(Site::new(2, 1), Dir::W, 4);
        assert_eq!(neighbor(w, Dir::E, 4), Site::new(2, 1));
    }

    #[test]
    fn custom_init_rejects_out_of_alphabet() {
        let p = p9();
        let mut cells = vec![
            Cell {
                structure: StructureState::default(),
                data: DataState::ClassicalBit(0),
                counter: 0
            };
            81
        ];
        cells[5].structure.x = 9;
        assert!(LatticeState::new(9, p, Init::Custom(cells), DataRule::default()).is_err());
    }
}
