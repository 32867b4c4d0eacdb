//! Bit-packed periodic binary field with a word-parallel Toom step.

/// `n`x`n` bits, one row per `words` u64 words; bit `j` of a row is column `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitGrid {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitGrid {
    pub fn new(n: usize) -> Self {
        assert!(n > 0);
        let words = n.div_ceil(64);
        BitGrid { n, words, bits: vec![0; n * words] }
    }

    pub fn from_bytes(field: &[u8], n: usize) -> Self {
        let mut g = BitGrid::new(n);
        for (k, &v) in field.iter().enumerate() {
            if v & 1 == 1 {
                g.set(k / n, k % n, true);
            }
        }
        g
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        (0..self.n * self.n).map(|k| self.get(k / self.n, k % self.n) as u8).collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let w = &mut self.bits[i * self.words + j / 64];
        let m = 1u64 << (j % 64);
        if v {
            *w |= m;
        } else {
            *w &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] ^= 1u64 << (j % 64);
    }

    /// Flips the site with row-major index `k`.
    #[inline]
    pub fn flip_index(&mut self, k: usize) {
        self.flip(k / self.n, k % self.n);
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn clear(&mut self) {
        self.bits.fill(0);
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    /// Writes `row[j + 1 mod n]` into `out[j]`.
    fn east_into(&self, row: &[u64], out: &mut [u64]) {
        let nw = self.words;
        for w in 0..nw {
            let mut v = row[w] >> 1;
            if w + 1 < nw {
                v |= row[w + 1] << 63;
            }
            out[w] = v;
        }
        let last = self.n - 1;
        out[last / 64] |= (row[0] & 1) << (last % 64);
    }

    /// One synchronous Toom step into `out`.
    pub fn toom_step_into(&self, out: &mut BitGrid) {
        debug_assert_eq!(self.n, out.n);
        let nw = self.words;
        let mut east = vec![0u64; nw];
        for i in 0..self.n {
            let c = self.row(i);
            let nrow = self.row((i + 1) % self.n);
            self.east_into(c, &mut east);
            let o = &mut out.bits[i * nw..(i + 1) * nw];
            for w in 0..nw {
                o[w] = (c[w] & nrow[w]) | (c[w] & east[w]) | (nrow[w] & east[w]);
            }
        }
    }
}
