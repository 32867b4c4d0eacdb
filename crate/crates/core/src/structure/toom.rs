use rayon::prelude::*;

use crate::lattice::{LatticeState, ScheduleParams, StructureState};

/// Majority of three; falls back to the first argument when all differ.
#[inline]
pub fn maj<T: PartialEq + Copy>(a: T, b: T, c: T) -> T {
    if b == c && a != b {
        b
    } else {
        a
    }
}

/// One synchronous step of Toom's north-east-center rule on a periodic field.
#[must_use]
pub fn toom_step<T: PartialEq + Copy + Send + Sync>(field: &[T], n: usize) -> Vec<T> {
    assert_eq!(field.len(), n * n, "field is not n*n");
    let mut out = field.to_vec();
    out.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        let north = ((i + 1) % n) * n;
        let here = i * n;
        for (j, o) in row.iter_mut().enumerate() {
            let e = if j + 1 == n { 0 } else { j + 1 };
            *o = maj(field[here + j], field[north + j], field[here + e]);
        }
    });
    out
}

/// Toom-corrected registers before the clock increment.
///
/// The returned `tau` is the majority value; the stored next value is
/// `tau + 1 mod T0`.
#[inline]
pub fn toom_adjusted(c: StructureState, n: StructureState, e: StructureState, p: &ScheduleParams) -> StructureState {
    let m = p.m;
    StructureState {
        tau: maj(c.tau, n.tau, e.tau),
        x: maj(c.x, (n.x + m - 1) % m, e.x),
        y: maj(c.y, n.y, (e.y + m - 1) % m),
    }
}

/// The site-local structural update.
#[inline]
pub fn structural_update(c: StructureState, n: StructureState, e: StructureState, p: &ScheduleParams) -> StructureState {
    let mut s = toom_adjusted(c, n, e, p);
    s.tau = (s.tau + 1) % p.t0;
    s
}

/// Applies the structural rule to every site synchronously and advances
/// `global_time` by one. Data registers are untouched.
pub fn structural_toom_step(lat: &mut LatticeState) {
    let n = lat.n;
    let p = lat.params;
    let prev = (lat.tau.clone(), lat.x.clone(), lat.y.clone());
    let get = |k: usize| StructureState::new(prev.0[k], prev.1[k], prev.2[k]);
    for i in 0..n {
        let north = ((i + 1) % n) * n;
        for j in 0..n {
            let k = i * n + j;
            let e = i * n + (j + 1) % n;
            let s = structural_update(get(k), get(north + j), get(e), &p);
            lat.set_structure(k, s);
        }
    }
    lat.global_time += 1;
}
