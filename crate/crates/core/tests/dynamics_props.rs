use proptest::prelude::*;
use toomqca::lattice::{ideal_structure, Cell, DataRule, DataState, Init, LatticeState, ScheduleParams, Site, StructureState};
use toomqca::noise::{KeyedRng, NoiseParams};
use toomqca::runtime::{level_order, run_async, run_sync, same_registers, AsyncLattice};
use toomqca::schedule::{ScheduleTable, SiteRule};
use toomqca::structure::{erosion_check, structural_toom_step, toom_step, BitGrid, Triangle};

fn reference_toom(field: &[u8], n: usize) -> Vec<u8> {
    let mut out = vec![0; n * n];
    for i in 0..n {
        for j in 0..n {
            let c = field[i * n + j];
            let nn = field[((i + 1) % n) * n + j];
            let e = field[i * n + (j + 1) % n];
            out[i * n + j] = ((c + nn + e) >= 2) as u8;
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn packed_and_generic_toom_agree_with_reference(n in 1usize..80, seed in any::<u64>()) {
        let mut x = seed | 1;
        let field: Vec<u8> = (0..n * n).map(|_| { x ^= x << 13; x ^= x >> 7; x ^= x << 17; (x & 1) as u8 }).collect();
        let want = reference_toom(&field, n);
        prop_assert_eq!(toom_step(&field, n), want.clone());
        let g = BitGrid::from_bytes(&field, n);
        let mut out = BitGrid::new(n);
        g.toom_step_into(&mut out);
        prop_assert_eq!(out.to_bytes(), want);
    }

    #[test]
    fn codeword_is_stationary(m in 2u32..20, t_ref in 1u32..10, t_code in 1u32..10, t in 0u64..500, blocks in 1usize..3) {
        let p = ScheduleParams::new(m, t_ref, t_code, 1);
        let n = m as usize * blocks;
        let cells: Vec<Cell> = (0..n * n)
            .map(|k| Cell { structure: ideal_structure(t, k / n, k % n, &p), data: DataState::ClassicalBit(0), counter: 0 })
            .collect();
        let mut lat = LatticeState::new(n, p, Init::Custom(cells), DataRule::default()).unwrap();
        lat.global_time = t;
        structural_toom_step(&mut lat);
        prop_assert!(lat.is_ideal_at(t + 1));
    }

    #[test]
    fn errors_stay_in_shrinking_triangles(
        a in 0i64..4, b in 0i64..4, c in 0i64..6,
        ai in 0i64..32, aj in 0i64..32,
        mask in any::<u64>(),
    ) {
        let tri = Triangle::new((ai, aj), a, b, c);
        let pts = tri.sites();
        let sites: Vec<Site> = pts
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> (k % 64) & 1 == 1)
            .map(|(_, p)| Site::new(p.0.rem_euclid(32) as usize, p.1.rem_euclid(32) as usize))
            .collect();
        prop_assert!(erosion_check(&sites, &[tri], (tri.norm() + 2) as usize, 32).unwrap());
    }

    #[test]
    fn sync_runs_compose(split in 0u64..12, seed in any::<u64>()) {
        let p = ScheduleParams::new(4, 2, 2, 1);
        let rule = SiteRule::with_table(p, ScheduleTable::exercise(), true);
        let noise = NoiseParams::iid(0.03);
        let rng = KeyedRng::new(seed);
        let mut a = LatticeState::new(8, p, Init::Ideal, DataRule::default()).unwrap();
        let mut b = a.clone();
        run_sync(&mut a, &rule, 12, &noise, &rng, 0).unwrap();
        run_sync(&mut b, &rule, split, &noise, &rng, 0).unwrap();
        run_sync(&mut b, &rule, 12 - split, &noise, &rng, 0).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn marching_soldier_keeps_gaps_and_matches_sync(seed in any::<u64>(), events in 100u64..3000, noisy in any::<bool>()) {
        let p = ScheduleParams::new(4, 2, 2, 1);
        let rule = SiteRule::with_table(p, ScheduleTable::repetition(), true);
        let noise = if noisy { NoiseParams::iid(0.05) } else { NoiseParams::noiseless() };
        let rng = KeyedRng::new(seed);
        let lat = LatticeState::new(8, p, Init::Ideal, DataRule::default()).unwrap();
        let tr = run_async(lat.clone(), &rule, events, &noise, &rng, true, false, 0).unwrap();
        prop_assert_eq!(tr.lattice.stats.gap_violations, 0);
        prop_assert!(tr.lattice.stats.max_gap <= 1);
        let c = tr.lattice.min_counter();
        let mut s = lat.clone();
        let snaps = run_sync(&mut s, &rule, c, &noise, &rng, 1).unwrap();
        for k in 0..=c {
            prop_assert!(same_registers(&tr.lattice.slice(k).unwrap(), &snaps.snapshots[k as usize]));
        }
        let mut other = AsyncLattice::new(lat, false).unwrap();
        let mut path = Default::default();
        for (k, _) in level_order(&tr.accepted) {
            prop_assert!(other.attempt(k, &rule, &noise, &rng, &mut path).unwrap());
        }
        prop_assert_eq!(&other.cur, &tr.lattice.cur);
    }

    #[test]
    fn single_register_damage_heals(i in 0usize..16, j in 0usize..16, tau in 0u32..8, x in 0u32..8, y in 0u32..8) {
        let p = ScheduleParams::new(8, 4, 4, 1);
        let mut lat = LatticeState::new(16, p, Init::Ideal, DataRule::default()).unwrap();
        let k = lat.idx(Site::new(i, j));
        lat.set_structure(k, StructureState::new(tau, x, y));
        for _ in 0..3 {
            structural_toom_step(&mut lat);
        }
        prop_assert!(lat.is_ideal_at(3));
    }
}
