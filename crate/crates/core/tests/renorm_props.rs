use std::collections::BTreeMap;

use proptest::prelude::*;
use toomqca::lattice::{ScheduleParams, Site, StructureState};
use toomqca::noise::{FaultEffect, FaultEvent, FaultPath, LocKind, Location};
use toomqca::renorm::{levels_for_log_ratio, partition_exrecs, renorm_flow, ExRecId, SweepOrder, Tiling};
use toomqca::structure::{cluster_count, decompose_clusters, min_box_cover};

fn path_strategy(n: usize, t0: u64) -> impl Strategy<Value = FaultPath> {
    prop::collection::vec((0..t0, 0..n, 0..n), 0..40).prop_map(move |v| {
        let events = v
            .into_iter()
            .map(|(t, i, j)| FaultEvent {
                location: Location {
                    time: t,
                    op_id: (i * n + j) as u64,
                    kind: LocKind::Structure,
                    support: vec![Site::new(i, j), Site::new((i + 1) % n, j), Site::new(i, (j + 1) % n)],
                },
                effect: FaultEffect::StructureScramble(vec![(0, StructureState::new(0, 0, 0))]),
            })
            .collect();
        FaultPath { events, seed: 0, p: 0.0 }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn truncation_fixpoint_is_total_and_order_free(
        path in path_strategy(12, 4),
        sick in prop::collection::vec((0usize..4, 0usize..4, 0usize..4), 0..6),
    ) {
        let mut p = ScheduleParams::new(3, 2, 1, 1);
        p.t_ec_s = 2;
        let health: BTreeMap<ExRecId, usize> = sick.into_iter().map(|(bi, bj, h)| (ExRecId::new(bi, bj, 0), h)).collect();
        let tl = Tiling::new(12, &p).unwrap();
        let a = partition_exrecs(&path, &health, &p, 12, SweepOrder::Jacobi).unwrap();
        let b = partition_exrecs(&path, &health, &p, 12, SweepOrder::Sequential).unwrap();
        let c = partition_exrecs(&path, &health, &p, 12, SweepOrder::Reverse).unwrap();
        prop_assert!(a.converged && b.converged && c.converged);
        prop_assert_eq!(a.owner.len(), path.events.len());
        for (k, o) in a.owner.iter().enumerate() {
            prop_assert!(tl.touched(&path.events[k]).contains(o));
        }
        prop_assert_eq!(&a.owner, &b.owner);
        prop_assert_eq!(&a.owner, &c.owner);
    }

    #[test]
    fn flow_matches_closed_form(a in 1.5f64..1e4, t_ec in 1u32..4, frac in 0.01f64..1.5, k in 0u32..11) {
        let th = a.powf(-1.0 / t_ec as f64);
        let f = renorm_flow(th * frac, a, t_ec, k).unwrap();
        prop_assert!(f.max_rel_err <= 1e-12, "{}", f.max_rel_err);
        prop_assert_eq!(f.suppressing, frac < 1.0);
    }

    #[test]
    fn level_count_is_monotone(x in 0.0f64..500.0, dx in 0.0f64..500.0, frac in 0.01f64..0.99) {
        let a = 100.0;
        let k1 = levels_for_log_ratio(x, 0.01 * frac, a, 1).unwrap();
        let k2 = levels_for_log_ratio(x + dx, 0.01 * frac, a, 1).unwrap();
        prop_assert!(k1 <= k2);
    }

    #[test]
    fn union_of_h_boxes_has_at_most_h_clusters(boxes in prop::collection::vec((0i64..20, 0i64..20, 1u32..512), 1..5)) {
        let mut pts = Vec::new();
        for (i, j, mask) in &boxes {
            for c in (0..9).filter(|c| mask >> c & 1 == 1) {
                pts.push((i + c / 3, j + c % 3));
            }
        }
        let h = boxes.len();
        prop_assert!(cluster_count(&pts, 12) <= h);
        prop_assert!(min_box_cover(&pts, h).is_some());
        prop_assert!(cluster_count(&pts, 12) <= decompose_clusters(&pts).h_value);
    }
}
