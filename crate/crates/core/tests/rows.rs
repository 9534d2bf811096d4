mod common;

use common::sequence_width as width_of;
use proptest::prelude::*;
use stencil_core::oracle::exact_orderings;
use stencil_core::osp1d::{
    apply_trace, canonical_order, greedy_row_order, layout, order_row, pattern_span, refine_row, sequence_width,
    RowItem, REFINE_CAP,
};
use stencil_core::Micron;

fn permutations(items: &[RowItem]) -> Vec<Vec<RowItem>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for k in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(k);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn symmetric_greedy_order_is_optimal(items in common::row(7, true)) {
        let greedy = greedy_row_order(&items);
        let sum_w: Micron = items.iter().map(|i| i.w).sum();
        let sum_s: Micron = items.iter().map(|i| i.sl).sum();
        let max_s = items.iter().map(|i| i.sl).max().unwrap();
        let brute = permutations(&items).iter().map(|p| width_of(p)).min().unwrap();
        prop_assert_eq!(greedy.width, sum_w - (sum_s - max_s));
        prop_assert_eq!(greedy.width, brute);
        prop_assert_eq!(width_of(&greedy.order), greedy.width);
    }

    #[test]
    fn symmetric_traces_all_tie(items in common::row(9, true)) {
        let canonical = canonical_order(&items);
        let k = items.len();
        let first = width_of(&apply_trace(&canonical, &vec![false; k - 1]));
        for code in 0..1u32 << (k - 1) {
            let trace: Vec<bool> = (0..k - 1).map(|b| code >> b & 1 == 1).collect();
            prop_assert_eq!(width_of(&apply_trace(&canonical, &trace)), first);
        }
    }

    #[test]
    fn refinement_matches_exhaustive_traces(items in common::row(12, false)) {
        let refined = refine_row(&items, REFINE_CAP);
        let exact = exact_orderings(&items).unwrap();
        prop_assert_eq!(refined.best.width, exact.optimum);
        prop_assert_eq!(width_of(&refined.order), refined.best.width);
        prop_assert_eq!(width_of(&exact.witness), exact.optimum);
    }

    #[test]
    fn refinement_never_loses_to_greedy(items in common::row(12, false)) {
        let refined = refine_row(&items, REFINE_CAP);
        let greedy = greedy_row_order(&items);
        prop_assert!(refined.best.width <= width_of(&greedy.order));
    }

    #[test]
    fn layout_shares_blanks(items in common::row(10, false), start in -20i64..20) {
        let x = layout(&items, start);
        prop_assert_eq!(x[0], start);
        for k in 1..items.len() {
            let (a, b) = (&items[k - 1], &items[k]);
            prop_assert_eq!(x[k] - x[k - 1], a.w - a.sr.min(b.sl));
        }
        prop_assert_eq!(sequence_width(&items), width_of(&items));
        let last = items.len() - 1;
        prop_assert_eq!(x[last] + items[last].w - start, sequence_width(&items));
    }

    #[test]
    fn ordered_row_is_a_permutation_with_tight_span(items in common::row(10, false)) {
        let order = order_row(&items, REFINE_CAP);
        let mut ids: Vec<u32> = order.iter().map(|i| i.id).collect();
        ids.sort_unstable();
        prop_assert_eq!(ids, (0..items.len() as u32).collect::<Vec<_>>());
        prop_assert!(pattern_span(&order) <= pattern_span(&greedy_row_order(&items).order));
    }
}

#[test]
fn two_item_example() {
    let c1 = RowItem { id: 1, w: 10, sl: 2, sr: 4 };
    let c2 = RowItem { id: 2, w: 8, sl: 3, sr: 1 };
    assert_eq!(refine_row(&[c1, c2], REFINE_CAP).best.width, 15);
    assert_eq!(exact_orderings(&[c1, c2]).unwrap().optimum, 15);
}
