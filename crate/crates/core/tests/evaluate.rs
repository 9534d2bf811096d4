mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use stencil_core::model::{weighted_profits, ShotLedger};
use stencil_core::{evaluate, Instance};

fn simulate(instance: &Instance, selected: &BTreeSet<u32>) -> Vec<u64> {
    (0..instance.regions)
        .map(|c| {
            let mut shots = 0;
            for cand in &instance.candidates {
                for _ in 0..cand.t[c] {
                    shots += if selected.contains(&cand.id) { 1 } else { cand.n };
                }
            }
            shots
        })
        .collect()
}

proptest! {
    #[test]
    fn matches_repeat_by_repeat_count(inst in common::instance_2d(30, 1), mask in any::<u64>()) {
        let selected: BTreeSet<u32> = inst.candidates.iter().filter(|c| mask >> c.id & 1 == 1).map(|c| c.id).collect();
        let report = evaluate(&inst, selected.iter().copied()).unwrap();
        let sim = simulate(&inst, &selected);
        prop_assert_eq!(report.t_total, sim.iter().copied().max().unwrap_or(0));
        prop_assert_eq!(&report.t_per_region, &sim);
        prop_assert_eq!(report.t_vsb, simulate(&inst, &BTreeSet::new()));
        prop_assert_eq!(report.selected, selected.into_iter().collect::<Vec<_>>());
    }

    #[test]
    fn ledger_tracks_evaluate(inst in common::instance_2d(20, 1), mask in any::<u64>()) {
        let mut ledger = ShotLedger::new(&inst);
        for c in &inst.candidates {
            ledger.select(c);
        }
        let mut kept = Vec::new();
        for c in &inst.candidates {
            if mask >> c.id & 1 == 1 {
                kept.push(c.id);
            } else {
                ledger.deselect(c);
            }
        }
        let report = evaluate(&inst, kept).unwrap();
        prop_assert_eq!(ledger.times(), &report.t_per_region[..]);
        prop_assert_eq!(ledger.total(), report.t_total);
    }

    #[test]
    fn profits_weight_reductions_by_relative_time(inst in common::instance_2d(20, 1)) {
        let times = inst.vsb_times();
        let profits = weighted_profits(&inst.candidates, &times);
        let t_max = times.iter().copied().max().unwrap_or(0);
        for (c, p) in inst.candidates.iter().zip(profits) {
            let want: f64 = if t_max == 0 {
                0.0
            } else {
                (0..inst.regions).map(|r| times[r] as f64 / t_max as f64 * c.reduction(r) as f64).sum()
            };
            prop_assert!((p - want).abs() <= 1e-9 * want.max(1.0), "{p} vs {want}");
        }
    }
}

#[test]
fn unknown_candidate_is_an_error() {
    let inst = Instance {
        mode: stencil_core::Mode::TwoD,
        stencil: stencil_core::Stencil { w: 10, h: 10, rows: None, row_height: None },
        regions: 1,
        candidates: vec![],
        seed: 0,
    };
    assert!(evaluate(&inst, [3]).is_err());
}
