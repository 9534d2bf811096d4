mod common;

use proptest::prelude::*;
use stencil_core::model::{load_instance, load_placement, save_placement};
use stencil_core::oracle::{greedy_baseline_1d, greedy_baseline_2d};
use stencil_core::osp1d::{greedy_insertion, solve_1d, solve_1d_detailed, Solve1dParams};
use stencil_core::osp2d::{
    cluster_candidates, pre_filter, sa_optimize, solve_2d, solve_2d_detailed, ClusterNode, ClusterParams, SaParams,
    Solve2dParams,
};
use stencil_core::{
    evaluate, generate_instance, save_instance, validate_placement, GeneratorSpec, Instance, Mode, Placement,
    Placement1D,
};

fn quick_sa() -> Solve2dParams {
    Solve2dParams {
        sa: SaParams {
            moves: 1500,
            ..SaParams::default()
        },
        ..Solve2dParams::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn everything_emitted_in_1d_is_feasible(inst in common::instance_1d(25, 3)) {
        let (p, r) = greedy_baseline_1d(&inst).unwrap();
        prop_assert!(validate_placement(&inst, &Placement::OneD(p.clone())).is_feasible());
        prop_assert_eq!(evaluate(&inst, p.selected()).unwrap(), r);
        let s = solve_1d_detailed(&inst, &Solve1dParams::default()).unwrap();
        let v = validate_placement(&inst, &Placement::OneD(s.placement.clone()));
        prop_assert!(v.is_feasible(), "{:?}", v);
        prop_assert!(s.report.t_total <= s.stats.inserted_t_total);
        prop_assert!(s.stats.inserted_t_total <= s.stats.realized_t_total);
    }

    #[test]
    fn everything_emitted_in_2d_is_feasible(inst in common::instance_2d(20, 1)) {
        let (p, _) = greedy_baseline_2d(&inst).unwrap();
        prop_assert!(validate_placement(&inst, &Placement::TwoD(p)).is_feasible());
        let s = solve_2d_detailed(&inst, &quick_sa()).unwrap();
        let v = validate_placement(&inst, &Placement::TwoD(s.placement.clone()));
        prop_assert!(v.is_feasible(), "{:?}", v);
        prop_assert!(s.report.t_total <= s.stats.initial_t_total);
    }

    #[test]
    fn insertion_never_hurts(inst in common::instance_1d(25, 3)) {
        let empty = Placement1D::empty(inst.row_count());
        let ids: Vec<u32> = inst.candidates.iter().map(|c| c.id).collect();
        let filled = greedy_insertion(&inst, &empty, &ids).unwrap();
        prop_assert!(validate_placement(&inst, &Placement::OneD(filled.clone())).is_feasible());
        let before = evaluate(&inst, []).unwrap().t_total;
        prop_assert!(evaluate(&inst, filled.selected()).unwrap().t_total <= before);
    }

    #[test]
    fn annealing_keeps_its_best_state(inst in common::instance_2d(16, 1), seed in 0u64..50) {
        let vsb = inst.vsb_times();
        let leaves: Vec<ClusterNode> = inst
            .candidates
            .iter()
            .filter(|c| c.pw <= inst.width() && c.ph <= inst.height())
            .map(|c| ClusterNode::leaf(c, c.reduction(0) as f64))
            .collect();
        let params = ClusterParams { threshold: leaves.len().div_ceil(2).max(1), slack_tol: 0.25, profit_tol: 0.5 };
        let objects = cluster_candidates(leaves, &params, inst.width(), inst.height()).nodes;
        let sa = sa_optimize(&objects, &vsb, inst.width(), inst.height(), &SaParams { seed, moves: 800, ..SaParams::default() });
        prop_assert!(sa.t_total <= sa.initial_t_total);
        let mut listed = sa.plus.clone();
        listed.sort_unstable();
        let mut placed: Vec<usize> = sa.positions.iter().map(|p| p.0).collect();
        placed.sort_unstable();
        prop_assert_eq!(listed, placed);
    }
}

#[test]
fn pre_filter_keeps_the_most_profitable() {
    let spec = GeneratorSpec { candidates: 40, ..GeneratorSpec::small(Mode::TwoD) };
    let inst = generate_instance(&spec, 9).unwrap();
    let (kept, removed) = pre_filter(&inst, 0.9).unwrap();
    assert_eq!(kept.len(), 36);
    let profits = stencil_core::model::weighted_profits(&inst.candidates, &inst.vsb_times());
    let worst_kept = kept.iter().map(|&i| profits[i]).fold(f64::INFINITY, f64::min);
    assert!(removed.iter().all(|&i| profits[i] <= worst_kept));
}

#[test]
fn solvers_are_deterministic() {
    let inst = generate_instance(&GeneratorSpec { candidates: 120, ..GeneratorSpec::small(Mode::OneD) }, 3).unwrap();
    assert_eq!(solve_1d(&inst, &Solve1dParams::default()).unwrap(), solve_1d(&inst, &Solve1dParams::default()).unwrap());
    let inst = generate_instance(&GeneratorSpec { candidates: 120, ..GeneratorSpec::small(Mode::TwoD) }, 3).unwrap();
    assert_eq!(solve_2d(&inst, &quick_sa()).unwrap(), solve_2d(&inst, &quick_sa()).unwrap());
}

#[test]
fn files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate_instance(&GeneratorSpec { candidates: 50, ..GeneratorSpec::small(Mode::TwoD) }, 5).unwrap();
    let path = dir.path().join("inst.json");
    save_instance(&inst, &path).unwrap();
    let back: Instance = load_instance(&path).unwrap();
    assert_eq!(back, inst);
    let (p, _) = solve_2d(&inst, &quick_sa()).unwrap();
    let ppath = dir.path().join("placement.json");
    save_placement(&Placement::TwoD(p.clone()), &ppath).unwrap();
    assert_eq!(load_placement(&ppath).unwrap(), Placement::TwoD(p));
}

#[test]
fn same_seed_same_instance() {
    let spec = GeneratorSpec::small(Mode::OneD);
    assert_eq!(generate_instance(&spec, 4).unwrap(), generate_instance(&spec, 4).unwrap());
    assert_ne!(generate_instance(&spec, 4).unwrap(), generate_instance(&spec, 5).unwrap());
}

#[test]
fn degenerate_2d_pipeline_is_the_constructive_packing() {
    let inst = generate_instance(&GeneratorSpec { candidates: 60, width: 300, height: 300, ..GeneratorSpec::small(Mode::TwoD) }, 2).unwrap();
    let params = Solve2dParams {
        keep_fraction: 1.0,
        cluster_threshold: Some(inst.candidates.len()),
        sa: SaParams { moves: 0, ..SaParams::default() },
        ..Solve2dParams::default()
    };
    let s = solve_2d_detailed(&inst, &params).unwrap();
    assert_eq!(s.stats.merges, 0);
    assert_eq!(s.stats.kept, inst.candidates.len());
    assert_eq!(s.report.t_total, s.stats.initial_t_total);
    assert!(validate_placement(&inst, &Placement::TwoD(s.placement)).is_feasible());
}

proptest! {
    #[test]
    fn pre_filter_partitions(inst in common::instance_2d(30, 1), keep in 0.05f64..=1.0) {
        let (kept, removed) = pre_filter(&inst, keep).unwrap();
        let n = inst.candidates.len();
        prop_assert_eq!(kept.len(), ((keep * n as f64).ceil() as usize).min(n));
        let mut all: Vec<usize> = kept.iter().chain(&removed).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
    }
}
