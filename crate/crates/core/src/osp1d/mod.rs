//! Row-structured stencil planning.
//!
//! Pipeline: successive LP rounding assigns candidates to rows under the
//! symmetric-blank capacity model, each row is ordered greedily and then
//! refined under the true blanks, rows that still overrun the outline shed
//! their least profitable members, and a final greedy pass packs leftovers
//! into whatever room remains. A closing local search swaps unselected
//! candidates in wherever that lowers the slowest regions.

mod improve;
mod insertion;
mod rounding;
mod row;

pub use improve::{polish_rows, Polished, PROBE_REFINE_CAP};
pub use insertion::{greedy_insertion, order_row, pattern_span, realize_row, row_slots};
pub use rounding::{
    build_simplified_lp, row_classes, succ_rounding, succ_rounding_with, ClassLp, ProfitModel, RowClass, Rounding,
    RowState, SimplifiedLp,
};
pub use row::{
    apply_trace, canonical_order, greedy_row_order, layout, prune_dominated, refine_row, row_width_symmetric,
    sequence_width, symmetric_slack, OrderedRow, PartialOrderSolution, RefinedRow, RowItem, REFINE_CAP,
};

use crate::error::{Error, Result};
use crate::model::{evaluate, weighted_profits, Instance, Mode, Placement1D, WritingTimeReport};

/// Weighted profits for the region times in `report`.
pub fn update_profits(instance: &Instance, report: &WritingTimeReport) -> Vec<f64> {
    weighted_profits(&instance.candidates, &report.t_per_region)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Solve1dParams {
    pub th_inv: f64,
    pub refine_cap: usize,
    /// Sweeps of the closing local search; 0 disables it.
    pub polish_passes: usize,
}

impl Default for Solve1dParams {
    fn default() -> Self {
        Solve1dParams {
            th_inv: 0.9,
            refine_cap: REFINE_CAP,
            polish_passes: 50,
        }
    }
}

/// Per-stage diagnostics of [`solve_1d_detailed`].
#[derive(Debug, Clone, PartialEq)]
pub struct Solve1dStats {
    pub lp_solves: usize,
    pub simplex_iterations: usize,
    pub first_lp_objective: f64,
    /// Selection straight out of the rounding.
    pub rounding_selected: usize,
    pub rounding_t_total: u64,
    /// Candidates removed because their row overran the outline.
    pub repaired: usize,
    pub realized_t_total: u64,
    pub inserted: usize,
    pub inserted_t_total: u64,
    pub polish_passes: usize,
    pub polish_moves: usize,
}

#[derive(Debug, Clone)]
pub struct Solve1d {
    pub placement: Placement1D,
    pub report: WritingTimeReport,
    pub stats: Solve1dStats,
}

pub fn solve_1d(instance: &Instance, params: &Solve1dParams) -> Result<(Placement1D, WritingTimeReport)> {
    let s = solve_1d_detailed(instance, params)?;
    Ok((s.placement, s.report))
}

pub fn solve_1d_detailed(instance: &Instance, params: &Solve1dParams) -> Result<Solve1d> {
    if instance.mode != Mode::OneD {
        return Err(Error::ModeMismatch("solve_1d needs a 1d instance"));
    }
    let rounding = succ_rounding(instance, params.th_inv)?;
    let selected: Vec<_> = rounding
        .selected_indices()
        .iter()
        .map(|&i| instance.candidates[i].id)
        .collect();
    let rounded_report = evaluate(instance, selected.iter().copied())?;
    let rounding_t_total = rounded_report.t_total;
    let profits = update_profits(instance, &rounded_report);
    let index = instance.index();
    let profit_of = |id| profits[index[&id]];
    let mut rows = Vec::with_capacity(rounding.rows.len());
    let mut repaired = 0;
    for state in &rounding.rows {
        let items: Vec<RowItem> = state
            .members
            .iter()
            .map(|&i| RowItem::of(&instance.candidates[i]))
            .collect();
        let (order, dropped) = realize_row(items, instance.width(), profit_of, params.refine_cap);
        repaired += dropped.len();
        rows.push(row_slots(&order));
    }
    let realized = Placement1D { rows };
    let realized_selected = realized.selected();
    let realized_t_total = evaluate(instance, realized_selected.iter().copied())?.t_total;

    let chosen: std::collections::HashSet<_> = realized_selected.iter().copied().collect();
    let unselected: Vec<_> = instance
        .candidates
        .iter()
        .map(|c| c.id)
        .filter(|id| !chosen.contains(id))
        .collect();
    let mut placement = greedy_insertion(instance, &realized, &unselected)?;
    let inserted = placement.selected().len() - realized_selected.len();
    let inserted_t_total = evaluate(instance, placement.selected())?.t_total;
    let polished = polish_rows(instance, &mut placement, params.polish_passes)?;
    let report = evaluate(instance, placement.selected())?;
    let stats = Solve1dStats {
        lp_solves: rounding.lp_solves,
        simplex_iterations: rounding.simplex_iterations,
        first_lp_objective: rounding.first_lp_objective,
        rounding_selected: selected.len(),
        rounding_t_total,
        repaired,
        realized_t_total,
        inserted,
        inserted_t_total,
        polish_passes: polished.passes,
        polish_moves: polished.moves,
    };
    Ok(Solve1d {
        placement,
        report,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_instance, validate_placement, GeneratorSpec, Placement, Stencil};

    #[test]
    fn empty_instance() {
        let inst = Instance {
            mode: Mode::OneD,
            stencil: Stencil {
                w: 100,
                h: 100,
                rows: Some(2),
                row_height: Some(50),
            },
            regions: 3,
            candidates: vec![],
            seed: 0,
        };
        let (p, r) = solve_1d(&inst, &Solve1dParams::default()).unwrap();
        assert!(p.selected().is_empty());
        assert_eq!(r.t_total, 0);
    }

    #[test]
    fn single_region_profit_is_reduction() {
        let spec = GeneratorSpec {
            candidates: 5,
            regions: 1,
            ..GeneratorSpec::small(Mode::OneD)
        };
        let inst = generate_instance(&spec, 4).unwrap();
        let base = evaluate(&inst, []).unwrap();
        let p = update_profits(&inst, &base);
        for (c, &v) in inst.candidates.iter().zip(&p) {
            assert_eq!(v, c.reduction(0) as f64);
        }
    }

    #[test]
    fn small_generated_instance_is_feasible() {
        let spec = GeneratorSpec {
            candidates: 60,
            width: 300,
            height: 150,
            ..GeneratorSpec::small(Mode::OneD)
        };
        let inst = generate_instance(&spec, 11).unwrap();
        let s = solve_1d_detailed(&inst, &Solve1dParams::default()).unwrap();
        let v = validate_placement(&inst, &Placement::OneD(s.placement.clone()));
        assert!(v.is_feasible(), "{v:?}");
        assert!(s.report.t_total <= s.stats.inserted_t_total);
        assert!(s.stats.inserted_t_total <= s.stats.realized_t_total);
        assert!(s.report.t_total < s.report.t_vsb.iter().copied().max().unwrap());
    }

    #[test]
    fn rejects_2d() {
        let spec = GeneratorSpec {
            candidates: 3,
            ..GeneratorSpec::small(Mode::TwoD)
        };
        let inst = generate_instance(&spec, 1).unwrap();
        assert!(solve_1d(&inst, &Solve1dParams::default()).is_err());
    }
}
