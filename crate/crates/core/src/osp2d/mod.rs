//! Free 2D stencil planning.
//!
//! The least profitable candidates are dropped up front, the rest are
//! clustered into rigid blocks of similar characters, and the blocks are
//! placed by annealing a sequence pair. Blocks are expanded back to their
//! member characters at the end.

mod anneal;
mod cluster;
mod kdtree;
mod seqpair;

pub use anneal::{sa_optimize, SaParams, SaResult};
pub use cluster::{cluster_candidates, scan_partner, similarity_box, ClusterNode, ClusterParams, Clustering, Orientation};
pub use kdtree::KdTree;
pub use seqpair::{is_sequence_pair, sp_pack, Rect};

use crate::error::{Error, Result};
use crate::model::{evaluate, weighted_profits, Instance, Mode, Placed, Placement2D, WritingTimeReport};

/// Splits candidate indices into the `ceil(keep_fraction * n)` most
/// profitable at the base writing times and the rest, ties by id. Both lists
/// come back in index order.
pub fn pre_filter(instance: &Instance, keep_fraction: f64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(keep_fraction > 0.0 && keep_fraction <= 1.0) {
        return Err(Error::Param(format!("keep fraction {keep_fraction} is outside (0, 1]")));
    }
    let n = instance.candidates.len();
    let profits = weighted_profits(&instance.candidates, &instance.vsb_times());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        profits[b]
            .total_cmp(&profits[a])
            .then(instance.candidates[a].id.cmp(&instance.candidates[b].id))
    });
    let keep = ((keep_fraction * n as f64).ceil() as usize).min(n);
    let mut kept = order[..keep].to_vec();
    let mut removed = order[keep..].to_vec();
    kept.sort_unstable();
    removed.sort_unstable();
    Ok((kept, removed))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Solve2dParams {
    pub keep_fraction: f64,
    /// Object count at which clustering stops; half the kept set by default.
    pub cluster_threshold: Option<usize>,
    pub slack_tol: f64,
    pub profit_tol: f64,
    pub sa: SaParams,
}

impl Default for Solve2dParams {
    fn default() -> Self {
        Solve2dParams {
            keep_fraction: 0.9,
            cluster_threshold: None,
            slack_tol: 0.25,
            profit_tol: 0.5,
            sa: SaParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solve2dStats {
    pub kept: usize,
    pub objects: usize,
    pub cluster_rounds: usize,
    pub merges: usize,
    pub kd_probes: u64,
    pub sa_moves: usize,
    pub sa_accepted: usize,
    pub initial_t_total: u64,
}

#[derive(Debug, Clone)]
pub struct Solve2d {
    pub placement: Placement2D,
    pub report: WritingTimeReport,
    pub stats: Solve2dStats,
}

pub fn solve_2d(instance: &Instance, params: &Solve2dParams) -> Result<(Placement2D, WritingTimeReport)> {
    let s = solve_2d_detailed(instance, params)?;
    Ok((s.placement, s.report))
}

pub fn solve_2d_detailed(instance: &Instance, params: &Solve2dParams) -> Result<Solve2d> {
    if instance.mode != Mode::TwoD {
        return Err(Error::ModeMismatch("solve_2d needs a 2d instance"));
    }
    if !(params.slack_tol >= 0.0 && params.profit_tol >= 0.0) {
        return Err(Error::Param("similarity tolerances must be nonnegative".into()));
    }
    if !(params.sa.cooling > 0.0 && params.sa.cooling < 1.0) {
        return Err(Error::Param(format!("cooling {} is outside (0, 1)", params.sa.cooling)));
    }
    let (kept, _) = pre_filter(instance, params.keep_fraction)?;
    let vsb = instance.vsb_times();
    let profits = weighted_profits(&instance.candidates, &vsb);
    let (width, height) = (instance.width(), instance.height());
    // a character whose pattern exceeds the outline can never be placed
    let leaves: Vec<ClusterNode> = kept
        .iter()
        .filter(|&&i| instance.candidates[i].pw <= width && instance.candidates[i].ph <= height)
        .map(|&i| ClusterNode::leaf(&instance.candidates[i], profits[i]))
        .collect();
    let threshold = params.cluster_threshold.unwrap_or(kept.len().div_ceil(2));
    let clustering = cluster_candidates(
        leaves,
        &ClusterParams {
            threshold,
            slack_tol: params.slack_tol,
            profit_tol: params.profit_tol,
        },
        width,
        height,
    );
    let objects = &clustering.nodes;
    let sa = sa_optimize(objects, &vsb, width, height, &params.sa);

    let mut placed = Vec::new();
    for &(k, x, y) in &sa.positions {
        placed.extend(objects[k].members.iter().map(|&(id, dx, dy)| Placed {
            id,
            x: x + dx,
            y: y + dy,
        }));
    }
    let plus = sa.plus.iter().flat_map(|&k| objects[k].seq.0.iter().copied()).collect();
    let minus = sa.minus.iter().flat_map(|&k| objects[k].seq.1.iter().copied()).collect();
    let placement = Placement2D {
        placed,
        seq_pair: (plus, minus),
    };
    let report = evaluate(instance, placement.selected())?;
    let stats = Solve2dStats {
        kept: kept.len(),
        objects: objects.len(),
        cluster_rounds: clustering.rounds,
        merges: clustering.merges,
        kd_probes: clustering.probes,
        sa_moves: sa.moves,
        sa_accepted: sa.accepted,
        initial_t_total: sa.initial_t_total,
    };
    Ok(Solve2d {
        placement,
        report,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_instance, validate_placement, GeneratorSpec, Placement};

    #[test]
    fn keeps_the_ceiling() {
        let spec = GeneratorSpec {
            candidates: 11,
            ..GeneratorSpec::small(Mode::TwoD)
        };
        let inst = generate_instance(&spec, 2).unwrap();
        let (kept, removed) = pre_filter(&inst, 0.5).unwrap();
        assert_eq!((kept.len(), removed.len()), (6, 5));
        assert!(pre_filter(&inst, 0.0).is_err());
        assert_eq!(pre_filter(&inst, 1.0).unwrap().0.len(), 11);
    }

    #[test]
    fn small_generated_instance_is_feasible() {
        let spec = GeneratorSpec {
            candidates: 80,
            width: 300,
            height: 300,
            ..GeneratorSpec::small(Mode::TwoD)
        };
        let inst = generate_instance(&spec, 5).unwrap();
        let params = Solve2dParams {
            sa: SaParams {
                moves: 2000,
                ..SaParams::default()
            },
            ..Solve2dParams::default()
        };
        let s = solve_2d_detailed(&inst, &params).unwrap();
        let v = validate_placement(&inst, &Placement::TwoD(s.placement.clone()));
        assert!(v.is_feasible(), "{v:?}");
        assert!(s.report.t_total <= s.stats.initial_t_total);
        assert!(s.stats.objects <= 36);
    }

    #[test]
    fn rejects_1d() {
        let spec = GeneratorSpec {
            candidates: 3,
            ..GeneratorSpec::small(Mode::OneD)
        };
        let inst = generate_instance(&spec, 1).unwrap();
        assert!(solve_2d(&inst, &Solve2dParams::default()).is_err());
    }
}
