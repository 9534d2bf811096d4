//! Pairwise clustering of similar characters into rigid blocks.

use serde::{Deserialize, Serialize};

use super::kdtree::KdTree;
use crate::model::{CandidateId, CharacterCandidate, Micron};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// A rigid block of one or more characters.
///
/// `members` holds each character's box offset from the block's lower-left
/// box corner. Blanks are the distances from the block box to the bounding
/// box of the member patterns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterNode {
    pub id: u32,
    pub members: Vec<(CandidateId, Micron, Micron)>,
    /// Member sequence pair consistent with the merge tree.
    pub seq: (Vec<CandidateId>, Vec<CandidateId>),
    pub orientation: Option<Orientation>,
    pub w: Micron,
    pub h: Micron,
    pub sl: Micron,
    pub sr: Micron,
    pub st: Micron,
    pub sb: Micron,
    /// Summed weighted profit of the members.
    pub profit: f64,
    /// Summed per-region shot reduction of the members.
    pub reduction: Vec<u64>,
}

impl ClusterNode {
    pub fn leaf(c: &CharacterCandidate, profit: f64) -> Self {
        ClusterNode {
            id: c.id,
            members: vec![(c.id, 0, 0)],
            seq: (vec![c.id], vec![c.id]),
            orientation: None,
            w: c.width(),
            h: c.height(),
            sl: c.sl,
            sr: c.sr,
            st: c.st,
            sb: c.sb,
            profit,
            reduction: (0..c.t.len()).map(|r| c.reduction(r)).collect(),
        }
    }

    pub fn pattern_width(&self) -> Micron {
        self.w - self.sl - self.sr
    }

    pub fn pattern_height(&self) -> Micron {
        self.h - self.st - self.sb
    }

    pub fn area(&self) -> Micron {
        self.w * self.h
    }

    /// `(horizontal slack, vertical slack, profit)`.
    pub fn signature(&self) -> [f64; 3] {
        [
            ((self.sl + self.sr + 1) / 2) as f64,
            ((self.st + self.sb + 1) / 2) as f64,
            self.profit,
        ]
    }

    /// `a` and `b` merged, `b` to the right of (horizontal) or above
    /// (vertical) `a`, sharing the facing blanks.
    pub fn merge(a: &ClusterNode, b: &ClusterNode, orientation: Orientation, id: u32) -> ClusterNode {
        let (dx, dy) = match orientation {
            Orientation::Horizontal => (a.w - a.sr.min(b.sl), 0),
            Orientation::Vertical => (0, a.h - a.st.min(b.sb)),
        };
        let w = a.w.max(dx + b.w);
        let h = a.h.max(dy + b.h);
        let left = a.sl.min(dx + b.sl);
        let right = (a.w - a.sr).max(dx + b.w - b.sr);
        let bottom = a.sb.min(dy + b.sb);
        let top = (a.h - a.st).max(dy + b.h - b.st);
        let mut members = a.members.clone();
        members.extend(b.members.iter().map(|&(id, x, y)| (id, x + dx, y + dy)));
        let minus = [a.seq.1.as_slice(), b.seq.1.as_slice()].concat();
        let plus = match orientation {
            Orientation::Horizontal => [a.seq.0.as_slice(), b.seq.0.as_slice()].concat(),
            Orientation::Vertical => [b.seq.0.as_slice(), a.seq.0.as_slice()].concat(),
        };
        ClusterNode {
            id,
            members,
            seq: (plus, minus),
            orientation: Some(orientation),
            w,
            h,
            sl: left,
            sr: w - right,
            st: h - top,
            sb: bottom,
            profit: a.profit + b.profit,
            reduction: a.reduction.iter().zip(&b.reduction).map(|(x, y)| x + y).collect(),
        }
    }

    /// The cheaper of the two merges by box area, horizontal on ties.
    pub fn best_merge(a: &ClusterNode, b: &ClusterNode, id: u32) -> ClusterNode {
        let h = Self::merge(a, b, Orientation::Horizontal, id);
        let v = Self::merge(a, b, Orientation::Vertical, id);
        if v.area() < h.area() {
            v
        } else {
            h
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterParams {
    /// Stop once this many objects remain.
    pub threshold: usize,
    /// Relative half-width of the similarity box on each slack axis.
    pub slack_tol: f64,
    /// Relative half-width of the similarity box on profit.
    pub profit_tol: f64,
}

#[derive(Debug, Clone)]
pub struct Clustering {
    /// Live objects: merged blocks and untouched singletons.
    pub nodes: Vec<ClusterNode>,
    pub rounds: usize,
    pub merges: usize,
    /// Tree nodes visited by partner searches.
    pub probes: u64,
}

/// Similarity box around `sig`.
pub fn similarity_box(sig: &[f64; 3], slack_tol: f64, profit_tol: f64) -> ([f64; 3], [f64; 3]) {
    let lo = [
        sig[0] * (1.0 - slack_tol),
        sig[1] * (1.0 - slack_tol),
        sig[2] * (1.0 - profit_tol),
    ];
    let hi = [
        sig[0] * (1.0 + slack_tol),
        sig[1] * (1.0 + slack_tol),
        sig[2] * (1.0 + profit_tol),
    ];
    (lo, hi)
}

/// Highest profit first, then lowest id.
fn partner_order(a: &ClusterNode, b: &ClusterNode) -> std::cmp::Ordering {
    b.profit.total_cmp(&a.profit).then(a.id.cmp(&b.id))
}

/// Merges similar objects pairwise in rounds until at most
/// `params.threshold` objects remain or a round merges nothing. Merges whose
/// pattern box would not fit a `width × height` outline are skipped.
pub fn cluster_candidates(
    leaves: Vec<ClusterNode>,
    params: &ClusterParams,
    width: Micron,
    height: Micron,
) -> Clustering {
    let mut nodes = leaves;
    let mut next_id = nodes.iter().map(|n| n.id + 1).max().unwrap_or(0);
    let mut rounds = 0;
    let mut merges = 0;
    let mut probes = 0;
    while nodes.len() > params.threshold {
        rounds += 1;
        nodes.sort_by(partner_order);
        let pos: std::collections::HashMap<u32, usize> = nodes.iter().enumerate().map(|(k, n)| (n.id, k)).collect();
        let mut tree = KdTree::build(nodes.iter().map(|n| (n.signature(), n.id)).collect());
        let mut taken = vec![false; nodes.len()];
        let mut merged: Vec<ClusterNode> = Vec::new();
        let mut live = nodes.len();
        for k in 0..nodes.len() {
            if live <= params.threshold {
                break;
            }
            if taken[k] {
                continue;
            }
            let a = &nodes[k];
            tree.delete(a.signature(), a.id);
            let (lo, hi) = similarity_box(&a.signature(), params.slack_tol, params.profit_tol);
            // profit is the last signature axis, so the best-on-axis entry is the partner
            let partner = tree.best_in_range(&lo, &hi, 2, |id| {
                let m = ClusterNode::best_merge(a, &nodes[pos[&id]], 0);
                m.pattern_width() <= width && m.pattern_height() <= height
            });
            let Some(p) = partner.map(|id| pos[&id]) else {
                continue;
            };
            tree.delete(nodes[p].signature(), nodes[p].id);
            taken[k] = true;
            taken[p] = true;
            merged.push(ClusterNode::best_merge(a, &nodes[p], next_id));
            next_id += 1;
            live -= 1;
        }
        probes += tree.probes();
        if merged.is_empty() {
            break;
        }
        merges += merged.len();
        let mut next: Vec<ClusterNode> = nodes
            .into_iter()
            .zip(taken)
            .filter(|(_, t)| !t)
            .map(|(n, _)| n)
            .collect();
        next.extend(merged);
        nodes = next;
    }
    nodes.sort_by_key(|n| n.id);
    Clustering {
        nodes,
        rounds,
        merges,
        probes,
    }
}

/// Partner the clustering would pick for `a` among `others` by plain scan.
pub fn scan_partner<'a>(
    a: &ClusterNode,
    others: &'a [ClusterNode],
    params: &ClusterParams,
    width: Micron,
    height: Micron,
) -> Option<&'a ClusterNode> {
    let (lo, hi) = similarity_box(&a.signature(), params.slack_tol, params.profit_tol);
    others
        .iter()
        .filter(|n| n.id != a.id)
        .filter(|n| {
            let s = n.signature();
            (0..3).all(|d| lo[d] <= s[d] && s[d] <= hi[d])
        })
        .filter(|n| {
            let m = ClusterNode::best_merge(a, n, 0);
            m.pattern_width() <= width && m.pattern_height() <= height
        })
        .min_by(|p, q| partner_order(p, q))
}
