//! Single-row ordering.
//!
//! Characters in a row are laid out left to right; neighbours `a` then `b`
//! overlap by `min(sr_a, sl_b)`. Under symmetric blanks, inserting
//! characters in decreasing-slack order at either end reaches the widest
//! possible total overlap `sum s - max s`. With real, asymmetric blanks the
//! end chosen at each insertion matters, and [`refine_row`] searches those
//! choices exactly with Pareto pruning over `(width, left slack, right slack)`.

use std::collections::VecDeque;

use crate::model::{CandidateId, CharacterCandidate, Micron};

/// The horizontal footprint of one character.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowItem {
    pub id: CandidateId,
    pub w: Micron,
    pub sl: Micron,
    pub sr: Micron,
}

impl RowItem {
    pub fn of(c: &CharacterCandidate) -> Self {
        RowItem {
            id: c.id,
            w: c.width(),
            sl: c.sl,
            sr: c.sr,
        }
    }

    /// The same character with both blanks replaced by its symmetric slack.
    pub fn symmetric(c: &CharacterCandidate) -> Self {
        let s = c.symmetric_slack();
        RowItem {
            id: c.id,
            w: c.width(),
            sl: s,
            sr: s,
        }
    }

    pub fn slack(&self) -> Micron {
        symmetric_slack(self.sl, self.sr)
    }
}

/// `ceil((sl + sr) / 2)`.
pub fn symmetric_slack(sl: Micron, sr: Micron) -> Micron {
    (sl + sr + 1) / 2
}

/// Row width under symmetric blanks with optimal overlap:
/// `sum (w_i - s_i) + max s_i`. Zero for an empty row.
pub fn row_width_symmetric(items: &[(Micron, Micron)]) -> Micron {
    let Some(max_s) = items.iter().map(|&(_, s)| s).max() else {
        return 0;
    };
    items.iter().map(|&(w, s)| w - s).sum::<Micron>() + max_s
}

/// Total width of a left-to-right sequence, blanks included.
pub fn sequence_width(order: &[RowItem]) -> Micron {
    let overlap: Micron = order.windows(2).map(|p| p[0].sr.min(p[1].sl)).sum();
    order.iter().map(|i| i.w).sum::<Micron>() - overlap
}

/// Box x positions for a left-to-right sequence whose first box starts at `start`.
pub fn layout(order: &[RowItem], start: Micron) -> Vec<Micron> {
    let mut xs = Vec::with_capacity(order.len());
    let mut x = start;
    for (k, item) in order.iter().enumerate() {
        if k > 0 {
            let prev = &order[k - 1];
            x += prev.w - prev.sr.min(item.sl);
        }
        xs.push(x);
    }
    xs
}

/// Decreasing symmetric slack, ties by ascending id.
pub fn canonical_order(items: &[RowItem]) -> Vec<RowItem> {
    let mut sorted = items.to_vec();
    sorted.sort_by_key(|i| (std::cmp::Reverse(i.slack()), i.id));
    sorted
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedRow {
    /// Left to right.
    pub order: Vec<RowItem>,
    pub x: Vec<Micron>,
    pub width: Micron,
}

/// Greedy single-row ordering.
///
/// Items are taken in [`canonical_order`]; each one joins the end whose
/// facing blank overlaps it more, preferring the right end on ties. The first
/// box starts at x = 0.
pub fn greedy_row_order(items: &[RowItem]) -> OrderedRow {
    let mut row: VecDeque<RowItem> = VecDeque::with_capacity(items.len());
    for item in canonical_order(items) {
        match (row.front(), row.back()) {
            (Some(first), Some(last)) => {
                let right = last.sr.min(item.sl);
                let left = item.sr.min(first.sl);
                if left > right {
                    row.push_front(item);
                } else {
                    row.push_back(item);
                }
            }
            _ => row.push_back(item),
        }
    }
    let order: Vec<RowItem> = row.into();
    OrderedRow {
        x: layout(&order, 0),
        width: sequence_width(&order),
        order,
    }
}

/// A partial ordering summarized by its width and exposed end blanks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialOrderSolution {
    pub width: Micron,
    pub left: Micron,
    pub right: Micron,
    /// One entry per item after the first: `true` when it went to the left end.
    pub trace: Vec<bool>,
}

impl PartialOrderSolution {
    fn empty() -> Self {
        PartialOrderSolution {
            width: 0,
            left: 0,
            right: 0,
            trace: Vec::new(),
        }
    }

    fn start(item: &RowItem) -> Self {
        PartialOrderSolution {
            width: item.w,
            left: item.sl,
            right: item.sr,
            trace: Vec::new(),
        }
    }

    fn extend(&self, item: &RowItem, to_left: bool) -> Self {
        let mut trace = self.trace.clone();
        trace.push(to_left);
        if to_left {
            PartialOrderSolution {
                width: self.width + item.w - item.sr.min(self.left),
                left: item.sl,
                right: self.right,
                trace,
            }
        } else {
            PartialOrderSolution {
                width: self.width + item.w - item.sl.min(self.right),
                left: self.left,
                right: item.sr,
                trace,
            }
        }
    }

    /// Span between the outer pattern edges.
    pub fn pattern_span(&self) -> Micron {
        self.width - self.left - self.right
    }

    /// `self` is at least as good as `other` on every coordinate.
    pub fn dominates(&self, other: &Self) -> bool {
        self.width <= other.width && self.left >= other.left && self.right >= other.right
    }
}

/// Rebuilds the left-to-right order described by `trace` over `canonical`.
pub fn apply_trace(canonical: &[RowItem], trace: &[bool]) -> Vec<RowItem> {
    let mut row = VecDeque::with_capacity(canonical.len());
    if let Some(first) = canonical.first() {
        row.push_back(*first);
    }
    for (item, &to_left) in canonical.iter().skip(1).zip(trace) {
        if to_left {
            row.push_front(*item);
        } else {
            row.push_back(*item);
        }
    }
    row.into()
}

/// Default cap on the number of partial solutions kept by [`refine_row`].
pub const REFINE_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinedRow {
    pub order: Vec<RowItem>,
    pub x: Vec<Micron>,
    pub best: PartialOrderSolution,
    /// Final state with the smallest pattern span (ties by width); this is
    /// what has to fit between the outline edges.
    pub tightest: PartialOrderSolution,
    /// Largest partial-solution set held at any step.
    pub peak_states: usize,
}

/// Orders `best < other` for final selection and truncation.
fn better(a: &PartialOrderSolution, b: &PartialOrderSolution) -> std::cmp::Ordering {
    a.width
        .cmp(&b.width)
        .then((b.left + b.right).cmp(&(a.left + a.right)))
        .then(a.trace.cmp(&b.trace))
}

/// Keeps the Pareto frontier over (min width, max left, max right).
pub fn prune_dominated(states: Vec<PartialOrderSolution>) -> Vec<PartialOrderSolution> {
    let mut sorted = states;
    sorted.sort_by(|a, b| {
        a.width
            .cmp(&b.width)
            .then(b.left.cmp(&a.left))
            .then(b.right.cmp(&a.right))
            .then(a.trace.cmp(&b.trace))
    });
    let mut kept: Vec<PartialOrderSolution> = Vec::new();
    for s in sorted {
        if !kept.iter().any(|k| k.dominates(&s)) {
            kept.push(s);
        }
    }
    kept
}

/// Minimum-width left/right insertion sequence over the canonical order.
///
/// When the partial set reaches `cap` it is pruned to its Pareto frontier;
/// if the frontier alone still exceeds `cap`, the widest states are dropped.
pub fn refine_row(items: &[RowItem], cap: usize) -> RefinedRow {
    let canonical = canonical_order(items);
    let Some(first) = canonical.first() else {
        return RefinedRow {
            order: Vec::new(),
            x: Vec::new(),
            best: PartialOrderSolution::empty(),
            tightest: PartialOrderSolution::empty(),
            peak_states: 0,
        };
    };
    let cap = cap.max(1);
    let mut states = vec![PartialOrderSolution::start(first)];
    let mut peak = 1;
    for item in &canonical[1..] {
        let mut next = Vec::with_capacity(states.len() * 2);
        for s in &states {
            next.push(s.extend(item, true));
            next.push(s.extend(item, false));
        }
        peak = peak.max(next.len());
        if next.len() >= cap {
            next = prune_dominated(next);
            if next.len() > cap {
                next.sort_by(better);
                next.truncate(cap);
            }
        }
        states = next;
    }
    let states = prune_dominated(states);
    let tightest = states
        .iter()
        .min_by(|a, b| a.pattern_span().cmp(&b.pattern_span()).then(better(a, b)))
        .cloned()
        .expect("at least one partial solution");
    let best = states
        .into_iter()
        .min_by(better)
        .expect("at least one partial solution");
    let order = apply_trace(&canonical, &best.trace);
    RefinedRow {
        x: layout(&order, 0),
        order,
        best,
        tightest,
        peak_states: peak,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn item(id: CandidateId, w: Micron, sl: Micron, sr: Micron) -> RowItem {
        RowItem { id, w, sl, sr }
    }

    fn sym(id: CandidateId, w: Micron, s: Micron) -> RowItem {
        item(id, w, s, s)
    }

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

    #[test]
    fn slack_values() {
        assert_eq!(symmetric_slack(3, 4), 4);
        assert_eq!(symmetric_slack(5, 5), 5);
        assert_eq!(symmetric_slack(0, 0), 0);
    }

    #[test]
    fn symmetric_width_formula() {
        let items = [sym(0, 10, 4), sym(1, 10, 3), sym(2, 10, 1)];
        let brute = permutations(&items)
            .iter()
            .map(|p| sequence_width(p))
            .min()
            .unwrap();
        assert_eq!(brute, 26);
        assert_eq!(row_width_symmetric(&[(10, 4), (10, 3), (10, 1)]), 26);
        assert_eq!(greedy_row_order(&items).width, 26);
        assert_eq!(row_width_symmetric(&[(17, 5)]), 17);
        assert_eq!(row_width_symmetric(&[(12, 6), (9, 2)]), 12 + 9 - 2);
    }

    #[test]
    fn greedy_single_and_equal() {
        let one = greedy_row_order(&[item(3, 20, 2, 7)]);
        assert_eq!(one.x, vec![0]);
        assert_eq!(one.width, 20);
        let equal: Vec<RowItem> = (0..5).map(|i| sym(i, 30, 6)).collect();
        assert_eq!(greedy_row_order(&equal).width, 5 * 30 - 4 * 6);
    }

    #[test]
    fn refine_two_items() {
        // c1 (w=10, sl=2, sr=4) then c2 (w=8, sl=3, sr=1)
        let c1 = item(1, 10, 2, 4);
        let c2 = item(2, 8, 3, 1);
        let right = PartialOrderSolution::start(&c1).extend(&c2, false);
        let left = PartialOrderSolution::start(&c1).extend(&c2, true);
        assert_eq!(right.width, 15);
        assert_eq!(left.width, 17);
        let r = refine_row(&[c1, c2], REFINE_CAP);
        assert_eq!(r.best.width, 15);
        assert_eq!(r.order.iter().map(|i| i.id).collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(r.x, vec![0, 7]);
    }

    #[test]
    fn refine_single() {
        let r = refine_row(&[item(9, 33, 4, 6)], REFINE_CAP);
        assert_eq!((r.best.width, r.best.left, r.best.right), (33, 4, 6));
    }

    #[test]
    fn pruning_keeps_frontier() {
        let s = |w, l, r| PartialOrderSolution {
            width: w,
            left: l,
            right: r,
            trace: vec![],
        };
        let kept = prune_dominated(vec![s(10, 2, 2), s(11, 1, 1), s(11, 3, 0), s(10, 2, 2)]);
        assert_eq!(kept.len(), 2);
        assert!(kept.contains(&s(10, 2, 2)));
        assert!(kept.contains(&s(11, 3, 0)));
    }

    #[test]
    fn trace_rebuild_matches_width() {
        let items = [item(0, 30, 9, 2), item(1, 40, 3, 8), item(2, 35, 5, 5), item(3, 31, 10, 1)];
        let r = refine_row(&items, REFINE_CAP);
        assert_eq!(sequence_width(&r.order), r.best.width);
        let g = greedy_row_order(&items);
        assert!(r.best.width <= g.width);
    }
}
