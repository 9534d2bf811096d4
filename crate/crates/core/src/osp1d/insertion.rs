//! Row realization under true blanks and greedy insertion of leftovers.

use crate::error::{Error, Result};
use crate::model::{weighted_profits, CandidateId, Instance, Micron, Placement1D, RowSlot, ShotLedger};

use super::row::{apply_trace, canonical_order, greedy_row_order, refine_row, sequence_width, RowItem};

/// Pattern span of a left-to-right sequence: outer pattern edge to outer pattern edge.
pub fn pattern_span(order: &[RowItem]) -> Micron {
    match (order.first(), order.last()) {
        (Some(first), Some(last)) => sequence_width(order) - first.sl - last.sr,
        _ => 0,
    }
}

/// Slots for a left-to-right sequence whose first pattern starts at x = 0.
pub fn row_slots(order: &[RowItem]) -> Vec<RowSlot> {
    let Some(first) = order.first() else {
        return Vec::new();
    };
    let mut slots = Vec::with_capacity(order.len());
    let mut x = -first.sl;
    for (k, item) in order.iter().enumerate() {
        if k > 0 {
            let prev = &order[k - 1];
            x += prev.w - prev.sr.min(item.sl);
        }
        slots.push(RowSlot { id: item.id, x });
    }
    slots
}

/// Best left-to-right order of `items`: the greedy order or the refined one,
/// whichever has the smaller pattern span.
pub fn order_row(items: &[RowItem], refine_cap: usize) -> Vec<RowItem> {
    let greedy = greedy_row_order(items).order;
    let refined = refine_row(items, refine_cap);
    let tight = apply_trace(&canonical_order(items), &refined.tightest.trace);
    if pattern_span(&greedy) < pattern_span(&tight) {
        greedy
    } else {
        tight
    }
}

/// Orders a row and, while its pattern span exceeds `width`, drops the
/// member with the lowest `profit` (ties: highest id). Returns the order and
/// the dropped ids.
pub fn realize_row(
    mut items: Vec<RowItem>,
    width: Micron,
    profit: impl Fn(CandidateId) -> f64,
    refine_cap: usize,
) -> (Vec<RowItem>, Vec<CandidateId>) {
    let mut dropped = Vec::new();
    loop {
        let order = order_row(&items, refine_cap);
        if pattern_span(&order) <= width {
            return (order, dropped);
        }
        let worst = items
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| profit(a.id).total_cmp(&profit(b.id)).then(b.id.cmp(&a.id)))
            .map(|(k, _)| k)
            .expect("an over-wide row is nonempty");
        dropped.push(items.remove(worst).id);
    }
}

/// Inserts unselected candidates one at a time, highest current weighted
/// profit first, at the row end that widens the row least. A candidate that
/// fits nowhere is skipped for good. Rows are re-laid out so each starts its
/// first pattern at x = 0.
pub fn greedy_insertion(
    instance: &Instance,
    placement: &Placement1D,
    unselected: &[CandidateId],
) -> Result<Placement1D> {
    let index = instance.index();
    let lookup = |id: CandidateId| {
        index
            .get(&id)
            .map(|&k| &instance.candidates[k])
            .ok_or(Error::UnknownCandidate(id))
    };
    let width = instance.width();
    let mut ledger = ShotLedger::new(instance);
    let mut rows: Vec<Vec<RowItem>> = Vec::with_capacity(placement.rows.len());
    for row in &placement.rows {
        let mut items = Vec::with_capacity(row.len());
        for slot in row {
            let c = lookup(slot.id)?;
            ledger.select(c);
            items.push(RowItem::of(c));
        }
        rows.push(items);
    }
    let mut pending: Vec<usize> = Vec::with_capacity(unselected.len());
    for &id in unselected {
        lookup(id)?;
        let k = index[&id];
        if !pending.contains(&k) && !placement.rows.iter().flatten().any(|s| s.id == id) {
            pending.push(k);
        }
    }

    while !pending.is_empty() {
        let profits = weighted_profits(&instance.candidates, ledger.times());
        let (pos, _) = pending
            .iter()
            .enumerate()
            .max_by(|(_, &a), (_, &b)| {
                profits[a]
                    .total_cmp(&profits[b])
                    .then(instance.candidates[b].id.cmp(&instance.candidates[a].id))
            })
            .expect("pending is nonempty");
        let k = pending.swap_remove(pos);
        let c = &instance.candidates[k];
        let item = RowItem::of(c);
        // (growth, row, at_left)
        let mut best: Option<(Micron, usize, bool)> = None;
        for (j, row) in rows.iter().enumerate() {
            let current = sequence_width(row);
            for at_left in [false, true] {
                let mut trial = row.clone();
                if at_left {
                    trial.insert(0, item);
                } else {
                    trial.push(item);
                }
                if pattern_span(&trial) > width {
                    continue;
                }
                let growth = sequence_width(&trial) - current;
                if best.is_none_or(|(g, _, _)| growth < g) {
                    best = Some((growth, j, at_left));
                }
                if row.is_empty() {
                    break;
                }
            }
        }
        if let Some((_, j, at_left)) = best {
            if at_left {
                rows[j].insert(0, item);
            } else {
                rows[j].push(item);
            }
            ledger.select(c);
        }
    }

    Ok(Placement1D {
        rows: rows.iter().map(|r| row_slots(r)).collect(),
    })
}
