//! Local search on a finished row placement.
//!
//! Unselected candidates are tried as additions to a row or as replacements
//! for one of its members. A move is kept only when it lowers the region
//! times sorted from slowest down (lexicographically) and the row still has
//! an ordering whose pattern span fits the outline.

use crate::error::{Error, Result};
use crate::model::{Instance, Micron, Placement1D, ShotLedger};

use super::insertion::{order_row, pattern_span, row_slots};
use super::row::{greedy_row_order, RowItem};

/// Refinement cap used when probing whether a trial row fits.
pub const PROBE_REFINE_CAP: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Polished {
    pub passes: usize,
    pub moves: usize,
}

fn slowest_first(times: &[u64]) -> Vec<u64> {
    let mut v = times.to_vec();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

/// A left-to-right order of `items` that fits `width`, if one is found.
fn fitting_order(items: &[RowItem], width: Micron) -> Option<Vec<RowItem>> {
    let greedy = greedy_row_order(items).order;
    if pattern_span(&greedy) <= width {
        return Some(greedy);
    }
    let refined = order_row(items, PROBE_REFINE_CAP);
    (pattern_span(&refined) <= width).then_some(refined)
}

/// Improves `placement` in place for at most `max_passes` sweeps over the
/// unselected candidates. Never raises any region time above its current
/// sorted profile.
pub fn polish_rows(instance: &Instance, placement: &mut Placement1D, max_passes: usize) -> Result<Polished> {
    let index = instance.index();
    let width = instance.width();
    let mut ledger = ShotLedger::new(instance);
    let mut selected = vec![false; instance.candidates.len()];
    let mut rows: Vec<Vec<usize>> = Vec::with_capacity(placement.rows.len());
    let mut orders: Vec<Option<Vec<RowItem>>> = vec![None; placement.rows.len()];
    for row in &placement.rows {
        let mut members = Vec::with_capacity(row.len());
        for slot in row {
            let &k = index.get(&slot.id).ok_or(Error::UnknownCandidate(slot.id))?;
            selected[k] = true;
            ledger.select(&instance.candidates[k]);
            members.push(k);
        }
        rows.push(members);
    }
    let items = |row: &[usize]| -> Vec<RowItem> { row.iter().map(|&k| RowItem::of(&instance.candidates[k])).collect() };

    let mut stats = Polished { passes: 0, moves: 0 };
    let mut current = slowest_first(ledger.times());
    while stats.passes < max_passes {
        stats.passes += 1;
        let mut improved = false;
        for b in 0..instance.candidates.len() {
            if selected[b] {
                continue;
            }
            let cb = &instance.candidates[b];
            ledger.select(cb);
            'rows: for j in 0..rows.len() {
                let with_b = slowest_first(ledger.times());
                if with_b < current {
                    let mut trial = rows[j].clone();
                    trial.push(b);
                    if let Some(order) = fitting_order(&items(&trial), width) {
                        rows[j] = trial;
                        orders[j] = Some(order);
                        selected[b] = true;
                        current = with_b;
                        improved = true;
                        stats.moves += 1;
                        break 'rows;
                    }
                }
                for pos in 0..rows[j].len() {
                    let a = rows[j][pos];
                    let ca = &instance.candidates[a];
                    ledger.deselect(ca);
                    let swapped = slowest_first(ledger.times());
                    if swapped < current {
                        let mut trial = rows[j].clone();
                        trial[pos] = b;
                        if let Some(order) = fitting_order(&items(&trial), width) {
                            rows[j] = trial;
                            orders[j] = Some(order);
                            selected[b] = true;
                            selected[a] = false;
                            current = swapped;
                            improved = true;
                            stats.moves += 1;
                            break 'rows;
                        }
                    }
                    ledger.select(ca);
                }
            }
            if !selected[b] {
                ledger.deselect(cb);
            }
        }
        if !improved {
            break;
        }
    }
    for (j, order) in orders.into_iter().enumerate() {
        if let Some(order) = order {
            placement.rows[j] = row_slots(&order);
        }
    }
    Ok(stats)
}
