//! Greedy reference planners.

use crate::error::{Error, Result};
use crate::model::{
    evaluate, weighted_profits, Instance, Micron, Mode, Placed, Placement1D, Placement2D, WritingTimeReport,
};
use crate::osp1d::{greedy_row_order, pattern_span, row_slots, RowItem, RowState};

fn baseline_profits(instance: &Instance) -> Vec<f64> {
    weighted_profits(&instance.candidates, &instance.vsb_times())
}

/// Candidate indices by profit density `profit / size` descending, ties by id.
fn by_density(instance: &Instance, profits: &[f64], size: impl Fn(usize) -> Micron) -> Vec<usize> {
    let density: Vec<f64> = (0..instance.candidates.len())
        .map(|i| profits[i] / size(i).max(1) as f64)
        .collect();
    let mut order: Vec<usize> = (0..instance.candidates.len()).collect();
    order.sort_by(|&a, &b| {
        density[b]
            .total_cmp(&density[a])
            .then(instance.candidates[a].id.cmp(&instance.candidates[b].id))
    });
    order
}

/// First-fit by profit density under the symmetric-blank row capacity, rows
/// laid out in greedy order. A row whose true pattern span overruns the
/// outline sheds its lowest-profit members.
pub fn greedy_baseline_1d(instance: &Instance) -> Result<(Placement1D, WritingTimeReport)> {
    if instance.mode != Mode::OneD {
        return Err(Error::ModeMismatch("greedy_baseline_1d needs a 1d instance"));
    }
    let width = instance.width();
    let profits = baseline_profits(instance);
    let mut rows: Vec<RowState> = (0..instance.row_count()).map(RowState::new).collect();
    let order = by_density(instance, &profits, |i| {
        let c = &instance.candidates[i];
        c.width() - c.symmetric_slack()
    });
    for i in order {
        let c = &instance.candidates[i];
        let (w, s) = (c.width(), c.symmetric_slack());
        if let Some(row) = rows.iter_mut().find(|r| r.fits(w, s, width)) {
            row.push(i, w, s);
        }
    }
    let mut placed_rows = Vec::with_capacity(rows.len());
    for row in &rows {
        let mut members = row.members.clone();
        loop {
            let items: Vec<RowItem> = members.iter().map(|&i| RowItem::of(&instance.candidates[i])).collect();
            let ordered = greedy_row_order(&items).order;
            if pattern_span(&ordered) <= width {
                placed_rows.push(row_slots(&ordered));
                break;
            }
            let worst = (0..members.len())
                .min_by(|&a, &b| {
                    profits[members[a]]
                        .total_cmp(&profits[members[b]])
                        .then(instance.candidates[members[b]].id.cmp(&instance.candidates[members[a]].id))
                })
                .expect("an over-wide row is nonempty");
            members.remove(worst);
        }
    }
    let placement = Placement1D { rows: placed_rows };
    let report = evaluate(instance, placement.selected())?;
    Ok((placement, report))
}

/// Shelf packing by profit density over pattern-plus-blank area. Characters
/// share horizontal blanks with their shelf neighbour; shelves are stacked
/// without vertical sharing.
pub fn greedy_baseline_2d(instance: &Instance) -> Result<(Placement2D, WritingTimeReport)> {
    if instance.mode != Mode::TwoD {
        return Err(Error::ModeMismatch("greedy_baseline_2d needs a 2d instance"));
    }
    let (width, height) = (instance.width(), instance.height());
    let profits = baseline_profits(instance);
    let order = by_density(instance, &profits, |i| {
        let c = &instance.candidates[i];
        c.width() * c.height()
    });

    struct Shelf {
        y: Micron,
        height: Micron,
        items: Vec<RowItem>,
    }
    let mut shelves: Vec<Shelf> = Vec::new();
    let mut top = 0;
    for i in order {
        let c = &instance.candidates[i];
        let item = RowItem::of(c);
        let fits_shelf = |s: &Shelf| {
            if c.height() > s.height || s.y + c.height() - c.st > height {
                return false;
            }
            let mut trial = s.items.clone();
            trial.push(item);
            pattern_span(&trial) <= width
        };
        if let Some(shelf) = shelves.iter_mut().find(|s| fits_shelf(s)) {
            shelf.items.push(item);
            continue;
        }
        let y = top;
        if c.pw <= width && y + c.height() - c.st <= height {
            top = y + c.height();
            shelves.push(Shelf {
                y,
                height: c.height(),
                items: vec![item],
            });
        }
    }

    // sequence pair: shelves top to bottom / bottom to top, each left to right
    let mut placed = Vec::new();
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for shelf in &shelves {
        let ids: Vec<_> = shelf.items.iter().map(|i| i.id).collect();
        for slot in row_slots(&shelf.items) {
            placed.push(Placed {
                id: slot.id,
                x: slot.x,
                y: shelf.y,
            });
        }
        minus.extend(ids.iter().copied());
        plus.splice(0..0, ids);
    }
    let placement = Placement2D {
        placed,
        seq_pair: (plus, minus),
    };
    let report = evaluate(instance, placement.selected())?;
    Ok((placement, report))
}
