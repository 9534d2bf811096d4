//! Placement feasibility.
//!
//! Two characters may share blank space: when `a` sits left of `b`, their
//! patterns must be at least `max(sr_a, sl_b)` apart, so the tightest pitch
//! is `w_a - min(sr_a, sl_b)`. Patterns must stay inside the outline while
//! blanks may hang past it.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::{CandidateId, CharacterCandidate, Instance, Micron, Mode, Placement, Placement1D, Placement2D};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    ModeMismatch,
    UnknownCandidate { id: CandidateId },
    Duplicate { id: CandidateId },
    RowOutOfRange { row: usize },
    TooTall { id: CandidateId },
    /// `b` follows `a` in a row but is not to its right.
    Unordered { a: CandidateId, b: CandidateId },
    /// Patterns of `a` and `b` are closer than their facing blanks allow.
    Overlap { a: CandidateId, b: CandidateId },
    OutsideOutline { id: CandidateId },
    SequencePair,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Verdict {
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_placement(instance: &Instance, placement: &Placement) -> Verdict {
    match (instance.mode, placement) {
        (Mode::OneD, Placement::OneD(p)) => validate_1d(instance, p),
        (Mode::TwoD, Placement::TwoD(p)) => validate_2d(instance, p),
        _ => Verdict {
            violations: vec![Violation::ModeMismatch],
        },
    }
}

/// Whether `b` placed `dx` to the right of `a` keeps the horizontal blank rule.
pub(crate) fn horizontal_ok(a: &CharacterCandidate, b: &CharacterCandidate, dx: Micron) -> bool {
    dx >= a.width() - a.sr.min(b.sl)
}

pub(crate) fn vertical_ok(a: &CharacterCandidate, b: &CharacterCandidate, dy: Micron) -> bool {
    dy >= a.height() - a.st.min(b.sb)
}

fn lookup<'a>(
    instance: &'a Instance,
    index: &HashMap<CandidateId, usize>,
    seen: &mut HashSet<CandidateId>,
    id: CandidateId,
    violations: &mut Vec<Violation>,
) -> Option<&'a CharacterCandidate> {
    let Some(&i) = index.get(&id) else {
        violations.push(Violation::UnknownCandidate { id });
        return None;
    };
    if !seen.insert(id) {
        violations.push(Violation::Duplicate { id });
    }
    Some(&instance.candidates[i])
}

fn validate_1d(instance: &Instance, p: &Placement1D) -> Verdict {
    let index = instance.index();
    let mut seen = HashSet::new();
    let mut violations = Vec::new();
    let w = instance.width();
    for (r, row) in p.rows.iter().enumerate() {
        if r >= instance.row_count() && !row.is_empty() {
            violations.push(Violation::RowOutOfRange { row: r });
        }
        let mut prev: Option<(&CharacterCandidate, Micron)> = None;
        for slot in row {
            let Some(c) = lookup(instance, &index, &mut seen, slot.id, &mut violations) else {
                prev = None;
                continue;
            };
            if c.height() > instance.row_height() {
                violations.push(Violation::TooTall { id: c.id });
            }
            if slot.x + c.sl < 0 || slot.x + c.width() - c.sr > w {
                violations.push(Violation::OutsideOutline { id: c.id });
            }
            if let Some((a, xa)) = prev {
                if slot.x < xa {
                    violations.push(Violation::Unordered { a: a.id, b: c.id });
                } else if !horizontal_ok(a, c, slot.x - xa) {
                    violations.push(Violation::Overlap { a: a.id, b: c.id });
                }
            }
            prev = Some((c, slot.x));
        }
    }
    Verdict { violations }
}

fn validate_2d(instance: &Instance, p: &Placement2D) -> Verdict {
    let index = instance.index();
    let mut seen = HashSet::new();
    let mut violations = Vec::new();
    let mut placed = Vec::with_capacity(p.placed.len());
    for item in &p.placed {
        if let Some(c) = lookup(instance, &index, &mut seen, item.id, &mut violations) {
            if item.x + c.sl < 0
                || item.y + c.sb < 0
                || item.x + c.width() - c.sr > instance.width()
                || item.y + c.height() - c.st > instance.height()
            {
                violations.push(Violation::OutsideOutline { id: c.id });
            }
            placed.push((c, item.x, item.y));
        }
    }
    for (k, &(a, xa, ya)) in placed.iter().enumerate() {
        for &(b, xb, yb) in &placed[k + 1..] {
            if !pair_separated(a, xa, ya, b, xb, yb) {
                violations.push(Violation::Overlap { a: a.id, b: b.id });
            }
        }
    }
    let mut plus = p.seq_pair.0.clone();
    let mut minus = p.seq_pair.1.clone();
    let mut ids = p.selected();
    plus.sort_unstable();
    minus.sort_unstable();
    ids.sort_unstable();
    if plus != ids || minus != ids {
        violations.push(Violation::SequencePair);
    }
    Verdict { violations }
}

pub(crate) fn pair_separated(
    a: &CharacterCandidate,
    xa: Micron,
    ya: Micron,
    b: &CharacterCandidate,
    xb: Micron,
    yb: Micron,
) -> bool {
    horizontal_ok(a, b, xb - xa)
        || horizontal_ok(b, a, xa - xb)
        || vertical_ok(a, b, yb - ya)
        || vertical_ok(b, a, ya - yb)
}
