//! Domain types and the writing-time model.

mod evaluate;
mod generate;
mod io;
mod validate;

pub use evaluate::{evaluate, weighted_profits, ShotLedger};
pub use generate::{generate_instance, GeneratorSpec, Preset};
pub use io::{load_instance, load_placement, save_instance, save_placement};
pub use validate::{validate_placement, Verdict, Violation};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lengths are integer micrometers.
pub type Micron = i64;
pub type CandidateId = u32;

/// One character candidate: a pattern box surrounded by four blank margins.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterCandidate {
    pub id: CandidateId,
    /// Pattern width.
    pub pw: Micron,
    /// Pattern height.
    pub ph: Micron,
    pub sl: Micron,
    pub sr: Micron,
    pub st: Micron,
    pub sb: Micron,
    /// Shots needed to print one repeat through the variable-shaped beam.
    pub n: u64,
    /// Repeat count per wafer region.
    pub t: Vec<u64>,
}

impl CharacterCandidate {
    /// Total width including both horizontal blanks.
    pub fn width(&self) -> Micron {
        self.sl + self.pw + self.sr
    }

    /// Total height including both vertical blanks.
    pub fn height(&self) -> Micron {
        self.sb + self.ph + self.st
    }

    /// Shots saved in `region` when the candidate sits on the stencil.
    pub fn reduction(&self, region: usize) -> u64 {
        self.t[region] * (self.n - 1)
    }

    /// `ceil((sl + sr) / 2)`, the horizontal slack under the symmetric-blank model.
    pub fn symmetric_slack(&self) -> Micron {
        (self.sl + self.sr + 1) / 2
    }

    /// Vertical counterpart of [`symmetric_slack`](Self::symmetric_slack).
    pub fn symmetric_vertical_slack(&self) -> Micron {
        (self.st + self.sb + 1) / 2
    }

    pub(crate) fn check(&self, regions: usize) -> Result<()> {
        let fail = |what: &str| Err(Error::Invalid(format!("candidate {}: {what}", self.id)));
        if self.pw <= 0 {
            return fail("pattern_width > 0");
        }
        if self.ph <= 0 {
            return fail("pattern_height > 0");
        }
        if self.sl < 0 || self.sr < 0 || self.st < 0 || self.sb < 0 {
            return fail("blanks ≥ 0");
        }
        if self.n < 1 {
            return fail("vsb_shots ≥ 1");
        }
        if self.t.len() != regions {
            return fail("usage length = region count");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "1d")]
    OneD,
    #[serde(rename = "2d")]
    TwoD,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::OneD => "1d",
            Mode::TwoD => "2d",
        })
    }
}

/// Stencil outline. Row structure is present only in 1D mode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stencil {
    pub w: Micron,
    pub h: Micron,
    pub rows: Option<u32>,
    pub row_height: Option<Micron>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub mode: Mode,
    pub stencil: Stencil,
    pub regions: usize,
    pub candidates: Vec<CharacterCandidate>,
    pub seed: u64,
}

impl Instance {
    pub fn width(&self) -> Micron {
        self.stencil.w
    }

    pub fn height(&self) -> Micron {
        self.stencil.h
    }

    /// Number of rows (1D); zero in 2D mode.
    pub fn row_count(&self) -> usize {
        self.stencil.rows.unwrap_or(0) as usize
    }

    pub fn row_height(&self) -> Micron {
        self.stencil.row_height.unwrap_or(0)
    }

    /// Map from candidate id to its position in `candidates`.
    pub fn index(&self) -> HashMap<CandidateId, usize> {
        self.candidates
            .iter()
            .enumerate()
            .map(|(i, c)| (c.id, i))
            .collect()
    }

    pub fn candidate(&self, id: CandidateId) -> Option<&CharacterCandidate> {
        self.candidates.iter().find(|c| c.id == id)
    }

    /// Writing time of every region when nothing is on the stencil.
    pub fn vsb_times(&self) -> Vec<u64> {
        let mut times = vec![0u64; self.regions];
        for c in &self.candidates {
            for (slot, &t) in times.iter_mut().zip(&c.t) {
                *slot += t * c.n;
            }
        }
        times
    }

    /// Checks every instance invariant, naming the first one violated.
    pub fn validate(&self) -> Result<()> {
        if self.stencil.w <= 0 || self.stencil.h <= 0 {
            return Err(Error::Invalid("stencil W, H > 0".into()));
        }
        if self.regions < 1 {
            return Err(Error::Invalid("region count P ≥ 1".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for c in &self.candidates {
            c.check(self.regions)?;
            if !seen.insert(c.id) {
                return Err(Error::Invalid(format!("candidate ids unique (duplicate {})", c.id)));
            }
        }
        if self.mode == Mode::OneD {
            let (Some(rows), Some(row_height)) = (self.stencil.rows, self.stencil.row_height) else {
                return Err(Error::Invalid("1D stencil needs rows and row_height".into()));
            };
            if row_height <= 0 {
                return Err(Error::Invalid("row_height > 0".into()));
            }
            if rows as Micron * row_height > self.stencil.h {
                return Err(Error::Invalid("rows · row_height ≤ H".into()));
            }
            if let Some(c) = self.candidates.iter().find(|c| c.height() > row_height) {
                return Err(Error::Invalid(format!(
                    "candidate {}: height ≤ row_height",
                    c.id
                )));
            }
        }
        Ok(())
    }
}

/// A character placed in a 1D row. `x` is the left edge of its blank box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowSlot {
    pub id: CandidateId,
    pub x: Micron,
}

/// Row assignment plus left-to-right order and x positions.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Placement1D {
    pub rows: Vec<Vec<RowSlot>>,
}

impl Placement1D {
    pub fn empty(rows: usize) -> Self {
        Placement1D {
            rows: vec![Vec::new(); rows],
        }
    }

    pub fn selected(&self) -> Vec<CandidateId> {
        self.rows.iter().flatten().map(|s| s.id).collect()
    }
}

/// A character placed in 2D; `(x, y)` is the lower-left corner of its blank box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placed {
    pub id: CandidateId,
    pub x: Micron,
    pub y: Micron,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Placement2D {
    pub placed: Vec<Placed>,
    /// Positive and negative sequences over the placed ids.
    pub seq_pair: (Vec<CandidateId>, Vec<CandidateId>),
}

impl Placement2D {
    pub fn selected(&self) -> Vec<CandidateId> {
        self.placed.iter().map(|p| p.id).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode")]
pub enum Placement {
    #[serde(rename = "1d")]
    OneD(Placement1D),
    #[serde(rename = "2d")]
    TwoD(Placement2D),
}

impl Placement {
    pub fn selected(&self) -> Vec<CandidateId> {
        match self {
            Placement::OneD(p) => p.selected(),
            Placement::TwoD(p) => p.selected(),
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Placement::OneD(_) => Mode::OneD,
            Placement::TwoD(_) => Mode::TwoD,
        }
    }
}

/// Per-region writing times for one selection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WritingTimeReport {
    pub t_per_region: Vec<u64>,
    /// Slowest region, the MCC system's writing time.
    pub t_total: u64,
    pub t_vsb: Vec<u64>,
    /// Sorted ascending.
    pub selected: Vec<CandidateId>,
    pub sum_shots: u64,
}
