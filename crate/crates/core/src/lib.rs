//! Overlap-aware stencil planning for multi-column-cell (MCC) e-beam
//! lithography.
//!
//! A stencil holds a subset of character candidates; each selected
//! character prints in one shot instead of its variable-shaped-beam shot
//! count. Adjacent characters may share their blank margins. The solvers in
//! this crate pick and place characters so that the slowest wafer region
//! finishes as early as possible.
//!
//! * [`model`]: domain types, instance files, the writing-time evaluator,
//!   placement checking and a synthetic benchmark generator.
//! * [`lp`]: a bounded-variable primal simplex.
//! * [`osp1d`]: row-structured planning (LP successive rounding, row
//!   ordering, refinement, greedy insertion).
//! * [`osp2d`]: free 2D planning (pre-filter, KD-tree clustering, sequence
//!   pair annealing).
//! * [`oracle`]: exhaustive reference solvers and greedy baselines.

pub mod error;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod osp1d;
pub mod osp2d;

pub use error::{Error, Result};
pub use model::{
    evaluate, generate_instance, load_instance, save_instance, validate_placement,
    CandidateId, CharacterCandidate, GeneratorSpec, Instance, Micron, Mode, Placement,
    Placement1D, Placement2D, Stencil, Verdict, Violation, WritingTimeReport,
};
