use std::collections::BTreeSet;

use super::{CandidateId, CharacterCandidate, Instance, WritingTimeReport};
use crate::error::{Error, Result};

/// Writing times of every region for the given selection.
///
/// `T_c = T_c^VSB - sum of t_ic (n_i - 1)` over selected candidates, and the
/// system time is the slowest region. Duplicate ids count once.
pub fn evaluate<I>(instance: &Instance, selected: I) -> Result<WritingTimeReport>
where
    I: IntoIterator<Item = CandidateId>,
{
    let index = instance.index();
    let selected: BTreeSet<CandidateId> = selected.into_iter().collect();
    let vsb = instance.vsb_times();
    let mut times = vsb.clone();
    for &id in &selected {
        let &i = index.get(&id).ok_or(Error::UnknownCandidate(id))?;
        let c = &instance.candidates[i];
        for (region, slot) in times.iter_mut().enumerate() {
            *slot -= c.reduction(region);
        }
    }
    Ok(WritingTimeReport {
        t_total: times.iter().copied().max().unwrap_or(0),
        sum_shots: times.iter().sum(),
        t_per_region: times,
        t_vsb: vsb,
        selected: selected.into_iter().collect(),
    })
}

/// Profit of each candidate weighted toward the slow regions:
/// `sum_c (t_c / t_max) (n_i - 1) t_ic` for the current region times `t_c`.
///
/// All profits are zero when every region time is zero.
pub fn weighted_profits(candidates: &[CharacterCandidate], times: &[u64]) -> Vec<f64> {
    candidates
        .iter()
        .map(|c| weighted_profit(c, times))
        .collect()
}

pub(crate) fn weighted_profit(c: &CharacterCandidate, times: &[u64]) -> f64 {
    let t_max = times.iter().copied().max().unwrap_or(0);
    if t_max == 0 {
        return 0.0;
    }
    let t_max = t_max as f64;
    times
        .iter()
        .zip(&c.t)
        .map(|(&tc, &tic)| (tc as f64 / t_max) * (c.n - 1) as f64 * tic as f64)
        .sum()
}

/// Incrementally maintained region times for a growing or shrinking selection.
#[derive(Debug, Clone)]
pub struct ShotLedger {
    times: Vec<u64>,
}

impl ShotLedger {
    /// Ledger at the VSB baseline (nothing selected).
    pub fn new(instance: &Instance) -> Self {
        ShotLedger {
            times: instance.vsb_times(),
        }
    }

    pub fn select(&mut self, c: &CharacterCandidate) {
        for (region, slot) in self.times.iter_mut().enumerate() {
            *slot -= c.reduction(region);
        }
    }

    pub fn deselect(&mut self, c: &CharacterCandidate) {
        for (region, slot) in self.times.iter_mut().enumerate() {
            *slot += c.reduction(region);
        }
    }

    pub fn times(&self) -> &[u64] {
        &self.times
    }

    pub fn total(&self) -> u64 {
        self.times.iter().copied().max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Mode, Stencil};

    fn cand(id: CandidateId, n: u64, t: Vec<u64>) -> CharacterCandidate {
        CharacterCandidate {
            id,
            pw: 10,
            ph: 10,
            sl: 1,
            sr: 1,
            st: 1,
            sb: 1,
            n,
            t,
        }
    }

    fn two_region() -> Instance {
        Instance {
            mode: Mode::TwoD,
            stencil: Stencil {
                w: 100,
                h: 100,
                rows: None,
                row_height: None,
            },
            regions: 2,
            candidates: vec![cand(0, 10, vec![5, 0]), cand(1, 4, vec![1, 7])],
            seed: 0,
        }
    }

    /// Shot-by-shot count: one shot per selected repeat, n_i per unselected repeat.
    fn simulate(instance: &Instance, selected: &[CandidateId]) -> Vec<u64> {
        let mut times = vec![0u64; instance.regions];
        for c in &instance.candidates {
            let per_repeat = if selected.contains(&c.id) { 1 } else { c.n };
            for (region, slot) in times.iter_mut().enumerate() {
                for _ in 0..c.t[region] {
                    *slot += per_repeat;
                }
            }
        }
        times
    }

    #[test]
    fn both_selected() {
        let inst = two_region();
        let report = evaluate(&inst, [0, 1]).unwrap();
        assert_eq!(report.t_per_region, simulate(&inst, &[0, 1]));
        assert_eq!(report.t_per_region, vec![6, 7]);
        assert_eq!(report.t_total, 7);
    }

    #[test]
    fn nothing_selected_is_vsb() {
        let inst = two_region();
        let report = evaluate(&inst, []).unwrap();
        assert_eq!(report.t_per_region, simulate(&inst, &[]));
        assert_eq!(report.t_per_region, vec![54, 28]);
        assert_eq!(report.t_total, 54);
        assert_eq!(report.t_per_region, report.t_vsb);
        assert_eq!(report.sum_shots, 82);
    }

    #[test]
    fn unknown_id_rejected() {
        let inst = two_region();
        match evaluate(&inst, [0, 9]) {
            Err(Error::UnknownCandidate(9)) => {}
            other => panic!("expected unknown id error, got {other:?}"),
        }
    }

    #[test]
    fn profit_hand_value() {
        let c = cand(0, 3, vec![4, 2]);
        assert!((weighted_profit(&c, &[100, 50]) - 10.0).abs() < 1e-12);
        // single region degenerates to the reduction itself
        let c = cand(1, 7, vec![9]);
        assert_eq!(weighted_profit(&c, &[123]), 54.0);
        let c = cand(2, 7, vec![0, 0]);
        assert_eq!(weighted_profit(&c, &[5, 9]), 0.0);
    }

    #[test]
    fn ledger_tracks_evaluate() {
        let inst = two_region();
        let mut ledger = ShotLedger::new(&inst);
        ledger.select(&inst.candidates[1]);
        assert_eq!(ledger.times(), evaluate(&inst, [1]).unwrap().t_per_region);
        ledger.deselect(&inst.candidates[1]);
        assert_eq!(ledger.times(), inst.vsb_times());
    }
}
