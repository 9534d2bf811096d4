//! Simplified row-assignment program and successive LP rounding.
//!
//! Each row `j` is charged `sum (w_i - s_i) a_ij + B_j ≤ W` where `B_j` is
//! the largest symmetric slack among its characters; this is the optimal
//! symmetric-blank row width. The LP relaxation is solved, near-maximal
//! assignments are fixed to one, profits are re-weighted toward the slowest
//! regions and the LP is solved again until nothing more can be fixed.

use crate::error::{Error, Result};
use crate::lp::{self, LpProblem, LpStatus};
use crate::model::{weighted_profits, Instance, Micron, ShotLedger};

/// Capacity bookkeeping of one row under the symmetric-blank model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowState {
    pub row: usize,
    /// Candidate indices in assignment order.
    pub members: Vec<usize>,
    /// `sum (w_i - s_i)` over members.
    pub consumed: Micron,
    /// Largest member slack.
    pub blank: Micron,
}

impl RowState {
    pub fn new(row: usize) -> Self {
        RowState {
            row,
            members: Vec::new(),
            consumed: 0,
            blank: 0,
        }
    }

    /// Whether a character of total width `w` and slack `s` still fits in `width`.
    pub fn fits(&self, w: Micron, s: Micron, width: Micron) -> bool {
        self.consumed + (w - s) <= width - self.blank.max(s)
    }

    pub fn push(&mut self, index: usize, w: Micron, s: Micron) {
        self.members.push(index);
        self.consumed += w - s;
        self.blank = self.blank.max(s);
    }

    /// Row capacity and blank-linearization constraints hold.
    pub fn is_consistent(&self, instance: &Instance) -> bool {
        let consumed: Micron = self
            .members
            .iter()
            .map(|&i| instance.candidates[i].width() - instance.candidates[i].symmetric_slack())
            .sum();
        consumed == self.consumed
            && self.consumed <= instance.width() - self.blank
            && self
                .members
                .iter()
                .all(|&i| instance.candidates[i].symmetric_slack() <= self.blank)
    }
}

/// The relaxed simplified program plus its variable layout.
#[derive(Debug, Clone)]
pub struct SimplifiedLp {
    pub problem: LpProblem,
    pub candidates: usize,
    pub rows: usize,
}

impl SimplifiedLp {
    /// Index of the assignment variable of candidate `i` in row `j`.
    pub fn assign(&self, i: usize, j: usize) -> usize {
        i * self.rows + j
    }

    /// Index of row `j`'s blank variable.
    pub fn blank(&self, j: usize) -> usize {
        self.candidates * self.rows + j
    }
}

/// Builds the LP relaxation: `max sum profit_i a_ij` with row capacity,
/// blank linearization (`B_j ≥ s_i a_ij`, marked lazy) and at-most-one-row
/// constraints; `a_ij ∈ [0, 1]`, `B_j ∈ [0, max s]`.
pub fn build_simplified_lp(instance: &Instance, profits: &[f64]) -> Result<SimplifiedLp> {
    let n = instance.candidates.len();
    let m = instance.row_count();
    if profits.len() != n {
        return Err(Error::Param(format!("{} profits for {n} candidates", profits.len())));
    }
    if profits.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::Param("profits must be finite and ≥ 0".into()));
    }
    let max_s = instance
        .candidates
        .iter()
        .map(|c| c.symmetric_slack())
        .max()
        .unwrap_or(0) as f64;
    let mut objective = Vec::with_capacity(n * m + m);
    for &p in profits {
        objective.extend(std::iter::repeat_n(p, m));
    }
    objective.extend(std::iter::repeat_n(0.0, m));
    let mut lower = vec![0.0; n * m + m];
    let mut upper = vec![1.0; n * m];
    upper.extend(std::iter::repeat_n(max_s, m));
    lower.truncate(n * m + m);
    let problem = LpProblem::new(objective, lower, upper)?;
    let mut lp = SimplifiedLp {
        problem,
        candidates: n,
        rows: m,
    };
    let width = instance.width() as f64;
    for j in 0..m {
        let mut terms: Vec<(usize, f64)> = instance
            .candidates
            .iter()
            .enumerate()
            .map(|(i, c)| (lp.assign(i, j), (c.width() - c.symmetric_slack()) as f64))
            .collect();
        terms.push((lp.blank(j), 1.0));
        lp.problem.add_constraint(terms, width)?;
    }
    for (i, c) in instance.candidates.iter().enumerate() {
        let s = c.symmetric_slack() as f64;
        for j in 0..m {
            let terms = vec![(lp.assign(i, j), s), (lp.blank(j), -1.0)];
            lp.problem.add_lazy_constraint(terms, 0.0)?;
        }
    }
    for i in 0..n {
        let terms = (0..m).map(|j| (lp.assign(i, j), 1.0)).collect();
        lp.problem.add_constraint(terms, 1.0)?;
    }
    Ok(lp)
}

/// Where the rounding takes its per-candidate profits from.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfitModel {
    /// Re-weighted by the current region times before every LP solve.
    WritingTime,
    /// Constant profits.
    Fixed(Vec<f64>),
}

#[derive(Debug, Clone)]
pub struct Rounding {
    pub rows: Vec<RowState>,
    /// Row of each candidate, by candidate index.
    pub assignment: Vec<Option<usize>>,
    /// Optimum of the first relaxed LP.
    pub first_lp_objective: f64,
    pub lp_solves: usize,
    pub simplex_iterations: usize,
}

impl Rounding {
    pub fn selected_indices(&self) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i].is_some())
            .collect()
    }
}

/// Successive rounding with the default writing-time profits.
pub fn succ_rounding(instance: &Instance, th_inv: f64) -> Result<Rounding> {
    succ_rounding_with(instance, th_inv, &ProfitModel::WritingTime)
}

pub fn succ_rounding_with(instance: &Instance, th_inv: f64, model: &ProfitModel) -> Result<Rounding> {
    if !(th_inv > 0.0 && th_inv <= 1.0) {
        return Err(Error::Param(format!("th_inv = {th_inv} outside (0, 1]")));
    }
    if let ProfitModel::Fixed(p) = model {
        if p.len() != instance.candidates.len() || p.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Param("fixed profits must be finite, ≥ 0 and one per candidate".into()));
        }
    }
    let n = instance.candidates.len();
    let m = instance.row_count();
    let width = instance.width();
    let mut ledger = ShotLedger::new(instance);
    let mut rows: Vec<RowState> = (0..m).map(RowState::new).collect();
    let mut assignment = vec![None; n];
    let mut first_lp_objective = None;
    let mut lp_solves = 0;
    let mut simplex_iterations = 0;
    let dims: Vec<(Micron, Micron)> = instance
        .candidates
        .iter()
        .map(|c| (c.width(), c.symmetric_slack()))
        .collect();

    loop {
        let profits = match model {
            ProfitModel::WritingTime => weighted_profits(&instance.candidates, ledger.times()),
            ProfitModel::Fixed(p) => p.clone(),
        };
        let Some(class_lp) = ClassLp::build(instance, &rows, &assignment, &profits)? else {
            break;
        };
        let solution = lp::solve_lp(&class_lp.problem)?;
        lp_solves += 1;
        simplex_iterations += solution.iterations;
        if solution.status != LpStatus::Optimal {
            return Err(Error::Invalid(format!(
                "relaxed row-assignment LP returned {:?}",
                solution.status
            )));
        }
        first_lp_objective.get_or_insert(solution.objective);
        // per-row values of the symmetric optimum
        let mut values: Vec<(usize, usize, f64)> = Vec::new();
        for (v, &(i, k)) in class_lp.vars.iter().enumerate() {
            let class = &class_lp.classes[k];
            let share = solution.x[v] / class.rows.len() as f64;
            values.extend(class.rows.iter().map(|&j| (i, j, share)));
        }

        let mut fixed_now = 0;
        loop {
            let mut open: Vec<(f64, usize, usize)> = values
                .iter()
                .filter(|&&(i, j, value)| {
                    assignment[i].is_none() && value > lp::EPS && rows[j].fits(dims[i].0, dims[i].1, width)
                })
                .map(|&(i, j, value)| (value, i, j))
                .collect();
            let Some(peak) = open.iter().map(|o| o.0).reduce(f64::max) else {
                break;
            };
            open.retain(|o| o.0 >= peak * th_inv);
            // within a batch, largest objective contribution first
            let weight = |o: &(f64, usize, usize)| o.0 * profits[o.1];
            open.sort_by(|a, b| {
                weight(b)
                    .total_cmp(&weight(a))
                    .then(b.0.total_cmp(&a.0))
                    .then(a.1.cmp(&b.1))
                    .then(a.2.cmp(&b.2))
            });
            for (_, i, j) in open {
                let (w, s) = dims[i];
                if assignment[i].is_some() || !rows[j].fits(w, s, width) {
                    continue;
                }
                assignment[i] = Some(j);
                rows[j].push(i, w, s);
                ledger.select(&instance.candidates[i]);
                fixed_now += 1;
            }
        }
        debug_assert!(rows.iter().all(|r| r.is_consistent(instance)));
        if fixed_now == 0 {
            break;
        }
    }

    Ok(Rounding {
        rows,
        assignment,
        first_lp_objective: first_lp_objective.unwrap_or(0.0),
        lp_solves,
        simplex_iterations,
    })
}

/// Rows sharing the same `(consumed, blank)` state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowClass {
    pub rows: Vec<usize>,
    pub consumed: Micron,
    pub blank: Micron,
}

/// Groups identical rows, ordered by their first row index.
pub fn row_classes(rows: &[RowState]) -> Vec<RowClass> {
    let mut classes: Vec<RowClass> = Vec::new();
    for r in rows {
        match classes
            .iter_mut()
            .find(|c| c.consumed == r.consumed && c.blank == r.blank)
        {
            Some(c) => c.rows.push(r.row),
            None => classes.push(RowClass {
                rows: vec![r.row],
                consumed: r.consumed,
                blank: r.blank,
            }),
        }
    }
    classes
}

/// The relaxed program over the still-free candidates with identical rows
/// merged into one class.
///
/// Candidate `i` gets one variable `A_ik` per class `k` it fits, standing for
/// its total share over the class's `m_k` rows, and each class one blank
/// `B_k ∈ [blank_k, max s]`:
///
/// ```text
/// sum_i (w_i - s_i) A_ik + m_k B_k ≤ m_k (W - consumed_k)
/// s_i A_ik ≤ m_k B_k                      (lazy)
/// sum_k A_ik ≤ 1
/// ```
///
/// Any solution of the full relaxation averages onto a solution of this one
/// with the same objective, and `a_ij = A_ik / m_k`, `B_j = B_k` maps back,
/// so both optima coincide.
#[derive(Debug, Clone)]
pub struct ClassLp {
    pub problem: LpProblem,
    pub classes: Vec<RowClass>,
    /// `(candidate index, class index)` per assignment variable.
    pub vars: Vec<(usize, usize)>,
}

impl ClassLp {
    /// `None` when no free candidate fits any row.
    pub fn build(
        instance: &Instance,
        rows: &[RowState],
        assignment: &[Option<usize>],
        profits: &[f64],
    ) -> Result<Option<ClassLp>> {
        let width = instance.width();
        let classes = row_classes(rows);
        let probe: Vec<RowState> = classes
            .iter()
            .map(|c| RowState {
                row: c.rows[0],
                members: Vec::new(),
                consumed: c.consumed,
                blank: c.blank,
            })
            .collect();
        let mut vars = Vec::new();
        for (i, c) in instance.candidates.iter().enumerate() {
            if assignment[i].is_some() {
                continue;
            }
            for (k, state) in probe.iter().enumerate() {
                if state.fits(c.width(), c.symmetric_slack(), width) {
                    vars.push((i, k));
                }
            }
        }
        if vars.is_empty() {
            return Ok(None);
        }
        let max_s = instance
            .candidates
            .iter()
            .map(|c| c.symmetric_slack())
            .max()
            .unwrap_or(0) as f64;
        let nv = vars.len();
        let mut objective: Vec<f64> = vars.iter().map(|&(i, _)| profits[i]).collect();
        let mut lower = vec![0.0; nv];
        let mut upper = vec![1.0; nv];
        for class in &classes {
            objective.push(0.0);
            lower.push(class.blank as f64);
            upper.push(max_s);
        }
        let mut problem = LpProblem::new(objective, lower, upper)?;
        let blank_var = |k: usize| nv + k;
        for (k, class) in classes.iter().enumerate() {
            let mk = class.rows.len() as f64;
            let mut terms: Vec<(usize, f64)> = vars
                .iter()
                .enumerate()
                .filter(|(_, &(_, kk))| kk == k)
                .map(|(v, &(i, _))| {
                    let c = &instance.candidates[i];
                    (v, (c.width() - c.symmetric_slack()) as f64)
                })
                .collect();
            if terms.is_empty() {
                continue;
            }
            terms.push((blank_var(k), mk));
            problem.add_constraint(terms, mk * (width - class.consumed) as f64)?;
        }
        for (v, &(i, k)) in vars.iter().enumerate() {
            let s = instance.candidates[i].symmetric_slack() as f64;
            let mk = classes[k].rows.len() as f64;
            if s > classes[k].blank as f64 {
                problem.add_lazy_constraint(vec![(v, s), (blank_var(k), -mk)], 0.0)?;
            }
        }
        let mut start = 0;
        while start < nv {
            let i = vars[start].0;
            let mut end = start;
            while end < nv && vars[end].0 == i {
                end += 1;
            }
            if end - start > 1 {
                problem.add_constraint((start..end).map(|v| (v, 1.0)).collect(), 1.0)?;
            }
            start = end;
        }
        Ok(Some(ClassLp {
            problem,
            classes,
            vars,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CharacterCandidate, Mode, Stencil};

    fn cand(id: u32, pw: Micron, sl: Micron, sr: Micron, t: u64) -> CharacterCandidate {
        CharacterCandidate {
            id,
            pw,
            ph: 20,
            sl,
            sr,
            st: 2,
            sb: 2,
            n: 5,
            t: vec![t],
        }
    }

    fn instance(w: Micron, rows: u32, candidates: Vec<CharacterCandidate>) -> Instance {
        Instance {
            mode: Mode::OneD,
            stencil: Stencil {
                w,
                h: 30 * rows as Micron,
                rows: Some(rows),
                row_height: Some(30),
            },
            regions: 1,
            candidates,
            seed: 0,
        }
    }

    #[test]
    fn lp_dimensions() {
        let inst = instance(100, 1, vec![cand(0, 10, 2, 2, 1), cand(1, 10, 2, 2, 1)]);
        let lp = build_simplified_lp(&inst, &[1.0, 2.0]).unwrap();
        assert_eq!(lp.problem.num_vars(), 3);
        assert_eq!(lp.problem.num_constraints(), 1 + 2 + 2);
    }

    #[test]
    fn empty_lp() {
        let inst = instance(100, 2, vec![]);
        let lp = build_simplified_lp(&inst, &[]).unwrap();
        let s = lp::solve_lp(&lp.problem).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.objective, 0.0);
    }

    #[test]
    fn nothing_fits() {
        let inst = instance(12, 2, vec![cand(0, 10, 2, 2, 3), cand(1, 11, 1, 1, 3)]);
        let r = succ_rounding(&inst, 0.9).unwrap();
        assert!(r.selected_indices().is_empty());
    }

    #[test]
    fn strict_threshold_keeps_rows_consistent() {
        let cands = (0..8)
            .map(|i| cand(i, 10 + i as Micron, 1 + (i as Micron % 3), 2, 10 + i as u64))
            .collect();
        let inst = instance(60, 2, cands);
        let r = succ_rounding(&inst, 1.0).unwrap();
        assert!(r.rows.iter().all(|row| row.is_consistent(&inst)));
        assert!(!r.selected_indices().is_empty());
    }

    #[test]
    fn bad_threshold() {
        let inst = instance(60, 1, vec![]);
        assert!(succ_rounding(&inst, 0.0).is_err());
        assert!(succ_rounding(&inst, 1.5).is_err());
    }
}
