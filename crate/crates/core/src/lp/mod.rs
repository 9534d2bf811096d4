//! Bounded-variable linear programming.
//!
//! Problems are stated as `max c·x` subject to `A x ≤ b` and finite bounds
//! `lo ≤ x ≤ hi` with `lo ≥ 0`. Variables may be pinned to a constant, which
//! folds their contribution into the right-hand sides. Constraints may be
//! marked lazy: the solver leaves them out until an intermediate optimum
//! violates them, which keeps the basis small when most of them are slack.

mod simplex;

pub use simplex::solve_lp;

/// Feasibility and optimality tolerance.
pub const EPS: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LpError {
    #[error("variable index {index} out of range ({len} variables)")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("variable {index}: bounds [{lo}, {hi}] must be finite with 0 ≤ lo ≤ hi")]
    Bounds { index: usize, lo: f64, hi: f64 },
    #[error("variable {index}: value {value} outside [{lo}, {hi}]")]
    FixOutOfBounds {
        index: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("non-finite coefficient")]
    NonFinite,
    #[error("simplex exceeded {0} iterations")]
    IterationLimit(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub terms: Vec<(usize, f64)>,
    pub rhs: f64,
    pub lazy: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    fixed: Vec<Option<f64>>,
}

impl LpProblem {
    /// A problem with the given objective and per-variable bounds, no constraints.
    pub fn new(objective: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, LpError> {
        if lower.len() != objective.len() || upper.len() != objective.len() {
            return Err(LpError::Dimension(format!(
                "{} objective coefficients, {} lower and {} upper bounds",
                objective.len(),
                lower.len(),
                upper.len()
            )));
        }
        if objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::NonFinite);
        }
        for (index, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
                return Err(LpError::Bounds { index, lo, hi });
            }
        }
        Ok(LpProblem {
            fixed: vec![None; objective.len()],
            objective,
            constraints: Vec::new(),
            lower,
            upper,
        })
    }

    pub fn add_constraint(&mut self, terms: Vec<(usize, f64)>, rhs: f64) -> Result<usize, LpError> {
        self.push(terms, rhs, false)
    }

    /// Adds a constraint that is only enforced once an iterate violates it.
    pub fn add_lazy_constraint(&mut self, terms: Vec<(usize, f64)>, rhs: f64) -> Result<usize, LpError> {
        self.push(terms, rhs, true)
    }

    fn push(&mut self, terms: Vec<(usize, f64)>, rhs: f64, lazy: bool) -> Result<usize, LpError> {
        let len = self.num_vars();
        if let Some(&(index, _)) = terms.iter().find(|&&(j, _)| j >= len) {
            return Err(LpError::IndexOutOfRange { index, len });
        }
        if !rhs.is_finite() || terms.iter().any(|(_, a)| !a.is_finite()) {
            return Err(LpError::NonFinite);
        }
        self.constraints.push(Constraint { terms, rhs, lazy });
        Ok(self.constraints.len() - 1)
    }

    /// Pins variable `index` to `value`; later solves treat it as a constant.
    pub fn fix_variable(&mut self, index: usize, value: f64) -> Result<(), LpError> {
        let len = self.num_vars();
        if index >= len {
            return Err(LpError::IndexOutOfRange { index, len });
        }
        let (lo, hi) = (self.lower[index], self.upper[index]);
        if !(value.is_finite() && lo - EPS <= value && value <= hi + EPS) {
            return Err(LpError::FixOutOfBounds { index, value, lo, hi });
        }
        self.fixed[index] = Some(value.clamp(lo, hi));
        Ok(())
    }

    pub fn set_objective(&mut self, index: usize, value: f64) -> Result<(), LpError> {
        let len = self.num_vars();
        if index >= len {
            return Err(LpError::IndexOutOfRange { index, len });
        }
        if !value.is_finite() {
            return Err(LpError::NonFinite);
        }
        self.objective[index] = value;
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn bounds(&self, index: usize) -> (f64, f64) {
        (self.lower[index], self.upper[index])
    }

    pub fn fixed_value(&self, index: usize) -> Option<f64> {
        self.fixed[index]
    }

    /// Largest violation of any constraint or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.constraints.iter().map(|c| {
            let lhs: f64 = c.terms.iter().map(|&(j, a)| a * x[j]).sum();
            lhs - c.rhs
        });
        let bounds = x
            .iter()
            .enumerate()
            .map(|(j, &v)| (self.lower[j] - v).max(v - self.upper[j]));
        rows.chain(bounds).fold(0.0, f64::max)
    }
}

/// Consuming form of [`LpProblem::fix_variable`].
pub fn fix_variable(mut problem: LpProblem, index: usize, value: f64) -> Result<LpProblem, LpError> {
    problem.fix_variable(index, value)?;
    Ok(problem)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Values of all variables, fixed ones included. Meaningful only when optimal.
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box(n: usize, c: Vec<f64>) -> LpProblem {
        LpProblem::new(c, vec![0.0; n], vec![1.0; n]).unwrap()
    }

    #[test]
    fn tight_single_constraint() {
        let mut p = unit_box(2, vec![1.0, 1.0]);
        p.add_constraint(vec![(0, 1.0), (1, 1.0)], 1.0).unwrap();
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 1.0).abs() < 1e-9);
    }

    #[test]
    fn contradictory_bound_infeasible() {
        let mut p = LpProblem::new(vec![1.0], vec![0.0], vec![10.0]).unwrap();
        p.add_constraint(vec![(0, 1.0)], -1.0).unwrap();
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn fix_then_solve() {
        let mut p = unit_box(2, vec![1.0, 1.0]);
        p.add_constraint(vec![(0, 1.0), (1, 1.0)], 1.0).unwrap();
        let p = fix_variable(p, 1, 1.0).unwrap();
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 1.0).abs() < 1e-9);
        assert!(s.x[0].abs() < 1e-9);
        assert_eq!(s.x[1], 1.0);
    }

    #[test]
    fn all_fixed_gives_constant() {
        let mut p = unit_box(3, vec![2.0, -1.0, 5.0]);
        p.add_constraint(vec![(0, 1.0), (2, 1.0)], 1.5).unwrap();
        for (j, v) in [(0, 0.5), (1, 1.0), (2, 1.0)] {
            p.fix_variable(j, v).unwrap();
        }
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 5.0).abs() < 1e-12);
        assert_eq!(s.iterations, 0);
    }

    #[test]
    fn fix_out_of_bounds_rejected() {
        let mut p = unit_box(1, vec![1.0]);
        assert!(matches!(p.fix_variable(0, 2.0), Err(LpError::FixOutOfBounds { .. })));
        assert!(matches!(p.fix_variable(3, 0.0), Err(LpError::IndexOutOfRange { .. })));
    }

    #[test]
    fn bad_bounds_rejected() {
        assert!(LpProblem::new(vec![1.0], vec![2.0], vec![1.0]).is_err());
        assert!(LpProblem::new(vec![1.0], vec![-1.0], vec![1.0]).is_err());
        assert!(LpProblem::new(vec![1.0], vec![0.0], vec![f64::INFINITY]).is_err());
        assert!(LpProblem::new(vec![1.0, 2.0], vec![0.0], vec![1.0]).is_err());
    }

    #[test]
    fn lazy_rows_enforced() {
        // max x + y, x + y ≤ 1.5 eager, x ≤ 0.25 lazy
        let mut p = unit_box(2, vec![1.0, 1.0]);
        p.add_constraint(vec![(0, 1.0), (1, 1.0)], 1.5).unwrap();
        p.add_lazy_constraint(vec![(0, 1.0)], 0.25).unwrap();
        p.add_lazy_constraint(vec![(0, 1.0), (1, -1.0)], 0.0).unwrap();
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 1.25).abs() < 1e-9);
        assert!(p.max_violation(&s.x) <= EPS);
    }

    #[test]
    fn lower_bounds_respected() {
        // max -x - y, x + y ≥ 1 written as -x - y ≤ -1, x ≥ 0.2
        let mut p = LpProblem::new(vec![-1.0, -1.0], vec![0.2, 0.0], vec![5.0, 5.0]).unwrap();
        p.add_constraint(vec![(0, -1.0), (1, -1.0)], -1.0).unwrap();
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 1.0).abs() < 1e-9);
        assert!(s.x[0] >= 0.2 - 1e-9);
    }
}
