//! Revised primal simplex with bounded variables and a dense basis inverse.
//!
//! Pricing is Dantzig's largest reduced cost; after a run of degenerate
//! pivots the solver switches to Bland's rule (lowest eligible index for both
//! the entering and the leaving variable) until the objective moves again.
//! Rows and the objective are scaled to unit max-norm internally.

use super::{LpError, LpProblem, LpSolution, LpStatus, EPS};

const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_STREAK: usize = 50;
const REFRESH_EVERY: usize = 100;

/// Solves `problem`. Infeasible and unbounded problems are statuses, not errors.
pub fn solve_lp(problem: &LpProblem) -> Result<LpSolution, LpError> {
    let n = problem.num_vars();
    let free: Vec<usize> = (0..n).filter(|&j| problem.fixed[j].is_none()).collect();
    let mut active: Vec<usize> = problem
        .constraints
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.lazy)
        .map(|(i, _)| i)
        .collect();
    let mut in_active = vec![false; problem.constraints.len()];
    for &i in &active {
        in_active[i] = true;
    }
    let mut iterations = 0;
    loop {
        let outcome = solve_rows(problem, &free, &active)?;
        iterations += outcome.iterations;
        let Some(x) = outcome.x else {
            return Ok(LpSolution {
                status: outcome.status,
                x: vec![0.0; n],
                objective: 0.0,
                iterations,
            });
        };
        let violated: Vec<usize> = problem
            .constraints
            .iter()
            .enumerate()
            .filter(|&(i, c)| c.lazy && !in_active[i] && row_violation(c, &x) > EPS)
            .map(|(i, _)| i)
            .collect();
        if violated.is_empty() {
            let objective = problem.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
            return Ok(LpSolution {
                status: LpStatus::Optimal,
                x,
                objective,
                iterations,
            });
        }
        for &i in &violated {
            in_active[i] = true;
        }
        active.extend(violated);
        active.sort_unstable();
    }
}

fn row_violation(c: &super::Constraint, x: &[f64]) -> f64 {
    let lhs: f64 = c.terms.iter().map(|&(j, a)| a * x[j]).sum();
    (lhs - c.rhs) / (1.0 + c.rhs.abs())
}

struct Outcome {
    status: LpStatus,
    x: Option<Vec<f64>>,
    iterations: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Structural,
    Slack,
    Artificial,
}

struct Tableau {
    m: usize,
    cols: Vec<Vec<(usize, f64)>>,
    kind: Vec<Kind>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    cost: Vec<f64>,
    x: Vec<f64>,
    b: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    binv: Vec<f64>,
    iterations: usize,
    limit: usize,
}

enum Step {
    Optimal,
    Unbounded,
    Moved,
}

/// Solves the problem restricted to the `rows` constraints over `free` variables.
fn solve_rows(problem: &LpProblem, free: &[usize], rows: &[usize]) -> Result<Outcome, LpError> {
    let n = problem.num_vars();
    let mut local = vec![usize::MAX; n];
    for (k, &j) in free.iter().enumerate() {
        local[j] = k;
    }

    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); free.len()];
    let mut b = Vec::with_capacity(rows.len());
    let mut m = 0;
    for &ri in rows {
        let c = &problem.constraints[ri];
        let mut rhs = c.rhs;
        let mut scale: f64 = 0.0;
        for &(j, a) in &c.terms {
            match problem.fixed[j] {
                Some(v) => rhs -= a * v,
                None => scale = scale.max(a.abs()),
            }
        }
        if scale == 0.0 {
            // every variable fixed: the row is a plain check
            if rhs < -EPS * (1.0 + c.rhs.abs()) {
                return Ok(Outcome {
                    status: LpStatus::Infeasible,
                    x: None,
                    iterations: 0,
                });
            }
            continue;
        }
        for &(j, a) in &c.terms {
            if problem.fixed[j].is_none() && a != 0.0 {
                cols[local[j]].push((m, a / scale));
            }
        }
        b.push(rhs / scale);
        m += 1;
    }
    let obj_scale = free
        .iter()
        .map(|&j| problem.objective[j].abs())
        .fold(0.0, f64::max)
        .max(1e-300);

    let nf = free.len();
    let mut kind = vec![Kind::Structural; nf];
    let mut lo: Vec<f64> = free.iter().map(|&j| problem.lower[j]).collect();
    let mut hi: Vec<f64> = free.iter().map(|&j| problem.upper[j]).collect();
    let mut x = lo.clone();
    for i in 0..m {
        cols.push(vec![(i, 1.0)]);
        kind.push(Kind::Slack);
        lo.push(0.0);
        hi.push(f64::INFINITY);
        x.push(0.0);
    }
    // residual of each row with structurals at their lower bounds
    let mut residual = b.clone();
    for (k, col) in cols.iter().enumerate().take(nf) {
        for &(i, a) in col {
            residual[i] -= a * x[k];
        }
    }
    let mut basis = vec![0; m];
    let mut binv = vec![0.0; m * m];
    let mut artificial = false;
    for i in 0..m {
        if residual[i] >= 0.0 {
            basis[i] = nf + i;
            x[nf + i] = residual[i];
            binv[i * m + i] = 1.0;
        } else {
            cols.push(vec![(i, -1.0)]);
            kind.push(Kind::Artificial);
            lo.push(0.0);
            hi.push(f64::INFINITY);
            x.push(-residual[i]);
            basis[i] = cols.len() - 1;
            binv[i * m + i] = -1.0;
            artificial = true;
        }
    }
    let total = cols.len();
    let mut is_basic = vec![false; total];
    for &c in &basis {
        is_basic[c] = true;
    }
    let limit = 50 * (m + total) + 10_000;
    let mut t = Tableau {
        m,
        cols,
        kind,
        lo,
        hi,
        cost: vec![0.0; total],
        x,
        b,
        basis,
        is_basic,
        binv,
        iterations: 0,
        limit,
    };

    if artificial {
        for k in 0..total {
            if t.kind[k] == Kind::Artificial {
                t.cost[k] = -1.0;
            }
        }
        t.run(false)?;
        let infeasibility: f64 = (0..total)
            .filter(|&k| t.kind[k] == Kind::Artificial)
            .map(|k| t.x[k])
            .sum();
        if infeasibility > EPS {
            return Ok(Outcome {
                status: LpStatus::Infeasible,
                x: None,
                iterations: t.iterations,
            });
        }
        for k in 0..total {
            if t.kind[k] == Kind::Artificial {
                t.cost[k] = 0.0;
                t.hi[k] = 0.0;
                if !t.is_basic[k] {
                    t.x[k] = 0.0;
                }
            }
        }
        t.refresh();
    }
    for (k, &j) in free.iter().enumerate() {
        t.cost[k] = problem.objective[j] / obj_scale;
    }
    if let Step::Unbounded = t.run(true)? {
        return Ok(Outcome {
            status: LpStatus::Unbounded,
            x: None,
            iterations: t.iterations,
        });
    }

    let mut out = vec![0.0; n];
    for j in 0..n {
        out[j] = match problem.fixed[j] {
            Some(v) => v,
            None => {
                let k = local[j];
                t.x[k].clamp(t.lo[k], t.hi[k])
            }
        };
    }
    Ok(Outcome {
        status: LpStatus::Optimal,
        x: Some(out),
        iterations: t.iterations,
    })
}

impl Tableau {
    /// Iterates to optimality for the current costs.
    fn run(&mut self, phase_two: bool) -> Result<Step, LpError> {
        let mut degenerate = 0;
        loop {
            if self.iterations >= self.limit {
                return Err(LpError::IterationLimit(self.limit));
            }
            let bland = degenerate >= DEGENERATE_STREAK;
            match self.step(phase_two, bland, &mut degenerate) {
                Step::Moved => {
                    self.iterations += 1;
                    if self.iterations.is_multiple_of(REFRESH_EVERY) {
                        self.refresh();
                    }
                }
                done => {
                    self.refresh();
                    return Ok(done);
                }
            }
        }
    }

    fn step(&mut self, phase_two: bool, bland: bool, degenerate: &mut usize) -> Step {
        let m = self.m;
        // duals y = c_B B^-1
        let mut y = vec![0.0; m];
        for (i, &bc) in self.basis.iter().enumerate() {
            let c = self.cost[bc];
            if c != 0.0 {
                let row = &self.binv[i * m..(i + 1) * m];
                for (yk, &v) in y.iter_mut().zip(row) {
                    *yk += c * v;
                }
            }
        }

        // pricing
        let mut entering: Option<(usize, f64)> = None;
        for k in 0..self.cols.len() {
            if self.is_basic[k] || (phase_two && self.kind[k] == Kind::Artificial) {
                continue;
            }
            if self.hi[k] - self.lo[k] <= 0.0 {
                continue;
            }
            let d = self.cost[k] - self.cols[k].iter().map(|&(i, a)| y[i] * a).sum::<f64>();
            let at_lower = self.x[k] <= self.lo[k];
            let eligible = if at_lower { d > EPS } else { d < -EPS };
            if !eligible {
                continue;
            }
            match entering {
                None => entering = Some((k, d)),
                Some((_, best)) if !bland && d.abs() > best.abs() => entering = Some((k, d)),
                _ => {}
            }
            if bland {
                break;
            }
        }
        let Some((q, d)) = entering else {
            return Step::Optimal;
        };
        let dir = if d > 0.0 { 1.0 } else { -1.0 };

        // column alpha = B^-1 a_q
        let mut alpha = vec![0.0; m];
        for &(r, a) in &self.cols[q] {
            for i in 0..m {
                alpha[i] += self.binv[i * m + r] * a;
            }
        }

        // ratio test, ties to the lowest column index
        let mut leave: Option<(usize, f64, bool)> = None;
        for i in 0..m {
            let g = dir * alpha[i];
            if g.abs() <= PIVOT_TOL {
                continue;
            }
            let bc = self.basis[i];
            let (limit, to_upper) = if g > 0.0 {
                ((self.x[bc] - self.lo[bc]).max(0.0) / g, false)
            } else if self.hi[bc].is_finite() {
                ((self.hi[bc] - self.x[bc]).max(0.0) / -g, true)
            } else {
                continue;
            };
            let better = match leave {
                None => true,
                Some((li, lt, _)) => {
                    limit < lt - 1e-12 || (limit <= lt + 1e-12 && bc < self.basis[li])
                }
            };
            if better {
                leave = Some((i, limit, to_upper));
            }
        }
        let range = self.hi[q] - self.lo[q];
        let flip = match leave {
            None => {
                if !range.is_finite() {
                    return Step::Unbounded;
                }
                true
            }
            Some((_, limit, _)) => range <= limit,
        };
        let step_len = if flip { range } else { leave.unwrap().1 };
        if step_len <= 1e-12 {
            *degenerate += 1;
        } else {
            *degenerate = 0;
        }

        for i in 0..m {
            let bc = self.basis[i];
            self.x[bc] -= dir * alpha[i] * step_len;
        }
        if flip {
            self.x[q] = if dir > 0.0 { self.hi[q] } else { self.lo[q] };
            return Step::Moved;
        }
        let (r, _, to_upper) = leave.unwrap();
        self.x[q] += dir * step_len;
        let out = self.basis[r];
        self.x[out] = if to_upper { self.hi[out] } else { self.lo[out] };
        self.is_basic[out] = false;
        self.is_basic[q] = true;
        self.basis[r] = q;

        let pivot = alpha[r];
        let (head, tail) = self.binv.split_at_mut(r * m);
        let (prow, tail) = tail.split_at_mut(m);
        for v in prow.iter_mut() {
            *v /= pivot;
        }
        for (i, row) in head.chunks_exact_mut(m).enumerate() {
            eliminate(row, prow, alpha[i]);
        }
        for (k, row) in tail.chunks_exact_mut(m).enumerate() {
            eliminate(row, prow, alpha[r + 1 + k]);
        }
        Step::Moved
    }

    /// Recomputes basic values from the nonbasic ones to shed drift.
    fn refresh(&mut self) {
        let m = self.m;
        let mut rhs = self.b.clone();
        for k in 0..self.cols.len() {
            if !self.is_basic[k] && self.x[k] != 0.0 {
                for &(i, a) in &self.cols[k] {
                    rhs[i] -= a * self.x[k];
                }
            }
        }
        for i in 0..m {
            let row = &self.binv[i * m..(i + 1) * m];
            let v: f64 = row.iter().zip(&rhs).map(|(a, r)| a * r).sum();
            self.x[self.basis[i]] = v;
        }
    }
}

fn eliminate(row: &mut [f64], prow: &[f64], factor: f64) {
    if factor == 0.0 {
        return;
    }
    for (v, &p) in row.iter_mut().zip(prow) {
        *v -= factor * p;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_klee_minty_style() {
        // max 4x1 + 2x2 + x3, bounded cube with coupling rows
        let mut p = LpProblem::new(vec![4.0, 2.0, 1.0], vec![0.0; 3], vec![1000.0; 3]).unwrap();
        p.add_constraint(vec![(0, 1.0)], 5.0).unwrap();
        p.add_constraint(vec![(0, 4.0), (1, 1.0)], 25.0).unwrap();
        p.add_constraint(vec![(0, 8.0), (1, 4.0), (2, 1.0)], 125.0).unwrap();
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 125.0).abs() < 1e-7, "{}", s.objective);
    }

    #[test]
    fn deterministic_repeat() {
        let mut p = LpProblem::new(vec![3.0, 2.0, 4.0, 1.0], vec![0.0; 4], vec![1.0; 4]).unwrap();
        p.add_constraint(vec![(0, 2.0), (1, 1.0), (2, 3.0), (3, 1.0)], 3.5).unwrap();
        p.add_constraint(vec![(0, 1.0), (2, 1.0)], 1.0).unwrap();
        let a = solve_lp(&p).unwrap();
        let b = solve_lp(&p).unwrap();
        assert_eq!(a, b);
    }
}
