//! Exhaustive solvers for desk-scale instances.

use crate::error::{Error, Result};
use crate::model::{
    CandidateId, CharacterCandidate, Instance, Micron, Mode, Placed, Placement1D, Placement2D,
};
use crate::osp1d::{apply_trace, canonical_order, row_slots, sequence_width, RowItem};

/// An optimum, one witness attaining it, and how many states were visited.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult<W> {
    pub optimum: i64,
    pub witness: W,
    pub explored: u64,
}

pub const EXACT_1D_MAX_CANDIDATES: usize = 10;
pub const EXACT_1D_MAX_ROWS: usize = 3;
pub const KNAPSACK_MAX_CANDIDATES: usize = 20;
pub const ORDERINGS_MAX_ITEMS: usize = 12;
pub const EXACT_2D_MAX_CANDIDATES: usize = 5;
pub const DEFAULT_GRID_STEP: Micron = 5;

fn writing_time(instance: &Instance, members: impl Iterator<Item = usize>) -> u64 {
    let mut t = instance.vsb_times();
    for i in members {
        let c = &instance.candidates[i];
        for (r, tr) in t.iter_mut().enumerate() {
            *tr -= c.reduction(r);
        }
    }
    t.into_iter().max().unwrap_or(0)
}

fn bits(mask: usize) -> impl Iterator<Item = usize> {
    (0..usize::BITS as usize).filter(move |&i| mask >> i & 1 == 1)
}

/// Minimum pattern span of every subset over all left-to-right orders, with
/// the order attaining it. `None` for the empty set.
fn subset_spans(items: &[RowItem]) -> (Vec<Option<(Micron, Vec<usize>)>>, u64) {
    let n = items.len();
    let full = 1usize << n;
    // dp[mask][last]: min (sequence width - first sl) over orders of mask ending at last
    let mut dp = vec![vec![Micron::MAX; n]; full];
    let mut parent = vec![vec![usize::MAX; n]; full];
    let mut explored = 0;
    for (i, it) in items.iter().enumerate() {
        dp[1 << i][i] = it.w - it.sl;
    }
    for mask in 1..full {
        for last in bits(mask) {
            let cur = dp[mask][last];
            if cur == Micron::MAX {
                continue;
            }
            for next in 0..n {
                if mask >> next & 1 == 1 {
                    continue;
                }
                explored += 1;
                let (a, b) = (&items[last], &items[next]);
                let v = cur + b.w - a.sr.min(b.sl);
                let m = mask | 1 << next;
                if v < dp[m][next] {
                    dp[m][next] = v;
                    parent[m][next] = last;
                }
            }
        }
    }
    let mut out = vec![None; full];
    for (mask, slot) in out.iter_mut().enumerate().skip(1) {
        let (span, last) = bits(mask)
            .map(|l| (dp[mask][l] - items[l].sr, l))
            .min()
            .expect("nonempty mask");
        let mut order = vec![last];
        let (mut m, mut l) = (mask, last);
        while parent[m][l] != usize::MAX {
            let p = parent[m][l];
            m &= !(1 << l);
            l = p;
            order.push(l);
        }
        order.reverse();
        *slot = Some((span, order));
    }
    (out, explored)
}

/// Minimum `T_total` over every selection, row assignment and in-row order
/// that fits the outline.
pub fn exact_1d(instance: &Instance) -> Result<OracleResult<Placement1D>> {
    if instance.mode != Mode::OneD {
        return Err(Error::ModeMismatch("exact_1d needs a 1d instance"));
    }
    let n = instance.candidates.len();
    let rows = instance.row_count();
    if n > EXACT_1D_MAX_CANDIDATES || rows > EXACT_1D_MAX_ROWS {
        return Err(Error::Param(format!(
            "exact_1d handles at most {EXACT_1D_MAX_CANDIDATES} candidates and {EXACT_1D_MAX_ROWS} rows"
        )));
    }
    let items: Vec<RowItem> = instance.candidates.iter().map(RowItem::of).collect();
    let (spans, mut explored) = subset_spans(&items);
    let full = 1usize << n;
    let tall = instance
        .candidates
        .iter()
        .enumerate()
        .filter(|(_, c)| c.height() > instance.row_height())
        .fold(0usize, |m, (i, _)| m | 1 << i);
    let fits: Vec<bool> = (0..full)
        .map(|m| m == 0 || (m & tall == 0 && spans[m].as_ref().is_some_and(|s| s.0 <= instance.width())))
        .collect();
    // reach[k][u]: u splits into k fitting rows; choice[k][u] is the last row
    let mut reach = vec![vec![false; full]; rows + 1];
    let mut choice = vec![vec![0usize; full]; rows + 1];
    reach[0][0] = true;
    for k in 1..=rows {
        for u in 0..full {
            // enumerate submasks s of u, including the empty row
            let mut s = u;
            loop {
                explored += 1;
                if fits[s] && reach[k - 1][u & !s] {
                    reach[k][u] = true;
                    choice[k][u] = s;
                    break;
                }
                if s == 0 {
                    break;
                }
                s = (s - 1) & u;
            }
        }
    }
    let (t_best, u_best) = (0..full)
        .filter(|&u| reach[rows][u])
        .map(|u| (writing_time(instance, bits(u)), u))
        .min_by_key(|&(t, u)| (t, u.count_ones(), u))
        .expect("the empty selection always fits");
    let mut placement = Placement1D::empty(rows);
    let mut u = u_best;
    for k in (1..=rows).rev() {
        let s = choice[k][u];
        if s != 0 {
            let order: Vec<RowItem> = spans[s].as_ref().expect("nonempty").1.iter().map(|&i| items[i]).collect();
            placement.rows[k - 1] = row_slots(&order);
        }
        u &= !s;
    }
    Ok(OracleResult {
        optimum: t_best as i64,
        witness: placement,
        explored,
    })
}

/// Which per-row capacity rule the knapsack search enforces.
#[derive(Debug, Clone, Copy)]
enum Capacity {
    /// `sum (w - s) <= W - max_s`, with `max_s` over all candidates.
    Uniform(Micron),
    /// `sum (w - s) + max s <= W` per row.
    RowBlank,
}

struct Knapsack<'a> {
    size: Vec<Micron>,
    slack: Vec<Micron>,
    profit: &'a [i64],
    order: Vec<usize>,
    width: Micron,
    rule: Capacity,
    best: i64,
    best_assign: Vec<Option<usize>>,
    assign: Vec<Option<usize>>,
    used: Vec<Micron>,
    blank: Vec<Micron>,
    explored: u64,
}

impl Knapsack<'_> {
    fn room(&self, j: usize) -> Micron {
        match self.rule {
            Capacity::Uniform(max_s) => self.width - max_s - self.used[j],
            Capacity::RowBlank => self.width - self.blank[j] - self.used[j],
        }
    }

    fn fits(&self, i: usize, j: usize) -> bool {
        match self.rule {
            Capacity::Uniform(max_s) => self.used[j] + self.size[i] <= self.width - max_s,
            Capacity::RowBlank => self.used[j] + self.size[i] + self.blank[j].max(self.slack[i]) <= self.width,
        }
    }

    /// Fractional bound over the items from position `k` on.
    fn bound(&self, k: usize, value: i64) -> f64 {
        let mut room: Micron = (0..self.used.len()).map(|j| self.room(j).max(0)).sum();
        let mut bound = value as f64;
        for &i in &self.order[k..] {
            if self.profit[i] <= 0 {
                continue;
            }
            if self.size[i] <= room {
                room -= self.size[i];
                bound += self.profit[i] as f64;
            } else {
                bound += self.profit[i] as f64 * room as f64 / self.size[i] as f64;
                break;
            }
        }
        bound
    }

    fn search(&mut self, k: usize, value: i64) {
        self.explored += 1;
        if value > self.best {
            self.best = value;
            self.best_assign = self.assign.clone();
        }
        if k == self.order.len() || (self.bound(k, value) + 1e-6).floor() as i64 <= self.best {
            return;
        }
        let i = self.order[k];
        if self.profit[i] > 0 {
            let mut tried_empty = false;
            for j in 0..self.used.len() {
                let empty = self.used[j] == 0 && self.blank[j] == 0 && !self.assign.contains(&Some(j));
                if empty {
                    // empty rows are interchangeable
                    if tried_empty {
                        continue;
                    }
                    tried_empty = true;
                }
                if !self.fits(i, j) {
                    continue;
                }
                let saved = self.blank[j];
                self.used[j] += self.size[i];
                self.blank[j] = saved.max(self.slack[i]);
                self.assign[i] = Some(j);
                self.search(k + 1, value + self.profit[i]);
                self.assign[i] = None;
                self.blank[j] = saved;
                self.used[j] -= self.size[i];
            }
        }
        self.search(k + 1, value);
    }
}

fn knapsack(instance: &Instance, profits: &[i64], rule: Capacity) -> Result<OracleResult<Vec<Option<usize>>>> {
    if instance.mode != Mode::OneD {
        return Err(Error::ModeMismatch("the knapsack oracles need a 1d instance"));
    }
    let n = instance.candidates.len();
    if n > KNAPSACK_MAX_CANDIDATES || instance.row_count() > EXACT_1D_MAX_ROWS {
        return Err(Error::Param(format!(
            "the knapsack oracles handle at most {KNAPSACK_MAX_CANDIDATES} candidates and {EXACT_1D_MAX_ROWS} rows"
        )));
    }
    if profits.len() != n {
        return Err(Error::Param(format!("{} profits for {n} candidates", profits.len())));
    }
    let size: Vec<Micron> = instance.candidates.iter().map(|c| c.width() - c.symmetric_slack()).collect();
    let slack: Vec<Micron> = instance.candidates.iter().map(CharacterCandidate::symmetric_slack).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // by profit per unit size, zero-size items first
    order.sort_by(|&a, &b| {
        let (pa, pb) = (profits[a] as i128, profits[b] as i128);
        let (sa, sb) = (size[a].max(0) as i128, size[b].max(0) as i128);
        (pb * sa).cmp(&(pa * sb)).then(a.cmp(&b))
    });
    let rows = instance.row_count();
    let mut k = Knapsack {
        size,
        slack,
        profit: profits,
        order,
        width: instance.width(),
        rule,
        best: 0,
        best_assign: vec![None; n],
        assign: vec![None; n],
        used: vec![0; rows],
        blank: vec![0; rows],
        explored: 0,
    };
    k.search(0, 0);
    Ok(OracleResult {
        optimum: k.best,
        witness: k.best_assign,
        explored: k.explored,
    })
}

/// Integer optimum of the multiple knapsack with every row capped at
/// `W - max_s`, item sizes `w - s`. The witness maps candidates to rows.
pub fn exact_knapsack_3prime(instance: &Instance, profits: &[i64]) -> Result<OracleResult<Vec<Option<usize>>>> {
    let max_s = instance
        .candidates
        .iter()
        .map(CharacterCandidate::symmetric_slack)
        .max()
        .unwrap_or(0);
    knapsack(instance, profits, Capacity::Uniform(max_s))
}

/// Integer optimum of the symmetric-blank row program: each row holds
/// `sum (w - s) + max s <= W`.
pub fn exact_simplified(instance: &Instance, profits: &[i64]) -> Result<OracleResult<Vec<Option<usize>>>> {
    knapsack(instance, profits, Capacity::RowBlank)
}

/// Minimum sequence width over all `2^(k-1)` left/right insertion traces in
/// canonical order. The witness is the left-to-right order.
pub fn exact_orderings(items: &[RowItem]) -> Result<OracleResult<Vec<RowItem>>> {
    let k = items.len();
    if k > ORDERINGS_MAX_ITEMS {
        return Err(Error::Param(format!("exact_orderings handles at most {ORDERINGS_MAX_ITEMS} items")));
    }
    let canonical = canonical_order(items);
    if k == 0 {
        return Ok(OracleResult {
            optimum: 0,
            witness: Vec::new(),
            explored: 0,
        });
    }
    let mut best: Option<(Micron, Vec<RowItem>)> = None;
    let traces = 1u32 << (k - 1);
    for code in 0..traces {
        let trace: Vec<bool> = (0..k - 1).map(|b| code >> b & 1 == 1).collect();
        let order = apply_trace(&canonical, &trace);
        let w = sequence_width(&order);
        if best.as_ref().is_none_or(|b| w < b.0) {
            best = Some((w, order));
        }
    }
    let (optimum, witness) = best.expect("at least one trace");
    Ok(OracleResult {
        optimum,
        witness,
        explored: traces as u64,
    })
}

/// Smallest multiple of `step` that is `>= v`, for `v >= 0`.
fn ceil_to(v: Micron, step: Micron) -> Micron {
    (v + step - 1).div_euclid(step) * step
}

/// Minimum `T_total` over placements whose pattern corners sit on a
/// `grid_step` lattice anchored at the outline corner.
///
/// Every pair of selected characters is separated in one of four directions;
/// all direction assignments are tried, and each is realized by the least
/// grid positions satisfying its difference constraints. This is exact for
/// the lattice and says nothing about off-lattice placements.
pub fn exact_2d(instance: &Instance, grid_step: Micron) -> Result<OracleResult<Placement2D>> {
    if instance.mode != Mode::TwoD {
        return Err(Error::ModeMismatch("exact_2d needs a 2d instance"));
    }
    let n = instance.candidates.len();
    if n > EXACT_2D_MAX_CANDIDATES {
        return Err(Error::Param(format!("exact_2d handles at most {EXACT_2D_MAX_CANDIDATES} candidates")));
    }
    if grid_step <= 0 {
        return Err(Error::Param("grid step must be positive".into()));
    }
    let mut subsets: Vec<(u64, usize)> = (0..1usize << n)
        .map(|m| (writing_time(instance, bits(m)), m))
        .collect();
    subsets.sort_by_key(|&(t, m)| (t, m.count_ones(), m));
    let mut explored = 0;
    let mut infeasible: Vec<usize> = Vec::new();
    for (t, mask) in subsets {
        if infeasible.iter().any(|&bad| mask & bad == bad) {
            continue;
        }
        let members: Vec<&CharacterCandidate> = bits(mask).map(|i| &instance.candidates[i]).collect();
        match place_on_grid(&members, instance.width(), instance.height(), grid_step, &mut explored) {
            Some(corners) => {
                let placed: Vec<Placed> = members
                    .iter()
                    .zip(corners)
                    .map(|(c, (px, py))| Placed {
                        id: c.id,
                        x: px - c.sl,
                        y: py - c.sb,
                    })
                    .collect();
                let ids: Vec<CandidateId> = placed.iter().map(|p| p.id).collect();
                return Ok(OracleResult {
                    optimum: t as i64,
                    witness: Placement2D {
                        placed,
                        seq_pair: (ids.clone(), ids),
                    },
                    explored,
                });
            }
            None => infeasible.push(mask),
        }
    }
    unreachable!("the empty selection always fits")
}

/// Pattern lower-left corners for `members`, or `None` when no direction
/// assignment fits.
fn place_on_grid(
    members: &[&CharacterCandidate],
    width: Micron,
    height: Micron,
    step: Micron,
    explored: &mut u64,
) -> Option<Vec<(Micron, Micron)>> {
    let k = members.len();
    if members.iter().any(|c| c.pw > width || c.ph > height) {
        return None;
    }
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect();
    let total = 4u64.pow(pairs.len() as u32);
    // pattern gaps: a left of b needs max(sr_a, sl_b), a below b max(st_a, sb_b)
    let hgap = |a: usize, b: usize| members[a].pw + members[a].sr.max(members[b].sl);
    let vgap = |a: usize, b: usize| members[a].ph + members[a].st.max(members[b].sb);
    for code in 0..total {
        *explored += 1;
        // edges[a] lists (b, gap) with b constrained after a
        let mut h: Vec<Vec<(usize, Micron)>> = vec![Vec::new(); k];
        let mut v: Vec<Vec<(usize, Micron)>> = vec![Vec::new(); k];
        for (p, &(a, b)) in pairs.iter().enumerate() {
            match code >> (2 * p) & 3 {
                0 => h[a].push((b, hgap(a, b))),
                1 => h[b].push((a, hgap(b, a))),
                2 => v[a].push((b, vgap(a, b))),
                _ => v[b].push((a, vgap(b, a))),
            }
        }
        let (Some(xs), Some(ys)) = (longest_paths(&h, step), longest_paths(&v, step)) else {
            continue;
        };
        let fits = (0..k).all(|i| xs[i] + members[i].pw <= width && ys[i] + members[i].ph <= height);
        if fits {
            return Some(xs.into_iter().zip(ys).collect());
        }
    }
    None
}

/// Least lattice coordinates satisfying `x_b >= x_a + gap` for every edge,
/// or `None` on a cycle.
fn longest_paths(edges: &[Vec<(usize, Micron)>], step: Micron) -> Option<Vec<Micron>> {
    let k = edges.len();
    let mut indeg = vec![0; k];
    for out in edges {
        for &(b, _) in out {
            indeg[b] += 1;
        }
    }
    let mut queue: Vec<usize> = (0..k).filter(|&i| indeg[i] == 0).collect();
    let mut pos = vec![0; k];
    let mut seen = 0;
    while let Some(a) = queue.pop() {
        seen += 1;
        for &(b, gap) in &edges[a] {
            pos[b] = pos[b].max(ceil_to(pos[a] + gap, step));
            indeg[b] -= 1;
            if indeg[b] == 0 {
                queue.push(b);
            }
        }
    }
    (seen == k).then_some(pos)
}
