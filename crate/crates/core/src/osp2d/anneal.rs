//! Simulated annealing over sequence pairs with an active subset.
//!
//! Every object sits in both sequences; inactive objects are skipped when
//! packing. The cost of a state is the writing time of the objects whose
//! patterns land inside the outline plus a penalty on how far the packing
//! overruns it. The best state ever seen is tracked over the in-outline
//! subset, which is always a feasible placement on its own.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cluster::ClusterNode;
use super::seqpair::{sp_pack, Rect};
use crate::model::Micron;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaParams {
    pub seed: u64,
    /// Total move budget, including the temperature probe.
    pub moves: usize,
    pub cooling: f64,
    /// Mean acceptance probability of the probed uphill moves at the start.
    pub initial_acceptance: f64,
}

impl Default for SaParams {
    fn default() -> Self {
        SaParams {
            seed: 1,
            moves: 50_000,
            cooling: 0.97,
            initial_acceptance: 0.02,
        }
    }
}

/// Moves sampled to set the starting temperature.
const PROBE_MOVES: usize = 100;
/// Temperature steps over a full run.
const COOLING_STEPS: usize = 227;

#[derive(Debug, Clone, PartialEq)]
pub struct SaResult {
    /// In-outline object indices in sequence order.
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
    /// `(object index, x, y)` of each in-outline object, box corner.
    pub positions: Vec<(usize, Micron, Micron)>,
    pub t_total: u64,
    pub initial_t_total: u64,
    pub moves: usize,
    pub accepted: usize,
    pub temperature0: f64,
}

#[derive(Debug, Clone)]
struct State {
    plus: Vec<usize>,
    minus: Vec<usize>,
    active: Vec<bool>,
}

#[derive(Debug, Clone)]
struct Packed {
    cost: f64,
    t_total: u64,
    overflow: Micron,
    /// In-outline objects with shifted positions.
    inside: Vec<(usize, Micron, Micron)>,
}

struct Problem<'a> {
    objects: &'a [ClusterNode],
    rects: Vec<Rect>,
    vsb: &'a [u64],
    width: Micron,
    height: Micron,
    lambda: f64,
}

impl Problem<'_> {
    fn pack(&self, s: &State) -> Packed {
        let plus: Vec<usize> = s.plus.iter().copied().filter(|&k| s.active[k]).collect();
        let minus: Vec<usize> = s.minus.iter().copied().filter(|&k| s.active[k]).collect();
        let pos = sp_pack(&plus, &minus, &self.rects);
        let dx = minus.iter().map(|&k| pos[k].0 + self.rects[k].sl).min().unwrap_or(0);
        let dy = minus.iter().map(|&k| pos[k].1 + self.rects[k].sb).min().unwrap_or(0);
        let mut times: Vec<u64> = self.vsb.to_vec();
        let mut active_times: Vec<u64> = self.vsb.to_vec();
        let (mut right, mut top) = (0, 0);
        let mut inside = Vec::new();
        for &k in &minus {
            let r = &self.rects[k];
            let (x, y) = (pos[k].0 - dx, pos[k].1 - dy);
            let pr = x + r.w - r.sr;
            let pt = y + r.h - r.st;
            right = right.max(pr);
            top = top.max(pt);
            let red = &self.objects[k].reduction;
            for (t, red) in active_times.iter_mut().zip(red) {
                *t = t.saturating_sub(*red);
            }
            if pr <= self.width && pt <= self.height {
                inside.push((k, x, y));
                for (t, red) in times.iter_mut().zip(red) {
                    *t = t.saturating_sub(*red);
                }
            }
        }
        let t_total = times.into_iter().max().unwrap_or(0);
        let t_active = active_times.into_iter().max().unwrap_or(0);
        let overflow = (right - self.width).max(0) + (top - self.height).max(0);
        Packed {
            cost: t_active as f64 + self.lambda * overflow as f64,
            t_total,
            overflow,
            inside,
        }
    }
}

/// Shelf rows of `order`: each object joins the first shelf that is tall
/// enough and has room, else opens a new one. Returns `(plus, minus)`.
fn shelf_pair(p: &Problem, order: &[usize]) -> (Vec<usize>, Vec<usize>) {
    struct Shelf {
        height: Micron,
        // last box's right edge, measured from the first pattern's left edge
        right: Micron,
        items: Vec<usize>,
    }
    let mut shelves: Vec<Shelf> = Vec::new();
    for &k in order {
        let r = &p.rects[k];
        let room = |s: &Shelf| {
            let last = &p.rects[*s.items.last().expect("shelves are nonempty")];
            s.right + r.w - last.sr.min(r.sl)
        };
        match shelves.iter().position(|s| r.h <= s.height && room(s) - r.sr <= p.width) {
            Some(j) => {
                let right = room(&shelves[j]);
                shelves[j].right = right;
                shelves[j].items.push(k);
            }
            None => shelves.push(Shelf {
                height: r.h,
                right: r.w - r.sl,
                items: vec![k],
            }),
        }
    }
    let mut plus = Vec::with_capacity(order.len());
    let mut minus = Vec::with_capacity(order.len());
    for shelf in &shelves {
        minus.extend(shelf.items.iter().copied());
        plus.splice(0..0, shelf.items.iter().copied());
    }
    (plus, minus)
}

/// Objects by profit density; a prefix of them sorted tallest first, then
/// the rest in density order, packed as shelves. The prefix length with the
/// best in-outline writing time wins. Whatever ends up outside is switched
/// off and moved to the back of both sequences.
fn initial_state(p: &Problem) -> State {
    let n = p.objects.len();
    let mut order: Vec<usize> = (0..n).collect();
    let density = |k: usize| p.objects[k].profit / p.objects[k].area().max(1) as f64;
    order.sort_by(|&a, &b| density(b).total_cmp(&density(a)).then(p.objects[a].id.cmp(&p.objects[b].id)));
    let arrange = |m: usize| {
        let mut head = order[..m].to_vec();
        head.sort_by(|&a, &b| p.rects[b].h.cmp(&p.rects[a].h).then(p.objects[a].id.cmp(&p.objects[b].id)));
        head.extend_from_slice(&order[m..]);
        let (plus, minus) = shelf_pair(p, &head);
        let state = State {
            plus,
            minus,
            active: vec![true; n],
        };
        let packed = p.pack(&state);
        (state, packed)
    };
    let (mut state, packed) = (0..=n)
        .map(arrange)
        .min_by_key(|(_, packed)| packed.t_total)
        .expect("the range is nonempty");
    // removing objects only moves the rest down or left
    let mut inside = vec![false; n];
    for &(k, _, _) in &packed.inside {
        inside[k] = true;
    }
    let (keep_p, drop_p): (Vec<usize>, Vec<usize>) = state.plus.iter().partition(|&&k| inside[k]);
    let (keep_m, drop_m): (Vec<usize>, Vec<usize>) = state.minus.iter().partition(|&&k| inside[k]);
    state.plus = [keep_p, drop_p].concat();
    state.minus = [keep_m, drop_m].concat();
    state.active = inside;
    state
}

fn random_move(s: &mut State, rng: &mut ChaCha8Rng) {
    let n = s.plus.len();
    // active objects in first-sequence order; swaps are between neighbours
    let active: Vec<usize> = s.plus.iter().copied().filter(|&k| s.active[k]).collect();
    let roll: f64 = rng.gen();
    if active.len() >= 2 && roll < 0.8 {
        let at = rng.gen_range(0..active.len() - 1);
        let (a, b) = (active[at], active[at + 1]);
        swap_in(&mut s.plus, a, b);
        if roll >= 0.4 {
            swap_in(&mut s.minus, a, b);
        }
        return;
    }
    let k = rng.gen_range(0..n);
    if s.active[k] || active.is_empty() || rng.gen_bool(0.5) {
        // off and back on again restores the same packing
        s.active[k] = !s.active[k];
        return;
    }
    // on, right after a random active object in both sequences
    let j = active[rng.gen_range(0..active.len())];
    s.active[k] = true;
    for seq in [&mut s.plus, &mut s.minus] {
        let at = seq.iter().position(|&x| x == k).expect("every object is in both sequences");
        seq.remove(at);
        let to = seq.iter().position(|&x| x == j).expect("present") + 1;
        seq.insert(to, k);
    }
}

fn swap_in(seq: &mut [usize], a: usize, b: usize) {
    let pa = seq.iter().position(|&x| x == a).expect("present");
    let pb = seq.iter().position(|&x| x == b).expect("present");
    seq.swap(pa, pb);
}

/// Anneals a placement of `objects` into a `width × height` outline against
/// per-region base times `vsb`.
pub fn sa_optimize(objects: &[ClusterNode], vsb: &[u64], width: Micron, height: Micron, params: &SaParams) -> SaResult {
    let lambda = objects
        .iter()
        .flat_map(|o| o.reduction.iter().copied())
        .max()
        .unwrap_or(0)
        .max(1) as f64;
    let problem = Problem {
        objects,
        rects: objects
            .iter()
            .map(|o| Rect {
                w: o.w,
                h: o.h,
                sl: o.sl,
                sr: o.sr,
                st: o.st,
                sb: o.sb,
            })
            .collect(),
        vsb,
        width,
        height,
        lambda,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut state = initial_state(&problem);
    let mut current = problem.pack(&state);
    let initial_t_total = current.t_total;
    let mut best = (current.t_total, state.clone(), current.inside.clone());

    if objects.is_empty() || params.moves == 0 {
        return finish(best, initial_t_total, 0, 0, 0.0);
    }

    let probe = PROBE_MOVES.min(params.moves);
    // overflowing trials are scored separately so that the penalty scale
    // does not set the temperature
    let (mut uphill, mut uphill_overflow) = (Vec::new(), Vec::new());
    for _ in 0..probe {
        let mut trial = state.clone();
        random_move(&mut trial, &mut rng);
        let packed = problem.pack(&trial);
        let d = packed.cost - current.cost;
        if d > 0.0 {
            if packed.overflow == 0 {
                uphill.push(d);
            } else {
                uphill_overflow.push(d);
            }
        }
    }
    if uphill.is_empty() {
        uphill = uphill_overflow;
    }
    let temperature0 = start_temperature(&uphill, params.initial_acceptance);
    let mut temperature = temperature0;
    let period = (params.moves / COOLING_STEPS).max(1);
    let mut accepted = 0;
    let mut moves = probe;
    while moves < params.moves {
        let mut trial = state.clone();
        random_move(&mut trial, &mut rng);
        let packed = problem.pack(&trial);
        let d = packed.cost - current.cost;
        if d <= 0.0 || rng.gen::<f64>() < (-d / temperature).exp() {
            state = trial;
            current = packed;
            accepted += 1;
            if current.t_total < best.0 {
                best = (current.t_total, state.clone(), current.inside.clone());
            }
        }
        moves += 1;
        if (moves - probe).is_multiple_of(period) {
            temperature *= params.cooling;
        }
    }
    finish(best, initial_t_total, moves, accepted, temperature0)
}

/// Temperature at which the sampled uphill moves would be accepted with mean
/// probability `target`, by bisection on a log scale.
fn start_temperature(uphill: &[f64], target: f64) -> f64 {
    if uphill.is_empty() {
        return 1.0;
    }
    let acceptance = |t: f64| uphill.iter().map(|d| (-d / t).exp()).sum::<f64>() / uphill.len() as f64;
    let (mut lo, mut hi) = (1e-9_f64, uphill.iter().copied().fold(0.0, f64::max) * 1e3);
    for _ in 0..100 {
        let mid = (lo * hi).sqrt();
        if acceptance(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

fn finish(
    best: (u64, State, Vec<(usize, Micron, Micron)>),
    initial_t_total: u64,
    moves: usize,
    accepted: usize,
    temperature0: f64,
) -> SaResult {
    let (t_total, state, positions) = best;
    let mut inside = vec![false; state.plus.len()];
    for &(k, _, _) in &positions {
        inside[k] = true;
    }
    SaResult {
        plus: state.plus.iter().copied().filter(|&k| inside[k]).collect(),
        minus: state.minus.iter().copied().filter(|&k| inside[k]).collect(),
        positions,
        t_total,
        initial_t_total,
        moves,
        accepted,
        temperature0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block(id: u32, w: Micron, h: Micron, red: u64) -> ClusterNode {
        ClusterNode {
            id,
            members: vec![(id, 0, 0)],
            seq: (vec![id], vec![id]),
            orientation: None,
            w,
            h,
            sl: 2,
            sr: 2,
            st: 2,
            sb: 2,
            profit: red as f64,
            reduction: vec![red],
        }
    }

    #[test]
    fn everything_fits() {
        let objs: Vec<_> = (0..4).map(|i| block(i, 20, 20, 10)).collect();
        let r = sa_optimize(&objs, &[100], 100, 100, &SaParams::default());
        assert_eq!(r.t_total, 60);
        assert_eq!(r.positions.len(), 4);
    }

    #[test]
    fn picks_the_valuable_block() {
        let objs = vec![block(0, 60, 20, 5), block(1, 60, 20, 50)];
        let r = sa_optimize(&objs, &[100], 60, 60, &SaParams { moves: 500, ..SaParams::default() });
        assert!(r.t_total <= 50);
        assert!(r.t_total <= r.initial_t_total);
    }

    #[test]
    fn zero_moves_returns_initial() {
        let objs: Vec<_> = (0..3).map(|i| block(i, 40, 40, 7)).collect();
        let r = sa_optimize(&objs, &[50], 80, 40, &SaParams { moves: 0, ..SaParams::default() });
        assert_eq!(r.t_total, r.initial_t_total);
        assert_eq!(r.moves, 0);
    }
}
