//! A dynamic k-d tree over small fixed-dimension points.
//!
//! Nodes split on axes in rotation; equal coordinates go right. Deletion
//! replaces the removed node with the axis minimum of its right subtree (or
//! of its left subtree, which then becomes the right one), so the tree never
//! holds tombstones.

use std::cell::Cell;

use crate::model::CandidateId;

#[derive(Debug, Clone, PartialEq)]
struct Node<const K: usize> {
    point: [f64; K],
    id: CandidateId,
    left: Option<Box<Node<K>>>,
    right: Option<Box<Node<K>>>,
}

#[derive(Debug, Clone)]
pub struct KdTree<const K: usize> {
    root: Option<Box<Node<K>>>,
    len: usize,
    probes: Cell<u64>,
}

impl<const K: usize> Default for KdTree<K> {
    fn default() -> Self {
        KdTree {
            root: None,
            len: 0,
            probes: Cell::new(0),
        }
    }
}

impl<const K: usize> KdTree<K> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Balanced build by recursive median split.
    pub fn build(points: Vec<([f64; K], CandidateId)>) -> Self {
        fn go<const K: usize>(mut pts: Vec<([f64; K], CandidateId)>, depth: usize) -> Option<Box<Node<K>>> {
            if pts.is_empty() {
                return None;
            }
            let axis = depth % K;
            pts.sort_by(|a, b| a.0[axis].total_cmp(&b.0[axis]).then(a.1.cmp(&b.1)));
            let mut mid = pts.len() / 2;
            // equal keys must sit right of the node
            while mid > 0 && pts[mid - 1].0[axis] == pts[mid].0[axis] {
                mid -= 1;
            }
            let right = pts.split_off(mid + 1);
            let (point, id) = pts.pop().expect("mid is in range");
            Some(Box::new(Node {
                point,
                id,
                left: go(pts, depth + 1),
                right: go(right, depth + 1),
            }))
        }
        let len = points.len();
        KdTree {
            root: go(points, 0),
            len,
            probes: Cell::new(0),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Nodes visited by queries since construction or the last reset.
    pub fn probes(&self) -> u64 {
        self.probes.get()
    }

    pub fn reset_probes(&self) {
        self.probes.set(0);
    }

    pub fn insert(&mut self, point: [f64; K], id: CandidateId) {
        let mut slot = &mut self.root;
        let mut depth = 0;
        while let Some(node) = slot {
            let axis = depth % K;
            slot = if point[axis] < node.point[axis] {
                &mut node.left
            } else {
                &mut node.right
            };
            depth += 1;
        }
        *slot = Some(Box::new(Node {
            point,
            id,
            left: None,
            right: None,
        }));
        self.len += 1;
    }

    /// Removes one occurrence of `(point, id)`; `false` if absent.
    pub fn delete(&mut self, point: [f64; K], id: CandidateId) -> bool {
        let removed = Self::delete_at(&mut self.root, &point, id, 0);
        if removed {
            self.len -= 1;
        }
        removed
    }

    fn delete_at(slot: &mut Option<Box<Node<K>>>, point: &[f64; K], id: CandidateId, depth: usize) -> bool {
        let Some(node) = slot else {
            return false;
        };
        let axis = depth % K;
        if node.id == id && node.point == *point {
            if node.right.is_some() {
                let (p, i) = Self::min_on(node.right.as_deref().expect("checked"), axis, depth + 1);
                node.point = p;
                node.id = i;
                Self::delete_at(&mut node.right, &p, i, depth + 1);
            } else if node.left.is_some() {
                let (p, i) = Self::min_on(node.left.as_deref().expect("checked"), axis, depth + 1);
                node.point = p;
                node.id = i;
                node.right = node.left.take();
                Self::delete_at(&mut node.right, &p, i, depth + 1);
            } else {
                *slot = None;
            }
            return true;
        }
        if point[axis] < node.point[axis] {
            Self::delete_at(&mut node.left, point, id, depth + 1)
        } else {
            Self::delete_at(&mut node.right, point, id, depth + 1)
        }
    }

    /// Entry with the smallest `axis` coordinate (ties by id) under `node`.
    fn min_on(node: &Node<K>, axis: usize, depth: usize) -> ([f64; K], CandidateId) {
        let mut best = (node.point, node.id);
        let mut consider = |c: ([f64; K], CandidateId)| {
            if c.0[axis] < best.0[axis] || (c.0[axis] == best.0[axis] && c.1 < best.1) {
                best = c;
            }
        };
        if let Some(l) = &node.left {
            consider(Self::min_on(l, axis, depth + 1));
        }
        if depth % K != axis {
            if let Some(r) = &node.right {
                consider(Self::min_on(r, axis, depth + 1));
            }
        }
        best
    }

    /// Ids whose points lie in the closed box `[lo, hi]`, ascending.
    pub fn range(&self, lo: &[f64; K], hi: &[f64; K]) -> Vec<CandidateId> {
        let mut out = Vec::new();
        let mut stack: Vec<(&Node<K>, usize)> = Vec::new();
        if let Some(r) = &self.root {
            stack.push((r, 0));
        }
        let mut visited = 0;
        while let Some((node, depth)) = stack.pop() {
            visited += 1;
            let axis = depth % K;
            if (0..K).all(|a| lo[a] <= node.point[a] && node.point[a] <= hi[a]) {
                out.push(node.id);
            }
            if let Some(l) = &node.left {
                if lo[axis] < node.point[axis] {
                    stack.push((l, depth + 1));
                }
            }
            if let Some(r) = &node.right {
                if hi[axis] >= node.point[axis] {
                    stack.push((r, depth + 1));
                }
            }
        }
        self.probes.set(self.probes.get() + visited);
        out.sort_unstable();
        out
    }

    /// Entry in the closed box `[lo, hi]` with the largest coordinate on
    /// `axis` (ties by lowest id) among those `accept` admits.
    ///
    /// Subtrees whose split planes cap `axis` below the best value found so
    /// far are skipped, so a wide box does not cost a full report.
    pub fn best_in_range(
        &self,
        lo: &[f64; K],
        hi: &[f64; K],
        axis: usize,
        mut accept: impl FnMut(CandidateId) -> bool,
    ) -> Option<CandidateId> {
        let root = self.root.as_deref()?;
        let mut best = None;
        let mut visited = 0;
        Self::best_at(root, 0, lo, hi, axis, hi[axis], &mut best, &mut accept, &mut visited);
        self.probes.set(self.probes.get() + visited);
        best.map(|(_, id)| id)
    }

    #[allow(clippy::too_many_arguments)]
    fn best_at(
        node: &Node<K>,
        depth: usize,
        lo: &[f64; K],
        hi: &[f64; K],
        axis: usize,
        cap: f64,
        best: &mut Option<(f64, CandidateId)>,
        accept: &mut impl FnMut(CandidateId) -> bool,
        visited: &mut u64,
    ) {
        if best.is_some_and(|(v, _)| cap < v) {
            return;
        }
        *visited += 1;
        let v = node.point[axis];
        let better = best.is_none_or(|(bv, bid)| v > bv || (v == bv && node.id < bid));
        if better && (0..K).all(|a| lo[a] <= node.point[a] && node.point[a] <= hi[a]) && accept(node.id) {
            *best = Some((v, node.id));
        }
        let split = depth % K;
        let key = node.point[split];
        // larger values live on the right, so look there first
        if let Some(r) = &node.right {
            if hi[split] >= key {
                Self::best_at(r, depth + 1, lo, hi, axis, cap, best, accept, visited);
            }
        }
        if let Some(l) = &node.left {
            if lo[split] < key {
                let cap = if split == axis { cap.min(key) } else { cap };
                Self::best_at(l, depth + 1, lo, hi, axis, cap, best, accept, visited);
            }
        }
    }

    /// Euclidean-nearest entry, ties by lowest id; `None` on an empty tree.
    pub fn nearest(&self, target: &[f64; K]) -> Option<(CandidateId, [f64; K])> {
        let root = self.root.as_deref()?;
        let mut best: Option<(f64, CandidateId, [f64; K])> = None;
        let mut visited = 0;
        Self::nearest_at(root, target, 0, &mut best, &mut visited);
        self.probes.set(self.probes.get() + visited);
        best.map(|(_, id, p)| (id, p))
    }

    fn nearest_at(
        node: &Node<K>,
        target: &[f64; K],
        depth: usize,
        best: &mut Option<(f64, CandidateId, [f64; K])>,
        visited: &mut u64,
    ) {
        *visited += 1;
        let d: f64 = (0..K).map(|a| (node.point[a] - target[a]).powi(2)).sum();
        let better = match best {
            None => true,
            Some((bd, bid, _)) => d < *bd || (d == *bd && node.id < *bid),
        };
        if better {
            *best = Some((d, node.id, node.point));
        }
        let axis = depth % K;
        let diff = target[axis] - node.point[axis];
        let (near, far) = if diff < 0.0 {
            (&node.left, &node.right)
        } else {
            (&node.right, &node.left)
        };
        if let Some(n) = near {
            Self::nearest_at(n, target, depth + 1, best, visited);
        }
        if let Some(f) = far {
            // ties on distance still matter for the id rule, hence `<=`
            if best.is_none_or(|(bd, _, _)| diff * diff <= bd) {
                Self::nearest_at(f, target, depth + 1, best, visited);
            }
        }
    }

    /// All entries in unspecified order.
    pub fn entries(&self) -> Vec<([f64; K], CandidateId)> {
        let mut out = Vec::with_capacity(self.len);
        let mut stack: Vec<&Node<K>> = self.root.as_deref().into_iter().collect();
        while let Some(n) = stack.pop() {
            out.push((n.point, n.id));
            stack.extend(n.left.as_deref());
            stack.extend(n.right.as_deref());
        }
        out
    }

    /// Checks the split invariant: left keys `<` node `≤` right keys.
    pub fn is_valid(&self) -> bool {
        fn go<const K: usize>(node: &Node<K>, depth: usize, bounds: &mut Vec<(usize, f64, bool)>) -> bool {
            // (axis, key, must_be_less)
            for &(axis, key, less) in bounds.iter() {
                let ok = if less { node.point[axis] < key } else { node.point[axis] >= key };
                if !ok {
                    return false;
                }
            }
            let axis = depth % K;
            let mut ok = true;
            if let Some(l) = &node.left {
                bounds.push((axis, node.point[axis], true));
                ok &= go(l, depth + 1, bounds);
                bounds.pop();
            }
            if let Some(r) = &node.right {
                bounds.push((axis, node.point[axis], false));
                ok &= go(r, depth + 1, bounds);
                bounds.pop();
            }
            ok
        }
        self.root.as_deref().is_none_or(|r| go(r, 0, &mut Vec::new())) && self.entries().len() == self.len
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_range() {
        let mut t = KdTree::<2>::new();
        t.insert([1.0, 1.0], 0);
        t.insert([5.0, 5.0], 1);
        assert_eq!(t.range(&[0.0, 0.0], &[2.0, 2.0]), vec![0]);
        assert_eq!(t.range(&[1.0, 1.0], &[5.0, 5.0]), vec![0, 1]);
    }

    #[test]
    fn insert_delete_roundtrip() {
        let pts: Vec<([f64; 3], u32)> = (0..40)
            .map(|i| ([(i % 7) as f64, (i % 3) as f64, (i / 5) as f64], i))
            .collect();
        let mut t = KdTree::build(pts.clone());
        assert!(t.is_valid());
        t.insert([3.0, 1.0, 2.0], 99);
        assert!(t.delete([3.0, 1.0, 2.0], 99));
        assert!(!t.delete([3.0, 1.0, 2.0], 99));
        let mut got = t.entries();
        got.sort_by_key(|e| e.1);
        assert_eq!(got, pts);
        for (p, id) in &pts {
            assert!(t.delete(*p, *id));
            assert!(t.is_valid());
        }
        assert!(t.is_empty());
    }

    #[test]
    fn nearest_prefers_lower_id() {
        let mut t = KdTree::<2>::new();
        assert!(t.nearest(&[0.0, 0.0]).is_none());
        t.insert([1.0, 0.0], 5);
        t.insert([-1.0, 0.0], 3);
        t.insert([0.0, 2.0], 1);
        assert_eq!(t.nearest(&[0.0, 0.0]).unwrap().0, 3);
    }
}
