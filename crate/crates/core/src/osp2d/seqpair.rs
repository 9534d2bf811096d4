//! Sequence-pair decoding with blank sharing.
//!
//! `a` is left of `b` when it precedes `b` in both sequences, and below `b`
//! when it follows `b` in the first sequence but precedes it in the second.
//! Positions are longest paths in the two constraint graphs; an edge `a → b`
//! weighs the box extent of `a` minus the blank `a` and `b` may share.

use crate::model::Micron;

/// Box extents and blanks of one block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub w: Micron,
    pub h: Micron,
    pub sl: Micron,
    pub sr: Micron,
    pub st: Micron,
    pub sb: Micron,
}

impl Rect {
    pub fn of(c: &crate::model::CharacterCandidate) -> Self {
        Rect {
            w: c.width(),
            h: c.height(),
            sl: c.sl,
            sr: c.sr,
            st: c.st,
            sb: c.sb,
        }
    }
}

/// Lower-left box corners of `rects[k]` for a sequence pair over indices
/// into `rects`. Both sequences must be permutations of the same index set;
/// unlisted rects get `(0, 0)`.
pub fn sp_pack(plus: &[usize], minus: &[usize], rects: &[Rect]) -> Vec<(Micron, Micron)> {
    let mut rank_plus = vec![usize::MAX; rects.len()];
    for (k, &b) in plus.iter().enumerate() {
        rank_plus[b] = k;
    }
    let mut pos = vec![(0, 0); rects.len()];
    // every predecessor in either graph precedes in `minus`
    for (k, &b) in minus.iter().enumerate() {
        let rb = &rects[b];
        let (mut x, mut y) = (0, 0);
        for &a in &minus[..k] {
            let ra = &rects[a];
            if rank_plus[a] < rank_plus[b] {
                x = x.max(pos[a].0 + ra.w - ra.sr.min(rb.sl));
            } else {
                y = y.max(pos[a].1 + ra.h - ra.st.min(rb.sb));
            }
        }
        pos[b] = (x, y);
    }
    pos
}

/// True when the two index sequences are permutations of each other without repeats.
pub fn is_sequence_pair(plus: &[usize], minus: &[usize]) -> bool {
    let mut a = plus.to_vec();
    let mut b = minus.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    a == b && a.windows(2).all(|w| w[0] != w[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(w: Micron, h: Micron, s: Micron) -> Rect {
        Rect {
            w,
            h,
            sl: s,
            sr: s,
            st: s,
            sb: s,
        }
    }

    #[test]
    fn single_block_at_origin() {
        assert_eq!(sp_pack(&[0], &[0], &[rect(10, 10, 1)]), vec![(0, 0)]);
    }

    #[test]
    fn two_blocks_side_by_side() {
        let a = Rect {
            w: 20,
            h: 10,
            sl: 1,
            sr: 6,
            st: 1,
            sb: 1,
        };
        let b = rect(10, 10, 4);
        assert_eq!(sp_pack(&[0, 1], &[0, 1], &[a, b]), vec![(0, 0), (20 - 4, 0)]);
    }

    #[test]
    fn two_blocks_stacked() {
        let a = rect(10, 30, 3);
        let b = rect(10, 10, 5);
        // b above a: b before a in plus, after a in minus
        assert_eq!(sp_pack(&[1, 0], &[0, 1], &[a, b]), vec![(0, 0), (0, 27)]);
    }

    #[test]
    fn permutation_check() {
        assert!(is_sequence_pair(&[2, 0, 1], &[1, 2, 0]));
        assert!(!is_sequence_pair(&[0, 1], &[0, 2]));
        assert!(!is_sequence_pair(&[0, 0], &[0, 0]));
    }
}
