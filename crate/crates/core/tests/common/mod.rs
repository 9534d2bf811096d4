#![allow(dead_code)]

use proptest::prelude::*;
use stencil_core::osp1d::RowItem;
use stencil_core::{CharacterCandidate, Instance, Micron, Mode, Stencil};

pub fn candidate(regions: usize, pitch: Micron) -> impl Strategy<Value = CharacterCandidate> {
    (
        (1i64..=6, 1i64..=6),
        prop::array::uniform4(0i64..=2),
        2u64..=30,
        prop::collection::vec(0u64..=200, regions),
    )
        .prop_map(move |((pw, ph), [sl, sr, st, sb], n, t)| CharacterCandidate {
            id: 0,
            pw: pitch * pw,
            ph: pitch * ph,
            sl: pitch * sl,
            sr: pitch * sr,
            st: pitch * st,
            sb: pitch * sb,
            n,
            t,
        })
}

fn numbered(mut candidates: Vec<CharacterCandidate>) -> Vec<CharacterCandidate> {
    for (k, c) in candidates.iter_mut().enumerate() {
        c.id = k as u32;
    }
    candidates
}

/// Row-structured instance with unit pitch dimensions scaled by 3.
pub fn instance_1d(max_n: usize, max_rows: u32) -> impl Strategy<Value = Instance> {
    (1usize..=3, 1u32..=max_rows, 30i64..=90).prop_flat_map(move |(regions, rows, w)| {
        prop::collection::vec(candidate(regions, 3), 0..=max_n).prop_map(move |cs| Instance {
            mode: Mode::OneD,
            stencil: Stencil {
                w,
                h: 40 * rows as Micron,
                rows: Some(rows),
                row_height: Some(40),
            },
            regions,
            candidates: numbered(cs),
            seed: 0,
        })
    })
}

/// Free 2D instance with every dimension a multiple of `pitch`.
pub fn instance_2d(max_n: usize, pitch: Micron) -> impl Strategy<Value = Instance> {
    (1usize..=3, 6i64..=14, 6i64..=14).prop_flat_map(move |(regions, w, h)| {
        prop::collection::vec(candidate(regions, pitch), 0..=max_n).prop_map(move |cs| Instance {
            mode: Mode::TwoD,
            stencil: Stencil {
                w: pitch * w,
                h: pitch * h,
                rows: None,
                row_height: None,
            },
            regions,
            candidates: numbered(cs),
            seed: 0,
        })
    })
}

pub fn row(max_k: usize, symmetric: bool) -> impl Strategy<Value = Vec<RowItem>> {
    prop::collection::vec((0i64..=10, 0i64..=10, 1i64..=30), 1..=max_k).prop_map(move |v| {
        v.into_iter()
            .enumerate()
            .map(|(k, (sl, sr, pw))| {
                let sr = if symmetric { sl } else { sr };
                RowItem {
                    id: k as u32,
                    w: sl + pw + sr,
                    sl,
                    sr,
                }
            })
            .collect()
    })
}

/// Width of a left-to-right sequence with neighbours sharing blanks.
pub fn sequence_width(order: &[RowItem]) -> Micron {
    let total: Micron = order.iter().map(|i| i.w).sum();
    let shared: Micron = order.windows(2).map(|p| p[0].sr.min(p[1].sl)).sum();
    total - shared
}
