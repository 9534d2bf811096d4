//! Synthetic benchmark instances.
//!
//! Candidate sizes follow the usual 40 μm nominal character: total extents
//! uniform in 30..=50 μm, each blank uniform in 2..=10 μm, VSB shot counts
//! uniform in 5..=30 and per-region repeats uniform in 0..=400 with a 20%
//! chance of a region not using the character at all.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CharacterCandidate, Instance, Micron, Mode, Stencil};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Small,
    Large,
}

impl std::str::FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "small" => Ok(Preset::Small),
            "large" => Ok(Preset::Large),
            other => Err(format!("unknown preset `{other}` (expected small or large)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub mode: Mode,
    pub candidates: usize,
    pub width: Micron,
    pub height: Micron,
    pub regions: usize,
    /// Row pitch in 1D mode; ignored in 2D.
    pub row_height: Micron,
    pub total_width: (Micron, Micron),
    pub total_height: (Micron, Micron),
    pub blank: (Micron, Micron),
    pub shots: (u64, u64),
    pub usage_max: u64,
    pub zero_usage_prob: f64,
}

impl GeneratorSpec {
    /// 1000 candidates on a 1000 μm square stencil with ten regions.
    pub fn small(mode: Mode) -> Self {
        GeneratorSpec {
            mode,
            candidates: 1000,
            width: 1000,
            height: 1000,
            regions: 10,
            row_height: 50,
            total_width: (30, 50),
            total_height: (30, 50),
            blank: (2, 10),
            shots: (5, 30),
            usage_max: 400,
            zero_usage_prob: 0.2,
        }
    }

    /// 4000 candidates on a 2000 μm square stencil with ten regions.
    pub fn large(mode: Mode) -> Self {
        GeneratorSpec {
            candidates: 4000,
            width: 2000,
            height: 2000,
            ..Self::small(mode)
        }
    }

    pub fn preset(preset: Preset, mode: Mode) -> Self {
        match preset {
            Preset::Small => Self::small(mode),
            Preset::Large => Self::large(mode),
        }
    }

    fn check(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Generation(msg.to_string()));
        if self.width <= 0 || self.height <= 0 || self.regions == 0 {
            return bad("stencil extents and region count must be positive");
        }
        let ranges = [self.total_width, self.total_height, self.blank];
        if ranges.iter().any(|&(lo, hi)| lo > hi || lo < 0) {
            return bad("ranges must satisfy 0 ≤ lo ≤ hi");
        }
        if self.shots.0 < 1 || self.shots.0 > self.shots.1 {
            return bad("shot range must satisfy 1 ≤ lo ≤ hi");
        }
        if self.total_width.0 <= 2 * self.blank.1 || self.total_height.0 <= 2 * self.blank.1 {
            return bad("smallest character must keep a nonempty pattern inside its blanks");
        }
        if !(0.0..=1.0).contains(&self.zero_usage_prob) {
            return bad("zero usage probability must lie in [0, 1]");
        }
        if self.mode == Mode::OneD {
            if self.row_height < self.total_height.1 {
                return bad("row_height below the tallest character");
            }
            if self.row_height > self.height {
                return bad("row_height exceeds the stencil height");
            }
        }
        Ok(())
    }
}

/// Deterministic for a fixed `(spec, seed)`.
pub fn generate_instance(spec: &GeneratorSpec, seed: u64) -> Result<Instance> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates = Vec::with_capacity(spec.candidates);
    for id in 0..spec.candidates {
        let w = rng.gen_range(spec.total_width.0..=spec.total_width.1);
        let h = rng.gen_range(spec.total_height.0..=spec.total_height.1);
        let mut blank = || rng.gen_range(spec.blank.0..=spec.blank.1);
        let (sl, sr, st, sb) = (blank(), blank(), blank(), blank());
        let n = rng.gen_range(spec.shots.0..=spec.shots.1);
        let t = (0..spec.regions)
            .map(|_| {
                if rng.gen_bool(spec.zero_usage_prob) {
                    0
                } else {
                    rng.gen_range(0..=spec.usage_max)
                }
            })
            .collect();
        candidates.push(CharacterCandidate {
            id: id as u32,
            pw: w - sl - sr,
            ph: h - st - sb,
            sl,
            sr,
            st,
            sb,
            n,
            t,
        });
    }
    let stencil = match spec.mode {
        Mode::OneD => Stencil {
            w: spec.width,
            h: spec.height,
            rows: Some((spec.height / spec.row_height) as u32),
            row_height: Some(spec.row_height),
        },
        Mode::TwoD => Stencil {
            w: spec.width,
            h: spec.height,
            rows: None,
            row_height: None,
        },
    };
    let instance = Instance {
        mode: spec.mode,
        stencil,
        regions: spec.regions,
        candidates,
        seed,
    };
    instance.validate()?;
    Ok(instance)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_preset_shape() {
        let inst = generate_instance(&GeneratorSpec::small(Mode::OneD), 1).unwrap();
        assert_eq!(inst.candidates.len(), 1000);
        assert_eq!((inst.width(), inst.height()), (1000, 1000));
        assert_eq!(inst.regions, 10);
        assert_eq!(inst.row_count(), 20);
        for c in &inst.candidates {
            assert!((30..=50).contains(&c.width()));
            assert!(c.height() <= inst.row_height());
            assert!((5..=30).contains(&c.n));
        }
    }

    #[test]
    fn large_preset_shape() {
        let inst = generate_instance(&GeneratorSpec::large(Mode::TwoD), 7).unwrap();
        assert_eq!(inst.candidates.len(), 4000);
        assert_eq!((inst.width(), inst.height()), (2000, 2000));
    }

    #[test]
    fn deterministic_bytes() {
        let spec = GeneratorSpec {
            candidates: 50,
            ..GeneratorSpec::small(Mode::TwoD)
        };
        let a = generate_instance(&spec, 99).unwrap().to_json();
        let b = generate_instance(&spec, 99).unwrap().to_json();
        assert_eq!(a, b);
        assert_ne!(a, generate_instance(&spec, 100).unwrap().to_json());
    }

    #[test]
    fn rows_too_short() {
        let spec = GeneratorSpec {
            row_height: 45,
            ..GeneratorSpec::small(Mode::OneD)
        };
        assert!(matches!(generate_instance(&spec, 1), Err(Error::Generation(_))));
    }

    #[test]
    fn some_usage_is_zero() {
        let inst = generate_instance(&GeneratorSpec::small(Mode::TwoD), 3).unwrap();
        let zeros = inst.candidates.iter().flat_map(|c| &c.t).filter(|&&t| t == 0).count();
        let share = zeros as f64 / (inst.candidates.len() * inst.regions) as f64;
        assert!((0.15..0.25).contains(&share), "zero share {share}");
    }
}
