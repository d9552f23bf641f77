//! Seeded background (non-sliced) traffic per cell.
//!
//! Demand follows a daily-seasonal profile: a piecewise-constant mean per
//! slot-of-day, optionally with Poisson noise. Every cell draws from its own
//! deterministic stream, so one cell's (or tenant's) behavior never shifts
//! another's draws.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::CellId;

/// A step of the daily profile: mean PRB demand from this slot-of-day on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSegment {
    pub from_slot_of_day: u64,
    pub mean_prb: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum NoiseKind {
    /// Demand is the rounded mean, fully deterministic.
    #[serde(rename = "NONE")]
    #[default]
    None,
    /// Demand is Poisson-distributed around the mean.
    #[serde(rename = "POISSON")]
    Poisson,
}

/// Daily-seasonal demand profile; segments sorted by starting slot-of-day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct BackgroundProfile {
    pub segments: Vec<ProfileSegment>,
    #[serde(default)]
    pub noise: NoiseKind,
}

impl BackgroundProfile {
    pub fn constant(mean_prb: f64) -> Self {
        Self {
            segments: vec![ProfileSegment {
                from_slot_of_day: 0,
                mean_prb,
            }],
            noise: NoiseKind::None,
        }
    }

    pub fn mean_at(&self, slot_of_day: u64) -> f64 {
        let mut mean = 0.0;
        for seg in &self.segments {
            if seg.from_slot_of_day <= slot_of_day {
                mean = seg.mean_prb;
            } else {
                break;
            }
        }
        mean
    }

    pub fn is_valid(&self) -> bool {
        let sorted = self
            .segments
            .windows(2)
            .all(|w| w[0].from_slot_of_day < w[1].from_slot_of_day);
        let in_range = self
            .segments
            .iter()
            .all(|s| s.mean_prb.is_finite() && s.mean_prb >= 0.0);
        sorted && in_range
    }
}

/// Per-cell background generator with its own seeded stream.
#[derive(Debug, Clone)]
pub struct BackgroundTraffic {
    profile: BackgroundProfile,
    slots_per_day: u64,
    rng: ChaCha8Rng,
}

impl BackgroundTraffic {
    /// The stream seed mixes the scenario seed with the cell id so streams
    /// stay decoupled across cells.
    pub fn new(cell: &CellId, profile: BackgroundProfile, slots_per_day: u64, seed: u64) -> Self {
        Self {
            profile,
            slots_per_day: slots_per_day.max(1),
            rng: ChaCha8Rng::seed_from_u64(seed ^ fnv1a(cell.as_str())),
        }
    }

    /// Demand for `slot`; consumes this cell's stream deterministically.
    pub fn demand(&mut self, slot: u64) -> u32 {
        let mean = self.profile.mean_at(slot % self.slots_per_day);
        match self.profile.noise {
            NoiseKind::None => mean.round() as u32,
            NoiseKind::Poisson => poisson(&mut self.rng, mean),
        }
    }
}

/// Knuth's product-of-uniforms Poisson sampler; fine for desk-scale means.
fn poisson(rng: &mut ChaCha8Rng, mean: f64) -> u32 {
    if mean <= 0.0 {
        return 0;
    }
    let threshold = (-mean).exp();
    let mut k = 0u32;
    let mut product = 1.0f64;
    loop {
        product *= rng.random::<f64>();
        if product <= threshold {
            return k;
        }
        k += 1;
        if k > 100_000 {
            return k;
        }
    }
}

fn fnv1a(s: &str) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.as_bytes() {
        hash ^= *b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}
