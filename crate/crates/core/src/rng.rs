//! Seed derivation and counter-based noise.
//!
//! Every random draw consumed by the particle dynamics is a pure function of
//! `(seed, vertex, step, lane)`. Nothing is carried between draws, so a
//! simulation can be replayed with the noise of any subset of vertices
//! swapped out, and the result does not depend on evaluation order or on
//! the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Seed = u64;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const VERTEX_KEY: u64 = 0xD1B5_4A32_D192_ED03;
const STEP_KEY: u64 = 0xAEF1_7502_108E_F2D9;
const LANE_KEY: u64 = 0x94D0_49BB_1331_11EB;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for an independent sub-stream (replica index, phase, ...).
#[inline]
pub fn derive_seed(seed: Seed, stream: u64) -> Seed {
    mix64(mix64(seed.wrapping_add(GOLDEN)) ^ stream.wrapping_mul(VERTEX_KEY).wrapping_add(LANE_KEY))
}

#[inline]
pub fn counter_u64(seed: Seed, vertex: u64, step: u64, lane: u64) -> u64 {
    let mut h = mix64(seed.wrapping_add(GOLDEN));
    h = mix64(h ^ vertex.wrapping_mul(VERTEX_KEY));
    h = mix64(h ^ step.wrapping_mul(STEP_KEY));
    mix64(h ^ lane.wrapping_mul(LANE_KEY).wrapping_add(GOLDEN))
}

#[inline]
fn to_unit(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw in `[0, 1)` for `(vertex, step)`.
#[inline]
pub fn uniform(seed: Seed, vertex: usize, step: usize) -> f64 {
    to_unit(counter_u64(seed, vertex as u64, step as u64, 0))
}

/// Uniform draw in `[0, 1)` from an extra lane, for rules that need more
/// than one number per step. Lane 0 is [`uniform`].
#[inline]
pub fn uniform_lane(seed: Seed, vertex: usize, step: usize, lane: u64) -> f64 {
    to_unit(counter_u64(seed, vertex as u64, step as u64, lane))
}

/// Standard normal draw for component `component` at `(vertex, step)`.
///
/// Components `2i` and `2i+1` are the cosine and sine halves of one
/// Box-Muller pair, which are independent.
#[inline]
pub fn standard_normal(seed: Seed, vertex: usize, step: usize, component: usize) -> f64 {
    let pair = (component / 2) as u64;
    let u1 = to_unit(counter_u64(seed, vertex as u64, step as u64, 2 * pair + 1));
    let u2 = to_unit(counter_u64(seed, vertex as u64, step as u64, 2 * pair + 2));
    let r = (-2.0 * (1.0 - u1).ln()).sqrt();
    let angle = std::f64::consts::TAU * u2;
    if component % 2 == 0 {
        r * angle.cos()
    } else {
        r * angle.sin()
    }
}

/// Sequential generator for graph and tree construction.
pub fn seeded_rng(seed: Seed) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
