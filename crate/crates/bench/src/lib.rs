//! Shared fixtures for the criterion benches.

use fraclie::cantor::{FractalSet, Normalization, Staircase};

pub const CANTOR_DIM: f64 = std::f64::consts::LN_2 / 1.098_612_288_668_109_8;

pub fn cantor_staircase(depth: u32) -> Staircase {
    Staircase::new(
        &FractalSet::middle_third(depth),
        CANTOR_DIM,
        0.0,
        Normalization::Unit,
    )
    .expect("valid middle-third staircase")
}
