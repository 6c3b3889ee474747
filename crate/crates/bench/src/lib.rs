//! Shared fixtures for the benchmarks.

use cardwave::{build_system, SplineOrder, WaveletSystem};

pub fn order(m: u32) -> SplineOrder {
    SplineOrder::new(m).expect("valid order")
}

/// System at the default tail tolerance.
pub fn system(m: u32) -> WaveletSystem {
    build_system(order(m), 1e-12).expect("system builds")
}
