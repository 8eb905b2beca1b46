//! Shared fixtures for the criterion benchmarks in benches/core.rs.

use lure_core::linalg::RVec;
use lure_core::{
    build_oscillator, multiplier_supply, LtiSystem, OscillatorParams, SupplyRate,
};

/// Theorem-1 reference oscillator (m = 1, sigma = 1, r = 0.6) with its
/// rate-shifted loop and the matching multiplier supply rate.
pub fn t1_fixture(d: usize) -> (OscillatorParams, LtiSystem, SupplyRate) {
    let params = OscillatorParams::new(d, 1.0, f64::INFINITY, 1.0, 0.0, 0.6)
        .expect("valid reference parameters");
    let (sys, _) = build_oscillator(&params).expect("oscillator builds");
    let supply =
        multiplier_supply(&sys, params.r, 1.5, 0.0, 0.0, 1.0).expect("valid multipliers");
    (params, sys, supply)
}

/// Deterministic pseudo-random state-space system (no RNG dependency):
/// a stable A with mixing off-diagonal entries, dense B and C.
pub fn dense_system(n: usize, k: usize) -> LtiSystem {
    let wave = |i: usize, j: usize, phase: f64| ((3 * i + 7 * j) as f64 * 0.37 + phase).sin();
    let a = lure_core::RMat::from_fn(n, n, |i, j| {
        let base = wave(i, j, 0.0);
        if i == j {
            -2.0 - 0.1 * i as f64
        } else {
            0.5 * base
        }
    });
    let b = lure_core::RMat::from_fn(n, k, |i, j| wave(i, j, 1.3));
    let c = lure_core::RMat::from_fn(k, n, |i, j| wave(i, j, 2.6));
    LtiSystem::from_real_abc(&a, &b, &c).expect("dense system builds")
}

/// Unit-norm initial condition with deterministic entries.
pub fn unit_state(dim: usize) -> RVec {
    let v = RVec::from_fn(dim, |i, _| ((i as f64) * 0.71 + 0.2).cos());
    let n = v.norm();
    v / n
}
