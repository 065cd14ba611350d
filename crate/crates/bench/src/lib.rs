//! Shared fixtures for the benchmark targets.

use sepqkd_core::protocol::{Displacement, Link, ProtocolParams, ResolvedParams, Variant};

/// The anchor operating point used across the benchmarks:
/// `e^{2 tau} = 10`, displacement at the separability bound, 50 km of fiber.
pub fn anchor_params(variant: Variant) -> ResolvedParams {
    ProtocolParams {
        tau: 10f64.ln() / 2.0,
        x: Displacement::Bound,
        link: Link::DistanceKm(50.0),
        n0: 1.0,
        xi: 0.95,
        phi: 10.0,
        variant,
        ..ProtocolParams::default()
    }
    .resolve()
    .expect("anchor parameters are valid")
}
