//! Shared fixtures for the criterion benchmarks.

use hilltongue::{CouplingSpec, OscillatorSpec};

/// Quadratic restoring force with linear coupling, the densest exact-series
/// workload in the suite.
pub fn quadratic_linear(order: usize) -> (OscillatorSpec, CouplingSpec) {
    let osc = OscillatorSpec::new([(2, hilltongue::rat(1, 1))], order).expect("static spec");
    let coupling = CouplingSpec::new([(1, hilltongue::rat(2, 1))], order).expect("static spec");
    (osc, coupling)
}
