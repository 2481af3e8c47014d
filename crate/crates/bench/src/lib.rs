//! Shared fixtures for the benchmarks under `benches/`.

use gaplab::{generate, subtour, Instance, InstanceSpec};

/// Euclidean `G(n, d)`.
pub fn instance(n: usize, d: f64) -> Instance {
    generate(InstanceSpec::euclidean(n, d)).expect("valid benchmark parameters")
}

/// Support weights of the half-integral LP point of `G(n, d)`, a dense input
/// for the minimum-cut routine.
pub fn half_integral_weights(n: usize, d: f64) -> Vec<Vec<f64>> {
    subtour::build_half_integral(&instance(n, d)).expect("n >= 3").weight_matrix()
}
