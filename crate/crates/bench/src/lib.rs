//! Fixtures shared by the criterion benchmarks.

use bandprufer_core::{Background, JacobiPeriod, PeriodicPotential, Perturbation};

/// `V0(x) = 2 cos(2 pi x)` sampled on 64 cells.
pub fn mathieu() -> PeriodicPotential {
    PeriodicPotential::cosine(2.0, 64).expect("valid cosine potential")
}

/// Period-3 Jacobi matrix with distinct couplings.
pub fn jacobi3() -> JacobiPeriod {
    JacobiPeriod::new(vec![1.0, 0.8, 1.2], vec![0.3, -0.4, 0.1]).expect("valid period")
}

/// Resonant perturbation for the free line at `E = 1`.
pub fn free_wvn(x_max: f64) -> Perturbation {
    let bg = Background::Continuum(PeriodicPotential::free());
    bandprufer_core::wvn_construct(&bg, 1.0, 2.0, x_max).expect("in-band target")
}
