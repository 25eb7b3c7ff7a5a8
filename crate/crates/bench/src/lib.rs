//! Shared fixtures for the benchmarks.

use gelkit::{degree_distribution, state_from_density, DegreeDistribution, FunctionalityDistribution};

/// Monofunctional terminators mixed with hexafunctional branch points.
pub fn terminated_hexa() -> FunctionalityDistribution {
    FunctionalityDistribution::new([(1, 24.0 / 25.0), (6, 1.0 / 25.0)]).expect("valid mixture")
}

pub fn trifunctional() -> FunctionalityDistribution {
    FunctionalityDistribution::monodisperse(3).expect("valid mixture")
}

/// A broad mixture with a large maximum functionality.
pub fn broad() -> FunctionalityDistribution {
    FunctionalityDistribution::new([(1, 0.2), (2, 0.3), (4, 0.3), (12, 0.2)]).expect("valid mixture")
}

pub fn at(f: &FunctionalityDistribution, c: f64) -> DegreeDistribution {
    degree_distribution(f, &state_from_density(f, c).expect("conversion in range"))
}
