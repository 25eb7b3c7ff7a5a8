//! Step-growth polymerisation random graph.
//!
//! Vertices carry a functionality `m`, the maximum number of bonds they can form,
//! drawn from a [`FunctionalityDistribution`]. Bonds form between free stubs at a
//! rate proportional to the number of free stubs. This crate computes, at any
//! point of the process:
//!
//! * the joint and marginal degree distribution and its moments ([`dist`]),
//! * whether and when a giant component appears ([`gelation`]),
//! * the size distribution of finite components, its large-size asymptote, the
//!   gel fraction and the expected component size ([`components`]),
//! * the same observables estimated by direct simulation ([`montecarlo`]).
//!
//! ```
//! use gelkit::{analyze_gelation, degree_distribution, size_distribution, state_from_density};
//! use gelkit::{FunctionalityDistribution, Method};
//!
//! let f: FunctionalityDistribution = "3:1".parse().unwrap();
//! assert_eq!(analyze_gelation(&f).c_gel, Some(0.5));
//!
//! let dd = degree_distribution(&f, &state_from_density(&f, 0.5).unwrap());
//! let w = size_distribution(&dd, 4, Method::SeriesInversion).unwrap();
//! assert!((w.w(2) - 3.0 / 32.0).abs() < 1e-15);
//! ```

pub mod components;
pub mod dist;
mod error;
pub mod gelation;
pub mod montecarlo;
pub mod numeric;
pub mod poly;

pub use components::{
    asymptote, component_stats, cross_check, fixed_point_r0, size_distribution, size_distribution_adaptive,
    size_distribution_monodisperse, size_distribution_with, AsymptoteCoefficients, ComponentStats, ExpectedSize,
    Method, SizeDistribution, SizeOptions,
};
pub use dist::{
    degree_distribution, gf_biased_eval, gf_eval, integrate_master_equation, moments_closed_form, moments_exact,
    partial_moments, state_from_density, state_from_time, ClosedFormMoments, DegreeDistribution,
    DistributionOptions, FunctionalityDistribution, GfPoint, MomentSet, SystemState,
};
pub use error::{Error, Result};
pub use gelation::{analyze_gelation, analyze_gelation_with_rate, flory_conversion, prevention_threshold, GelReport};
pub use montecarlo::{
    compare_sizes, empirical_degree_check, run_ensemble, simulate_run, Assignment, DegreeCheck, MCConfig,
    MCEnsembleResult, RunResult, SizeComparison,
};
