//! Smeared position and momentum observables on the line: their effects and
//! statistics, limit of resolution, sharpness, state distinction power, and
//! coexistence diagnostics for pairs arising as margins of a phase-space
//! observable.

pub mod coexistence;
pub mod distinction;
pub mod measure;
pub mod resolution;
pub mod smeared;

pub use coexistence::{
    noncommutativity_witness, resolution_product, sharpness_test, uncertainty_product, IntervalPair,
    ResolutionProduct, SharpnessReport, UncertaintyReport, WitnessReport, RESOLUTION_BOUND,
};
pub use distinction::{distinction_compare, fejer_measure, transform_on, Distinction, DistinctionReport};
pub use measure::{Density, ProbMeasure1D};
pub use resolution::{
    alpha_regular, regular_decomposition, resolution_limit, window_max, RegularDecomposition, ResolutionReport,
};
pub use smeared::{distribution, smeared_effect, validate_intervals, Kind, SmearedEffect, SmearedObservable};
