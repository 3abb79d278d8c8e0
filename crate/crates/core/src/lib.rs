//! Covariant positive operator measures (POMs) at desk scale.
//!
//! The crate builds, evaluates and verifies POMs that are covariant under a
//! group action:
//!
//! * [`hilbert`]: dense operators, states, effects, POM containers, the
//!   probability rule and the POM axiom checks.
//! * [`abelian`]: finite abelian groups, the covariant POMs they admit, the
//!   Σ transform of the induced representation, and the torus examples
//!   (phase and phase-difference observables, translation-covariant
//!   localisation on a grid).
//! * [`phasespace`]: the Weyl system on a periodic grid and on `Z_d`,
//!   covariant phase-space observables `G_T`, their densities and margins.
//! * [`posmom`]: smeared position and momentum observables, limit of
//!   resolution, sharpness, state distinction power and the coexistence
//!   diagnostics (uncertainty and resolution products, noncommutativity).
//!
//! All Hilbert spaces are finite dimensional. Continuous systems are
//! represented on a uniform periodic [`grid::Grid1D`].

pub mod abelian;
pub mod error;
pub mod grid;
pub mod hilbert;
pub mod phasespace;
pub mod posmom;
pub mod quadrature;

pub use error::{Error, Result};
pub use grid::{Grid1D, WaveFunction};
pub use hilbert::{
    check_pom_axioms, commutator_norm, effect_is_regular, make_state, outcome_distribution, Cell,
    Effect, Operator, Outcome, Pom, PomReport, ProbVector, State,
};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

/// Tolerance for algebraically exact constructions (finite groups,
/// closed-form interval integrals).
pub const EXACT_TOL: f64 = 1e-10;
/// Tolerance for grid-discretised constructions.
pub const GRID_TOL: f64 = 1e-6;
