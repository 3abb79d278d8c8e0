//! Covariant phase-space observables: the Weyl system on a periodic grid and
//! the finite Weyl–Heisenberg system on `Z_d`.

pub mod density;
pub mod effect;
pub mod finite_weyl;
pub mod margins;
pub mod states;
pub mod weyl;

pub use density::{phase_space_density, CellGrid, PhaseSpaceDensity};
pub use effect::{cell_probability, phase_space_effect, EffectOptions, PhaseSpaceCell};
pub use finite_weyl::{finite_weyl_pom, verify_weyl_covariance, weyl_group, weyl_operator};
pub use margins::margins_of_gt;
pub use states::{gaussian, ground_state, hermite_functions, random_state};
pub use weyl::{snap, weyl_apply, weyl_apply_spectral, Snap};
