//! Finite abelian groups and the POMs covariant under them.
//!
//! Groups are products of cyclic groups; the dual group is identified with
//! the same moduli. A representation diagonal in the dual basis, a subgroup
//! `H` and a family of isometries determine a covariant POM on `G/H`. The Σ
//! transform relates the induced representation to its realisation on the
//! dual group.

mod covariant;
mod group;
mod sigma;
pub mod torus;
pub mod translation;

pub use covariant::{
    build_covariant_pom, build_covariant_pom_with, coset_action, covariance_densities, covariance_densities_rescaled,
    identity_intertwiners, random_isometry, random_unitary, verify_covariance, verify_pom_equivalence, BasisLabel,
    BlockSpec, CovarianceReport, Densities, DiagonalRep, EquivalenceReport, Intertwiners, IsometryBlock,
    IsometryFamily, RepSpec,
};
pub use group::{annihilator, quotient_cotransform, Cosets, FiniteAbelianGroup, Subgroup};
pub use sigma::{translated_pvm_apply, translated_pvm_matrix, SigmaSpace};
pub use torus::{phase_difference_effect, phase_observable_effect, sharp_phase_witness};
pub use translation::translation_covariant_effect;
