//! Discrete-velocity kinetic solver and verification harness for binary
//! gas mixtures with BGK relaxation.
//!
//! Two closure variants are implemented:
//!
//! - a **two-relaxation-term** model, with separate intra- and interspecies
//!   collision operators relaxing towards `M_k` and `M_kj`;
//! - a **single-relaxation-term** model, with one operator per species
//!   relaxing towards a mixture Maxwellian `M^(k)`.
//!
//! On top of the time integrator ([`solver`]) the crate carries an executable
//! inequality suite for the weighted sup-norm / moment estimates that drive
//! the well-posedness theory ([`estimates`]), and the bridge between the
//! kinetic exchange terms and the six-field two-fluid relaxation system
//! ([`macroscopic`]).
//!
//! Space is one-dimensional and periodic; velocity space is a truncated
//! uniform Cartesian lattice in `d ∈ {1,2,3}` dimensions ([`grid`]).

pub mod error;
pub mod estimates;
pub mod grid;
pub mod macroscopic;
pub mod mixture;
pub mod moments;
pub mod solver;
pub mod vecn;

pub use error::KineticError;
pub use grid::{GridConfig, PhaseGrid};
pub use mixture::{MixtureParameters, ModelVariant};
pub use moments::{DistributionField, SpeciesMoments};
pub use solver::{SimulationSpec, SolverState};
