//! Preferred state `ρ_P(t)`, moving eigenbases and their convergence.
//!
//! A density matrix whose entries are pole catalogues loses its
//! p-irrelevant modes entrywise to give `ρ_P`. After the decoherence time
//! the eigenbasis of `ρ_P` tracks that of `ρ_R` to within the dropped
//! envelope over the eigenvalue gap.

mod basis;
mod density;
mod scenarios;

pub use basis::{
    convergence_profile, largest_principal_angle, moving_eigenbasis, BasisDistance, MovingBasis, GAP_TOL,
};
pub use density::{catalogue_convergence, derivative_check, CatalogueEntry, CatalogueMatrix, DerivativeCheck};
pub use scenarios::{
    bifriedrich_run, fock_state_scenario, omnes_collective_matrix, omnes_collective_report, BiFriedrichModel,
    BiFriedrichRun, FockScenario, Observable, Verdict, VerdictRow,
};
