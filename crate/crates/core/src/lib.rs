//! Pole-catalogue models of decoherence.
//!
//! Expectation values of relevant observables are written as an equilibrium
//! value plus a sum of decaying modes, one per resonance pole `z = ω − iγ/2`,
//! optionally followed by a slow power-law (Khalfin) tail. From such a
//! catalogue this crate derives relaxation and decoherence times, the
//! preferred state built from the slow ("p-relevant") poles only, and the
//! moving eigenbasis of that state. The Lee-Friedrich oscillator model with
//! quasi-coherent initial conditions is worked out end to end in [`omnes`].
//!
//! The crate is `no_std` and only needs `alloc`. File formats and the
//! command-line front end live in the `decopoles` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod friedrich;
pub mod numerics;
pub mod omnes;
pub mod pole_models;
pub mod preferred_basis;

pub use error::{Error, Result};
pub use numerics::Complex;
