//! Coherence and discord measures defined as the quantum Fisher information
//! of a state under dephasing channels.
//!
//! - [`qstate`]: density matrices, unitaries, bipartite states, seeded
//!   random ensembles.
//! - [`channels`]: dephasing, strictly incoherent operations, ECPO
//!   constructors, Choi matrices.
//! - [`coherence`]: `C_p(ρ)` by spectral sum, closed forms, divergence and
//!   a fidelity finite-difference oracle.
//! - [`discord`]: `D_p^A(ρ_AB)`, the minimum over local dephasing bases.
//! - [`estimation`]: Monte-Carlo maximum-likelihood estimation of `p`.
//! - [`io`]: JSON state and channel files.
//! - [`verify`]: randomized property batteries.

pub mod channels;
pub mod cli;
pub mod coherence;
pub mod discord;
pub mod error;
pub mod estimation;
pub mod io;
pub mod linalg;
pub mod qstate;
pub mod verify;

pub use error::{Error, Result};
