//! Classical simulation of layered RY/CZ variational circuits.
//!
//! The crate covers the statevector simulator ([`simcore`]), Ising and SYK
//! Hamiltonians ([`hamiltonian`]), exact gradients and Hessians ([`diff`]),
//! Adam ([`optim`]) and the experiment drivers built on top of them
//! ([`experiments`]).

pub mod diff;
mod error;
pub mod experiments;
pub mod hamiltonian;
pub mod optim;
pub mod simcore;
pub mod stats;

pub use error::{Error, Result};

pub use diff::{energy, energy_and_gradient, energy_gradient, GradientVector};
pub use hamiltonian::{PauliSum, SpectrumInfo, SykCouplings};
pub use optim::{AdamConfig, Schedule, Trajectory};
pub use simcore::{CircuitSpec, ParameterVector, StateVector};
