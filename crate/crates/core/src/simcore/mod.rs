//! Matrix-free statevector simulation of the layered RY/CZ ansatz.

mod circuit;
mod state;

pub(crate) use circuit::entangler_unchecked;
pub use circuit::{
    apply_layer, prepare_circuit_state, prepare_state, CircuitSpec, ParameterVector,
};
pub use state::{StateVector, MAX_QUBITS};
