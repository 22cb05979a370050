//! Pauli-sum Hamiltonians (Ising chain and SYK), matrix-free application,
//! exact spectra and the `Tr(H²)` scaling fit.

mod ising;
mod pauli;
mod spectrum;
mod syk;

pub use ising::build_ising;
pub(crate) use pauli::energy_of;
pub use pauli::{
    apply_hamiltonian, expectation, trace_h_squared, Pauli, PauliString, PauliSum, PauliTerm,
    MAX_DENSE_QUBITS,
};
pub use spectrum::{
    exact_spectrum, fit_trace_scaling, ground_space_fidelity, SpectrumInfo, DEFAULT_DEGENERACY_TOL,
};
pub use syk::{
    majorana_string, majorana_strings, sample_syk, sample_syk_with, syk_coupling_variance,
    MajoranaEncoding, SykCouplings,
};
