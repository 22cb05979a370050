use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::state::StateVector;
use crate::error::{check_dim, Error, Result};

/// Shape of the layered ansatz: `layers` repetitions of (RY on every qubit,
/// then CZ on every pair).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitSpec {
    n: usize,
    layers: usize,
}

impl CircuitSpec {
    pub fn new(n: usize, layers: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Size(format!(
                "circuit needs at least 2 qubits, got {n}"
            )));
        }
        if n > super::state::MAX_QUBITS {
            return Err(Error::Size(format!(
                "qubit count {n} exceeds simulator limit"
            )));
        }
        if layers == 0 {
            return Err(Error::Size("circuit needs at least one layer".into()));
        }
        Ok(Self { n, layers })
    }

    /// Single-qubit circuits have no CZ pairs; allowed for closed-form checks.
    pub fn single_qubit(layers: usize) -> Result<Self> {
        if layers == 0 {
            return Err(Error::Size("circuit needs at least one layer".into()));
        }
        Ok(Self { n: 1, layers })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn num_layers(&self) -> usize {
        self.layers
    }

    pub fn num_params(&self) -> usize {
        self.n * self.layers
    }

    /// CZ pairs `(a, b)`, `a < b`, in lexicographic order.
    pub fn cz_pairs(&self) -> impl DoubleEndedIterator<Item = (usize, usize)> + Clone + '_ {
        let n = self.n;
        (0..n).flat_map(move |a| (a + 1..n).map(move |b| (a, b)))
    }
}

/// Circuit angles, row-major by layer then qubit: angle `(ℓ, q)` sits at
/// index `ℓ·n + q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterVector {
    n: usize,
    layers: usize,
    angles: Vec<f64>,
}

impl ParameterVector {
    pub fn new(spec: &CircuitSpec, angles: Vec<f64>) -> Result<Self> {
        check_dim(spec.num_params(), angles.len())?;
        Ok(Self {
            n: spec.n,
            layers: spec.layers,
            angles,
        })
    }

    pub fn zeros(spec: &CircuitSpec) -> Self {
        Self {
            n: spec.n,
            layers: spec.layers,
            angles: vec![0.0; spec.num_params()],
        }
    }

    /// I.i.d. uniform angles on `[0, 2π)`.
    pub fn uniform_random(spec: &CircuitSpec, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let angles = (0..spec.num_params())
            .map(|_| rng.random::<f64>() * TAU)
            .collect();
        Self {
            n: spec.n,
            layers: spec.layers,
            angles,
        }
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn layer(&self, layer: usize) -> &[f64] {
        &self.angles[layer * self.n..(layer + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.angles
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.angles
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.angles
    }

    pub(crate) fn matches(&self, spec: &CircuitSpec) -> Result<()> {
        check_dim(spec.num_params(), self.angles.len())?;
        check_dim(spec.n, self.n)
    }
}

/// One ansatz layer: RY on qubits `0..n`, then CZ on all pairs.
pub fn apply_layer(state: &mut StateVector, layer_angles: &[f64]) -> Result<()> {
    check_dim(state.num_qubits(), layer_angles.len())?;
    layer_unchecked(state, layer_angles);
    Ok(())
}

fn layer_unchecked(state: &mut StateVector, layer_angles: &[f64]) {
    let n = layer_angles.len();
    for (q, &angle) in layer_angles.iter().enumerate() {
        state.ry_unchecked(q, angle);
    }
    for a in 0..n {
        for b in a + 1..n {
            state.cz_unchecked(a, b);
        }
    }
}

/// Undoes the CZ block of a layer (CZ is self-inverse).
pub(crate) fn entangler_unchecked(state: &mut StateVector, n: usize) {
    for a in 0..n {
        for b in a + 1..n {
            state.cz_unchecked(a, b);
        }
    }
}

/// `U_L(θ_L)···U_1(θ_1)|0⟩`.
pub fn prepare_state(spec: &CircuitSpec, theta: &[f64]) -> Result<StateVector> {
    check_dim(spec.num_params(), theta.len())?;
    let mut state = StateVector::zero(spec.n)?;
    for layer in theta.chunks_exact(spec.n) {
        layer_unchecked(&mut state, layer);
    }
    Ok(state)
}

/// Typed wrapper over [`prepare_state`].
pub fn prepare_circuit_state(spec: &CircuitSpec, theta: &ParameterVector) -> Result<StateVector> {
    theta.matches(spec)?;
    prepare_state(spec, theta.as_slice())
}
