use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};
use crate::hamiltonian::{energy_of, PauliSum};
use crate::simcore::{
    entangler_unchecked, prepare_state, CircuitSpec, ParameterVector, StateVector,
};

/// `∂E/∂θ`, indexed like [`ParameterVector`].
pub type GradientVector = Vec<f64>;

/// Below this distance the Euclidean loss is treated as sitting on its cusp.
const CUSP_TOL: f64 = 1e-14;

fn check_inputs(spec: &CircuitSpec, h: &PauliSum, theta: &[f64]) -> Result<()> {
    check_dim(spec.num_params(), theta.len())?;
    check_dim(spec.num_qubits(), h.num_qubits())
}

/// Mean energy `E(θ) = ⟨ψ(θ)|H|ψ(θ)⟩`.
pub fn energy(spec: &CircuitSpec, h: &PauliSum, theta: &[f64]) -> Result<f64> {
    check_inputs(spec, h, theta)?;
    let psi = prepare_state(spec, theta)?;
    Ok(energy_of(h, psi.amplitudes()))
}

/// Reverse sweep for any loss whose first variation is `2·Re⟨χ|δψ⟩`.
///
/// `state` is the circuit output `ψ(θ)` and `cotangent` is `χ` at the output.
/// Both are peeled back one layer at a time; within a layer every RY angle
/// shares the same pair because the rotations act on distinct qubits.
fn reverse_sweep(
    spec: &CircuitSpec,
    theta: &[f64],
    mut state: StateVector,
    cotangent: Vec<Complex64>,
) -> Result<Vec<f64>> {
    let n = spec.num_qubits();
    let mut chi = StateVector::from_amplitudes(cotangent)?;
    let mut grad = vec![0.0; theta.len()];
    for (layer, angles) in theta.chunks_exact(n).enumerate().rev() {
        entangler_unchecked(&mut state, n);
        entangler_unchecked(&mut chi, n);
        for (q, &angle) in angles.iter().enumerate() {
            grad[layer * n + q] = 2.0 * state.generator_overlap(chi.amplitudes(), q).re;
            state.ry_unchecked(q, -angle);
            chi.ry_unchecked(q, -angle);
        }
    }
    Ok(grad)
}

/// Energy and its full gradient from one forward and one backward pass.
pub fn energy_and_gradient(
    spec: &CircuitSpec,
    h: &PauliSum,
    theta: &[f64],
) -> Result<(f64, GradientVector)> {
    check_inputs(spec, h, theta)?;
    let psi = prepare_state(spec, theta)?;
    let mut h_psi = vec![Complex64::new(0.0, 0.0); psi.dim()];
    h.apply_into(psi.amplitudes(), &mut h_psi);
    let e: Complex64 = psi
        .amplitudes()
        .iter()
        .zip(&h_psi)
        .map(|(a, b)| a.conj() * b)
        .sum();
    let grad = reverse_sweep(spec, theta, psi, h_psi)?;
    Ok((e.re, grad))
}

/// Adjoint-differentiated energy gradient.
pub fn energy_gradient(
    spec: &CircuitSpec,
    h: &PauliSum,
    theta: &ParameterVector,
) -> Result<GradientVector> {
    energy_and_gradient(spec, h, theta.as_slice()).map(|(_, g)| g)
}

/// Parameter-shift derivative `[E(θ + π/2·e_k) − E(θ − π/2·e_k)]/2`.
///
/// Exact for RY angles; kept as the independent check on [`energy_gradient`].
pub fn energy_gradient_shift(
    spec: &CircuitSpec,
    h: &PauliSum,
    theta: &[f64],
    k: usize,
) -> Result<f64> {
    check_inputs(spec, h, theta)?;
    if k >= theta.len() {
        return Err(Error::Index {
            index: k,
            limit: theta.len(),
        });
    }
    let mut shifted = theta.to_vec();
    shifted[k] = theta[k] + FRAC_PI_2;
    let plus = energy(spec, h, &shifted)?;
    shifted[k] = theta[k] - FRAC_PI_2;
    let minus = energy(spec, h, &shifted)?;
    Ok(0.5 * (plus - minus))
}

/// Euclidean loss `D(θ) = ‖ψ(θ) − φ‖` and its gradient
/// `∂_k D = −Re⟨φ|∂_kψ⟩/D`. The gradient is zero on the cusp `D = 0`.
pub fn euclidean_loss_and_gradient(
    spec: &CircuitSpec,
    theta: &[f64],
    target: &StateVector,
) -> Result<(f64, GradientVector)> {
    check_dim(spec.num_params(), theta.len())?;
    check_dim(spec.num_qubits(), target.num_qubits())?;
    let psi = prepare_state(spec, theta)?;
    let d = psi.euclidean_distance(target)?;
    if d <= CUSP_TOL {
        return Ok((d, vec![0.0; theta.len()]));
    }
    let scale = -0.5 / d;
    let cotangent = target.amplitudes().iter().map(|a| a * scale).collect();
    let grad = reverse_sweep(spec, theta, psi, cotangent)?;
    Ok((d, grad))
}
