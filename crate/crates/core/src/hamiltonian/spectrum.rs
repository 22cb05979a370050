use num_complex::Complex64;

use super::pauli::PauliSum;
use crate::error::{check_dim, Error, Result};
use crate::simcore::StateVector;
use crate::stats::linear_fit;

/// Default relative window for grouping eigenvalues into the ground space.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;

/// Full spectrum of a Hamiltonian plus an orthonormal basis of its ground space.
#[derive(Clone, Debug)]
pub struct SpectrumInfo {
    pub eigenvalues: Vec<f64>,
    pub ground_energy: f64,
    pub bandwidth: f64,
    pub ground_space: Vec<StateVector>,
    pub degeneracy: usize,
}

/// Dense Hermitian diagonalization (`n ≤ 12`).
///
/// Eigenvalues within `degeneracy_tol·max(1, ΔE)` of the lowest one count as
/// ground states.
pub fn exact_spectrum(h: &PauliSum, degeneracy_tol: f64) -> Result<SpectrumInfo> {
    let dense = h.to_dense()?;
    let eig = dense.symmetric_eigen();
    let dim = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let ground_energy = eigenvalues[0];
    let bandwidth = eigenvalues[dim - 1] - ground_energy;
    let window = degeneracy_tol * bandwidth.max(1.0);

    let mut ground_space: Vec<Vec<Complex64>> = Vec::new();
    for &i in order
        .iter()
        .take_while(|&&i| eig.eigenvalues[i] - ground_energy <= window)
    {
        let mut v: Vec<Complex64> = eig.eigenvectors.column(i).iter().copied().collect();
        // Gram–Schmidt against the vectors already kept.
        for u in &ground_space {
            let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            v.iter_mut().zip(u).for_each(|(b, a)| *b -= proj * a);
        }
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return Err(Error::Consistency(
                "ground-space vectors are linearly dependent".into(),
            ));
        }
        v.iter_mut().for_each(|a| *a /= norm);
        ground_space.push(v);
    }
    let degeneracy = ground_space.len();
    let ground_space = ground_space
        .into_iter()
        .map(StateVector::from_amplitudes)
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumInfo {
        eigenvalues,
        ground_energy,
        bandwidth,
        ground_space,
        degeneracy,
    })
}

/// `Σᵢ |⟨ψ|φᵢ⟩|²` over the ground-space basis.
pub fn ground_space_fidelity(state: &StateVector, spectrum: &SpectrumInfo) -> Result<f64> {
    let mut total = 0.0;
    for phi in &spectrum.ground_space {
        check_dim(phi.dim(), state.dim())?;
        total += state.inner(phi)?.norm_sqr();
    }
    Ok(total)
}

/// Fits `Tr(H²) = a·n^b·2^n` by least squares on `log(Tr(H²)/2^n)` versus `log n`.
pub fn fit_trace_scaling(points: &[(usize, f64)]) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return Err(Error::Fit(format!(
            "need at least two points, got {}",
            points.len()
        )));
    }
    if let Some(&(n, t)) = points.iter().find(|&&(n, t)| n == 0 || t <= 0.0) {
        return Err(Error::Fit(format!("point ({n}, {t}) is not positive")));
    }
    let xs: Vec<f64> = points.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = points
        .iter()
        .map(|&(n, t)| t.ln() - (n as f64) * std::f64::consts::LN_2)
        .collect();
    let (log_a, b) = linear_fit(&xs, &ys)?;
    Ok((log_a.exp(), b))
}
