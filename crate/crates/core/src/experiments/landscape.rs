use super::vqe::{VqeProblem, VqeRunRecord};
use crate::diff::{
    basin_inverse_volume, hessian, projected_distance, top_k_eigensystem, HessianMatrix,
    SteepSubspace,
};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectionPoint {
    pub tau: usize,
    pub projected_distance: f64,
    /// `E(θ_τ) − E₀`.
    pub error: f64,
}

#[derive(Clone, Debug)]
pub struct LandscapeAnalysis {
    pub hessian: HessianMatrix,
    pub subspace: SteepSubspace,
    /// `‖H·v − λ·v‖` for each returned eigenpair.
    pub residuals: Vec<f64>,
    pub series: Vec<ProjectionPoint>,
    /// `Σ log λᵢ`; absent when some top-k eigenvalue is not positive.
    pub inverse_volume: Option<f64>,
}

/// Hessian at `θ*`, its top-`k` subspace (clipped to `nL`), and the projected
/// distance to `θ*` of every snapshot in the run.
pub fn run_trajectory_analysis(
    record: &VqeRunRecord,
    problem: &VqeProblem,
    k: usize,
) -> Result<LandscapeAnalysis> {
    let traj = &record.trajectory;
    if traj.theta_snapshots.is_empty() {
        return Err(Error::Config("run has no parameter snapshots".into()));
    }
    let hess = hessian(&problem.spec, &problem.hamiltonian, &traj.theta_best)?;
    let k = k.clamp(1, hess.dim());
    let subspace = top_k_eigensystem(&hess, k)?;
    let residuals = subspace
        .eigenvalues
        .iter()
        .zip(&subspace.eigenvectors)
        .map(|(&l, v)| {
            let v = nalgebra::DVector::from_column_slice(v);
            (&hess.0 * &v - v * l).norm()
        })
        .collect();
    let series = traj
        .theta_snapshots
        .iter()
        .map(|(&tau, theta)| {
            Ok(ProjectionPoint {
                tau,
                projected_distance: projected_distance(theta, &traj.theta_best, &subspace)?,
                error: traj.steps[tau].loss - record.ground_energy,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let inverse_volume = basin_inverse_volume(&subspace).ok();
    Ok(LandscapeAnalysis {
        hessian: hess,
        subspace,
        residuals,
        series,
        inverse_volume,
    })
}
