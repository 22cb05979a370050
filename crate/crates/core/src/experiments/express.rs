use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::seeds::{derive_seed, Stream};
use crate::diff::euclidean_loss_and_gradient;
use crate::error::{check_dim, Error, Result};
use crate::optim::{minimize, AdamConfig};
use crate::simcore::{CircuitSpec, ParameterVector, StateVector};

/// Distribution the random targets are drawn from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetEnsemble {
    /// Orthogonally invariant real unit vectors: the reachable set of the
    /// real-valued RY/CZ circuit.
    #[default]
    Real,
    /// Unitarily invariant (Haar) complex unit vectors.
    Haar,
}

impl TargetEnsemble {
    pub fn sample(self, n: usize, seed: u64) -> Result<StateVector> {
        match self {
            TargetEnsemble::Real => StateVector::real_random(n, seed),
            TargetEnsemble::Haar => StateVector::haar_random(n, seed),
        }
    }
}

/// Function handed to the optimizer. Both have the same minimizer; the
/// recorded value is always the distance `‖ψ(θ) − φ‖`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceObjective {
    /// `‖ψ − φ‖`. Its gradient keeps unit scale near the optimum, so Adam
    /// hovers at a distance of order `α/10`.
    Distance,
    /// `‖ψ − φ‖²`, smooth at the optimum.
    #[default]
    SquaredDistance,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpressOptions {
    pub ensemble: TargetEnsemble,
    pub objective: DistanceObjective,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpressibilityResult {
    pub n: usize,
    pub layers: usize,
    pub m: usize,
    pub options: ExpressOptions,
    pub per_target_min_distance: Vec<f64>,
    pub epsilon_m: f64,
    /// `ε_m / 2^n`.
    pub normalized: f64,
}

/// Minimizes the distance to each target and keeps the smallest distance
/// seen along each trajectory. Target `i` starts from
/// `θ₀ = U(0, 2π)^{nL}` seeded by `derive_seed(master, Init, i)`.
pub fn expressibility_for_targets(
    spec: &CircuitSpec,
    targets: &[StateVector],
    adam: &AdamConfig,
    master_seed: u64,
    objective: DistanceObjective,
) -> Result<Vec<f64>> {
    adam.validate()?;
    for t in targets {
        check_dim(spec.num_qubits(), t.num_qubits())?;
    }
    targets
        .par_iter()
        .enumerate()
        .map(|(i, target)| {
            let theta0 = ParameterVector::uniform_random(
                spec,
                derive_seed(master_seed, Stream::Init, i as u64),
            );
            let traj = minimize(
                |theta: &[f64]| {
                    let (d, grad) = euclidean_loss_and_gradient(spec, theta, target)?;
                    Ok(match objective {
                        DistanceObjective::Distance => (d, grad),
                        DistanceObjective::SquaredDistance => {
                            (d * d, grad.into_iter().map(|g| 2.0 * d * g).collect())
                        }
                    })
                },
                theta0.as_slice(),
                adam,
                adam.steps.max(1),
            )?;
            Ok(match objective {
                DistanceObjective::Distance => traj.loss_best,
                DistanceObjective::SquaredDistance => traj.loss_best.sqrt(),
            })
        })
        .collect()
}

/// `ε_m = (1/m)·Σᵢ minθ ‖ψ(θ) − φᵢ‖` over `m` random targets.
pub fn run_expressibility(
    n: usize,
    layers: usize,
    m: usize,
    adam: &AdamConfig,
    master_seed: u64,
    options: ExpressOptions,
) -> Result<ExpressibilityResult> {
    if m == 0 {
        return Err(Error::Config("need at least one target".into()));
    }
    let spec = CircuitSpec::new(n, layers)?;
    let targets = (0..m)
        .map(|i| {
            options
                .ensemble
                .sample(n, derive_seed(master_seed, Stream::Target, i as u64))
        })
        .collect::<Result<Vec<_>>>()?;
    let per_target_min_distance =
        expressibility_for_targets(&spec, &targets, adam, master_seed, options.objective)?;
    let epsilon_m = per_target_min_distance.iter().sum::<f64>() / m as f64;
    Ok(ExpressibilityResult {
        n,
        layers,
        m,
        options,
        per_target_min_distance,
        epsilon_m,
        normalized: epsilon_m / (1u64 << n) as f64,
    })
}
