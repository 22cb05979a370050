use rayon::prelude::*;

use super::model::Model;
use super::seeds::{derive_seed, Stream};
use crate::diff::energy_and_gradient;
use crate::error::{Error, Result};
use crate::hamiltonian::{
    exact_spectrum, ground_space_fidelity, PauliSum, SpectrumInfo, DEFAULT_DEGENERACY_TOL,
};
use crate::optim::{minimize_observed, AdamConfig, Trajectory};
use crate::simcore::{prepare_state, CircuitSpec, ParameterVector};

/// Relative precision `|E(θ*) − E₀| ≤ 10⁻⁵·ΔE` that counts as solved.
pub const ERROR_BOUND_REL: f64 = 1e-5;

/// A Hamiltonian paired with its circuit shape and exact spectrum.
#[derive(Clone, Debug)]
pub struct VqeProblem {
    pub model: Model,
    pub spec: CircuitSpec,
    pub hamiltonian: PauliSum,
    pub spectrum: SpectrumInfo,
}

impl VqeProblem {
    pub fn new(model: Model, n: usize, layers: usize) -> Result<Self> {
        let spec = CircuitSpec::new(n, layers)?;
        let hamiltonian = model.hamiltonian(n)?;
        let spectrum = exact_spectrum(&hamiltonian, DEFAULT_DEGENERACY_TOL)?;
        Ok(Self {
            model,
            spec,
            hamiltonian,
            spectrum,
        })
    }

    /// Same Hamiltonian and spectrum, different depth.
    pub fn with_layers(&self, layers: usize) -> Result<Self> {
        Ok(Self {
            spec: CircuitSpec::new(self.spec.num_qubits(), layers)?,
            ..self.clone()
        })
    }

    pub fn ground_energy(&self) -> f64 {
        self.spectrum.ground_energy
    }

    pub fn bandwidth(&self) -> f64 {
        self.spectrum.bandwidth
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VqeOptions {
    /// Ground-space fidelity is evaluated every this many steps (and at `τ*`).
    pub fidelity_stride: usize,
    pub snapshot_stride: usize,
}

impl Default for VqeOptions {
    fn default() -> Self {
        Self {
            fidelity_stride: 5,
            snapshot_stride: 10,
        }
    }
}

#[derive(Clone, Debug)]
pub struct VqeRunRecord {
    pub model: Model,
    pub n: usize,
    pub layers: usize,
    pub seed: u64,
    pub ground_energy: f64,
    pub bandwidth: f64,
    pub trajectory: Trajectory,
    /// `E(θ*) − E₀`.
    pub final_error: f64,
    /// `(τ, Σ|⟨ψ(θ_τ)|φᵢ⟩|²)`, ascending in `τ`.
    pub fidelity_series: Vec<(usize, f64)>,
    pub error_bound_met: bool,
}

impl VqeRunRecord {
    pub fn fidelity_at(&self, tau: usize) -> Option<f64> {
        self.fidelity_series
            .binary_search_by_key(&tau, |&(t, _)| t)
            .ok()
            .map(|i| self.fidelity_series[i].1)
    }

    pub fn best_fidelity(&self) -> f64 {
        self.fidelity_at(self.trajectory.tau_best)
            .unwrap_or(f64::NAN)
    }
}

/// One VQE run from `θ₀ ~ U(0, 2π)^{nL}` drawn with `seed`.
pub fn run_vqe(
    problem: &VqeProblem,
    adam: &AdamConfig,
    seed: u64,
    options: VqeOptions,
) -> Result<VqeRunRecord> {
    let spec = problem.spec;
    let h = &problem.hamiltonian;
    let spectrum = &problem.spectrum;
    let theta0 = ParameterVector::uniform_random(&spec, seed);
    let stride = options.fidelity_stride.max(1);
    let mut fidelity_series = Vec::new();

    let trajectory = minimize_observed(
        |theta: &[f64]| energy_and_gradient(&spec, h, theta),
        theta0.as_slice(),
        adam,
        options.snapshot_stride,
        |tau, theta| {
            if tau % stride == 0 {
                let psi = prepare_state(&spec, theta)?;
                fidelity_series.push((tau, ground_space_fidelity(&psi, spectrum)?));
            }
            Ok(())
        },
    )?;

    if trajectory.tau_best % stride != 0 {
        let psi = prepare_state(&spec, &trajectory.theta_best)?;
        let f = ground_space_fidelity(&psi, spectrum)?;
        let pos = fidelity_series.partition_point(|&(t, _)| t < trajectory.tau_best);
        fidelity_series.insert(pos, (trajectory.tau_best, f));
    }

    let final_error = trajectory.loss_best - spectrum.ground_energy;
    Ok(VqeRunRecord {
        model: problem.model,
        n: spec.num_qubits(),
        layers: spec.num_layers(),
        seed,
        ground_energy: spectrum.ground_energy,
        bandwidth: spectrum.bandwidth,
        error_bound_met: final_error.abs() <= ERROR_BOUND_REL * spectrum.bandwidth,
        final_error,
        fidelity_series,
        trajectory,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnsembleOptions {
    pub vqe: VqeOptions,
    /// Draw a new SYK instance per run instead of sharing one across the ensemble.
    pub fresh_disorder: bool,
}

#[derive(Debug)]
pub struct EnsembleEntry {
    pub run_id: usize,
    pub seed: u64,
    pub outcome: Result<VqeRunRecord>,
}

/// `runs` independent VQE runs, seeded `derive_seed(master, Init, run_id)`.
///
/// Runs execute in parallel; the output is ordered by run index and a failed
/// run is reported in its entry without aborting the others.
pub fn run_vqe_ensemble(
    problem: &VqeProblem,
    runs: usize,
    adam: &AdamConfig,
    master_seed: u64,
    options: EnsembleOptions,
) -> Result<Vec<EnsembleEntry>> {
    if runs == 0 {
        return Err(Error::Config("ensemble needs at least one run".into()));
    }
    adam.validate()?;
    Ok((0..runs)
        .into_par_iter()
        .map(|run_id| {
            let seed = derive_seed(master_seed, Stream::Init, run_id as u64);
            let outcome = match (options.fresh_disorder, problem.model) {
                (true, Model::Syk { encoding, .. }) => {
                    let disorder = derive_seed(master_seed, Stream::Disorder, run_id as u64);
                    VqeProblem::new(
                        Model::Syk {
                            seed: disorder,
                            encoding,
                        },
                        problem.spec.num_qubits(),
                        problem.spec.num_layers(),
                    )
                    .and_then(|p| run_vqe(&p, adam, seed, options.vqe))
                }
                _ => run_vqe(problem, adam, seed, options.vqe),
            };
            EnsembleEntry {
                run_id,
                seed,
                outcome,
            }
        })
        .collect())
}
