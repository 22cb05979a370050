use rayon::prelude::*;
use serde::Serialize;

use super::seeds::{derive_seed, Stream};
use crate::diff::energy_and_gradient;
use crate::error::{check_dim, Error, Result};
use crate::hamiltonian::PauliSum;
use crate::simcore::{CircuitSpec, ParameterVector};
use crate::stats::{linear_fit, mean, quantile, sample_variance};

/// Statistics of random initial gradients at one `(n, L)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradientStats {
    pub n: usize,
    pub layers: usize,
    pub samples: usize,
    pub per_component_variance: Vec<f64>,
    pub variance_mean: f64,
    pub variance_min: f64,
    pub variance_max: f64,
    pub norm_mean: f64,
    pub norm_q1: f64,
    pub norm_q3: f64,
    /// `4·Tr(H²)/2^{2n}`.
    pub bound: f64,
    /// Components whose variance exceeds `bound·(1 + 5/√S)`.
    pub bound_violations: Vec<usize>,
}

impl GradientStats {
    pub fn sampling_slack(&self) -> f64 {
        1.0 + 5.0 / (self.samples as f64).sqrt()
    }
}

/// Samples `samples` parameter vectors uniformly on `[0, 2π)^{nL}` and
/// summarizes their energy gradients.
pub fn run_barren_plateau(
    h: &PauliSum,
    n: usize,
    layers: usize,
    samples: usize,
    master_seed: u64,
) -> Result<GradientStats> {
    if samples < 2 {
        return Err(Error::Config(format!(
            "need at least 2 samples, got {samples}"
        )));
    }
    check_dim(n, h.num_qubits())?;
    let spec = CircuitSpec::new(n, layers)?;
    let grads = (0..samples)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(master_seed, Stream::Sample, i as u64);
            let theta = ParameterVector::uniform_random(&spec, seed);
            energy_and_gradient(&spec, h, theta.as_slice()).map(|(_, g)| g)
        })
        .collect::<Result<Vec<_>>>()?;

    let p = spec.num_params();
    let per_component_variance: Vec<f64> = (0..p)
        .map(|k| {
            let column: Vec<f64> = grads.iter().map(|g| g[k]).collect();
            sample_variance(&column)
        })
        .collect();
    let norms: Vec<f64> = grads
        .iter()
        .map(|g| g.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    let bound = 4.0 * h.trace_h_squared() / 4f64.powi(n as i32);
    let slack = 1.0 + 5.0 / (samples as f64).sqrt();
    let bound_violations = per_component_variance
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > bound * slack)
        .map(|(k, _)| k)
        .collect();

    Ok(GradientStats {
        n,
        layers,
        samples,
        variance_mean: mean(&per_component_variance),
        variance_min: per_component_variance
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min),
        variance_max: per_component_variance.iter().copied().fold(0.0, f64::max),
        per_component_variance,
        norm_mean: mean(&norms),
        norm_q1: quantile(&norms, 0.25),
        norm_q3: quantile(&norms, 0.75),
        bound,
        bound_violations,
    })
}

/// Slope of `log ‖∇E‖` (sample mean) against `log L`.
///
/// The caller picks depths past the variance-saturation point.
pub fn estimate_growth_rate(stats_by_depth: &[GradientStats]) -> Result<f64> {
    if stats_by_depth.len() < 3 {
        return Err(Error::Fit(format!(
            "growth rate needs at least 3 depths, got {}",
            stats_by_depth.len()
        )));
    }
    let xs: Vec<f64> = stats_by_depth
        .iter()
        .map(|s| (s.layers as f64).ln())
        .collect();
    let ys: Vec<f64> = stats_by_depth.iter().map(|s| s.norm_mean.ln()).collect();
    linear_fit(&xs, &ys).map(|(_, slope)| slope)
}
