//! Adam with optional exponential learning-rate decay, and a minimization loop
//! that records the full trajectory.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Schedule {
    Constant,
    /// `α_τ = α₀·c^{τ/period}` with a real-valued exponent.
    ExponentialDecay {
        c: f64,
        period: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdamConfig {
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub steps: usize,
    pub schedule: Schedule,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            steps: 500,
            schedule: Schedule::Constant,
        }
    }
}

impl AdamConfig {
    /// Default hyperparameters with `α_τ = α₀·c^{τ/500}`.
    pub fn with_decay(mut self, c: f64) -> Self {
        self.schedule = Schedule::ExponentialDecay { c, period: 500.0 };
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..1.0).contains(&b) {
                return bad(format!("{name} must lie in [0, 1), got {b}"));
            }
        }
        if !(self.epsilon > 0.0) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if self.steps == 0 {
            return bad("steps must be at least 1".into());
        }
        if let Schedule::ExponentialDecay { c, period } = self.schedule {
            if !(c > 0.0 && c <= 1.0) {
                return bad(format!("decay constant c must lie in (0, 1], got {c}"));
            }
            if !(period > 0.0) {
                return bad(format!("decay period must be positive, got {period}"));
            }
        }
        Ok(())
    }
}

/// Learning rate at step `tau`.
pub fn lr_at(config: &AdamConfig, tau: usize) -> f64 {
    match config.schedule {
        Schedule::Constant => config.alpha,
        Schedule::ExponentialDecay { c, period } => config.alpha * c.powf(tau as f64 / period),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn new(dim: usize) -> Self {
        Self {
            m: vec![0.0; dim],
            v: vec![0.0; dim],
            t: 0,
        }
    }
}

/// One bias-corrected Adam update at step `tau` (so `t = tau + 1`).
pub fn adam_step(
    state: &mut AdamState,
    grad: &[f64],
    theta: &mut [f64],
    config: &AdamConfig,
    tau: usize,
) -> Result<()> {
    check_dim(theta.len(), grad.len())?;
    check_dim(theta.len(), state.m.len())?;
    check_dim(theta.len(), state.v.len())?;
    state.t = tau as u64 + 1;
    let t = state.t as i32;
    let c1 = 1.0 - config.beta1.powi(t);
    let c2 = 1.0 - config.beta2.powi(t);
    let lr = lr_at(config, tau);
    for (((th, &g), m), v) in theta
        .iter_mut()
        .zip(grad)
        .zip(&mut state.m)
        .zip(&mut state.v)
    {
        *m = config.beta1 * *m + (1.0 - config.beta1) * g;
        *v = config.beta2 * *v + (1.0 - config.beta2) * g * g;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        *th -= lr * m_hat / (v_hat.sqrt() + config.epsilon);
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub tau: usize,
    pub loss: f64,
    pub grad_norm: f64,
    pub lr: f64,
}

/// Per-step record of one optimization run.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub steps: Vec<StepRecord>,
    pub theta_snapshots: BTreeMap<usize, Vec<f64>>,
    pub theta_best: Vec<f64>,
    pub loss_best: f64,
    pub tau_best: usize,
}

impl Trajectory {
    /// Running minimum of the loss, one entry per recorded step.
    pub fn best_so_far(&self) -> Vec<f64> {
        self.steps
            .iter()
            .scan(f64::INFINITY, |best, r| {
                *best = best.min(r.loss);
                Some(*best)
            })
            .collect()
    }
}

/// [`minimize_observed`] without a per-step observer.
pub fn minimize<F>(
    loss_and_grad: F,
    theta0: &[f64],
    config: &AdamConfig,
    snapshot_stride: usize,
) -> Result<Trajectory>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    minimize_observed(
        loss_and_grad,
        theta0,
        config,
        snapshot_stride,
        |_, _| Ok(()),
    )
}

/// Runs exactly `config.steps` Adam updates from `theta0`.
///
/// The loss is evaluated at `τ = 0..=steps` (the last point is scored but not
/// stepped from). `θ` is snapshotted every `snapshot_stride` steps, at the final
/// step, and at the best step; `observer` sees every evaluated `(τ, θ_τ)`.
pub fn minimize_observed<F, O>(
    mut loss_and_grad: F,
    theta0: &[f64],
    config: &AdamConfig,
    snapshot_stride: usize,
    mut observer: O,
) -> Result<Trajectory>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
    O: FnMut(usize, &[f64]) -> Result<()>,
{
    config.validate()?;
    let stride = snapshot_stride.max(1);
    let mut theta = theta0.to_vec();
    let mut state = AdamState::new(theta.len());
    let mut steps = Vec::with_capacity(config.steps + 1);
    let mut snapshots = BTreeMap::new();
    let mut theta_best = theta.clone();
    let mut loss_best = f64::INFINITY;
    let mut tau_best = 0;

    for tau in 0..=config.steps {
        let (loss, grad) = loss_and_grad(&theta)?;
        check_dim(theta.len(), grad.len())?;
        let grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if !loss.is_finite() || !grad_norm.is_finite() {
            return Err(Error::NonFinite {
                tau,
                loss,
                grad_norm,
            });
        }
        steps.push(StepRecord {
            tau,
            loss,
            grad_norm,
            lr: lr_at(config, tau),
        });
        if loss < loss_best {
            loss_best = loss;
            tau_best = tau;
            theta_best.copy_from_slice(&theta);
        }
        if tau % stride == 0 || tau == config.steps {
            snapshots.insert(tau, theta.clone());
        }
        observer(tau, &theta)?;
        if tau < config.steps {
            adam_step(&mut state, &grad, &mut theta, config, tau)?;
        }
    }
    snapshots.insert(tau_best, theta_best.clone());
    Ok(Trajectory {
        steps,
        theta_snapshots: snapshots,
        theta_best,
        loss_best,
        tau_best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_values() {
        let decay = AdamConfig::default().with_decay(0.3);
        assert_eq!(lr_at(&decay, 0), 0.05);
        assert!((lr_at(&decay, 500) - 0.015).abs() < 1e-17);
        let constant = AdamConfig::default();
        assert_eq!(lr_at(&constant, 12345), 0.05);
    }

    #[test]
    fn schedule_is_positive_and_non_increasing() {
        let decay = AdamConfig::default().with_decay(0.3);
        let lrs: Vec<f64> = (0..2000).map(|t| lr_at(&decay, t)).collect();
        assert!(lrs.iter().all(|&l| l > 0.0));
        assert!(lrs.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn zero_gradient_leaves_theta() {
        let cfg = AdamConfig::default();
        let mut state = AdamState::new(3);
        let mut theta = vec![0.1, 0.2, 0.3];
        adam_step(&mut state, &[0.0; 3], &mut theta, &cfg, 0).unwrap();
        assert_eq!(theta, vec![0.1, 0.2, 0.3]);
        assert!(state.m.iter().chain(&state.v).all(|&x| x == 0.0));
    }

    #[test]
    fn first_step_has_unit_normalized_size() {
        let cfg = AdamConfig::default();
        let mut state = AdamState::new(1);
        let mut theta = vec![0.0];
        adam_step(&mut state, &[1.0], &mut theta, &cfg, 0).unwrap();
        assert!((theta[0] + 0.05 / (1.0 + 1e-8)).abs() < 1e-15);
        assert_eq!(state.t, 1);
    }

    /// Plain scalar Adam written out independently.
    fn scalar_adam(mut x: f64, steps: usize) -> Vec<f64> {
        let (a, b1, b2, eps) = (0.05f64, 0.9f64, 0.999f64, 1e-8);
        let (mut m, mut v) = (0.0, 0.0);
        let mut fs = vec![x * x];
        for t in 1..=steps {
            let g = 2.0 * x;
            m = b1 * m + (1.0 - b1) * g;
            v = b2 * v + (1.0 - b2) * g * g;
            let mh = m / (1.0 - b1.powi(t as i32));
            let vh = v / (1.0 - b2.powi(t as i32));
            x -= a * mh / (vh.sqrt() + eps);
            fs.push(x * x);
        }
        fs
    }

    #[test]
    fn quadratic_descent_matches_reference() {
        let cfg = AdamConfig {
            steps: 10,
            ..AdamConfig::default()
        };
        let traj = minimize(
            |x: &[f64]| Ok((x[0] * x[0], vec![2.0 * x[0]])),
            &[1.0],
            &cfg,
            1,
        )
        .unwrap();
        let reference = scalar_adam(1.0, 10);
        let losses: Vec<f64> = traj.steps.iter().map(|r| r.loss).collect();
        assert_eq!(losses, reference);
        assert!(losses.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn bowl_converges() {
        let cfg = AdamConfig::default();
        let theta0 = [1.0, -0.5, 0.3, 2.0, -1.5];
        let f = |x: &[f64]| {
            Ok((
                x.iter().map(|v| v * v).sum(),
                x.iter().map(|v| 2.0 * v).collect(),
            ))
        };
        let traj = minimize(f, &theta0, &cfg, 10).unwrap();
        assert!(traj.loss_best < 1e-4, "loss_best {}", traj.loss_best);
        assert_eq!(traj.steps.len(), 501);
    }

    #[test]
    fn single_step_on_flat_loss_keeps_theta0() {
        let cfg = AdamConfig {
            steps: 1,
            ..AdamConfig::default()
        };
        let traj = minimize(|_: &[f64]| Ok((1.0, vec![0.0, 0.0])), &[0.4, 0.5], &cfg, 10).unwrap();
        assert_eq!(traj.theta_best, vec![0.4, 0.5]);
        assert_eq!(traj.tau_best, 0);
    }

    #[test]
    fn best_so_far_is_monotone_and_snapshot_kept() {
        let cfg = AdamConfig {
            steps: 200,
            ..AdamConfig::default()
        };
        let f = |x: &[f64]| {
            Ok((
                (x[0] - 0.3).powi(2) + 0.1 * (20.0 * x[0]).sin(),
                vec![2.0 * (x[0] - 0.3) + 2.0 * (20.0 * x[0]).cos()],
            ))
        };
        let traj = minimize(f, &[2.0], &cfg, 7).unwrap();
        let best = traj.best_so_far();
        assert!(best.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*best.last().unwrap(), traj.loss_best);
        assert_eq!(traj.theta_snapshots[&traj.tau_best], traj.theta_best);
        assert!(traj.theta_snapshots.contains_key(&200));
    }

    #[test]
    fn non_finite_loss_aborts() {
        let cfg = AdamConfig {
            steps: 5,
            ..AdamConfig::default()
        };
        let err = minimize(
            |x: &[f64]| Ok((if x[0] < 0.99 { f64::NAN } else { x[0] }, vec![1.0])),
            &[1.0],
            &cfg,
            1,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonFinite { tau: 1, .. }));
    }

    #[test]
    fn config_validation() {
        let ok = AdamConfig::default();
        assert!(ok.validate().is_ok());
        assert!(AdamConfig { beta1: 1.5, ..ok }.validate().is_err());
        assert!(AdamConfig { beta2: 1.0, ..ok }.validate().is_err());
        assert!(AdamConfig { alpha: 0.0, ..ok }.validate().is_err());
        assert!(AdamConfig { steps: 0, ..ok }.validate().is_err());
        assert!(ok.with_decay(0.0).validate().is_err());
        assert!(ok.with_decay(1.0).validate().is_ok());
    }
}
