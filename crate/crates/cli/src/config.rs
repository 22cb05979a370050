//! Experiment configuration: built-in defaults, overlaid by a JSON file,
//! overlaid by command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use vqelab_core::experiments::{DistanceObjective, Model, TargetEnsemble};
use vqelab_core::hamiltonian::{MajoranaEncoding, MAX_DENSE_QUBITS};
use vqelab_core::optim::{AdamConfig, Schedule};
use vqelab_core::simcore::MAX_QUBITS;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Bp,
    Rate,
    Vqe,
    Ensemble,
    Landscape,
    Express,
    Spectrum,
    Trh2fit,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Experiment::Bp => "bp",
            Experiment::Rate => "rate",
            Experiment::Vqe => "vqe",
            Experiment::Ensemble => "ensemble",
            Experiment::Landscape => "landscape",
            Experiment::Express => "express",
            Experiment::Spectrum => "spectrum",
            Experiment::Trh2fit => "trh2fit",
        };
        f.write_str(name)
    }
}

/// Fully resolved configuration of one experiment run.
///
/// `n`/`L` drive single-shape experiments; `n_grid`/`L_grid` drive the sweeps
/// (`bp` uses both grids, `rate` uses `n` and `L_grid`, `trh2fit` uses
/// `n_grid`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub model: Model,
    pub n: usize,
    #[serde(rename = "L")]
    pub layers: usize,
    pub n_grid: Vec<usize>,
    #[serde(rename = "L_grid")]
    pub layer_grid: Vec<usize>,
    pub optimizer: AdamConfig,
    /// Gradient samples per `(n, L)` for `bp` and `rate`.
    pub samples: usize,
    /// Independent runs for `ensemble`.
    pub runs: usize,
    /// Random targets for `express`.
    pub targets: usize,
    /// Hessian subspace size for `landscape`; clipped to `nL`.
    pub k: usize,
    pub master_seed: u64,
    pub target_ensemble: TargetEnsemble,
    pub distance_objective: DistanceObjective,
    pub fidelity_stride: usize,
    pub snapshot_stride: usize,
    /// Draw a new SYK instance per ensemble run.
    pub fresh_disorder: bool,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let (n_grid, layer_grid, samples) = match experiment {
            Experiment::Bp => (vec![4, 6], vec![10, 20, 40], 1000),
            Experiment::Rate => (vec![4], vec![16, 32, 64, 128], 200),
            Experiment::Trh2fit => ((3..=8).collect(), vec![10], 1000),
            _ => (vec![4], vec![10], 1000),
        };
        Self {
            experiment,
            model: Model::Ising { g: 2.0 },
            n: 4,
            layers: 10,
            n_grid,
            layer_grid,
            optimizer: AdamConfig::default(),
            samples,
            runs: 35,
            targets: 10,
            k: 100,
            master_seed: 0,
            target_ensemble: TargetEnsemble::default(),
            distance_objective: DistanceObjective::default(),
            fidelity_stride: 5,
            snapshot_stride: 10,
            fresh_disorder: false,
            out_dir: PathBuf::from("runs").join(experiment.to_string()),
        }
    }

    pub fn to_json(&self) -> CliResult<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// Checks every invariant that does not need the file system.
    pub fn validate(&self) -> CliResult<()> {
        let usage = |m: String| Err(CliError::Usage(m));
        self.optimizer
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        for (name, v) in [
            ("samples", self.samples),
            ("runs", self.runs),
            ("targets", self.targets),
            ("k", self.k),
            ("fidelity_stride", self.fidelity_stride),
            ("snapshot_stride", self.snapshot_stride),
        ] {
            if v == 0 {
                return usage(format!("{name} must be positive"));
            }
        }
        if let Model::Ising { g } = self.model {
            if !g.is_finite() {
                return usage(format!("field strength g must be finite, got {g}"));
            }
        }
        let dense = matches!(
            self.experiment,
            Experiment::Vqe | Experiment::Ensemble | Experiment::Landscape | Experiment::Spectrum
        );
        let n_limit = if dense { MAX_DENSE_QUBITS } else { MAX_QUBITS };
        let check_n = |n: usize| {
            if n < 2 || n > n_limit {
                usage(format!(
                    "n = {n} outside 2..={n_limit} for {}",
                    self.experiment
                ))
            } else {
                Ok(())
            }
        };
        let check_l = |l: usize| {
            if l == 0 {
                usage("layer counts must be positive".into())
            } else {
                Ok(())
            }
        };
        match self.experiment {
            Experiment::Bp => {
                self.n_grid.iter().try_for_each(|&n| check_n(n))?;
                self.layer_grid.iter().try_for_each(|&l| check_l(l))?;
                if self.samples < 2 {
                    return usage("samples must be at least 2".into());
                }
            }
            Experiment::Rate => {
                check_n(self.n)?;
                self.layer_grid.iter().try_for_each(|&l| check_l(l))?;
                if self.layer_grid.len() < 3 {
                    return usage("rate needs at least 3 depths in L_grid".into());
                }
                if self.samples < 2 {
                    return usage("samples must be at least 2".into());
                }
            }
            Experiment::Trh2fit => {
                self.n_grid.iter().try_for_each(|&n| check_n(n))?;
                if self.n_grid.len() < 2 {
                    return usage("trh2fit needs at least 2 sizes in n_grid".into());
                }
            }
            _ => {
                check_n(self.n)?;
                check_l(self.layers)?;
            }
        }
        if self.n_grid.is_empty() || self.layer_grid.is_empty() {
            return usage("n_grid and L_grid must not be empty".into());
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Ising,
    Syk,
}

/// Flags shared by every subcommand. Flags that an experiment does not use
/// are accepted and echoed in the resolved config.
#[derive(Args, Clone, Debug, Default)]
pub struct CommonArgs {
    /// JSON config file; flags override its values.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// Transverse field of the Ising chain.
    #[arg(long)]
    pub g: Option<f64>,
    /// Seed of the SYK coupling draw.
    #[arg(long)]
    pub disorder_seed: Option<u64>,
    /// Majorana-to-qubit map used for SYK.
    #[arg(long, value_enum)]
    pub encoding: Option<EncodingArg>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "L")]
    pub layers: Option<usize>,
    /// Comma-separated qubit counts for sweeps.
    #[arg(long, value_delimiter = ',')]
    pub n_grid: Option<Vec<usize>>,
    /// Comma-separated depths for sweeps.
    #[arg(long = "L-grid", value_delimiter = ',')]
    pub layer_grid: Option<Vec<usize>>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta1: Option<f64>,
    #[arg(long)]
    pub beta2: Option<f64>,
    /// Exponential learning-rate decay `α·c^{τ/500}`.
    #[arg(long, value_name = "C")]
    pub decay: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub targets: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum)]
    pub ensemble: Option<EnsembleArg>,
    #[arg(long, value_enum)]
    pub objective: Option<ObjectiveArg>,
    #[arg(long)]
    pub fresh_disorder: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EncodingArg {
    JordanWigner,
    Real,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EnsembleArg {
    Real,
    Haar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Distance,
    SquaredDistance,
}

fn merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (key, value) in o {
                match b.get_mut(&key) {
                    // Nested objects merge key by key, except tagged enums
                    // whose variant changes.
                    Some(slot @ Value::Object(_))
                        if value.is_object() && same_shape(slot, &value) =>
                    {
                        merge(slot, value)
                    }
                    _ => {
                        b.insert(key, value);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}

/// True when both objects carry the same externally or internally tagged
/// variant, so a key-by-key merge is meaningful.
fn same_shape(a: &Value, b: &Value) -> bool {
    let (Value::Object(a), Value::Object(b)) = (a, b) else {
        return false;
    };
    if let (Some(x), Some(y)) = (a.get("kind"), b.get("kind")) {
        return x == y;
    }
    if a.len() == 1 && b.len() == 1 {
        return a.keys().next() == b.keys().next();
    }
    !b.contains_key("kind")
}

fn read_config_file(path: &Path) -> CliResult<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("invalid config {}: {e}", path.display())))?;
    if !value.is_object() {
        return Err(CliError::usage("config file must hold a JSON object"));
    }
    Ok(value)
}

/// Resolves defaults, then the config file, then flags, and validates.
pub fn parse_config(experiment: Experiment, args: &CommonArgs) -> CliResult<ExperimentConfig> {
    let defaults = ExperimentConfig::defaults(experiment);
    let mut config = match &args.config {
        None => defaults,
        Some(path) => {
            let file = read_config_file(path)?;
            if let Some(e) = file.get("experiment") {
                let named: Experiment = serde_json::from_value(e.clone())
                    .map_err(|e| CliError::usage(format!("config: {e}")))?;
                if named != experiment {
                    return Err(CliError::usage(format!(
                        "config is for experiment `{named}`, not `{experiment}`"
                    )));
                }
            }
            let mut value = serde_json::to_value(&defaults)?;
            merge(&mut value, file);
            serde_json::from_value(value).map_err(|e| CliError::usage(format!("config: {e}")))?
        }
    };
    apply_flags(&mut config, args)?;
    config.validate()?;
    Ok(config)
}

fn apply_flags(c: &mut ExperimentConfig, a: &CommonArgs) -> CliResult<()> {
    match (a.model, c.model) {
        (Some(ModelKind::Ising), Model::Syk { .. }) => c.model = Model::Ising { g: 2.0 },
        (Some(ModelKind::Syk), Model::Ising { .. }) => c.model = Model::syk(1),
        _ => {}
    }
    if let Some(new_g) = a.g {
        match &mut c.model {
            Model::Ising { g } => *g = new_g,
            Model::Syk { .. } => return Err(CliError::usage("--g applies to the Ising model")),
        }
    }
    if let Some(s) = a.disorder_seed {
        match &mut c.model {
            Model::Syk { seed, .. } => *seed = s,
            Model::Ising { .. } => {
                return Err(CliError::usage("--disorder-seed applies to the SYK model"))
            }
        }
    }
    if let Some(e) = a.encoding {
        match &mut c.model {
            Model::Syk { encoding, .. } => {
                *encoding = match e {
                    EncodingArg::JordanWigner => MajoranaEncoding::JordanWigner,
                    EncodingArg::Real => MajoranaEncoding::Real,
                }
            }
            Model::Ising { .. } => {
                return Err(CliError::usage("--encoding applies to the SYK model"))
            }
        }
    }
    if let Some(n) = a.n {
        c.n = n;
        if a.n_grid.is_none() {
            c.n_grid = vec![n];
        }
    }
    if let Some(l) = a.layers {
        c.layers = l;
        if a.layer_grid.is_none() && c.experiment == Experiment::Bp {
            c.layer_grid = vec![l];
        }
    }
    if let Some(grid) = &a.n_grid {
        c.n_grid = grid.clone();
    }
    if let Some(grid) = &a.layer_grid {
        c.layer_grid = grid.clone();
    }
    if let Some(s) = a.seed {
        c.master_seed = s;
    }
    if let Some(s) = a.steps {
        c.optimizer.steps = s;
    }
    if let Some(x) = a.alpha {
        c.optimizer.alpha = x;
    }
    if let Some(x) = a.beta1 {
        c.optimizer.beta1 = x;
    }
    if let Some(x) = a.beta2 {
        c.optimizer.beta2 = x;
    }
    if let Some(decay) = a.decay {
        c.optimizer.schedule = Schedule::ExponentialDecay {
            c: decay,
            period: 500.0,
        };
    }
    if let Some(x) = a.samples {
        c.samples = x;
    }
    if let Some(x) = a.runs {
        c.runs = x;
    }
    if let Some(x) = a.targets {
        c.targets = x;
    }
    if let Some(x) = a.k {
        c.k = x;
    }
    if let Some(e) = a.ensemble {
        c.target_ensemble = match e {
            EnsembleArg::Real => TargetEnsemble::Real,
            EnsembleArg::Haar => TargetEnsemble::Haar,
        };
    }
    if let Some(o) = a.objective {
        c.distance_objective = match o {
            ObjectiveArg::Distance => DistanceObjective::Distance,
            ObjectiveArg::SquaredDistance => DistanceObjective::SquaredDistance,
        };
    }
    if a.fresh_disorder {
        c.fresh_disorder = true;
    }
    if let Some(out) = &a.out {
        c.out_dir = out.clone();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(json: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(json.as_bytes()).unwrap();
        f
    }

    #[test]
    fn flags_alone_use_documented_defaults() {
        let args = CommonArgs {
            model: Some(ModelKind::Ising),
            n: Some(4),
            layers: Some(10),
            seed: Some(7),
            ..Default::default()
        };
        let c = parse_config(Experiment::Vqe, &args).unwrap();
        assert_eq!(c.model, Model::Ising { g: 2.0 });
        assert_eq!(c.optimizer, AdamConfig::default());
        assert_eq!((c.n, c.layers, c.master_seed), (4, 10, 7));
        assert_eq!((c.targets, c.k, c.runs), (10, 100, 35));
    }

    #[test]
    fn flag_beats_file_beats_default() {
        let f = file(r#"{"n": 6, "L": 3, "optimizer": {"alpha": 0.01}}"#);
        let args = CommonArgs {
            config: Some(f.path().into()),
            n: Some(4),
            ..Default::default()
        };
        let c = parse_config(Experiment::Vqe, &args).unwrap();
        assert_eq!(c.n, 4);
        assert_eq!(c.layers, 3);
        assert_eq!(c.optimizer.alpha, 0.01);
        assert_eq!(c.optimizer.beta1, 0.9);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_usage_errors() {
        for json in [
            r#"{"nn": 4}"#,
            r#"{"optimizer": {"gamma": 1}}"#,
            r#"{"n": "four"}"#,
            r#"{"experiment": "bp"}"#,
            r#"{"model": {"syk": {"seed": 1, "extra": 2}}}"#,
            "[1, 2]",
        ] {
            let f = file(json);
            let args = CommonArgs {
                config: Some(f.path().into()),
                ..Default::default()
            };
            let err = parse_config(Experiment::Vqe, &args).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{json}");
        }
        let args = CommonArgs {
            beta1: Some(1.5),
            ..Default::default()
        };
        assert_eq!(
            parse_config(Experiment::Vqe, &args)
                .unwrap_err()
                .exit_code(),
            2
        );
        let args = CommonArgs {
            n: Some(1),
            ..Default::default()
        };
        assert_eq!(
            parse_config(Experiment::Spectrum, &args)
                .unwrap_err()
                .exit_code(),
            2
        );
    }

    #[test]
    fn resolved_config_round_trips() {
        let mut c = ExperimentConfig::defaults(Experiment::Express);
        c.model = Model::syk(3);
        c.optimizer = c.optimizer.with_decay(0.3);
        let f = file(&c.to_json().unwrap());
        let args = CommonArgs {
            config: Some(f.path().into()),
            ..Default::default()
        };
        assert_eq!(parse_config(Experiment::Express, &args).unwrap(), c);
    }

    #[test]
    fn model_variant_switch_replaces_parameters() {
        let f = file(r#"{"model": {"syk": {"seed": 9}}}"#);
        let args = CommonArgs {
            config: Some(f.path().into()),
            ..Default::default()
        };
        let c = parse_config(Experiment::Spectrum, &args).unwrap();
        assert_eq!(c.model, Model::syk(9));
        let args = CommonArgs {
            model: Some(ModelKind::Syk),
            g: Some(1.0),
            ..Default::default()
        };
        assert!(parse_config(Experiment::Spectrum, &args).is_err());
    }
}
