//! Runs one resolved experiment and persists its outputs.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use vqelab_core::experiments::{
    estimate_growth_rate, run_barren_plateau, run_expressibility, run_trajectory_analysis, run_vqe,
    run_vqe_ensemble, EnsembleOptions, ExpressOptions, Model, VqeOptions, VqeProblem, VqeRunRecord,
};
use vqelab_core::hamiltonian::{exact_spectrum, fit_trace_scaling, DEFAULT_DEGENERACY_TOL};
use vqelab_core::stats::{mean, sample_variance};

use crate::config::{Experiment, ExperimentConfig};
use crate::error::CliResult;
use crate::plot::{emit_plot, PlotOptions};
use crate::records::*;

pub const MANIFEST: &str = "manifest.json";
pub const CONFIG: &str = "config.json";

/// Record of a completed run; written last.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub version: String,
    pub started: String,
    pub finished: String,
    pub config: ExperimentConfig,
    /// SHA-256 of every file written by the run, keyed by file name.
    pub checksums: BTreeMap<String, String>,
    pub summary: BTreeMap<String, Value>,
    /// Points dropped from each plot.
    pub warnings: BTreeMap<String, usize>,
}

impl RunManifest {
    pub fn load(dir: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(dir.join(MANIFEST))?;
        Ok(serde_json::from_str(&text)?)
    }
}

struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
    summary: BTreeMap<String, Value>,
    warnings: BTreeMap<String, usize>,
}

impl Outputs {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn csv<R: Serialize + Schema>(&mut self, name: &str, rows: &[R]) -> CliResult<()> {
        write_csv(&self.path(name), rows)?;
        self.files.push(name.to_owned());
        Ok(())
    }

    fn text(&mut self, name: &str, contents: &str) -> CliResult<()> {
        fs::write(self.path(name), contents)?;
        self.files.push(name.to_owned());
        Ok(())
    }

    fn plot(&mut self, csv: &str, x: &str, y: &str, opts: PlotOptions, svg: &str) -> CliResult<()> {
        let dropped = emit_plot(&self.path(csv), x, y, &opts, &self.path(svg))?;
        self.files.push(svg.to_owned());
        if dropped > 0 {
            self.warnings.insert(svg.to_owned(), dropped);
        }
        Ok(())
    }

    fn scalar(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_owned(), value.into());
    }
}

fn log_y(title: &str) -> PlotOptions {
    PlotOptions {
        log_y: true,
        title: title.into(),
        ..Default::default()
    }
}

fn sha256_hex(path: &Path) -> CliResult<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

/// Executes `config` into `config.out_dir`. All data files and plots are
/// written before the manifest, so its presence marks a complete run.
pub fn execute(config: &ExperimentConfig) -> CliResult<RunManifest> {
    config.validate()?;
    let started = Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true);
    fs::create_dir_all(&config.out_dir)
        .map_err(|e| anyhow::anyhow!("cannot create {}: {e}", config.out_dir.display()))?;
    match fs::remove_file(config.out_dir.join(MANIFEST)) {
        Err(e) if e.kind() != std::io::ErrorKind::NotFound => return Err(e.into()),
        _ => {}
    }
    let mut out = Outputs {
        dir: config.out_dir.clone(),
        files: Vec::new(),
        summary: BTreeMap::new(),
        warnings: BTreeMap::new(),
    };
    out.text(CONFIG, &config.to_json()?)?;

    match config.experiment {
        Experiment::Bp => barren(config, &mut out)?,
        Experiment::Rate => rate(config, &mut out)?,
        Experiment::Vqe => vqe(config, &mut out)?,
        Experiment::Ensemble => ensemble(config, &mut out)?,
        Experiment::Landscape => landscape(config, &mut out)?,
        Experiment::Express => express(config, &mut out)?,
        Experiment::Spectrum => spectrum(config, &mut out)?,
        Experiment::Trh2fit => trace_fit(config, &mut out)?,
    }

    let checksums = out
        .files
        .iter()
        .map(|f| Ok((f.clone(), sha256_hex(&out.path(f))?)))
        .collect::<CliResult<BTreeMap<_, _>>>()?;
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_owned(),
        started,
        finished: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
        config: config.clone(),
        checksums,
        summary: out.summary,
        warnings: out.warnings,
    };
    fs::write(
        config.out_dir.join(MANIFEST),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    Ok(manifest)
}

fn write_couplings(config: &ExperimentConfig, n: usize, out: &mut Outputs) -> CliResult<()> {
    if let Some(couplings) = config.model.syk_couplings(n) {
        out.text("couplings.json", &(couplings?.to_json()? + "\n"))?;
    }
    Ok(())
}

fn barren(c: &ExperimentConfig, out: &mut Outputs) -> CliResult<()> {
    let mut gradients = Vec::new();
    let mut norms = Vec::new();
    let mut variances = Vec::new();
    let mut violations = 0;
    let mut worst_ratio: f64 = 0.0;
    for &n in &c.n_grid {
        let h = c.model.hamiltonian(n)?;
        for &l in &c.layer_grid {
            let s = run_barren_plateau(&h, n, l, c.samples, c.master_seed)?;
            gradients.extend(s.per_component_variance.iter().enumerate().map(|(k, &v)| {
                GradientRow {
                    n,
                    layers: l,
                    component: k,
                    variance: v,
                }
            }));
            norms.push(NormRow {
                n,
                layers: l,
                norm_mean: s.norm_mean,
                norm_q1: s.norm_q1,
                norm_q3: s.norm_q3,
                bound: s.bound,
            });
            variances.push(VarianceRow {
                n,
                layers: l,
                variance_mean: s.variance_mean,
                variance_min: s.variance_min,
                variance_max: s.variance_max,
                bound: s.bound,
            });
            violations += s.bound_violations.len();
            worst_ratio = worst_ratio.max(s.variance_max / s.bound);
        }
    }
    out.csv("gradients.csv", &gradients)?;
    out.csv("norms.csv", &norms)?;
    out.csv("variance.csv", &variances)?;
    out.scalar("bound_violations", violations);
    out.scalar("max_variance_over_bound", worst_ratio);
    let by_n = |title: &str, log_x: bool| PlotOptions {
        log_x,
        log_y: true,
        series: Some("n".into()),
        title: title.into(),
    };
    out.plot(
        "variance.csv",
        "L",
        "variance_mean",
        by_n("Gradient variance", false),
        "variance.svg",
    )?;
    out.plot(
        "norms.csv",
        "L",
        "norm_mean",
        by_n("Mean gradient norm", true),
        "norms.svg",
    )
}

fn rate(c: &ExperimentConfig, out: &mut Outputs) -> CliResult<()> {
    let h = c.model.hamiltonian(c.n)?;
    let stats = c
        .layer_grid
        .iter()
        .map(|&l| run_barren_plateau(&h, c.n, l, c.samples, c.master_seed))
        .collect::<Result<Vec<_>, _>>()?;
    let rate = estimate_growth_rate(&stats)?;
    let gradients: Vec<GradientRow> = stats
        .iter()
        .flat_map(|s| {
            s.per_component_variance
                .iter()
                .enumerate()
                .map(move |(k, &v)| GradientRow {
                    n: s.n,
                    layers: s.layers,
                    component: k,
                    variance: v,
                })
        })
        .collect();
    let norms: Vec<NormRow> = stats
        .iter()
        .map(|s| NormRow {
            n: s.n,
            layers: s.layers,
            norm_mean: s.norm_mean,
            norm_q1: s.norm_q1,
            norm_q3: s.norm_q3,
            bound: s.bound,
        })
        .collect();
    out.csv("gradients.csv", &gradients)?;
    out.csv("norms.csv", &norms)?;
    out.scalar("rate", rate);
    let opts = PlotOptions {
        log_x: true,
        log_y: true,
        series: None,
        title: "Gradient norm growth".into(),
    };
    out.plot("norms.csv", "L", "norm_mean", opts, "norms.svg")
}

fn vqe_options(c: &ExperimentConfig) -> VqeOptions {
    VqeOptions {
        fidelity_stride: c.fidelity_stride,
        snapshot_stride: c.snapshot_stride,
    }
}

fn trajectory_rows(record: &VqeRunRecord) -> Vec<TrajectoryRow> {
    record
        .trajectory
        .steps
        .iter()
        .map(|s| TrajectoryRow {
            tau: s.tau,
            loss: s.loss,
            error: s.loss - record.ground_energy,
            fidelity: record.fidelity_at(s.tau),
            grad_norm: s.grad_norm,
            lr: s.lr,
        })
        .collect()
}

fn problem_summary(problem: &VqeProblem, out: &mut Outputs) {
    out.scalar("E0", problem.ground_energy());
    out.scalar("delta_E", problem.bandwidth());
    out.scalar("degeneracy", problem.spectrum.degeneracy);
}

fn record_summary(record: &VqeRunRecord, out: &mut Outputs) {
    out.scalar("final_error", record.final_error);
    out.scalar("best_tau", record.trajectory.tau_best);
    out.scalar("fidelity", record.best_fidelity());
    out.scalar("bound_met", record.error_bound_met);
}

fn vqe(c: &ExperimentConfig, out: &mut Outputs) -> CliResult<()> {
    let problem = VqeProblem::new(c.model, c.n, c.layers)?;
    write_couplings(c, c.n, out)?;
    let record = run_vqe(&problem, &c.optimizer, c.master_seed, vqe_options(c))?;
    out.csv("trajectory.csv", &trajectory_rows(&record))?;
    problem_summary(&problem, out);
    record_summary(&record, out);
    out.plot(
        "trajectory.csv",
        "tau",
        "error",
        log_y("VQE error"),
        "trajectory.svg",
    )
}

fn ensemble(c: &ExperimentConfig, out: &mut Outputs) -> CliResult<()> {
    let problem = VqeProblem::new(c.model, c.n, c.layers)?;
    write_couplings(c, c.n, out)?;
    let options = EnsembleOptions {
        vqe: vqe_options(c),
        fresh_disorder: c.fresh_disorder,
    };
    let entries = run_vqe_ensemble(&problem, c.runs, &c.optimizer, c.master_seed, options)?;
    let rows: Vec<EnsembleRow> = entries
        .iter()
        .map(|e| match &e.outcome {
            Ok(r) => EnsembleRow {
                run_id: e.run_id,
                seed: e.seed,
                final_error: Some(r.final_error),
                best_tau: Some(r.trajectory.tau_best),
                bound_met: r.error_bound_met,
            },
            Err(_) => EnsembleRow {
                run_id: e.run_id,
                seed: e.seed,
                final_error: None,
                best_tau: None,
                bound_met: false,
            },
        })
        .collect();
    out.csv("ensemble.csv", &rows)?;
    let errors: Vec<f64> = rows.iter().filter_map(|r| r.final_error).collect();
    let failed: Vec<String> = entries
        .iter()
        .filter_map(|e| {
            e.outcome
                .as_ref()
                .err()
                .map(|err| format!("run {}: {err}", e.run_id))
        })
        .collect();
    if errors.is_empty() {
        return Err(anyhow::anyhow!("every ensemble run failed: {}", failed.join("; ")).into());
    }
    problem_summary(&problem, out);
    out.scalar("completed_runs", errors.len());
    out.scalar("failed_runs", failed.len());
    out.scalar(
        "bound_met_runs",
        rows.iter().filter(|r| r.bound_met).count(),
    );
    out.scalar("mean_final_error", mean(&errors));
    if errors.len() > 1 {
        out.scalar("variance_final_error", sample_variance(&errors));
    }
    out.plot(
        "ensemble.csv",
        "run_id",
        "final_error",
        log_y("Final VQE error per run"),
        "ensemble.svg",
    )
}

fn landscape(c: &ExperimentConfig, out: &mut Outputs) -> CliResult<()> {
    let problem = VqeProblem::new(c.model, c.n, c.layers)?;
    write_couplings(c, c.n, out)?;
    let record = run_vqe(&problem, &c.optimizer, c.master_seed, vqe_options(c))?;
    let analysis = run_trajectory_analysis(&record, &problem, c.k)?;
    out.csv("trajectory.csv", &trajectory_rows(&record))?;
    let hessian: Vec<EigenRow> = analysis
        .subspace
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(rank, &eigenvalue)| EigenRow { rank, eigenvalue })
        .collect();
    out.csv("hessian.csv", &hessian)?;
    let projection: Vec<ProjectionRow> = analysis
        .series
        .iter()
        .map(|p| ProjectionRow {
            tau: p.tau,
            projected_distance: p.projected_distance,
            error: p.error,
        })
        .collect();
    out.csv("projection.csv", &projection)?;
    problem_summary(&problem, out);
    record_summary(&record, out);
    out.scalar("k", analysis.subspace.k());
    out.scalar("hessian_asymmetry", analysis.hessian.max_asymmetry());
    out.scalar(
        "max_eigen_residual",
        analysis.residuals.iter().copied().fold(0.0, f64::max),
    );
    out.scalar(
        "inverse_volume",
        analysis.inverse_volume.map_or(Value::Null, Value::from),
    );
    out.plot(
        "trajectory.csv",
        "tau",
        "error",
        log_y("VQE error"),
        "trajectory.svg",
    )?;
    out.plot(
        "hessian.csv",
        "rank",
        "eigenvalue",
        log_y("Top Hessian eigenvalues"),
        "hessian.svg",
    )?;
    let opts = PlotOptions {
        log_x: true,
        log_y: true,
        series: None,
        title: "Projected trajectory".into(),
    };
    out.plot(
        "projection.csv",
        "projected_distance",
        "error",
        opts,
        "projection.svg",
    )
}

fn express(c: &ExperimentConfig, out: &mut Outputs) -> CliResult<()> {
    let options = ExpressOptions {
        ensemble: c.target_ensemble,
        objective: c.distance_objective,
    };
    let result = run_expressibility(
        c.n,
        c.layers,
        c.targets,
        &c.optimizer,
        c.master_seed,
        options,
    )?;
    let rows: Vec<ExpressRow> = result
        .per_target_min_distance
        .iter()
        .enumerate()
        .map(|(target_id, &min_distance)| ExpressRow {
            target_id,
            min_distance,
        })
        .collect();
    out.csv("express.csv", &rows)?;
    let bound = 1e-5 * (1u64 << c.n) as f64;
    out.scalar("epsilon_m", result.epsilon_m);
    out.scalar("normalized", result.normalized);
    out.scalar("bound", bound);
    out.scalar("bound_met", result.epsilon_m <= bound);
    out.plot(
        "express.csv",
        "target_id",
        "min_distance",
        log_y("Minimum distance per target"),
        "express.svg",
    )
}

fn spectrum(c: &ExperimentConfig, out: &mut Outputs) -> CliResult<()> {
    let h = c.model.hamiltonian(c.n)?;
    write_couplings(c, c.n, out)?;
    let s = exact_spectrum(&h, DEFAULT_DEGENERACY_TOL)?;
    let rows: Vec<EigenRow> = s
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(rank, &eigenvalue)| EigenRow { rank, eigenvalue })
        .collect();
    out.csv("spectrum.csv", &rows)?;
    out.scalar("E0", s.ground_energy);
    out.scalar("delta_E", s.bandwidth);
    out.scalar("degeneracy", s.degeneracy);
    out.scalar("trace_h2", h.trace_h_squared());
    let opts = PlotOptions {
        title: "Spectrum".into(),
        ..Default::default()
    };
    out.plot("spectrum.csv", "rank", "eigenvalue", opts, "spectrum.svg")
}

fn trace_fit(c: &ExperimentConfig, out: &mut Outputs) -> CliResult<()> {
    let points = c
        .n_grid
        .iter()
        .map(|&n| Ok((n, c.model.hamiltonian(n)?.trace_h_squared())))
        .collect::<CliResult<Vec<_>>>()?;
    let (a, b) = fit_trace_scaling(&points)?;
    let rows: Vec<TraceRow> = points
        .iter()
        .map(|&(n, trace_h2)| TraceRow { n, trace_h2 })
        .collect();
    out.csv("trh2fit.csv", &rows)?;
    out.scalar("a", a);
    out.scalar("b", b);
    if let Model::Ising { g } = c.model {
        out.scalar("a_expected", 1.0 + g * g);
    }
    out.plot(
        "trh2fit.csv",
        "n",
        "trace_h2",
        log_y("Tr(H^2) scaling"),
        "trh2fit.svg",
    )
}
