//! Fixed CSV schemas. Floats are written in shortest round-trip form, blank
//! cells stand for values that were not evaluated.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliResult;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientRow {
    pub n: usize,
    #[serde(rename = "L")]
    pub layers: usize,
    pub component: usize,
    pub variance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormRow {
    pub n: usize,
    #[serde(rename = "L")]
    pub layers: usize,
    pub norm_mean: f64,
    pub norm_q1: f64,
    pub norm_q3: f64,
    pub bound: f64,
}

/// Per-shape variance summary written next to the per-component table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceRow {
    pub n: usize,
    #[serde(rename = "L")]
    pub layers: usize,
    pub variance_mean: f64,
    pub variance_min: f64,
    pub variance_max: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub tau: usize,
    pub loss: f64,
    pub error: f64,
    pub fidelity: Option<f64>,
    pub grad_norm: f64,
    pub lr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleRow {
    pub run_id: usize,
    pub seed: u64,
    /// Blank when the run failed.
    pub final_error: Option<f64>,
    pub best_tau: Option<usize>,
    pub bound_met: bool,
}

/// `rank,eigenvalue`, shared by the Hessian and spectrum tables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenRow {
    pub rank: usize,
    pub eigenvalue: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionRow {
    pub tau: usize,
    pub projected_distance: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpressRow {
    pub target_id: usize,
    pub min_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub n: usize,
    pub trace_h2: f64,
}

/// Column names of a row type, in declaration order.
pub trait Schema {
    const HEADER: &'static [&'static str];
}

macro_rules! schema {
    ($($ty:ty => [$($col:literal),*]),* $(,)?) => {
        $(impl Schema for $ty {
            const HEADER: &'static [&'static str] = &[$($col),*];
        })*
    };
}

schema! {
    GradientRow => ["n", "L", "component", "variance"],
    NormRow => ["n", "L", "norm_mean", "norm_q1", "norm_q3", "bound"],
    VarianceRow => ["n", "L", "variance_mean", "variance_min", "variance_max", "bound"],
    TrajectoryRow => ["tau", "loss", "error", "fidelity", "grad_norm", "lr"],
    EnsembleRow => ["run_id", "seed", "final_error", "best_tau", "bound_met"],
    EigenRow => ["rank", "eigenvalue"],
    ProjectionRow => ["tau", "projected_distance", "error"],
    ExpressRow => ["target_id", "min_distance"],
    TraceRow => ["n", "trace_h2"],
}

/// Writes a header row and one record per row, LF-terminated.
pub fn write_csv<R: Serialize + Schema>(path: &Path, rows: &[R]) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    w.write_record(R::HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: DeserializeOwned + Schema>(path: &Path) -> CliResult<Vec<R>> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != R::HEADER {
        return Err(anyhow::anyhow!(
            "{}: header {:?} does not match schema {:?}",
            path.display(),
            header,
            R::HEADER
        )
        .into());
    }
    Ok(r.deserialize().collect::<Result<Vec<R>, _>>()?)
}
