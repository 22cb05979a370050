//! Drivers for the gradient-statistics, VQE, landscape and expressibility
//! studies. All randomness flows from a master seed through [`derive_seed`].

mod barren;
mod express;
mod landscape;
mod model;
mod seeds;
mod vqe;

pub use barren::{estimate_growth_rate, run_barren_plateau, GradientStats};
pub use express::{
    expressibility_for_targets, run_expressibility, DistanceObjective, ExpressOptions,
    ExpressibilityResult, TargetEnsemble,
};
pub use landscape::{run_trajectory_analysis, LandscapeAnalysis, ProjectionPoint};
pub use model::Model;
pub use seeds::{derive_seed, Stream};
pub use vqe::{
    run_vqe, run_vqe_ensemble, EnsembleEntry, EnsembleOptions, VqeOptions, VqeProblem,
    VqeRunRecord, ERROR_BOUND_REL,
};
