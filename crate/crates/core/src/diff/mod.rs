//! Exact derivatives of the energy and Euclidean losses, the Hessian, and
//! the steep-subspace geometry used for trajectory analysis.

mod adjoint;
mod hessian;

pub use adjoint::{
    energy, energy_and_gradient, energy_gradient, energy_gradient_shift,
    euclidean_loss_and_gradient, GradientVector,
};
pub use hessian::{
    basin_inverse_volume, hessian, projected_distance, top_k_eigensystem, HessianMatrix,
    SteepSubspace, MAX_HESSIAN_PARAMS,
};
