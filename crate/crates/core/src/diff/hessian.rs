use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::adjoint::energy;
use crate::error::{check_dim, Error, Result};
use crate::hamiltonian::PauliSum;
use crate::simcore::CircuitSpec;

/// Largest parameter count for which the Hessian is assembled.
pub const MAX_HESSIAN_PARAMS: usize = 1024;

/// Symmetric matrix of second derivatives `∂_j∂_k E(θ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HessianMatrix(pub DMatrix<f64>);

impl HessianMatrix {
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let m = &self.0;
        (m - m.transpose()).abs().max()
    }
}

/// Top-`k` Hessian eigenpairs, eigenvalues in descending (signed) order.
#[derive(Clone, Debug, PartialEq)]
pub struct SteepSubspace {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
}

impl SteepSubspace {
    pub fn k(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// Hessian by the double parameter-shift rule
/// `H_jk = [E(+s_j+s_k) − E(+s_j−s_k) − E(−s_j+s_k) + E(−s_j−s_k)]/4`, `s = π/2`.
///
/// Only the upper triangle is evaluated; entries are computed in parallel and
/// written back in fixed order.
pub fn hessian(spec: &CircuitSpec, h: &PauliSum, theta: &[f64]) -> Result<HessianMatrix> {
    check_dim(spec.num_params(), theta.len())?;
    check_dim(spec.num_qubits(), h.num_qubits())?;
    let p = theta.len();
    if p > MAX_HESSIAN_PARAMS {
        return Err(Error::Size(format!(
            "Hessian of {p} parameters exceeds limit {MAX_HESSIAN_PARAMS}"
        )));
    }
    let pairs: Vec<(usize, usize)> = (0..p).flat_map(|j| (j..p).map(move |k| (j, k))).collect();
    let values = pairs
        .par_iter()
        .map(|&(j, k)| {
            let mut shifted = theta.to_vec();
            let mut eval = |sj: f64, sk: f64| {
                shifted.copy_from_slice(theta);
                shifted[j] += sj;
                shifted[k] += sk;
                energy(spec, h, &shifted)
            };
            let pp = eval(FRAC_PI_2, FRAC_PI_2)?;
            let pm = eval(FRAC_PI_2, -FRAC_PI_2)?;
            let mp = eval(-FRAC_PI_2, FRAC_PI_2)?;
            let mm = eval(-FRAC_PI_2, -FRAC_PI_2)?;
            Ok(0.25 * (pp - pm - mp + mm))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut m = DMatrix::<f64>::zeros(p, p);
    for (&(j, k), &v) in pairs.iter().zip(&values) {
        m[(j, k)] = v;
        m[(k, j)] = v;
    }
    Ok(HessianMatrix(m))
}

/// Dense symmetric eigendecomposition; keeps the `k` largest eigenvalues.
pub fn top_k_eigensystem(hess: &HessianMatrix, k: usize) -> Result<SteepSubspace> {
    let p = hess.dim();
    if k == 0 || k > p {
        return Err(Error::Index { index: k, limit: p });
    }
    let eig = hess.0.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = order[..k].iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = order[..k]
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    Ok(SteepSubspace {
        eigenvalues,
        eigenvectors,
    })
}

/// `V_k^{-1} = Σ log λᵢ` over the subspace eigenvalues; every one must be positive.
pub fn basin_inverse_volume(subspace: &SteepSubspace) -> Result<f64> {
    subspace
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            if l > 0.0 {
                Ok(l.ln())
            } else {
                Err(Error::Domain { index: i, value: l })
            }
        })
        .sum()
}

/// `‖P(θ_t − θ*)‖` with `P` the orthogonal projector onto the subspace.
/// Differences are taken on raw, unwrapped angles.
pub fn projected_distance(
    theta_t: &[f64],
    theta_star: &[f64],
    subspace: &SteepSubspace,
) -> Result<f64> {
    check_dim(theta_star.len(), theta_t.len())?;
    let delta: Vec<f64> = theta_t.iter().zip(theta_star).map(|(a, b)| a - b).collect();
    let mut total = 0.0;
    for v in &subspace.eigenvectors {
        check_dim(delta.len(), v.len())?;
        let c: f64 = v.iter().zip(&delta).map(|(a, b)| a * b).sum();
        total += c * c;
    }
    Ok(total.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{PauliString, PauliTerm};

    #[test]
    fn single_qubit_curvature() {
        let spec = CircuitSpec::single_qubit(1).unwrap();
        let h = PauliSum::from_terms(1, [PauliTerm::new(1.0, PauliString::parse("X").unwrap())])
            .unwrap();
        let hess = hessian(&spec, &h, &[FRAC_PI_2]).unwrap();
        assert!((hess.0[(0, 0)] + 1.0).abs() < 1e-14);
        let hess = hessian(&spec, &h, &[0.4]).unwrap();
        assert!((hess.0[(0, 0)] + 0.4f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn zero_hamiltonian_gives_zero_hessian() {
        let spec = CircuitSpec::new(2, 2).unwrap();
        let hess = hessian(&spec, &PauliSum::zero(2), &[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!(hess.0.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn hessian_guard() {
        let spec = CircuitSpec::new(2, 513).unwrap();
        let theta = vec![0.0; spec.num_params()];
        assert!(matches!(
            hessian(&spec, &PauliSum::zero(2), &theta),
            Err(Error::Size(_))
        ));
    }

    #[test]
    fn identity_top_three() {
        let hess = HessianMatrix(DMatrix::identity(5, 5));
        let s = top_k_eigensystem(&hess, 3).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 1.0, 1.0]);
        for (i, u) in s.eigenvectors.iter().enumerate() {
            for (j, v) in s.eigenvectors.iter().enumerate() {
                let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
                assert!((dot - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn diagonal_top_two_axes() {
        let hess = HessianMatrix(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            3.0, 2.0, 1.0,
        ])));
        let s = top_k_eigensystem(&hess, 2).unwrap();
        assert_eq!(s.eigenvalues, vec![3.0, 2.0]);
        assert!((s.eigenvectors[0][0].abs() - 1.0).abs() < 1e-12);
        assert!((s.eigenvectors[1][1].abs() - 1.0).abs() < 1e-12);
        assert!(top_k_eigensystem(&hess, 0).is_err());
        assert!(top_k_eigensystem(&hess, 4).is_err());
    }

    #[test]
    fn signed_ordering_not_magnitude() {
        let hess = HessianMatrix(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            -5.0, 1.0, 0.5,
        ])));
        let s = top_k_eigensystem(&hess, 2).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 0.5]);
    }

    #[test]
    fn inverse_volume_examples() {
        let e = std::f64::consts::E;
        let sub = |ev: Vec<f64>| SteepSubspace {
            eigenvectors: vec![vec![0.0]; ev.len()],
            eigenvalues: ev,
        };
        assert_eq!(basin_inverse_volume(&sub(vec![1.0, 1.0])).unwrap(), 0.0);
        assert!((basin_inverse_volume(&sub(vec![e, e * e])).unwrap() - 3.0).abs() < 1e-15);
        assert!(matches!(
            basin_inverse_volume(&sub(vec![2.0, 0.0])),
            Err(Error::Domain { index: 1, .. })
        ));
    }

    #[test]
    fn projection_examples() {
        let s = SteepSubspace {
            eigenvalues: vec![2.0],
            eigenvectors: vec![vec![0.6, 0.8, 0.0]],
        };
        let star = [1.0, 2.0, 3.0];
        assert_eq!(projected_distance(&star, &star, &s).unwrap(), 0.0);
        let along = [1.0 + 0.7 * 0.6, 2.0 + 0.7 * 0.8, 3.0];
        assert!((projected_distance(&along, &star, &s).unwrap() - 0.7).abs() < 1e-12);
        let ortho = [1.0 - 0.8, 2.0 + 0.6, 3.5];
        assert!(projected_distance(&ortho, &star, &s).unwrap() < 1e-12);
        assert!(projected_distance(&[0.0; 2], &star, &s).is_err());
    }
}
