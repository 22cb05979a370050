use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{check_dim, Error, Result};

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 14;

/// Pure state of an `n`-qubit register.
///
/// Amplitude `i` belongs to the computational basis state whose bit `b` is the
/// value of qubit `b`; qubit 0 is the least significant bit.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

fn check_qubits(n: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::Size(format!(
            "qubit count {n} outside supported range 1..={MAX_QUBITS}"
        )))
    }
}

impl StateVector {
    /// `|0...0⟩` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_qubits(n)?;
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::Index { index, limit: dim });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// Wraps raw amplitudes. The length must be a power of two; no normalization
    /// is applied.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::Size(format!(
                "amplitude count {dim} is not a power of two >= 2"
            )));
        }
        let n = dim.trailing_zeros() as usize;
        check_qubits(n)?;
        Ok(Self { n, amps })
    }

    /// Haar-distributed pure state: `2^n` i.i.d. standard complex Gaussians,
    /// normalized. Deterministic in `seed`.
    pub fn haar_random(n: usize, seed: u64) -> Result<Self> {
        check_qubits(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..1usize << n)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im)
            })
            .collect();
        let mut state = Self { n, amps };
        state.normalize();
        Ok(state)
    }

    /// Uniformly distributed real unit vector (real Gaussians, normalized).
    ///
    /// The layered RY/CZ circuit only ever produces real amplitudes, so this is
    /// the invariant ensemble over the states it can actually reach.
    pub fn real_random(n: usize, seed: u64) -> Result<Self> {
        check_qubits(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..1usize << n)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, 0.0)
            })
            .collect();
        let mut state = Self { n, amps };
        state.normalize();
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        if norm > 0.0 {
            let inv = 1.0 / norm;
            self.amps.iter_mut().for_each(|a| *a *= inv);
        }
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit < self.n {
            Ok(())
        } else {
            Err(Error::Index {
                index: qubit,
                limit: self.n,
            })
        }
    }

    /// Applies `RY(angle) = exp(-i·angle·σʸ/2)` to `qubit`.
    pub fn apply_ry(&mut self, qubit: usize, angle: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        self.ry_unchecked(qubit, angle);
        Ok(())
    }

    /// Applies controlled-Z between qubits `a` and `b`.
    pub fn apply_cz(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(Error::Index {
                index: b,
                limit: self.n,
            });
        }
        self.cz_unchecked(a, b);
        Ok(())
    }

    pub(crate) fn ry_unchecked(&mut self, qubit: usize, angle: f64) {
        let (s, c) = (0.5 * angle).sin_cos();
        let stride = 1usize << qubit;
        for block in self.amps.chunks_exact_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x0, x1) = (*a0, *a1);
                *a0 = x0 * c - x1 * s;
                *a1 = x0 * s + x1 * c;
            }
        }
    }

    /// Multiplies by `-i·σʸ/2` on `qubit`, the generator appearing in `∂RY/∂θ`.
    #[cfg(test)]
    fn ry_generator_unchecked(&mut self, qubit: usize) {
        // -i/2 · [[0, -i], [i, 0]] = 1/2 · [[0, -1], [1, 0]]
        let stride = 1usize << qubit;
        for block in self.amps.chunks_exact_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x0, x1) = (*a0, *a1);
                *a0 = -0.5 * x1;
                *a1 = 0.5 * x0;
            }
        }
    }

    /// `⟨bra| G_q |self⟩` with `G_q = −i·σʸ_q/2`, without materializing `G_q|self⟩`.
    pub(crate) fn generator_overlap(&self, bra: &[Complex64], qubit: usize) -> Complex64 {
        let stride = 1usize << qubit;
        let mut acc = Complex64::new(0.0, 0.0);
        for (kb, ks) in bra
            .chunks_exact(2 * stride)
            .zip(self.amps.chunks_exact(2 * stride))
        {
            let (b0, b1) = kb.split_at(stride);
            let (s0, s1) = ks.split_at(stride);
            for i in 0..stride {
                acc += b1[i].conj() * s0[i] - b0[i].conj() * s1[i];
            }
        }
        0.5 * acc
    }

    pub(crate) fn cz_unchecked(&mut self, a: usize, b: usize) {
        let mask = (1usize << a) | (1usize << b);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *amp = -*amp;
            }
        }
    }

    /// `⟨self|other⟩ = Σ conj(selfᵢ)·otherᵢ`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(x, y)| x.conj() * y)
            .sum())
    }

    /// Raw Euclidean distance `‖self − other‖`, no phase alignment.
    pub fn euclidean_distance(&self, other: &StateVector) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// `min_φ ‖self − e^{iφ}·other‖` for unit vectors. Diagnostic only.
    pub fn phase_aligned_distance(&self, other: &StateVector) -> Result<f64> {
        let overlap = self.inner(other)?.norm();
        let d2 = self.norm_sqr() + other.norm_sqr() - 2.0 * overlap;
        Ok(d2.max(0.0).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn assert_amps(state: &StateVector, expected: &[Complex64], tol: f64) {
        assert_eq!(state.dim(), expected.len());
        for (i, (a, e)) in state.amplitudes().iter().zip(expected).enumerate() {
            assert!((a - e).norm() <= tol, "amp {i}: {a} vs {e}");
        }
    }

    #[test]
    fn zero_state_examples() {
        assert_amps(&StateVector::zero(1).unwrap(), &[c(1.0), c(0.0)], 0.0);
        assert_amps(
            &StateVector::zero(2).unwrap(),
            &[c(1.0), c(0.0), c(0.0), c(0.0)],
            0.0,
        );
        assert_eq!(StateVector::zero(3).unwrap().norm_sqr(), 1.0);
        assert!(matches!(StateVector::zero(0), Err(Error::Size(_))));
        assert!(matches!(StateVector::zero(15), Err(Error::Size(_))));
    }

    #[test]
    fn ry_examples() {
        let mut s = StateVector::haar_random(3, 4).unwrap();
        let before = s.clone();
        s.apply_ry(1, 0.0).unwrap();
        assert_eq!(s, before);

        let mut s = StateVector::zero(1).unwrap();
        s.apply_ry(0, PI / 2.0).unwrap();
        assert_amps(&s, &[c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)], 1e-15);

        let mut s = StateVector::zero(1).unwrap();
        s.apply_ry(0, PI).unwrap();
        assert_amps(&s, &[c(0.0), c(1.0)], 1e-15);

        assert!(matches!(s.apply_ry(1, 0.3), Err(Error::Index { .. })));
    }

    #[test]
    fn cz_examples() {
        let mut s = StateVector::zero(2).unwrap();
        s.apply_cz(0, 1).unwrap();
        assert_eq!(s, StateVector::zero(2).unwrap());

        let mut s = StateVector::basis(2, 3).unwrap();
        s.apply_cz(0, 1).unwrap();
        assert_amps(&s, &[c(0.0), c(0.0), c(0.0), c(-1.0)], 0.0);

        let mut s = StateVector::haar_random(3, 9).unwrap();
        let before = s.clone();
        s.apply_cz(0, 2).unwrap();
        s.apply_cz(0, 2).unwrap();
        assert_eq!(s, before);

        assert!(s.apply_cz(1, 1).is_err());
        assert!(s.apply_cz(0, 3).is_err());
    }

    #[test]
    fn inner_product_examples() {
        let psi = StateVector::haar_random(3, 1).unwrap();
        assert!((psi.inner(&psi).unwrap() - c(1.0)).norm() < 1e-12);

        let a = StateVector::basis(2, 0).unwrap();
        let b = StateVector::basis(2, 3).unwrap();
        assert_eq!(a.inner(&b).unwrap(), c(0.0));

        let phi = StateVector::haar_random(3, 2).unwrap();
        let ab = psi.inner(&phi).unwrap();
        let ba = phi.inner(&psi).unwrap();
        assert!((ab.conj() - ba).norm() < 1e-14);

        assert!(matches!(
            psi.inner(&a),
            Err(Error::Dimension {
                expected: 8,
                actual: 4
            })
        ));
    }

    #[test]
    fn haar_state_is_normalized_and_deterministic() {
        let a = StateVector::haar_random(5, 77).unwrap();
        let b = StateVector::haar_random(5, 77).unwrap();
        assert!((a.norm_sqr() - 1.0).abs() < 1e-12);
        assert_eq!(a, b);
        assert_ne!(a, StateVector::haar_random(5, 78).unwrap());
    }

    #[test]
    fn haar_first_moment_matches_uniform_value() {
        // E|⟨0|φ⟩|² = 2^-n for Haar φ; check within three standard errors.
        let samples = 10_000;
        let p: Vec<f64> = (0..samples)
            .map(|s| StateVector::haar_random(2, s).unwrap().amplitudes()[0].norm_sqr())
            .collect();
        let mean = p.iter().sum::<f64>() / samples as f64;
        let var = p.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (samples as f64 - 1.0);
        let se = (var / samples as f64).sqrt();
        assert!((mean - 0.25).abs() < 3.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn distance_examples() {
        let psi = StateVector::haar_random(2, 5).unwrap();
        assert_eq!(psi.euclidean_distance(&psi).unwrap(), 0.0);

        let zero = StateVector::basis(1, 0).unwrap();
        let one = StateVector::basis(1, 1).unwrap();
        assert!((zero.euclidean_distance(&one).unwrap() - 2f64.sqrt()).abs() < 1e-15);

        let neg =
            StateVector::from_amplitudes(psi.amplitudes().iter().map(|a| -a).collect()).unwrap();
        assert!((psi.euclidean_distance(&neg).unwrap() - 2.0).abs() < 1e-12);
        assert!(psi.phase_aligned_distance(&neg).unwrap() < 1e-6);
    }

    #[test]
    fn generator_overlap_matches_explicit_product() {
        let bra = StateVector::haar_random(3, 21).unwrap();
        let ket = StateVector::haar_random(3, 22).unwrap();
        for q in 0..3 {
            let mut g = ket.clone();
            g.ry_generator_unchecked(q);
            let direct = bra.inner(&g).unwrap();
            let fused = ket.generator_overlap(bra.amplitudes(), q);
            assert!((direct - fused).norm() < 1e-15);
        }
    }

    #[test]
    fn real_random_has_no_imaginary_part() {
        let s = StateVector::real_random(4, 3).unwrap();
        assert!(s.amplitudes().iter().all(|a| a.im == 0.0));
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }
}
