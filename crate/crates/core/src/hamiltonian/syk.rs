use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::pauli::{Pauli, PauliString, PauliSum, PauliTerm};
use crate::error::{Error, Result};

/// Jordan–Wigner image of Majorana `index` (1-based, `1..=2n`).
///
/// `γ_{2k−1} = 2^{−1/2}·Z₁···Z_{k−1}·X_k` and `γ_{2k} = 2^{−1/2}·Z₁···Z_{k−1}·Y_k`,
/// so that `{γᵢ, γⱼ} = δᵢⱼ`.
pub fn majorana_string(index: usize, n: usize) -> Result<PauliTerm> {
    if index == 0 || index > 2 * n {
        return Err(Error::Index {
            index,
            limit: 2 * n,
        });
    }
    let site = (index - 1) / 2;
    let mut s = PauliString::identity(n);
    for q in 0..site {
        s.set(q, Pauli::Z);
    }
    s.set(site, if index % 2 == 1 { Pauli::X } else { Pauli::Y });
    Ok(PauliTerm::new(std::f64::consts::FRAC_1_SQRT_2, s))
}

/// Qubit image of the `2n` Majorana operators.
///
/// `JordanWigner` follows [`majorana_string`]. `Real` picks generators that are
/// all real or all imaginary matrices so every four-fold product is a real
/// matrix; it exists for `n mod 4 ∈ {0, 1, 3}` and falls back to
/// Jordan–Wigner otherwise. Both encodings give unitarily equivalent
/// Hamiltonians.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MajoranaEncoding {
    JordanWigner,
    #[default]
    Real,
}

const REAL_1: [&str; 2] = ["Z", "X"];
const IMAG_3: [&str; 6] = ["YII", "ZYI", "XYZ", "ZZY", "XIY", "ZXY"];
const REAL_4: [&str; 8] = [
    "ZIII", "XIII", "YYII", "YZYI", "YXYZ", "YZZY", "YXIY", "YZXY",
];
const IMAG_4: [&str; 8] = [
    "YIII", "ZYII", "XYZI", "ZZYI", "XIYI", "ZXYI", "XYXZ", "XYXX",
];

fn parse_all(labels: &[&str]) -> Vec<PauliString> {
    labels
        .iter()
        .map(|l| PauliString::parse(l).expect("static label"))
        .collect()
}

/// Places `low` on the first qubits and `high` on the following ones.
fn concat(low: &PauliString, high: &PauliString) -> PauliString {
    let m = low.num_qubits();
    let mut s = PauliString::identity(m + high.num_qubits());
    for q in 0..m {
        s.set(q, low.get(q));
    }
    for q in 0..high.num_qubits() {
        s.set(m + q, high.get(q));
    }
    s
}

/// `2n` anticommuting strings with uniform Y-parity, plus that parity.
///
/// Grows by four qubits at a time: with a block `b₁..b₈` of the same parity
/// and `ω = b₁···b₈`, the set `{aᵢ⊗ω} ∪ {I⊗bⱼ}` is again anticommuting.
fn uniform_parity_generators(n: usize) -> Option<(Vec<PauliString>, u32)> {
    match n {
        1 => Some((parse_all(&REAL_1), 0)),
        3 => Some((parse_all(&IMAG_3), 1)),
        4 => Some((parse_all(&REAL_4), 0)),
        _ if n >= 5 => {
            let (base, parity) = uniform_parity_generators(n - 4)?;
            let block = parse_all(if parity == 0 { &REAL_4 } else { &IMAG_4 });
            let omega = block[1..].iter().fold(block[0], |acc, b| acc.mul(b).1);
            let id = PauliString::identity(base[0].num_qubits());
            let mut out: Vec<_> = base.iter().map(|a| concat(a, &omega)).collect();
            out.extend(block.iter().map(|b| concat(&id, b)));
            Some((out, parity))
        }
        _ => None,
    }
}

/// The `2n` Majorana strings under `encoding`; each carries weight `2^{−1/2}`.
pub fn majorana_strings(n: usize, encoding: MajoranaEncoding) -> Result<Vec<PauliString>> {
    if encoding == MajoranaEncoding::Real {
        if let Some((set, _)) = uniform_parity_generators(n) {
            return Ok(set);
        }
    }
    (1..=2 * n)
        .map(|i| majorana_string(i, n).map(|t| t.string))
        .collect()
}

/// Gaussian couplings `J_{i₁i₂i₃i₄}` of a `q = 4` SYK instance on `2n`
/// Majoranas.
///
/// Serializes as `{n, q, seed, entries: [[i1, i2, i3, i4, value], ...]}` with
/// 1-based ascending indices; `serde_json` writes shortest round-trip floats
/// so a reload is bit-exact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SykCouplings {
    pub n: usize,
    pub q: usize,
    pub seed: u64,
    pub entries: Vec<(usize, usize, usize, usize, f64)>,
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Coupling variance `J²·(q−1)!/(2n)^{q−1}` at `q = 4`.
pub fn syk_coupling_variance(n: usize, coupling_scale: f64) -> f64 {
    coupling_scale * coupling_scale * 6.0 / ((2 * n) as f64).powi(3)
}

impl SykCouplings {
    /// Draws every coupling in lexicographic index order from one seeded stream.
    pub fn sample(n: usize, seed: u64, coupling_scale: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Size(format!("SYK needs n >= 2, got {n}")));
        }
        let std = syk_coupling_variance(n, coupling_scale).sqrt();
        let normal = Normal::new(0.0, std).map_err(|e| Error::Config(e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = 2 * n;
        let mut entries = Vec::with_capacity(binomial(m, 4));
        for a in 1..=m {
            for b in a + 1..=m {
                for c in b + 1..=m {
                    for d in c + 1..=m {
                        entries.push((a, b, c, d, normal.sample(&mut rng)));
                    }
                }
            }
        }
        Ok(Self {
            n,
            q: 4,
            seed,
            entries,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.q != 4 {
            return Err(Error::Config(format!(
                "only q = 4 is supported, got {}",
                self.q
            )));
        }
        let expected = binomial(2 * self.n, 4);
        if self.entries.len() != expected {
            return Err(Error::Dimension {
                expected,
                actual: self.entries.len(),
            });
        }
        for &(a, b, c, d, _) in &self.entries {
            if !(1 <= a && a < b && b < c && c < d && d <= 2 * self.n) {
                return Err(Error::Config(format!(
                    "invalid coupling index ({a},{b},{c},{d})"
                )));
            }
        }
        Ok(())
    }

    /// `H = i^{q/2}·Σ J·γγγγ = −Σ J_{abcd}·γ_aγ_bγ_cγ_d` as a Pauli sum under
    /// the Jordan–Wigner encoding.
    pub fn to_pauli_sum(&self) -> Result<PauliSum> {
        self.to_pauli_sum_with(MajoranaEncoding::JordanWigner)
    }

    pub fn to_pauli_sum_with(&self, encoding: MajoranaEncoding) -> Result<PauliSum> {
        self.validate()?;
        let n = self.n;
        let gammas = majorana_strings(n, encoding)?;
        let mut terms = Vec::with_capacity(self.entries.len());
        for &(a, b, c, d, value) in &self.entries {
            let (k1, ab) = gammas[a - 1].mul(&gammas[b - 1]);
            let (k2, abc) = ab.mul(&gammas[c - 1]);
            let (k3, abcd) = abc.mul(&gammas[d - 1]);
            // i^{q/2} = i² contributes two more quarter turns.
            let phase = (k1 + k2 + k3 + 2) % 4;
            let sign = match phase {
                0 => 1.0,
                2 => -1.0,
                _ => {
                    return Err(Error::Consistency(format!(
                        "Majorana product ({a},{b},{c},{d}) has imaginary coefficient"
                    )))
                }
            };
            // (2^{-1/2})^4 = 1/4
            terms.push(PauliTerm::new(sign * 0.25 * value, abcd));
        }
        PauliSum::from_terms(n, terms)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serde(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text).map_err(|e| Error::Serde(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }
}

/// Samples an SYK instance and assembles its Jordan–Wigner Hamiltonian.
pub fn sample_syk(n: usize, seed: u64, coupling_scale: f64) -> Result<(SykCouplings, PauliSum)> {
    sample_syk_with(n, seed, coupling_scale, MajoranaEncoding::JordanWigner)
}

pub fn sample_syk_with(
    n: usize,
    seed: u64,
    coupling_scale: f64,
    encoding: MajoranaEncoding,
) -> Result<(SykCouplings, PauliSum)> {
    let couplings = SykCouplings::sample(n, seed, coupling_scale)?;
    let h = couplings.to_pauli_sum_with(encoding)?;
    Ok((couplings, h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_majorana_is_bare_x() {
        let g = majorana_string(1, 2).unwrap();
        assert_eq!(g.coefficient, std::f64::consts::FRAC_1_SQRT_2);
        assert_eq!(g.string.to_string(), "XI");
        assert_eq!(majorana_string(4, 2).unwrap().string.to_string(), "ZY");
        assert!(majorana_string(0, 2).is_err());
        assert!(majorana_string(5, 2).is_err());
    }

    fn anticommute(a: &PauliString, b: &PauliString) -> bool {
        let (k1, p1) = a.mul(b);
        let (k2, p2) = b.mul(a);
        p1 == p2 && (k1 + 2) % 4 == k2
    }

    #[test]
    fn real_encoding_generators_anticommute_with_uniform_parity() {
        for n in 1..=12 {
            let Some((set, parity)) = uniform_parity_generators(n) else {
                assert!(matches!(n, 2 | 6 | 10), "missing real encoding at n = {n}");
                continue;
            };
            assert_eq!(set.len(), 2 * n);
            for (i, a) in set.iter().enumerate() {
                assert_eq!(a.num_qubits(), n);
                assert_eq!(a.y_count() % 2, parity, "n = {n}, {a}");
                for b in &set[i + 1..] {
                    assert!(anticommute(a, b), "n = {n}: {a} and {b} commute");
                }
            }
        }
    }

    #[test]
    fn real_encoding_gives_real_hamiltonian() {
        for n in [2, 3, 4, 5] {
            let c = SykCouplings::sample(n, 11, 1.0).unwrap();
            let h = c.to_pauli_sum_with(MajoranaEncoding::Real).unwrap();
            assert!(
                h.terms().iter().all(|t| t.string.y_count() % 2 == 0),
                "n = {n}"
            );
        }
    }

    #[test]
    fn coupling_count_and_determinism() {
        let a = SykCouplings::sample(4, 3, 1.0).unwrap();
        assert_eq!(a.entries.len(), 70);
        assert_eq!(a, SykCouplings::sample(4, 3, 1.0).unwrap());
        assert_ne!(a, SykCouplings::sample(4, 4, 1.0).unwrap());
    }

    #[test]
    fn json_roundtrip_is_bit_exact() {
        let a = SykCouplings::sample(3, 17, 1.0).unwrap();
        let b = SykCouplings::from_json(&a.to_json().unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(SykCouplings::from_json(r#"{"n":2,"q":4,"seed":0,"entries":[]}"#).is_err());
    }

    #[test]
    fn no_identity_string() {
        let (_, h) = sample_syk(4, 1, 1.0).unwrap();
        assert!(h.terms().iter().all(|t| !t.string.is_identity()));
    }

    #[test]
    fn trace_per_dim_is_sum_of_squared_couplings_over_16() {
        let (c, h) = sample_syk(4, 8, 1.0).unwrap();
        let expected: f64 = c.entries.iter().map(|e| e.4 * e.4).sum::<f64>() / 16.0;
        assert!((h.trace_h_squared() / 16.0 - expected).abs() < 1e-14);
    }

    #[test]
    fn coupling_variance_statistics() {
        // 10^4 draws at n = 4: 143 instances of 70 couplings.
        let mut values = Vec::new();
        let mut seed = 0;
        while values.len() < 10_000 {
            let c = SykCouplings::sample(4, seed, 1.0).unwrap();
            values.extend(c.entries.iter().map(|e| e.4));
            seed += 1;
        }
        values.truncate(10_000);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let var =
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
        let target = 6.0 / 512.0;
        assert!(
            (var / target - 1.0).abs() < 0.05,
            "variance {var} vs {target}"
        );
    }
}
