use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::hamiltonian::{build_ising, sample_syk_with, MajoranaEncoding, PauliSum, SykCouplings};

/// Target Hamiltonian family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Model {
    Ising {
        g: f64,
    },
    /// `q = 4` SYK with `J = 1`, couplings drawn from `seed`.
    Syk {
        seed: u64,
        #[serde(default)]
        encoding: MajoranaEncoding,
    },
}

impl Model {
    pub fn syk(seed: u64) -> Self {
        Model::Syk {
            seed,
            encoding: MajoranaEncoding::default(),
        }
    }

    pub fn hamiltonian(&self, n: usize) -> Result<PauliSum> {
        match *self {
            Model::Ising { g } => build_ising(n, g),
            Model::Syk { seed, encoding } => {
                sample_syk_with(n, seed, 1.0, encoding).map(|(_, h)| h)
            }
        }
    }

    pub fn syk_couplings(&self, n: usize) -> Option<Result<SykCouplings>> {
        match *self {
            Model::Syk { seed, .. } => Some(SykCouplings::sample(n, seed, 1.0)),
            Model::Ising { .. } => None,
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Ising { g } => write!(f, "ising{{{g}}}"),
            Model::Syk { seed, .. } => write!(f, "syk{{{seed}}}"),
        }
    }
}
