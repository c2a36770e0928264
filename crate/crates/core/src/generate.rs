//! Seeded instance generators for the Hadamard and Gaussian source families.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{self, make_instance, SearchInstance};
use crate::seed;
use crate::state::StateVector;

const MAX_ATTEMPTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Rows of the Hadamard transform, `ℋ|n⟩`; requires `D = 2^q`.
    Hadamard,
    /// Orthonormalized standard complex Gaussian vectors.
    Random,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hadamard" => Ok(Family::Hadamard),
            "random" => Ok(Family::Random),
            other => Err(Error::Parse(format!("unknown source family '{other}'"))),
        }
    }
}

/// Everything needed to regenerate an instance bit-for-bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecipe {
    pub d: usize,
    pub n: usize,
    pub m: usize,
    pub family: Family,
    /// Hadamard indices; drawn uniformly when absent.
    pub sources: Option<Vec<usize>>,
    /// Target indices; drawn uniformly when absent.
    pub targets: Option<Vec<usize>>,
    pub seed: u64,
}

impl InstanceRecipe {
    pub fn hadamard(d: usize, n: usize, m: usize, seed: u64) -> Self {
        Self {
            d,
            n,
            m,
            family: Family::Hadamard,
            sources: None,
            targets: None,
            seed,
        }
    }

    pub fn random(d: usize, n: usize, m: usize, seed: u64) -> Self {
        Self {
            family: Family::Random,
            ..Self::hadamard(d, n, m, seed)
        }
    }

    /// True when some component is drawn from the seed.
    pub fn is_stochastic(&self) -> bool {
        self.targets.is_none() || self.family == Family::Random || self.sources.is_none()
    }

    /// Builds the instance, redrawing the random parts when a draw violates
    /// the instance preconditions.
    pub fn build(&self) -> Result<SearchInstance> {
        if self.n + self.m > self.d {
            return Err(Error::InfeasibleSize {
                total: self.n + self.m,
                dim: self.d,
            });
        }
        if let Some(t) = &self.targets {
            if t.len() != self.m {
                return Err(Error::DimensionMismatch(format!(
                    "{} target indices given for M = {}",
                    t.len(),
                    self.m
                )));
            }
        }
        if let Some(s) = &self.sources {
            if self.family == Family::Random {
                return Err(Error::DimensionMismatch(
                    "explicit source indices only apply to the hadamard family".into(),
                ));
            }
            if s.len() != self.n {
                return Err(Error::DimensionMismatch(format!(
                    "{} source indices given for N = {}",
                    s.len(),
                    self.n
                )));
            }
        }
        let attempts = if self.is_stochastic() {
            MAX_ATTEMPTS
        } else {
            1
        };
        for attempt in 0..attempts {
            match self.attempt(attempt as u64) {
                Ok(inst) => return Ok(inst),
                Err(
                    Error::RankViolation { .. }
                    | Error::OrthogonalToTargets { .. }
                    | Error::RankDeficient { .. },
                ) if attempts > 1 => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::GenerationFailed { attempts })
    }

    fn attempt(&self, attempt: u64) -> Result<SearchInstance> {
        let mut rng = seed::substream_rng(self.seed, attempt);
        let sources: Vec<StateVector> = match self.family {
            Family::Hadamard => {
                if !self.d.is_power_of_two() {
                    return Err(Error::DimensionMismatch(format!(
                        "hadamard sources need D = 2^q, got {}",
                        self.d
                    )));
                }
                let idx = match &self.sources {
                    Some(s) => s.clone(),
                    None => sample_indices(&mut rng, self.d, self.n),
                };
                instance::hadamard_sources(self.d.trailing_zeros(), &idx)?
            }
            Family::Random => {
                let s: u64 = rng.random();
                instance::random_orthonormal_sources(self.d, self.n, s)?
            }
        };
        let targets = match &self.targets {
            Some(t) => t.clone(),
            None => sample_indices(&mut rng, self.d, self.m),
        };
        let raw: Vec<_> = sources
            .into_iter()
            .map(StateVector::into_amplitudes)
            .collect();
        make_instance(self.d, &raw, &targets)
    }
}

/// `amount` distinct indices from `0..len`, sorted.
fn sample_indices<R: Rng + ?Sized>(rng: &mut R, len: usize, amount: usize) -> Vec<usize> {
    let mut v = index::sample(rng, len, amount).into_vec();
    v.sort_unstable();
    v
}
