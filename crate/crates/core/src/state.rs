//! Unit-norm state vectors over the computational basis.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, tol};

/// A normalized vector of `D` complex amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateVector(Vec<Complex64>);

impl StateVector {
    /// Wraps amplitudes that are already unit norm (within `tol::NORM`).
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm_sqr = numerics::norm_sqr(&amplitudes);
        if (norm_sqr - 1.0).abs() > tol::NORM {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self(amplitudes))
    }

    /// Scales `amplitudes` to unit norm. Fails on the zero vector.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = numerics::norm_sqr(&amplitudes).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized {
                norm_sqr: norm * norm,
            });
        }
        for a in amplitudes.iter_mut() {
            *a /= norm;
        }
        Ok(Self(amplitudes))
    }

    pub(crate) fn from_raw(amplitudes: Vec<Complex64>) -> Self {
        Self(amplitudes)
    }

    /// The computational basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[index] = Complex64::new(1.0, 0.0);
        Ok(Self(v))
    }

    /// Equal superposition over all basis states.
    pub fn uniform(dim: usize) -> Self {
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self(vec![a; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        numerics::norm_sqr(&self.0)
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        numerics::inner(&self.0, &other.0)
    }

    /// `|⟨self|other⟩|²`
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Probability of each basis outcome.
    pub fn probabilities(&self) -> Vec<f64> {
        self.0.iter().map(|a| a.norm_sqr()).collect()
    }
}

impl std::ops::Index<usize> for StateVector {
    type Output = Complex64;

    fn index(&self, index: usize) -> &Complex64 {
        &self.0[index]
    }
}

impl AsRef<[Complex64]> for StateVector {
    fn as_ref(&self) -> &[Complex64] {
        &self.0
    }
}
