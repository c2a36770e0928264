//! Dense complex kernels: Hermitian eigendecomposition, orthonormalization,
//! inner products and norms.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`; vectors are plain slices of
//! `Complex64` so that state vectors and matrix columns share one code path.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::StateVector;

pub type ComplexMatrix = DMatrix<Complex64>;

/// Numerical tolerances shared across the crate.
pub mod tol {
    /// Maximum `|m - m^H|` entry accepted by [`super::hermitian_eig`].
    pub const HERMITIAN: f64 = 1e-10;
    /// Relative pivot below which Gram-Schmidt reports rank deficiency.
    pub const RANK_PIVOT: f64 = 1e-10;
    /// Reconstruction / eigen-equation residual scale.
    pub const RECONSTRUCTION: f64 = 1e-9;
    /// Allowed deviation of `‖ψ‖²` from one.
    pub const NORM: f64 = 1e-12;
    /// Eigenvalues of `P_T P_S P_T` below this are treated as exact zeros.
    pub const ZERO_MODE: f64 = 1e-12;
    /// Minimum `⟨ψ|P_T|ψ⟩` for a source to count as overlapping the targets.
    pub const TARGET_OVERLAP: f64 = 1e-12;
    /// Principal-angle cosines must stay below `1 - RANK_MARGIN`.
    pub const RANK_MARGIN: f64 = 1e-10;
    /// Branch norm below which a measurement branch is considered absent.
    pub const EMPTY_BRANCH: f64 = 1e-15;
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `⟨a|b⟩ = Σ conj(a_i) b_i`
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(ZERO, |acc, (x, y)| acc + x.conj() * y)
}

pub fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// `y += alpha * x`
pub fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Largest entry magnitude.
pub fn max_entry(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// `max |m - m^H|` entry.
pub fn hermiticity_residual(m: &ComplexMatrix) -> f64 {
    max_entry(&(m - m.adjoint()))
}

/// Rotates `v` by a global phase so its largest-magnitude component is real
/// and nonnegative. Near-ties resolve to the lowest index.
pub fn normalize_phase(v: &mut [Complex64]) {
    let max = v.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-10))
        .expect("max is attained");
    let phase = v[pivot].conj() / v[pivot].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
    v[pivot] = Complex64::new(v[pivot].norm(), 0.0);
}

/// Eigenvalues ascending, eigenvectors as matching columns of a unitary.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Column `i` as an owned vector.
    pub fn vector(&self, i: usize) -> Vec<Complex64> {
        self.eigenvectors.column(i).iter().copied().collect()
    }

    /// `V Λ V^H`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(j).scale_mut(lambda);
        }
        scaled * v.adjoint()
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues come back ascending (stable for ties) and each eigenvector has
/// its largest component real and nonnegative, so identical inputs always
/// give identical outputs.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    let (rows, cols) = m.shape();
    if rows != cols {
        return Err(Error::NonSquare { rows, cols });
    }
    let residual = hermiticity_residual(m);
    if !(residual <= tol::HERMITIAN) {
        return Err(Error::NonHermitian { residual });
    }
    if rows == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: Vec::new(),
            eigenvectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();

    let mut order: Vec<usize> = (0..rows).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(rows, rows);
    for (j, &i) in order.iter().enumerate() {
        let mut col: Vec<Complex64> = eig.eigenvectors.column(i).iter().copied().collect();
        normalize_phase(&mut col);
        eigenvectors.column_mut(j).copy_from_slice(&col);
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Modified Gram-Schmidt with one reorthogonalization pass.
///
/// Output vector `k` spans the same space as inputs `0..=k`. A vector whose
/// residual after projection falls below `tol::RANK_PIVOT` times its original
/// norm is reported as [`Error::RankDeficient`].
pub fn orthonormalize(vectors: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>> {
    let Some(dim) = vectors.first().map(Vec::len) else {
        return Ok(Vec::new());
    };
    if let Some(bad) = vectors.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} among vectors of length {dim}",
            bad.len()
        )));
    }
    if vectors.len() > dim {
        return Err(Error::RankDeficient {
            index: dim,
            pivot: 0.0,
        });
    }

    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(vectors.len());
    for (index, v) in vectors.iter().enumerate() {
        let original = norm_sqr(v).sqrt();
        if !(original > 0.0) || !original.is_finite() {
            return Err(Error::RankDeficient { index, pivot: 0.0 });
        }
        let mut w = v.clone();
        for _pass in 0..2 {
            for q in &basis {
                let proj = inner(q, &w);
                axpy(-proj, q, &mut w);
            }
        }
        let norm = norm_sqr(&w).sqrt();
        let pivot = norm / original;
        if pivot < tol::RANK_PIVOT {
            return Err(Error::RankDeficient { index, pivot });
        }
        for z in w.iter_mut() {
            *z /= norm;
        }
        basis.push(w);
    }
    Ok(basis)
}

/// `‖P_T ψ‖² = Σ_{x∈T} |ψ_x|²`
pub fn target_projection_norm(state: &StateVector, targets: &[usize]) -> Result<f64> {
    let dim = state.dim();
    targets.iter().try_fold(0.0, |acc, &x| {
        if x >= dim {
            Err(Error::IndexOutOfRange { index: x, dim })
        } else {
            Ok(acc + state[x].norm_sqr())
        }
    })
}

/// Gram matrix `G_ij = ⟨v_i|v_j⟩`.
pub fn gram(vectors: &[Vec<Complex64>]) -> ComplexMatrix {
    let n = vectors.len();
    ComplexMatrix::from_fn(n, n, |i, j| inner(&vectors[i], &vectors[j]))
}
