//! Search problems: a source subspace spanned by `N` orthonormal vectors and
//! `M` computational-basis targets, together with the two reflections and the
//! Hamiltonian `H = P_S + P_T`.

use std::path::Path;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, tol, ComplexMatrix};
use crate::seed;
use crate::state::StateVector;

/// Draws of Gaussian vectors before giving up on a full-rank set.
const MAX_GAUSSIAN_DRAWS: usize = 8;

/// A validated search instance. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchInstance {
    dim: usize,
    sources: Vec<StateVector>,
    /// Sorted ascending.
    targets: Vec<usize>,
    is_target: Vec<bool>,
}

/// Builds an instance from raw source vectors and target indices.
///
/// Sources are orthonormalized first; the instance is then checked for
/// overlap with the target space and for a trivial intersection of the two
/// subspaces (all principal cosines strictly below one).
pub fn make_instance(
    dim: usize,
    sources: &[Vec<Complex64>],
    targets: &[usize],
) -> Result<SearchInstance> {
    if dim == 0 || sources.is_empty() || targets.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "need D > 0, N > 0 and M > 0 (got D={dim}, N={}, M={})",
            sources.len(),
            targets.len()
        )));
    }
    if let Some(v) = sources.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch(format!(
            "source of length {} in dimension {dim}",
            v.len()
        )));
    }
    let mut is_target = vec![false; dim];
    for &t in targets {
        if t >= dim {
            return Err(Error::IndexOutOfRange { index: t, dim });
        }
        if is_target[t] {
            return Err(Error::DuplicateTarget(t));
        }
        is_target[t] = true;
    }
    if sources.len() + targets.len() > dim {
        return Err(Error::DimensionMismatch(format!(
            "N + M = {} exceeds D = {dim}",
            sources.len() + targets.len()
        )));
    }

    let sources: Vec<StateVector> = numerics::orthonormalize(sources)?
        .into_iter()
        .map(StateVector::from_raw)
        .collect();
    let mut sorted = targets.to_vec();
    sorted.sort_unstable();
    let inst = SearchInstance {
        dim,
        sources,
        targets: sorted,
        is_target,
    };

    for (n, psi) in inst.sources.iter().enumerate() {
        if !(inst.target_weight(psi) > tol::TARGET_OVERLAP) {
            return Err(Error::OrthogonalToTargets { source_index: n });
        }
    }
    let c_max = inst.max_overlap();
    if !(c_max < 1.0 - tol::RANK_MARGIN) {
        return Err(Error::RankViolation { c: c_max });
    }
    Ok(inst)
}

impl SearchInstance {
    pub fn new(dim: usize, sources: &[Vec<Complex64>], targets: &[usize]) -> Result<Self> {
        make_instance(dim, sources, targets)
    }

    /// Convenience constructor from already-built state vectors.
    pub fn from_states(dim: usize, sources: &[StateVector], targets: &[usize]) -> Result<Self> {
        let raw: Vec<Vec<Complex64>> = sources.iter().map(|s| s.amplitudes().to_vec()).collect();
        make_instance(dim, &raw, targets)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of sources `N`.
    pub fn n(&self) -> usize {
        self.sources.len()
    }

    /// Number of targets `M`.
    pub fn m(&self) -> usize {
        self.targets.len()
    }

    pub fn sources(&self) -> &[StateVector] {
        &self.sources
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn is_target(&self, x: usize) -> bool {
        self.is_target.get(x).copied().unwrap_or(false)
    }

    /// Basis indices outside the target set, ascending.
    pub fn non_targets(&self) -> Vec<usize> {
        (0..self.dim).filter(|&x| !self.is_target[x]).collect()
    }

    /// `⟨ψ|P_T|ψ⟩`
    pub fn target_weight(&self, state: &StateVector) -> f64 {
        self.targets.iter().map(|&x| state[x].norm_sqr()).sum()
    }

    /// `P_T P_S P_T` restricted to the target block, `M×M`, rows and columns
    /// ordered like [`Self::targets`].
    pub fn target_overlap_matrix(&self) -> ComplexMatrix {
        let m = self.m();
        let mut k = ComplexMatrix::zeros(m, m);
        for psi in &self.sources {
            for (i, &ti) in self.targets.iter().enumerate() {
                let a = psi[ti];
                for (j, &tj) in self.targets.iter().enumerate() {
                    k[(i, j)] += a * psi[tj].conj();
                }
            }
        }
        k
    }

    /// `P_S P_T P_S` in the source basis, `N×N`: `G_nk = ⟨ψ_n|P_T|ψ_k⟩`.
    pub fn source_overlap_matrix(&self) -> ComplexMatrix {
        let n = self.n();
        ComplexMatrix::from_fn(n, n, |a, b| {
            self.targets
                .iter()
                .map(|&x| self.sources[a][x].conj() * self.sources[b][x])
                .sum()
        })
    }

    /// Largest principal-angle cosine between the source and target spaces.
    fn max_overlap(&self) -> f64 {
        // Validation runs before any spectrum exists; the overlap matrix is
        // Hermitian by construction so the eigensolver cannot fail.
        let eig = numerics::hermitian_eig(&self.target_overlap_matrix())
            .expect("overlap matrix is Hermitian");
        eig.eigenvalues
            .last()
            .copied()
            .unwrap_or(0.0)
            .max(0.0)
            .sqrt()
    }

    /// Oracle `O = 1 - 2P_T`: negates the target amplitudes.
    pub fn oracle_apply(&self, state: &StateVector) -> StateVector {
        let mut amps = state.amplitudes().to_vec();
        self.oracle_in_place(&mut amps);
        StateVector::from_raw(amps)
    }

    pub fn oracle_in_place(&self, amps: &mut [Complex64]) {
        for &x in &self.targets {
            amps[x] = -amps[x];
        }
    }

    /// Grover reflection `G = 1 - 2P_S`, via `N` inner products.
    pub fn grover_reflect(&self, state: &StateVector) -> StateVector {
        let mut amps = state.amplitudes().to_vec();
        self.grover_in_place(&mut amps);
        StateVector::from_raw(amps)
    }

    pub fn grover_in_place(&self, amps: &mut [Complex64]) {
        let overlaps: Vec<Complex64> = self
            .sources
            .iter()
            .map(|psi| numerics::inner(psi.amplitudes(), amps))
            .collect();
        for (psi, ov) in self.sources.iter().zip(overlaps) {
            numerics::axpy(-2.0 * ov, psi.amplitudes(), amps);
        }
    }

    /// Dense `H = P_S + P_T`. Only meant for moderate `D`.
    pub fn hamiltonian(&self) -> ComplexMatrix {
        let d = self.dim;
        let mut h = ComplexMatrix::zeros(d, d);
        for psi in &self.sources {
            for i in 0..d {
                let a = psi[i];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    h[(i, j)] += a * psi[j].conj();
                }
            }
        }
        for &x in &self.targets {
            h[(x, x)] += 1.0;
        }
        h
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            d: self.dim,
            targets: self.targets.clone(),
            sources: self
                .sources
                .iter()
                .map(|s| s.amplitudes().iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.into_instance()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }
}

pub fn oracle_apply(inst: &SearchInstance, state: &StateVector) -> StateVector {
    inst.oracle_apply(state)
}

pub fn grover_reflect(inst: &SearchInstance, state: &StateVector) -> StateVector {
    inst.grover_reflect(state)
}

pub fn build_hamiltonian(inst: &SearchInstance) -> ComplexMatrix {
    inst.hamiltonian()
}

/// On-disk instance schema: `{"d": .., "targets": [..], "sources": [[[re, im], ..], ..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub d: usize,
    pub targets: Vec<usize>,
    pub sources: Vec<Vec<[f64; 2]>>,
}

impl InstanceFile {
    /// Runs the full [`make_instance`] validation. Rows need not be unit norm.
    pub fn into_instance(self) -> Result<SearchInstance> {
        let sources: Vec<Vec<Complex64>> = self
            .sources
            .iter()
            .map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
            .collect();
        make_instance(self.d, &sources, &self.targets)
    }
}

/// Reads and validates an instance JSON file.
pub fn load_instance(path: impl AsRef<Path>) -> Result<SearchInstance> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Parse(format!("{}: {e}", path.as_ref().display())))?;
    SearchInstance::from_json(&text)
}

/// Row `n` of the `q`-qubit Hadamard transform for `dim = 2^q`.
pub fn hadamard_row(dim: usize, n: usize) -> Vec<Complex64> {
    let a = 1.0 / (dim as f64).sqrt();
    (0..dim)
        .map(|x| {
            let sign = if (n & x).count_ones().is_multiple_of(2) {
                a
            } else {
                -a
            };
            Complex64::new(sign, 0.0)
        })
        .collect()
}

/// Source vectors `ℋ|n⟩` for each `n` in `indices`, with `D = 2^qubits`.
pub fn hadamard_sources(qubits: u32, indices: &[usize]) -> Result<Vec<StateVector>> {
    if qubits >= usize::BITS - 1 {
        return Err(Error::OutOfRange {
            what: "qubit count",
            value: qubits as f64,
        });
    }
    let dim = 1usize << qubits;
    let mut seen = vec![false; dim];
    indices
        .iter()
        .map(|&n| {
            if n >= dim {
                return Err(Error::IndexOutOfRange { index: n, dim });
            }
            if std::mem::replace(&mut seen[n], true) {
                return Err(Error::DimensionMismatch(format!(
                    "repeated Hadamard index {n}"
                )));
            }
            Ok(StateVector::from_raw(hadamard_row(dim, n)))
        })
        .collect()
}

/// `N` orthonormal vectors from orthonormalizing standard complex Gaussians.
pub fn random_orthonormal_sources(dim: usize, n: usize, seed: u64) -> Result<Vec<StateVector>> {
    if n == 0 || n > dim {
        return Err(Error::DimensionMismatch(format!(
            "cannot draw {n} orthonormal vectors in dimension {dim}"
        )));
    }
    let mut rng = seed::rng(seed);
    let mut last = None;
    for _ in 0..MAX_GAUSSIAN_DRAWS {
        let raw: Vec<Vec<Complex64>> = (0..n)
            .map(|_| {
                (0..dim)
                    .map(|_| {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        Complex64::new(re, im)
                    })
                    .collect()
            })
            .collect();
        match numerics::orthonormalize(&raw) {
            Ok(q) => return Ok(q.into_iter().map(StateVector::from_raw).collect()),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one draw"))
}
