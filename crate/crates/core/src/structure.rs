//! Block structure and exact spectrum of `H = P_S + P_T`.
//!
//! Splitting the space into target and non-target blocks,
//!
//! ```text
//!     H = | A   B |      A = P_T̸ P_S P_T̸
//!         | B†  C |      B = P_T̸ P_S P_T
//!                        C = P_T P_S P_T + P_T
//! ```
//!
//! the projector identities `BB† = A - A²` and `B†B = -C² + 3C - 2P_T` force
//! `H` into 2×2 blocks. Each nonzero eigenvalue `c_n²` of `P_T P_S P_T` gives a
//! pair of eigenvalues `1 ± c_n`; the remaining source and target directions
//! sit at energy 1 and everything else at 0. Only the `M×M` (and `N×N`) overlap
//! matrices are diagonalized here.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::instance::SearchInstance;
use crate::numerics::{self, tol, ComplexMatrix};
use crate::state::StateVector;

/// `H` split into the non-target / target blocks, in the basis
/// `(non_targets ascending, targets ascending)`.
#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub c: ComplexMatrix,
    pub non_targets: Vec<usize>,
    pub targets: Vec<usize>,
}

pub fn block_decompose(inst: &SearchInstance) -> BlockDecomposition {
    let h = inst.hamiltonian();
    let non_targets = inst.non_targets();
    let targets = inst.targets().to_vec();
    let sub = |rows: &[usize], cols: &[usize]| {
        ComplexMatrix::from_fn(rows.len(), cols.len(), |i, j| h[(rows[i], cols[j])])
    };
    BlockDecomposition {
        a: sub(&non_targets, &non_targets),
        b: sub(&non_targets, &targets),
        c: sub(&targets, &targets),
        non_targets,
        targets,
    }
}

/// Max-entry residuals of the projector identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    /// `BB† - (A - A²)`
    pub bb_dagger: f64,
    /// `B†B - (-C² + 3C - 2P_T)`
    pub b_dagger_b: f64,
    /// `|Tr H - (N + M)|`
    pub trace: f64,
    /// `[BB†, A]`
    pub commutator_a: f64,
    /// `[B†B, C]`
    pub commutator_c: f64,
}

impl ResidualReport {
    pub fn max(&self) -> f64 {
        [
            self.bb_dagger,
            self.b_dagger_b,
            self.trace,
            self.commutator_a,
            self.commutator_c,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn entries(&self) -> [(&'static str, f64); 5] {
        [
            ("bb_dagger", self.bb_dagger),
            ("b_dagger_b", self.b_dagger_b),
            ("trace", self.trace),
            ("commutator_a", self.commutator_a),
            ("commutator_c", self.commutator_c),
        ]
    }
}

pub fn verify_identities(inst: &SearchInstance) -> ResidualReport {
    let blocks = block_decompose(inst);
    let BlockDecomposition { a, b, c, .. } = &blocks;
    let m = c.nrows();
    let bbd = b * b.adjoint();
    let bdb = b.adjoint() * b;
    let id = ComplexMatrix::identity(m, m);
    let rhs_c = -(c * c) + c.scale(3.0) - id.scale(2.0);
    let trace = a.trace().re + c.trace().re;
    ResidualReport {
        bb_dagger: numerics::max_entry(&(&bbd - (a - a * a))),
        b_dagger_b: numerics::max_entry(&(&bdb - rhs_c)),
        trace: (trace - (inst.n() + inst.m()) as f64).abs(),
        commutator_a: numerics::max_entry(&(&bbd * a - a * &bbd)),
        commutator_c: numerics::max_entry(&(&bdb * c - c * &bdb)),
    }
}

/// One 2×2 block: overlap `c` between `eps_t` (inside the targets) and
/// `eps_not_t` (outside), with `⟨ε^T̸|H|ε^T⟩ = c√(1-c²)` real and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct PairMode {
    pub c: f64,
    pub eps_t: StateVector,
    pub eps_not_t: StateVector,
}

impl PairMode {
    /// `|ε^±⟩ = √((1∓c)/2)|ε^T̸⟩ ± √((1±c)/2)|ε^T⟩`, energies `1 ± c`.
    pub fn eigenvectors(&self) -> (StateVector, StateVector) {
        let c = self.c;
        let plus = combine(
            ((1.0 - c) / 2.0).sqrt(),
            &self.eps_not_t,
            ((1.0 + c) / 2.0).sqrt(),
            &self.eps_t,
        );
        let minus = combine(
            ((1.0 + c) / 2.0).sqrt(),
            &self.eps_not_t,
            -((1.0 - c) / 2.0).sqrt(),
            &self.eps_t,
        );
        (plus, minus)
    }

    /// Initial state whose evolution oscillates fully into the target space:
    /// `√((1+c)/2)|ε^+⟩ + √((1-c)/2)|ε^-⟩`.
    pub fn ideal_initial_state(&self) -> StateVector {
        let c = self.c;
        let (plus, minus) = self.eigenvectors();
        combine(
            ((1.0 + c) / 2.0).sqrt(),
            &plus,
            ((1.0 - c) / 2.0).sqrt(),
            &minus,
        )
    }
}

/// `pair_eigenvectors(mode) = (|ε^+⟩, |ε^-⟩)`
pub fn pair_eigenvectors(mode: &PairMode) -> (StateVector, StateVector) {
    mode.eigenvectors()
}

fn combine(a: f64, x: &StateVector, b: f64, y: &StateVector) -> StateVector {
    let amps = x
        .amplitudes()
        .iter()
        .zip(y.amplitudes())
        .map(|(p, q)| p * a + q * b)
        .collect();
    StateVector::from_raw(amps)
}

/// An eigenvector of `H` with nonzero energy.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenmode {
    pub energy: f64,
    pub vector: StateVector,
}

/// Structured spectrum of `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSpectrum {
    dim: usize,
    /// Sorted by descending `c`.
    pub pairs: Vec<PairMode>,
    /// Energy-1 directions inside the target space.
    pub unpaired_t: Vec<StateVector>,
    /// Energy-1 directions in the source space orthogonal to the targets.
    pub unpaired_not_t: Vec<StateVector>,
    /// Dimension of the energy-0 space, `D - N - M`.
    pub zero_dim: usize,
}

pub fn pair_spectrum(inst: &SearchInstance) -> PairSpectrum {
    let targets = inst.targets();
    let dim = inst.dim();
    let embed = |u: Vec<Complex64>| {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        for (&x, z) in targets.iter().zip(u) {
            v[x] = z;
        }
        v
    };

    let k = numerics::hermitian_eig(&inst.target_overlap_matrix())
        .expect("P_T P_S P_T is Hermitian by construction");

    let mut pairs = Vec::new();
    let mut unpaired_t = Vec::new();
    for j in (0..k.len()).rev() {
        let lambda = k.eigenvalues[j];
        let eps_t = embed(k.vector(j));
        let c = lambda.max(0.0).sqrt();
        if lambda <= tol::ZERO_MODE || c * (1.0 - c * c).max(0.0).sqrt() < tol::ZERO_MODE {
            unpaired_t.push(StateVector::from_raw(eps_t));
            continue;
        }
        // B|ε^T⟩ = P_T̸ Σ_n |ψ_n⟩⟨ψ_n|ε^T⟩, with norm c√(1-c²)
        let mut image = vec![Complex64::new(0.0, 0.0); dim];
        for psi in inst.sources() {
            let ov: Complex64 = targets.iter().map(|&x| psi[x].conj() * eps_t[x]).sum();
            numerics::axpy(ov, psi.amplitudes(), &mut image);
        }
        for &x in targets {
            image[x] = Complex64::new(0.0, 0.0);
        }
        let eps_not_t = StateVector::normalized(image).expect("image of a paired mode is nonzero");
        pairs.push(PairMode {
            c,
            eps_t: StateVector::from_raw(eps_t),
            eps_not_t,
        });
    }
    // zero modes were pushed in descending-eigenvalue order; keep the solver's
    // ascending order for determinism across equal eigenvalues
    unpaired_t.reverse();

    // Source directions orthogonal to the targets: null space of ⟨ψ_n|P_T|ψ_k⟩.
    let free = inst.n() - pairs.len();
    let g = numerics::hermitian_eig(&inst.source_overlap_matrix())
        .expect("source overlap matrix is Hermitian by construction");
    let unpaired_not_t = (0..free)
        .map(|j| {
            let coeffs = g.vector(j);
            let mut w = vec![Complex64::new(0.0, 0.0); dim];
            for (psi, a) in inst.sources().iter().zip(coeffs) {
                numerics::axpy(a, psi.amplitudes(), &mut w);
            }
            for &x in targets {
                w[x] = Complex64::new(0.0, 0.0);
            }
            StateVector::normalized(w).expect("source combination off the targets is nonzero")
        })
        .collect();

    PairSpectrum {
        dim,
        pairs,
        unpaired_t,
        unpaired_not_t,
        zero_dim: dim - inst.n() - inst.m(),
    }
}

impl PairSpectrum {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Overlaps `c_n`, descending.
    pub fn c_values(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.c).collect()
    }

    pub fn ideal_initial_state(&self, n: usize) -> Result<StateVector> {
        self.pair(n).map(PairMode::ideal_initial_state)
    }

    pub fn pair(&self, n: usize) -> Result<&PairMode> {
        self.pairs.get(n).ok_or(Error::IndexOutOfRange {
            index: n,
            dim: self.pairs.len(),
        })
    }

    /// All `D` eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev = vec![0.0; self.zero_dim];
        ev.extend(std::iter::repeat_n(
            1.0,
            self.unpaired_t.len() + self.unpaired_not_t.len(),
        ));
        for p in &self.pairs {
            ev.push(1.0 - p.c);
            ev.push(1.0 + p.c);
        }
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Orthonormal eigenvectors for every nonzero energy: each pair as
    /// `(ε^+, ε^-)`, then the unpaired target and source directions.
    pub fn eigenmodes(&self) -> Vec<Eigenmode> {
        let mut modes = Vec::with_capacity(2 * self.pairs.len() + self.unpaired_t.len());
        for p in &self.pairs {
            let (plus, minus) = p.eigenvectors();
            modes.push(Eigenmode {
                energy: 1.0 + p.c,
                vector: plus,
            });
            modes.push(Eigenmode {
                energy: 1.0 - p.c,
                vector: minus,
            });
        }
        for v in self.unpaired_t.iter().chain(&self.unpaired_not_t) {
            modes.push(Eigenmode {
                energy: 1.0,
                vector: v.clone(),
            });
        }
        modes
    }
}

/// A state split along an eigenbasis: coefficients on each nonzero-energy
/// mode plus the leftover energy-0 component.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub coefficients: Vec<Complex64>,
    pub zero_part: Vec<Complex64>,
}

/// Nonzero-energy eigenmodes with the energy-0 space handled implicitly as
/// the orthogonal complement. Costs `O(D·(N+M))` per state.
#[derive(Debug, Clone)]
pub struct Eigenbasis {
    pub modes: Vec<Eigenmode>,
}

impl Eigenbasis {
    pub fn new(spectrum: &PairSpectrum) -> Self {
        Self {
            modes: spectrum.eigenmodes(),
        }
    }

    pub fn from_instance(inst: &SearchInstance) -> Self {
        Self::new(&pair_spectrum(inst))
    }

    pub fn decompose(&self, state: &[Complex64]) -> SpectralDecomposition {
        let coefficients: Vec<Complex64> = self
            .modes
            .iter()
            .map(|m| numerics::inner(m.vector.amplitudes(), state))
            .collect();
        let mut zero_part = state.to_vec();
        for (m, &a) in self.modes.iter().zip(&coefficients) {
            numerics::axpy(-a, m.vector.amplitudes(), &mut zero_part);
        }
        SpectralDecomposition {
            coefficients,
            zero_part,
        }
    }

    /// `Σ_j f_j a_j |ε_j⟩ + f_0 z`.
    pub fn recompose(
        &self,
        parts: &SpectralDecomposition,
        mode_factor: impl Fn(f64) -> Complex64,
    ) -> Vec<Complex64> {
        let zero_factor = mode_factor(0.0);
        let mut out: Vec<Complex64> = parts.zero_part.iter().map(|z| z * zero_factor).collect();
        for (m, &a) in self.modes.iter().zip(&parts.coefficients) {
            numerics::axpy(a * mode_factor(m.energy), m.vector.amplitudes(), &mut out);
        }
        out
    }
}
