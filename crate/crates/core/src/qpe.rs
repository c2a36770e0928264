//! Phase-estimation search.
//!
//! A source state is fed to phase estimation of `U = e^{-iHτ}`; reading the
//! register collapses it (approximately) onto a single `|ε_n^±⟩`. Quantum
//! post-processing then marks target membership on an ancilla, and
//! post-selecting ancilla = 1 leaves a state inside the target space.
//!
//! The register statistics are computed in closed form: an eigencomponent of
//! phase `φ` contributes `K_r(φ - m/2^r)` to outcome `m`, where `K_r` is the
//! squared Dirichlet kernel.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{weighted::WeightedIndex, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::SearchInstance;
use crate::numerics::tol;
use crate::seed;
use crate::state::StateVector;
use crate::structure::{pair_spectrum, Eigenbasis, SpectralDecomposition};

/// `register_size` refuses to go beyond this many qubits.
pub const MAX_REGISTER_QUBITS: u32 = 30;
/// Largest register for which full outcome distributions are materialized.
pub const MAX_SIMULATED_QUBITS: u32 = 20;

/// `2 + 1/(2(1-p))`, the success-probability overhead factor.
fn overhead(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::OutOfRange {
            what: "success probability p",
            value: p,
        });
    }
    Ok(2.0 + 1.0 / (2.0 * (1.0 - p)))
}

/// Register qubits needed to resolve energy differences `delta_e` with
/// probability `p`, for `U = e^{-iHτ}`.
///
/// The energy resolution becomes a phase resolution `δφ = δE·τ/2π` and
/// `r = ⌈-log₂ δφ + log₂(2 + 1/(2(1-p)))⌉`.
pub fn register_size(delta_e: f64, p: f64, tau: f64) -> Result<u32> {
    if !(delta_e > 0.0) || !delta_e.is_finite() {
        return Err(Error::OutOfRange {
            what: "energy resolution",
            value: delta_e,
        });
    }
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::OutOfRange {
            what: "tau",
            value: tau,
        });
    }
    let delta_phi = delta_e * tau / (2.0 * PI);
    let bits = -delta_phi.log2() + overhead(p)?.log2();
    // absorb rounding noise so exact integers do not round up
    let r = (bits - 1e-9).ceil().max(1.0);
    if r > MAX_REGISTER_QUBITS as f64 {
        return Err(Error::OutOfRange {
            what: "register qubits",
            value: r,
        });
    }
    Ok(r as u32)
}

/// `T ≈ (2 + 1/(2(1-p))) / c_av`
pub fn runtime_estimate(c_av: f64, p: f64) -> Result<f64> {
    if !(c_av > 0.0) || !c_av.is_finite() {
        return Err(Error::OutOfRange {
            what: "c_av",
            value: c_av,
        });
    }
    Ok(overhead(p)? / c_av)
}

/// Register phase of energy `e` under `U = e^{-iHτ}`, in `[0, 1)`.
pub fn phase_of_energy(energy: f64, tau: f64) -> f64 {
    let phi = (-energy * tau / (2.0 * PI)).rem_euclid(1.0);
    // rem_euclid can return exactly 1.0 for tiny negative inputs
    if phi >= 1.0 {
        0.0
    } else {
        phi
    }
}

/// `β_r(δ) = 2^{-r} Σ_{k<2^r} e^{2πikδ}`
pub fn dirichlet_amplitude(delta: f64, r: u32) -> Complex64 {
    let eps = delta - delta.round();
    if eps == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let len = (1u64 << r) as f64;
    let magnitude = (PI * len * eps).sin() / (len * (PI * eps).sin());
    Complex64::from_polar(magnitude, PI * (len - 1.0) * eps)
}

/// `K_r(δ) = |β_r(δ)|²`
pub fn fejer_kernel(delta: f64, r: u32) -> f64 {
    dirichlet_amplitude(delta, r).norm_sqr()
}

fn check_register(r: u32) -> Result<()> {
    if r == 0 || r > MAX_SIMULATED_QUBITS {
        return Err(Error::OutOfRange {
            what: "register qubits",
            value: r as f64,
        });
    }
    Ok(())
}

/// Phase estimation of `e^{-iHτ}` with an `r`-qubit register.
#[derive(Debug, Clone)]
pub struct PhaseEstimator {
    basis: Eigenbasis,
    r: u32,
    tau: f64,
}

impl PhaseEstimator {
    pub fn new(inst: &SearchInstance, r: u32, tau: f64) -> Result<Self> {
        check_register(r)?;
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::OutOfRange {
                what: "tau",
                value: tau,
            });
        }
        Ok(Self {
            basis: Eigenbasis::from_instance(inst),
            r,
            tau,
        })
    }

    pub fn register_qubits(&self) -> u32 {
        self.r
    }

    pub fn outcomes(&self) -> usize {
        1 << self.r
    }

    fn components(&self, parts: &SpectralDecomposition) -> Vec<(f64, f64)> {
        let mut comps: Vec<(f64, f64)> = self
            .basis
            .modes
            .iter()
            .zip(&parts.coefficients)
            .map(|(m, a)| (phase_of_energy(m.energy, self.tau), a.norm_sqr()))
            .collect();
        comps.push((0.0, crate::numerics::norm_sqr(&parts.zero_part)));
        comps
    }

    /// `P(m)` for every register outcome `m`.
    pub fn distribution(&self, input: &StateVector) -> Vec<f64> {
        let parts = self.basis.decompose(input.amplitudes());
        let comps = self.components(&parts);
        let scale = self.outcomes() as f64;
        (0..self.outcomes())
            .map(|m| {
                let grid = m as f64 / scale;
                comps
                    .iter()
                    .map(|&(phi, w)| w * fejer_kernel(phi - grid, self.r))
                    .sum()
            })
            .collect()
    }

    /// Post-measurement system state for outcome `m`, with its probability.
    pub fn collapse(&self, input: &StateVector, m: usize) -> Result<(StateVector, f64)> {
        if m >= self.outcomes() {
            return Err(Error::IndexOutOfRange {
                index: m,
                dim: self.outcomes(),
            });
        }
        let parts = self.basis.decompose(input.amplitudes());
        let grid = m as f64 / self.outcomes() as f64;
        let (r, tau) = (self.r, self.tau);
        let amps = self.basis.recompose(&parts, |energy| {
            dirichlet_amplitude(phase_of_energy(energy, tau) - grid, r)
        });
        let probability = crate::numerics::norm_sqr(&amps);
        if !(probability > 1e-15) {
            return Err(Error::ImprobableOutcome { m, probability });
        }
        Ok((StateVector::normalized(amps)?, probability))
    }
}

pub fn qpe_distribution(
    inst: &SearchInstance,
    input: &StateVector,
    r: u32,
    tau: f64,
) -> Result<Vec<(usize, f64)>> {
    let est = PhaseEstimator::new(inst, r, tau)?;
    Ok(est.distribution(input).into_iter().enumerate().collect())
}

pub fn qpe_collapse(
    inst: &SearchInstance,
    input: &StateVector,
    r: u32,
    tau: f64,
    m: usize,
) -> Result<StateVector> {
    PhaseEstimator::new(inst, r, tau)?
        .collapse(input, m)
        .map(|(s, _)| s)
}

/// Ancilla-marked split of a state into its non-target (`ancilla = 0`) and
/// target (`ancilla = 1`) parts. Absent branches are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct QppOutput {
    pub branch0: Option<StateVector>,
    pub branch1: Option<StateVector>,
    /// Probability of reading ancilla = 1, `‖P_T ψ‖²`.
    pub p1: f64,
}

pub fn qpp_apply(inst: &SearchInstance, state: &StateVector) -> QppOutput {
    let mut inside = vec![Complex64::new(0.0, 0.0); state.dim()];
    let mut outside = state.amplitudes().to_vec();
    for &x in inst.targets() {
        inside[x] = state[x];
        outside[x] = Complex64::new(0.0, 0.0);
    }
    let p1 = crate::numerics::norm_sqr(&inside);
    let p0 = crate::numerics::norm_sqr(&outside);
    let branch = |v: Vec<Complex64>, p: f64| {
        if p.sqrt() < tol::EMPTY_BRANCH {
            None
        } else {
            StateVector::normalized(v).ok()
        }
    };
    QppOutput {
        branch0: branch(outside, p0),
        branch1: branch(inside, p1),
        p1: p1 / (p0 + p1),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    /// Ancilla marking followed by post-selection on ancilla = 1.
    #[default]
    Qpp,
    /// Measure the collapsed state in the computational basis and ask the oracle.
    MeasureAndCheck,
}

impl std::str::FromStr for SearchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qpp" => Ok(Self::Qpp),
            "measure-and-check" => Ok(Self::MeasureAndCheck),
            other => Err(Error::Parse(format!("unknown search mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QpeConfig {
    /// Register qubits; derived from `delta_e` and `p` when `None`.
    pub r: Option<u32>,
    pub tau: f64,
    pub p: f64,
    pub shots: usize,
    pub mode: SearchMode,
    /// Energy resolution; `2·c_av` of the instance when `None`.
    pub delta_e: Option<f64>,
}

impl Default for QpeConfig {
    fn default() -> Self {
        Self {
            r: None,
            tau: 1.0,
            p: 0.75,
            shots: 1000,
            mode: SearchMode::Qpp,
            delta_e: None,
        }
    }
}

/// One shot of the search.
#[derive(Debug, Clone, PartialEq)]
pub struct QpeResult {
    pub shot: usize,
    pub source_n: usize,
    pub m: usize,
    pub probability: f64,
    pub post_state: StateVector,
    /// Ancilla reading, QPP mode only.
    pub ancilla: Option<u8>,
    pub measured_index: Option<usize>,
    pub success: bool,
}

impl QpeResult {
    /// `{"shot":..,"source_n":..,"m":..,"ancilla":..,"index":..,"success":..}`
    pub fn to_json_line(&self) -> String {
        #[derive(Serialize)]
        struct Line {
            shot: usize,
            source_n: usize,
            m: usize,
            ancilla: Option<u8>,
            index: Option<usize>,
            success: bool,
        }
        serde_json::to_string(&Line {
            shot: self.shot,
            source_n: self.source_n,
            m: self.m,
            ancilla: self.ancilla,
            index: self.measured_index,
            success: self.success,
        })
        .expect("plain struct serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchWarning {
    /// With `N > M` some source directions have no partner in the targets.
    SourceSpans { n: usize, m: usize },
}

impl std::fmt::Display for SearchWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SearchWarning::SourceSpans { n, m } => write!(
                f,
                "N={n} > M={m}: some source directions are orthogonal to the targets and never succeed"
            ),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub register_qubits: u32,
    pub delta_e: f64,
    pub c_av: f64,
    pub results: Vec<QpeResult>,
    pub warnings: Vec<SearchWarning>,
}

impl SearchOutcome {
    pub fn successes(&self) -> usize {
        self.results.iter().filter(|r| r.success).count()
    }

    pub fn success_fraction(&self) -> f64 {
        if self.results.is_empty() {
            0.0
        } else {
            self.successes() as f64 / self.results.len() as f64
        }
    }
}

fn sample_index<R: Rng + ?Sized>(rng: &mut R, state: &StateVector) -> usize {
    let weights = state.probabilities();
    WeightedIndex::new(&weights)
        .expect("normalized state has positive weight")
        .sample(rng)
}

/// Runs `config.shots` independent shots. Shot `s` uses source `s mod N` and
/// its own random substream, so results do not depend on execution order.
pub fn search(inst: &SearchInstance, config: &QpeConfig, seed: u64) -> Result<SearchOutcome> {
    let spectrum = pair_spectrum(inst);
    let c_av = spectrum.c_values().iter().sum::<f64>() / inst.n() as f64;
    let delta_e = match config.delta_e {
        Some(d) => d,
        None => 2.0 * c_av,
    };
    let r = match config.r {
        Some(r) => r,
        None => register_size(delta_e, config.p, config.tau)?,
    };
    let est = PhaseEstimator::new(inst, r, config.tau)?;

    let mut warnings = Vec::new();
    if inst.n() > inst.m() {
        warnings.push(SearchWarning::SourceSpans {
            n: inst.n(),
            m: inst.m(),
        });
    }

    let samplers: Vec<WeightedIndex<f64>> = inst
        .sources()
        .iter()
        .map(|psi| {
            WeightedIndex::new(est.distribution(psi)).expect("distribution has positive mass")
        })
        .collect();

    let mut results = Vec::with_capacity(config.shots);
    for shot in 0..config.shots {
        let mut rng = seed::substream_rng(seed, shot as u64);
        let source_n = shot % inst.n();
        let psi = &inst.sources()[source_n];
        let m = samplers[source_n].sample(&mut rng);
        let (post_state, probability) = est.collapse(psi, m)?;
        let (ancilla, measured_index) = match config.mode {
            SearchMode::Qpp => {
                let out = qpp_apply(inst, &post_state);
                if rng.random::<f64>() < out.p1 {
                    let branch = out
                        .branch1
                        .as_ref()
                        .expect("p1 > 0 implies a target branch");
                    (Some(1), Some(sample_index(&mut rng, branch)))
                } else {
                    (Some(0), None)
                }
            }
            SearchMode::MeasureAndCheck => (None, Some(sample_index(&mut rng, &post_state))),
        };
        let success = measured_index.is_some_and(|x| inst.is_target(x));
        results.push(QpeResult {
            shot,
            source_n,
            m,
            probability,
            post_state,
            ancilla,
            measured_index,
            success,
        });
    }

    Ok(SearchOutcome {
        register_qubits: r,
        delta_e,
        c_av,
        results,
        warnings,
    })
}
