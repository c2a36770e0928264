//! Continuous-time evolution under `H` and gate-based Grover iteration.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::SearchInstance;
use crate::state::StateVector;
use crate::structure::{Eigenbasis, PairSpectrum};

/// Samples in the default figure time grid.
pub const DEFAULT_SAMPLES: usize = 2000;

/// Target-space probability sampled over time or iteration count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    pub p_target: Vec<f64>,
    pub mode: Option<usize>,
}

/// `e^{-iHt}` applied through the structured eigenbasis.
#[derive(Debug, Clone)]
pub struct Propagator<'a> {
    inst: &'a SearchInstance,
    basis: Eigenbasis,
}

impl<'a> Propagator<'a> {
    pub fn new(inst: &'a SearchInstance) -> Self {
        Self {
            inst,
            basis: Eigenbasis::from_instance(inst),
        }
    }

    pub fn with_spectrum(inst: &'a SearchInstance, spectrum: &PairSpectrum) -> Self {
        Self {
            inst,
            basis: Eigenbasis::new(spectrum),
        }
    }

    pub fn evolve(&self, state: &StateVector, t: f64) -> StateVector {
        let parts = self.basis.decompose(state.amplitudes());
        let amps = self
            .basis
            .recompose(&parts, |e| Complex64::from_polar(1.0, -e * t));
        StateVector::from_raw(amps)
    }

    /// `‖P_T e^{-iHt}ψ‖²` at each time; only target amplitudes are rebuilt.
    pub fn trace(&self, state: &StateVector, times: &[f64]) -> EvolutionTrace {
        let parts = self.basis.decompose(state.amplitudes());
        let targets = self.inst.targets();
        // per target index: amplitude of each mode at that index, times its coefficient
        let weights: Vec<Vec<(f64, Complex64)>> = targets
            .iter()
            .map(|&x| {
                self.basis
                    .modes
                    .iter()
                    .zip(&parts.coefficients)
                    .map(|(m, &a)| (m.energy, a * m.vector[x]))
                    .collect()
            })
            .collect();
        let p_target = times
            .iter()
            .map(|&t| {
                targets
                    .iter()
                    .zip(&weights)
                    .map(|(&x, w)| {
                        let amp = w.iter().fold(parts.zero_part[x], |acc, &(e, aw)| {
                            acc + aw * Complex64::from_polar(1.0, -e * t)
                        });
                        amp.norm_sqr()
                    })
                    .sum()
            })
            .collect();
        EvolutionTrace {
            times: times.to_vec(),
            p_target,
            mode: None,
        }
    }
}

pub fn evolve(inst: &SearchInstance, state: &StateVector, t: f64) -> StateVector {
    Propagator::new(inst).evolve(state, t)
}

pub fn target_probability_trace(
    inst: &SearchInstance,
    state: &StateVector,
    times: &[f64],
) -> EvolutionTrace {
    Propagator::new(inst).trace(state, times)
}

/// Time `π/(2c)` at which the ideal state of overlap `c` is fully in the targets.
pub fn optimal_time(c: f64) -> Result<f64> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::NonPositiveC(c));
    }
    Ok(PI / (2.0 * c))
}

/// `n` evenly spaced samples over `[0, 3π/(2 c_min)]`, one and a half periods
/// of the slowest mode.
pub fn default_time_grid(c_min: f64, samples: usize) -> Result<Vec<f64>> {
    let t_max = 3.0 * optimal_time(c_min)?;
    Ok(linspace(0.0, t_max, samples))
}

pub fn linspace(start: f64, end: f64, samples: usize) -> Vec<f64> {
    match samples {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (end - start) / (samples - 1) as f64;
            (0..samples).map(|i| start + step * i as f64).collect()
        }
    }
}

/// Which reflection acts first within one Grover iteration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IterationOrder {
    /// `G·O`: the oracle acts first.
    #[default]
    OracleFirst,
    /// `O·G`
    GroverFirst,
}

impl std::str::FromStr for IterationOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle-first" => Ok(Self::OracleFirst),
            "grover-first" => Ok(Self::GroverFirst),
            other => Err(Error::Parse(format!("unknown iteration order '{other}'"))),
        }
    }
}

/// Applies `k` Grover iterations, recording the target probability before
/// the first iteration and after each one (`k + 1` samples).
pub fn grover_iterate(
    inst: &SearchInstance,
    state: &StateVector,
    k: usize,
    order: IterationOrder,
) -> (StateVector, EvolutionTrace) {
    let mut amps = state.amplitudes().to_vec();
    let weight = |a: &[Complex64]| -> f64 { inst.targets().iter().map(|&x| a[x].norm_sqr()).sum() };
    let mut times = Vec::with_capacity(k + 1);
    let mut p_target = Vec::with_capacity(k + 1);
    times.push(0.0);
    p_target.push(weight(&amps));
    for step in 1..=k {
        match order {
            IterationOrder::OracleFirst => {
                inst.oracle_in_place(&mut amps);
                inst.grover_in_place(&mut amps);
            }
            IterationOrder::GroverFirst => {
                inst.grover_in_place(&mut amps);
                inst.oracle_in_place(&mut amps);
            }
        }
        times.push(step as f64);
        p_target.push(weight(&amps));
    }
    (
        StateVector::from_raw(amps),
        EvolutionTrace {
            times,
            p_target,
            mode: None,
        },
    )
}

/// `round(π/(4·asin c) - 1/2)`, the iteration count maximizing `sin²((2k+1)θ)`.
pub fn optimal_iterations(c: f64) -> Result<u64> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::OutOfRange {
            what: "overlap c",
            value: c,
        });
    }
    let k = (PI / (4.0 * c.asin()) - 0.5).round();
    Ok(k.max(0.0) as u64)
}
