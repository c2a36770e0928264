//! Batch studies over Hadamard-source instances: overlap statistics, the
//! scaling of `c_av` with `M` and `D`, and runtime estimates.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::InstanceRecipe;
use crate::instance::SearchInstance;
use crate::qpe::runtime_estimate;
use crate::seed;
use crate::structure::pair_spectrum;

/// Overlap statistics of one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRecord {
    pub d: usize,
    pub n: usize,
    pub m: usize,
    pub trial: usize,
    pub seed: u64,
    /// Nonzero overlaps `c_n`, descending.
    pub c_values: Vec<f64>,
    /// `Σ c_n / N`
    pub c_av: f64,
    pub c_max: f64,
    /// `√(MN/D)`
    pub bound: f64,
}

impl ScalingRecord {
    /// `c_max ≤ min(1, √(MN/D))` up to `1e-10`; holds for Hadamard sources.
    pub fn within_bound(&self) -> bool {
        self.c_max <= self.bound.min(1.0) + 1e-10
    }
}

pub fn spectrum_statistics(inst: &SearchInstance) -> ScalingRecord {
    let c_values = pair_spectrum(inst).c_values();
    let (d, n, m) = (inst.dim(), inst.n(), inst.m());
    ScalingRecord {
        d,
        n,
        m,
        trial: 0,
        seed: 0,
        c_av: c_values.iter().sum::<f64>() / n as f64,
        c_max: c_values.iter().copied().fold(0.0, f64::max),
        bound: ((m * n) as f64 / d as f64).sqrt(),
        c_values,
    }
}

/// `trials` Hadamard-source instances with random source and target index
/// sets. Trial `t` is drawn from substream `t` of `seed`.
pub fn hadamard_trials(
    d: usize,
    n: usize,
    m: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<ScalingRecord>> {
    if n + m > d {
        return Err(Error::InfeasibleSize {
            total: n + m,
            dim: d,
        });
    }
    if trials == 0 {
        return Err(Error::OutOfRange {
            what: "trials",
            value: 0.0,
        });
    }
    (0..trials)
        .map(|trial| {
            let trial_seed = seed::substream(seed, trial as u64);
            let inst = InstanceRecipe::hadamard(d, n, m, trial_seed).build()?;
            Ok(ScalingRecord {
                trial,
                seed: trial_seed,
                ..spectrum_statistics(&inst)
            })
        })
        .collect()
}

/// `N = M` studies at fixed `D` for each `M` in `m_list`.
pub fn scaling_study(
    d: usize,
    m_list: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<ScalingRecord>> {
    let mut out = Vec::with_capacity(m_list.len() * trials);
    for &m in m_list {
        out.extend(hadamard_trials(
            d,
            m,
            m,
            trials,
            seed::substream(seed, m as u64),
        )?);
    }
    Ok(out)
}

/// Power-law fit `log₂ y = slope·log₂ x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    /// `2·slope`; for `c_av ∝ M^{α/2}` this is the exponent `α`.
    pub alpha: f64,
    /// RMS residual of the fit in log₂ units.
    pub residual: f64,
}

pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<FitResult> {
    if xs.len() != ys.len() {
        return Err(Error::DegenerateFit("mismatched lengths".into()));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::DegenerateFit(
            "power-law fit needs positive values".into(),
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.log2()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.log2()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if lx.len() < 2 || !(sxx > 0.0) {
        return Err(Error::DegenerateFit(
            "need at least two distinct abscissae".into(),
        ));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
        .sum();
    Ok(FitResult {
        slope,
        intercept,
        alpha: 2.0 * slope,
        residual: (sse / k).sqrt(),
    })
}

/// Mean `c_av` grouped by `key`, ascending in the key.
pub fn mean_c_av_by(
    records: &[ScalingRecord],
    key: impl Fn(&ScalingRecord) -> usize,
) -> Vec<(usize, f64)> {
    let mut groups: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for r in records {
        let e = groups.entry(key(r)).or_default();
        e.0 += r.c_av;
        e.1 += 1;
    }
    groups
        .into_iter()
        .map(|(k, (sum, count))| (k, sum / count as f64))
        .collect()
}

/// Fits `log₂(mean c_av)` against `log₂ M`; `alpha = 2·slope`.
pub fn fit_alpha(records: &[ScalingRecord]) -> Result<FitResult> {
    let means = mean_c_av_by(records, |r| r.m);
    if means.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "need at least two distinct M values, got {}",
            means.len()
        )));
    }
    let xs: Vec<f64> = means.iter().map(|&(m, _)| m as f64).collect();
    let ys: Vec<f64> = means.iter().map(|&(_, c)| c).collect();
    fit_power_law(&xs, &ys)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceRow {
    pub d: usize,
    pub m: usize,
    pub c_av: f64,
    pub runtime: f64,
    pub sqrt_d: f64,
}

/// Runtime estimate `(2 + 1/(2(1-p)))/c_av` per dimension, with `N = M` and
/// `c_av` averaged over `trials` Hadamard draws. Rows ascend in `D`.
pub fn resource_table(
    d_list: &[usize],
    m: usize,
    p: f64,
    trials: usize,
    seed: u64,
) -> Result<Vec<ResourceRow>> {
    let mut dims = d_list.to_vec();
    dims.sort_unstable();
    dims.dedup();
    dims.into_iter()
        .map(|d| {
            let records = hadamard_trials(d, m, m, trials, seed::substream(seed, d as u64))?;
            let c_av = records.iter().map(|r| r.c_av).sum::<f64>() / records.len() as f64;
            Ok(ResourceRow {
                d,
                m,
                c_av,
                runtime: runtime_estimate(c_av, p)?,
                sqrt_d: (d as f64).sqrt(),
            })
        })
        .collect()
}
