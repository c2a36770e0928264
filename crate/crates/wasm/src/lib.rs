//! Browser bindings for three demo operations: the pair spectrum, evolution
//! traces and Grover iteration traces of a generated instance.
//!
//! Each operation is a plain function returning JSON so it can be tested
//! natively; the `#[wasm_bindgen]` wrappers only exist on `wasm32`.

use gengrover::dynamics::{default_time_grid, grover_iterate, IterationOrder, Propagator};
use gengrover::{pair_spectrum, Family, InstanceRecipe, PairSpectrum, SearchInstance, StateVector};
use serde::Serialize;

/// Largest dimension the page will build; keeps the tab responsive.
pub const MAX_DIM: usize = 4096;
const MAX_SAMPLES: usize = 5000;
const MAX_ITERATIONS: usize = 5000;

fn build(d: usize, n: usize, m: usize, family: &str, seed: u64) -> Result<SearchInstance, String> {
    if d > MAX_DIM {
        return Err(format!("D = {d} exceeds the demo limit of {MAX_DIM}"));
    }
    let family: Family = family
        .parse()
        .map_err(|e: gengrover::Error| e.to_string())?;
    let recipe = InstanceRecipe {
        family,
        ..InstanceRecipe::hadamard(d, n, m, seed)
    };
    recipe.build().map_err(|e| format!("{}: {e}", e.code()))
}

fn starts(
    inst: &SearchInstance,
    spec: &PairSpectrum,
    initial: &str,
) -> Result<Vec<StateVector>, String> {
    match initial {
        "source" => Ok(inst.sources().to_vec()),
        "ideal" => Ok(spec.pairs.iter().map(|p| p.ideal_initial_state()).collect()),
        other => Err(format!("unknown initial state '{other}' (source or ideal)")),
    }
}

#[derive(Serialize)]
struct SpectrumView {
    c: Vec<f64>,
    eigenvalues: Vec<f64>,
    zero_modes: usize,
    bound: f64,
}

pub fn spectrum_json(
    d: usize,
    n: usize,
    m: usize,
    family: &str,
    seed: u64,
) -> Result<String, String> {
    let inst = build(d, n, m, family, seed)?;
    let spec = pair_spectrum(&inst);
    let view = SpectrumView {
        c: spec.c_values(),
        eigenvalues: spec.eigenvalues(),
        zero_modes: spec.zero_dim,
        bound: ((n * m) as f64 / d as f64).sqrt(),
    };
    Ok(serde_json::to_string(&view).expect("view serializes"))
}

#[derive(Serialize)]
struct TraceView {
    x: Vec<f64>,
    traces: Vec<Vec<f64>>,
}

pub fn evolve_json(
    d: usize,
    n: usize,
    m: usize,
    family: &str,
    seed: u64,
    initial: &str,
    samples: usize,
) -> Result<String, String> {
    let inst = build(d, n, m, family, seed)?;
    let spec = pair_spectrum(&inst);
    let c_min = spec.c_values().into_iter().fold(f64::INFINITY, f64::min);
    let times =
        default_time_grid(c_min, samples.clamp(2, MAX_SAMPLES)).map_err(|e| e.to_string())?;
    let prop = Propagator::with_spectrum(&inst, &spec);
    let traces = starts(&inst, &spec, initial)?
        .iter()
        .map(|s| prop.trace(s, &times).p_target)
        .collect();
    Ok(serde_json::to_string(&TraceView { x: times, traces }).expect("view serializes"))
}

#[allow(clippy::too_many_arguments)]
pub fn iterate_json(
    d: usize,
    n: usize,
    m: usize,
    family: &str,
    seed: u64,
    initial: &str,
    k_max: usize,
    order: &str,
) -> Result<String, String> {
    let inst = build(d, n, m, family, seed)?;
    let spec = pair_spectrum(&inst);
    let order: IterationOrder = order.parse().map_err(|e: gengrover::Error| e.to_string())?;
    let k_max = k_max.min(MAX_ITERATIONS);
    let traces = starts(&inst, &spec, initial)?
        .iter()
        .map(|s| grover_iterate(&inst, s, k_max, order).1.p_target)
        .collect();
    let x = (0..=k_max).map(|k| k as f64).collect();
    Ok(serde_json::to_string(&TraceView { x, traces }).expect("view serializes"))
}

#[cfg(target_arch = "wasm32")]
mod bindings {
    use wasm_bindgen::prelude::*;

    fn js(r: Result<String, String>) -> Result<String, JsError> {
        r.map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen]
    pub fn spectrum(
        d: usize,
        n: usize,
        m: usize,
        family: &str,
        seed: u64,
    ) -> Result<String, JsError> {
        js(super::spectrum_json(d, n, m, family, seed))
    }

    #[wasm_bindgen]
    pub fn evolve(
        d: usize,
        n: usize,
        m: usize,
        family: &str,
        seed: u64,
        initial: &str,
        samples: usize,
    ) -> Result<String, JsError> {
        js(super::evolve_json(d, n, m, family, seed, initial, samples))
    }

    #[wasm_bindgen]
    #[allow(clippy::too_many_arguments)]
    pub fn iterate(
        d: usize,
        n: usize,
        m: usize,
        family: &str,
        seed: u64,
        initial: &str,
        k_max: usize,
        order: &str,
    ) -> Result<String, JsError> {
        js(super::iterate_json(
            d, n, m, family, seed, initial, k_max, order,
        ))
    }
}
