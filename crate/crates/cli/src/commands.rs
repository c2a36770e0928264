use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use gengrover::dynamics::{
    default_time_grid, grover_iterate, linspace, IterationOrder, Propagator, DEFAULT_SAMPLES,
};
use gengrover::experiments::{
    fit_alpha, fit_power_law, hadamard_trials, resource_table, scaling_study,
};
use gengrover::numerics::hermitian_eig;
use gengrover::qpe::{register_size, search, PhaseEstimator, QpeConfig, SearchMode};
use gengrover::report::{fmt_f64, Cell, CsvTable};
use gengrover::structure::verify_identities;
use gengrover::{pair_spectrum, PairSpectrum, SearchInstance, StateVector};
use serde_json::{json, Value};

use crate::args::{Format, InstanceArgs, Loaded, OutputArgs};
use crate::error::{CliError, CliResult};

/// Tolerance for `verify`.
const VERIFY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Initial {
    /// The raw source states.
    Source,
    /// The ideal superposition of each pair mode.
    Ideal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    OracleFirst,
    GroverFirst,
}

impl From<OrderArg> for IterationOrder {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::OracleFirst => IterationOrder::OracleFirst,
            OrderArg::GroverFirst => IterationOrder::GroverFirst,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Qpp,
    MeasureAndCheck,
}

impl From<ModeArg> for SearchMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Qpp => SearchMode::Qpp,
            ModeArg::MeasureAndCheck => SearchMode::MeasureAndCheck,
        }
    }
}

/// Result of a subcommand: the one-line summary.
pub struct Outcome {
    pub summary: String,
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn cell_json(c: &Cell) -> Value {
    match c {
        Cell::Int(v) => json!(v),
        // floats go through the CSV formatter so both outputs carry the same digits
        Cell::Float(v) => fmt_f64(*v)
            .parse::<f64>()
            .map(|x| json!(x))
            .unwrap_or(Value::Null),
        Cell::Text(s) => json!(s),
        Cell::Empty => Value::Null,
    }
}

fn table_json(table: &CsvTable) -> String {
    let meta: serde_json::Map<String, Value> = table
        .metadata
        .iter()
        .map(|(k, v)| (k.clone(), json!(v)))
        .collect();
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| Value::Array(r.iter().map(cell_json).collect()))
        .collect();
    let doc = json!({ "meta": meta, "columns": table.header, "rows": rows });
    let mut s = serde_json::to_string_pretty(&doc).expect("json value serializes");
    s.push('\n');
    s
}

/// Writes `table` in the requested format and returns the path.
fn emit(out: &OutputArgs, stem: &str, table: &CsvTable) -> CliResult<PathBuf> {
    let (ext, body) = match out.format.unwrap_or(Format::Csv) {
        Format::Csv => ("csv", table.render()),
        Format::Json => ("json", table_json(table)),
    };
    let path = out.path(stem, ext);
    write_file(&path, &body)?;
    Ok(path)
}

fn with_meta(header: &[&str], loaded: &Loaded) -> CsvTable {
    let mut t = CsvTable::new(header.iter().copied());
    for (k, v) in &loaded.metadata {
        t.meta(k.clone(), v);
    }
    t
}

fn slowest(spec: &PairSpectrum) -> f64 {
    spec.c_values().into_iter().fold(f64::INFINITY, f64::min)
}

/// Initial states and their column labels.
fn initial_states(
    inst: &SearchInstance,
    spec: &PairSpectrum,
    initial: Initial,
) -> Vec<(String, StateVector)> {
    match initial {
        Initial::Source => inst
            .sources()
            .iter()
            .enumerate()
            .map(|(n, s)| (format!("source_{}", n + 1), s.clone()))
            .collect(),
        Initial::Ideal => spec
            .pairs
            .iter()
            .enumerate()
            .map(|(n, p)| (format!("mode_{}", n + 1), p.ideal_initial_state()))
            .collect(),
    }
}

fn initial_name(initial: Initial) -> &'static str {
    match initial {
        Initial::Source => "source",
        Initial::Ideal => "ideal",
    }
}

fn traces_table(
    axis: &str,
    loaded: &Loaded,
    labels: &[String],
    xs: &[Cell],
    columns: &[Vec<f64>],
) -> CsvTable {
    let mut header = vec![axis.to_string()];
    header.extend(labels.iter().map(|l| format!("p_{l}")));
    let mut t = CsvTable::new(header);
    t.metadata = loaded.metadata.clone();
    for (i, x) in xs.iter().enumerate() {
        let mut row = vec![x.clone()];
        row.extend(columns.iter().map(|c| Cell::Float(c[i])));
        t.push(row);
    }
    t
}

pub fn spectrum(
    inst: &InstanceArgs,
    out: &OutputArgs,
    stats: bool,
    trials: usize,
) -> CliResult<Outcome> {
    if stats {
        return spectrum_stats(inst, out, trials);
    }
    let loaded = inst.load()?;
    let spec = pair_spectrum(&loaded.instance);
    let mut t = with_meta(&["n", "c_n", "eig_plus", "eig_minus"], &loaded);
    t.meta("pairs", spec.pairs.len());
    t.meta("unpaired_target", spec.unpaired_t.len());
    t.meta("unpaired_source", spec.unpaired_not_t.len());
    t.meta("zero_modes", spec.zero_dim);
    for (n, p) in spec.pairs.iter().enumerate() {
        t.push(vec![
            (n + 1).into(),
            p.c.into(),
            (1.0 + p.c).into(),
            (1.0 - p.c).into(),
        ]);
    }
    let path = emit(out, "spectrum", &t)?;
    let c_max = spec.c_values().first().copied().unwrap_or(0.0);
    Ok(Outcome {
        summary: format!(
            "spectrum: {} pairs, c_max={c_max:.6}, {} zero modes -> {}",
            spec.pairs.len(),
            spec.zero_dim,
            path.display()
        ),
    })
}

fn spectrum_stats(inst: &InstanceArgs, out: &OutputArgs, trials: usize) -> CliResult<Outcome> {
    if inst.instance.is_some() || inst.sources.is_some() || inst.targets.is_some() {
        return Err(CliError::Usage(
            "--stats draws its own instances; give only --d, --n, --m and --seed".into(),
        ));
    }
    let recipe = inst.recipe()?;
    if recipe.family != gengrover::Family::Hadamard {
        return Err(CliError::Usage("--stats uses the hadamard family".into()));
    }
    let records = hadamard_trials(recipe.d, recipe.n, recipe.m, trials, recipe.seed)?;
    let mean = records.iter().map(|r| r.c_av).sum::<f64>() / records.len() as f64;
    let bounded = records.iter().all(|r| r.within_bound());
    let mut t = CsvTable::new(["trial", "seed", "n", "c_n", "eig_plus", "eig_minus"]);
    t.meta("family", "hadamard")
        .meta("seed", recipe.seed)
        .meta("D", recipe.d)
        .meta("N", recipe.n)
        .meta("M", recipe.m)
        .meta("trials", trials)
        .meta("bound", fmt_f64(records[0].bound))
        .meta("mean_c_av", fmt_f64(mean))
        .meta("within_bound", bounded);
    for r in &records {
        for (n, &c) in r.c_values.iter().enumerate() {
            t.push(vec![
                r.trial.into(),
                r.seed.into(),
                (n + 1).into(),
                c.into(),
                (1.0 + c).into(),
                (1.0 - c).into(),
            ]);
        }
    }
    let path = emit(out, "spectrum", &t)?;
    Ok(Outcome {
        summary: format!(
            "spectrum --stats: {trials} trials, mean c_av={mean:.6}, bound {:.6} {} -> {}",
            records[0].bound,
            if bounded { "respected" } else { "VIOLATED" },
            path.display()
        ),
    })
}

pub fn evolve(
    inst: &InstanceArgs,
    out: &OutputArgs,
    initial: Initial,
    t_max: Option<f64>,
    samples: Option<usize>,
) -> CliResult<Outcome> {
    let loaded = inst.load()?;
    let spec = pair_spectrum(&loaded.instance);
    let samples = samples.unwrap_or(DEFAULT_SAMPLES);
    let times = match t_max {
        Some(t) if t > 0.0 && t.is_finite() => linspace(0.0, t, samples),
        Some(t) => {
            return Err(CliError::Usage(format!(
                "--t-max must be positive, got {t}"
            )))
        }
        None => default_time_grid(slowest(&spec), samples)?,
    };
    let prop = Propagator::with_spectrum(&loaded.instance, &spec);
    let states = initial_states(&loaded.instance, &spec, initial);
    let columns: Vec<Vec<f64>> = states
        .iter()
        .map(|(_, s)| prop.trace(s, &times).p_target)
        .collect();
    let labels: Vec<String> = states.into_iter().map(|(l, _)| l).collect();
    let xs: Vec<Cell> = times.iter().map(|&t| Cell::Float(t)).collect();
    let mut t = traces_table("t", &loaded, &labels, &xs, &columns);
    t.meta("initial", initial_name(initial));
    let path = emit(out, "evolve", &t)?;
    let low = columns
        .iter()
        .map(|c| c.iter().copied().fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min);
    Ok(Outcome {
        summary: format!(
            "evolve: {} traces x {} samples, lowest peak p_target={low:.6} -> {}",
            columns.len(),
            times.len(),
            path.display()
        ),
    })
}

pub fn iterate(
    inst: &InstanceArgs,
    out: &OutputArgs,
    initial: Initial,
    k_max: Option<usize>,
    order: OrderArg,
) -> CliResult<Outcome> {
    let loaded = inst.load()?;
    let spec = pair_spectrum(&loaded.instance);
    // one and a half periods of the slowest mode by default
    let k_max = k_max.unwrap_or_else(|| (3.0 * PI / (4.0 * slowest(&spec).asin())).ceil() as usize);
    let states = initial_states(&loaded.instance, &spec, initial);
    let columns: Vec<Vec<f64>> = states
        .iter()
        .map(|(_, s)| {
            grover_iterate(&loaded.instance, s, k_max, order.into())
                .1
                .p_target
        })
        .collect();
    let labels: Vec<String> = states.into_iter().map(|(l, _)| l).collect();
    let xs: Vec<Cell> = (0..=k_max).map(Cell::from).collect();
    let mut t = traces_table("k", &loaded, &labels, &xs, &columns);
    t.meta("initial", initial_name(initial));
    t.meta(
        "order",
        match order {
            OrderArg::OracleFirst => "oracle-first",
            OrderArg::GroverFirst => "grover-first",
        },
    );
    let path = emit(out, "iterate", &t)?;
    Ok(Outcome {
        summary: format!(
            "iterate: {} traces, k=0..{k_max} -> {}",
            columns.len(),
            path.display()
        ),
    })
}

fn resolve_register(
    spec: &PairSpectrum,
    n: usize,
    r: Option<u32>,
    delta_e: Option<f64>,
    p: f64,
    tau: f64,
) -> CliResult<u32> {
    match r {
        Some(r) => Ok(r),
        None => {
            let c_av = spec.c_values().iter().sum::<f64>() / n as f64;
            Ok(register_size(delta_e.unwrap_or(2.0 * c_av), p, tau)?)
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn qpe(
    inst: &InstanceArgs,
    out: &OutputArgs,
    source_index: usize,
    r: Option<u32>,
    tau: f64,
    p: f64,
    delta_e: Option<f64>,
) -> CliResult<Outcome> {
    let loaded = inst.load()?;
    let n = loaded.instance.n();
    if source_index >= n {
        return Err(CliError::Usage(format!(
            "--source-index {source_index} out of range for N = {n}"
        )));
    }
    let spec = pair_spectrum(&loaded.instance);
    let r = resolve_register(&spec, n, r, delta_e, p, tau)?;
    let est = PhaseEstimator::new(&loaded.instance, r, tau)?;
    let dist = est.distribution(&loaded.instance.sources()[source_index]);
    let grid = dist.len() as f64;
    let mut t = with_meta(&["m", "phase", "energy", "probability"], &loaded);
    t.meta("source_index", source_index)
        .meta("r", r)
        .meta("tau", fmt_f64(tau));
    for (m, &pm) in dist.iter().enumerate() {
        let phase = m as f64 / grid;
        // U = e^{-iHτ}: phase φ ↔ energy 2π(1 - φ)/τ on [0, 2π/τ)
        let energy = (2.0 * PI * (1.0 - phase)).rem_euclid(2.0 * PI) / tau;
        t.push(vec![m.into(), phase.into(), energy.into(), pm.into()]);
    }
    let path = emit(out, "qpe", &t)?;
    let best = (0..dist.len())
        .max_by(|&a, &b| dist[a].total_cmp(&dist[b]))
        .unwrap_or(0);
    Ok(Outcome {
        summary: format!(
            "qpe: r={r}, most likely m={best} (p={:.4}) -> {}",
            dist[best],
            path.display()
        ),
    })
}

#[allow(clippy::too_many_arguments)]
pub fn search_cmd(
    inst: &InstanceArgs,
    out: &OutputArgs,
    shots: usize,
    mode: ModeArg,
    p: f64,
    r: Option<u32>,
    delta_e: Option<f64>,
    tau: f64,
) -> CliResult<Outcome> {
    let loaded = inst.load()?;
    let seed = inst
        .seed
        .ok_or_else(|| CliError::Usage("search needs --seed for shot sampling".into()))?;
    let config = QpeConfig {
        r,
        tau,
        p,
        shots,
        mode: mode.into(),
        delta_e,
    };
    let outcome = search(&loaded.instance, &config, seed)?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    let path = match out.format.unwrap_or(Format::Json) {
        Format::Json => {
            let path = out.path("search", "jsonl");
            let body: String = outcome
                .results
                .iter()
                .map(|r| r.to_json_line() + "\n")
                .collect();
            write_file(&path, &body)?;
            path
        }
        Format::Csv => {
            let mut t = with_meta(
                &["shot", "source_n", "m", "ancilla", "index", "success"],
                &loaded,
            );
            t.meta("r", outcome.register_qubits)
                .meta("delta_e", fmt_f64(outcome.delta_e));
            for s in &outcome.results {
                t.push(vec![
                    s.shot.into(),
                    s.source_n.into(),
                    s.m.into(),
                    s.ancilla.map_or(Cell::Empty, |a| (a as usize).into()),
                    s.measured_index.map_or(Cell::Empty, Cell::from),
                    (s.success as usize).into(),
                ]);
            }
            emit(out, "search", &t)?
        }
    };
    Ok(Outcome {
        summary: format!(
            "search: r={}, {}/{} successes ({:.3}) -> {}",
            outcome.register_qubits,
            outcome.successes(),
            outcome.results.len(),
            outcome.success_fraction(),
            path.display()
        ),
    })
}

pub struct ScalingArgs<'a> {
    pub d: Option<usize>,
    pub m_list: &'a [usize],
    pub d_list: Option<&'a [usize]>,
    pub m: usize,
    pub p: f64,
    pub trials: usize,
    pub seed: u64,
}

pub fn scaling(args: &ScalingArgs<'_>, out: &OutputArgs) -> CliResult<Outcome> {
    if let Some(dims) = args.d_list {
        return resources(args, dims, out);
    }
    let d = args
        .d
        .ok_or_else(|| CliError::Usage("scaling needs --d or --d-list".into()))?;
    let records = scaling_study(d, args.m_list, args.trials, args.seed)?;
    let mut t = CsvTable::new(["D", "N", "M", "trial", "c_av", "c_max", "bound"]);
    t.meta("seed", args.seed).meta("trials", args.trials);
    for r in &records {
        t.push(vec![
            r.d.into(),
            r.n.into(),
            r.m.into(),
            r.trial.into(),
            r.c_av.into(),
            r.c_max.into(),
            r.bound.into(),
        ]);
    }
    let path = emit(out, "scaling", &t)?;
    let mut distinct = args.m_list.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let fit_note = if distinct.len() >= 2 {
        let fit = fit_alpha(&records)?;
        let fit_path = path.with_extension("fit.json");
        let body = serde_json::to_string_pretty(&fit).expect("fit serializes") + "\n";
        write_file(&fit_path, &body)?;
        format!("alpha={:.4}", fit.alpha)
    } else {
        "no fit (single M)".to_string()
    };
    Ok(Outcome {
        summary: format!(
            "scaling: {} records, {fit_note} -> {}",
            records.len(),
            path.display()
        ),
    })
}

fn resources(args: &ScalingArgs<'_>, dims: &[usize], out: &OutputArgs) -> CliResult<Outcome> {
    let rows = resource_table(dims, args.m, args.p, args.trials, args.seed)?;
    let mut t = CsvTable::new(["D", "M", "c_av", "runtime", "sqrt_D"]);
    t.meta("seed", args.seed)
        .meta("trials", args.trials)
        .meta("p", fmt_f64(args.p));
    for r in &rows {
        t.push(vec![
            r.d.into(),
            r.m.into(),
            r.c_av.into(),
            r.runtime.into(),
            r.sqrt_d.into(),
        ]);
    }
    let path = emit(out, "resources", &t)?;
    let note = if rows.len() >= 2 {
        let xs: Vec<f64> = rows.iter().map(|r| r.d as f64).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.c_av).collect();
        let fit = fit_power_law(&xs, &ys)?;
        let fit_path = path.with_extension("fit.json");
        let body = serde_json::to_string_pretty(&fit).expect("fit serializes") + "\n";
        write_file(&fit_path, &body)?;
        format!("c_av ~ D^{:.4}", fit.slope)
    } else {
        "no fit (single D)".to_string()
    };
    Ok(Outcome {
        summary: format!(
            "scaling --d-list: {} rows, {note} -> {}",
            rows.len(),
            path.display()
        ),
    })
}

pub fn verify(inst: &InstanceArgs, out: &OutputArgs) -> CliResult<Outcome> {
    let loaded = inst.load()?;
    let instance = &loaded.instance;
    let report = verify_identities(instance);
    let spec = pair_spectrum(instance);
    let dense = hermitian_eig(&instance.hamiltonian())?;
    let eig_err = spec
        .eigenvalues()
        .iter()
        .zip(&dense.eigenvalues)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let count =
        2 * spec.pairs.len() + spec.unpaired_t.len() + spec.unpaired_not_t.len() + spec.zero_dim;

    let mut checks: Vec<(&str, f64)> = report.entries().to_vec();
    checks.push(("spectrum_vs_dense", eig_err));
    checks.push(("mode_count", (count as f64 - instance.dim() as f64).abs()));

    let mut t = with_meta(&["check", "residual", "pass"], &loaded);
    t.meta("tolerance", fmt_f64(VERIFY_TOL));
    let mut failed = Vec::new();
    for (name, value) in &checks {
        let ok = *value < VERIFY_TOL;
        if !ok {
            failed.push(*name);
        }
        t.push(vec![(*name).into(), (*value).into(), (ok as usize).into()]);
    }
    let path = emit(out, "verify", &t)?;
    let worst = checks.iter().map(|c| c.1).fold(0.0, f64::max);
    if !failed.is_empty() {
        return Err(CliError::Check(format!(
            "residuals above {VERIFY_TOL:e}: {} (report in {})",
            failed.join(", "),
            path.display()
        )));
    }
    Ok(Outcome {
        summary: format!(
            "verify: {} checks below {VERIFY_TOL:e}, worst {worst:.2e} -> {}",
            checks.len(),
            path.display()
        ),
    })
}
