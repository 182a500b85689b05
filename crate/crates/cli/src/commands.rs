use serde::{Deserialize, Serialize};

use neutrino_magic::evolution::MethodDescriptor;
use neutrino_magic::harness::{
    default_table_specs, evolution_csv, long_table_specs, magic_power_csv, magic_power_rows, run_evolution,
    run_table, table_csv, MagicPowerConfig, Method, ParamSampling, RunConfig, TableRow, TableSpec,
};
use neutrino_magic::maxmagic::{max_magic_search, MagicConstraint, MaxMagicOptions};
use neutrino_magic::observables::AsymptoticEstimate;
use neutrino_magic::stabilizer::{enumerate_stabilizer_states, stabilizer_count};

use crate::args::{Cli, Command, DynamicsFlags, EvolveArgs, MagicPowerArgs, MaxMagicArgs, StabilizerArgs, TableArgs};
use crate::output::{load_config, to_json, CliError, CliResult, Outputs};

pub fn run(cli: Cli) -> CliResult<()> {
    let (outputs, out_dir) = match cli.command {
        Command::Evolve(a) => (evolve(&a)?, a.common.out),
        Command::Table(a) => (table(&a)?, a.common.out),
        Command::MagicPower(a) => (magic_power(&a)?, a.common.out),
        Command::MaxMagic(a) => (max_magic(&a)?, a.common.out),
        Command::Stabilizers(a) => (stabilizers(&a)?, a.common.out),
    };
    for path in outputs.write(&out_dir)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn apply_dynamics(cfg: &mut RunConfig, flags: &DynamicsFlags, seed: Option<u64>) {
    if let Some(method) = flags.method {
        cfg.method = method;
    }
    if let Some(dt) = flags.dt {
        cfg.trotter.step = dt;
    }
    if let Some(window) = flags.window {
        cfg.window = window;
        cfg.t_end = cfg.t_end.max(window.1);
    }
    let current_seed = match cfg.param_sampling {
        ParamSampling::Gaussian { seed, .. } => seed,
        ParamSampling::Off => 0,
    };
    let seed = seed.unwrap_or(current_seed);
    cfg.param_sampling = match (flags.samples, cfg.param_sampling) {
        (Some(0), _) => ParamSampling::Off,
        (Some(count), _) | (None, ParamSampling::Gaussian { count, .. }) => ParamSampling::Gaussian { count, seed },
        (None, ParamSampling::Off) => ParamSampling::Off,
    };
}

fn sampling_seed(cfg: &RunConfig) -> Option<u64> {
    match cfg.param_sampling {
        ParamSampling::Gaussian { seed, .. } => Some(seed),
        ParamSampling::Off => None,
    }
}

#[derive(Serialize)]
struct EvolveSummary<'a> {
    flavors: &'a str,
    local_dim: usize,
    neutrinos: usize,
    method: &'a MethodDescriptor,
    estimate: &'a AsymptoticEstimate,
    sample_means: &'a [f64],
    max_m2: f64,
    max_norm_drift: f64,
    renormalizations: usize,
}

fn evolve(a: &EvolveArgs) -> CliResult<Outputs> {
    let mut cfg: RunConfig = load_config(a.common.config.as_deref(), "evolve")?;
    if let Some(f) = &a.flavors {
        cfg.flavors = f.clone();
        cfg.neutrinos = None;
    }
    if let Some(d) = a.local_dim {
        cfg.local_dim = d;
    }
    apply_dynamics(&mut cfg, &a.dynamics, a.common.seed);
    cfg.validate()?;
    let run = run_evolution(&cfg)?;
    let summary = EvolveSummary {
        flavors: &run.flavors,
        local_dim: run.local_dim,
        neutrinos: cfg.sites()?,
        method: &run.method,
        estimate: &run.estimate,
        sample_means: &run.sample_means,
        max_m2: run.rows.iter().map(|r| r.m2).fold(f64::MIN, f64::max),
        max_norm_drift: run.max_norm_drift,
        renormalizations: run.renormalizations,
    };
    let mut out = Outputs::new("evolve", sampling_seed(&cfg), &cfg);
    out.add("timeseries.csv", evolution_csv(&run).into_bytes());
    out.add("summary.json", to_json(&summary));
    Ok(out)
}

/// Rows to evaluate on top of a base run config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TableConfig {
    pub base: RunConfig,
    pub methods: Vec<Method>,
    /// Flavor strings to evaluate instead of the built-in rows.
    pub rows: Vec<String>,
    pub long: bool,
}

impl Default for TableConfig {
    fn default() -> Self {
        TableConfig {
            base: RunConfig::default(),
            methods: vec![Method::Trotter, Method::Ode],
            rows: Vec::new(),
            long: false,
        }
    }
}

impl TableConfig {
    fn specs(&self) -> Vec<TableSpec> {
        if !self.rows.is_empty() {
            return self
                .methods
                .iter()
                .flat_map(|&m| self.rows.iter().map(move |f| TableSpec::new(f, m)))
                .collect();
        }
        let mut specs: Vec<TableSpec> =
            default_table_specs().into_iter().filter(|s| self.methods.contains(&s.method)).collect();
        if self.long {
            for &method in &self.methods {
                specs.extend(long_table_specs().into_iter().map(|s| TableSpec { method, ..s }));
            }
        }
        specs
    }
}

fn table(a: &TableArgs) -> CliResult<Outputs> {
    let mut cfg: TableConfig = load_config(a.common.config.as_deref(), "table")?;
    apply_dynamics(&mut cfg.base, &a.dynamics, a.common.seed);
    if let Some(method) = a.dynamics.method {
        cfg.methods = vec![method];
    }
    cfg.long |= a.long;
    if cfg.methods.is_empty() {
        return Err(CliError::config("methods: at least one method is required"));
    }
    cfg.base.validate()?;

    let specs = cfg.specs();
    let chunk = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut rows: Vec<TableRow> = Vec::with_capacity(specs.len());
    for batch in specs.chunks(chunk) {
        for row in run_table(batch, &cfg.base) {
            let status = match (&row.estimate, &row.error) {
                (Some(e), _) => format!("{:.4}", e.mean),
                (None, Some(err)) => format!("failed: {err}"),
                (None, None) => "no result".into(),
            };
            eprintln!("[{}/{}] {} {} {status}", rows.len() + 1, specs.len(), row.flavors, row.method);
            rows.push(row);
        }
    }
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        eprintln!("warning: {failed} row(s) failed; see the error column of table.csv");
    }
    let mut out = Outputs::new("table", sampling_seed(&cfg.base), &cfg);
    out.add("table.csv", table_csv(&rows).into_bytes());
    Ok(out)
}

fn magic_power(a: &MagicPowerArgs) -> CliResult<Outputs> {
    let mut cfg: MagicPowerConfig = load_config(a.common.config.as_deref(), "magic-power")?;
    if let Some(range) = a.window {
        cfg.range = range;
    }
    if let Some(points) = a.points {
        cfg.points = points;
    }
    if let Some(samples) = a.samples {
        cfg.samples = samples;
    }
    if let Some(seed) = a.common.seed {
        cfg.seed = seed;
    }
    let rows = magic_power_rows(&cfg)?;
    let mut out = Outputs::new("magic-power", Some(cfg.seed), &cfg);
    out.add("magicpower.csv", magic_power_csv(&rows).into_bytes());
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaxMagicConfig {
    pub local_dim: usize,
    pub sites: usize,
    pub constraint: MagicConstraint,
    pub options: MaxMagicOptions,
}

impl Default for MaxMagicConfig {
    fn default() -> Self {
        MaxMagicConfig { local_dim: 3, sites: 2, constraint: MagicConstraint::AnyPure, options: MaxMagicOptions::default() }
    }
}

#[derive(Serialize)]
struct RestartStats {
    count: usize,
    best: f64,
    mean: f64,
    worst: f64,
    /// Restarts that ended within 1e-6 of the best value.
    at_best: usize,
    values: Vec<f64>,
}

#[derive(Serialize)]
struct MaxMagicReport {
    local_dim: usize,
    sites: usize,
    constraint: MagicConstraint,
    m2: f64,
    /// `[re, im]` per basis state.
    amplitudes: Vec<[f64; 2]>,
    restarts: RestartStats,
    evaluations: usize,
}

fn max_magic(a: &MaxMagicArgs) -> CliResult<Outputs> {
    let mut cfg: MaxMagicConfig = load_config(a.common.config.as_deref(), "max-magic")?;
    if let Some(d) = a.local_dim {
        cfg.local_dim = d;
    }
    if let Some(n) = a.sites {
        cfg.sites = n;
    }
    if let Some(c) = a.constraint {
        cfg.constraint = c;
    }
    if let Some(r) = a.restarts {
        cfg.options.restarts = r;
    }
    if let Some(seed) = a.common.seed {
        cfg.options.seed = seed;
    }
    let result = max_magic_search(cfg.local_dim, cfg.sites, cfg.constraint, &cfg.options)?;
    let values = result.restart_values.clone();
    let report = MaxMagicReport {
        local_dim: cfg.local_dim,
        sites: cfg.sites,
        constraint: cfg.constraint,
        m2: result.m2,
        amplitudes: result.state.amplitudes().iter().map(|c| [c.re, c.im]).collect(),
        restarts: RestartStats {
            count: values.len(),
            best: result.m2,
            mean: values.iter().sum::<f64>() / values.len() as f64,
            worst: values.iter().cloned().fold(f64::INFINITY, f64::min),
            at_best: values.iter().filter(|v| result.m2 - **v < 1e-6).count(),
            values,
        },
        evaluations: result.evaluations,
    };
    let mut out = Outputs::new("max-magic", Some(cfg.options.seed), &cfg);
    out.add("maxmagic.json", to_json(&report));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilizerConfig {
    pub local_dim: usize,
    pub sites: usize,
}

impl Default for StabilizerConfig {
    fn default() -> Self {
        StabilizerConfig { local_dim: 3, sites: 1 }
    }
}

#[derive(Serialize)]
struct StabilizerReport {
    local_dim: usize,
    sites: usize,
    count: usize,
    formula_count: u64,
    /// Phase-canonical amplitudes, `[re, im]` per basis state.
    states: Vec<Vec<[f64; 2]>>,
}

fn stabilizers(a: &StabilizerArgs) -> CliResult<Outputs> {
    let mut cfg: StabilizerConfig = load_config(a.common.config.as_deref(), "stabilizers")?;
    if let Some(d) = a.local_dim {
        cfg.local_dim = d;
    }
    if let Some(n) = a.sites {
        cfg.sites = n;
    }
    let set = enumerate_stabilizer_states(cfg.local_dim, cfg.sites)?;
    let formula = stabilizer_count(cfg.local_dim, cfg.sites)
        .ok_or_else(|| CliError::numerical("closed-form stabilizer count overflows"))?;
    if formula != set.len() as u64 {
        return Err(CliError::numerical(format!(
            "enumerated {} states but the closed form gives {formula}",
            set.len()
        )));
    }
    let report = StabilizerReport {
        local_dim: cfg.local_dim,
        sites: cfg.sites,
        count: set.len(),
        formula_count: formula,
        states: set.states.iter().map(|s| s.amplitudes().iter().map(|c| [c.re, c.im]).collect()).collect(),
    };
    let mut out = Outputs::new("stabilizers", None, &cfg);
    out.add("stabilizers.json", to_json(&report));
    Ok(out)
}

