//! Run configuration, parameter sampling and the generators behind the CLI
//! outputs (time series, asymptotic tables, magic-power curves).

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::error::{check_local_dim, invalid, Error, Result};
use crate::evolution::{
    evolve_ode, evolve_trotter, EvolutionRecord, MethodDescriptor, OdeConfig, SampleSchedule,
    TrotterConfig,
};
use crate::magic::{
    m2, magic_power_analytic_2f, magic_power_analytic_3f, magic_power_over, MagicMeasure,
};
use crate::model::{
    flavor_product_state, flavor_state, max_neutrinos, one_body_diagonal, Flavor, Measured,
    ModelProfile, NeutrinoHamiltonian, OscillationParams,
};
use crate::observables::{
    asymptotic_average, entanglement_summary, mass_probabilities, AsymptoticEstimate,
    EntanglementSummary, TimeSeries, DEFAULT_WINDOW, STABILIZED_FROM,
};
use crate::par;
use crate::stabilizer::enumerate_stabilizer_states;
use crate::state::{StateVector, C64, ZERO};

/// Largest two-qubit and two-qutrit `M₂`.
pub const MAX_M2_TWO_QUBITS: f64 = 1.19265;
pub const MAX_M2_TWO_QUTRITS: f64 = 2.23379;

pub const DEFAULT_PARAM_SAMPLES: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Trotter,
    Ode,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Trotter => "trotter",
            Method::Ode => "ode",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trotter" => Ok(Method::Trotter),
            "ode" => Ok(Method::Ode),
            other => Err(invalid(format!("unknown method {other:?} (expected trotter or ode)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ParamSampling {
    Off,
    Gaussian { count: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub local_dim: usize,
    /// Optional cross-check against the length of `flavors`.
    pub neutrinos: Option<usize>,
    /// Compact flavor letters, site 1 first (e.g. `"emt"`).
    pub flavors: String,
    pub method: Method,
    pub trotter: TrotterConfig,
    pub ode: OdeConfig,
    pub t_end: f64,
    pub sample_every: f64,
    pub window: (f64, f64),
    pub param_sampling: ParamSampling,
    pub params: OscillationParams,
    pub profile: ModelProfile,
    /// Compute C, G and the tangles at every sample.
    pub entanglement: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            local_dim: 3,
            neutrinos: None,
            flavors: "ee".into(),
            method: Method::Trotter,
            trotter: TrotterConfig::default(),
            ode: OdeConfig::default(),
            t_end: DEFAULT_WINDOW.1,
            sample_every: 1.0,
            window: DEFAULT_WINDOW,
            param_sampling: ParamSampling::Off,
            params: OscillationParams::default(),
            profile: ModelProfile::default(),
            entanglement: true,
        }
    }
}

fn field_error(field: &str, message: impl std::fmt::Display) -> Error {
    Error::InvalidArgument(format!("{field}: {message}"))
}

impl RunConfig {
    pub fn flavor_list(&self) -> Result<Vec<Flavor>> {
        Flavor::parse_list(&self.flavors).map_err(|e| field_error("flavors", e))
    }

    pub fn sites(&self) -> Result<usize> {
        Ok(self.flavor_list()?.len())
    }

    pub fn validate(&self) -> Result<()> {
        check_local_dim(self.local_dim).map_err(|e| field_error("local_dim", e))?;
        let flavors = self.flavor_list()?;
        if flavors.is_empty() {
            return Err(field_error("flavors", "at least one flavor is required"));
        }
        if self.local_dim == 2 && flavors.contains(&Flavor::Tau) {
            return Err(field_error("flavors", "tau needs local_dim 3"));
        }
        if let Some(n) = self.neutrinos {
            if n != flavors.len() {
                return Err(field_error(
                    "neutrinos",
                    format!("{n} does not match the {} flavors given", flavors.len()),
                ));
            }
        }
        if flavors.len() > max_neutrinos(self.local_dim) {
            return Err(Error::UnsupportedSize(format!(
                "flavors: {} neutrinos exceed the limit of {} for local_dim {}",
                flavors.len(),
                max_neutrinos(self.local_dim),
                self.local_dim
            )));
        }
        if !(self.sample_every > 0.0 && self.sample_every.is_finite()) {
            return Err(field_error("sample_every", "must be positive"));
        }
        let (lo, hi) = self.window;
        if !(lo < hi) {
            return Err(field_error("window", format!("[{lo}, {hi}] is empty")));
        }
        if lo < STABILIZED_FROM {
            return Err(field_error("window", format!("must start at κt ≥ {STABILIZED_FROM}")));
        }
        if !(self.t_end >= hi) {
            return Err(field_error(
                "t_end",
                format!("{} ends before the averaging window [{lo}, {hi}]", self.t_end),
            ));
        }
        if !(self.trotter.step > 0.0) {
            return Err(field_error("trotter.step", "must be positive"));
        }
        if self.trotter.substeps == Some(0) {
            return Err(field_error("trotter.substeps", "must be at least 1"));
        }
        if !(self.ode.abs_tol > 0.0 && self.ode.rel_tol > 0.0) {
            return Err(field_error("ode", "tolerances must be positive"));
        }
        if let ParamSampling::Gaussian { count, .. } = self.param_sampling {
            if count == 0 {
                return Err(field_error("param_sampling.count", "must be at least 1"));
            }
        }
        if !(self.profile.e0 > 0.0 && self.profile.kappa > 0.0) {
            return Err(field_error("profile", "e0 and kappa must be positive"));
        }
        if self.profile.r0 < self.profile.r_nu {
            return Err(field_error("profile.r0", "starts inside the neutrino sphere"));
        }
        pmns_check(&self.params).map_err(|e| field_error("params", e))?;
        Ok(())
    }
}

fn pmns_check(params: &OscillationParams) -> Result<()> {
    crate::model::pmns_matrix(params).map(|_| ())
}

/// Independent two-sided Gaussian draws of every oscillation parameter.
///
/// Each sample consumes six standard normals in field order; draws that land
/// outside the physical range are redrawn.
pub fn sample_parameters(base: &OscillationParams, count: usize, seed: u64) -> Vec<OscillationParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut z = [0.0f64; 6];
        for v in z.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
        }
        let at = |m: &Measured, z: f64| Measured::symmetric(m.at_deviate(z), 0.0);
        let p = OscillationParams {
            sin2_theta12: at(&base.sin2_theta12, z[0]),
            sin2_theta23: at(&base.sin2_theta23, z[1]),
            sin2_theta13: at(&base.sin2_theta13, z[2]),
            delta_cp: at(&base.delta_cp, z[3]),
            dm21_sq: at(&base.dm21_sq, z[4]),
            dm32_sq: at(&base.dm32_sq, z[5]),
        };
        if pmns_check(&p).is_ok() && p.dm21_sq.value > 0.0 && p.dm32_sq.value > 0.0 {
            out.push(p);
        }
    }
    out
}

/// Population mean and standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = par::pairwise_sum(values) / n;
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    (mean, (par::pairwise_sum(&sq) / n).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SingleNeutrinoMagic {
    pub central: f64,
    pub sampled_mean: f64,
    pub sampled_std: f64,
    pub samples: usize,
}

/// `M₂` of one flavor state at central values and under parameter sampling.
pub fn single_neutrino_magic(
    flavor: Flavor,
    local_dim: usize,
    base: &OscillationParams,
    samples: usize,
    seed: u64,
) -> Result<SingleNeutrinoMagic> {
    if samples == 0 {
        return Err(invalid("at least one parameter sample is required"));
    }
    let central = m2(&flavor_state(flavor, base, local_dim)?)?;
    let draws = sample_parameters(base, samples, seed);
    let values = draws
        .iter()
        .map(|p| m2(&flavor_state(flavor, p, local_dim)?))
        .collect::<Result<Vec<f64>>>()?;
    let (sampled_mean, sampled_std) = mean_std(&values);
    Ok(SingleNeutrinoMagic { central, sampled_mean, sampled_std, samples })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvolutionRow {
    pub kappa_t: f64,
    pub m2: f64,
    pub m2_per_nu: f64,
    pub m2_normalized: Option<f64>,
    /// `[site][mass level]`.
    pub probabilities: Vec<Vec<f64>>,
    pub entanglement: Option<EntanglementSummary>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EvolutionRun {
    pub local_dim: usize,
    pub flavors: String,
    pub rows: Vec<EvolutionRow>,
    pub estimate: AsymptoticEstimate,
    /// Window means of each parameter sample, when sampling is on.
    pub sample_means: Vec<f64>,
    pub method: MethodDescriptor,
    pub max_norm_drift: f64,
    pub renormalizations: usize,
}

fn normalization(local_dim: usize, sites: usize) -> Option<f64> {
    (sites == 2).then_some(if local_dim == 2 { MAX_M2_TWO_QUBITS } else { MAX_M2_TWO_QUTRITS })
}

fn evolve_with<T, F>(
    cfg: &RunConfig,
    params: &OscillationParams,
    from: f64,
    observer: F,
) -> Result<EvolutionRecord<T>>
where
    F: FnMut(f64, &StateVector) -> Result<T>,
{
    let flavors = cfg.flavor_list()?;
    let ham = NeutrinoHamiltonian::new(flavors.len(), params, &cfg.profile, cfg.local_dim)?;
    let psi0 = flavor_product_state(&flavors, params, cfg.local_dim)?;
    let schedule = SampleSchedule { every: cfg.sample_every, from };
    match cfg.method {
        Method::Trotter => evolve_trotter(&psi0, cfg.t_end, &cfg.trotter, &ham, &schedule, observer),
        Method::Ode => evolve_ode(&psi0, cfg.t_end, &cfg.ode, &ham, &schedule, observer),
    }
}

/// Asymptotic `M₂/N` for one parameter set, sampling only inside the window.
pub fn window_magic(cfg: &RunConfig, params: &OscillationParams) -> Result<AsymptoticEstimate> {
    let n = cfg.sites()? as f64;
    let rec = evolve_with(cfg, params, cfg.window.0, |_, psi| Ok(m2(psi)? / n))?;
    let series = TimeSeries::new(rec.times, rec.samples)?.with_method(rec.method);
    asymptotic_average(&series, cfg.window)
}

fn param_spread(cfg: &RunConfig) -> Result<Vec<f64>> {
    match cfg.param_sampling {
        ParamSampling::Off => Ok(Vec::new()),
        ParamSampling::Gaussian { count, seed } => {
            let draws = sample_parameters(&cfg.params, count, seed);
            par::map_slice(&draws, |p| window_magic(cfg, p).map(|e| e.mean))
                .into_iter()
                .collect()
        }
    }
}

/// Full time series at central parameters plus the asymptotic estimate.
pub fn run_evolution(cfg: &RunConfig) -> Result<EvolutionRun> {
    cfg.validate()?;
    let flavors = cfg.flavor_list()?;
    let n = flavors.len();
    let norm = normalization(cfg.local_dim, n);
    let rec = evolve_with(cfg, &cfg.params, 0.0, |t, psi| {
        let m = m2(psi)?;
        Ok(EvolutionRow {
            kappa_t: t,
            m2: m,
            m2_per_nu: m / n as f64,
            m2_normalized: norm.map(|max| m / max),
            probabilities: mass_probabilities(psi),
            entanglement: if cfg.entanglement { Some(entanglement_summary(psi)?) } else { None },
        })
    })?;
    let series = TimeSeries::new(
        rec.times.clone(),
        rec.samples.iter().map(|r| r.m2_per_nu).collect(),
    )?;
    let mut estimate = asymptotic_average(&series, cfg.window)?;
    let sample_means = param_spread(cfg)?;
    if !sample_means.is_empty() {
        estimate.param_std = Some(mean_std(&sample_means).1);
    }
    Ok(EvolutionRun {
        local_dim: cfg.local_dim,
        flavors: cfg.flavors.clone(),
        rows: rec.samples,
        estimate,
        sample_means,
        method: rec.method,
        max_norm_drift: rec.max_norm_drift,
        renormalizations: rec.renormalizations,
    })
}

/// Scientific notation with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn evolution_csv(run: &EvolutionRun) -> String {
    let sites = run.flavors.chars().count();
    let with_norm = run.rows.first().is_some_and(|r| r.m2_normalized.is_some());
    let mut header = vec!["kappa_t".to_string(), "m2".into(), "m2_per_nu".into()];
    if with_norm {
        header.push("m2_normalized".into());
    }
    for site in 1..=sites {
        for level in 1..=run.local_dim {
            header.push(format!("prob_site{site}_mass{level}"));
        }
    }
    header.extend(["C", "G", "tau2", "tau4"].map(String::from));
    let mut out = header.join(",");
    out.push('\n');
    for r in &run.rows {
        let mut cells = vec![fmt_f64(r.kappa_t), fmt_f64(r.m2), fmt_f64(r.m2_per_nu)];
        if with_norm {
            cells.push(fmt_opt(r.m2_normalized));
        }
        cells.extend(r.probabilities.iter().flatten().map(|&p| fmt_f64(p)));
        match &r.entanglement {
            Some(e) => cells.extend([fmt_f64(e.c), fmt_f64(e.g), fmt_opt(e.tau2), fmt_opt(e.tau4)]),
            None => cells.extend(std::iter::repeat_n(String::new(), 4)),
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableSpec {
    pub flavors: String,
    pub method: Method,
}

impl TableSpec {
    pub fn new(flavors: &str, method: Method) -> Self {
        TableSpec { flavors: flavors.into(), method }
    }

    pub fn sites(&self) -> usize {
        self.flavors.chars().count()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub neutrinos: usize,
    pub method: Method,
    pub flavors: String,
    pub estimate: Option<AsymptoticEstimate>,
    pub error: Option<String>,
}

/// Rows up to five neutrinos, both methods where `N ≤ 4`.
pub fn default_table_specs() -> Vec<TableSpec> {
    let mut specs = Vec::new();
    let rows: [(&str, &[&str]); 4] = [
        ("ee", &["em", "et"]),
        ("eee", &["emt"]),
        ("eeee", &["emmt", "emtt"]),
        ("eeeee", &["eemmt", "eemtt", "tmetm"]),
    ];
    for (uniform, mixed) in rows {
        let methods: &[Method] =
            if uniform.len() <= 4 { &[Method::Trotter, Method::Ode] } else { &[Method::Trotter] };
        for &method in methods {
            specs.push(TableSpec::new(uniform, method));
            for m in mixed {
                specs.push(TableSpec::new(m, method));
            }
        }
    }
    specs
}

/// Six- to eight-neutrino rows (hours of runtime).
pub fn long_table_specs() -> Vec<TableSpec> {
    [
        "eeeeee", "ttmmee", "eemttt", "emmttt", "tmtmte", "emtemt", "mtemtm", "tmetmt",
        "eeeeeee", "teeeeee", "eemmeet", "ttmmeet", "ttttttt", "emtemte", "emtemtt", "ttetttt",
        "tmetetm", "tmetmet", "tmetmtm",
        "eeeeeeee", "tteettee", "eeemmttt", "tttmmmee", "eetteett", "mmtteett", "tetetete",
        "emtemtem", "tmetmtmt", "tmetmetm",
    ]
    .iter()
    .map(|f| TableSpec::new(f, Method::Trotter))
    .collect()
}

/// Evaluates every row; failures are recorded per row instead of aborting.
pub fn run_table(specs: &[TableSpec], base: &RunConfig) -> Vec<TableRow> {
    let eval = |spec: &TableSpec| -> Result<AsymptoticEstimate> {
        let cfg = RunConfig {
            flavors: spec.flavors.clone(),
            neutrinos: None,
            method: spec.method,
            entanglement: false,
            ..base.clone()
        };
        cfg.validate()?;
        let mut estimate = window_magic(&cfg, &cfg.params)?;
        let spread = param_spread(&cfg)?;
        if !spread.is_empty() {
            estimate.param_std = Some(mean_std(&spread).1);
        }
        Ok(estimate)
    };
    par::map_slice(specs, |spec| {
        let (estimate, error) = match eval(spec) {
            Ok(e) => (Some(e), None),
            Err(e) => (None, Some(e.to_string())),
        };
        TableRow {
            neutrinos: spec.sites(),
            method: spec.method,
            flavors: spec.flavors.clone(),
            estimate,
            error,
        }
    })
}

pub fn table_csv(rows: &[TableRow]) -> String {
    let mut out = String::from("neutrinos,method,flavors,mean,time_std,param_std,error\n");
    for r in rows {
        let (mean, time_std, param_std) = match &r.estimate {
            Some(e) => (fmt_f64(e.mean), fmt_f64(e.time_std), fmt_opt(e.param_std)),
            None => Default::default(),
        };
        let error = r.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
        let _ = writeln!(out, "{},{},{},{mean},{time_std},{param_std},{error}", r.neutrinos, r.method, r.flavors);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MagicPowerConfig {
    /// `κt` range, inclusive.
    pub range: (f64, f64),
    pub points: usize,
    pub samples: usize,
    pub seed: u64,
    pub params: OscillationParams,
    pub profile: ModelProfile,
}

impl Default for MagicPowerConfig {
    fn default() -> Self {
        MagicPowerConfig {
            range: (0.0, 1000.0),
            points: 501,
            samples: DEFAULT_PARAM_SAMPLES,
            seed: 0,
            params: OscillationParams::default(),
            profile: ModelProfile::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MagicPowerRow {
    pub kappa_t: f64,
    pub analytic_3f: f64,
    pub numeric_3f: f64,
    pub analytic_2f: f64,
    pub numeric_2f: f64,
    pub band_lo_3f: f64,
    pub band_hi_3f: f64,
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn one_body_propagator(diag: &[f64], t: f64) -> DMatrix<C64> {
    let mut u = DMatrix::from_element(diag.len(), diag.len(), ZERO);
    for (k, e) in diag.iter().enumerate() {
        u[(k, k)] = C64::from_polar(1.0, -e * t);
    }
    u
}

/// Magic power of the free one-body propagator over a `κt` grid, with a
/// 68% band from sampling the two mass splittings.
pub fn magic_power_rows(cfg: &MagicPowerConfig) -> Result<Vec<MagicPowerRow>> {
    if cfg.points < 2 {
        return Err(field_error("points", "need at least two grid points"));
    }
    if !(cfg.range.0 <= cfg.range.1) {
        return Err(field_error("range", "lower end exceeds upper end"));
    }
    if cfg.samples == 0 {
        return Err(field_error("samples", "must be at least 1"));
    }
    let (e, kappa) = (cfg.profile.e0, cfg.profile.kappa);
    let diag3 = one_body_diagonal(&cfg.params, e, kappa, 3)?;
    let diag2 = one_body_diagonal(&cfg.params, e, kappa, 2)?;
    let stab3 = enumerate_stabilizer_states(3, 1)?;
    let stab2 = enumerate_stabilizer_states(2, 1)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let splittings: Vec<(f64, f64)> = (0..cfg.samples)
        .map(|_| {
            let z21: f64 = StandardNormal.sample(&mut rng);
            let z32: f64 = StandardNormal.sample(&mut rng);
            let dm21 = cfg.params.dm21_sq.at_deviate(z21);
            (dm21, cfg.params.dm32_sq.at_deviate(z32) + dm21)
        })
        .collect();

    let (dm21, dm31) = (cfg.params.dm21_sq.value, cfg.params.dm31_sq());
    let grid: Vec<f64> = (0..cfg.points)
        .map(|k| cfg.range.0 + (cfg.range.1 - cfg.range.0) * k as f64 / (cfg.points - 1) as f64)
        .collect();
    par::map_slice(&grid, |&kt| {
        let t = kt / kappa;
        let mut band: Vec<f64> =
            splittings.iter().map(|&(a, b)| magic_power_analytic_3f(t, e, a, b)).collect();
        band.sort_by(f64::total_cmp);
        Ok(MagicPowerRow {
            kappa_t: kt,
            analytic_3f: magic_power_analytic_3f(t, e, dm21, dm31),
            numeric_3f: magic_power_over(&stab3, &one_body_propagator(&diag3, kt), MagicMeasure::Two)?,
            analytic_2f: magic_power_analytic_2f(t, e, dm21),
            numeric_2f: magic_power_over(&stab2, &one_body_propagator(&diag2, kt), MagicMeasure::Two)?,
            band_lo_3f: quantile(&band, 0.16),
            band_hi_3f: quantile(&band, 0.84),
        })
    })
    .into_iter()
    .collect()
}

pub fn magic_power_csv(rows: &[MagicPowerRow]) -> String {
    let mut out = String::from(
        "kappa_t,analytic_3f,numeric_3f,analytic_2f,numeric_2f,band_lo_3f,band_hi_3f\n",
    );
    for r in rows {
        let cells = [
            r.kappa_t,
            r.analytic_3f,
            r.numeric_3f,
            r.analytic_2f,
            r.numeric_2f,
            r.band_lo_3f,
            r.band_hi_3f,
        ]
        .map(fmt_f64);
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
