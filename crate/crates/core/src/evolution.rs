//! Time evolution under `H(t)`: symmetric product-formula stepping and an
//! adaptive 8th-order Dormand–Prince integrator.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::NeutrinoHamiltonian;
use crate::state::{StateVector, C64};

mod dop853;

pub use dop853::{Dop853, OdeStats};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrotterOrder {
    First,
    Second,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrotterConfig {
    /// `Δκt`, the slice over which `μ` is held at its midpoint value.
    pub step: f64,
    pub order: TrotterOrder,
    /// Product-formula steps per slice; `None` picks enough that the fastest
    /// single-site phase advances at most [`MAX_SUBSTEP_PHASE`] per substep.
    pub substeps: Option<usize>,
    /// Renormalize the state every this many steps (0 disables).
    pub renormalize_every: usize,
}

/// Radians.
pub const MAX_SUBSTEP_PHASE: f64 = 0.1;

impl TrotterConfig {
    pub fn substeps_for(&self, ham: &NeutrinoHamiltonian) -> usize {
        self.substeps.unwrap_or_else(|| {
            ((ham.max_site_level() * self.step / MAX_SUBSTEP_PHASE).ceil() as usize).max(1)
        })
    }
}

impl Default for TrotterConfig {
    fn default() -> Self {
        TrotterConfig { step: 0.05, order: TrotterOrder::Second, substeps: None, renormalize_every: 1000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdeConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_steps: u64,
}

impl Default for OdeConfig {
    fn default() -> Self {
        OdeConfig { abs_tol: 1e-8, rel_tol: 1e-8, max_steps: 200_000_000 }
    }
}

/// How a trajectory was produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MethodDescriptor {
    Trotter { step: f64, order: TrotterOrder, substeps: usize },
    Ode { method: String, abs_tol: f64, rel_tol: f64, accepted_steps: u64, rejected_steps: u64 },
}

/// When the observer is invoked.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSchedule {
    /// Spacing in `κt`.
    pub every: f64,
    /// Samples before this time are skipped.
    pub from: f64,
}

impl SampleSchedule {
    pub fn every(every: f64) -> Self {
        SampleSchedule { every, from: 0.0 }
    }
}

#[derive(Clone, Debug)]
pub struct EvolutionRecord<T> {
    pub times: Vec<f64>,
    pub samples: Vec<T>,
    pub final_state: StateVector,
    pub method: MethodDescriptor,
    /// Largest `|‖ψ‖ − 1|` seen before any renormalization.
    pub max_norm_drift: f64,
    pub renormalizations: usize,
}

fn check_state(psi: &StateVector, ham: &NeutrinoHamiltonian) -> Result<()> {
    if psi.local_dim() != ham.local_dim() || psi.sites() != ham.sites() {
        return Err(invalid("state and Hamiltonian act on different spaces"));
    }
    Ok(())
}

/// Product-formula integrator with cached one-body phases.
pub struct TrotterStepper<'a> {
    ham: &'a NeutrinoHamiltonian,
    config: TrotterConfig,
    substeps: usize,
    one_body_phases: Vec<C64>,
    phase_step: f64,
}

impl<'a> TrotterStepper<'a> {
    pub fn new(ham: &'a NeutrinoHamiltonian, config: TrotterConfig) -> Result<Self> {
        if !(config.step > 0.0) {
            return Err(invalid("Trotter step must be positive"));
        }
        if config.substeps == Some(0) {
            return Err(invalid("Trotter substeps must be at least 1"));
        }
        let substeps = config.substeps_for(ham);
        let mut s = TrotterStepper {
            ham,
            config,
            substeps,
            one_body_phases: Vec::new(),
            phase_step: f64::NAN,
        };
        s.cache_phases(config.step / substeps as f64);
        Ok(s)
    }

    fn one_body_fraction(&self) -> f64 {
        match self.config.order {
            TrotterOrder::First => 1.0,
            TrotterOrder::Second => 0.5,
        }
    }

    fn cache_phases(&mut self, dt: f64) {
        if self.phase_step == dt {
            return;
        }
        let tau = dt * self.one_body_fraction();
        self.one_body_phases = self
            .ham
            .one_body_diagonal()
            .iter()
            .map(|e| C64::from_polar(1.0, -e * tau))
            .collect();
        self.phase_step = dt;
    }

    fn apply_one_body(&self, psi: &mut [C64]) {
        for (a, p) in psi.iter_mut().zip(&self.one_body_phases) {
            *a *= p;
        }
    }

    /// `exp(−iμτ(2·SWAP − (2/d)·I))` on pair `k`.
    fn apply_pair(&self, k: usize, mu: f64, tau: f64, psi: &mut [C64]) {
        let d = self.ham.local_dim() as f64;
        let global = C64::from_polar(1.0, mu * tau * 2.0 / d);
        let angle = 2.0 * mu * tau;
        let (c, s) = (angle.cos(), angle.sin());
        let fixed = global * C64::from_polar(1.0, -angle);
        let mix_same = global * c;
        let mix_other = global * C64::new(0.0, -s);
        let perm = self.ham.swap(k);
        for j in 0..psi.len() {
            let p = perm[j] as usize;
            if p == j {
                psi[j] *= fixed;
            } else if p > j {
                let (a, b) = (psi[j], psi[p]);
                psi[j] = mix_same * a + mix_other * b;
                psi[p] = mix_same * b + mix_other * a;
            }
        }
    }

    /// Advances `psi` from `t` to `t + dt` with `μ` frozen at `t + dt/2`.
    ///
    /// The slice is split into `substeps` product-formula steps. Second
    /// order: half one-body step, pair gates swept forward then backward
    /// with half steps (the middle gate merged), half one-body step. First
    /// order: full one-body step followed by one forward sweep.
    pub fn step(&mut self, psi: &mut StateVector, t: f64, dt: f64) -> Result<()> {
        let mu = self.ham.coupling_at(t + 0.5 * dt)?;
        let h = dt / self.substeps as f64;
        self.cache_phases(h);
        let amps = psi.amplitudes_mut();
        let pairs = self.ham.pairs().len();
        for _ in 0..self.substeps {
            match self.config.order {
                TrotterOrder::First => {
                    self.apply_one_body(amps);
                    for k in 0..pairs {
                        self.apply_pair(k, mu, h, amps);
                    }
                }
                TrotterOrder::Second => {
                    self.apply_one_body(amps);
                    for k in 0..pairs {
                        let tau = if k + 1 == pairs { h } else { 0.5 * h };
                        self.apply_pair(k, mu, tau, amps);
                    }
                    for k in (0..pairs.saturating_sub(1)).rev() {
                        self.apply_pair(k, mu, 0.5 * h, amps);
                    }
                    self.apply_one_body(amps);
                }
            }
        }
        Ok(())
    }
}

/// One product-formula step from `t` to `t + dt`.
pub fn trotter_step(
    psi: &StateVector,
    t: f64,
    dt: f64,
    config: &TrotterConfig,
    ham: &NeutrinoHamiltonian,
) -> Result<StateVector> {
    check_state(psi, ham)?;
    let mut stepper = TrotterStepper::new(ham, TrotterConfig { step: dt, ..*config })?;
    let mut out = psi.clone();
    stepper.step(&mut out, t, dt)?;
    Ok(out)
}

fn sample_stride(every: f64, dt: f64) -> Result<usize> {
    if !(every > 0.0) {
        return Err(invalid("sample spacing must be positive"));
    }
    Ok(((every / dt).round() as usize).max(1))
}

/// Repeated product-formula steps from `κt = 0` to `t_end`, calling
/// `observer(t, ψ)` every `schedule.every`.
pub fn evolve_trotter<T, F>(
    psi0: &StateVector,
    t_end: f64,
    config: &TrotterConfig,
    ham: &NeutrinoHamiltonian,
    schedule: &SampleSchedule,
    mut observer: F,
) -> Result<EvolutionRecord<T>>
where
    F: FnMut(f64, &StateVector) -> Result<T>,
{
    check_state(psi0, ham)?;
    if !(t_end >= 0.0) {
        return Err(invalid("end time must be non-negative"));
    }
    let dt = config.step;
    let mut stepper = TrotterStepper::new(ham, *config)?;
    let stride = sample_stride(schedule.every, dt)?;
    let full_steps = (t_end / dt + 1e-9).floor() as usize;
    let remainder = t_end - full_steps as f64 * dt;

    let mut psi = psi0.clone();
    let mut rec = EvolutionRecord {
        times: Vec::new(),
        samples: Vec::new(),
        final_state: psi0.clone(),
        method: MethodDescriptor::Trotter { step: dt, order: config.order, substeps: stepper.substeps },
        max_norm_drift: 0.0,
        renormalizations: 0,
    };
    let mut emit = |t: f64, psi: &StateVector, rec: &mut EvolutionRecord<T>| -> Result<()> {
        if t + 1e-9 >= schedule.from {
            rec.samples.push(observer(t, psi)?);
            rec.times.push(t);
        }
        Ok(())
    };
    emit(0.0, &psi, &mut rec)?;
    for step in 1..=full_steps {
        let t = (step - 1) as f64 * dt;
        stepper.step(&mut psi, t, dt)?;
        if config.renormalize_every > 0 && step % config.renormalize_every == 0 {
            rec.max_norm_drift = rec.max_norm_drift.max((psi.norm() - 1.0).abs());
            psi.normalize();
            rec.renormalizations += 1;
        }
        if step % stride == 0 {
            emit(step as f64 * dt, &psi, &mut rec)?;
        }
    }
    if remainder > 1e-12 {
        stepper.step(&mut psi, full_steps as f64 * dt, remainder)?;
        emit(t_end, &psi, &mut rec)?;
    }
    rec.max_norm_drift = rec.max_norm_drift.max((psi.norm() - 1.0).abs());
    rec.final_state = psi;
    Ok(rec)
}

/// Adaptive integration of `dψ/d(κt) = −i H(t) ψ` with samples at exact grid times.
pub fn evolve_ode<T, F>(
    psi0: &StateVector,
    t_end: f64,
    config: &OdeConfig,
    ham: &NeutrinoHamiltonian,
    schedule: &SampleSchedule,
    mut observer: F,
) -> Result<EvolutionRecord<T>>
where
    F: FnMut(f64, &StateVector) -> Result<T>,
{
    check_state(psi0, ham)?;
    if !(t_end >= 0.0) {
        return Err(invalid("end time must be non-negative"));
    }
    if !(config.abs_tol > 0.0 && config.rel_tol > 0.0) {
        return Err(invalid("ODE tolerances must be positive"));
    }
    if !(schedule.every > 0.0) {
        return Err(invalid("sample spacing must be positive"));
    }
    let rhs = |t: f64, y: &[C64], dy: &mut [C64]| -> Result<()> {
        ham.apply(t, y, dy)?;
        for v in dy.iter_mut() {
            *v = C64::new(v.im, -v.re);
        }
        Ok(())
    };
    let mut solver = Dop853::new(psi0.dim(), *config);
    let mut psi = psi0.clone();
    let mut rec = EvolutionRecord {
        times: Vec::new(),
        samples: Vec::new(),
        final_state: psi0.clone(),
        method: MethodDescriptor::Ode {
            method: "dop853".into(),
            abs_tol: config.abs_tol,
            rel_tol: config.rel_tol,
            accepted_steps: 0,
            rejected_steps: 0,
        },
        max_norm_drift: 0.0,
        renormalizations: 0,
    };
    if schedule.from <= 0.0 {
        rec.samples.push(observer(0.0, &psi)?);
        rec.times.push(0.0);
    }
    let n_samples = (t_end / schedule.every + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (1..=n_samples).map(|k| k as f64 * schedule.every).collect();
    if grid.last().map_or(t_end > 0.0, |&last| t_end - last > 1e-12) {
        grid.push(t_end);
    }
    let mut t = 0.0;
    for &target in &grid {
        solver.integrate(&rhs, t, target, psi.amplitudes_mut())?;
        t = target;
        let drift = (psi.norm() - 1.0).abs();
        rec.max_norm_drift = rec.max_norm_drift.max(drift);
        if drift > 1e-10 {
            psi.normalize();
            rec.renormalizations += 1;
        }
        if t + 1e-9 >= schedule.from {
            rec.samples.push(observer(t, &psi)?);
            rec.times.push(t);
        }
    }
    let stats = solver.stats();
    if let MethodDescriptor::Ode { accepted_steps, rejected_steps, .. } = &mut rec.method {
        *accepted_steps = stats.accepted;
        *rejected_steps = stats.rejected;
    }
    rec.final_state = psi;
    Ok(rec)
}

pub(crate) fn integration_failure(time: f64, reason: impl Into<String>) -> Error {
    Error::IntegrationFailure { time, reason: reason.into() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{flavor_product_state, Coupling, Flavor, ModelProfile, OscillationParams};

    fn ham(n: usize, coupling: Option<f64>) -> NeutrinoHamiltonian {
        let p = OscillationParams::default();
        let m = ModelProfile::default();
        match coupling {
            Some(mu) => NeutrinoHamiltonian::with_coupling(n, &p, &m, 3, Coupling::Constant(mu)).unwrap(),
            None => NeutrinoHamiltonian::new(n, &p, &m, 3).unwrap(),
        }
    }

    fn initial(flavors: &str) -> StateVector {
        let f = Flavor::parse_list(flavors).unwrap();
        flavor_product_state(&f, &OscillationParams::default(), 3).unwrap()
    }

    #[test]
    fn uncoupled_step_is_exact_phase() {
        let h = ham(2, Some(0.0));
        let psi = initial("em");
        let out = trotter_step(&psi, 0.0, 0.7, &TrotterConfig::default(), &h).unwrap();
        for (j, (a, b)) in out.amplitudes().iter().zip(psi.amplitudes()).enumerate() {
            let expect = b * C64::from_polar(1.0, -h.one_body_diagonal()[j] * 0.7);
            assert!((a - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn step_preserves_norm() {
        let h = ham(3, None);
        let mut psi = initial("emt");
        for k in 0..100 {
            psi = trotter_step(&psi, k as f64 * 0.05, 0.05, &TrotterConfig::default(), &h).unwrap();
        }
        assert!((psi.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_duration_returns_input() {
        let h = ham(2, None);
        let psi = initial("ee");
        let rec = evolve_trotter(&psi, 0.0, &TrotterConfig::default(), &h, &SampleSchedule::every(1.0), |t, _| Ok(t)).unwrap();
        assert_eq!(rec.final_state, psi);
        assert_eq!(rec.times, vec![0.0]);
    }

    #[test]
    fn sample_cadence() {
        let h = ham(2, None);
        let psi = initial("ee");
        let rec = evolve_trotter(&psi, 5.0, &TrotterConfig::default(), &h, &SampleSchedule::every(1.0), |t, _| Ok(t)).unwrap();
        assert_eq!(rec.times.len(), 6);
        assert!((rec.times[5] - 5.0).abs() < 1e-12);
        for w in rec.times.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn bad_config() {
        let h = ham(2, None);
        let psi = initial("ee");
        let cfg = TrotterConfig { step: 0.0, ..Default::default() };
        assert!(trotter_step(&psi, 0.0, 0.0, &cfg, &h).is_err());
        let wrong = initial("eee");
        assert!(trotter_step(&wrong, 0.0, 0.05, &TrotterConfig::default(), &h).is_err());
    }
}
