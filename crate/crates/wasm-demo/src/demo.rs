use neutrino_magic::evolution::{evolve_trotter, SampleSchedule, TrotterConfig};
use neutrino_magic::magic::{m2, magic_power_analytic_2f, magic_power_analytic_3f};
use neutrino_magic::model::{flavor_product_state, flavor_state};
use neutrino_magic::observables::{concurrence_sums, mass_probabilities};
use neutrino_magic::{Error, Flavor, ModelProfile, NeutrinoHamiltonian, OscillationParams, Result};

/// Keeps a browser run under a few seconds.
pub const MAX_DEMO_NEUTRINOS: usize = 4;

pub struct Angles {
    pub sin2_theta12: f64,
    pub sin2_theta23: f64,
    pub sin2_theta13: f64,
    pub delta_cp: f64,
}

pub fn magic_power_curve(kt_max: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 || !(kt_max > 0.0) {
        return Err(Error::InvalidArgument("need kt_max > 0 and at least two points".into()));
    }
    let params = OscillationParams::default();
    let profile = ModelProfile::default();
    let (e, dm21, dm31) = (profile.e0, params.dm21_sq.value, params.dm31_sq());
    let mut out = Vec::with_capacity(3 * points);
    for k in 0..points {
        let kt = kt_max * k as f64 / (points - 1) as f64;
        let t = kt / profile.kappa;
        out.extend([kt, magic_power_analytic_3f(t, e, dm21, dm31), magic_power_analytic_2f(t, e, dm21)]);
    }
    Ok(out)
}

pub fn flavor_magic(flavor: char, local_dim: usize, angles: &Angles) -> Result<Vec<f64>> {
    let mut params = OscillationParams::default();
    params.sin2_theta12.value = angles.sin2_theta12;
    params.sin2_theta23.value = angles.sin2_theta23;
    params.sin2_theta13.value = angles.sin2_theta13;
    params.delta_cp.value = angles.delta_cp;
    let psi = flavor_state(Flavor::from_letter(flavor)?, &params, local_dim)?;
    let mut out = vec![m2(&psi)?];
    out.extend(&mass_probabilities(&psi)[0]);
    Ok(out)
}

pub fn evolve_magic(flavors: &str, local_dim: usize, t_end: f64, every: f64) -> Result<Vec<f64>> {
    let flavors = Flavor::parse_list(flavors)?;
    let n = flavors.len();
    if n == 0 || n > MAX_DEMO_NEUTRINOS {
        return Err(Error::UnsupportedSize(format!("the demo runs 1 to {MAX_DEMO_NEUTRINOS} neutrinos, got {n}")));
    }
    let params = OscillationParams::default();
    let ham = NeutrinoHamiltonian::new(n, &params, &ModelProfile::default(), local_dim)?;
    let psi0 = flavor_product_state(&flavors, &params, local_dim)?;
    let rec = evolve_trotter(&psi0, t_end, &TrotterConfig::default(), &ham, &SampleSchedule::every(every), |t, psi| {
        Ok([t, m2(psi)? / n as f64, concurrence_sums(psi)?.0])
    })?;
    Ok(rec.samples.concat())
}
