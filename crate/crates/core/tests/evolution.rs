mod common;

use common::random_state;
use nalgebra::DMatrix;
use neutrino_magic::evolution::{
    evolve_ode, evolve_trotter, OdeConfig, SampleSchedule, TrotterConfig, TrotterOrder,
};
use neutrino_magic::magic::m2;
use neutrino_magic::model::{flavor_product_state, Coupling};
use neutrino_magic::{Flavor, ModelProfile, NeutrinoHamiltonian, OscillationParams, StateVector, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Pauli matrices or the eight Gell-Mann matrices, unnormalized.
fn generators(d: usize) -> Vec<DMatrix<C64>> {
    let z = c(0.0, 0.0);
    let (o, i) = (c(1.0, 0.0), c(0.0, 1.0));
    if d == 2 {
        return vec![
            DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
            DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
            DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        ];
    }
    let r3 = c(1.0 / 3f64.sqrt(), 0.0);
    [
        [z, o, z, o, z, z, z, z, z],
        [z, -i, z, i, z, z, z, z, z],
        [o, z, z, z, -o, z, z, z, z],
        [z, z, o, z, z, z, o, z, z],
        [z, z, -i, z, z, z, i, z, z],
        [z, z, z, z, z, o, z, o, z],
        [z, z, z, z, z, -i, z, i, z],
        [r3, z, z, z, r3, z, z, z, r3 * -2.0],
    ]
    .iter()
    .map(|m| DMatrix::from_row_slice(3, 3, m))
    .collect()
}

fn embed(ops: &[(usize, &DMatrix<C64>)], d: usize, n: usize) -> DMatrix<C64> {
    let mut out = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for site in 0..n {
        let factor = ops
            .iter()
            .find(|(s, _)| *s == site)
            .map(|(_, m)| (*m).clone())
            .unwrap_or_else(|| DMatrix::identity(d, d));
        out = out.kronecker(&factor);
    }
    out
}

/// Dense `H` with constant coupling, built from explicit generator products.
fn dense_hamiltonian(d: usize, n: usize, params: &OscillationParams, profile: &ModelProfile, mu: f64) -> DMatrix<C64> {
    let scale = 1.0 / (2.0 * profile.e0 * profile.kappa);
    let mut levels = vec![0.0, params.dm21_sq.value * scale];
    if d == 3 {
        levels.push(params.dm31_sq() * scale);
    }
    let dim = d.pow(n as u32);
    let mut h = DMatrix::from_element(dim, dim, c(0.0, 0.0));
    for site in 0..n {
        let w = profile.ladder.weight(site + 1);
        let h1 = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(d, levels.iter().map(|&e| c(w * e, 0.0))));
        h += embed(&[(site, &h1)], d, n);
    }
    for a in 0..n {
        for b in a + 1..n {
            for g in generators(d) {
                h += embed(&[(a, &g), (b, &g)], d, n) * c(mu, 0.0);
            }
        }
    }
    h
}

fn overlap(a: &StateVector, b: &StateVector) -> f64 {
    a.inner(b).unwrap().norm()
}

fn constant_setup(flavors: &[Flavor], mu: f64) -> (NeutrinoHamiltonian, StateVector, DMatrix<C64>) {
    let (params, profile) = (OscillationParams::default(), ModelProfile::default());
    let n = flavors.len();
    let ham = NeutrinoHamiltonian::with_coupling(n, &params, &profile, 3, Coupling::Constant(mu)).unwrap();
    let psi = flavor_product_state(flavors, &params, 3).unwrap();
    (ham, psi, dense_hamiltonian(3, n, &params, &profile, mu))
}

fn exact(h: &DMatrix<C64>, psi: &StateVector, t: f64) -> StateVector {
    let u = (h * c(0.0, -t)).exp();
    psi.apply_dense(&u).unwrap()
}

#[test]
fn matrix_free_action_matches_dense_operator() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (d, n) in [(2, 3), (3, 3)] {
        let (params, profile) = (OscillationParams::default(), ModelProfile::default());
        let ham = NeutrinoHamiltonian::with_coupling(n, &params, &profile, d, Coupling::Constant(1.7)).unwrap();
        let h = dense_hamiltonian(d, n, &params, &profile, 1.7);
        let psi = random_state(&mut rng, d, n);
        let mut out = vec![c(0.0, 0.0); psi.dim()];
        ham.apply(0.0, psi.amplitudes(), &mut out).unwrap();
        let want = psi.apply_dense(&h).unwrap();
        let err = out.iter().zip(want.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "d={d} err={err:e}");
    }
}

#[test]
fn ode_matches_matrix_exponential() {
    let flavors = [Flavor::Electron, Flavor::Muon, Flavor::Tau];
    let (ham, psi, h) = constant_setup(&flavors, 3.0);
    let cfg = OdeConfig { abs_tol: 1e-11, rel_tol: 1e-11, ..Default::default() };
    let rec = evolve_ode(&psi, 4.0, &cfg, &ham, &SampleSchedule::every(4.0), |_, _| Ok(())).unwrap();
    assert!(1.0 - overlap(&rec.final_state, &exact(&h, &psi, 4.0)) < 1e-10);
}

#[test]
fn trotter_matches_matrix_exponential() {
    let flavors = [Flavor::Electron, Flavor::Electron, Flavor::Tau];
    let (ham, psi, h) = constant_setup(&flavors, 3.0);
    let rec = evolve_trotter(&psi, 4.0, &TrotterConfig::default(), &ham, &SampleSchedule::every(4.0), |_, _| Ok(()))
        .unwrap();
    let ov = overlap(&rec.final_state, &exact(&h, &psi, 4.0));
    assert!(1.0 - ov < 1e-4);
}

fn trotter_error(order: TrotterOrder, step: f64, reference: &StateVector, ham: &NeutrinoHamiltonian, psi: &StateVector, t: f64) -> f64 {
    let cfg = TrotterConfig { step, order, substeps: Some(1), renormalize_every: 0 };
    let rec = evolve_trotter(psi, t, &cfg, ham, &SampleSchedule::every(t), |_, _| Ok(())).unwrap();
    let err: f64 = rec
        .final_state
        .amplitudes()
        .iter()
        .zip(reference.amplitudes())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    err.sqrt()
}

#[test]
fn product_formula_orders() {
    let (params, profile) = (OscillationParams::default(), ModelProfile::default());
    let flavors = [Flavor::Electron, Flavor::Muon, Flavor::Tau];
    let ham = NeutrinoHamiltonian::new(3, &params, &profile, 3).unwrap();
    let psi = flavor_product_state(&flavors, &params, 3).unwrap();
    let t = 0.4;
    let tight = OdeConfig { abs_tol: 1e-13, rel_tol: 1e-13, ..Default::default() };
    let reference = evolve_ode(&psi, t, &tight, &ham, &SampleSchedule::every(t), |_, _| Ok(())).unwrap().final_state;
    for (order, expected) in [(TrotterOrder::Second, 4.0), (TrotterOrder::First, 2.0)] {
        let coarse = trotter_error(order, 2e-3, &reference, &ham, &psi, t);
        let fine = trotter_error(order, 1e-3, &reference, &ham, &psi, t);
        let ratio = coarse / fine;
        assert!((ratio - expected).abs() < 0.15 * expected, "{order:?}: ratio {ratio}");
    }
}

#[test]
fn methods_agree_for_two_neutrinos() {
    let (params, profile) = (OscillationParams::default(), ModelProfile::default());
    let flavors = [Flavor::Electron, Flavor::Muon];
    let ham = NeutrinoHamiltonian::new(2, &params, &profile, 3).unwrap();
    let psi = flavor_product_state(&flavors, &params, 3).unwrap();
    let every = SampleSchedule::every(100.0);
    let a = evolve_trotter(&psi, 100.0, &TrotterConfig::default(), &ham, &every, |_, _| Ok(())).unwrap();
    let b = evolve_ode(&psi, 100.0, &OdeConfig::default(), &ham, &every, |_, _| Ok(())).unwrap();
    assert!(overlap(&a.final_state, &b.final_state) > 0.999);
}

#[test]
fn frozen_coupling_conserves_energy() {
    let flavors = [Flavor::Electron, Flavor::Muon, Flavor::Electron];
    let (ham, psi, _) = constant_setup(&flavors, 2.0);
    let e0 = ham.energy(0.0, &psi).unwrap();
    let every = SampleSchedule::every(5.0);
    let energy = |_: f64, s: &StateVector| ham.energy(0.0, s);
    let tight = OdeConfig { abs_tol: 1e-11, rel_tol: 1e-11, ..Default::default() };
    let ode = evolve_ode(&psi, 50.0, &tight, &ham, &every, energy).unwrap();
    let trotter = evolve_trotter(&psi, 50.0, &TrotterConfig::default(), &ham, &every, energy).unwrap();
    for e in ode.samples {
        assert!((e - e0).abs() < 1e-7 * e0.abs());
    }
    for e in trotter.samples {
        assert!((e - e0).abs() < 1e-4 * e0.abs());
    }
}

#[test]
fn norm_is_preserved() {
    let (params, profile) = (OscillationParams::default(), ModelProfile::default());
    let flavors = [Flavor::Tau, Flavor::Muon, Flavor::Electron];
    let ham = NeutrinoHamiltonian::new(3, &params, &profile, 3).unwrap();
    let psi = flavor_product_state(&flavors, &params, 3).unwrap();
    let norms = |_: f64, s: &StateVector| Ok(s.norm());
    let cfg = TrotterConfig { renormalize_every: 0, ..Default::default() };
    let rec = evolve_trotter(&psi, 200.0, &cfg, &ham, &SampleSchedule::every(10.0), norms).unwrap();
    assert!(rec.samples.iter().all(|n| (n - 1.0).abs() < 1e-10));
}

#[test]
fn site_permutation_leaves_magic_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let ham = NeutrinoHamiltonian::new(4, &OscillationParams::default(), &ModelProfile::default(), 3).unwrap();
    for _ in 0..10 {
        let psi = random_state(&mut rng, 3, 4);
        for k in 0..ham.pairs().len() {
            let amps = ham.swap(k).iter().map(|&src| psi.amplitudes()[src as usize]).collect();
            let swapped = StateVector::new(3, 4, amps).unwrap();
            assert!((m2(&psi).unwrap() - m2(&swapped).unwrap()).abs() < 1e-10);
        }
    }
}
