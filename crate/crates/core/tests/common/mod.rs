#![allow(dead_code)]

use neutrino_magic::{StateVector, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Haar-distributed pure state from complex Gaussian amplitudes.
pub fn random_state(rng: &mut ChaCha8Rng, local_dim: usize, sites: usize) -> StateVector {
    let dim = local_dim.pow(sites as u32);
    let amps = (0..dim)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    StateVector::new(local_dim, sites, amps).expect("valid shape")
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `Ξ_P = |⟨ψ|X^x Z^z|ψ⟩|²/d^n` over every exponent pair, indexed `x · d^n + z`,
/// built directly from the shift and clock actions on basis states.
pub fn dense_spectrum(psi: &StateVector) -> Vec<f64> {
    let d = psi.local_dim();
    let n = psi.sites();
    let dim = psi.dim();
    let amps = psi.amplitudes();
    let digits = |mut k: usize| {
        let mut out = vec![0usize; n];
        for slot in out.iter_mut().rev() {
            *slot = k % d;
            k /= d;
        }
        out
    };
    let from_digits = |v: &[usize]| v.iter().fold(0, |acc, &x| acc * d + x);
    let omega = |k: usize| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / d as f64);
    let mut out = Vec::with_capacity(dim * dim);
    for x in 0..dim {
        let xs = digits(x);
        for z in 0..dim {
            let zs = digits(z);
            let mut e = C64::new(0.0, 0.0);
            for (j, a) in amps.iter().enumerate() {
                let js = digits(j);
                let clock: usize = js.iter().zip(&zs).map(|(a, b)| a * b).sum();
                let shifted: Vec<usize> = js.iter().zip(&xs).map(|(a, b)| (a + b) % d).collect();
                e += amps[from_digits(&shifted)].conj() * omega(clock % d) * a;
            }
            out.push(e.norm_sqr() / dim as f64);
        }
    }
    out
}

/// `M₂ = −log₂ Σ Ξ² − n log₂ d` from [`dense_spectrum`].
pub fn dense_m2(psi: &StateVector) -> f64 {
    let xi = dense_spectrum(psi);
    -xi.iter().map(|v| v * v).sum::<f64>().log2() - (psi.dim() as f64).log2()
}
