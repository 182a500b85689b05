//! Diagnostics along trajectories: single-site reduced densities, mass-basis
//! probabilities, concurrence sums, SO(3) n-tangles and late-time averages.

use nalgebra::{DMatrix, Matrix3};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::evolution::MethodDescriptor;
use crate::par;
use crate::state::{StateVector, C64, ZERO};

/// Earliest `κt` at which an asymptotic window may start.
pub const STABILIZED_FROM: f64 = 800.0;

/// Default averaging window in `κt`.
pub const DEFAULT_WINDOW: (f64, f64) = (900.0, 1200.0);

#[derive(Clone, Debug)]
pub struct ReducedDensity {
    pub site: usize,
    pub matrix: DMatrix<C64>,
    /// Descending, clamped to be nonnegative.
    pub eigenvalues: Vec<f64>,
}

impl ReducedDensity {
    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    /// `4 Σ_{i<j} λ_i λ_j`.
    pub fn concurrence(&self) -> f64 {
        let l = &self.eigenvalues;
        let mut s = 0.0;
        for i in 0..l.len() {
            for j in i + 1..l.len() {
                s += l[i] * l[j];
            }
        }
        4.0 * s
    }

    /// Product of all eigenvalues for qutrits, zero for qubits.
    pub fn generalized_concurrence(&self) -> f64 {
        if self.eigenvalues.len() == 3 {
            self.eigenvalues.iter().product()
        } else {
            0.0
        }
    }
}

pub fn reduced_density(psi: &StateVector, site: usize) -> Result<ReducedDensity> {
    if site >= psi.sites() {
        return Err(invalid(format!("site {site} out of range for {} sites", psi.sites())));
    }
    let d = psi.local_dim();
    let stride = psi.stride(site);
    let block = stride * d;
    let amps = psi.amplitudes();
    let mut rho = DMatrix::<C64>::zeros(d, d);
    for hi in (0..amps.len()).step_by(block) {
        for lo in 0..stride {
            let base = hi + lo;
            for a in 0..d {
                let pa = amps[base + a * stride];
                for b in a..d {
                    rho[(a, b)] += pa * amps[base + b * stride].conj();
                }
            }
        }
    }
    for a in 0..d {
        rho[(a, a)].im = 0.0;
        for b in a + 1..d {
            rho[(b, a)] = rho[(a, b)].conj();
        }
    }
    let mut eigenvalues: Vec<f64> =
        rho.clone().symmetric_eigenvalues().iter().map(|&l| l.max(0.0)).collect();
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    Ok(ReducedDensity { site, matrix: rho, eigenvalues })
}

/// Row `n` holds the mass-basis populations of site `n`.
pub fn mass_probabilities(psi: &StateVector) -> Vec<Vec<f64>> {
    let d = psi.local_dim();
    let amps = psi.amplitudes();
    (0..psi.sites())
        .map(|site| {
            let stride = psi.stride(site);
            let mut row = vec![0.0; d];
            for (idx, a) in amps.iter().enumerate() {
                row[(idx / stride) % d] += a.norm_sqr();
            }
            row
        })
        .collect()
}

/// `(C, G)` summed over sites.
pub fn concurrence_sums(psi: &StateVector) -> Result<(f64, f64)> {
    let mut c = 0.0;
    let mut g = 0.0;
    for site in 0..psi.sites() {
        let rdm = reduced_density(psi, site)?;
        c += rdm.concurrence();
        g += rdm.generalized_concurrence();
    }
    Ok((c, g))
}

/// Spin-1 generators in the real (Cartesian) basis, `(J_i)_{jk} = −i ε_{ijk}`.
pub fn so3_generators() -> [Matrix3<C64>; 3] {
    let i = C64::new(0.0, 1.0);
    let z = ZERO;
    [
        Matrix3::new(z, z, z, z, z, -i, z, i, z),
        Matrix3::new(z, z, i, z, z, z, -i, z, z),
        Matrix3::new(z, -i, z, i, z, z, z, z, z),
    ]
}

fn apply_site(j: &Matrix3<C64>, stride: usize, v: &[C64]) -> Vec<C64> {
    let mut out = vec![ZERO; v.len()];
    let block = 3 * stride;
    for hi in (0..v.len()).step_by(block) {
        for lo in 0..stride {
            let base = hi + lo;
            let x = [v[base], v[base + stride], v[base + 2 * stride]];
            for r in 0..3 {
                out[base + r * stride] = j[(r, 0)] * x[0] + j[(r, 1)] * x[1] + j[(r, 2)] * x[2];
            }
        }
    }
    out
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `τ_n` for `n ∈ {2, 4}`: mean of `|⟨ψ| J_{i,a}…J_{i,d} |ψ⟩|²` over the three
/// generators and all unordered `n`-subsets of sites.
pub fn n_tangle(psi: &StateVector, order: usize) -> Result<f64> {
    if psi.local_dim() != 3 {
        return Err(invalid("n-tangles are defined for qutrit registers"));
    }
    if order != 2 && order != 4 {
        return Err(invalid(format!("unsupported tangle order {order}")));
    }
    let n = psi.sites();
    if n < order {
        return Err(invalid(format!("order-{order} tangle needs at least {order} sites, got {n}")));
    }
    let amps = psi.amplitudes();
    let gens = so3_generators();
    let mut total = 0.0;
    let mut count = 0usize;
    for j in &gens {
        // J is Hermitian, so ⟨ψ|J_a J_b|ψ⟩ = ⟨J_a ψ|J_b ψ⟩ and likewise for pairs.
        let singles: Vec<Vec<C64>> = (0..n).map(|a| apply_site(j, psi.stride(a), amps)).collect();
        if order == 2 {
            for a in 0..n {
                for b in a + 1..n {
                    total += dot(&singles[a], &singles[b]).norm_sqr();
                    count += 1;
                }
            }
            continue;
        }
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let doubles: Vec<Vec<C64>> =
            par::map_slice(&pairs, |&(a, b)| apply_site(j, psi.stride(b), &singles[a]));
        let index = |a: usize, b: usize| pairs.iter().position(|&p| p == (a, b)).unwrap();
        for a in 0..n {
            for b in a + 1..n {
                let ab = &doubles[index(a, b)];
                for c in b + 1..n {
                    for d in c + 1..n {
                        total += dot(ab, &doubles[index(c, d)]).norm_sqr();
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(total / count as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglementSummary {
    pub c: f64,
    pub g: f64,
    pub tau2: Option<f64>,
    pub tau4: Option<f64>,
}

/// Concurrence sums plus whichever tangles the register size allows.
pub fn entanglement_summary(psi: &StateVector) -> Result<EntanglementSummary> {
    let (c, g) = concurrence_sums(psi)?;
    let tangle = |order| {
        if psi.local_dim() == 3 && psi.sites() >= order {
            n_tangle(psi, order).map(Some)
        } else {
            Ok(None)
        }
    };
    Ok(EntanglementSummary { c, g, tau2: tangle(2)?, tau4: tangle(4)? })
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub method: Option<MethodDescriptor>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(invalid("times and values differ in length"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("times must be strictly increasing"));
        }
        Ok(TimeSeries { times, values, method: None })
    }

    pub fn with_method(mut self, method: MethodDescriptor) -> Self {
        self.method = Some(method);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticEstimate {
    pub mean: f64,
    /// Population standard deviation over the window.
    pub time_std: f64,
    pub param_std: Option<f64>,
    pub window: (f64, f64),
    pub samples: usize,
}

/// Mean and population standard deviation of the samples with `lo ≤ t ≤ hi`.
pub fn window_statistics(series: &TimeSeries, window: (f64, f64)) -> Result<AsymptoticEstimate> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(invalid(format!("window [{lo}, {hi}] is empty or not finite")));
    }
    let eps = 1e-9 * hi.abs().max(1.0);
    match (series.times.first(), series.times.last()) {
        (Some(&first), Some(&last)) if first <= lo + eps && last >= hi - eps => {}
        _ => return Err(invalid(format!("series does not cover the window [{lo}, {hi}]"))),
    }
    let inside: Vec<f64> = series
        .times
        .iter()
        .zip(&series.values)
        .filter(|(&t, _)| t >= lo - eps && t <= hi + eps)
        .map(|(_, &v)| v)
        .collect();
    if inside.is_empty() {
        return Err(invalid(format!("no samples inside [{lo}, {hi}]")));
    }
    let n = inside.len() as f64;
    let mean = par::pairwise_sum(&inside) / n;
    let sq: Vec<f64> = inside.iter().map(|v| (v - mean) * (v - mean)).collect();
    let time_std = (par::pairwise_sum(&sq) / n).sqrt();
    Ok(AsymptoticEstimate { mean, time_std, param_std: None, window, samples: inside.len() })
}

/// Late-time average; the window must start at or after [`STABILIZED_FROM`].
pub fn asymptotic_average(series: &TimeSeries, window: (f64, f64)) -> Result<AsymptoticEstimate> {
    if window.0 < STABILIZED_FROM {
        return Err(invalid(format!(
            "asymptotic window starts at {} before the stabilized region (κt ≥ {STABILIZED_FROM})",
            window.0
        )));
    }
    window_statistics(series, window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ghz3() -> StateVector {
        let mut amps = vec![ZERO; 9];
        for k in 0..3 {
            amps[k * 4] = C64::new(1.0, 0.0);
        }
        StateVector::new(3, 2, amps).unwrap()
    }

    #[test]
    fn maximally_entangled_pair() {
        let psi = ghz3();
        for site in 0..2 {
            let rdm = reduced_density(&psi, site).unwrap();
            for l in &rdm.eigenvalues {
                assert_abs_diff_eq!(*l, 1.0 / 3.0, epsilon = 1e-12);
            }
        }
        let (c, g) = concurrence_sums(&psi).unwrap();
        assert_abs_diff_eq!(c, 8.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g, 2.0 / 27.0, epsilon = 1e-12);
    }

    #[test]
    fn product_state_is_pure() {
        let a = vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8), ZERO];
        let b = vec![C64::new(0.5, 0.5), C64::new(0.5, 0.0), C64::new(0.0, -0.5)];
        let psi = StateVector::product(3, &[a, b]).unwrap();
        let rdm = reduced_density(&psi, 1).unwrap();
        assert_abs_diff_eq!(rdm.eigenvalues[0], 1.0, epsilon = 1e-12);
        let (c, g) = concurrence_sums(&psi).unwrap();
        assert!(c.abs() < 1e-12 && g.abs() < 1e-12);
        assert!(reduced_density(&psi, 2).is_err());
    }

    #[test]
    fn generators_match_printed_entries() {
        let [j1, j2, j3] = so3_generators();
        assert_eq!(j3[(0, 1)], C64::new(0.0, -1.0));
        assert_eq!(j1[(1, 2)], C64::new(0.0, -1.0));
        assert_eq!(j2[(0, 2)], C64::new(0.0, 1.0));
        let comm = j1 * j2 - j2 * j1 - j3 * C64::new(0.0, 1.0);
        assert!(comm.norm() < 1e-14);
        let casimir = j1 * j1 + j2 * j2 + j3 * j3 - Matrix3::identity() * C64::new(2.0, 0.0);
        assert!(casimir.norm() < 1e-14);
    }

    #[test]
    fn tangle_of_real_product_vanishes() {
        let v = vec![C64::new(0.6, 0.0), C64::new(0.0, 0.0), C64::new(0.8, 0.0)];
        let psi = StateVector::product(3, &vec![v; 4]).unwrap();
        assert!(n_tangle(&psi, 2).unwrap() < 1e-24);
        assert!(n_tangle(&psi, 4).unwrap() < 1e-24);
        assert!(n_tangle(&psi, 3).is_err());
        let small = StateVector::basis(3, 3, 0).unwrap();
        assert!(n_tangle(&small, 4).is_err());
    }

    #[test]
    fn window_statistics_of_constant() {
        let times: Vec<f64> = (0..=400).map(|k| 800.0 + k as f64).collect();
        let series = TimeSeries::new(times, vec![0.25; 401]).unwrap();
        let est = asymptotic_average(&series, DEFAULT_WINDOW).unwrap();
        assert_eq!(est.samples, 301);
        assert_abs_diff_eq!(est.mean, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(est.time_std, 0.0, epsilon = 1e-15);
        assert!(asymptotic_average(&series, (900.0, 1300.0)).is_err());
        assert!(asymptotic_average(&series, (500.0, 1000.0)).is_err());
    }
}
