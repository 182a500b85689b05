//! Pauli spectra, stabilizer Rényi entropies and the magic power of unitaries.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::par::{map_range, map_slice, pairwise_sum};
use crate::pauli::{increment_digits, root_of_unity, PauliString};
use crate::stabilizer::{enumerate_stabilizer_states, StabilizerSet};
use crate::state::{StateVector, C64, ZERO};

/// Default cap on `d²` for the brute-force spectrum.
pub const BRUTE_FORCE_MAX_STRINGS: usize = 1 << 20;

/// `Ξ_P = |c_P|²/d` for all `d²` strings, indexed `x_index · d + z_index`
/// with site 0 the most significant digit of both indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliSpectrum {
    pub local_dim: usize,
    pub sites: usize,
    pub xi: Vec<f64>,
}

impl PauliSpectrum {
    pub fn dim(&self) -> usize {
        self.local_dim.pow(self.sites as u32)
    }

    pub fn total(&self) -> f64 {
        pairwise_sum(&self.xi)
    }
}

/// The three stabilizer-entropy measures, in bits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagicResult {
    pub m_lin: f64,
    pub m1: f64,
    pub m2: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MagicMeasure {
    Linear,
    One,
    Two,
}

impl MagicResult {
    pub fn get(&self, measure: MagicMeasure) -> f64 {
        match measure {
            MagicMeasure::Linear => self.m_lin,
            MagicMeasure::One => self.m1,
            MagicMeasure::Two => self.m2,
        }
    }
}

/// Spectrum via one expectation value per string.
pub fn pauli_spectrum_brute_force(psi: &StateVector) -> Result<PauliSpectrum> {
    pauli_spectrum_brute_force_with_limit(psi, BRUTE_FORCE_MAX_STRINGS)
}

pub fn pauli_spectrum_brute_force_with_limit(
    psi: &StateVector,
    max_strings: usize,
) -> Result<PauliSpectrum> {
    let dim = psi.dim();
    let strings = dim * dim;
    if strings > max_strings {
        return Err(Error::UnsupportedSize(format!(
            "{strings} Pauli strings exceed the brute-force limit of {max_strings}"
        )));
    }
    let (d, n) = (psi.local_dim(), psi.sites());
    let xi = (0..strings)
        .map(|idx| {
            let p = PauliString::from_spectrum_index(d, n, idx)?;
            Ok(p.expectation(psi)?.norm_sqr() / dim as f64)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PauliSpectrum { local_dim: d, sites: n, xi })
}

/// Fills `buf[z] = ⟨ψ|X^x Z^z|ψ⟩` for every clock pattern `z` at fixed shift `x`.
///
/// `f_x(j) = conj(ψ_{j+x}) ψ_j` followed by a length-`d` discrete Fourier
/// transform along each site axis.
fn shift_row(psi: &StateVector, x_index: usize, buf: &mut [C64]) {
    let d = psi.local_dim();
    let n = psi.sites();
    let amps = psi.amplitudes();
    let x_digits = crate::state::digits(x_index, d, n);
    let mut j_digits = vec![0usize; n];
    for (j, slot) in buf.iter_mut().enumerate() {
        let mut target = 0usize;
        for s in 0..n {
            target = target * d + (j_digits[s] + x_digits[s]) % d;
        }
        *slot = amps[target].conj() * amps[j];
        increment_digits(&mut j_digits, d);
    }
    let len = buf.len();
    let mut stride = 1;
    while stride < len {
        let block = stride * d;
        for base in (0..len).step_by(block) {
            for off in 0..stride {
                let i0 = base + off;
                if d == 2 {
                    let (a, b) = (buf[i0], buf[i0 + stride]);
                    buf[i0] = a + b;
                    buf[i0 + stride] = a - b;
                } else {
                    let w = root_of_unity(3, 1);
                    let w2 = w * w;
                    let (a, b, c) = (buf[i0], buf[i0 + stride], buf[i0 + 2 * stride]);
                    buf[i0] = a + b + c;
                    buf[i0 + stride] = a + w * b + w2 * c;
                    buf[i0 + 2 * stride] = a + w2 * b + w * c;
                }
            }
        }
        stride = block;
    }
}

/// Spectrum in `O(d² log d)` using per-shift Fourier transforms.
pub fn pauli_spectrum_fast(psi: &StateVector) -> PauliSpectrum {
    let dim = psi.dim();
    let rows = map_range(dim, |x| {
        let mut buf = vec![ZERO; dim];
        shift_row(psi, x, &mut buf);
        buf.into_iter().map(|c| c.norm_sqr() / dim as f64).collect::<Vec<f64>>()
    });
    PauliSpectrum {
        local_dim: psi.local_dim(),
        sites: psi.sites(),
        xi: rows.concat(),
    }
}

/// Per-shift partial sums `(Σ Ξ, Σ Ξ², Σ Ξ log₂(dΞ))`.
fn row_moments(xi_row: impl Iterator<Item = f64>, dim: f64) -> [f64; 3] {
    let mut m = [0.0; 3];
    for v in xi_row {
        m[0] += v;
        m[1] += v * v;
        if v > 0.0 {
            m[2] += v * (dim * v).log2();
        }
    }
    m
}

fn result_from_moments(total: f64, sum_sq: f64, ent: f64, dim: f64) -> Result<MagicResult> {
    if (total - 1.0).abs() > 1e-8 {
        return Err(invalid(format!(
            "Pauli spectrum sums to {total}, expected 1 (state not normalized?)"
        )));
    }
    let purity = dim * sum_sq;
    Ok(MagicResult {
        m_lin: 1.0 - purity,
        m1: -ent,
        m2: -purity.log2(),
    })
}

/// `M_lin`, `M_1` and `M_2` of a spectrum (bits; `0·log 0 = 0`).
pub fn stabilizer_renyi_entropies(spec: &PauliSpectrum) -> Result<MagicResult> {
    let dim = spec.dim() as f64;
    let row = spec.dim();
    let parts: Vec<[f64; 3]> = spec
        .xi
        .chunks(row)
        .map(|c| row_moments(c.iter().copied(), dim))
        .collect();
    combine(&parts, dim)
}

fn combine(parts: &[[f64; 3]], dim: f64) -> Result<MagicResult> {
    let col = |k: usize| pairwise_sum(&parts.iter().map(|p| p[k]).collect::<Vec<_>>());
    result_from_moments(col(0), col(1), col(2), dim)
}

/// Stabilizer entropies of a state without materializing the `d²` spectrum.
pub fn magic_of_state(psi: &StateVector) -> Result<MagicResult> {
    let dim = psi.dim();
    let parts = map_range(dim, |x| {
        let mut buf = vec![ZERO; dim];
        shift_row(psi, x, &mut buf);
        row_moments(buf.iter().map(|c| c.norm_sqr() / dim as f64), dim as f64)
    });
    combine(&parts, dim as f64)
}

/// `M_2` of a state, in bits.
pub fn m2(psi: &StateVector) -> Result<f64> {
    Ok(magic_of_state(psi)?.m2)
}

/// Average of `measure(U|Φ_i⟩)` over all stabilizer states `Φ_i`.
pub fn magic_power_numeric(
    unitary: &DMatrix<C64>,
    local_dim: usize,
    sites: usize,
    measure: MagicMeasure,
) -> Result<f64> {
    check_unitary(unitary, 1e-10)?;
    let set = enumerate_stabilizer_states(local_dim, sites)?;
    magic_power_over(&set, unitary, measure)
}

/// Same as [`magic_power_numeric`] with a pre-enumerated stabilizer set.
pub fn magic_power_over(
    set: &StabilizerSet,
    unitary: &DMatrix<C64>,
    measure: MagicMeasure,
) -> Result<f64> {
    check_unitary(unitary, 1e-10)?;
    let values = map_slice(&set.states, |s| {
        let evolved = s.apply_dense(unitary)?;
        Ok(magic_of_state(&evolved)?.get(measure))
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&values) / values.len() as f64)
}

pub fn check_unitary(u: &DMatrix<C64>, tol: f64) -> Result<()> {
    if u.nrows() != u.ncols() {
        return Err(invalid("operator is not square"));
    }
    let residual = (u.adjoint() * u - DMatrix::identity(u.nrows(), u.ncols())).norm();
    if residual > tol {
        return Err(invalid(format!("operator is not unitary (residual {residual:.3e})")));
    }
    Ok(())
}

/// Closed-form magic power of `exp(-i diag(0, δm²₂₁)/(2E) t)`.
///
/// `t` and `energy` must be in reciprocal units (e.g. MeV⁻¹ and MeV).
pub fn magic_power_analytic_2f(t: f64, energy: f64, dm21_sq: f64) -> f64 {
    2.0 * (1.0 - (7.0 + (2.0 * dm21_sq * t / energy).cos()).log2() / 3.0)
}

/// Closed-form magic power of `exp(-i diag(0, δm²₂₁, Δm²₃₁)/(2E) t)`.
///
/// The cosine arguments are three times the accumulated relative phases
/// `δm² t / (2E)` of the one-body propagator.
pub fn magic_power_analytic_3f(t: f64, energy: f64, dm21_sq: f64, dm31_sq: f64) -> f64 {
    let phase = |dm: f64| 3.0 * dm * t / (2.0 * energy);
    let inner = 57.0
        + 8.0 * phase(dm21_sq).cos()
        + 8.0 * phase(dm31_sq).cos()
        + 8.0 * phase(dm31_sq - dm21_sq).cos();
    -0.75 * (inner / 81.0).log2()
}
