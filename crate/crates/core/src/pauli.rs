//! Generalized Pauli operators for qubits and qutrits.
//!
//! A string is stored as per-site shift (`x`) and clock (`z`) exponents,
//! `P = phase · ⊗_s X^{x_s} Z^{z_s}` with `X|j⟩ = |j+1⟩` and `Z|j⟩ = ω^j |j⟩`,
//! `ω = e^{2πi/d}`. The per-site phase is fixed by the single-site tables
//! below, which reproduce `{I, X, Z, X², ωXZ, Z², ω²XZ², X²Z, X²Z²}` for
//! qutrits and `{I, σx, σy, σz}` for qubits.

use nalgebra::{DMatrix, Matrix3};
use std::f64::consts::PI;

use crate::error::{check_local_dim, invalid, Result};
use crate::state::{StateVector, C64, ONE, ZERO};

/// `(x, z)` exponents of the nine qutrit operators, in table order.
pub const QUTRIT_TABLE: [(u8, u8); 9] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (1, 2),
    (2, 1),
    (2, 2),
];

/// `(x, z)` exponents of `{I, σx, σy, σz}`.
pub const QUBIT_TABLE: [(u8, u8); 4] = [(0, 0), (1, 0), (1, 1), (0, 1)];

/// `ω^k` for `ω = e^{2πi/d}`.
pub fn root_of_unity(d: usize, k: usize) -> C64 {
    let k = k % d;
    match (d, k) {
        (_, 0) => ONE,
        (2, 1) => C64::new(-1.0, 0.0),
        _ => C64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64),
    }
}

/// Phase attached to the single-site operator `X^x Z^z`.
pub fn site_phase(local_dim: usize, x: u8, z: u8) -> C64 {
    match (local_dim, x, z) {
        (3, 1, 1) => root_of_unity(3, 1),
        (3, 1, 2) => root_of_unity(3, 2),
        (2, 1, 1) => C64::new(0.0, 1.0),
        _ => ONE,
    }
}

fn shift_matrix(d: usize) -> DMatrix<C64> {
    DMatrix::from_fn(d, d, |r, c| if r == (c + 1) % d { ONE } else { ZERO })
}

fn clock_matrix(d: usize) -> DMatrix<C64> {
    DMatrix::from_fn(d, d, |r, c| if r == c { root_of_unity(d, r) } else { ZERO })
}

fn site_matrix(d: usize, x: u8, z: u8) -> DMatrix<C64> {
    let xs = shift_matrix(d).pow(x as u32);
    let zs = clock_matrix(d).pow(z as u32);
    (xs * zs) * site_phase(d, x, z)
}

/// The single-site Pauli basis in table order.
pub fn single_site_paulis(local_dim: usize) -> Result<Vec<DMatrix<C64>>> {
    check_local_dim(local_dim)?;
    let table: &[(u8, u8)] = if local_dim == 3 { &QUTRIT_TABLE } else { &QUBIT_TABLE };
    Ok(table.iter().map(|&(x, z)| site_matrix(local_dim, x, z)).collect())
}

/// Pairing matrix `K` with `Tr(Σ_i Σ_j) = 3 K_ij` for the qutrit table (0-indexed).
pub fn trace_pairing_matrix() -> [[u8; 9]; 9] {
    const PAIRS: [(usize, usize); 9] =
        [(1, 1), (2, 4), (3, 6), (4, 2), (5, 9), (6, 3), (7, 8), (8, 7), (9, 5)];
    let mut k = [[0u8; 9]; 9];
    for (i, j) in PAIRS {
        k[i - 1][j - 1] = 1;
    }
    k
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    local_dim: usize,
    x: Vec<u8>,
    z: Vec<u8>,
}

impl PauliString {
    pub fn new(local_dim: usize, x: Vec<u8>, z: Vec<u8>) -> Result<Self> {
        check_local_dim(local_dim)?;
        if x.len() != z.len() || x.is_empty() {
            return Err(invalid("exponent arrays must be non-empty and of equal length"));
        }
        let d = local_dim as u8;
        let x = x.into_iter().map(|e| e % d).collect();
        let z = z.into_iter().map(|e| e % d).collect();
        Ok(PauliString { local_dim, x, z })
    }

    pub fn identity(local_dim: usize, sites: usize) -> Result<Self> {
        Self::new(local_dim, vec![0; sites], vec![0; sites])
    }

    /// Builds a string from per-site positions in the single-site table.
    pub fn from_table_indices(local_dim: usize, indices: &[usize]) -> Result<Self> {
        check_local_dim(local_dim)?;
        let table: &[(u8, u8)] = if local_dim == 3 { &QUTRIT_TABLE } else { &QUBIT_TABLE };
        let mut x = Vec::with_capacity(indices.len());
        let mut z = Vec::with_capacity(indices.len());
        for &i in indices {
            let &(xi, zi) = table
                .get(i)
                .ok_or_else(|| invalid(format!("table index {i} out of range")))?;
            x.push(xi);
            z.push(zi);
        }
        Self::new(local_dim, x, z)
    }

    /// Decodes the lexicographic spectrum index `x_index · d + z_index`.
    pub fn from_spectrum_index(local_dim: usize, sites: usize, index: usize) -> Result<Self> {
        let dim = crate::state::checked_dim(local_dim, sites)?;
        if index >= dim * dim {
            return Err(invalid("spectrum index out of range"));
        }
        let xs = crate::state::digits(index / dim, local_dim, sites);
        let zs = crate::state::digits(index % dim, local_dim, sites);
        Self::new(
            local_dim,
            xs.into_iter().map(|v| v as u8).collect(),
            zs.into_iter().map(|v| v as u8).collect(),
        )
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn sites(&self) -> usize {
        self.x.len()
    }

    pub fn x_exponents(&self) -> &[u8] {
        &self.x
    }

    pub fn z_exponents(&self) -> &[u8] {
        &self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&e| e == 0)
    }

    pub fn phase(&self) -> C64 {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(&x, &z)| site_phase(self.local_dim, x, z))
            .product()
    }

    /// Dense matrix of the full string; only sensible for a handful of sites.
    pub fn matrix(&self) -> DMatrix<C64> {
        let d = self.local_dim;
        self.x
            .iter()
            .zip(&self.z)
            .fold(DMatrix::from_element(1, 1, ONE), |acc, (&x, &z)| {
                acc.kronecker(&site_matrix(d, x, z))
            })
    }

    fn check_state(&self, psi: &StateVector) -> Result<()> {
        if psi.local_dim() != self.local_dim || psi.sites() != self.sites() {
            return Err(invalid(format!(
                "Pauli string on {} sites of dimension {} applied to state on {} sites of dimension {}",
                self.sites(),
                self.local_dim,
                psi.sites(),
                psi.local_dim()
            )));
        }
        Ok(())
    }

    /// `P|ψ⟩` in O(d) time.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        self.check_state(psi)?;
        let d = self.local_dim;
        let n = self.sites();
        let phase = self.phase();
        let amps = psi.amplitudes();
        let mut out = vec![ZERO; amps.len()];
        // P|k⟩ = phase · ω^{z·k} |k + x⟩
        let mut k_digits = vec![0usize; n];
        for &amp in amps {
            let mut target = 0usize;
            let mut zk = 0usize;
            for s in 0..n {
                let kd = k_digits[s];
                zk += self.z[s] as usize * kd;
                target = target * d + (kd + self.x[s] as usize) % d;
            }
            out[target] = phase * root_of_unity(d, zk) * amp;
            increment_digits(&mut k_digits, d);
        }
        Ok(StateVector::from_raw(d, n, out))
    }

    /// `⟨ψ|P|ψ⟩`.
    pub fn expectation(&self, psi: &StateVector) -> Result<C64> {
        let moved = self.apply(psi)?;
        psi.inner(&moved)
    }
}

pub(crate) fn increment_digits(digits: &mut [usize], d: usize) {
    for v in digits.iter_mut().rev() {
        *v += 1;
        if *v < d {
            return;
        }
        *v = 0;
    }
}

/// `P|ψ⟩`.
pub fn apply_pauli_string(p: &PauliString, psi: &StateVector) -> Result<StateVector> {
    p.apply(psi)
}

/// `c_P = ⟨ψ|P|ψ⟩`.
pub fn pauli_expectation(p: &PauliString, psi: &StateVector) -> Result<C64> {
    p.expectation(psi)
}

/// Gell-Mann matrices in the standard order, normalized to `Tr(T^a T^b) = 2δ^{ab}`.
pub fn su3_generators() -> [Matrix3<C64>; 8] {
    let r = |v: f64| C64::new(v, 0.0);
    let i = |v: f64| C64::new(0.0, v);
    let z = ZERO;
    let s3 = 1.0 / 3f64.sqrt();
    [
        Matrix3::new(z, r(1.0), z, r(1.0), z, z, z, z, z),
        Matrix3::new(z, i(-1.0), z, i(1.0), z, z, z, z, z),
        Matrix3::new(r(1.0), z, z, z, r(-1.0), z, z, z, z),
        Matrix3::new(z, z, r(1.0), z, z, z, r(1.0), z, z),
        Matrix3::new(z, z, i(-1.0), z, z, z, i(1.0), z, z),
        Matrix3::new(z, z, z, z, z, r(1.0), z, r(1.0), z),
        Matrix3::new(z, z, z, z, z, i(-1.0), z, i(1.0), z),
        Matrix3::new(r(s3), z, z, z, r(s3), z, z, z, r(-2.0 * s3)),
    ]
}

/// `σx, σy, σz`.
pub fn su2_generators() -> [DMatrix<C64>; 3] {
    let z = ZERO;
    [
        DMatrix::from_row_slice(2, 2, &[z, ONE, ONE, z]),
        DMatrix::from_row_slice(2, 2, &[z, C64::new(0.0, -1.0), C64::new(0.0, 1.0), z]),
        DMatrix::from_row_slice(2, 2, &[ONE, z, z, -ONE]),
    ]
}
