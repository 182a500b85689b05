//! Pure states of `n` qudits stored as dense amplitude vectors.
//!
//! Site 0 is the most significant digit of the basis index, so the
//! amplitude layout matches the Kronecker product `site0 ⊗ site1 ⊗ ...`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{check_local_dim, invalid, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    local_dim: usize,
    sites: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// Wraps raw amplitudes. The vector is normalized; a zero vector is rejected.
    pub fn new(local_dim: usize, sites: usize, amps: Vec<C64>) -> Result<Self> {
        check_local_dim(local_dim)?;
        let dim = checked_dim(local_dim, sites)?;
        if amps.len() != dim {
            return Err(invalid(format!(
                "expected {dim} amplitudes for {sites} sites of dimension {local_dim}, got {}",
                amps.len()
            )));
        }
        let mut state = StateVector { local_dim, sites, amps };
        let norm = state.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(invalid("state vector has zero or non-finite norm"));
        }
        state.scale(1.0 / norm);
        Ok(state)
    }

    pub(crate) fn from_raw(local_dim: usize, sites: usize, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), local_dim.pow(sites as u32));
        StateVector { local_dim, sites, amps }
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(local_dim: usize, sites: usize, index: usize) -> Result<Self> {
        check_local_dim(local_dim)?;
        let dim = checked_dim(local_dim, sites)?;
        if index >= dim {
            return Err(invalid(format!("basis index {index} out of range for dimension {dim}")));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(StateVector { local_dim, sites, amps })
    }

    /// Tensor product of single-site amplitude vectors, site 0 first.
    pub fn product(local_dim: usize, factors: &[Vec<C64>]) -> Result<Self> {
        check_local_dim(local_dim)?;
        if factors.is_empty() {
            return Err(invalid("product state needs at least one site"));
        }
        let mut amps = vec![ONE];
        for f in factors {
            if f.len() != local_dim {
                return Err(invalid("single-site factor has wrong length"));
            }
            amps = kron_vec(&amps, f);
        }
        StateVector::new(local_dim, factors.len(), amps)
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Hilbert-space dimension `local_dim^sites`.
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) -> f64 {
        let n = self.norm();
        if n > 0.0 {
            self.scale(1.0 / n);
        }
        n
    }

    fn scale(&mut self, s: f64) {
        for a in &mut self.amps {
            *a *= s;
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.check_compatible(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        if self.local_dim != other.local_dim {
            return Err(invalid("tensor product of states with different local dimensions"));
        }
        Ok(StateVector {
            local_dim: self.local_dim,
            sites: self.sites + other.sites,
            amps: kron_vec(&self.amps, &other.amps),
        })
    }

    pub fn conjugate(&self) -> StateVector {
        StateVector {
            local_dim: self.local_dim,
            sites: self.sites,
            amps: self.amps.iter().map(|a| a.conj()).collect(),
        }
    }

    pub(crate) fn check_compatible(&self, other: &StateVector) -> Result<()> {
        if self.local_dim != other.local_dim || self.sites != other.sites {
            return Err(invalid(format!(
                "state shapes differ: ({}, {}) vs ({}, {})",
                self.local_dim, self.sites, other.local_dim, other.sites
            )));
        }
        Ok(())
    }

    /// Stride of `site` in the flat amplitude index.
    pub fn stride(&self, site: usize) -> usize {
        self.local_dim.pow((self.sites - 1 - site) as u32)
    }

    /// Applies a `local_dim × local_dim` matrix to one site in place.
    pub fn apply_single_site(&mut self, site: usize, op: &DMatrix<C64>) -> Result<()> {
        let d = self.local_dim;
        if site >= self.sites {
            return Err(invalid(format!("site {site} out of range")));
        }
        if op.nrows() != d || op.ncols() != d {
            return Err(invalid("single-site operator has wrong shape"));
        }
        let stride = self.stride(site);
        let block = stride * d;
        let mut buf = [ZERO; 3];
        for base in (0..self.amps.len()).step_by(block) {
            for off in 0..stride {
                let start = base + off;
                for (k, b) in buf.iter_mut().enumerate().take(d) {
                    *b = self.amps[start + k * stride];
                }
                for r in 0..d {
                    let mut acc = ZERO;
                    for (c, b) in buf.iter().enumerate().take(d) {
                        acc += op[(r, c)] * b;
                    }
                    self.amps[start + r * stride] = acc;
                }
            }
        }
        Ok(())
    }

    /// Applies a `d² × d²` matrix to the ordered pair `(first, second)` in place.
    /// The matrix acts on `|a⟩_first ⊗ |b⟩_second` with row index `a·d + b`.
    pub fn apply_two_site(&mut self, first: usize, second: usize, op: &DMatrix<C64>) -> Result<()> {
        let d = self.local_dim;
        if first >= self.sites || second >= self.sites || first == second {
            return Err(invalid("two-site operator needs two distinct in-range sites"));
        }
        if op.nrows() != d * d || op.ncols() != d * d {
            return Err(invalid("two-site operator has wrong shape"));
        }
        let (s1, s2) = (self.stride(first), self.stride(second));
        let mut idx = [0usize; 9];
        let mut buf = [ZERO; 9];
        for j in 0..self.amps.len() {
            let (a, b) = ((j / s1) % d, (j / s2) % d);
            if a != 0 || b != 0 {
                continue;
            }
            for p in 0..d {
                for q in 0..d {
                    idx[p * d + q] = j + p * s1 + q * s2;
                    buf[p * d + q] = self.amps[j + p * s1 + q * s2];
                }
            }
            for r in 0..d * d {
                let mut acc = ZERO;
                for c in 0..d * d {
                    acc += op[(r, c)] * buf[c];
                }
                self.amps[idx[r]] = acc;
            }
        }
        Ok(())
    }

    /// Dense `U|ψ⟩` for an operator on the full space.
    pub fn apply_dense(&self, op: &DMatrix<C64>) -> Result<StateVector> {
        let n = self.amps.len();
        if op.nrows() != n || op.ncols() != n {
            return Err(invalid("operator dimension does not match state"));
        }
        let amps = (0..n)
            .map(|r| (0..n).map(|c| op[(r, c)] * self.amps[c]).sum())
            .collect();
        Ok(StateVector { local_dim: self.local_dim, sites: self.sites, amps })
    }
}

pub(crate) fn checked_dim(local_dim: usize, sites: usize) -> Result<usize> {
    if sites == 0 {
        return Err(invalid("a state needs at least one site"));
    }
    local_dim
        .checked_pow(sites as u32)
        .filter(|&d| d <= 1 << 26)
        .ok_or_else(|| crate::Error::UnsupportedSize(format!("{local_dim}^{sites} amplitudes")))
}

pub(crate) fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// Digits of `index` in base `d`, most significant (site 0) first.
pub(crate) fn digits(mut index: usize, d: usize, sites: usize) -> Vec<usize> {
    let mut out = vec![0; sites];
    for s in (0..sites).rev() {
        out[s] = index % d;
        index /= d;
    }
    out
}
