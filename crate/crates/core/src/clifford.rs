//! The classical gate set `{H, S, CNOT}` for qubits and qutrits.

use nalgebra::DMatrix;

use crate::error::{check_local_dim, invalid, Result};
use crate::pauli::root_of_unity;
use crate::state::{StateVector, C64, ONE, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CliffordGate {
    H(usize),
    S(usize),
    Cnot { control: usize, target: usize },
}

/// Single-qudit Hadamard (discrete Fourier transform).
pub fn hadamard(local_dim: usize) -> Result<DMatrix<C64>> {
    check_local_dim(local_dim)?;
    let s = 1.0 / (local_dim as f64).sqrt();
    Ok(DMatrix::from_fn(local_dim, local_dim, |r, c| {
        root_of_unity(local_dim, r * c) * s
    }))
}

/// Phase gate: `diag(1, i)` for qubits, `diag(1, 1, ω)` for qutrits.
pub fn phase_gate(local_dim: usize) -> Result<DMatrix<C64>> {
    check_local_dim(local_dim)?;
    let diag: Vec<C64> = if local_dim == 2 {
        vec![ONE, C64::new(0.0, 1.0)]
    } else {
        vec![ONE, ONE, root_of_unity(3, 1)]
    };
    Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)))
}

/// `|a, b⟩ → |a, a + b mod d⟩` on (control, target).
pub fn cnot(local_dim: usize) -> Result<DMatrix<C64>> {
    check_local_dim(local_dim)?;
    let d = local_dim;
    let mut m = DMatrix::from_element(d * d, d * d, ZERO);
    for a in 0..d {
        for b in 0..d {
            m[(a * d + (a + b) % d, a * d + b)] = ONE;
        }
    }
    Ok(m)
}

impl CliffordGate {
    /// Dense unitary acting on the gate's own one or two sites.
    pub fn unitary(&self, local_dim: usize) -> Result<DMatrix<C64>> {
        match self {
            CliffordGate::H(_) => hadamard(local_dim),
            CliffordGate::S(_) => phase_gate(local_dim),
            CliffordGate::Cnot { .. } => cnot(local_dim),
        }
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        let mut out = psi.clone();
        self.apply_in_place(&mut out)?;
        Ok(out)
    }

    pub fn apply_in_place(&self, psi: &mut StateVector) -> Result<()> {
        let d = psi.local_dim();
        match *self {
            CliffordGate::H(s) => psi.apply_single_site(s, &hadamard(d)?),
            CliffordGate::S(s) => psi.apply_single_site(s, &phase_gate(d)?),
            CliffordGate::Cnot { control, target } => {
                if control == target {
                    return Err(invalid("CNOT control and target must differ"));
                }
                psi.apply_two_site(control, target, &cnot(d)?)
            }
        }
    }

    /// Every gate of the classical set on `sites` qudits.
    pub fn all(sites: usize) -> Vec<CliffordGate> {
        let mut gates = Vec::new();
        for s in 0..sites {
            gates.push(CliffordGate::H(s));
            gates.push(CliffordGate::S(s));
        }
        for c in 0..sites {
            for t in 0..sites {
                if c != t {
                    gates.push(CliffordGate::Cnot { control: c, target: t });
                }
            }
        }
        gates
    }
}
