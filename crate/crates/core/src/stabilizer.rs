//! Enumeration of stabilizer states as the orbit of `|0…0⟩` under `{H, S, CNOT}`.

use std::collections::{HashSet, VecDeque};

use crate::clifford::CliffordGate;
use crate::error::{check_local_dim, Error, Result};
use crate::state::{StateVector, C64};

/// Largest stabilizer set we are willing to build in memory.
pub const MAX_STABILIZER_STATES: u64 = 100_000;

const KEY_GRID: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct StabilizerSet {
    pub local_dim: usize,
    pub sites: usize,
    pub states: Vec<StateVector>,
}

impl StabilizerSet {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Closed-form count `d^n Π_{j=1..n} (d^j + 1)`.
pub fn stabilizer_count(local_dim: usize, sites: usize) -> Option<u64> {
    let d = local_dim as u64;
    let mut count = d.checked_pow(sites as u32)?;
    for j in 1..=sites as u32 {
        count = count.checked_mul(d.checked_pow(j)?.checked_add(1)?)?;
    }
    Some(count)
}

/// Phase-canonical hash key: the first non-negligible amplitude is rotated to
/// the positive real axis and all amplitudes are rounded onto a 1e-9 grid.
pub fn canonical_key(psi: &StateVector) -> Vec<(i64, i64)> {
    let amps = psi.amplitudes();
    let pivot = amps
        .iter()
        .find(|a| a.norm() > 1e-6)
        .copied()
        .unwrap_or(C64::new(1.0, 0.0));
    let rot = pivot.conj() / pivot.norm();
    amps.iter()
        .map(|a| {
            let v = a * rot;
            ((v.re / KEY_GRID).round() as i64, (v.im / KEY_GRID).round() as i64)
        })
        .collect()
}

fn canonicalize(psi: &mut StateVector) {
    let amps = psi.amplitudes_mut();
    if let Some(pivot) = amps.iter().find(|a| a.norm() > 1e-6).copied() {
        let rot = pivot.conj() / pivot.norm();
        for a in amps.iter_mut() {
            *a *= rot;
        }
    }
}

/// All stabilizer states of `sites` qudits, sorted by canonical key.
pub fn enumerate_stabilizer_states(local_dim: usize, sites: usize) -> Result<StabilizerSet> {
    check_local_dim(local_dim)?;
    let expected = stabilizer_count(local_dim, sites)
        .filter(|&c| c <= MAX_STABILIZER_STATES)
        .ok_or_else(|| {
            Error::UnsupportedSize(format!(
                "stabilizer set for {sites} sites of dimension {local_dim} is too large to enumerate"
            ))
        })?;
    let gates = CliffordGate::all(sites);
    let start = StateVector::basis(local_dim, sites, 0)?;
    let mut seen = HashSet::new();
    let mut found = Vec::with_capacity(expected as usize);
    let mut queue = VecDeque::new();
    seen.insert(canonical_key(&start));
    queue.push_back(start);
    while let Some(state) = queue.pop_front() {
        for g in &gates {
            let mut next = g.apply(&state)?;
            canonicalize(&mut next);
            let key = canonical_key(&next);
            if seen.insert(key) {
                queue.push_back(next);
            }
        }
        found.push(state);
    }
    let mut keyed: Vec<_> = found.into_iter().map(|s| (canonical_key(&s), s)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(StabilizerSet {
        local_dim,
        sites,
        states: keyed.into_iter().map(|(_, s)| s).collect(),
    })
}
