//! Multi-start search for the largest `M_2` on constrained state manifolds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{invalid, Result};
use crate::magic::magic_of_state;
use crate::optimize::{nelder_mead_restarted, NelderMeadOptions};
use crate::par::map_range;
use crate::state::{checked_dim, kron_vec, StateVector, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MagicConstraint {
    AnyPure,
    TensorProduct,
    RealAmplitudes,
}

impl std::str::FromStr for MagicConstraint {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "any-pure" | "any" => Ok(MagicConstraint::AnyPure),
            "tensor-product" | "product" => Ok(MagicConstraint::TensorProduct),
            "real-amplitudes" | "real" => Ok(MagicConstraint::RealAmplitudes),
            other => Err(invalid(format!("unknown constraint '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct MaxMagicOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_evals: usize,
}

impl Default for MaxMagicOptions {
    fn default() -> Self {
        MaxMagicOptions { restarts: 64, seed: 0x5eed, max_evals: 40_000 }
    }
}

#[derive(Clone, Debug)]
pub struct MaxMagicResult {
    pub m2: f64,
    pub state: StateVector,
    /// Best `M_2` reached by each restart, in restart order.
    pub restart_values: Vec<f64>,
    pub evaluations: usize,
}

/// Amplitudes from hyperspherical angles (moduli) and optional relative phases.
fn hyperspherical(angles: &[f64], phases: Option<&[f64]>) -> Vec<C64> {
    let d = angles.len() + 1;
    let mut out = Vec::with_capacity(d);
    let mut sin_prod = 1.0;
    for k in 0..d {
        let modulus = if k < d - 1 { sin_prod * angles[k].cos() } else { sin_prod };
        if k < d - 1 {
            sin_prod *= angles[k].sin();
        }
        let phase = match (phases, k) {
            (Some(p), k) if k > 0 => p[k - 1],
            _ => 0.0,
        };
        out.push(C64::from_polar(modulus, phase));
    }
    out
}

struct Manifold {
    local_dim: usize,
    sites: usize,
    constraint: MagicConstraint,
}

impl Manifold {
    fn n_params(&self) -> usize {
        let dim = self.local_dim.pow(self.sites as u32);
        match self.constraint {
            MagicConstraint::AnyPure => 2 * (dim - 1),
            MagicConstraint::RealAmplitudes => dim - 1,
            MagicConstraint::TensorProduct => self.sites * 2 * (self.local_dim - 1),
        }
    }

    fn amplitudes(&self, p: &[f64]) -> Vec<C64> {
        let dim = self.local_dim.pow(self.sites as u32);
        match self.constraint {
            MagicConstraint::AnyPure => hyperspherical(&p[..dim - 1], Some(&p[dim - 1..])),
            MagicConstraint::RealAmplitudes => hyperspherical(p, None),
            MagicConstraint::TensorProduct => {
                let per = 2 * (self.local_dim - 1);
                let m = self.local_dim - 1;
                p.chunks(per).fold(vec![C64::new(1.0, 0.0)], |acc, site| {
                    kron_vec(&acc, &hyperspherical(&site[..m], Some(&site[m..])))
                })
            }
        }
    }

    fn state(&self, p: &[f64]) -> StateVector {
        StateVector::new(self.local_dim, self.sites, self.amplitudes(p))
            .expect("hyperspherical amplitudes are normalized")
    }

    fn m2(&self, p: &[f64]) -> f64 {
        magic_of_state(&self.state(p)).map(|r| r.m2).unwrap_or(f64::NEG_INFINITY)
    }
}

/// Best `M_2` found over the constrained manifold; requires `d ≤ 81`.
pub fn max_magic_search(
    local_dim: usize,
    sites: usize,
    constraint: MagicConstraint,
    opts: &MaxMagicOptions,
) -> Result<MaxMagicResult> {
    crate::error::check_local_dim(local_dim)?;
    let dim = checked_dim(local_dim, sites)?;
    if dim > 81 {
        return Err(crate::Error::UnsupportedSize(format!(
            "max-magic search is limited to d <= 81 (got {dim})"
        )));
    }
    if opts.restarts == 0 {
        return Err(invalid("at least one restart is required"));
    }
    let manifold = Manifold { local_dim, sites, constraint };
    let n = manifold.n_params();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let starts: Vec<Vec<f64>> = (0..opts.restarts)
        .map(|_| (0..n).map(|_| rng.random::<f64>() * TAU).collect())
        .collect();
    let nm = NelderMeadOptions { max_evals: opts.max_evals, ..Default::default() };
    let objective = |p: &[f64]| -manifold.m2(p);
    let runs = map_range(starts.len(), |i| nelder_mead_restarted(&objective, &starts[i], &nm, 8));

    let best = runs
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("restarts > 0");
    Ok(MaxMagicResult {
        m2: -best.value,
        state: manifold.state(&best.x),
        restart_values: runs.iter().map(|r| -r.value).collect(),
        evaluations: runs.iter().map(|r| r.evals).sum(),
    })
}
