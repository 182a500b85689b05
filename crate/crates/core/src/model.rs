//! Mixing matrices, single-neutrino states and the many-neutrino Hamiltonian.
//!
//! Every Hamiltonian term is expressed in units of the scale `κ`, so time is
//! measured as `κt`.

use nalgebra::{DMatrix, Matrix2, Matrix3};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

use crate::error::{check_local_dim, invalid, Error, Result};
use crate::pauli::{su2_generators, su3_generators};
use crate::state::{StateVector, C64, ZERO};

/// A measured quantity with a (possibly asymmetric) 68% interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub value: f64,
    pub sigma_plus: f64,
    pub sigma_minus: f64,
}

impl Measured {
    pub const fn symmetric(value: f64, sigma: f64) -> Self {
        Measured { value, sigma_plus: sigma, sigma_minus: sigma }
    }

    pub const fn asymmetric(value: f64, sigma_plus: f64, sigma_minus: f64) -> Self {
        Measured { value, sigma_plus, sigma_minus }
    }

    /// Maps a standard-normal deviate onto the two-sided Gaussian.
    pub fn at_deviate(&self, z: f64) -> f64 {
        if z >= 0.0 {
            self.value + z * self.sigma_plus
        } else {
            self.value + z * self.sigma_minus
        }
    }

    pub fn exact(&self) -> Self {
        Measured::symmetric(self.value, 0.0)
    }
}

/// Mixing angles, CP phase and mass-squared splittings (normal ordering).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillationParams {
    pub sin2_theta12: Measured,
    pub sin2_theta23: Measured,
    pub sin2_theta13: Measured,
    /// Radians.
    pub delta_cp: Measured,
    /// MeV².
    pub dm21_sq: Measured,
    /// MeV².
    pub dm32_sq: Measured,
}

impl Default for OscillationParams {
    fn default() -> Self {
        OscillationParams {
            sin2_theta12: Measured::symmetric(0.307, 0.013),
            sin2_theta23: Measured::asymmetric(0.553, 0.016, 0.024),
            sin2_theta13: Measured::symmetric(0.0219, 0.0007),
            delta_cp: Measured::symmetric(1.19 * PI, 0.22 * PI),
            dm21_sq: Measured::symmetric(7.53e-17, 0.18e-17),
            dm32_sq: Measured::symmetric(2.455e-15, 0.028e-15),
        }
    }
}

impl OscillationParams {
    /// `Δm²₃₁ = Δm²₃₂ + δm²₂₁`.
    pub fn dm31_sq(&self) -> f64 {
        self.dm32_sq.value + self.dm21_sq.value
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("sin^2 theta12", self.sin2_theta12.value),
            ("sin^2 theta23", self.sin2_theta23.value),
            ("sin^2 theta13", self.sin2_theta13.value),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(invalid(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Three-flavor mixing matrix `R₂₃ · R₁₃(δ) · R₁₂`.
pub fn pmns_matrix(params: &OscillationParams) -> Result<Matrix3<C64>> {
    params.validate()?;
    let angle = |s2: f64| {
        let s = s2.sqrt();
        (((1.0 - s2).max(0.0)).sqrt(), s)
    };
    let (c12, s12) = angle(params.sin2_theta12.value);
    let (c23, s23) = angle(params.sin2_theta23.value);
    let (c13, s13) = angle(params.sin2_theta13.value);
    let delta = params.delta_cp.value;
    let r = |v: f64| C64::new(v, 0.0);
    let z = ZERO;
    let one = r(1.0);
    let r23 = Matrix3::new(one, z, z, z, r(c23), r(s23), z, r(-s23), r(c23));
    let r13 = Matrix3::new(
        r(c13),
        z,
        C64::from_polar(s13, -delta),
        z,
        one,
        z,
        -C64::from_polar(s13, delta),
        z,
        r(c13),
    );
    let r12 = Matrix3::new(r(c12), r(s12), z, r(-s12), r(c12), z, z, z, one);
    Ok(r23 * r13 * r12)
}

/// Effective two-flavor rotation built from `θ₁₂`.
pub fn u2_matrix(params: &OscillationParams) -> Matrix2<f64> {
    let s2 = params.sin2_theta12.value.clamp(0.0, 1.0);
    let (c, s) = ((1.0 - s2).sqrt(), s2.sqrt());
    Matrix2::new(c, s, -s, c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Flavor {
    #[serde(rename = "e")]
    Electron,
    #[serde(rename = "m")]
    Muon,
    #[serde(rename = "t")]
    Tau,
}

impl Flavor {
    pub fn index(self) -> usize {
        match self {
            Flavor::Electron => 0,
            Flavor::Muon => 1,
            Flavor::Tau => 2,
        }
    }

    pub fn letter(self) -> char {
        ['e', 'm', 't'][self.index()]
    }

    pub fn from_letter(c: char) -> Result<Self> {
        match c {
            'e' => Ok(Flavor::Electron),
            'm' => Ok(Flavor::Muon),
            't' => Ok(Flavor::Tau),
            other => Err(invalid(format!("unknown flavor letter '{other}' (expected e, m or t)"))),
        }
    }

    /// Parses compact strings such as `"emt"`, site 0 first.
    pub fn parse_list(s: &str) -> Result<Vec<Flavor>> {
        s.chars().map(Flavor::from_letter).collect()
    }

    pub fn list_to_string(flavors: &[Flavor]) -> String {
        flavors.iter().map(|f| f.letter()).collect()
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Mass-basis amplitudes of a flavor state: component `i` is `U_{αi}`.
pub fn flavor_amplitudes(flavor: Flavor, params: &OscillationParams, local_dim: usize) -> Result<Vec<C64>> {
    check_local_dim(local_dim)?;
    match local_dim {
        3 => {
            let u = pmns_matrix(params)?;
            Ok((0..3).map(|i| u[(flavor.index(), i)]).collect())
        }
        _ => {
            if flavor == Flavor::Tau {
                return Err(invalid("the two-flavor encoding has no tau neutrino"));
            }
            let u = u2_matrix(params);
            Ok((0..2).map(|i| C64::new(u[(flavor.index(), i)], 0.0)).collect())
        }
    }
}

pub fn flavor_state(flavor: Flavor, params: &OscillationParams, local_dim: usize) -> Result<StateVector> {
    StateVector::new(local_dim, 1, flavor_amplitudes(flavor, params, local_dim)?)
}

/// `|ν_{α₁} ν_{α₂} …⟩` in the mass basis.
pub fn flavor_product_state(
    flavors: &[Flavor],
    params: &OscillationParams,
    local_dim: usize,
) -> Result<StateVector> {
    let factors = flavors
        .iter()
        .map(|&f| flavor_amplitudes(f, params, local_dim))
        .collect::<Result<Vec<_>>>()?;
    StateVector::product(local_dim, &factors)
}

/// Diagonal of the one-body Hamiltonian for energy `energy` (MeV), in units of `kappa` (MeV).
/// Identity-proportional pieces are dropped.
pub fn one_body_diagonal(params: &OscillationParams, energy: f64, kappa: f64, local_dim: usize) -> Result<Vec<f64>> {
    check_local_dim(local_dim)?;
    if !(energy > 0.0) {
        return Err(invalid("neutrino energy must be positive"));
    }
    let scale = 1.0 / (2.0 * energy * kappa);
    let mut diag = vec![0.0, params.dm21_sq.value * scale];
    if local_dim == 3 {
        diag.push(params.dm31_sq() * scale);
    }
    Ok(diag)
}

/// How the one-body term of neutrino `n` (1-based) scales with its position on
/// the energy ladder `E_n = E₀/n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LadderScaling {
    /// `n · H₁(E₀)`: the one-body term evaluated at `E_n` only.
    Linear,
    /// `n · H₁(E_n) = n² · H₁(E₀)`: the explicit ladder weight `n` times `H₁(E_n)`.
    Quadratic,
}

impl LadderScaling {
    pub fn weight(self, n: usize) -> f64 {
        match self {
            LadderScaling::Linear => n as f64,
            LadderScaling::Quadratic => (n * n) as f64,
        }
    }
}

/// Density profile and energy ladder. Lengths are in units of `1/κ`,
/// `mu0` in units of `κ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelProfile {
    pub mu0: f64,
    pub r_nu: f64,
    /// MeV.
    pub kappa: f64,
    pub r0: f64,
    /// MeV.
    pub e0: f64,
    pub ladder: LadderScaling,
}

impl Default for ModelProfile {
    fn default() -> Self {
        ModelProfile {
            mu0: 3.62e4,
            r_nu: 32.2,
            kappa: 1e-17,
            r0: 210.65,
            e0: 10.0,
            ladder: LadderScaling::Quadratic,
        }
    }
}

/// `μ(r₀ + t)/κ` with `μ(r) = μ₀ (1 − √(1 − (R_ν/r)²))²`.
pub fn mu_profile(t: f64, profile: &ModelProfile) -> Result<f64> {
    let r = profile.r0 + t;
    if !(r >= profile.r_nu) {
        return Err(Error::Domain(format!(
            "radius {r} lies inside the neutrino sphere (R = {})",
            profile.r_nu
        )));
    }
    let ratio = profile.r_nu / r;
    let gap = 1.0 - (1.0 - ratio * ratio).sqrt();
    Ok(profile.mu0 * gap * gap)
}

/// `Σ_a T^a ⊗ T^a` (Gell-Mann for qutrits, Pauli for qubits).
pub fn pair_coupling(local_dim: usize) -> Result<DMatrix<C64>> {
    check_local_dim(local_dim)?;
    let gens: Vec<DMatrix<C64>> = if local_dim == 3 {
        su3_generators()
            .iter()
            .map(|g| DMatrix::from_fn(3, 3, |r, c| g[(r, c)]))
            .collect()
    } else {
        su2_generators().to_vec()
    };
    let dd = local_dim * local_dim;
    Ok(gens
        .iter()
        .fold(DMatrix::zeros(dd, dd), |acc, g| acc + g.kronecker(g)))
}

/// Maximum number of neutrinos per encoding.
pub fn max_neutrinos(local_dim: usize) -> usize {
    if local_dim == 3 {
        8
    } else {
        12
    }
}

/// Time dependence of the two-body strength.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Coupling {
    Profile(ModelProfile),
    Constant(f64),
}

impl Coupling {
    pub fn at(&self, t: f64) -> Result<f64> {
        match self {
            Coupling::Profile(p) => mu_profile(t, p),
            Coupling::Constant(mu) => Ok(*mu),
        }
    }
}

/// `H(t) = Σ_n w_n H₁⁽ⁿ⁾ + μ(t) Σ_{n<n'} Σ_a T^a_n T^a_{n'}`, applied matrix-free.
///
/// The pair operator is evaluated as `2·SWAP − (2/d)·I`, which equals
/// `Σ_a T^a ⊗ T^a` for both the SU(2) and SU(3) normalizations used here.
#[derive(Clone, Debug)]
pub struct NeutrinoHamiltonian {
    local_dim: usize,
    sites: usize,
    coupling: Coupling,
    one_body: Vec<f64>,
    max_site_level: f64,
    pairs: Vec<(usize, usize)>,
    swaps: Vec<Vec<u32>>,
}

impl NeutrinoHamiltonian {
    pub fn new(
        sites: usize,
        params: &OscillationParams,
        profile: &ModelProfile,
        local_dim: usize,
    ) -> Result<Self> {
        Self::with_coupling(sites, params, profile, local_dim, Coupling::Profile(*profile))
    }

    pub fn with_coupling(
        sites: usize,
        params: &OscillationParams,
        profile: &ModelProfile,
        local_dim: usize,
        coupling: Coupling,
    ) -> Result<Self> {
        check_local_dim(local_dim)?;
        if sites == 0 {
            return Err(invalid("at least one neutrino is required"));
        }
        if sites > max_neutrinos(local_dim) {
            return Err(Error::UnsupportedSize(format!(
                "{sites} neutrinos exceed the limit of {} for local dimension {local_dim}",
                max_neutrinos(local_dim)
            )));
        }
        let base = one_body_diagonal(params, profile.e0, profile.kappa, local_dim)?;
        let dim = local_dim.pow(sites as u32);
        let mut one_body = vec![0.0; dim];
        for (j, slot) in one_body.iter_mut().enumerate() {
            let digits = crate::state::digits(j, local_dim, sites);
            *slot = digits
                .iter()
                .enumerate()
                .map(|(site, &level)| profile.ladder.weight(site + 1) * base[level])
                .sum();
        }
        let top = base.iter().cloned().fold(0.0, f64::max);
        let max_site_level =
            (1..=sites).map(|n| profile.ladder.weight(n) * top).fold(0.0, f64::max);
        let mut pairs = Vec::new();
        for a in 0..sites {
            for b in a + 1..sites {
                pairs.push((a, b));
            }
        }
        let swaps = pairs
            .iter()
            .map(|&(a, b)| swap_permutation(local_dim, sites, a, b))
            .collect();
        Ok(NeutrinoHamiltonian { local_dim, sites, coupling, one_body, max_site_level, pairs, swaps })
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.one_body.len()
    }

    /// Total one-body energy of each basis state.
    pub fn one_body_diagonal(&self) -> &[f64] {
        &self.one_body
    }

    /// Unordered pairs `(n, n')`, `n < n'`, in lexicographic order.
    /// Largest single-site one-body level, i.e. the fastest local phase rate.
    pub fn max_site_level(&self) -> f64 {
        self.max_site_level
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Basis-index permutation exchanging the two sites of `pairs()[k]`.
    pub fn swap(&self, k: usize) -> &[u32] {
        &self.swaps[k]
    }

    pub fn coupling_at(&self, t: f64) -> Result<f64> {
        self.coupling.at(t)
    }

    /// `out = H(t) ψ`.
    pub fn apply(&self, t: f64, psi: &[C64], out: &mut [C64]) -> Result<()> {
        let mu = self.coupling_at(t)?;
        self.apply_with_mu(mu, psi, out);
        Ok(())
    }

    pub fn apply_with_mu(&self, mu: f64, psi: &[C64], out: &mut [C64]) {
        let shift = 2.0 / self.local_dim as f64 * self.pairs.len() as f64;
        for ((o, p), e) in out.iter_mut().zip(psi).zip(&self.one_body) {
            *o = p * (e - mu * shift);
        }
        if mu != 0.0 {
            let two_mu = 2.0 * mu;
            for perm in &self.swaps {
                for (o, &src) in out.iter_mut().zip(perm) {
                    *o += psi[src as usize] * two_mu;
                }
            }
        }
    }

    /// `⟨ψ|H(t)|ψ⟩` (real for Hermitian `H`).
    pub fn energy(&self, t: f64, psi: &StateVector) -> Result<f64> {
        let mut out = vec![ZERO; psi.dim()];
        self.apply(t, psi.amplitudes(), &mut out)?;
        Ok(psi
            .amplitudes()
            .iter()
            .zip(&out)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            .re)
    }
}

fn swap_permutation(d: usize, sites: usize, a: usize, b: usize) -> Vec<u32> {
    let dim = d.pow(sites as u32);
    let sa = d.pow((sites - 1 - a) as u32);
    let sb = d.pow((sites - 1 - b) as u32);
    (0..dim)
        .map(|j| {
            let (da, db) = ((j / sa) % d, (j / sb) % d);
            (j + db * sa + da * sb - da * sa - db * sb) as u32
        })
        .collect()
}
