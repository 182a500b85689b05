//! Quantum magic and entanglement in systems of interacting neutrinos.
//!
//! Neutrinos are encoded as qubits (two flavors) or qutrits (three flavors)
//! in the mass basis. The crate evolves small systems under a
//! density-dependent all-to-all flavor Hamiltonian and measures stabilizer
//! Rényi entropies, entanglement monotones and n-tangles along the way.

pub mod clifford;
pub mod error;
pub mod evolution;
pub mod harness;
pub mod magic;
pub mod maxmagic;
pub mod model;
pub mod observables;
pub mod optimize;
mod par;
pub mod pauli;
pub mod stabilizer;
pub mod state;

pub use error::{Error, Result};
pub use magic::{MagicMeasure, MagicResult, PauliSpectrum};
pub use model::{Flavor, ModelProfile, NeutrinoHamiltonian, OscillationParams};
pub use state::{StateVector, C64};
