//! Kitaev-type spin ladders: geometry, Z2 vortex sectors, Majorana spectra,
//! spin exact diagonalization, perturbative vortex gaps and reflection
//! positivity checks.

pub mod couplings;
pub mod error;
pub mod freefermion;
pub mod gauge;
pub mod gf2;
pub mod lattice;
pub mod linalg;
pub mod pauli;
pub mod perturbation;
pub mod presets;
pub mod rp;
pub mod solvers;
pub mod spin_ed;

pub use error::{Error, Result};
