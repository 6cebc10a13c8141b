//! Pauli-channel estimation from error-correction syndrome statistics.
//!
//! The crate answers two questions about a code (classical parity-check,
//! stabilizer, or quantum data-syndrome) subject to independent error
//! channels on a family of coordinate supports:
//!
//! 1. **Identifiability** — can the channel parameters be recovered from
//!    syndrome statistics alone? The check is combinatorial: every union
//!    of two channel supports must carry only detectable errors, and the
//!    verdict comes with an exact rank certificate for the moment system.
//! 2. **Estimation** — given syndrome samples (or an exact oracle), solve
//!    the log-linear binomial moment system for the transformed moments,
//!    then reconstruct standard moments, marginal distributions, and
//!    per-qubit Pauli rates.
//!
//! Modules mirror the pipeline: [`gf2`] exact binary linear algebra,
//! [`pauli`] phase-space encoding, [`codes`] code constructions and
//! distances, [`fourier`] Boolean Fourier/Möbius transforms, [`noise`]
//! support models and sampling, [`ratmat`] exact rational matrices,
//! [`identify`] the rank machinery, and [`estimate`] the solver.

pub mod codes;
pub mod estimate;
pub mod fourier;
pub mod gf2;
pub mod identify;
pub mod noise;
pub mod pauli;
pub mod ratmat;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
