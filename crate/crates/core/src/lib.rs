//! Bayesian stepwise estimation of the two parameters of a qubit rotation.
//!
//! The probe `|0⟩` undergoes `U(θ, γ) = exp[-iγ(cos θ σx + sin θ σz)]` and is
//! measured in the Z basis. The crate provides
//!
//! * [`model`]: exact state evolution, outcome probabilities, and the quantum and
//!   classical Fisher information matrices;
//! * [`bounds`]: joint and stepwise Cramér–Rao bounds, the Holevo bound, the
//!   stepwise/Holevo ratio, and quantum and classical Van Trees bounds;
//! * [`bayes`]: grid posteriors with Gaussian priors and the two-stage stepwise
//!   protocol;
//! * [`sim`]: seeded binomial sampling and campaign sweeps.
//!
//! Angles are radians throughout.

pub mod bayes;
pub mod bounds;
mod error;
pub mod exec;
mod info;
pub mod model;
pub mod optim;
pub mod quadrature;
pub mod sim;

pub use error::{Error, Result};
pub use info::{InfoMatrix, Ordering, Param};
pub use model::{ParamPoint, QubitState};
