//! Entropic measurement uncertainty for finite-dimensional quantum observables:
//! relative-entropy error functions, certified brackets on the incompatibility
//! and error-disturbance coefficients, and the closed-form cases for spin
//! components and conjugate bases over finite fields.

pub mod bounds;
pub mod entropy;
pub mod error;
pub mod field;
pub mod gallery;
pub mod io;
pub mod linalg;
pub mod mub;
pub mod objects;
mod search;
pub mod solver;
pub mod spin;

pub use error::{Error, Result};
