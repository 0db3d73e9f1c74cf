//! Numerical laboratory for the radial free Schrödinger flow: evaluation of
//! the propagator as a one-dimensional oscillatory integral, weighted norms,
//! dispersive decay fits, self-similar blow-up and Strichartz exponent gates.

pub mod appendix;
pub mod blowup;
pub mod cli;
pub mod decay;
pub mod error;
pub mod jet;
pub mod norms;
pub mod propagator;
pub mod quad;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
