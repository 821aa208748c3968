//! Littlewood-Paley analysis on a periodic surrogate of the plane, together
//! with a pseudo-spectral incompressible Euler solver and the tools needed to
//! exhibit norm inflation in the Triebel-Lizorkin space `F^s_{1,inf}`.

pub mod counterexample;
pub mod dynamics;
pub mod error;
pub mod filter;
pub mod harness;
pub mod norms;
pub mod paradiff;
pub mod spectral;

pub use error::{Error, Result};
pub use spectral::{C64, RealField, SpectralField, TorusGrid};
