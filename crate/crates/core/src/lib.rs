//! Elastic scattering coefficients (ESC) for layered spherical cavities.
//!
//! The crate computes the coefficients that map incident pressure and shear
//! modes onto scattered modes for a traction-free spherical core wrapped in
//! concentric homogeneous isotropic layers, and provides the design,
//! asymptotic and transformation tooling built on top of them.
//!
//! Everything here is `no_std` with `alloc`; file formats, parallelism and the
//! command-line tool live in the `escloak` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod asymptotics;
pub mod design;
pub mod farfield;
pub mod harmonics;
pub mod linalg;
pub mod medium;
pub mod scattering;
pub mod specfun;
pub mod transform;

pub use num_complex::Complex64;

pub use harmonics::{ModeKind, SphericalDirection};
pub use medium::{LayerStack, Material};
pub use scattering::{esc_table, EscRow, EscTable};
