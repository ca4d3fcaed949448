//! Finite-element kernels for mixed Dirichlet/Neumann eigenvalue problems on
//! expanding cylinders `ℓω₁ × ω₂`.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command line
//! and parallel orchestration live in the `cylspec` companion crate.
//!
//! Module map:
//!
//! * [`geometry`]: bases `ω₁`, cross-sections `ω₂`, cylinders and boundary
//!   classification.
//! * [`expr`] and [`coefficient`]: the coefficient matrix `A(ξ)` written as
//!   arithmetic expressions, its ellipticity check and the direction-reduced
//!   matrix `A_ν`.
//! * [`mesh`]: structured meshes of intervals, boxes and convex polygons, and
//!   extrusion to tetrahedra.
//! * [`assembly`]: P1/Q1 stiffness and mass matrices with Dirichlet
//!   elimination.
//! * [`eigen`]: sparse LDLᵀ, shift-invert Lanczos and a dense Jacobi oracle.
//! * [`spectral`]: cross-section, half-strip, slab and full-cylinder
//!   eigenvalue problems, direction sweeps, test-function upper bounds and
//!   eigenfunction decay profiles.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod assembly;
pub mod coefficient;
pub mod dense;
pub mod eigen;
mod error;
pub mod expr;
pub mod geometry;
pub(crate) mod math;
pub mod mesh;
pub mod sparse;
pub mod spectral;

pub use error::{Error, Result};
