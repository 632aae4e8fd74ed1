//! Exact-arithmetic computational homological algebra.
//!
//! The crate computes kernels, cokernels and cohomology of integer-presented
//! module maps over Z, Q, Z/n and Q/Z, builds cochain complexes with mapping
//! cones and chain homotopies, truncates inverse limits with their lim^1
//! obstruction, and drives all of it on explicit polynomial models: the
//! truncated power-series model with the degree -2 derivative operator, its
//! two-torus and two-sphere extensions, bar-construction group cohomology,
//! and the circle T-duality model. Everything is exact; no floats anywhere.

pub mod complex;
pub mod error;
pub mod matrix;
pub mod model;
pub mod modules;
pub mod periodic;
pub mod tduality;
pub mod tower;

pub use error::{Error, Result};
pub use matrix::{smith_normal_form, IntMatrix, SmithDecomposition};
pub use modules::{CoefficientRing, ModuleClass, ModuleMap};
