//! Lattice numerics for perturbed Vafa-Witten-type equations on the flat
//! four-torus with gauge group SU(2).
//!
//! * [`algebra`]: pointwise algebra of `su(2) ⊗ Λ^{2,+}`.
//! * [`lattice`]: periodic grids, fields, and discrete gauge operators.
//! * [`solver`]: residual, linearisation, Kuranishi complex and the solver.
//! * [`bounds`]: a-priori estimates and their verification on solutions.

pub mod algebra;
pub mod bounds;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod solver;

pub use algebra::{GaugedForm, LieVector, PerturbationParams, SelfDual2Form};
pub use error::{Error, Result};
pub use lattice::{
    ConnectionField, OneFormField, PlusFormField, ScalarLieField, TorusGrid, TwoFormField,
};
pub use bounds::{BoundsParams, BoundsReport};
