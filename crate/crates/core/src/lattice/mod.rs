//! Periodic hypercubic lattice `(ℤ/n)⁴` with spacing `h`, lattice fields, and
//! the discrete gauge-theoretic operators acting on them.

mod field;
mod gauge;
mod grid;
mod io;
mod ops;
pub mod reduce;

pub use field::{
    Connection, ConnectionField, Field, FieldKind, OneForm, OneFormField, PlusForm,
    PlusFormField, Scalar, ScalarLieField, TwoForm, TwoFormField,
};
pub use gauge::{
    coulomb_project, exp_adjoint, gauge_transform_finite, log_adjoint, RotationField,
    POISSON_TOL, ROTATION_TOL,
};
pub use grid::TorusGrid;
pub use io::{load_fields, save_fields, AnyField, NamedField, FORMAT_VERSION, MAGIC};
pub use ops::{
    anti_self_dual_part, bracket_plus_scalar, chern_weil, cov_d_scalar, cov_d_scalar_adjoint,
    curvature, curvature_norms, d0_star, d_a_plus, d_a_star_plus, f_plus, plus_bracket,
    self_dual_part, star_bracket, star_bracket_transpose, CurvatureNorms, PAIRS,
};
