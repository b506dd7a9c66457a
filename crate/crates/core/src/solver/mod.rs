//! The perturbed equations, their linearisation, the deformation complex and
//! a gauge-fixed least-squares solver.
//!
//! For `(A, B)` with `B ∈ Ω⁰(su(2) ⊗ Λ^{2,+})` the residual is
//!
//! ```text
//! r₁ = d_A⁺ d_A^* B + t⟨B,B⟩² B + τ[[B•B]•[B•B]] − w₁
//! r₂ = F_A⁺ + ⅛[B•B]                              − w₂
//! ```
//!
//! with an optional target `(w₁, w₂)` for manufactured problems.

mod assemble;
mod precond;
mod solve;

use nalgebra::Matrix3;
use rand::Rng;

use crate::algebra::{GaugedForm, PerturbationParams};
use crate::error::Result;
use crate::lattice::{
    bracket_plus_scalar, cov_d_scalar, d0_star, d_a_plus, d_a_star_plus, f_plus, plus_bracket,
    star_bracket, star_bracket_transpose, ConnectionField, OneFormField, PlusFormField,
    RotationField, ScalarLieField, TorusGrid,
};
use crate::linalg::InnerSpace;

pub use assemble::{
    apply_operator, assemble_operator, tangent_from_vec, SparseMatrix, ASSEMBLY_MAX_N,
    COLS_PER_SITE, ROWS_PER_SITE,
};
pub use precond::FourierPreconditioner;
pub use solve::{
    project_to_slice, solve, solve_in_slice, SolveOptions, SolveReport, Termination, ARMIJO_C, MIN_STEP,
};

/// A pair `(A, B)` on a common grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    pub a: ConnectionField,
    pub b: PlusFormField,
}

impl Configuration {
    pub fn new(a: ConnectionField, b: PlusFormField) -> Result<Self> {
        a.same_grid(&b)?;
        Ok(Configuration { a, b })
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        Configuration { a: ConnectionField::zeros(grid), b: PlusFormField::zeros(grid) }
    }

    /// Uniform random entries in `[-amplitude, amplitude]`.
    pub fn random<R: Rng>(grid: TorusGrid, amplitude: f64, rng: &mut R) -> Self {
        let a = ConnectionField::random(grid, amplitude, rng);
        let b = PlusFormField::random(grid, amplitude, rng);
        Configuration { a, b }
    }

    /// Smooth periodic fields, resolution independent for a fixed box (see
    /// [`crate::lattice::Field::smooth_random`]).
    pub fn smooth_random<R: Rng>(grid: TorusGrid, amp_a: f64, amp_b: f64, rng: &mut R) -> Self {
        let a = ConnectionField::smooth_random(grid, amp_a, rng);
        let b = PlusFormField::smooth_random(grid, amp_b, rng);
        Configuration { a, b }
    }

    pub fn grid(&self) -> &TorusGrid {
        self.a.grid()
    }

    /// `c + s · δ`.
    pub fn displaced(&self, s: f64, d: &Tangent) -> Configuration {
        Configuration { a: self.a.plus(s, &d.a.clone().cast()), b: self.b.plus(s, &d.b) }
    }

    /// `self − base` as a tangent vector at `base`.
    pub fn difference(&self, base: &Configuration) -> Result<Tangent> {
        self.a.same_grid(&base.a)?;
        let mut a = self.a.clone();
        a.axpy(-1.0, &base.a);
        let mut b = self.b.clone();
        b.axpy(-1.0, &base.b);
        Ok(Tangent { a: a.cast(), b })
    }

    /// Finite gauge transformation `(A, B) ↦ g·(A, B)`.
    pub fn gauge_transform(&self, r: &RotationField) -> Result<Configuration> {
        let (a, b) = crate::lattice::gauge_transform_finite(r, &self.a, &self.b)?;
        Ok(Configuration { a, b })
    }
}

/// The Coulomb slice `d⁰*_{ref}(c − ref) = w` through a fixed reference.
#[derive(Clone, Debug, PartialEq)]
pub struct CoulombSlice {
    pub reference: Configuration,
    pub w: ScalarLieField,
}

impl CoulombSlice {
    /// The slice with `w = 0`, which contains `reference`.
    pub fn through(reference: &Configuration) -> Self {
        CoulombSlice { reference: reference.clone(), w: ScalarLieField::zeros(*reference.grid()) }
    }

    /// `d⁰*_{ref}(c − ref) − w`.
    pub fn defect(&self, c: &Configuration) -> Result<ScalarLieField> {
        let mut g = d0_adjoint(&self.reference, &c.difference(&self.reference)?)?;
        g.axpy(-1.0, &self.w);
        Ok(g)
    }
}

/// Value of the two equations.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub r1: PlusFormField,
    pub r2: PlusFormField,
}

impl Residual {
    pub fn zeros(grid: TorusGrid) -> Self {
        Residual { r1: PlusFormField::zeros(grid), r2: PlusFormField::zeros(grid) }
    }

    pub fn grid(&self) -> &TorusGrid {
        self.r1.grid()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.r1.l2_norm_sq() + self.r2.l2_norm_sq()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// Pointwise `[r, ξ]` in both rows.
    pub fn bracket_scalar(&self, xi: &ScalarLieField) -> Result<Residual> {
        Ok(Residual { r1: bracket_plus_scalar(&self.r1, xi)?, r2: bracket_plus_scalar(&self.r2, xi)? })
    }

    /// Gauge action `r ↦ Rᵀ r` on the Lie index of both rows.
    pub fn rotate(&self, r: &RotationField) -> Result<Residual> {
        Ok(Residual { r1: r.act_plus(&self.r1)?, r2: r.act_plus(&self.r2)? })
    }
}

impl InnerSpace for Residual {
    fn dot(&self, other: &Self) -> f64 {
        self.r1.dot(&other.r1) + self.r2.dot(&other.r2)
    }
    fn axpy(&mut self, alpha: f64, x: &Self) {
        self.r1.axpy(alpha, &x.r1);
        self.r2.axpy(alpha, &x.r2);
    }
    fn scale(&mut self, s: f64) {
        self.r1.scale(s);
        self.r2.scale(s);
    }
    fn zeros_like(&self) -> Self {
        Residual::zeros(*self.grid())
    }
}

/// A tangent vector `(a, b)` to the configuration space.
#[derive(Clone, Debug, PartialEq)]
pub struct Tangent {
    pub a: OneFormField,
    pub b: PlusFormField,
}

impl Tangent {
    pub fn new(a: OneFormField, b: PlusFormField) -> Result<Self> {
        a.same_grid(&b)?;
        Ok(Tangent { a, b })
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        Tangent { a: OneFormField::zeros(grid), b: PlusFormField::zeros(grid) }
    }

    pub fn random<R: Rng>(grid: TorusGrid, amplitude: f64, rng: &mut R) -> Self {
        let a = OneFormField::random(grid, amplitude, rng);
        let b = PlusFormField::random(grid, amplitude, rng);
        Tangent { a, b }
    }

    pub fn grid(&self) -> &TorusGrid {
        self.a.grid()
    }

    pub fn l2_norm(&self) -> f64 {
        InnerSpace::norm(self)
    }
}

impl InnerSpace for Tangent {
    fn dot(&self, other: &Self) -> f64 {
        self.a.dot(&other.a) + self.b.dot(&other.b)
    }
    fn axpy(&mut self, alpha: f64, x: &Self) {
        self.a.axpy(alpha, &x.a);
        self.b.axpy(alpha, &x.b);
    }
    fn scale(&mut self, s: f64) {
        self.a.scale(s);
        self.b.scale(s);
    }
    fn zeros_like(&self) -> Self {
        Tangent::zeros(*self.grid())
    }
}

/// `t⟨B,B⟩²B + τ[[B•B]•[B•B]]` at one site.
#[inline]
fn potential(p: &PerturbationParams, b: &GaugedForm) -> GaugedForm {
    let n2 = b.norm_sq();
    GaugedForm(b.0 * (p.t * n2 * n2)) + b.double_bracket().tau_apply(&p.tau)
}

/// Evaluates both equations, minus `target` when given.
pub fn residual(
    p: &PerturbationParams,
    c: &Configuration,
    target: Option<&Residual>,
) -> Result<Residual> {
    p.validate()?;
    let g = *c.grid();
    let mut r1 = d_a_plus(&c.a, &d_a_star_plus(&c.a, &c.b)?)?;
    r1.axpy(1.0, &PlusFormField::map_forms(g, |s| potential(p, &c.b.get(s))));
    let mut r2 = f_plus(&c.a);
    r2.axpy(0.125, &PlusFormField::map_forms(g, |s| c.b.get(s).self_dot_bracket()));
    if let Some(w) = target {
        g.ensure_same(w.grid())?;
        r1.axpy(-1.0, &w.r1);
        r2.axpy(-1.0, &w.r2);
    }
    Ok(Residual { r1, r2 })
}

/// The linearisation `d¹_{(A,B)}(a, b)` of [`residual`].
///
/// Row 1 differentiates every term of the first equation, including the
/// connection dependence of `d_A⁺` and `d_A^*`:
/// `d_A⁺d_A^*b + d_A⁺(a ⋆ B) + (a ∧ d_A^*B)⁺ + 4t|B|²⟨B,b⟩B + t|B|⁴b + 4τ[[b•B]•[B•B]]`.
/// Row 2 is `d_A⁺a + ¼[b•B]`.
pub fn d1_apply(p: &PerturbationParams, c: &Configuration, d: &Tangent) -> Result<Residual> {
    p.validate()?;
    c.a.same_grid(&d.a)?;
    c.b.same_grid(&d.b)?;
    let g = *c.grid();
    let w = d_a_star_plus(&c.a, &c.b)?;

    let mut r1 = d_a_plus(&c.a, &d_a_star_plus(&c.a, &d.b)?)?;
    r1.axpy(1.0, &d_a_plus(&c.a, &star_bracket(&d.a, &c.b)?)?);
    r1.axpy(1.0, &plus_bracket(&w, &d.a)?);
    r1.axpy(
        1.0,
        &PlusFormField::map_forms(g, |s| {
            let bb = c.b.get(s);
            let db = d.b.get(s);
            let n2 = bb.norm_sq();
            let quad = bb.self_dot_bracket();
            GaugedForm(bb.0 * (4.0 * p.t * n2 * bb.inner(&db)) + db.0 * (p.t * n2 * n2))
                + (db.dot_bracket(&bb).dot_bracket(&quad) * 4.0).tau_apply(&p.tau)
        }),
    );

    let mut r2 = d_a_plus(&c.a, &d.a)?;
    r2.axpy(0.25, &PlusFormField::map_forms(g, |s| d.b.get(s).dot_bracket(&c.b.get(s))));
    Ok(Residual { r1, r2 })
}

/// Derivative of [`residual`] in the parameters `(t, τ)` along `(δt, δτ)`.
pub fn d1_params_apply(c: &Configuration, dt: f64, dtau: &Matrix3<f64>) -> Residual {
    let g = *c.grid();
    let r1 = PlusFormField::map_forms(g, |s| {
        let b = c.b.get(s);
        let n2 = b.norm_sq();
        GaugedForm(b.0 * (dt * n2 * n2)) + b.double_bracket().tau_apply(dtau)
    });
    Residual { r1, r2: PlusFormField::zeros(g) }
}

/// The L² adjoint of [`d1_apply`]: `⟨d¹(a,b), (φ,ψ)⟩ = ⟨(a,b), d¹*(φ,ψ)⟩`.
pub fn d1_adjoint(p: &PerturbationParams, c: &Configuration, y: &Residual) -> Result<Tangent> {
    p.validate()?;
    c.a.same_grid(&y.r1)?;
    c.a.same_grid(&y.r2)?;
    let g = *c.grid();
    let (phi, psi) = (&y.r1, &y.r2);
    let w = d_a_star_plus(&c.a, &c.b)?;
    let dstar_phi = d_a_star_plus(&c.a, phi)?;

    let mut a = d_a_star_plus(&c.a, psi)?;
    a.axpy(1.0, &star_bracket_transpose(&dstar_phi, &c.b)?);
    a.axpy(1.0, &star_bracket(&w, phi)?);

    let mut b = d_a_plus(&c.a, &dstar_phi)?;
    let tau_t = p.tau.transpose();
    b.axpy(
        1.0,
        &PlusFormField::map_forms(g, |s| {
            let bb = c.b.get(s);
            let ph = phi.get(s);
            let n2 = bb.norm_sq();
            let quad = bb.self_dot_bracket();
            GaugedForm(bb.0 * (4.0 * p.t * n2 * bb.inner(&ph)) + ph.0 * (p.t * n2 * n2))
                + bb.dot_bracket(&quad.dot_bracket(&ph.tau_apply(&tau_t))) * 4.0
                + bb.dot_bracket(&psi.get(s)) * 0.25
        }),
    );
    Ok(Tangent { a, b })
}

/// `d⁰ξ = (d_A ξ, [B, ξ])`, the infinitesimal gauge action.
pub fn d0_apply(c: &Configuration, xi: &ScalarLieField) -> Result<Tangent> {
    Ok(Tangent { a: cov_d_scalar(&c.a, xi)?, b: bracket_plus_scalar(&c.b, xi)? })
}

/// `d⁰*(a, b) = d_A^*a + [b · B]`, the L² adjoint of [`d0_apply`].
pub fn d0_adjoint(c: &Configuration, d: &Tangent) -> Result<ScalarLieField> {
    d0_star(&c.a, &c.b, &d.a, &d.b)
}

/// `‖d¹(d⁰ξ) − ([r₁, ξ], [r₂, ξ])‖_{L²}` with `(r₁, r₂)` the untargeted residual.
///
/// Vanishes identically in the continuum by gauge equivariance; on the
/// lattice it measures the commutator of forward differences with brackets.
pub fn kuranishi_defect(p: &PerturbationParams, c: &Configuration, xi: &ScalarLieField) -> Result<f64> {
    let lhs = d1_apply(p, c, &d0_apply(c, xi)?)?;
    let rhs = residual(p, c, None)?.bracket_scalar(xi)?;
    let mut diff = lhs;
    diff.axpy(-1.0, &rhs);
    Ok(diff.l2_norm())
}

/// `½‖residual‖²_{L²}`.
pub fn energy(p: &PerturbationParams, c: &Configuration, target: Option<&Residual>) -> Result<f64> {
    Ok(0.5 * residual(p, c, target)?.l2_norm_sq())
}

/// L² gradient of [`energy`]: `d¹*(residual)`.
pub fn energy_gradient(
    p: &PerturbationParams,
    c: &Configuration,
    target: Option<&Residual>,
) -> Result<Tangent> {
    d1_adjoint(p, c, &residual(p, c, target)?)
}

/// Expected dimension `8κ − 3(1 − b₁ + b₂⁺)` of the moduli space.
pub fn index_formula(kappa: f64, b1: i64, b2plus: i64) -> i64 {
    (8.0 * kappa - 3.0 * (1 - b1 + b2plus) as f64).round() as i64
}

/// Whether `κ ≥ ⅜(1 − b₁ + b₂⁺)`.
pub fn index_hypothesis(kappa: f64, b1: i64, b2plus: i64) -> bool {
    8.0 * kappa >= 3.0 * (1 - b1 + b2plus) as f64
}
