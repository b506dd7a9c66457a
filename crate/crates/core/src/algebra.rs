//! Pointwise algebra of su(2)-valued self-dual 2-forms on R^4.
//!
//! The Lie algebra is carried in adjoint coordinates with respect to a basis
//! `η₁, η₂, η₃` satisfying `[η₁, η₂] = 2η₃` (and cyclic), orthonormal for
//! `⟨ξ, η⟩ = -½ tr(ξη)`. Self-dual forms use the basis
//!
//! ```text
//! σ¹ = e¹∧e² + e³∧e⁴,   σ² = e¹∧e³ + e⁴∧e²,   σ³ = e¹∧e⁴ + e²∧e³
//! ```
//!
//! with `σ^a · σ^b = 2δ_ab` and `σ¹ • σ² = -2σ³` (and cyclic). A [`GaugedForm`]
//! is a 3×3 matrix `M` whose entry `M[(a, j)]` is the coefficient of `η_a ⊗ σ^j`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{Matrix3, SMatrix, Vector3};

use crate::error::{Error, Result};

/// 9×9 real matrix acting on vectorized gauged forms.
pub type Matrix9 = SMatrix<f64, 9, 9>;

/// Default relative tolerance for [`GaugedForm::rank`].
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Prefactor of the spectral-norm majorant `λ_τ = LAMBDA_TAU_PREFACTOR · ‖τ‖₂`.
///
/// `1024 (S/3)^{3/2} · S / (2S)^{5/2}` with `S = B₁² + B₂² + B₃²`, i.e. `256 / (3√6)`.
pub const LAMBDA_TAU_PREFACTOR: f64 = 1024.0 / (5.196_152_422_706_632 * 5.656_854_249_492_381);

#[inline]
fn cross(u: [f64; 3], v: [f64; 3]) -> [f64; 3] {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

/// An element of su(2) in adjoint coordinates.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LieVector(pub [f64; 3]);

impl LieVector {
    pub const ZERO: LieVector = LieVector([0.0; 3]);

    pub fn basis(a: usize) -> Self {
        let mut v = [0.0; 3];
        v[a] = 1.0;
        LieVector(v)
    }

    /// `[u, v]` with `[η_a, η_b] = 2 ε_abc η_c`.
    #[inline]
    pub fn bracket(&self, other: &LieVector) -> LieVector {
        let c = cross(self.0, other.0);
        LieVector([2.0 * c[0], 2.0 * c[1], 2.0 * c[2]])
    }

    #[inline]
    pub fn dot(&self, other: &LieVector) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }
}

impl Add for LieVector {
    type Output = LieVector;
    fn add(self, o: LieVector) -> LieVector {
        LieVector([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl AddAssign for LieVector {
    fn add_assign(&mut self, o: LieVector) {
        for i in 0..3 {
            self.0[i] += o.0[i];
        }
    }
}

impl Sub for LieVector {
    type Output = LieVector;
    fn sub(self, o: LieVector) -> LieVector {
        LieVector([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for LieVector {
    type Output = LieVector;
    fn neg(self) -> LieVector {
        LieVector([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl Mul<f64> for LieVector {
    type Output = LieVector;
    fn mul(self, s: f64) -> LieVector {
        LieVector([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

/// A real self-dual 2-form on R^4 in the `σ` basis.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SelfDual2Form(pub [f64; 3]);

impl SelfDual2Form {
    pub fn basis(j: usize) -> Self {
        let mut v = [0.0; 3];
        v[j] = 1.0;
        SelfDual2Form(v)
    }

    /// The degree-lowering product `α • β`, using `σ^a • σ^b = -2 ε_abc σ^c`.
    pub fn dot_forms(&self, other: &SelfDual2Form) -> SelfDual2Form {
        let c = cross(self.0, other.0);
        SelfDual2Form([-2.0 * c[0], -2.0 * c[1], -2.0 * c[2]])
    }

    /// Exterior-algebra inner product `α · β`.
    pub fn inner(&self, other: &SelfDual2Form) -> f64 {
        2.0 * (self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2])
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self)
    }
}

/// Pointwise value of an su(2) ⊗ Λ^{2,+} section.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaugedForm(pub Matrix3<f64>);

/// Signed singular value decomposition `B = R · diag(d) · Sᵀ` with `R, S ∈ SO(3)`.
#[derive(Clone, Copy, Debug)]
pub struct NormalForm {
    pub r: Matrix3<f64>,
    pub s: Matrix3<f64>,
    pub d: [f64; 3],
}

impl NormalForm {
    pub fn reconstruct(&self) -> GaugedForm {
        GaugedForm(self.r * Matrix3::from_diagonal(&Vector3::from(self.d)) * self.s.transpose())
    }
}

impl Default for GaugedForm {
    fn default() -> Self {
        GaugedForm::zero()
    }
}

impl GaugedForm {
    pub fn zero() -> Self {
        GaugedForm(Matrix3::zeros())
    }

    pub fn diag(d1: f64, d2: f64, d3: f64) -> Self {
        GaugedForm(Matrix3::from_diagonal(&Vector3::new(d1, d2, d3)))
    }

    /// `η_a ⊗ σ^j`.
    pub fn basis(a: usize, j: usize) -> Self {
        let mut m = Matrix3::zeros();
        m[(a, j)] = 1.0;
        GaugedForm(m)
    }

    pub fn from_row_major(v: &[f64]) -> Self {
        GaugedForm(Matrix3::from_row_slice(&v[..9]))
    }

    pub fn to_row_major(&self) -> [f64; 9] {
        let m = &self.0;
        [
            m[(0, 0)], m[(0, 1)], m[(0, 2)],
            m[(1, 0)], m[(1, 1)], m[(1, 2)],
            m[(2, 0)], m[(2, 1)], m[(2, 2)],
        ]
    }

    /// Lie-algebra coefficient of `σ^j`.
    pub fn column(&self, j: usize) -> LieVector {
        LieVector([self.0[(0, j)], self.0[(1, j)], self.0[(2, j)]])
    }

    pub fn from_columns(cols: [LieVector; 3]) -> Self {
        let mut m = Matrix3::zeros();
        for (j, c) in cols.iter().enumerate() {
            for a in 0..3 {
                m[(a, j)] = c.0[a];
            }
        }
        GaugedForm(m)
    }

    /// `⟨B, Ψ⟩ = 2 Σ B[a][j] Ψ[a][j]`.
    #[inline]
    pub fn inner(&self, other: &GaugedForm) -> f64 {
        2.0 * self.0.dot(&other.0)
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `[B • Ψ][c][l] = -4 ε_abc ε_jkl B[a][j] Ψ[b][k]`.
    pub fn dot_bracket(&self, other: &GaugedForm) -> GaugedForm {
        let b = &self.0;
        let p = &other.0;
        let mut out = Matrix3::zeros();
        for c in 0..3 {
            let (c1, c2) = ((c + 1) % 3, (c + 2) % 3);
            for l in 0..3 {
                let (l1, l2) = ((l + 1) % 3, (l + 2) % 3);
                let mixed = b[(c1, l1)] * p[(c2, l2)] - b[(c1, l2)] * p[(c2, l1)]
                    - b[(c2, l1)] * p[(c1, l2)]
                    + b[(c2, l2)] * p[(c1, l1)];
                out[(c, l)] = -4.0 * mixed;
            }
        }
        GaugedForm(out)
    }

    /// Cofactor matrix: `cof[c][l] = B[c+1][l+1] B[c+2][l+2] - B[c+1][l+2] B[c+2][l+1]`.
    pub fn cofactor(&self) -> Matrix3<f64> {
        let b = &self.0;
        Matrix3::from_fn(|c, l| {
            let (c1, c2) = ((c + 1) % 3, (c + 2) % 3);
            let (l1, l2) = ((l + 1) % 3, (l + 2) % 3);
            b[(c1, l1)] * b[(c2, l2)] - b[(c1, l2)] * b[(c2, l1)]
        })
    }

    /// `[B • B] = -8 cof(B)`.
    pub fn self_dot_bracket(&self) -> GaugedForm {
        GaugedForm(self.cofactor() * -8.0)
    }

    /// `[[B • B] • [B • B]] = -512 det(B) B`, using `cof(cof B) = det(B) B`.
    pub fn double_bracket(&self) -> GaugedForm {
        GaugedForm(self.0 * (-512.0 * self.0.determinant()))
    }

    /// `[b · B] ∈ su(2)`: contraction of the form indices with `σ^j·σ^k = 2δ_jk`.
    pub fn scalar_dot_pair(&self, other: &GaugedForm) -> LieVector {
        let mut out = [0.0; 3];
        for j in 0..3 {
            let c = cross(self.column(j).0, other.column(j).0);
            for i in 0..3 {
                out[i] += 4.0 * c[i];
            }
        }
        LieVector(out)
    }

    /// `[B, ξ]` acting on the Lie index.
    pub fn lie_bracket(&self, xi: &LieVector) -> GaugedForm {
        GaugedForm::from_columns([
            self.column(0).bracket(xi),
            self.column(1).bracket(xi),
            self.column(2).bracket(xi),
        ])
    }

    /// `τ` acting on the form index: `(τΨ)[a][l] = Σ_j Ψ[a][j] τ[j][l]`.
    #[inline]
    pub fn tau_apply(&self, tau: &Matrix3<f64>) -> GaugedForm {
        GaugedForm(self.0 * tau)
    }

    /// Gauge/frame action `B ↦ R B Sᵀ`.
    pub fn rotate(&self, r: &Matrix3<f64>, s: &Matrix3<f64>) -> GaugedForm {
        GaugedForm(r * self.0 * s.transpose())
    }

    pub fn singular_values(&self) -> [f64; 3] {
        let sv = self.0.singular_values();
        let mut v = [sv[0], sv[1], sv[2]];
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    pub fn svd_normal_form(&self) -> NormalForm {
        let svd = self.0.svd(true, true);
        let u = svd.u.expect("u requested");
        let v = svd.v_t.expect("v_t requested").transpose();
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
        let mut r = Matrix3::zeros();
        let mut s = Matrix3::zeros();
        let mut d = [0.0; 3];
        for (k, &i) in order.iter().enumerate() {
            r.set_column(k, &u.column(i));
            s.set_column(k, &v.column(i));
            d[k] = svd.singular_values[i];
        }
        if r.determinant() < 0.0 {
            r.column_mut(2).neg_mut();
            d[2] = -d[2];
        }
        if s.determinant() < 0.0 {
            s.column_mut(2).neg_mut();
            d[2] = -d[2];
        }
        NormalForm { r, s, d }
    }

    /// Number of singular values above `tol` times the largest one.
    pub fn rank(&self, tol: f64) -> usize {
        let sv = self.singular_values();
        if sv[0] == 0.0 {
            return 0;
        }
        sv.iter().filter(|&&s| s > tol * sv[0]).count()
    }

    /// Matrix of `ψ ↦ [B • ψ]` on row-major vectorized gauged forms.
    pub fn m_b_matrix(&self) -> Matrix9 {
        let b = &self.0;
        let mut m = Matrix9::zeros();
        for c in 0..3 {
            for l in 0..3 {
                for bb in 0..3 {
                    for k in 0..3 {
                        let mut acc = 0.0;
                        for a in 0..3 {
                            let e1 = levi_civita(a, bb, c);
                            if e1 == 0.0 {
                                continue;
                            }
                            for j in 0..3 {
                                acc += e1 * levi_civita(j, k, l) * b[(a, j)];
                            }
                        }
                        m[(3 * c + l, 3 * bb + k)] = -4.0 * acc;
                    }
                }
            }
        }
        m
    }

    pub fn m_b_singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self.m_b_matrix().singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// Dimension of the kernel of `M_B`, counting singular values `<= tol · σ_max`.
    pub fn m_b_kernel_dim(&self, tol: f64) -> usize {
        let sv = self.m_b_singular_values();
        if sv[0] == 0.0 {
            return 9;
        }
        sv.iter().filter(|&&s| s <= tol * sv[0]).count()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    /// Nine little-endian float64 values, row-major.
    pub fn to_le_bytes(&self) -> [u8; 72] {
        let mut out = [0u8; 72];
        for (i, v) in self.to_row_major().iter().enumerate() {
            out[8 * i..8 * i + 8].copy_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_le_bytes(bytes: &[u8; 72]) -> Self {
        let mut v = [0.0; 9];
        for (i, x) in v.iter_mut().enumerate() {
            *x = f64::from_le_bytes(bytes[8 * i..8 * i + 8].try_into().unwrap());
        }
        GaugedForm::from_row_major(&v)
    }
}

impl Add for GaugedForm {
    type Output = GaugedForm;
    fn add(self, o: GaugedForm) -> GaugedForm {
        GaugedForm(self.0 + o.0)
    }
}

impl Sub for GaugedForm {
    type Output = GaugedForm;
    fn sub(self, o: GaugedForm) -> GaugedForm {
        GaugedForm(self.0 - o.0)
    }
}

impl Mul<f64> for GaugedForm {
    type Output = GaugedForm;
    fn mul(self, s: f64) -> GaugedForm {
        GaugedForm(self.0 * s)
    }
}

impl Neg for GaugedForm {
    type Output = GaugedForm;
    fn neg(self) -> GaugedForm {
        GaugedForm(-self.0)
    }
}

pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Closed form `2 B₁₁ B₂₂ B₃₃` of the diagonal block of `M_B` for a normal-form `B`.
pub fn diagonal_block_determinant(b: &GaugedForm) -> Result<f64> {
    let m = &b.0;
    let off = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .map(|(i, j)| m[(i, j)].abs())
        .fold(0.0, f64::max);
    if off != 0.0 {
        return Err(Error::NotDiagonal(off));
    }
    Ok(2.0 * m[(0, 0)] * m[(1, 1)] * m[(2, 2)])
}

/// Constant `λ_τ ≥ 0` with `-⟨B, τ[[B•B]•[B•B]]⟩ ≤ λ_τ |B|⁵` for every `B`.
pub fn lambda_tau(tau: &Matrix3<f64>) -> f64 {
    LAMBDA_TAU_PREFACTOR * spectral_norm(tau)
}

pub fn spectral_norm(m: &Matrix3<f64>) -> f64 {
    m.singular_values().max()
}

/// Perturbation pair `(t, τ)` with `t > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbationParams {
    pub t: f64,
    pub tau: Matrix3<f64>,
}

impl PerturbationParams {
    pub fn new(t: f64, tau: Matrix3<f64>) -> Result<Self> {
        let p = PerturbationParams { t, tau };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t > 0.0) || !self.t.is_finite() {
            return Err(Error::InvalidParameter(format!("t must be positive, got {}", self.t)));
        }
        if self.tau.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("tau has non-finite entries".into()));
        }
        Ok(())
    }

    /// Checks that `τ` lies in GL(Λ^{2,+}), i.e. `|det τ| > tol`.
    pub fn check_invertible(&self, tol: f64) -> Result<()> {
        let det = self.tau.determinant();
        if det.abs() > tol {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("tau is not invertible (det = {det:e})")))
        }
    }

    pub fn lambda_tau(&self) -> f64 {
        lambda_tau(&self.tau)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn sigma_products() {
        let s1 = SelfDual2Form::basis(0);
        let s2 = SelfDual2Form::basis(1);
        assert_eq!(s1.dot_forms(&s2).0, [0.0, 0.0, -2.0]);
        assert_eq!(s1.dot_forms(&s1).0, [0.0; 3]);
        assert_eq!(s1.norm_sq(), 2.0);
    }

    #[test]
    fn eta_bracket_table() {
        let e = LieVector::basis;
        assert_eq!(e(0).bracket(&e(1)), e(2) * 2.0);
        assert_eq!(e(1).bracket(&e(2)), e(0) * 2.0);
        assert_eq!(e(2).bracket(&e(0)), e(1) * 2.0);
    }

    #[test]
    fn diagonal_formulas() {
        let (b1, b2, b3) = (1.3, -0.7, 2.1);
        let b = GaugedForm::diag(b1, b2, b3);
        let s = b.dot_bracket(&b);
        let expect = GaugedForm::diag(-8.0 * b2 * b3, -8.0 * b3 * b1, -8.0 * b1 * b2);
        assert!((s.0 - expect.0).norm() < 1e-12);
        let d = b.double_bracket();
        let expect = GaugedForm::diag(
            -512.0 * b1 * b1 * b2 * b3,
            -512.0 * b1 * b2 * b2 * b3,
            -512.0 * b1 * b2 * b3 * b3,
        );
        assert!((d.0 - expect.0).norm() < 1e-10);
        assert_eq!(GaugedForm::diag(1.0, 1.0, 1.0).self_dot_bracket(), GaugedForm::diag(-8.0, -8.0, -8.0));
    }

    #[test]
    fn inner_examples() {
        let b = GaugedForm::diag(1.0, 2.0, 3.0);
        assert_eq!(b.inner(&b), 28.0);
        assert_eq!(b.inner(&GaugedForm::zero()), 0.0);
    }

    #[test]
    fn scalar_dot_pair_example() {
        let b = GaugedForm::basis(0, 0);
        let bb = GaugedForm::basis(1, 0);
        assert_eq!(b.scalar_dot_pair(&bb), LieVector([0.0, 0.0, 4.0]));
        assert_eq!(bb.scalar_dot_pair(&bb), LieVector::ZERO);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(GaugedForm::diag(1.0, 1.0, 1.0).rank(DEFAULT_RANK_TOL), 3);
        assert_eq!(GaugedForm::diag(1.0, 1.0, 0.0).rank(DEFAULT_RANK_TOL), 2);
        assert_eq!(GaugedForm::zero().rank(DEFAULT_RANK_TOL), 0);
        let single = GaugedForm::basis(1, 2) * 3.0;
        assert_eq!(single.self_dot_bracket(), GaugedForm::zero());
    }

    #[test]
    fn svd_of_diagonal_and_rank_one() {
        let nf = GaugedForm::diag(3.0, 2.0, 1.0).svd_normal_form();
        assert!((nf.d[0] - 3.0).abs() < 1e-12 && (nf.d[1] - 2.0).abs() < 1e-12);
        assert!((nf.d[2].abs() - 1.0).abs() < 1e-12);
        assert!((nf.reconstruct().0 - GaugedForm::diag(3.0, 2.0, 1.0).0).norm() < 1e-12);

        let mut m = Matrix3::zeros();
        m[(0, 1)] = 3.0;
        m[(2, 1)] = 4.0;
        let nf = GaugedForm(m).svd_normal_form();
        assert!(close(nf.d[0].abs(), 5.0, 1e-12));
        assert!(nf.d[1].abs() < 1e-12 && nf.d[2].abs() < 1e-12);
        assert!((nf.r.determinant() - 1.0).abs() < 1e-12);
        assert!((nf.s.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_block_examples() {
        assert_eq!(diagonal_block_determinant(&GaugedForm::diag(1.0, 2.0, 3.0)).unwrap(), 12.0);
        assert_eq!(diagonal_block_determinant(&GaugedForm::diag(1.0, 1.0, 0.0)).unwrap(), 0.0);
        let mut b = GaugedForm::diag(1.0, 2.0, 3.0);
        b.0[(0, 2)] = 0.5;
        assert!(matches!(diagonal_block_determinant(&b), Err(Error::NotDiagonal(_))));
    }

    #[test]
    fn m_b_edge_cases() {
        assert_eq!(GaugedForm::zero().m_b_matrix(), Matrix9::zeros());
        assert_eq!(GaugedForm::zero().m_b_kernel_dim(1e-10), 9);
        assert_eq!(GaugedForm::diag(1.0, 1.0, 0.0).m_b_kernel_dim(1e-10), 3);
        assert_eq!(GaugedForm::diag(1.0, 2.0, 3.0).m_b_kernel_dim(1e-10), 0);
    }

    #[test]
    fn tau_examples() {
        let psi = GaugedForm::diag(1.0, -2.0, 0.5);
        assert_eq!(psi.tau_apply(&Matrix3::identity()), psi);
        let tau = Matrix3::from_diagonal(&Vector3::new(2.0, 3.0, -1.0));
        assert_eq!(psi.tau_apply(&tau), GaugedForm::diag(2.0, -6.0, -0.5));
        assert_eq!(lambda_tau(&Matrix3::zeros()), 0.0);
        assert!(close(LAMBDA_TAU_PREFACTOR, 256.0 / (3.0 * 6f64.sqrt()), 1e-15));
    }

    #[test]
    fn serialization_is_row_major_le() {
        let mut b = GaugedForm::zero();
        b.0[(0, 1)] = 1.5;
        let bytes = b.to_le_bytes();
        assert_eq!(&bytes[8..16], &1.5f64.to_le_bytes());
        assert_eq!(GaugedForm::from_le_bytes(&bytes), b);
    }

    #[test]
    fn params_validation() {
        assert!(PerturbationParams::new(0.0, Matrix3::identity()).is_err());
        assert!(PerturbationParams::new(-1.0, Matrix3::identity()).is_err());
        let p = PerturbationParams::new(1.0, Matrix3::zeros()).unwrap();
        assert!(p.check_invertible(1e-12).is_err());
    }
}
