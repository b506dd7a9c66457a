//! First-order gauge operators on the periodic lattice.
//!
//! Exterior derivatives use forward differences `D_μ f(x) = (f(x+μ̂) - f(x))/h`
//! with bracket terms evaluated at the base site. Every `*`-operator here is
//! the exact transpose of its forward counterpart for the `h⁴`-weighted L²
//! inner products, so adjoint identities hold to rounding.

use std::f64::consts::PI;

use crate::algebra::LieVector;
use crate::error::Result;

use super::field::{
    ConnectionField, Field, OneFormField, PlusFormField, ScalarLieField, TwoFormField,
};
use super::grid::TorusGrid;
use super::reduce;

/// Ordered pairs `(μ, ν)`, `μ < ν`, indexing 2-form components.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// `(j, sign)` such that `e^μ∧e^ν` carries `sign · σ^j` after self-dual projection.
///
/// `σ¹ = e¹²+e³⁴`, `σ² = e¹³-e²⁴`, `σ³ = e¹⁴+e²³` (zero-based indices below).
const SD: [[(usize, f64); 4]; 4] = {
    let z = (0, 0.0);
    [
        [z, (0, 1.0), (1, 1.0), (2, 1.0)],
        [(0, -1.0), z, (2, 1.0), (1, -1.0)],
        [(1, -1.0), (2, -1.0), z, (0, 1.0)],
        [(2, -1.0), (1, 1.0), (0, -1.0), z],
    ]
};

/// Same table for the anti-self-dual basis `e¹²-e³⁴, e¹³+e²⁴, e¹⁴-e²³`.
const ASD: [[(usize, f64); 4]; 4] = {
    let z = (0, 0.0);
    [
        [z, (0, 1.0), (1, 1.0), (2, 1.0)],
        [(0, -1.0), z, (2, -1.0), (1, 1.0)],
        [(1, -1.0), (2, 1.0), z, (0, -1.0)],
        [(2, -1.0), (1, -1.0), (0, 1.0), z],
    ]
};

#[inline]
fn lie_at(data: &[f64], site: usize, mu: usize) -> LieVector {
    let o = 12 * site + 3 * mu;
    LieVector([data[o], data[o + 1], data[o + 2]])
}

#[inline]
fn scalar_at(data: &[f64], site: usize) -> LieVector {
    LieVector([data[3 * site], data[3 * site + 1], data[3 * site + 2]])
}

#[inline]
fn write_lie(out: &mut [f64], mu: usize, v: LieVector) {
    out[3 * mu..3 * mu + 3].copy_from_slice(&v.0);
}

/// `G_μν` of the 2-form `Σ_j B_j σ^j`.
#[inline]
fn embed(cols: &[LieVector; 3], mu: usize, nu: usize) -> LieVector {
    let (j, s) = SD[mu][nu];
    cols[j] * s
}

#[inline]
fn columns(b: &PlusFormField, site: usize) -> [LieVector; 3] {
    let v = b.site(site);
    [
        LieVector([v[0], v[3], v[6]]),
        LieVector([v[1], v[4], v[7]]),
        LieVector([v[2], v[5], v[8]]),
    ]
}

#[inline]
fn write_columns(out: &mut [f64], cols: &[LieVector; 3]) {
    for j in 0..3 {
        for a in 0..3 {
            out[3 * a + j] = cols[j].0[a];
        }
    }
}

/// Self-dual projection of the six components `F_μν`, `μ < ν`.
#[inline]
fn project_plus(f: &[LieVector; 6]) -> [LieVector; 3] {
    let mut c = [LieVector::ZERO; 3];
    for (k, &(mu, nu)) in PAIRS.iter().enumerate() {
        let (j, s) = SD[mu][nu];
        c[j] += f[k] * (0.5 * s);
    }
    c
}

#[inline]
fn project_minus(f: &[LieVector; 6]) -> [LieVector; 3] {
    let mut c = [LieVector::ZERO; 3];
    for (k, &(mu, nu)) in PAIRS.iter().enumerate() {
        let (j, s) = ASD[mu][nu];
        c[j] += f[k] * (0.5 * s);
    }
    c
}

/// `d_A ξ = D_μ ξ + [A_μ, ξ]`.
pub fn cov_d_scalar(a: &ConnectionField, xi: &ScalarLieField) -> Result<OneFormField> {
    a.same_grid(xi)?;
    let g = *a.grid();
    let inv_h = 1.0 / g.h;
    let (ad, xd) = (a.data(), xi.data());
    Ok(Field::from_sites(g, |s, out| {
        let x0 = scalar_at(xd, s);
        for mu in 0..4 {
            let x1 = scalar_at(xd, g.forward(s, mu));
            let v = (x1 - x0) * inv_h + lie_at(ad, s, mu).bracket(&x0);
            write_lie(out, mu, v);
        }
    }))
}

/// `d_A^* a`, the transpose of [`cov_d_scalar`]: `-Σ_μ (∇_μ a_μ + [A_μ, a_μ])`
/// with backward differences `∇_μ`.
pub fn cov_d_scalar_adjoint(a: &ConnectionField, w: &OneFormField) -> Result<ScalarLieField> {
    a.same_grid(w)?;
    let g = *a.grid();
    let inv_h = 1.0 / g.h;
    let (ad, wd) = (a.data(), w.data());
    Ok(Field::from_sites(g, |s, out| {
        let mut acc = LieVector::ZERO;
        for mu in 0..4 {
            let here = lie_at(wd, s, mu);
            let back = lie_at(wd, g.backward(s, mu), mu);
            acc += (here - back) * (-inv_h);
            acc += lie_at(ad, s, mu).bracket(&here) * -1.0;
        }
        out.copy_from_slice(&acc.0);
    }))
}

/// Pointwise `[w_μ, a_ν] - [w_ν, a_μ]` projected to Λ^{2,+}.
fn plus_bracket_raw(g: TorusGrid, w: &[f64], a: &[f64]) -> PlusFormField {
    Field::from_sites(g, |s, out| {
        let mut f = [LieVector::ZERO; 6];
        for (k, &(mu, nu)) in PAIRS.iter().enumerate() {
            f[k] = lie_at(w, s, mu).bracket(&lie_at(a, s, nu))
                - lie_at(w, s, nu).bracket(&lie_at(a, s, mu));
        }
        write_columns(out, &project_plus(&f));
    })
}

/// Pointwise `-Σ_μ [w_μ, G_μν(B)]`: the bracket part of `d_w^*` on Λ^{2,+}.
fn star_bracket_raw(g: TorusGrid, w: &[f64], b: &PlusFormField) -> OneFormField {
    Field::from_sites(g, |s, out| {
        let cols = columns(b, s);
        for nu in 0..4 {
            let mut acc = LieVector::ZERO;
            for mu in 0..4 {
                if mu != nu {
                    acc += lie_at(w, s, mu).bracket(&embed(&cols, mu, nu));
                }
            }
            write_lie(out, nu, acc * -1.0);
        }
    })
}

/// Bracket part of [`d_a_plus`] with the connection replaced by the 1-form `w`.
///
/// Symmetric in its arguments: `plus_bracket(w, a) = plus_bracket(a, w)`.
pub fn plus_bracket(w: &OneFormField, a: &OneFormField) -> Result<PlusFormField> {
    w.same_grid(a)?;
    Ok(plus_bracket_raw(*w.grid(), w.data(), a.data()))
}

/// Bracket part of [`d_a_star_plus`] with connection `w`; the transpose of
/// `a ↦ plus_bracket(w, a)`.
pub fn star_bracket(w: &OneFormField, b: &PlusFormField) -> Result<OneFormField> {
    w.same_grid(b)?;
    Ok(star_bracket_raw(*w.grid(), w.data(), b))
}

/// Transpose of `w ↦ star_bracket(w, b)`: `(·)_μ = Σ_ν [β_ν, G_μν(B)]`.
pub fn star_bracket_transpose(beta: &OneFormField, b: &PlusFormField) -> Result<OneFormField> {
    beta.same_grid(b)?;
    let g = *b.grid();
    let bd = beta.data();
    Ok(Field::from_sites(g, |s, out| {
        let cols = columns(b, s);
        for mu in 0..4 {
            let mut acc = LieVector::ZERO;
            for nu in 0..4 {
                if mu != nu {
                    acc += lie_at(bd, s, nu).bracket(&embed(&cols, mu, nu));
                }
            }
            write_lie(out, mu, acc);
        }
    }))
}

/// `d_A^+ a`: forward-difference covariant exterior derivative, projected by ½(1+*).
pub fn d_a_plus(a: &ConnectionField, w: &OneFormField) -> Result<PlusFormField> {
    a.same_grid(w)?;
    let g = *a.grid();
    let inv_h = 1.0 / g.h;
    let (ad, wd) = (a.data(), w.data());
    Ok(Field::from_sites(g, |s, out| {
        let mut f = [LieVector::ZERO; 6];
        for (k, &(mu, nu)) in PAIRS.iter().enumerate() {
            let d_mu_w_nu = (lie_at(wd, g.forward(s, mu), nu) - lie_at(wd, s, nu)) * inv_h;
            let d_nu_w_mu = (lie_at(wd, g.forward(s, nu), mu) - lie_at(wd, s, mu)) * inv_h;
            f[k] = d_mu_w_nu - d_nu_w_mu + lie_at(ad, s, mu).bracket(&lie_at(wd, s, nu))
                - lie_at(ad, s, nu).bracket(&lie_at(wd, s, mu));
        }
        write_columns(out, &project_plus(&f));
    }))
}

/// `d_A^* B` on Λ^{2,+}, defined as the L² transpose of [`d_a_plus`]:
/// `(d_A^* B)_ν = -Σ_μ (∇_μ G_μν + [A_μ, G_μν])`.
pub fn d_a_star_plus(a: &ConnectionField, b: &PlusFormField) -> Result<OneFormField> {
    a.same_grid(b)?;
    let g = *a.grid();
    let inv_h = 1.0 / g.h;
    let ad = a.data();
    Ok(Field::from_sites(g, |s, out| {
        let here = columns(b, s);
        let back: [[LieVector; 3]; 4] = std::array::from_fn(|mu| columns(b, g.backward(s, mu)));
        for nu in 0..4 {
            let mut acc = LieVector::ZERO;
            for mu in 0..4 {
                if mu == nu {
                    continue;
                }
                let g_here = embed(&here, mu, nu);
                let g_back = embed(&back[mu], mu, nu);
                acc += (g_here - g_back) * (-inv_h);
                acc += lie_at(ad, s, mu).bracket(&g_here) * -1.0;
            }
            write_lie(out, nu, acc);
        }
    }))
}

/// `F_μν = D_μ A_ν - D_ν A_μ + [A_μ, A_ν]`, six components per site.
pub fn curvature(a: &ConnectionField) -> TwoFormField {
    let g = *a.grid();
    let inv_h = 1.0 / g.h;
    let ad = a.data();
    Field::from_sites(g, |s, out| {
        for (k, &(mu, nu)) in PAIRS.iter().enumerate() {
            let a_mu = lie_at(ad, s, mu);
            let a_nu = lie_at(ad, s, nu);
            let f = (lie_at(ad, g.forward(s, mu), nu) - a_nu) * inv_h
                - (lie_at(ad, g.forward(s, nu), mu) - a_mu) * inv_h
                + a_mu.bracket(&a_nu);
            out[3 * k..3 * k + 3].copy_from_slice(&f.0);
        }
    })
}

fn pairs_at(f: &TwoFormField, s: usize) -> [LieVector; 6] {
    std::array::from_fn(|k| f.pair(s, k))
}

/// Self-dual part of a 2-form field in the `σ` basis.
pub fn self_dual_part(f: &TwoFormField) -> PlusFormField {
    Field::from_sites(*f.grid(), |s, out| write_columns(out, &project_plus(&pairs_at(f, s))))
}

/// Anti-self-dual part in the basis `e¹²-e³⁴, e¹³+e²⁴, e¹⁴-e²³` (same pointwise metric).
pub fn anti_self_dual_part(f: &TwoFormField) -> PlusFormField {
    Field::from_sites(*f.grid(), |s, out| write_columns(out, &project_minus(&pairs_at(f, s))))
}

/// `F_A^+`.
pub fn f_plus(a: &ConnectionField) -> PlusFormField {
    self_dual_part(&curvature(a))
}

/// Squared L² norms of `F`, `F⁺` and `F⁻`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureNorms {
    pub full: f64,
    pub plus: f64,
    pub minus: f64,
}

pub fn curvature_norms(a: &ConnectionField) -> CurvatureNorms {
    let f = curvature(a);
    CurvatureNorms {
        full: f.l2_norm_sq(),
        plus: self_dual_part(&f).l2_norm_sq(),
        minus: anti_self_dual_part(&f).l2_norm_sq(),
    }
}

/// Discrete Chern-Weil number from the wedge density
/// `F∧F ∝ ⟨F₁₂,F₃₄⟩ - ⟨F₁₃,F₂₄⟩ + ⟨F₁₄,F₂₃⟩`, normalised so that
/// `8π² κ = ‖F⁻‖² - ‖F⁺‖²`.
pub fn chern_weil(a: &ConnectionField) -> f64 {
    let f = curvature(a);
    let g = *a.grid();
    let density = reduce::sum_by(g.sites(), |s| {
        let p = f.pair(s, 0).dot(&f.pair(s, 5)) - f.pair(s, 1).dot(&f.pair(s, 4))
            + f.pair(s, 2).dot(&f.pair(s, 3));
        -2.0 * p
    });
    g.cell() * density / (8.0 * PI * PI)
}

/// `d^{0,*}(a, b) = d_A^* a + [b · B]`.
pub fn d0_star(
    a: &ConnectionField,
    b: &PlusFormField,
    w: &OneFormField,
    beta: &PlusFormField,
) -> Result<ScalarLieField> {
    a.same_grid(b)?;
    beta.same_grid(b)?;
    let mut out = cov_d_scalar_adjoint(a, w)?;
    let g = *a.grid();
    let pair = ScalarLieField::map_lie(g, |s| beta.get(s).scalar_dot_pair(&b.get(s)));
    out.axpy(1.0, &pair);
    Ok(out)
}

/// Pointwise `[B, ξ]` on the Lie index.
pub fn bracket_plus_scalar(b: &PlusFormField, xi: &ScalarLieField) -> Result<PlusFormField> {
    b.same_grid(xi)?;
    Ok(PlusFormField::map_forms(*b.grid(), |s| b.get(s).lie_bracket(&xi.lie(s))))
}
