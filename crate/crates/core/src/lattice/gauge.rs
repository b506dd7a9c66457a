//! Gauge fixing and finite gauge transformations.

use nalgebra::{Matrix3, Vector3};

use super::field::{ConnectionField, OneFormField, PlusFormField, ScalarLieField};
use super::grid::TorusGrid;
use super::ops::{cov_d_scalar, cov_d_scalar_adjoint};
use crate::algebra::{GaugedForm, LieVector};
use crate::error::{Error, Result};
use crate::linalg::conjugate_gradient;

/// Relative CG tolerance of the Poisson solve in [`coulomb_project`].
pub const POISSON_TOL: f64 = 1e-13;

/// Tolerance on `‖RᵀR - I‖` accepted by [`RotationField::new`].
pub const ROTATION_TOL: f64 = 1e-8;

/// Removes the gradient part of `a` at the trivial connection: returns
/// `a - dφ` with `d^*dφ = d^*a`, so that `d^*` of the result vanishes.
pub fn coulomb_project(a: &OneFormField) -> Result<OneFormField> {
    let g = *a.grid();
    let zero = ConnectionField::zeros(g);
    let mut rhs = cov_d_scalar_adjoint(&zero, a)?;
    // The Laplacian annihilates constants; remove their rounding-level share.
    let sites = g.sites() as f64;
    let mut mean = [0.0; 3];
    for s in 0..g.sites() {
        for (m, v) in mean.iter_mut().zip(rhs.site(s)) {
            *m += v / sites;
        }
    }
    for s in 0..g.sites() {
        for (v, m) in rhs.site_mut(s).iter_mut().zip(mean) {
            *v -= m;
        }
    }
    // ‖d^*‖ ≤ 4/h, so anything below this is already divergence-free to rounding.
    if rhs.l2_norm() <= POISSON_TOL * 4.0 / g.h * a.l2_norm() {
        return Ok(a.clone());
    }
    let laplacian = |phi: &ScalarLieField| {
        let d = cov_d_scalar(&zero, phi).expect("same grid");
        cov_d_scalar_adjoint(&zero, &d).expect("same grid")
    };
    let max_iter = 50 * g.n * g.n + 200;
    let (phi, out) = conjugate_gradient(laplacian, &rhs, POISSON_TOL, max_iter);
    if !out.converged {
        return Err(Error::NotConverged {
            what: "Coulomb Poisson solve",
            iterations: out.iterations,
            residual: out.relative_residual,
        });
    }
    let dphi = cov_d_scalar(&zero, &phi)?;
    Ok(a.plus(-1.0, &dphi))
}

/// Per-site SO(3) rotations acting on the Lie index in adjoint coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationField {
    grid: TorusGrid,
    data: Vec<Matrix3<f64>>,
}

/// `exp(ad_ξ)` for `ad_ξ v = [ξ, v] = 2 ξ × v`.
pub fn exp_adjoint(xi: &LieVector) -> Matrix3<f64> {
    let w = Vector3::from(xi.0) * 2.0;
    nalgebra::Rotation3::new(w).into_inner()
}

/// Inverse of [`exp_adjoint`] for rotations away from angle π.
pub fn log_adjoint(r: &Matrix3<f64>) -> LieVector {
    let cos = ((r.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
    let theta = cos.acos();
    let k = if theta < 1e-6 { 0.5 + theta * theta / 12.0 } else { theta / (2.0 * theta.sin()) };
    let m = (r - r.transpose()) * k;
    // m = [w]_×, and ad_ξ = 2[ξ]_×
    LieVector([m[(2, 1)] * 0.5, m[(0, 2)] * 0.5, m[(1, 0)] * 0.5])
}

impl RotationField {
    pub fn new(grid: TorusGrid, data: Vec<Matrix3<f64>>) -> Result<Self> {
        if data.len() != grid.sites() {
            return Err(Error::Format(format!(
                "rotation field needs {} sites, got {}",
                grid.sites(),
                data.len()
            )));
        }
        for (site, r) in data.iter().enumerate() {
            let dev = (r.transpose() * r - Matrix3::identity()).norm();
            if !(dev <= ROTATION_TOL) || r.determinant() <= 0.0 {
                return Err(Error::NotRotation { site, deviation: dev });
            }
        }
        Ok(RotationField { grid, data })
    }

    pub fn identity(grid: TorusGrid) -> Self {
        RotationField { grid, data: vec![Matrix3::identity(); grid.sites()] }
    }

    pub fn constant(grid: TorusGrid, r: Matrix3<f64>) -> Result<Self> {
        RotationField::new(grid, vec![r; grid.sites()])
    }

    /// Pointwise `exp(ad_ξ(x))`.
    pub fn from_exp(xi: &ScalarLieField) -> Self {
        let grid = *xi.grid();
        RotationField { grid, data: (0..grid.sites()).map(|s| exp_adjoint(&xi.lie(s))).collect() }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn at(&self, site: usize) -> &Matrix3<f64> {
        &self.data[site]
    }

    /// `B(x) ↦ R(x)ᵀ B(x)` on the Lie index.
    pub fn act_plus(&self, b: &PlusFormField) -> Result<PlusFormField> {
        self.grid.ensure_same(b.grid())?;
        Ok(PlusFormField::map_forms(self.grid, |s| GaugedForm(self.data[s].transpose() * b.get(s).0)))
    }
}

/// Finite gauge transformation in adjoint coordinates:
/// `B ↦ RᵀB`, `A_μ ↦ RᵀA_μ + (1/h)·log(R(x)ᵀR(x+μ̂))`.
pub fn gauge_transform_finite(
    r: &RotationField,
    a: &ConnectionField,
    b: &PlusFormField,
) -> Result<(ConnectionField, PlusFormField)> {
    r.grid.ensure_same(a.grid())?;
    r.grid.ensure_same(b.grid())?;
    let g = r.grid;
    let inv_h = 1.0 / g.h;
    let a_new = ConnectionField::map_lie(g, |s, mu| {
        let rt = r.data[s].transpose();
        let rotated = rt * Vector3::from(a.lie(s, mu).0);
        let mc = log_adjoint(&(rt * r.data[g.forward(s, mu)]));
        LieVector([rotated[0], rotated[1], rotated[2]]) + mc * inv_h
    });
    Ok((a_new, r.act_plus(b)?))
}
