//! Matrix-free Krylov solvers over inner-product spaces.

use nalgebra::{DMatrix, DVector};

use crate::lattice::{reduce, Field, FieldKind};

/// A real vector space with an inner product, as used by [`conjugate_gradient`].
pub trait InnerSpace: Clone {
    fn dot(&self, other: &Self) -> f64;
    fn axpy(&mut self, alpha: f64, x: &Self);
    fn scale(&mut self, s: f64);
    fn zeros_like(&self) -> Self;

    fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }
}

impl<K: FieldKind> InnerSpace for Field<K> {
    fn dot(&self, other: &Self) -> f64 {
        self.l2_inner_unchecked(other)
    }
    fn axpy(&mut self, alpha: f64, x: &Self) {
        Field::axpy(self, alpha, x)
    }
    fn scale(&mut self, s: f64) {
        Field::scale(self, s)
    }
    fn zeros_like(&self) -> Self {
        Field::zeros(*self.grid())
    }
}

/// Plain coefficient vectors with the Euclidean inner product.
impl InnerSpace for Vec<f64> {
    fn dot(&self, other: &Self) -> f64 {
        reduce::dot(self, other)
    }
    fn axpy(&mut self, alpha: f64, x: &Self) {
        for (y, x) in self.iter_mut().zip(x) {
            *y += alpha * x;
        }
    }
    fn scale(&mut self, s: f64) {
        for y in self.iter_mut() {
            *y *= s;
        }
    }
    fn zeros_like(&self) -> Self {
        vec![0.0; self.len()]
    }
}

/// Outcome of an iterative solve.
#[derive(Clone, Copy, Debug)]
pub struct CgOutcome {
    pub iterations: usize,
    /// `‖rhs - A x‖ / ‖rhs‖` at exit.
    pub relative_residual: f64,
    pub converged: bool,
}

/// Solves `A x = rhs` for a self-adjoint positive semi-definite `A`, starting at zero.
pub fn conjugate_gradient<V, F>(apply: F, rhs: &V, rel_tol: f64, max_iter: usize) -> (V, CgOutcome)
where
    V: InnerSpace,
    F: Fn(&V) -> V,
{
    let mut x = rhs.zeros_like();
    let rhs_norm = rhs.norm();
    if rhs_norm == 0.0 {
        return (x, CgOutcome { iterations: 0, relative_residual: 0.0, converged: true });
    }
    let mut r = rhs.clone();
    let mut p = r.clone();
    let mut rr = r.dot(&r);
    let target = (rel_tol * rhs_norm).powi(2);
    let mut it = 0;
    while it < max_iter && rr > target {
        let ap = apply(&p);
        let pap = p.dot(&ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rr / pap;
        x.axpy(alpha, &p);
        r.axpy(-alpha, &ap);
        let rr_new = r.dot(&r);
        let beta = rr_new / rr;
        rr = rr_new;
        p.scale(beta);
        p.axpy(1.0, &r);
        it += 1;
    }
    let rel = rr.sqrt() / rhs_norm;
    (x, CgOutcome { iterations: it, relative_residual: rel, converged: rel <= rel_tol })
}

/// Restarted GMRES(`restart`) for a general square operator, starting at zero.
pub fn gmres<V, F>(apply: F, rhs: &V, rel_tol: f64, restart: usize, max_iter: usize) -> (V, CgOutcome)
where
    V: InnerSpace,
    F: Fn(&V) -> V,
{
    let mut x = rhs.zeros_like();
    let rhs_norm = rhs.norm();
    if rhs_norm == 0.0 {
        return (x, CgOutcome { iterations: 0, relative_residual: 0.0, converged: true });
    }
    let restart = restart.max(1);
    let mut it = 0;
    let mut rel = 1.0;
    while it < max_iter {
        let mut r = rhs.clone();
        if it > 0 {
            r.axpy(-1.0, &apply(&x));
        }
        let beta = r.norm();
        rel = beta / rhs_norm;
        if rel <= rel_tol {
            break;
        }
        r.scale(1.0 / beta);
        let mut basis = vec![r];
        // Hessenberg columns, already rotated.
        let mut h: Vec<Vec<f64>> = Vec::new();
        let mut rotations: Vec<(f64, f64)> = Vec::new();
        let mut g = vec![beta];
        let mut k = 0;
        while k < restart && it < max_iter {
            let mut w = apply(&basis[k]);
            let mut col = vec![0.0; k + 2];
            for (i, v) in basis.iter().enumerate() {
                col[i] = w.dot(v);
                w.axpy(-col[i], v);
            }
            let wn = w.norm();
            col[k + 1] = wn;
            for (i, &(c, s)) in rotations.iter().enumerate() {
                let (a, b) = (col[i], col[i + 1]);
                col[i] = c * a + s * b;
                col[i + 1] = -s * a + c * b;
            }
            let (a, b) = (col[k], col[k + 1]);
            let rho = a.hypot(b);
            let (c, s) = if rho == 0.0 { (1.0, 0.0) } else { (a / rho, b / rho) };
            col[k] = rho;
            col[k + 1] = 0.0;
            rotations.push((c, s));
            g.push(-s * g[k]);
            g[k] *= c;
            h.push(col);
            k += 1;
            it += 1;
            rel = g[k].abs() / rhs_norm;
            if rel <= rel_tol || wn == 0.0 {
                break;
            }
            w.scale(1.0 / wn);
            basis.push(w);
        }
        // Back substitution for the least-squares coefficients.
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let mut acc = g[i];
            for j in i + 1..k {
                acc -= h[j][i] * y[j];
            }
            y[i] = if h[i][i] != 0.0 { acc / h[i][i] } else { 0.0 };
        }
        for (yi, v) in y.iter().zip(&basis) {
            x.axpy(*yi, v);
        }
        if rel <= rel_tol {
            break;
        }
    }
    (x, CgOutcome { iterations: it, relative_residual: rel, converged: rel <= rel_tol })
}

/// An Arnoldi basis `V` with `A V_k = V_{k+1} H̄` for a square operator,
/// reusable for damped least-squares solves in the Krylov subspace.
pub struct KrylovBasis<V> {
    basis: Vec<V>,
    /// SVD factors of the `(k+1)×k` Hessenberg matrix.
    u: DMatrix<f64>,
    sigma: DVector<f64>,
    w_t: DMatrix<f64>,
    beta: f64,
}

impl<V: InnerSpace> KrylovBasis<V> {
    /// Runs Arnoldi from `rhs` until the minimal residual drops below
    /// `rel_tol·‖rhs‖` or the basis reaches `max_dim` vectors.
    pub fn build<F: Fn(&V) -> V>(apply: F, rhs: &V, rel_tol: f64, max_dim: usize) -> Self {
        let beta = rhs.norm();
        let mut basis = Vec::new();
        let mut cols: Vec<Vec<f64>> = Vec::new();
        if beta > 0.0 {
            let mut v0 = rhs.clone();
            v0.scale(1.0 / beta);
            basis.push(v0);
            // Givens-rotated copy, only to track the minimal residual.
            let mut rotations: Vec<(f64, f64)> = Vec::new();
            let mut g = beta;
            for k in 0..max_dim.max(1) {
                let mut w = apply(&basis[k]);
                let mut col = vec![0.0; k + 2];
                for (i, v) in basis.iter().enumerate() {
                    col[i] = w.dot(v);
                    w.axpy(-col[i], v);
                }
                let wn = w.norm();
                col[k + 1] = wn;
                let mut rot = col.clone();
                for (i, &(c, s)) in rotations.iter().enumerate() {
                    let (a, b) = (rot[i], rot[i + 1]);
                    rot[i] = c * a + s * b;
                    rot[i + 1] = -s * a + c * b;
                }
                let rho = rot[k].hypot(rot[k + 1]);
                let (c, s) = if rho == 0.0 { (1.0, 0.0) } else { (rot[k] / rho, rot[k + 1] / rho) };
                rotations.push((c, s));
                g *= -s;
                cols.push(col);
                if g.abs() <= rel_tol * beta || wn == 0.0 {
                    break;
                }
                w.scale(1.0 / wn);
                basis.push(w);
            }
        }
        let k = cols.len();
        let h = DMatrix::from_fn(k + 1, k, |i, j| cols[j].get(i).copied().unwrap_or(0.0));
        let svd = h.svd(true, true);
        KrylovBasis {
            basis,
            u: svd.u.expect("u requested"),
            sigma: svd.singular_values,
            w_t: svd.v_t.expect("v_t requested"),
            beta,
        }
    }

    pub fn dim(&self) -> usize {
        self.sigma.len()
    }

    pub fn largest_singular_value(&self) -> f64 {
        self.sigma.iter().copied().fold(0.0, f64::max)
    }

    /// `argmin_{x ∈ K} ‖A x − rhs‖² + μ‖x‖²`; `μ = 0` gives the GMRES iterate
    /// (minimum-norm if the Hessenberg matrix is singular).
    pub fn damped_solution(&self, mu: f64, template: &V) -> V {
        let mut x = template.zeros_like();
        if self.dim() == 0 {
            return x;
        }
        let rhs = self.u.row(0).transpose() * self.beta;
        let smax = self.largest_singular_value();
        let coef = DVector::from_iterator(
            self.dim(),
            self.sigma.iter().zip(rhs.iter()).map(|(&s, &r)| {
                if mu == 0.0 && s <= 1e-14 * smax {
                    0.0
                } else {
                    s * r / (s * s + mu)
                }
            }),
        );
        let z = self.w_t.transpose() * coef;
        for (zi, v) in z.iter().zip(&self.basis) {
            x.axpy(*zi, v);
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{ScalarLieField, TorusGrid};

    #[test]
    fn solves_diagonal_system() {
        let g = TorusGrid::new(2, 1.0).unwrap();
        let rhs = ScalarLieField::from_sites(g, |s, out| {
            for (k, o) in out.iter_mut().enumerate() {
                *o = (s * 3 + k) as f64 - 20.0;
            }
        });
        let diag = ScalarLieField::from_sites(g, |s, out| {
            for (k, o) in out.iter_mut().enumerate() {
                *o = 1.0 + ((s + k) % 5) as f64;
            }
        });
        let apply = |v: &ScalarLieField| {
            ScalarLieField::from_sites(g, |s, out| {
                for k in 0..3 {
                    out[k] = diag.site(s)[k] * v.site(s)[k];
                }
            })
        };
        let (x, out) = conjugate_gradient(apply, &rhs, 1e-12, 200);
        assert!(out.converged);
        for i in 0..rhs.data().len() {
            assert!((x.data()[i] * diag.data()[i] - rhs.data()[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn krylov_basis_reproduces_gmres_and_damps() {
        let n = 60;
        let apply = |v: &Vec<f64>| -> Vec<f64> {
            (0..n).map(|i| 3.0 * v[i] - v[(i + n - 1) % n] + 0.5 * v[(i + 1) % n]).collect()
        };
        let rhs: Vec<f64> = (0..n).map(|i| ((i * 7) % 11) as f64 - 5.0).collect();
        let kb = KrylovBasis::build(apply, &rhs, 1e-12, n);
        let x = kb.damped_solution(0.0, &rhs);
        let mut r = apply(&x);
        r.axpy(-1.0, &rhs);
        assert!(r.norm() < 1e-10 * rhs.norm());
        let (xg, _) = gmres(apply, &rhs, 1e-12, n, n);
        let mut d = x.clone();
        d.axpy(-1.0, &xg);
        assert!(d.norm() < 1e-9 * x.norm());
        let small = kb.damped_solution(1e3, &rhs);
        assert!(small.norm() < 0.1 * x.norm());
    }

    #[test]
    fn gmres_solves_nonsymmetric_system() {
        // Upwind-difference operator plus a shift: nonsymmetric and well posed.
        let n = 200;
        let apply = |v: &Vec<f64>| -> Vec<f64> {
            (0..n).map(|i| 3.0 * v[i] - v[(i + n - 1) % n] + 0.5 * v[(i + 7) % n]).collect()
        };
        let rhs: Vec<f64> = (0..n).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
        for restart in [5, 30, 400] {
            let (x, out) = gmres(apply, &rhs, 1e-12, restart, 2000);
            assert!(out.converged, "restart {restart}: {out:?}");
            let ax = apply(&x);
            for i in 0..n {
                assert!((ax[i] - rhs[i]).abs() < 1e-9);
            }
        }
    }
}
