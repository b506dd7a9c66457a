//! Fourier preconditioner for the gauge-fixed deformation operator.
//!
//! Freezing `(A, B)` at their lattice averages makes the operator translation
//! invariant, hence block diagonal over lattice momenta with one 21×21 block
//! per momentum. Each block is inverted through its SVD with singular values
//! floored at `reg · σ_max`, so harmonic (near-null) modes stay bounded.

use nalgebra::{Complex, DMatrix, DVector};

use super::assemble::{apply_operator, tangent_from_vec, COLS_PER_SITE, ROWS_PER_SITE};
use super::{Configuration, Tangent};
use crate::algebra::PerturbationParams;
use crate::error::Result;
use crate::lattice::{ConnectionField, PlusFormField, TorusGrid};

type C64 = Complex<f64>;

/// Row scaling shared by the solver and the preconditioner: `r₁` rows by
/// `h²`, gauge rows by `h`, so every block carries units of length⁻².
pub(crate) fn scale_rows(g: &TorusGrid, y: &mut [f64]) {
    let sites = g.sites();
    y[..9 * sites].iter_mut().for_each(|v| *v *= g.h * g.h);
    y[18 * sites..].iter_mut().for_each(|v| *v *= g.h);
}

fn mean_configuration(c: &Configuration) -> Configuration {
    let g = *c.grid();
    let avg = |data: &[f64], comps: usize| -> Vec<f64> {
        let mut m = vec![0.0; comps];
        for chunk in data.chunks_exact(comps) {
            for (a, v) in m.iter_mut().zip(chunk) {
                *a += v;
            }
        }
        m.iter().map(|v| v / g.sites() as f64).collect()
    };
    let ma = avg(c.a.data(), 12);
    let mb = avg(c.b.data(), 9);
    let a = ConnectionField::from_sites(g, |_, out| out.copy_from_slice(&ma));
    let b = PlusFormField::from_sites(g, |_, out| out.copy_from_slice(&mb));
    Configuration { a, b }
}

/// Separable 4-D DFT of `comps`-component site data, in place.
/// Forward uses `e^{-ik·x}`; the inverse includes the `1/N` factor.
fn dft4(g: &TorusGrid, data: &mut [C64], comps: usize, inverse: bool) {
    let n = g.n;
    let sign = if inverse { 1.0 } else { -1.0 };
    let twiddle: Vec<C64> = (0..n)
        .map(|j| C64::from_polar(1.0, sign * std::f64::consts::TAU * j as f64 / n as f64))
        .collect();
    let mut line = vec![C64::new(0.0, 0.0); n * comps];
    for axis in 0..4 {
        let stride = g.stride(axis);
        for base in 0..g.sites() {
            if g.coord(base, axis) != 0 {
                continue;
            }
            for m in 0..n {
                let out = &mut line[m * comps..(m + 1) * comps];
                out.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
                for j in 0..n {
                    let w = twiddle[(j * m) % n];
                    let src = &data[(base + j * stride) * comps..(base + j * stride + 1) * comps];
                    for (o, s) in out.iter_mut().zip(src) {
                        *o += w * s;
                    }
                }
            }
            for m in 0..n {
                data[(base + m * stride) * comps..(base + m * stride + 1) * comps]
                    .copy_from_slice(&line[m * comps..(m + 1) * comps]);
            }
        }
    }
    if inverse {
        let s = 1.0 / g.sites() as f64;
        data.iter_mut().for_each(|v| *v *= s);
    }
}

pub struct FourierPreconditioner {
    grid: TorusGrid,
    /// Regularised inverse symbol per momentum, mapping rows to unknowns.
    blocks: Vec<DMatrix<C64>>,
}

impl FourierPreconditioner {
    pub fn new(p: &PerturbationParams, c: &Configuration, reg: f64) -> Result<Self> {
        let g = *c.grid();
        let sites = g.sites();
        let mean = mean_configuration(c);
        // Stencil columns: response to a unit coefficient at site 0.
        let mut stencil = vec![vec![0.0; ROWS_PER_SITE * sites]; COLS_PER_SITE];
        for (j, col) in stencil.iter_mut().enumerate() {
            let mut x = vec![0.0; COLS_PER_SITE * sites];
            x[if j < 12 { j } else { 12 * sites + j - 12 }] = 1.0;
            let mut y = apply_operator(p, &mean, &tangent_from_vec(g, &x)?)?;
            scale_rows(&g, &mut y);
            *col = y;
        }
        // Per-site row-major symbol data, transformed site-wise.
        let mut sym = vec![C64::new(0.0, 0.0); sites * ROWS_PER_SITE * COLS_PER_SITE];
        for s in 0..sites {
            for i in 0..ROWS_PER_SITE {
                let row = row_index(sites, s, i);
                for j in 0..COLS_PER_SITE {
                    sym[(s * ROWS_PER_SITE + i) * COLS_PER_SITE + j] = C64::new(stencil[j][row], 0.0);
                }
            }
        }
        dft4(&g, &mut sym, ROWS_PER_SITE * COLS_PER_SITE, false);

        let mats: Vec<DMatrix<C64>> = (0..sites)
            .map(|k| {
                DMatrix::from_row_slice(
                    ROWS_PER_SITE,
                    COLS_PER_SITE,
                    &sym[k * ROWS_PER_SITE * COLS_PER_SITE..(k + 1) * ROWS_PER_SITE * COLS_PER_SITE],
                )
            })
            .collect();
        let svds: Vec<_> = mats.into_iter().map(|m| m.svd(true, true)).collect();
        let sigma_max = svds
            .iter()
            .flat_map(|s| s.singular_values.iter().copied())
            .fold(0.0, f64::max);
        let floor = (reg * sigma_max).max(f64::MIN_POSITIVE);
        let blocks = svds
            .into_iter()
            .map(|svd| {
                let u = svd.u.expect("u requested");
                let v_t = svd.v_t.expect("v_t requested");
                let inv = DVector::from_iterator(
                    svd.singular_values.len(),
                    svd.singular_values.iter().map(|&s| C64::new(1.0 / s.max(floor), 0.0)),
                );
                v_t.adjoint() * DMatrix::from_diagonal(&inv) * u.adjoint()
            })
            .collect();
        Ok(FourierPreconditioner { grid: g, blocks })
    }

    /// Maps a row-space vector (operator output layout) to unknowns.
    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        let g = self.grid;
        let sites = g.sites();
        let mut data = vec![C64::new(0.0, 0.0); sites * ROWS_PER_SITE];
        for s in 0..sites {
            for i in 0..ROWS_PER_SITE {
                data[s * ROWS_PER_SITE + i] = C64::new(y[row_index(sites, s, i)], 0.0);
            }
        }
        dft4(&g, &mut data, ROWS_PER_SITE, false);
        let mut out = vec![C64::new(0.0, 0.0); sites * COLS_PER_SITE];
        for (k, block) in self.blocks.iter().enumerate() {
            let rhs = DVector::from_column_slice(&data[k * ROWS_PER_SITE..(k + 1) * ROWS_PER_SITE]);
            let sol = block * rhs;
            out[k * COLS_PER_SITE..(k + 1) * COLS_PER_SITE].copy_from_slice(sol.as_slice());
        }
        dft4(&g, &mut out, COLS_PER_SITE, true);
        let mut x = vec![0.0; COLS_PER_SITE * sites];
        for s in 0..sites {
            for j in 0..COLS_PER_SITE {
                let idx = if j < 12 { 12 * s + j } else { 12 * sites + 9 * s + j - 12 };
                x[idx] = out[s * COLS_PER_SITE + j].re;
            }
        }
        x
    }

    pub fn apply_tangent(&self, y: &[f64]) -> Result<Tangent> {
        tangent_from_vec(self.grid, &self.apply(y))
    }
}

/// Position of row component `i` of site `s` in the operator output layout.
fn row_index(sites: usize, s: usize, i: usize) -> usize {
    if i < 9 {
        9 * s + i
    } else if i < 18 {
        9 * sites + 9 * s + i - 9
    } else {
        18 * sites + 3 * s + i - 18
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dft_round_trip() {
        let g = TorusGrid::new(3, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let orig: Vec<C64> = (0..g.sites() * 2).map(|_| C64::new(rng.gen(), rng.gen())).collect();
        let mut d = orig.clone();
        dft4(&g, &mut d, 2, false);
        dft4(&g, &mut d, 2, true);
        for (a, b) in d.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn exact_inverse_for_constant_fields() {
        // For constant, generic (A, B) the operator is translation invariant
        // and the preconditioner is its exact inverse (up to the floor).
        let g = TorusGrid::new(3, 0.7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a0: Vec<f64> = (0..12).map(|_| rng.gen::<f64>() - 0.5).collect();
        let b0: Vec<f64> = (0..9).map(|_| rng.gen::<f64>() - 0.5).collect();
        let c = Configuration {
            a: ConnectionField::from_sites(g, |_, o| o.copy_from_slice(&a0)),
            b: PlusFormField::from_sites(g, |_, o| o.copy_from_slice(&b0)),
        };
        let p = PerturbationParams::new(0.9, Matrix3::identity()).unwrap();
        let pre = FourierPreconditioner::new(&p, &c, 1e-14).unwrap();
        let x: Vec<f64> = (0..COLS_PER_SITE * g.sites()).map(|_| rng.gen::<f64>() - 0.5).collect();
        let mut y = apply_operator(&p, &c, &tangent_from_vec(g, &x).unwrap()).unwrap();
        scale_rows(&g, &mut y);
        let back = pre.apply(&y);
        let err = back.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }
}
