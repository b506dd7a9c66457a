//! Explicit sparse assembly of the gauge-fixed deformation operator
//! `(a, b) ↦ (d¹(a, b), d⁰*(a, b))` on small grids.

use nalgebra::DMatrix;

use super::{d0_adjoint, d1_apply, Configuration, Tangent};
use crate::algebra::PerturbationParams;
use crate::error::{Error, Result};
use crate::lattice::{OneFormField, PlusFormField, TorusGrid};

/// Largest lattice size accepted by [`assemble_operator`].
pub const ASSEMBLY_MAX_N: usize = 6;

/// Unknowns per site: 12 for `a`, then 9 for `b`.
pub const COLS_PER_SITE: usize = 21;
/// Rows per site: 9 for `r₁`, 9 for `r₂`, 3 for `d⁰*`.
pub const ROWS_PER_SITE: usize = 21;

/// Compressed sparse row matrix acting on raw field coefficients.
///
/// Vectors are laid out as `[a (12·sites) | b (9·sites)]` and outputs as
/// `[r₁ (9·sites) | r₂ (9·sites) | d⁰* (3·sites)]`, each block in field order.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseMatrix {
    fn from_triplets(nrows: usize, ncols: usize, mut t: Vec<(usize, usize, f64)>) -> Self {
        t.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; nrows + 1];
        for &(r, _, _) in &t {
            row_ptr[r + 1] += 1;
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx: t.iter().map(|x| x.1).collect(),
            values: t.iter().map(|x| x.2).collect(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .map(|k| self.values[k] * x[self.col_idx[k]])
                    .sum()
            })
            .collect()
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let row = &self.col_idx[self.row_ptr[r]..self.row_ptr[r + 1]];
        match row.binary_search(&c) {
            Ok(k) => self.values[self.row_ptr[r] + k],
            Err(_) => 0.0,
        }
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut t = Vec::with_capacity(self.nnz());
        for r in 0..self.nrows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                t.push((self.col_idx[k], r, self.values[k]));
            }
        }
        SparseMatrix::from_triplets(self.ncols, self.nrows, t)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for r in 0..self.nrows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.col_idx[k])] = self.values[k];
            }
        }
        m
    }
}

/// Splits a raw coefficient vector into a tangent vector.
pub fn tangent_from_vec(grid: TorusGrid, x: &[f64]) -> Result<Tangent> {
    let na = 12 * grid.sites();
    if x.len() != COLS_PER_SITE * grid.sites() {
        return Err(Error::Format(format!(
            "expected {} coefficients, got {}",
            COLS_PER_SITE * grid.sites(),
            x.len()
        )));
    }
    Ok(Tangent {
        a: OneFormField::from_vec(grid, x[..na].to_vec())?,
        b: PlusFormField::from_vec(grid, x[na..].to_vec())?,
    })
}

/// Applies the operator matrix-free, in the row layout of [`SparseMatrix`].
pub fn apply_operator(p: &PerturbationParams, c: &Configuration, d: &Tangent) -> Result<Vec<f64>> {
    let r = d1_apply(p, c, d)?;
    let gauge = d0_adjoint(c, d)?;
    let mut out = Vec::with_capacity(ROWS_PER_SITE * c.grid().sites());
    out.extend_from_slice(r.r1.data());
    out.extend_from_slice(r.r2.data());
    out.extend_from_slice(gauge.data());
    Ok(out)
}

/// Assembles `(d¹, d⁰*)` at `c` by probing with coloured unit vectors.
///
/// Every output at `x` depends only on inputs at `x + o` with `o ∈ {-1,0,1}⁴`,
/// so sites congruent mod 3 in each coordinate can share a probe when
/// `3 | n`; otherwise every site is probed separately.
pub fn assemble_operator(p: &PerturbationParams, c: &Configuration) -> Result<SparseMatrix> {
    let g = *c.grid();
    if g.n > ASSEMBLY_MAX_N {
        return Err(Error::SizeGuard { n: g.n, max: ASSEMBLY_MAX_N });
    }
    let m = if g.n.is_multiple_of(3) { 3 } else { g.n };
    let sites = g.sites();
    let ncols = COLS_PER_SITE * sites;
    let nrows = ROWS_PER_SITE * sites;
    let row_site = |row: usize| -> usize {
        if row < 9 * sites {
            row / 9
        } else if row < 18 * sites {
            (row - 9 * sites) / 9
        } else {
            (row - 18 * sites) / 3
        }
    };
    let col_index = |site: usize, comp: usize| -> usize {
        if comp < 12 {
            12 * site + comp
        } else {
            12 * sites + 9 * site + (comp - 12)
        }
    };
    // The unique site of colour `colour` in the stencil neighbourhood of `x`.
    let source = |x: usize, colour: [usize; 4]| -> usize {
        let xc = g.coords(x);
        let y: [usize; 4] = std::array::from_fn(|d| {
            if m == g.n {
                colour[d]
            } else {
                (0..3)
                    .map(|o| (xc[d] + g.n + o - 1) % g.n)
                    .find(|&v| v % m == colour[d])
                    .expect("mod-3 colouring covers the stencil")
            }
        });
        g.index(y)
    };

    let mut triplets = Vec::new();
    let colours = m.pow(4);
    for colour_id in 0..colours {
        let colour = [colour_id % m, (colour_id / m) % m, (colour_id / m / m) % m, colour_id / m / m / m];
        let members: Vec<usize> = (0..sites)
            .filter(|&s| (0..4).all(|d| g.coord(s, d) % m == colour[d]))
            .collect();
        for comp in 0..COLS_PER_SITE {
            let mut x = vec![0.0; ncols];
            for &s in &members {
                x[col_index(s, comp)] = 1.0;
            }
            let y = apply_operator(p, c, &tangent_from_vec(g, &x)?)?;
            for (row, &v) in y.iter().enumerate() {
                if v != 0.0 {
                    let src = source(row_site(row), colour);
                    triplets.push((row, col_index(src, comp), v));
                }
            }
        }
    }
    Ok(SparseMatrix::from_triplets(nrows, ncols, triplets))
}
