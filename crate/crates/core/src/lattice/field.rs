use std::fmt;
use std::marker::PhantomData;

use rand::Rng;
use rayon::prelude::*;

use super::grid::TorusGrid;
use super::reduce;
use crate::algebra::{GaugedForm, LieVector};
use crate::error::{Error, Result};

/// Layout and pointwise metric of a lattice field.
pub trait FieldKind: Copy + Send + Sync + 'static {
    /// Reals stored per site.
    const COMPONENTS: usize;
    /// Name used in the field-file header.
    const NAME: &'static str;
    /// Pointwise inner product is `WEIGHT · Σ u_i v_i`.
    const WEIGHT: f64;
}

macro_rules! kind {
    ($(#[$m:meta])* $t:ident, $c:expr, $name:expr, $w:expr) => {
        $(#[$m])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq)]
        pub struct $t;
        impl FieldKind for $t {
            const COMPONENTS: usize = $c;
            const NAME: &'static str = $name;
            const WEIGHT: f64 = $w;
        }
    };
}

kind!(
    /// su(2)-valued connection 1-form, `A_μ(x)`.
    Connection, 12, "connection", 1.0
);
kind!(
    /// su(2)-valued 1-form (tangent direction `a`).
    OneForm, 12, "oneform", 1.0
);
kind!(
    /// su(2) ⊗ Λ^{2,+} field; the form metric gives `σ^j·σ^j = 2`.
    PlusForm, 9, "plusform", 2.0
);
kind!(
    /// su(2)-valued function.
    Scalar, 3, "scalar", 1.0
);
kind!(
    /// All six components `F_μν`, `μ < ν`, of an su(2)-valued 2-form.
    TwoForm, 18, "twoform", 1.0
);

/// A lattice field of kind `K`, stored site-major with components innermost.
pub struct Field<K: FieldKind> {
    grid: TorusGrid,
    data: Vec<f64>,
    kind: PhantomData<K>,
}

pub type ConnectionField = Field<Connection>;
pub type OneFormField = Field<OneForm>;
pub type PlusFormField = Field<PlusForm>;
pub type ScalarLieField = Field<Scalar>;
pub type TwoFormField = Field<TwoForm>;

impl<K: FieldKind> Clone for Field<K> {
    fn clone(&self) -> Self {
        Field { grid: self.grid, data: self.data.clone(), kind: PhantomData }
    }
}

impl<K: FieldKind> fmt::Debug for Field<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("kind", &K::NAME)
            .field("grid", &self.grid)
            .field("len", &self.data.len())
            .finish()
    }
}

impl<K: FieldKind> PartialEq for Field<K> {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.data == other.data
    }
}

impl<K: FieldKind> Field<K> {
    pub fn zeros(grid: TorusGrid) -> Self {
        Field { grid, data: vec![0.0; grid.sites() * K::COMPONENTS], kind: PhantomData }
    }

    pub fn from_vec(grid: TorusGrid, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.sites() * K::COMPONENTS {
            return Err(Error::Format(format!(
                "{} field on n={} needs {} values, got {}",
                K::NAME,
                grid.n,
                grid.sites() * K::COMPONENTS,
                data.len()
            )));
        }
        Ok(Field { grid, data, kind: PhantomData })
    }

    /// Builds a field by filling each site's component slice in parallel.
    pub fn from_sites<F>(grid: TorusGrid, f: F) -> Self
    where
        F: Fn(usize, &mut [f64]) + Sync,
    {
        let mut data = vec![0.0; grid.sites() * K::COMPONENTS];
        data.par_chunks_mut(K::COMPONENTS)
            .enumerate()
            .for_each(|(site, out)| f(site, out));
        Field { grid, data, kind: PhantomData }
    }

    /// Independent standard-normal-ish entries scaled by `amplitude`.
    pub fn random<R: Rng>(grid: TorusGrid, amplitude: f64, rng: &mut R) -> Self {
        let data = (0..grid.sites() * K::COMPONENTS)
            .map(|_| amplitude * (rng.gen::<f64>() * 2.0 - 1.0))
            .collect();
        Field { grid, data, kind: PhantomData }
    }

    /// A smooth periodic field: each component is `amplitude · Σ_m c_m sin(2π k_m·x/L + φ_m)`
    /// over three random low wave vectors `k_m ∈ {-1,0,1}⁴ \ {0}`.
    ///
    /// The random draws do not depend on `grid.n`, so the same seed samples
    /// the same continuum field on every resolution of a fixed box.
    pub fn smooth_random<R: Rng>(grid: TorusGrid, amplitude: f64, rng: &mut R) -> Self {
        const MODES: usize = 3;
        let modes: Vec<[([f64; 4], f64, f64); MODES]> = (0..K::COMPONENTS)
            .map(|_| {
                std::array::from_fn(|_| {
                    let mut k = [0.0; 4];
                    while k.iter().all(|&x| x == 0.0) {
                        for x in k.iter_mut() {
                            *x = rng.gen_range(-1i32..=1) as f64;
                        }
                    }
                    let c = rng.gen::<f64>() * 2.0 - 1.0;
                    let phase = rng.gen::<f64>() * std::f64::consts::TAU;
                    (k, c, phase)
                })
            })
            .collect();
        let omega = std::f64::consts::TAU / grid.length();
        Field::from_sites(grid, |s, out| {
            let x = grid.position(s);
            for (o, comp) in out.iter_mut().zip(&modes) {
                *o = amplitude
                    * comp
                        .iter()
                        .map(|(k, c, ph)| {
                            let kx: f64 = k.iter().zip(&x).map(|(k, x)| k * x).sum();
                            c * (omega * kx + ph).sin()
                        })
                        .sum::<f64>();
            }
        })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn site(&self, idx: usize) -> &[f64] {
        &self.data[idx * K::COMPONENTS..(idx + 1) * K::COMPONENTS]
    }

    #[inline]
    pub fn site_mut(&mut self, idx: usize) -> &mut [f64] {
        &mut self.data[idx * K::COMPONENTS..(idx + 1) * K::COMPONENTS]
    }

    /// Reinterprets the storage as another kind with the same layout.
    pub fn cast<L: FieldKind>(self) -> Field<L> {
        assert_eq!(K::COMPONENTS, L::COMPONENTS, "cast between incompatible layouts");
        Field { grid: self.grid, data: self.data, kind: PhantomData }
    }

    pub fn same_grid<L: FieldKind>(&self, other: &Field<L>) -> Result<()> {
        self.grid.ensure_same(&other.grid)
    }

    /// `h⁴ Σ_x ⟨f(x), g(x)⟩`.
    pub fn l2_inner(&self, other: &Self) -> Result<f64> {
        self.same_grid(other)?;
        Ok(self.l2_inner_unchecked(other))
    }

    pub(crate) fn l2_inner_unchecked(&self, other: &Self) -> f64 {
        K::WEIGHT * self.grid.cell() * reduce::dot(&self.data, &other.data)
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.l2_inner_unchecked(self)
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// `max_x |f(x)|` with the pointwise metric of the kind.
    pub fn linf_norm(&self) -> f64 {
        let c = K::COMPONENTS;
        reduce::max_by(self.grid.sites(), |s| {
            let v = &self.data[s * c..(s + 1) * c];
            (K::WEIGHT * v.iter().map(|x| x * x).sum::<f64>()).sqrt()
        })
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        reduce::max_by(self.data.len(), |i| self.data[i].abs())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// `self += alpha · x`.
    pub fn axpy(&mut self, alpha: f64, x: &Self) {
        debug_assert_eq!(self.grid, x.grid);
        self.data
            .par_iter_mut()
            .zip(x.data.par_iter())
            .for_each(|(y, x)| *y += alpha * x);
    }

    pub fn scale(&mut self, s: f64) {
        self.data.par_iter_mut().for_each(|y| *y *= s);
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.scale(s);
        out
    }

    /// `self + alpha · x` as a new field.
    pub fn plus(&self, alpha: f64, x: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(alpha, x);
        out
    }

    /// Translate by one lattice site along `mu`: `out(x) = self(x - μ̂)`.
    pub fn shifted(&self, mu: usize) -> Self {
        let c = K::COMPONENTS;
        Field::from_sites(self.grid, |s, out| {
            let src = self.grid.backward(s, mu);
            out.copy_from_slice(&self.data[src * c..(src + 1) * c]);
        })
    }
}

impl Field<PlusForm> {
    #[inline]
    pub fn get(&self, idx: usize) -> GaugedForm {
        GaugedForm::from_row_major(self.site(idx))
    }

    #[inline]
    pub fn set(&mut self, idx: usize, b: &GaugedForm) {
        self.site_mut(idx).copy_from_slice(&b.to_row_major());
    }

    pub fn constant(grid: TorusGrid, b: &GaugedForm) -> Self {
        let v = b.to_row_major();
        Field::from_sites(grid, |_, out| out.copy_from_slice(&v))
    }

    pub fn map_forms<F>(grid: TorusGrid, f: F) -> Self
    where
        F: Fn(usize) -> GaugedForm + Sync,
    {
        Field::from_sites(grid, |s, out| out.copy_from_slice(&f(s).to_row_major()))
    }
}

macro_rules! one_form_accessors {
    ($k:ty) => {
        impl Field<$k> {
            #[inline]
            pub fn lie(&self, idx: usize, mu: usize) -> LieVector {
                let v = &self.site(idx)[3 * mu..3 * mu + 3];
                LieVector([v[0], v[1], v[2]])
            }

            #[inline]
            pub fn set_lie(&mut self, idx: usize, mu: usize, v: &LieVector) {
                self.site_mut(idx)[3 * mu..3 * mu + 3].copy_from_slice(&v.0);
            }

            pub fn map_lie<F>(grid: TorusGrid, f: F) -> Self
            where
                F: Fn(usize, usize) -> LieVector + Sync,
            {
                Field::from_sites(grid, |s, out| {
                    for mu in 0..4 {
                        out[3 * mu..3 * mu + 3].copy_from_slice(&f(s, mu).0);
                    }
                })
            }
        }
    };
}

one_form_accessors!(Connection);
one_form_accessors!(OneForm);

impl Field<Scalar> {
    #[inline]
    pub fn lie(&self, idx: usize) -> LieVector {
        let v = self.site(idx);
        LieVector([v[0], v[1], v[2]])
    }

    pub fn map_lie<F>(grid: TorusGrid, f: F) -> Self
    where
        F: Fn(usize) -> LieVector + Sync,
    {
        Field::from_sites(grid, |s, out| out.copy_from_slice(&f(s).0))
    }
}

impl Field<TwoForm> {
    /// Component `F_μν` for the `k`-th pair of [`super::PAIRS`].
    #[inline]
    pub fn pair(&self, idx: usize, k: usize) -> LieVector {
        let v = &self.site(idx)[3 * k..3 * k + 3];
        LieVector([v[0], v[1], v[2]])
    }
}
