use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic hypercubic lattice with `n` sites per direction and spacing `h`.
///
/// Sites are ordered lexicographically with `x₁` fastest and `x₄` slowest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    pub n: usize,
    pub h: f64,
}

impl TorusGrid {
    pub fn new(n: usize, h: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("grid needs n >= 2, got {n}")));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidParameter(format!("grid spacing must be positive, got {h}")));
        }
        Ok(TorusGrid { n, h })
    }

    /// Grid of `n` sites per direction on a torus of side `length`.
    pub fn with_length(n: usize, length: f64) -> Result<Self> {
        TorusGrid::new(n, length / n as f64)
    }

    #[inline]
    pub fn sites(&self) -> usize {
        self.n.pow(4)
    }

    pub fn length(&self) -> f64 {
        self.n as f64 * self.h
    }

    pub fn volume(&self) -> f64 {
        self.length().powi(4)
    }

    /// Quadrature weight `h⁴`.
    #[inline]
    pub fn cell(&self) -> f64 {
        self.h.powi(4)
    }

    #[inline]
    pub fn stride(&self, mu: usize) -> usize {
        self.n.pow(mu as u32)
    }

    pub fn index(&self, x: [usize; 4]) -> usize {
        let n = self.n;
        (x[0] % n) + n * ((x[1] % n) + n * ((x[2] % n) + n * (x[3] % n)))
    }

    pub fn coords(&self, mut idx: usize) -> [usize; 4] {
        let mut x = [0; 4];
        for c in x.iter_mut() {
            *c = idx % self.n;
            idx /= self.n;
        }
        x
    }

    #[inline]
    pub fn coord(&self, idx: usize, mu: usize) -> usize {
        (idx / self.stride(mu)) % self.n
    }

    /// Site `x + μ̂`.
    #[inline]
    pub fn forward(&self, idx: usize, mu: usize) -> usize {
        let s = self.stride(mu);
        if self.coord(idx, mu) + 1 == self.n {
            idx + s - self.n * s
        } else {
            idx + s
        }
    }

    /// Site `x - μ̂`.
    #[inline]
    pub fn backward(&self, idx: usize, mu: usize) -> usize {
        let s = self.stride(mu);
        if self.coord(idx, mu) == 0 {
            idx + self.n * s - s
        } else {
            idx - s
        }
    }

    /// Physical position of a site.
    pub fn position(&self, idx: usize) -> [f64; 4] {
        let x = self.coords(idx);
        [
            x[0] as f64 * self.h,
            x[1] as f64 * self.h,
            x[2] as f64 * self.h,
            x[3] as f64 * self.h,
        ]
    }

    pub fn ensure_same(&self, other: &TorusGrid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: format!("n={} h={}", self.n, self.h),
                right: format!("n={} h={}", other.n, other.h),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_neighbours() {
        let g = TorusGrid::new(3, 0.5).unwrap();
        assert_eq!(g.sites(), 81);
        for idx in 0..g.sites() {
            for mu in 0..4 {
                assert_eq!(g.backward(g.forward(idx, mu), mu), idx);
                let mut x = g.coords(idx);
                x[mu] = (x[mu] + 1) % 3;
                assert_eq!(g.forward(idx, mu), g.index(x));
            }
        }
        assert_eq!(g.index([1, 0, 0, 0]), 1);
        assert_eq!(g.index([0, 0, 0, 1]), 27);
    }

    #[test]
    fn rejects_degenerate() {
        assert!(TorusGrid::new(1, 1.0).is_err());
        assert!(TorusGrid::new(4, 0.0).is_err());
        assert_eq!(TorusGrid::new(4, 0.25).unwrap().volume(), 1.0);
    }
}
