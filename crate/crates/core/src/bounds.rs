//! A priori bounds for solutions of the perturbed equations: the sup bound
//! `C` on `|B|`, the `L²` bound `K` on `d_A^*B`, the bubble count and the
//! curvature energy caps, plus their check on lattice configurations.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::algebra::PerturbationParams;
use crate::error::{Error, Result};
use crate::lattice::{chern_weil, curvature_norms, d_a_star_plus, f_plus};
use crate::solver::{residual, Configuration};

/// Absolute tolerance of the quartic root.
pub const ROOT_TOL: f64 = 1e-12;
/// Default relative allowance applied when checking bounds on the lattice.
pub const DEFAULT_SLACK: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsParams {
    pub t: f64,
    pub lambda_tau: f64,
    pub lambda_x: f64,
    pub vol: f64,
    /// Characteristic number `κ` of the bundle.
    pub m: f64,
}

impl BoundsParams {
    pub fn new(t: f64, lambda_tau: f64, lambda_x: f64, vol: f64, m: f64) -> Result<Self> {
        let bp = BoundsParams { t, lambda_tau, lambda_x, vol, m };
        bp.validate()?;
        Ok(bp)
    }

    /// Bounds data for `p` on a box of volume `vol`.
    pub fn from_params(p: &PerturbationParams, lambda_x: f64, vol: f64, m: f64) -> Result<Self> {
        BoundsParams::new(p.t, p.lambda_tau(), lambda_x, vol, m)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(Error::InvalidParameter(format!("{what} = {v}")));
        if !(self.t > 0.0) || !self.t.is_finite() {
            return bad("t must be positive and finite, got t", self.t);
        }
        if !(self.vol > 0.0) || !self.vol.is_finite() {
            return bad("vol must be positive and finite, got vol", self.vol);
        }
        if !(self.lambda_tau >= 0.0) || !self.lambda_tau.is_finite() {
            return bad("lambda_tau must be nonnegative, got lambda_tau", self.lambda_tau);
        }
        if !(self.lambda_x >= 0.0) || !self.lambda_x.is_finite() {
            return bad("lambda_x must be nonnegative, got lambda_x", self.lambda_x);
        }
        if !self.m.is_finite() {
            return bad("m must be finite, got m", self.m);
        }
        Ok(())
    }
}

/// `4t x⁴ − 4λ_τ x³ − λ_X` and its derivative.
fn quartic(bp: &BoundsParams, x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    (
        4.0 * bp.t * x3 * x - 4.0 * bp.lambda_tau * x3 - bp.lambda_x,
        16.0 * bp.t * x3 - 12.0 * bp.lambda_tau * x * x,
    )
}

/// Largest `x ≥ 0` with `−4t x⁴ + 4λ_τ x³ + λ_X ≥ 0`.
///
/// The quartic has a single positive root, bracketed by
/// `[max(λ_τ/t, (λ_X/4t)^¼), λ_τ/t + (λ_X/4t)^¼]`. Newton steps are taken
/// inside the bracket and replaced by bisection whenever they leave it.
pub fn c_upper(bp: &BoundsParams) -> Result<f64> {
    bp.validate()?;
    let a = bp.lambda_tau / bp.t;
    if bp.lambda_x == 0.0 {
        return Ok(a);
    }
    let b = (bp.lambda_x / (4.0 * bp.t)).powf(0.25);
    if bp.lambda_tau == 0.0 {
        return Ok(b);
    }
    let (mut lo, mut hi) = (a.max(b), a + b);
    let mut x = hi;
    for _ in 0..200 {
        let (f, df) = quartic(bp, x);
        if f == 0.0 {
            return Ok(x);
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= ROOT_TOL {
            break;
        }
        let newton = x - f / df;
        let next = if df > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - x).abs() <= ROOT_TOL {
            return Ok(next);
        }
        x = next;
    }
    Ok(0.5 * (lo + hi))
}

/// `2 (4λ_τ⁴/λ_X)^⅓`, beyond which [`c_upper`] is at most [`sharp_cap`].
pub fn t_threshold(bp: &BoundsParams) -> Result<f64> {
    bp.validate()?;
    require_lambda_x(bp)?;
    Ok(2.0 * (4.0 * bp.lambda_tau.powi(4) / bp.lambda_x).cbrt())
}

/// `(λ_X/2t)^¼`.
pub fn sharp_cap(bp: &BoundsParams) -> Result<f64> {
    bp.validate()?;
    require_lambda_x(bp)?;
    Ok((bp.lambda_x / (2.0 * bp.t)).powf(0.25))
}

fn require_lambda_x(bp: &BoundsParams) -> Result<()> {
    if bp.lambda_x == 0.0 {
        return Err(Error::InvalidParameter(
            "threshold undefined for lambda_x = 0; use c_upper = lambda_tau / t".into(),
        ));
    }
    Ok(())
}

/// `K = √(λ_τ C⁵ vol)`.
pub fn k_upper(bp: &BoundsParams) -> Result<f64> {
    let c = c_upper(bp)?;
    Ok((bp.lambda_tau * c.powi(5) * bp.vol).sqrt())
}

/// `vol·C⁴/(48π²)`, the curvature allowance in bubble units.
fn bubble_allowance(c: f64, vol: f64) -> f64 {
    vol * c.powi(4) / (48.0 * PI * PI)
}

/// Largest admissible number of bubble points, `⌊m + vol·C⁴/(48π²)⌋`.
pub fn bubble_bound(bp: &BoundsParams) -> Result<i64> {
    let c = c_upper(bp)?;
    let allowance = bubble_allowance(c, bp.vol);
    if bp.m < -allowance {
        return Err(Error::Hypothesis(format!(
            "m = {} is below -vol C^4/(48 pi^2) = {:e}",
            bp.m, -allowance
        )));
    }
    Ok((bp.m + allowance).floor() as i64)
}

/// Cap on `‖F_A‖²` with `l` bubble points: `8π²(m − l) + vol·C⁴/3`.
pub fn curvature_energy_cap(bp: &BoundsParams, l: i64) -> Result<f64> {
    let max = bubble_bound(bp)?;
    if l < 0 || l > max {
        return Err(Error::InvalidParameter(format!(
            "bubble count l = {l} outside 0..={max}"
        )));
    }
    let c = c_upper(bp)?;
    Ok(8.0 * PI * PI * (bp.m - l as f64) + bp.vol * c.powi(4) / 3.0)
}

/// Cap on `‖F_A⁺‖²`: `vol·C⁴/6`.
pub fn fplus_energy_cap(bp: &BoundsParams) -> Result<f64> {
    Ok(bp.vol * c_upper(bp)?.powi(4) / 6.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub lambda_tau: f64,
    pub lambda_x: f64,
    pub c_upper: f64,
    pub k_upper: f64,
    /// Absent when `λ_X = 0`.
    pub t_threshold: Option<f64>,
    pub sharp_cap: Option<f64>,
    pub bubble_max: i64,
    /// `‖F‖²` cap without bubbles.
    pub curvature_energy_cap: f64,
    pub fplus_energy_cap: f64,
}

pub fn report(bp: &BoundsParams) -> Result<BoundsReport> {
    let (t_threshold, sharp) = if bp.lambda_x > 0.0 {
        (Some(t_threshold(bp)?), Some(sharp_cap(bp)?))
    } else {
        (None, None)
    };
    Ok(BoundsReport {
        lambda_tau: bp.lambda_tau,
        lambda_x: bp.lambda_x,
        c_upper: c_upper(bp)?,
        k_upper: k_upper(bp)?,
        t_threshold,
        sharp_cap: sharp,
        bubble_max: bubble_bound(bp)?,
        curvature_energy_cap: curvature_energy_cap(bp, 0)?,
        fplus_energy_cap: fplus_energy_cap(bp)?,
    })
}

/// One bound evaluated on a configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    /// `bound · (1 + slack)`.
    pub allowed: f64,
    /// `allowed − measured`.
    pub margin: f64,
    pub pass: bool,
}

impl BoundCheck {
    fn new(name: &str, measured: f64, bound: f64, slack: f64) -> Self {
        let allowed = bound * (1.0 + slack);
        BoundCheck {
            name: name.into(),
            measured,
            bound,
            allowed,
            margin: allowed - measured,
            pass: measured <= allowed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub residual_l2: f64,
    /// Relative discretisation allowance used for every check.
    pub slack: f64,
    pub checks: Vec<BoundCheck>,
}

impl Verification {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Checks the a priori bounds on a lattice solution of the homogeneous
/// equations.
///
/// `bp` must describe the same `t`, `λ_τ` and volume as `p` and `c`. The
/// configuration is rejected unless its residual is at most `residual_tol`.
/// Every bound is relaxed by the relative `slack` because the continuum
/// estimates hold on the lattice only up to discretisation error. The full
/// curvature cap is evaluated with the measured lattice Chern-Weil number in
/// place of `m`, with no bubbles.
pub fn verify_solution(
    bp: &BoundsParams,
    p: &PerturbationParams,
    c: &Configuration,
    residual_tol: f64,
    slack: f64,
) -> Result<Verification> {
    bp.validate()?;
    if !(slack >= 0.0) {
        return Err(Error::InvalidParameter(format!("slack must be nonnegative, got {slack}")));
    }
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
    let g = *c.grid();
    if !close(bp.t, p.t) || !close(bp.lambda_tau, p.lambda_tau()) || !close(bp.vol, g.volume()) {
        return Err(Error::InvalidParameter(
            "bounds parameters do not match the configuration (t, lambda_tau, vol)".into(),
        ));
    }
    let res = residual(p, c, None)?.l2_norm();
    if !(res <= residual_tol) {
        return Err(Error::NotASolution { residual: res, tol: residual_tol });
    }
    let cu = c_upper(bp)?;
    let curv = curvature_norms(&c.a);
    debug_assert!((curv.plus - f_plus(&c.a).l2_norm_sq()).abs() <= 1e-9 * curv.plus.max(1.0));
    // The lattice Chern-Weil number is not quantised; the discrete identity
    // ‖F‖² = 2‖F⁺‖² + 8π²κ_est holds exactly, so the cap uses κ_est for m.
    let kappa = chern_weil(&c.a);
    let lattice_cap = (8.0 * PI * PI * kappa + 2.0 * fplus_energy_cap(bp)?).max(0.0);
    let checks = vec![
        BoundCheck::new("sup_B", c.b.linf_norm(), cu, slack),
        BoundCheck::new("l2_dAstarB", d_a_star_plus(&c.a, &c.b)?.l2_norm(), k_upper(bp)?, slack),
        BoundCheck::new("fplus_energy", curv.plus, fplus_energy_cap(bp)?, slack),
        BoundCheck::new("curvature_energy", curv.full, lattice_cap, slack),
    ];
    Ok(Verification { residual_l2: res, slack, checks })
}
