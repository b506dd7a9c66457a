//! Solve and scan drivers plus formula tables.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use vrvw::bounds::{self, BoundsParams};
use vrvw::lattice::{d_a_star_plus, save_fields, NamedField};
use vrvw::linalg::InnerSpace;
use vrvw::solver::{
    index_formula, index_hypothesis, residual, solve, solve_in_slice, Configuration, CoulombSlice,
    Residual, SolveReport, Tangent,
};
use vrvw::PerturbationParams;

use crate::config::{Problem, RunConfig};
use crate::CliError;

/// A fully specified solve: parameters, start, optional target and slice.
pub struct Prepared {
    pub params: PerturbationParams,
    pub init: Configuration,
    pub target: Option<Residual>,
    pub slice: CoulombSlice,
    /// The manufactured solution, when there is one.
    pub exact: Option<Configuration>,
}

/// Draws the start (and manufactured data) from `cfg.solver.seed`.
pub fn prepare(cfg: &RunConfig) -> Result<Prepared, CliError> {
    let g = cfg.grid()?;
    let params = cfg.params()?;
    let amp = cfg.solver.init_amplitude;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.solver.seed);
    let star = Configuration::smooth_random(g, amp, amp, &mut rng);
    Ok(match cfg.solver.problem {
        Problem::Homogeneous => Prepared {
            params,
            slice: CoulombSlice::through(&star),
            init: star,
            target: None,
            exact: None,
        },
        Problem::Manufactured { perturbation } => {
            let target = residual(&params, &star, None)?;
            let mut noise = Tangent::random(g, 1.0, &mut rng);
            let size = (star.a.l2_norm_sq() + star.b.l2_norm_sq()).sqrt();
            let len = noise.l2_norm();
            if len > 0.0 {
                noise.scale(perturbation * size / len);
            }
            Prepared {
                params,
                init: star.displaced(1.0, &noise),
                target: Some(target),
                slice: CoulombSlice::through(&star),
                exact: Some(star),
            }
        }
    })
}

pub fn run_solve(cfg: &RunConfig) -> Result<(Configuration, SolveReport), CliError> {
    let prep = prepare(cfg)?;
    Ok(solve_in_slice(&prep.params, &prep.init, prep.target.as_ref(), &prep.slice, &cfg.solve_options())?)
}

pub fn write_solution(path: &std::path::Path, c: &Configuration) -> Result<(), CliError> {
    save_fields(path, &[NamedField::new("A", c.a.clone()), NamedField::new("B", c.b.clone())])?;
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serialises");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub t: f64,
    pub sup_b: f64,
    pub l2_da_star_b: f64,
    pub c_upper: f64,
    pub k_upper: f64,
    pub residual: f64,
    pub converged: bool,
}

pub const SCAN_HEADER: &str = "t,sup_B,l2_dAstarB,c_upper,k_upper,residual,converged";

/// `steps` log-spaced values from `t_min` to `t_max`, both included.
pub fn log_grid(t_min: f64, t_max: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if steps < 2 {
        return Err(CliError::Usage(format!("--steps must be at least 2, got {steps}")));
    }
    if !(t_min > 0.0 && t_max > t_min && t_max.is_finite()) {
        return Err(CliError::Usage(format!("need 0 < t-min < t-max, got {t_min}, {t_max}")));
    }
    let ratio = (t_max / t_min).ln();
    Ok((0..steps)
        .map(|k| {
            if k == steps - 1 {
                t_max
            } else {
                t_min * (ratio * k as f64 / (steps - 1) as f64).exp()
            }
        })
        .collect())
}

/// Homogeneous solves over a `t` grid, all from the same seeded start.
/// A row whose solve fails is recorded with NaN measurements.
pub fn scan_t(cfg: &RunConfig, ts: &[f64]) -> Result<Vec<ScanRow>, CliError> {
    let g = cfg.grid()?;
    let amp = cfg.solver.init_amplitude;
    let init = Configuration::smooth_random(g, amp, amp, &mut ChaCha8Rng::seed_from_u64(cfg.solver.seed));
    let opts = cfg.solve_options();
    ts.iter()
        .map(|&t| {
            let p = cfg.params_at(t)?;
            let bp = BoundsParams::from_params(&p, cfg.bounds.lambda_x, g.volume(), 0.0)?;
            let c_upper = bounds::c_upper(&bp)?;
            let k_upper = bounds::k_upper(&bp)?;
            let measured = solve(&p, &init, None, &opts).and_then(|(c, rep)| {
                Ok((c.b.linf_norm(), d_a_star_plus(&c.a, &c.b)?.l2_norm(), rep))
            });
            Ok(match measured {
                Ok((sup_b, l2, rep)) => ScanRow {
                    t,
                    sup_b,
                    l2_da_star_b: l2,
                    c_upper,
                    k_upper,
                    residual: rep.residual_l2,
                    converged: rep.converged(),
                },
                Err(_) => ScanRow {
                    t,
                    sup_b: f64::NAN,
                    l2_da_star_b: f64::NAN,
                    c_upper,
                    k_upper,
                    residual: f64::NAN,
                    converged: false,
                },
            })
        })
        .collect()
}

/// CSV with 17 significant digits per number.
pub fn write_scan_csv<W: Write>(rows: &[ScanRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{SCAN_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            r.t, r.sup_b, r.l2_da_star_b, r.c_upper, r.k_upper, r.residual, r.converged
        )?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndexReport {
    pub kappa: f64,
    pub b1: i64,
    pub b2plus: i64,
    pub index: i64,
    /// `κ ≥ ⅜(1 − b₁ + b₂⁺)`.
    pub hypothesis: bool,
}

pub fn index_report(kappa: f64, b1: i64, b2plus: i64) -> Result<IndexReport, CliError> {
    if !kappa.is_finite() {
        return Err(CliError::Usage(format!("kappa must be finite, got {kappa}")));
    }
    Ok(IndexReport {
        kappa,
        b1,
        b2plus,
        index: index_formula(kappa, b1, b2plus),
        hypothesis: index_hypothesis(kappa, b1, b2plus),
    })
}
