//! Damped Gauss-Newton on `½‖residual‖²` restricted to the Coulomb slice.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::assemble::{tangent_from_vec, ROWS_PER_SITE};
use super::precond::{scale_rows, FourierPreconditioner};
use super::{
    d0_adjoint, d0_apply, d1_adjoint, d1_apply, residual, Configuration, CoulombSlice, Residual,
    Tangent,
};
use crate::lattice::ScalarLieField;
use crate::algebra::PerturbationParams;
use crate::error::{Error, Result};
use crate::linalg::{conjugate_gradient, gmres, CgOutcome, InnerSpace, KrylovBasis};

/// Armijo sufficient-decrease constant.
pub const ARMIJO_C: f64 = 1e-4;
/// Smallest backtracking step before the iteration is declared stalled.
pub const MIN_STEP: f64 = 1.0 / (1u64 << 40) as f64;

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    pub max_iters: usize,
    /// Target L² norm of the residual.
    pub tol: f64,
    /// Recorded in the report; the solver itself is deterministic.
    pub seed: u64,
    /// Armijo backtracking (c = 1e-4, shrink ½, first trial 1). When disabled
    /// full Gauss-Newton steps are taken.
    pub line_search: bool,
    /// Iteration cap of each inner Krylov solve.
    pub krylov_max_iters: usize,
    /// GMRES restart length.
    pub krylov_restart: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iters: 500,
            tol: 1e-8,
            seed: 0,
            line_search: true,
            krylov_max_iters: 3000,
            krylov_restart: 500,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Termination {
    Converged,
    Stalled,
    Budget,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Termination::Converged => "converged",
            Termination::Stalled => "stalled",
            Termination::Budget => "budget",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub residual_l2: f64,
    /// Energy `½‖r‖²` before the first and after every iteration.
    pub energy: Vec<f64>,
    pub reason: Termination,
    pub seed: u64,
    /// Wall-clock seconds; excluded from the JSON form so reruns are byte-identical.
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.reason == Termination::Converged
    }

    pub fn energy_monotone(&self) -> bool {
        self.energy.windows(2).all(|w| w[1] <= w[0])
    }
}

/// Removes the `range(d⁰)` component: `δ − d⁰ξ` with `d⁰*d⁰ξ = d⁰*δ`.
pub fn project_to_slice(c: &Configuration, d: &Tangent, max_iter: usize) -> Result<Tangent> {
    let rhs = d0_adjoint(c, d)?;
    let op = |xi: &ScalarLieField| {
        d0_adjoint(c, &d0_apply(c, xi).expect("same grid")).expect("same grid")
    };
    let (xi, _) = conjugate_gradient(op, &rhs, 1e-10, max_iter);
    let mut out = d.clone();
    out.axpy(-1.0, &d0_apply(c, &xi)?);
    Ok(out)
}

/// Relative singular-value floor of the Fourier preconditioner.
const PRECOND_FLOOR: f64 = 1e-3;

/// Residual of the equations together with the slice defect.
struct State {
    r: Residual,
    gauge: ScalarLieField,
}

impl State {
    fn eval(
        p: &PerturbationParams,
        c: &Configuration,
        target: Option<&Residual>,
        slice: &CoulombSlice,
    ) -> Result<Self> {
        Ok(State { r: residual(p, c, target)?, gauge: slice.defect(c)? })
    }

    fn norm_sq(&self) -> f64 {
        self.r.l2_norm_sq() + self.gauge.l2_norm_sq()
    }
}

/// Linearised, preconditioned step equations `d¹δ = −r`, `d⁰*_{ref}δ = −g`
/// in the variable `y` with `δ = P y`.
///
/// Rows are rescaled by `h²` (first equation) and `h` (slice condition) so all
/// blocks carry the units of the second equation; the solution is unaffected.
struct StepSystem<'a> {
    p: &'a PerturbationParams,
    c: &'a Configuration,
    slice: &'a CoulombSlice,
    pre: FourierPreconditioner,
    rhs: Vec<f64>,
}

impl<'a> StepSystem<'a> {
    fn new(
        p: &'a PerturbationParams,
        c: &'a Configuration,
        slice: &'a CoulombSlice,
        state: &State,
    ) -> Result<Self> {
        let g = *c.grid();
        let mut rhs = Vec::with_capacity(ROWS_PER_SITE * g.sites());
        rhs.extend_from_slice(state.r.r1.data());
        rhs.extend_from_slice(state.r.r2.data());
        rhs.extend_from_slice(state.gauge.data());
        scale_rows(&g, &mut rhs);
        rhs.iter_mut().for_each(|v| *v = -*v);
        let pre = FourierPreconditioner::new(p, c, PRECOND_FLOOR)?;
        Ok(StepSystem { p, c, slice, pre, rhs })
    }

    fn apply(&self, y: &[f64]) -> Vec<f64> {
        let g = *self.c.grid();
        let d = tangent_from_vec(g, &self.pre.apply(y)).expect("layout");
        let r = d1_apply(self.p, self.c, &d).expect("same grid");
        let mut out = Vec::with_capacity(self.rhs.len());
        out.extend_from_slice(r.r1.data());
        out.extend_from_slice(r.r2.data());
        out.extend_from_slice(d0_adjoint(&self.slice.reference, &d).expect("same grid").data());
        scale_rows(&g, &mut out);
        out
    }

    /// Inexact Gauss-Newton direction by restarted GMRES.
    fn newton(&self, rel_tol: f64, opts: &SolveOptions) -> Result<(Tangent, CgOutcome)> {
        let (y, out) = gmres(
            |y| self.apply(y),
            &self.rhs,
            rel_tol,
            opts.krylov_restart,
            opts.krylov_max_iters,
        );
        Ok((self.pre.apply_tangent(&y)?, out))
    }

    /// Levenberg-Marquardt directions `argmin ‖Jy + r‖² + μ‖y‖²` over one
    /// Krylov basis, for `μ = σ₁²·10⁻ʲ`, largest damping first.
    fn damped(&self, rel_tol: f64, opts: &SolveOptions) -> Result<Vec<Tangent>> {
        let kb = KrylovBasis::build(|y| self.apply(y), &self.rhs, rel_tol, opts.krylov_restart);
        let s2 = kb.largest_singular_value().powi(2);
        (0..=LM_DECADES)
            .map(|j| self.pre.apply_tangent(&kb.damped_solution(s2 * 10f64.powi(-(j as i32)), &self.rhs)))
            .collect()
    }
}

/// Accepted Newton steps shorter than this trigger the damped fallback.
const LM_TRIGGER: f64 = 1.0 / 16.0;
/// Number of damping decades tried by the fallback.
const LM_DECADES: usize = 16;

/// [`solve_in_slice`] with the slice through `init`.
pub fn solve(
    p: &PerturbationParams,
    init: &Configuration,
    target: Option<&Residual>,
    opts: &SolveOptions,
) -> Result<(Configuration, SolveReport)> {
    solve_in_slice(p, init, target, &CoulombSlice::through(init), opts)
}

/// Minimises `½‖residual(p, c, target)‖² + ½‖d⁰*_{ref}(c − ref) − w‖²`
/// from `init`, i.e. solves the equations on the Coulomb slice.
///
/// Each step takes the inexact Gauss-Newton direction of the square system
/// (see [`newton_direction`]) and backtracks until the Armijo condition holds.
/// A non-descent direction is replaced by the negative gradient. The reported
/// residual includes the slice defect.
pub fn solve_in_slice(
    p: &PerturbationParams,
    init: &Configuration,
    target: Option<&Residual>,
    slice: &CoulombSlice,
    opts: &SolveOptions,
) -> Result<(Configuration, SolveReport)> {
    p.validate()?;
    if !(opts.tol >= 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be nonnegative, got {}", opts.tol)));
    }
    init.a.same_grid(&slice.reference.a)?;
    let start = Instant::now();
    let mut c = init.clone();
    let mut state = State::eval(p, &c, target, slice)?;
    let mut e = 0.5 * state.norm_sq();
    let r0 = state.norm_sq().sqrt();
    let mut energies = vec![e];
    let mut iterations = 0;

    let reason = loop {
        let rn = state.norm_sq().sqrt();
        if rn <= opts.tol {
            break Termination::Converged;
        }
        if iterations >= opts.max_iters {
            break Termination::Budget;
        }
        if !rn.is_finite() {
            break Termination::Stalled;
        }

        let mut grad = d1_adjoint(p, &c, &state.r)?;
        grad.axpy(1.0, &d0_apply(&slice.reference, &state.gauge)?);
        let forcing = (rn / r0).clamp(1e-12, 1e-1);
        let sys = StepSystem::new(p, &c, slice, &state)?;
        let (mut delta, _) = sys.newton(forcing, opts)?;
        let mut slope = grad.dot(&delta);
        if !(slope < 0.0) {
            delta = grad.clone();
            delta.scale(-1.0);
            slope = -grad.dot(&grad);
        }

        let mut alpha = 1.0;
        let mut accepted = loop {
            let trial = c.displaced(alpha, &delta);
            let s_trial = State::eval(p, &trial, target, slice)?;
            let e_trial = 0.5 * s_trial.norm_sq();
            if !opts.line_search || e_trial <= e + ARMIJO_C * alpha * slope {
                break Some((trial, s_trial, e_trial));
            }
            alpha *= 0.5;
            if alpha < MIN_STEP {
                break None;
            }
        };
        if opts.line_search && (accepted.is_none() || alpha < LM_TRIGGER) {
            // Near a singular Jacobian the Newton step is long and nearly
            // orthogonal to the gradient; damped directions stay bounded.
            for d in sys.damped(forcing, opts)? {
                let slope = grad.dot(&d);
                if !(slope < 0.0) {
                    continue;
                }
                let trial = c.displaced(1.0, &d);
                let s_trial = State::eval(p, &trial, target, slice)?;
                let e_trial = 0.5 * s_trial.norm_sq();
                let best = accepted.as_ref().map_or(e, |a| a.2);
                if e_trial <= e + ARMIJO_C * slope && e_trial < best {
                    accepted = Some((trial, s_trial, e_trial));
                }
            }
        }
        let Some((trial, s_trial, e_trial)) = accepted else {
            break Termination::Stalled;
        };
        c = trial;
        state = s_trial;
        e = e_trial;
        energies.push(e);
        iterations += 1;
    };

    let report = SolveReport {
        iterations,
        residual_l2: state.norm_sq().sqrt(),
        energy: energies,
        reason,
        seed: opts.seed,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok((c, report))
}
