//! Randomised identity checks behind `verify-algebra` and `verify-operators`.

use nalgebra::{Matrix3, Rotation3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vrvw::algebra::lambda_tau;
use vrvw::lattice::{
    chern_weil, cov_d_scalar, cov_d_scalar_adjoint, curvature_norms, d_a_plus, d_a_star_plus,
    ConnectionField, OneFormField, PlusFormField, ScalarLieField, TorusGrid,
};
use vrvw::linalg::InnerSpace;
use vrvw::solver::{
    d0_adjoint, d0_apply, d1_apply, energy, energy_gradient, residual, Configuration, Residual,
    Tangent,
};
use vrvw::{GaugedForm, PerturbationParams};

/// Relative tolerance of the algebra identities.
pub const ALGEBRA_TOL: f64 = 1e-12;

/// Outcome of one identity over all samples.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub max_error: f64,
    pub tol: f64,
}

impl IdentityCheck {
    pub fn pass(&self) -> bool {
        self.max_error <= self.tol
    }
}

/// The pointwise operations under test. Replaceable so a deliberately broken
/// implementation can be checked to fail.
#[derive(Clone, Copy)]
pub struct AlgebraOps {
    pub dot_bracket: fn(&GaugedForm, &GaugedForm) -> GaugedForm,
    pub self_dot_bracket: fn(&GaugedForm) -> GaugedForm,
    pub double_bracket: fn(&GaugedForm) -> GaugedForm,
    pub norm_sq: fn(&GaugedForm) -> f64,
}

impl Default for AlgebraOps {
    fn default() -> Self {
        AlgebraOps {
            dot_bracket: GaugedForm::dot_bracket,
            self_dot_bracket: GaugedForm::self_dot_bracket,
            double_bracket: GaugedForm::double_bracket,
            norm_sq: GaugedForm::norm_sq,
        }
    }
}

fn rel(a: &Matrix3<f64>, b: &Matrix3<f64>) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

fn rel_scalar(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Entries uniform in `[-s, s]` with `s` log-uniform in `[0.1, 10]`.
pub fn random_form<R: Rng>(rng: &mut R) -> GaugedForm {
    let s = 10f64.powf(rng.gen_range(-1.0..1.0));
    GaugedForm(Matrix3::from_fn(|_, _| s * rng.gen_range(-1.0..1.0)))
}

fn random_rotation<R: Rng>(rng: &mut R) -> Matrix3<f64> {
    let v = Vector3::from_fn(|_, _| rng.gen_range(-3.0..3.0));
    *Rotation3::new(v).matrix()
}

/// Runs every algebra identity on `trials` seeded samples.
pub fn verify_algebra(trials: usize, seed: u64, ops: &AlgebraOps) -> Vec<IdentityCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = [
        "quadratic_cofactor",
        "quadratic_self_pairing",
        "diagonal_quadratic",
        "diagonal_quartic",
        "quartic_determinant",
        "quartic_composition",
        "norm_frobenius",
        "bracket_symmetry",
        "rotation_equivariance",
        "pointwise_inequality",
        "lambda_tau_majorant",
    ];
    let mut worst = [0.0f64; 11];
    for _ in 0..trials {
        let b = random_form(&mut rng);
        let psi = random_form(&mut rng);
        let d = [0, 1, 2].map(|_| 10f64.powf(rng.gen_range(-1.0..1.0)) * rng.gen_range(-1.0..1.0));
        let diag = GaugedForm::diag(d[0], d[1], d[2]);
        let (r, s) = (random_rotation(&mut rng), random_rotation(&mut rng));
        let tau = Matrix3::from_fn(|_, _| rng.gen_range(-2.0..2.0));

        let sdb = (ops.self_dot_bracket)(&b);
        let quartic = (ops.double_bracket)(&b);
        let q_diag = Matrix3::from_diagonal(&Vector3::new(-8.0 * d[1] * d[2], -8.0 * d[0] * d[2], -8.0 * d[0] * d[1]));
        let p = d[0] * d[1] * d[2];
        let quart_diag = Matrix3::from_diagonal(&Vector3::new(-512.0 * p * d[0], -512.0 * p * d[1], -512.0 * p * d[2]));
        let lhs_ineq = (ops.norm_sq)(&GaugedForm(sdb.0 * 0.125));
        let rhs_ineq = (ops.norm_sq)(&b).powi(2) / 6.0;
        let norm5 = (ops.norm_sq)(&b).powf(2.5);
        let pairing = -b.inner(&GaugedForm(tau * quartic.0));
        let bound = lambda_tau(&tau) * norm5;

        let errors = [
            rel(&sdb.0, &(-8.0 * b.cofactor())),
            rel(&sdb.0, &(ops.dot_bracket)(&b, &b).0),
            rel(&(ops.self_dot_bracket)(&diag).0, &q_diag),
            rel(&(ops.double_bracket)(&diag).0, &quart_diag),
            rel(&quartic.0, &(-512.0 * b.0.determinant() * b.0)),
            rel(&quartic.0, &(ops.dot_bracket)(&sdb, &sdb).0),
            rel_scalar((ops.norm_sq)(&b), 2.0 * b.0.norm_squared()),
            rel(&(ops.dot_bracket)(&b, &psi).0, &(ops.dot_bracket)(&psi, &b).0),
            rel(
                &(ops.dot_bracket)(&b.rotate(&r, &s), &psi.rotate(&r, &s)).0,
                &(ops.dot_bracket)(&b, &psi).rotate(&r, &s).0,
            ),
            ((lhs_ineq - rhs_ineq) / rhs_ineq).max(0.0),
            if bound > 0.0 { ((pairing - bound) / bound).max(0.0) } else { pairing.max(0.0) },
        ];
        for (w, e) in worst.iter_mut().zip(errors) {
            // NaN counts as a failure.
            *w = if e.is_nan() { f64::INFINITY } else { w.max(e) };
        }
    }
    names
        .iter()
        .zip(worst)
        .map(|(&name, max_error)| IdentityCheck { name, max_error, tol: ALGEBRA_TOL })
        .collect()
}

fn random_params<R: Rng>(rng: &mut R) -> PerturbationParams {
    let tau = Matrix3::identity() + Matrix3::from_fn(|_, _| 0.3 * rng.gen_range(-0.5..0.5));
    PerturbationParams::new(rng.gen_range(0.5..1.5), tau).expect("positive t")
}

/// Discrete operator identities on `trials` random configurations of an
/// `n⁴` grid with spacing `h`.
pub fn verify_operators(n: usize, h: f64, trials: usize, seed: u64) -> vrvw::Result<Vec<IdentityCheck>> {
    let g = TorusGrid::new(n, h)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = [0.0f64; 7];
    for _ in 0..trials {
        let p = random_params(&mut rng);
        let a = ConnectionField::random(g, 0.8, &mut rng);
        let w = OneFormField::random(g, 1.0, &mut rng);
        let b = PlusFormField::random(g, 1.0, &mut rng);
        let xi = ScalarLieField::random(g, 1.0, &mut rng);
        let dstar = d_a_star_plus(&a, &b)?;
        let c = Configuration::new(a.clone(), b.clone())?;
        let d = Tangent::random(g, 0.5, &mut rng);

        let plus_adj = rel_scalar(d_a_plus(&a, &w)?.dot(&b), w.dot(&dstar));
        let scalar_adj = rel_scalar(cov_d_scalar(&a, &xi)?.dot(&w), xi.dot(&cov_d_scalar_adjoint(&a, &w)?));
        let weitzenbock = rel_scalar(d_a_plus(&a, &dstar)?.dot(&b), dstar.l2_norm_sq());
        let d0_adj = rel_scalar(d0_apply(&c, &xi)?.dot(&d), xi.dot(&d0_adjoint(&c, &d)?));
        let norms = curvature_norms(&a);
        let cw = rel_scalar(norms.minus - norms.plus, 8.0 * std::f64::consts::PI.powi(2) * chern_weil(&a));

        // Taylor remainder of the linearisation at s = 1e-2 and 1e-3.
        let small = Configuration::new(a.scaled(0.5), b.scaled(0.5))?;
        let r0 = residual(&p, &small, None)?;
        let lin = d1_apply(&p, &small, &d)?;
        let remainder = |s: f64| -> vrvw::Result<f64> {
            let mut e = residual(&p, &small.displaced(s, &d), None)?;
            e.axpy(-1.0, &r0);
            e.axpy(-s, &lin);
            Ok(e.l2_norm())
        };
        let slope = (remainder(1e-2)? / remainder(1e-3)?).log10();

        let target = Residual { r1: PlusFormField::random(g, 0.3, &mut rng), r2: PlusFormField::random(g, 0.3, &mut rng) };
        let analytic = energy_gradient(&p, &small, Some(&target))?.dot(&d);
        let step = 1e-5;
        let fd = (energy(&p, &small.displaced(step, &d), Some(&target))?
            - energy(&p, &small.displaced(-step, &d), Some(&target))?)
            / (2.0 * step);
        let grad = rel_scalar(analytic, fd);

        for (w, e) in worst.iter_mut().zip([plus_adj, scalar_adj, weitzenbock, d0_adj, cw, (slope - 2.0).abs(), grad]) {
            *w = if e.is_nan() { f64::INFINITY } else { w.max(e) };
        }
    }
    let table: [(&'static str, f64); 7] = [
        ("d_a_plus_adjoint", 1e-12),
        ("cov_d_scalar_adjoint", 1e-12),
        ("weitzenbock_pairing", 1e-12),
        ("d0_adjoint", 1e-12),
        ("chern_weil_identity", 1e-10),
        ("taylor_order_deviation", 0.1),
        ("gradient_check", 1e-6),
    ];
    Ok(table
        .iter()
        .zip(worst)
        .map(|(&(name, tol), max_error)| IdentityCheck { name, max_error, tol })
        .collect())
}
