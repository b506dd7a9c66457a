//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::{Matrix3, Rotation3, SMatrix, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vrvw::algebra::{diagonal_block_determinant, lambda_tau};
use vrvw::bounds::{self, BoundsParams};
use vrvw::lattice::*;
use vrvw::linalg::InnerSpace;
use vrvw::solver::*;
use vrvw::{Error, GaugedForm, PerturbationParams};
use vrvw_cli::checks::{random_form, verify_algebra, verify_operators, AlgebraOps};
use vrvw_cli::commands::{log_grid, prepare, scan_t, to_json, write_scan_csv};
use vrvw_cli::config::RunConfig;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rel(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

fn rotation(r: &mut ChaCha8Rng) -> Matrix3<f64> {
    *Rotation3::new(Vector3::from_fn(|_, _| r.gen_range(-3.0..3.0))).matrix()
}

fn params(r: &mut ChaCha8Rng) -> PerturbationParams {
    let tau = Matrix3::identity() + Matrix3::from_fn(|_, _| 0.3 * r.gen_range(-0.5..0.5));
    PerturbationParams::new(r.gen_range(0.5..1.5), tau).unwrap()
}

/// Least-squares slope of `ln y` against `ln x`.
fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn sci(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

/// Rank by Gaussian elimination with full pivoting.
fn rank_oracle(m: &SMatrix<f64, 9, 9>, tol: f64) -> usize {
    let mut a = *m;
    let scale = a.amax();
    if scale == 0.0 {
        return 0;
    }
    let mut rank = 0;
    for col in 0..9 {
        let mut best = (rank, col, 0.0);
        for i in rank..9 {
            for j in col..9 {
                if a[(i, j)].abs() > best.2 {
                    best = (i, j, a[(i, j)].abs());
                }
            }
        }
        if best.2 <= tol * scale {
            break;
        }
        a.swap_rows(rank, best.0);
        a.swap_columns(col, best.1);
        for i in rank + 1..9 {
            let f = a[(i, col)] / a[(rank, col)];
            for j in col..9 {
                a[(i, j)] -= f * a[(rank, j)];
            }
        }
        rank += 1;
    }
    rank
}

fn c1_algebra() -> Outcome {
    let start = Instant::now();
    let wanted = ["quadratic_cofactor", "diagonal_quadratic", "diagonal_quartic", "norm_frobenius", "bracket_symmetry"];
    let checks = verify_algebra(10_000, 1, &AlgebraOps::default());
    let secs = start.elapsed().as_secs_f64();
    let mut worst = 0.0f64;
    let mut pass = secs < 10.0;
    for c in checks.iter().filter(|c| wanted.contains(&c.name)) {
        worst = worst.max(c.max_error);
        pass &= c.max_error <= 1e-12;
    }
    outcome(pass, format!("max rel error {worst:.2e} over {} identities, {secs:.2}s", wanted.len()))
}

fn c2_rank_forcing() -> Outcome {
    let start = Instant::now();
    let mut r = rng(2);
    let mut min_sv = f64::INFINITY;
    let mut oracle_ok = true;
    let mut drawn = 0;
    while drawn < 1000 {
        let b = random_form(&mut r);
        if b.0.determinant().abs() < 1e-6 * b.0.norm().powi(3) {
            continue;
        }
        let sv = b.m_b_singular_values();
        min_sv = min_sv.min(sv[8] / sv[0]);
        oracle_ok &= rank_oracle(&b.m_b_matrix(), 1e-12) == 9;
        drawn += 1;
    }
    let d123 = GaugedForm::diag(1.0, 2.0, 3.0);
    let block = Matrix3::from_fn(|i, j| d123.m_b_matrix()[(4 * i, 4 * j)] / -4.0);
    let det_closed = diagonal_block_determinant(&d123).unwrap();
    let det_block = block.determinant();
    let d110 = GaugedForm::diag(1.0, 1.0, 0.0);
    let ker = d110.m_b_kernel_dim(1e-10);
    let ker_oracle = 9 - rank_oracle(&d110.m_b_matrix(), 1e-10);
    let mut singular_ok = true;
    for _ in 0..200 {
        let (u, v) = (rotation(&mut r), rotation(&mut r));
        let rank = r.gen_range(0..=2);
        let d: Vec<f64> = (0..3).map(|k| if k < rank { r.gen_range(0.1..3.0) } else { 0.0 }).collect();
        let b = GaugedForm::diag(d[0], d[1], d[2]).rotate(&u, &v);
        let sv = b.m_b_singular_values();
        singular_ok &= sv[0] == 0.0 || sv[8] <= 1e-12 * sv[0];
        singular_ok &= rank_oracle(&b.m_b_matrix(), 1e-10) < 9;
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = min_sv > 0.0
        && oracle_ok
        && det_closed == 12.0
        && (det_block - 12.0).abs() < 1e-12
        && ker == 3
        && ker_oracle == 3
        && singular_ok
        && secs < 5.0;
    outcome(
        pass,
        format!(
            "min sigma_min/sigma_max {min_sv:.2e}, block det {det_block}, kernel {ker} (oracle {ker_oracle}), rank<=2 singular {singular_ok}, {secs:.2}s"
        ),
    )
}

fn c3_pointwise_inequality() -> Outcome {
    let mut r = rng(3);
    let gap = |b: &GaugedForm| {
        let lhs = GaugedForm(b.self_dot_bracket().0 * 0.125).norm_sq();
        let rhs = b.norm_sq().powi(2) / 6.0;
        (rhs - lhs) / rhs
    };
    let mut violations = 0;
    let mut false_equalities = 0;
    for _ in 0..10_000 {
        let b = random_form(&mut r);
        let g = gap(&b);
        if g < -1e-12 {
            violations += 1;
        }
        let sv = b.0.singular_values();
        let spread = (sv.max() - sv.min()) / sv.max();
        if g <= 1e-9 && spread > 1e-3 {
            false_equalities += 1;
        }
    }
    let mut worst_equal = 0.0f64;
    for _ in 0..1000 {
        let s = 10f64.powf(r.gen_range(-1.0..1.0));
        let signs: Vec<f64> = (0..3).map(|_| if r.gen::<bool>() { s } else { -s }).collect();
        let b = GaugedForm::diag(signs[0], signs[1], signs[2]).rotate(&rotation(&mut r), &rotation(&mut r));
        worst_equal = worst_equal.max(gap(&b).abs());
    }
    let pass = violations == 0 && false_equalities == 0 && worst_equal <= 1e-9;
    outcome(
        pass,
        format!("{violations} violations, {false_equalities} spurious equalities, equal-|B_i| gap {worst_equal:.2e}"),
    )
}

fn c4_lambda_tau() -> Outcome {
    let mut r = rng(4);
    let mut violations = 0;
    let mut tightest = f64::INFINITY;
    for _ in 0..1000 {
        let tau = Matrix3::from_fn(|_, _| r.gen_range(-2.0..2.0));
        let b = random_form(&mut r);
        let pairing = -b.inner(&GaugedForm(tau * b.double_bracket().0));
        let bound = lambda_tau(&tau) * b.norm_sq().powf(2.5);
        if pairing > bound {
            violations += 1;
        }
        tightest = tightest.min((bound - pairing) / bound);
    }
    outcome(violations == 0, format!("{violations} violations, smallest relative margin {tightest:.3e}"))
}

fn c5_adjointness() -> Outcome {
    let start = Instant::now();
    let names = ["d_a_plus_adjoint", "cov_d_scalar_adjoint", "weitzenbock_pairing", "d0_adjoint"];
    let checks = match verify_operators(4, 0.5, 100, 5) {
        Ok(c) => c,
        Err(e) => return outcome(false, e.to_string()),
    };
    let secs = start.elapsed().as_secs_f64();
    let worst = checks.iter().filter(|c| names.contains(&c.name)).map(|c| c.max_error).fold(0.0, f64::max);
    outcome(worst <= 1e-12 && secs < 10.0, format!("max rel error {worst:.2e}, {secs:.2}s"))
}

fn c6_taylor() -> Outcome {
    let g = TorusGrid::new(4, 0.5).unwrap();
    let mut r = rng(6);
    let steps = [1e-2, 1e-3, 1e-4];
    let mut orders = Vec::new();
    for _ in 0..10 {
        let p = params(&mut r);
        let c = Configuration::random(g, 0.4, &mut r);
        let d = Tangent::random(g, 0.5, &mut r);
        let r0 = residual(&p, &c, None).unwrap();
        let lin = d1_apply(&p, &c, &d).unwrap();
        let rem: Vec<f64> = steps
            .iter()
            .map(|&s| {
                let mut e = residual(&p, &c.displaced(s, &d), None).unwrap();
                e.axpy(-1.0, &r0);
                e.axpy(-s, &lin);
                e.l2_norm()
            })
            .collect();
        orders.push(log_slope(&steps, &rem));
    }
    let worst = orders.iter().map(|o| (o - 2.0).abs()).fold(0.0, f64::max);
    let (lo, hi) = orders.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &o| (a.min(o), b.max(o)));
    outcome(worst <= 0.1, format!("orders in [{lo:.4}, {hi:.4}]"))
}

/// Smooth fields of a fixed continuum configuration sampled at each `n`.
fn refinement_series<F: Fn(TorusGrid, &mut ChaCha8Rng) -> f64>(f: F) -> (Vec<f64>, Vec<f64>) {
    let len = 4.0;
    let ns = [4usize, 8, 16];
    let hs: Vec<f64> = ns.iter().map(|&n| len / n as f64).collect();
    let vals = ns.iter().map(|&n| f(TorusGrid::with_length(n, len).unwrap(), &mut rng(7))).collect();
    (hs, vals)
}

fn smooth_params() -> PerturbationParams {
    PerturbationParams::new(1.0, Matrix3::new(1.0, 0.1, 0.0, 0.0, 0.9, 0.2, 0.1, 0.0, 1.1)).unwrap()
}

fn c7_kuranishi_and_covariance() -> Outcome {
    let p = smooth_params();
    let (hs, kd) = refinement_series(|g, r| {
        let c = Configuration::smooth_random(g, 0.3, 0.3, r);
        let xi = ScalarLieField::smooth_random(g, 1.0, r);
        kuranishi_defect(&p, &c, &xi).unwrap() / g.volume().sqrt()
    });
    let (_, cov) = refinement_series(|g, r| {
        let c = Configuration::smooth_random(g, 0.3, 0.3, r);
        // Peak angle stays below π, inside the principal branch of the link logarithm.
        let gauge = RotationField::from_exp(&ScalarLieField::smooth_random(g, 0.3, r));
        let lhs = residual(&p, &c.gauge_transform(&gauge).unwrap(), None).unwrap();
        let mut diff = residual(&p, &c, None).unwrap().rotate(&gauge).unwrap();
        diff.axpy(-1.0, &lhs);
        diff.l2_norm() / g.volume().sqrt()
    });
    let (s1, s2) = (log_slope(&hs, &kd), log_slope(&hs, &cov));
    outcome(
        s1 >= 0.9 && s2 >= 0.9,
        format!("Kuranishi slope {s1:.3} (defects {}), covariance slope {s2:.3} (defects {})",
            sci(&kd),
            sci(&cov)
        ),
    )
}

fn c8_gradient() -> Outcome {
    let g = TorusGrid::new(4, 0.5).unwrap();
    let mut r = rng(8);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let p = params(&mut r);
        let c = Configuration::random(g, 0.4, &mut r);
        let target = Residual { r1: PlusFormField::random(g, 0.3, &mut r), r2: PlusFormField::random(g, 0.3, &mut r) };
        let d = Tangent::random(g, 1.0, &mut r);
        let analytic = energy_gradient(&p, &c, Some(&target)).unwrap().dot(&d);
        let step = 1e-5;
        let fd = (energy(&p, &c.displaced(step, &d), Some(&target)).unwrap()
            - energy(&p, &c.displaced(-step, &d), Some(&target)).unwrap())
            / (2.0 * step);
        worst = worst.max(rel(analytic, fd));
    }
    outcome(worst <= 1e-6, format!("max rel error {worst:.2e}"))
}

const MANUFACTURED: &str = r#"{
    "grid": {"n": 6, "h": 0.5},
    "params": {"t": 1.0, "tau": [[1, 0.1, 0], [0, 0.9, 0.2], [0.1, 0, 1.1]]},
    "solver": {"max_iters": 500, "tol": 1e-8, "seed": 7, "init_amplitude": 0.1,
               "problem": {"kind": "manufactured", "perturbation": 0.01}}
}"#;

fn c9_manufactured() -> Outcome {
    let start = Instant::now();
    let cfg = RunConfig::from_json(MANUFACTURED).unwrap();
    let prep = prepare(&cfg).unwrap();
    let (c, rep) = match solve_in_slice(&prep.params, &prep.init, prep.target.as_ref(), &prep.slice, &cfg.solve_options()) {
        Ok(v) => v,
        Err(e) => return outcome(false, e.to_string()),
    };
    let secs = start.elapsed().as_secs_f64();
    let dist = c.difference(prep.exact.as_ref().unwrap()).unwrap().l2_norm();
    outcome(
        rep.converged() && rep.residual_l2 <= 1e-8 && rep.iterations <= 500 && secs <= 300.0,
        format!(
            "{} after {} iterations, residual {:.2e}, distance to exact {dist:.2e}, {secs:.1}s",
            rep.reason, rep.iterations, rep.residual_l2
        ),
    )
}

fn bisect_root(t: f64, lt: f64, lx: f64) -> f64 {
    let f = |x: f64| 4.0 * t * x.powi(4) - 4.0 * lt * x.powi(3) - lx;
    let (mut lo, mut hi) = (0.0, lt / t + (lx / t).powf(0.25) + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn random_bounds(r: &mut ChaCha8Rng) -> BoundsParams {
    let t = 10f64.powf(r.gen_range(-2.0..4.0));
    let lt = 10f64.powf(r.gen_range(-3.0..2.0));
    let lx = 10f64.powf(r.gen_range(-3.0..2.0));
    BoundsParams::new(t, lt, lx, r.gen_range(0.5..100.0), r.gen_range(0.0..4.0)).unwrap()
}

fn c10_bounds() -> Outcome {
    let mut r = rng(10);
    let mut worst = 0.0f64;
    let mut formula_mismatch = 0;
    for _ in 0..1000 {
        let bp = random_bounds(&mut r);
        let c = bounds::c_upper(&bp).unwrap();
        let oracle = bisect_root(bp.t, bp.lambda_tau, bp.lambda_x);
        worst = worst.max((c - oracle).abs() / oracle.max(1.0));
        let k = (bp.lambda_tau * c.powi(5) * bp.vol).sqrt();
        let allowance = bp.vol * c.powi(4) / (48.0 * PI * PI);
        let bubbles = (bp.m + allowance).floor() as i64;
        let fplus = bp.vol * c.powi(4) / 6.0;
        formula_mismatch += usize::from(bounds::k_upper(&bp).unwrap() != k);
        formula_mismatch += usize::from(bounds::bubble_bound(&bp).unwrap() != bubbles);
        formula_mismatch += usize::from(bounds::fplus_energy_cap(&bp).unwrap() != fplus);
        for l in [0, bubbles / 2, bubbles] {
            let cap = 8.0 * PI * PI * (bp.m - l as f64) + bp.vol * c.powi(4) / 3.0;
            formula_mismatch += usize::from(bounds::curvature_energy_cap(&bp, l).unwrap() != cap);
        }
    }
    let closed_x = BoundsParams::new(3.0, 0.0, 5.0, 1.0, 0.0).unwrap();
    let closed_t = BoundsParams::new(3.0, 5.0, 0.0, 1.0, 0.0).unwrap();
    let closed_ok = bounds::c_upper(&closed_x).unwrap() == (5.0f64 / 12.0).powf(0.25)
        && bounds::c_upper(&closed_t).unwrap() == 5.0 / 3.0;
    let mut sharp_violations = 0;
    for _ in 0..1000 {
        let mut bp = random_bounds(&mut r);
        bp.t = bounds::t_threshold(&bp).unwrap() * r.gen_range(1.0001..50.0);
        if bounds::c_upper(&bp).unwrap() > bounds::sharp_cap(&bp).unwrap() {
            sharp_violations += 1;
        }
    }
    outcome(
        worst <= 1e-10 && closed_ok && sharp_violations == 0 && formula_mismatch == 0,
        format!(
            "bisection error {worst:.2e}, closed forms exact {closed_ok}, {sharp_violations} sharp-cap violations, {formula_mismatch} formula mismatches"
        ),
    )
}

const SCAN: &str = r#"{
    "grid": {"n": 3, "h": 0.5},
    "params": {"t": 1.0, "tau": [[1, 0.1, 0], [0, 0.9, 0.2], [0.1, 0, 1.1]]},
    "solver": {"max_iters": 200, "tol": 1e-10, "seed": 4, "init_amplitude": 0.05}
}"#;

fn c11_decay() -> Outcome {
    let cfg = RunConfig::from_json(SCAN).unwrap();
    let ts = log_grid(1.0, 1e4, 9).unwrap();
    let rows = match scan_t(&cfg, &ts) {
        Ok(rows) => rows,
        Err(e) => return outcome(false, e.to_string()),
    };
    let decreasing = rows.windows(2).all(|w| w[1].c_upper < w[0].c_upper && w[1].k_upper < w[0].k_upper);
    let (first, last) = (&rows[0], &rows[rows.len() - 1]);
    let decayed = last.c_upper < 1e-3 * first.c_upper && last.k_upper < 1e-3 * first.k_upper;
    let converged: Vec<_> = rows.iter().filter(|r| r.converged).collect();
    let within = converged
        .iter()
        .all(|r| r.sup_b <= 1.05 * r.c_upper && r.l2_da_star_b <= 1.05 * r.k_upper);
    let worst = converged
        .iter()
        .map(|r| (r.sup_b / r.c_upper).max(if r.k_upper > 0.0 { r.l2_da_star_b / r.k_upper } else { 0.0 }))
        .fold(0.0, f64::max);
    outcome(
        decreasing && decayed && !converged.is_empty() && within,
        format!(
            "columns decreasing {decreasing}, decay c {:.1e} k {:.1e}, {}/{} rows converged, worst measured/bound {worst:.3e}",
            last.c_upper / first.c_upper,
            last.k_upper / first.k_upper,
            converged.len(),
            rows.len()
        ),
    )
}

fn c12_chern_weil() -> Outcome {
    let mut r = rng(12);
    let mut worst = 0.0f64;
    for n in [3, 4, 5] {
        for _ in 0..5 {
            let a = ConnectionField::random(TorusGrid::new(n, 0.7).unwrap(), 1.0, &mut r);
            let norms = curvature_norms(&a);
            worst = worst.max(rel(norms.minus - norms.plus, 8.0 * PI * PI * chern_weil(&a)));
        }
    }
    let (hs, kappa) = refinement_series(|g, r| chern_weil(&ConnectionField::smooth_random(g, 0.3, r)).abs());
    let slope = log_slope(&hs, &kappa);
    outcome(
        worst <= 1e-10 && slope >= 1.8,
        format!("identity error {worst:.2e}, kappa_est {} slope {slope:.3}", sci(&kappa)),
    )
}

fn c13_index() -> Outcome {
    let torus = index_formula(0.0, 4, 3);
    let sphere = index_formula(1.0, 0, 0);
    let mut mismatches = 0;
    for kappa in -4..=6 {
        for b1 in 0..=6 {
            for b2 in 0..=6 {
                let ok = index_hypothesis(kappa as f64, b1, b2) == (index_formula(kappa as f64, b1, b2) >= 0);
                mismatches += usize::from(!ok);
            }
        }
    }
    outcome(
        torus == 0 && sphere == 5 && mismatches == 0,
        format!("T4 index {torus}, (1,0,0) index {sphere}, {mismatches} hypothesis mismatches over 539 inputs"),
    )
}

fn c14_serialization() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let g = TorusGrid::new(3, 0.37).unwrap();
    let mut r = rng(14);
    let c = Configuration::random(g, 1.0, &mut r);
    let path = dir.path().join("c.field");
    save_fields(&path, &[NamedField::new("A", c.a.clone()), NamedField::new("B", c.b.clone())]).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    let (g2, fields) = load_fields(&path).unwrap();
    let bit_exact = g2 == g
        && fields.len() == 2
        && match (&fields[0].field, &fields[1].field) {
            (AnyField::Connection(a), AnyField::PlusForm(b)) => {
                a.data().iter().zip(c.a.data()).all(|(x, y)| x.to_bits() == y.to_bits())
                    && b.data().iter().zip(c.b.data()).all(|(x, y)| x.to_bits() == y.to_bits())
            }
            _ => false,
        };
    let mut corrupt = bytes.clone();
    corrupt[0] ^= 0xff;
    std::fs::write(&path, &corrupt).unwrap();
    let magic_rejected = matches!(load_fields(&path), Err(Error::BadMagic(_)));
    let mut corrupt = bytes;
    corrupt[4] = corrupt[4].wrapping_add(1);
    std::fs::write(&path, &corrupt).unwrap();
    let version_rejected = matches!(load_fields(&path), Err(Error::VersionMismatch { .. }));

    let cfg = RunConfig::from_json(SCAN).unwrap();
    let ts = log_grid(1.0, 100.0, 3).unwrap();
    let csv = || {
        let mut buf = Vec::new();
        write_scan_csv(&scan_t(&cfg, &ts).unwrap(), &mut buf).unwrap();
        buf
    };
    let csv_same = csv() == csv();
    let small = MANUFACTURED.replace(r#""n": 6"#, r#""n": 3"#);
    let solve_cfg = RunConfig::from_json(&small).unwrap();
    let json = || {
        let prep = prepare(&solve_cfg).unwrap();
        let opts = solve_cfg.solve_options();
        let (_, rep) = solve_in_slice(&prep.params, &prep.init, prep.target.as_ref(), &prep.slice, &opts).unwrap();
        to_json(&rep)
    };
    let json_same = json() == json();
    outcome(
        bit_exact && magic_rejected && version_rejected && csv_same && json_same,
        format!(
            "round-trip bit-exact {bit_exact}, bad magic rejected {magic_rejected}, bad version rejected {version_rejected}, CSV identical {csv_same}, JSON identical {json_same}"
        ),
    )
}

fn main() {
    let criteria: [Criterion; 14] = [
        ("algebra identities", c1_algebra),
        ("rank-three forcing", c2_rank_forcing),
        ("pointwise inequality", c3_pointwise_inequality),
        ("lambda_tau majorant", c4_lambda_tau),
        ("discrete adjointness", c5_adjointness),
        ("linearisation Taylor test", c6_taylor),
        ("Kuranishi defect and gauge covariance", c7_kuranishi_and_covariance),
        ("gradient check", c8_gradient),
        ("manufactured solve", c9_manufactured),
        ("bounds engine", c10_bounds),
        ("decay in t", c11_decay),
        ("Chern-Weil", c12_chern_weil),
        ("index formula", c13_index),
        ("serialization", c14_serialization),
    ];
    let mut failed = Vec::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {name}: {status} ({}) [{:.1}s]", k + 1, o.detail, start.elapsed().as_secs_f64());
        if !o.pass {
            failed.push(k + 1);
        }
    }
    if failed.is_empty() {
        println!("all {} criteria pass", criteria.len());
    } else {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
