//! Pointwise algebra against brute-force oracles built from explicit
//! matrices: Pauli matrices for su(2) and antisymmetric 4×4 arrays for 2-forms.

use nalgebra::{Complex, Matrix2, Matrix3, Rotation3, Vector3};
use proptest::prelude::*;
use vrvw::algebra::{lambda_tau, diagonal_block_determinant, GaugedForm, LieVector, SelfDual2Form};

type C = Complex<f64>;
type Form2 = [[f64; 4]; 4];

/// `η_a = −i σ_a`, so `[η₁, η₂] = 2η₃` and `−½ tr(η_a η_b) = δ_ab`.
fn eta(a: usize) -> Matrix2<C> {
    let (o, z, i) = (C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 1.0));
    let pauli = match a {
        0 => Matrix2::new(z, o, o, z),
        1 => Matrix2::new(z, -i, i, z),
        _ => Matrix2::new(o, z, z, -o),
    };
    pauli * (-i)
}

fn to_matrix(v: &LieVector) -> Matrix2<C> {
    (0..3).map(|a| eta(a) * C::new(v.0[a], 0.0)).sum()
}

/// Coordinates from `⟨ξ, η⟩ = −½ tr(ξη)`.
fn from_matrix(m: &Matrix2<C>) -> LieVector {
    LieVector(std::array::from_fn(|a| -0.5 * (m * eta(a)).trace().re))
}

fn oracle_lie_bracket(u: &LieVector, v: &LieVector) -> LieVector {
    let (mu, mv) = (to_matrix(u), to_matrix(v));
    from_matrix(&(mu * mv - mv * mu))
}

fn sigma(j: usize) -> Form2 {
    let mut f = [[0.0; 4]; 4];
    let mut set = |i: usize, k: usize, v: f64| {
        f[i][k] = v;
        f[k][i] = -v;
    };
    match j {
        0 => {
            set(0, 1, 1.0);
            set(2, 3, 1.0);
        }
        1 => {
            set(0, 2, 1.0);
            set(3, 1, 1.0);
        }
        _ => {
            set(0, 3, 1.0);
            set(1, 2, 1.0);
        }
    }
    f
}

fn form_of(s: &SelfDual2Form) -> Form2 {
    let mut f = [[0.0; 4]; 4];
    for j in 0..3 {
        let sj = sigma(j);
        for (row, srow) in f.iter_mut().zip(sj.iter()) {
            for (x, y) in row.iter_mut().zip(srow) {
                *x += s.0[j] * y;
            }
        }
    }
    f
}

/// `α·β = Σ_{i<k} α_ik β_ik`.
fn form_inner(a: &Form2, b: &Form2) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        for k in i + 1..4 {
            s += a[i][k] * b[i][k];
        }
    }
    s
}

/// `α • β = −Σ_i (ι_{e_i} α) ∧ (ι_{e_i} β)` for 2-forms.
fn oracle_dot_forms(a: &Form2, b: &Form2) -> Form2 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        let (u, v) = (a[i], b[i]);
        for j in 0..4 {
            for k in 0..4 {
                out[j][k] -= u[j] * v[k] - u[k] * v[j];
            }
        }
    }
    out
}

fn project_self_dual(f: &Form2) -> SelfDual2Form {
    SelfDual2Form(std::array::from_fn(|j| form_inner(f, &sigma(j)) / form_inner(&sigma(j), &sigma(j))))
}

/// `[B • Ψ]` expanded over the basis with both oracles.
fn oracle_dot_bracket(b: &GaugedForm, psi: &GaugedForm) -> GaugedForm {
    let mut out = Matrix3::zeros();
    for a in 0..3 {
        for j in 0..3 {
            for c in 0..3 {
                for k in 0..3 {
                    let coef = b.0[(a, j)] * psi.0[(c, k)];
                    if coef == 0.0 {
                        continue;
                    }
                    let lie = oracle_lie_bracket(&LieVector::basis(a), &LieVector::basis(c));
                    let form = project_self_dual(&oracle_dot_forms(&sigma(j), &sigma(k)));
                    for x in 0..3 {
                        for y in 0..3 {
                            out[(x, y)] += coef * lie.0[x] * form.0[y];
                        }
                    }
                }
            }
        }
    }
    GaugedForm(out)
}

fn gauged() -> impl Strategy<Value = GaugedForm> {
    prop::array::uniform9(-2.0..2.0f64).prop_map(|v| GaugedForm::from_row_major(&v))
}

fn rotation() -> impl Strategy<Value = Matrix3<f64>> {
    prop::array::uniform3(-3.0..3.0f64)
        .prop_map(|v| *Rotation3::new(Vector3::new(v[0], v[1], v[2])).matrix())
}

fn rel_close(a: &Matrix3<f64>, b: &Matrix3<f64>, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

#[test]
fn sigma_basis_is_self_dual_and_orthogonal() {
    for j in 0..3 {
        for k in 0..3 {
            let expected = if j == k { 2.0 } else { 0.0 };
            assert_eq!(form_inner(&sigma(j), &sigma(k)), expected);
        }
    }
}

#[test]
fn form_product_matches_interior_wedge_definition() {
    for j in 0..3 {
        for k in 0..3 {
            let oracle = project_self_dual(&oracle_dot_forms(&sigma(j), &sigma(k)));
            let got = SelfDual2Form::basis(j).dot_forms(&SelfDual2Form::basis(k));
            for x in 0..3 {
                assert!((oracle.0[x] - got.0[x]).abs() < 1e-14, "σ{j}•σ{k}");
            }
        }
    }
}

#[test]
fn form_inner_matches_exterior_inner_product() {
    let a = SelfDual2Form([0.3, -1.2, 0.7]);
    let b = SelfDual2Form([1.1, 0.4, -0.5]);
    assert!((a.inner(&b) - form_inner(&form_of(&a), &form_of(&b))).abs() < 1e-14);
}

#[test]
fn lie_bracket_matches_pauli_commutator() {
    for a in 0..3 {
        for b in 0..3 {
            let got = LieVector::basis(a).bracket(&LieVector::basis(b));
            let oracle = oracle_lie_bracket(&LieVector::basis(a), &LieVector::basis(b));
            for x in 0..3 {
                assert!((got.0[x] - oracle.0[x]).abs() < 1e-14);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn dot_bracket_matches_oracle(b in gauged(), psi in gauged()) {
        let got = b.dot_bracket(&psi).0;
        let oracle = oracle_dot_bracket(&b, &psi).0;
        prop_assert!(rel_close(&got, &oracle, 1e-12));
    }

    #[test]
    fn dot_bracket_is_symmetric(b in gauged(), psi in gauged()) {
        prop_assert!(rel_close(&b.dot_bracket(&psi).0, &psi.dot_bracket(&b).0, 1e-13));
    }

    #[test]
    fn closed_forms_of_quadratic_and_quartic(b in gauged()) {
        prop_assert!(rel_close(&b.self_dot_bracket().0, &(-8.0 * b.cofactor()), 1e-13));
        let bb = b.dot_bracket(&b);
        let quartic = bb.dot_bracket(&bb).0;
        prop_assert!(rel_close(&b.double_bracket().0, &quartic, 1e-12));
        prop_assert!(rel_close(&quartic, &(-512.0 * b.0.determinant() * b.0), 1e-12));
    }

    #[test]
    fn inner_is_twice_frobenius(b in gauged()) {
        prop_assert!((b.norm_sq() - 2.0 * b.0.norm_squared()).abs() <= 1e-13 * (1.0 + b.norm_sq()));
    }

    #[test]
    fn equivariance_under_both_rotations(b in gauged(), psi in gauged(), r in rotation(), s in rotation()) {
        let lhs = b.rotate(&r, &s).dot_bracket(&psi.rotate(&r, &s)).0;
        let rhs = b.dot_bracket(&psi).rotate(&r, &s).0;
        prop_assert!(rel_close(&lhs, &rhs, 1e-12));
        prop_assert!((b.rotate(&r, &s).norm_sq() - b.norm_sq()).abs() <= 1e-12 * (1.0 + b.norm_sq()));
    }

    #[test]
    fn quadratic_pointwise_inequality(b in gauged()) {
        let lhs = (b.self_dot_bracket().0 * 0.125).norm_squared() * 2.0;
        prop_assert!(lhs <= b.norm_sq().powi(2) / 6.0 * (1.0 + 1e-12));
    }

    #[test]
    fn lambda_tau_majorises(b in gauged(), t in prop::array::uniform9(-2.0..2.0f64)) {
        let tau = Matrix3::from_row_slice(&t);
        let lhs = -b.inner(&b.double_bracket().tau_apply(&tau));
        prop_assert!(lhs <= lambda_tau(&tau) * b.norm().powi(5) * (1.0 + 1e-12));
    }

    #[test]
    fn normal_form_reconstructs(b in gauged()) {
        let nf = b.svd_normal_form();
        prop_assert!(rel_close(&nf.reconstruct().0, &b.0, 1e-12));
    }

    #[test]
    fn scalar_dot_pair_is_adjoint_of_lie_bracket(b in gauged(), psi in gauged(), xi in prop::array::uniform3(-2.0..2.0f64)) {
        // ⟨[B, ξ], Ψ⟩ = ⟨ξ, [Ψ · B]⟩ with the inner products of each factor.
        let xi = LieVector(xi);
        let lhs = b.lie_bracket(&xi).inner(&psi);
        let rhs = xi.dot(&psi.scalar_dot_pair(&b));
        prop_assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + lhs.abs()));
    }
}

#[test]
fn equality_case_of_pointwise_inequality() {
    for d in [0.3, 1.0, 2.5] {
        for signs in [(1.0, 1.0, 1.0), (1.0, -1.0, 1.0), (-1.0, -1.0, -1.0)] {
            let b = GaugedForm::diag(d * signs.0, d * signs.1, d * signs.2);
            let lhs = (b.self_dot_bracket().0 * 0.125).norm_squared() * 2.0;
            let rhs = b.norm_sq().powi(2) / 6.0;
            assert!((lhs - rhs).abs() <= 1e-9 * rhs);
        }
    }
}

#[test]
fn rank_three_forcing_instances() {
    assert_eq!(diagonal_block_determinant(&GaugedForm::diag(1.0, 2.0, 3.0)).unwrap(), 12.0);
    assert_eq!(GaugedForm::diag(1.0, 1.0, 0.0).m_b_kernel_dim(1e-10), 3);
    let rank_two = GaugedForm::diag(0.7, -1.3, 0.0).rotate(
        Rotation3::new(Vector3::new(0.2, 0.5, -0.1)).matrix(),
        Rotation3::new(Vector3::new(-0.4, 0.3, 0.9)).matrix(),
    );
    assert!(rank_two.m_b_kernel_dim(1e-10) >= 1);
}
