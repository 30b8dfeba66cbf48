use gerbe_core::lie::*;
use gerbe_core::linalg::{CMat, C64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn groups() -> Vec<Group> {
    vec![GroupDescriptor::u1(), GroupDescriptor::su2(), GroupDescriptor::so3()]
}

fn elem(g: &Group, c: &[f64]) -> GroupElement {
    exp_map(&AlgebraElement::new(g, c).unwrap())
}

#[test]
fn identity_and_inverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for g in groups() {
        let id = GroupElement::identity(&g);
        for _ in 0..20 {
            let x = GroupElement::new(&g, g.random_matrix(&mut rng, 2.0)).unwrap();
            assert!(mul(&id, &x).unwrap().dist(&x) < 1e-14);
            assert!(mul(&x, &inv(&x).unwrap()).unwrap().dist(&id) < 1e-9);
            assert!(inv(&inv(&x).unwrap()).unwrap().dist(&x) < 1e-9);
        }
        assert!(inv(&id).unwrap().dist(&id) < 1e-15);
    }
}

#[test]
fn su2_product_matches_dense_product() {
    let g = GroupDescriptor::su2();
    // iπ/2·σ₃/2 and iπ/2·σ₁/2 are -π/2 e₃ and -π/2 e₁
    let a = elem(&g, &[0.0, 0.0, -std::f64::consts::FRAC_PI_2]);
    let b = elem(&g, &[-std::f64::consts::FRAC_PI_2, 0.0, 0.0]);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    // exp(iθσ/2) = cos(θ/2) + i sin(θ/2) σ with θ = π/2
    let am = CMat::from_fn(2, |i, j| match (i, j) {
        (0, 0) => C64::new(s, s),
        (1, 1) => C64::new(s, -s),
        _ => C64::new(0.0, 0.0),
    });
    let bm = CMat::from_fn(2, |i, j| if i == j { C64::new(s, 0.0) } else { C64::new(0.0, s) });
    assert!(a.matrix().dist(&am) < 1e-14);
    assert!(b.matrix().dist(&bm) < 1e-14);
    let mut dense = CMat::zeros(2);
    for i in 0..2 {
        for j in 0..2 {
            dense[(i, j)] = am[(i, 0)] * bm[(0, j)] + am[(i, 1)] * bm[(1, j)];
        }
    }
    assert!(mul(&a, &b).unwrap().matrix().dist(&dense) < 1e-13);
}

#[test]
fn so3_inverse_is_transpose() {
    let g = GroupDescriptor::so3();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let x = GroupElement::new(&g, g.random_matrix(&mut rng, 3.0)).unwrap();
        assert!(inv(&x).unwrap().matrix().dist(&x.matrix().transpose()) < 1e-12);
    }
}

#[test]
fn exp_closed_forms() {
    let u1 = GroupDescriptor::u1();
    let z = elem(&u1, &[0.7]);
    assert!((z.matrix()[(0, 0)] - C64::new(0.7f64.cos(), 0.7f64.sin())).norm() < 1e-15);
    assert!(elem(&u1, &[0.0]).dist(&GroupElement::identity(&u1)) == 0.0);

    // θ·(iσ₃/2) = -θ e₃ → diag(e^{iθ/2}, e^{-iθ/2})
    let su2 = GroupDescriptor::su2();
    let th = 1.3f64;
    let d = elem(&su2, &[0.0, 0.0, -th]);
    assert!((d.matrix()[(0, 0)] - C64::new((th / 2.0).cos(), (th / 2.0).sin())).norm() < 1e-14);
    assert!((d.matrix()[(1, 1)] - C64::new((th / 2.0).cos(), -(th / 2.0).sin())).norm() < 1e-14);
    assert!(d.matrix()[(0, 1)].norm() < 1e-15);
}

#[test]
fn exp_of_basis_stays_in_group() {
    for g in groups() {
        for b in g.basis() {
            assert!(g.constraint_residual(&b.exp()) < 1e-9);
            assert!(g.constraint_residual(&b.scale_re(5.0).exp()) < 1e-9);
        }
        assert!(g.closure_residual() < 1e-9);
    }
}

#[test]
fn exp_matches_long_series() {
    // Plain Taylor series summed to 80 terms without scaling is the reference.
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for g in [GroupDescriptor::su2(), GroupDescriptor::so3()] {
        for _ in 0..20 {
            let m = g.reconstruct(&g.random_coeffs(&mut rng, 1.5));
            let mut term = CMat::identity(g.matrix_dim());
            let mut sum = term;
            for k in 1..80 {
                term = (term * m).scale_re(1.0 / k as f64);
                sum = sum + term;
            }
            assert!(m.exp().dist(&sum) < 1e-10);
        }
    }
}

#[test]
fn log_of_small_rotation_is_axis_angle() {
    let g = GroupDescriptor::so3();
    let axis = [1.0 / 3f64.sqrt(), -1.0 / 3f64.sqrt(), 1.0 / 3f64.sqrt()];
    let th = 0.1f64;
    // Rodrigues: R = I + sinθ K + (1-cosθ) K²
    let k = CMat::from_real(&[&[0.0, -axis[2], axis[1]], &[axis[2], 0.0, -axis[0]], &[-axis[1], axis[0], 0.0]]);
    let r = CMat::identity(3) + k.scale_re(th.sin()) + (k * k).scale_re(1.0 - th.cos());
    let l = log_map(&GroupElement::new(&g, r).unwrap()).unwrap();
    for i in 0..3 {
        assert!((l.coeffs()[i] - th * axis[i]).abs() < 1e-12);
    }
    assert!(log_map(&GroupElement::identity(&g)).unwrap().norm() < 1e-15);
}

#[test]
fn exp_log_roundtrip_100_per_group() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for g in groups() {
        for _ in 0..100 {
            let mut c = g.random_coeffs(&mut rng, 1.0);
            let n = coeffs_norm(&c);
            if n > 0.5 {
                c = coeffs_scale(&c, 0.5 / n);
            }
            let x = AlgebraElement::new(&g, &c).unwrap();
            assert!(log_map(&exp_map(&x)).unwrap().dist(&x) < 1e-8);
        }
    }
}

#[test]
fn so3_adjoint_rotates_coefficients() {
    let g = GroupDescriptor::so3();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..20 {
        let r = GroupElement::new(&g, g.random_matrix(&mut rng, 2.0)).unwrap();
        let x = AlgebraElement::new(&g, &g.random_coeffs(&mut rng, 1.0)).unwrap();
        let ad = adjoint(&r, &x).unwrap();
        for i in 0..3 {
            let rv: f64 = (0..3).map(|j| r.matrix()[(i, j)].re * x.coeffs()[j]).sum();
            assert!((ad.coeffs()[i] - rv).abs() < 1e-12);
        }
        let back = adjoint(&inv(&r).unwrap(), &ad).unwrap();
        assert!(back.dist(&x) < 1e-12);
    }
    let x = AlgebraElement::new(&g, &[0.3, 0.1, -0.2]).unwrap();
    assert!(adjoint(&GroupElement::identity(&g), &x).unwrap().dist(&x) < 1e-15);
}

#[test]
fn maurer_cartan_of_one_parameter_subgroup() {
    let g = GroupDescriptor::su2();
    let x = [0.3, -0.7, 0.2];
    let curve = |u: f64| g.exp_coeffs(&coeffs_scale(&x, u));
    let l = left_log_derivative(&g, &curve, 0.4, Side::Left);
    assert!(coeffs_dist(l.coeffs(), &x) < 1e-10);
    let c = left_log_derivative(&g, &|_| g.exp_coeffs(&x), 0.4, Side::Right);
    assert!(c.norm() < 1e-12);
}

#[test]
fn maurer_cartan_of_product_curve() {
    // g(u) = exp(u X) exp(u² Y): g⁻¹ġ = Ad_{exp(-u²Y)} X + 2u Y, ġ g⁻¹ = X + 2u Ad_{exp(uX)} Y
    let g = GroupDescriptor::so3();
    let (x, y) = ([0.4, 0.1, -0.9], [-0.2, 0.8, 0.5]);
    let curve = |u: f64| g.exp_coeffs(&coeffs_scale(&x, u)) * g.exp_coeffs(&coeffs_scale(&y, u * u));
    for u in [0.1, 0.5, 0.9] {
        let left = coeffs_add(
            &g.adjoint_coeffs(&g.exp_coeffs(&coeffs_scale(&y, -u * u)), &x),
            &coeffs_scale(&y, 2.0 * u),
        );
        let right = coeffs_add(&x, &coeffs_scale(&g.adjoint_coeffs(&g.exp_coeffs(&coeffs_scale(&x, u)), &y), 2.0 * u));
        assert!(coeffs_dist(left_log_derivative(&g, &curve, u, Side::Left).coeffs(), &left) < 1e-5);
        assert!(coeffs_dist(left_log_derivative(&g, &curve, u, Side::Right).coeffs(), &right) < 1e-5);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn products_stay_in_group(a in prop::array::uniform3(-3.0f64..3.0), b in prop::array::uniform3(-3.0f64..3.0)) {
        for g in [GroupDescriptor::su2(), GroupDescriptor::so3()] {
            let p = mul(&elem(&g, &a), &elem(&g, &b)).unwrap();
            prop_assert!(p.constraint_residual() < 1e-7);
            prop_assert!(g.project(p.matrix()).dist(p.matrix()) < 1e-12);
        }
    }

    #[test]
    fn bracket_is_antisymmetric(a in prop::array::uniform3(-2.0f64..2.0), b in prop::array::uniform3(-2.0f64..2.0)) {
        for g in [GroupDescriptor::su2(), GroupDescriptor::so3()] {
            let x = AlgebraElement::new(&g, &a).unwrap();
            let y = AlgebraElement::new(&g, &b).unwrap();
            let xy = bracket(&x, &y).unwrap();
            let yx = bracket(&y, &x).unwrap();
            prop_assert!(coeffs_norm(&coeffs_add(xy.coeffs(), yx.coeffs())) < 1e-13);
            prop_assert!(bracket(&x, &x).unwrap().norm() < 1e-14);
        }
    }

    #[test]
    fn adjoint_is_a_homomorphism(
        r in prop::array::uniform3(-3.0f64..3.0),
        a in prop::array::uniform3(-2.0f64..2.0),
        b in prop::array::uniform3(-2.0f64..2.0),
    ) {
        for g in [GroupDescriptor::su2(), GroupDescriptor::so3()] {
            let k = elem(&g, &r);
            let x = AlgebraElement::new(&g, &a).unwrap();
            let y = AlgebraElement::new(&g, &b).unwrap();
            let lhs = adjoint(&k, &bracket(&x, &y).unwrap()).unwrap();
            let rhs = bracket(&adjoint(&k, &x).unwrap(), &adjoint(&k, &y).unwrap()).unwrap();
            prop_assert!(lhs.dist(&rhs) < 1e-7);
        }
    }
}
