mod common;

use common::*;
use degen_calc::almansi::{almansi_decompose, is_weighted_harmonic};
use degen_calc::kelvin::{kelvin_transform, product_a, product_b};
use degen_calc::operator::{
    apply_a_halfspace, apply_weighted_laplacian, check_vanishing_odd_derivatives, substitute_parabolic,
    weighted_laplacian_poly, HalfSpacePoly,
};
use degen_calc::rational::{rat, ratio, to_f64};
use degen_calc::sampling::{ball_points, rng};
use degen_calc::{OperatorParams, Poly, RadialPowerExpr};
use proptest::prelude::*;
use rand::Rng;

fn params_from(seed: u64) -> OperatorParams {
    let mut r = rng(seed);
    let n = r.gen_range(1..=3);
    let a = [rat(1), ratio(3, 2), rat(2), ratio(5, 2)][r.gen_range(0..4)].clone();
    OperatorParams::new(n, a, 1).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(seed in any::<u64>(), dim in 1usize..4) {
        let mut r = rng(seed);
        let p = random_poly(&mut r, dim, 4, 4);
        let q = random_poly(&mut r, dim, 4, 4);
        let s = random_poly(&mut r, dim, 3, 3);
        prop_assert_eq!(&p + &q, &q + &p);
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p * &q) * &s, &p * &(&q * &s));
        prop_assert_eq!(&p * &(&q + &s), &(&p * &q) + &(&p * &s));
        prop_assert!((&p - &p).is_zero());
        prop_assert_eq!(&p * &Poly::one(dim), p.clone());
    }

    #[test]
    fn derivatives_commute_and_obey_leibniz(seed in any::<u64>(), dim in 2usize..5) {
        let mut r = rng(seed);
        let p = random_poly(&mut r, dim, 5, 5);
        let q = random_poly(&mut r, dim, 3, 3);
        let (i, j) = (r.gen_range(0..dim), r.gen_range(0..dim));
        let dij = p.partial_derivative(i).unwrap().partial_derivative(j).unwrap();
        let dji = p.partial_derivative(j).unwrap().partial_derivative(i).unwrap();
        prop_assert_eq!(dij, dji);
        let lhs = (&p * &q).partial_derivative(i).unwrap();
        let rhs = &(&p.partial_derivative(i).unwrap() * &q) + &(&p * &q.partial_derivative(i).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn serialization_round_trips(seed in any::<u64>(), dim in 1usize..4) {
        let mut r = rng(seed);
        let p = random_poly(&mut r, dim, 4, 5);
        prop_assert_eq!(Poly::from_json(&p.to_json()).unwrap(), p.clone());
        prop_assert_eq!(Poly::parse_text(&p.to_string(), dim).unwrap(), p);
    }

    #[test]
    fn almansi_reconstructs_exactly(seed in any::<u64>(), degree in 0u32..7) {
        let pr = params_from(seed);
        let mut r = rng(seed ^ 0x5eed);
        let p = random_even_homogeneous(&mut r, pr.dim(), degree, 4);
        let d = almansi_decompose(&p, &pr).unwrap();
        prop_assert_eq!(d.reconstruct(pr.dim()), p);
        for (_, h) in &d.parts {
            prop_assert!(is_weighted_harmonic(h, &pr));
        }
    }

    #[test]
    fn kelvin_is_an_involution(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=3);
        let pr = OperatorParams::new(n, ratio(r.gen_range(2..=6), 2), 1).unwrap();
        let e = random_algebra_element(&mut r, pr.dim());
        let once = kelvin_transform(&e, &pr).unwrap();
        prop_assert_eq!(kelvin_transform(&once, &pr).unwrap(), e);
    }

    #[test]
    fn products_agree(seed in any::<u64>()) {
        let mut r = rng(seed);
        let pr = OperatorParams::new(r.gen_range(1..=4), ratio(r.gen_range(2..=6), 2), 1).unwrap();
        let m = r.gen_range(0..=5);
        let k = r.gen_range(0..=6);
        let t = random_rational(&mut r, 20, 7);
        prop_assert_eq!(product_a(m, &t, k, &pr), product_b(m, &t, k, &pr));
    }

    #[test]
    fn parabolic_substitution_conjugates(seed in any::<u64>()) {
        let pr = params_from(seed);
        let mut r = rng(seed ^ 1);
        let u = HalfSpacePoly(random_poly(&mut r, pr.dim(), 6, 6));
        let lhs = weighted_laplacian_poly(&substitute_parabolic(&u), pr.a()).unwrap();
        let rhs = substitute_parabolic(&apply_a_halfspace(&u, &pr).unwrap());
        prop_assert_eq!(lhs, rhs);
        prop_assert!(check_vanishing_odd_derivatives(&u, 3));
    }

    #[test]
    fn radial_algebra_is_a_commutative_ring(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dim = r.gen_range(2..=3);
        let e = random_algebra_element(&mut r, dim);
        let f = random_algebra_element(&mut r, dim);
        prop_assert_eq!(e.mul(&f), f.mul(&e));
        prop_assert!(e.add(&e).sub(&e.scale(&rat(2))).is_zero());
        let axis = r.gen_range(0..dim);
        let lhs = e.mul(&f).differentiate(axis).unwrap();
        let rhs = e.differentiate(axis).unwrap().mul(&f).add(&e.mul(&f.differentiate(axis).unwrap()));
        prop_assert_eq!(lhs, rhs);
    }
}

/// Central differences of `e` against the symbolic weighted Laplacian at points away from the singular set.
#[test]
fn weighted_laplacian_matches_finite_differences() {
    let mut r = rng(11);
    for case in 0..20 {
        let pr = OperatorParams::new(1 + case % 3, ratio(2 + case as i64 % 4, 2), 1).unwrap();
        let dim = pr.dim();
        let e = random_even_algebra_element(&mut r, dim);
        let le = apply_weighted_laplacian(&e, &pr).unwrap().compile();
        let f = e.compile();
        let weight = 2.0 * to_f64(pr.a()) - 1.0;
        for x in ball_points(case as u64, dim, 10, 2.0, 0.2) {
            if x[dim - 1].abs() < 0.2 || e.bases().iter().any(|b| b.evaluate(&x).abs() < 0.2) {
                continue;
            }
            let h = 1e-3;
            let mut fd = 0.0;
            for axis in 0..dim {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[axis] += h;
                xm[axis] -= h;
                let (fp, f0, fm) = (f.evaluate(&xp).unwrap(), f.evaluate(&x).unwrap(), f.evaluate(&xm).unwrap());
                fd += (fp - 2.0 * f0 + fm) / (h * h);
                if axis == dim - 1 {
                    fd += weight / x[axis] * (fp - fm) / (2.0 * h);
                }
            }
            let exact = le.evaluate(&x).unwrap();
            let scale = 1.0 + exact.abs() + f.evaluate(&x).unwrap().abs();
            assert!((fd - exact).abs() < 1e-4 * scale, "case {case}: {fd} vs {exact} at {x:?}");
        }
    }
}

#[test]
fn unit_polynomial_has_zero_laplacian() {
    let pr = OperatorParams::new(2, ratio(3, 2), 1).unwrap();
    let one = RadialPowerExpr::constant(3, rat(1));
    assert!(apply_weighted_laplacian(&one, &pr).unwrap().is_zero());
}
