mod common;

use common::radial_oracle;
use degen_calc::almansi::harmonic_basis;
use degen_calc::liouville::{make_bubble, verify_bubble_constant, verify_bubble_constant_with_t};
use degen_calc::operator::{apply_weighted_laplacian, eigen_factor};
use degen_calc::cli::fundamental_family;
use degen_calc::quadrature::{
    average_law_check, build_weighted_sphere_rule, omega_a, weighted_ball_volume, RadialRule, ShrinkSchedule,
};
use degen_calc::rational::{rat, ratio, to_f64};
use degen_calc::{OperatorParams, RadialPowerExpr, Rational};

fn params(n: usize, a: Rational, p: u32) -> OperatorParams {
    OperatorParams::new(n, a, p).unwrap()
}

#[test]
fn bubble_constant_matches_radial_oracle() {
    let cases = [
        (1, rat(1), 1),
        (2, rat(2), 2),
        (2, ratio(3, 2), 1),
        (3, ratio(5, 2), 3),
        (4, rat(1), 2),
        (1, ratio(7, 4), 1),
    ];
    for (n, a, p) in cases {
        let pr = params(n, a, p);
        let k = verify_bubble_constant(&pr).unwrap().k;
        let (q, e) = radial_oracle(&pr.effective_dim(), &pr.bubble_exponent(), p);
        assert_eq!(q.0.len(), 1, "oracle remainder is not constant for {n} {p}");
        assert_eq!(e, -pr.bubble_exponent() - rat(2 * p as i64));
        assert_eq!(k, q.0[0]);
        // the oracle constant also factors as prod_{j=-p}^{p-1} (D + 2j)
        let d = pr.effective_dim();
        let product = (-(p as i64)..p as i64).fold(rat(1), |acc, j| acc * (&d + rat(2 * j)));
        assert_eq!(k, product);
    }
}

#[test]
fn first_bubble_constant_is_three() {
    let pr = params(1, rat(1), 1);
    let c = verify_bubble_constant(&pr).unwrap();
    assert_eq!(c.k, rat(3));
    assert!((c.c0 - 3f64.powf(0.25)).abs() < 1e-15);
    let b = make_bubble(&rat(1), &[rat(0)], &pr).unwrap();
    assert!((b.c0() - 1.31607).abs() < 1e-5);
}

#[test]
fn rescaled_bubble_gives_same_constant() {
    let pr = params(2, rat(2), 2);
    let base = verify_bubble_constant(&pr).unwrap();
    for t in [rat(2), ratio(1, 3), ratio(5, 2)] {
        assert_eq!(verify_bubble_constant_with_t(&pr, &t).unwrap().k, base.k);
    }
}

#[test]
fn weighted_sphere_measure_closed_forms() {
    // n = 1, a = 1: ∫_{S^1} |x_2| = 4
    assert!((omega_a(&params(1, rat(1), 1)) - 4.0).abs() < 1e-14);
    // n = 2, a = 1: ∫_{S^2} |x_3| = 2π
    assert!((omega_a(&params(2, rat(1), 1)) - 2.0 * std::f64::consts::PI).abs() < 1e-14);
    // n = 2, a = 3/4: 2π Γ(3/4) / Γ(7/4) = 8π/3, below the default a >= 1 range
    let light = OperatorParams::with_small_a(2, ratio(3, 4), 1).unwrap();
    assert!((omega_a(&light) - 8.0 * std::f64::consts::PI / 3.0).abs() < 1e-13);
    assert!((weighted_ball_volume(&params(1, rat(1), 1)) - 4.0 / 3.0).abs() < 1e-14);
    let grid = build_weighted_sphere_rule(&params(3, ratio(3, 2), 1), 8).unwrap();
    assert!((grid.total_weight() - omega_a(&grid.params)).abs() < 1e-13 * grid.total_weight());
}

#[test]
fn eigen_factor_on_harmonic_basis() {
    for (n, a) in [(1, rat(1)), (2, ratio(3, 2)), (3, rat(2))] {
        let pr = params(n, a, 1);
        let dim = pr.dim();
        for k in 0..=4u32 {
            let basis = harmonic_basis(k, &pr).unwrap();
            for t in [ratio(7, 3), rat(-1), ratio(1, 2) - pr.effective_dim()] {
                for h in &basis.elements {
                    let e = RadialPowerExpr::norm_power(dim, &(&t - rat(k as i64))).mul_poly(h);
                    let expected = RadialPowerExpr::norm_power(dim, &(&t - rat(k as i64) - rat(2)))
                        .mul_poly(h)
                        .scale(&eigen_factor(&t, k, &pr));
                    assert_eq!(apply_weighted_laplacian(&e, &pr).unwrap(), expected);
                }
            }
        }
    }
}

#[test]
fn harmonic_dimension_counts() {
    // even harmonic polynomials of degree k in dim variables: even-in-last monomials of degree k minus degree k-2
    let pr = params(2, ratio(3, 2), 1);
    let counts: Vec<usize> = (0..6).map(|k| harmonic_basis(k, &pr).unwrap().elements.len()).collect();
    assert_eq!(counts, vec![1, 2, 3, 4, 5, 6]);
    assert!(harmonic_basis(3, &pr).unwrap().elements.iter().all(|h| !h.is_zero()));
}

#[test]
fn average_law_for_first_two_levels() {
    // (-L)^i of the normalized family is |x|^{2-D}, whose flux constant is -(D-2) omega_a
    for (n, a) in [(2, rat(2)), (3, ratio(3, 2))] {
        let pr = params(n, a, 2);
        let grid = build_weighted_sphere_rule(&pr, 10).unwrap();
        let expected = -(to_f64(&pr.effective_dim()) - 2.0) * omega_a(&pr);
        for i in 0..2 {
            let u = fundamental_family(i, &pr).unwrap().unwrap();
            let rep = average_law_check(&u, i, &pr, &grid, &ShrinkSchedule::default(), &RadialRule::default(), 1e-6)
                .unwrap();
            assert!(rep.pass);
            assert!((rep.beta_from_fit - expected).abs() <= 1e-10 * expected.abs(), "i = {i}");
        }
    }
}
