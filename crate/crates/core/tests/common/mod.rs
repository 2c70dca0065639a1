#![allow(dead_code)]

use degen_calc::poly::Poly;
use degen_calc::radial::{PowerFactor, RadialTerm};
use degen_calc::rational::{rat, ratio};
use degen_calc::{RadialPowerExpr, Rational};
use num_traits::{One, Zero};
use rand::Rng;

pub fn random_rational<R: Rng>(rng: &mut R, max_num: i64, max_den: i64) -> Rational {
    ratio(rng.gen_range(-max_num..=max_num), rng.gen_range(1..=max_den))
}

pub fn random_poly<R: Rng>(rng: &mut R, dim: usize, max_degree: u32, terms: usize) -> Poly {
    let terms = (0..terms).map(|_| {
        let mut exps = vec![0u32; dim];
        let total = rng.gen_range(0..=max_degree);
        for _ in 0..total {
            exps[rng.gen_range(0..dim)] += 1;
        }
        (exps, random_rational(rng, 9, 5))
    });
    Poly::from_terms(dim, terms.collect::<Vec<_>>()).unwrap()
}

/// Homogeneous of the given degree and even in the last variable.
pub fn random_even_homogeneous<R: Rng>(rng: &mut R, dim: usize, degree: u32, terms: usize) -> Poly {
    let mut out = Vec::new();
    while out.len() < terms {
        let mut exps = vec![0u32; dim];
        for _ in 0..degree {
            exps[rng.gen_range(0..dim)] += 1;
        }
        if exps[dim - 1].is_multiple_of(2) {
            out.push((exps, random_rational(rng, 9, 4)));
        }
    }
    Poly::from_terms(dim, out).unwrap()
}

/// `c + |x - b|^2` with `b_{last} = 0`, or `|x|^2`.
pub fn random_quadratic_base<R: Rng>(rng: &mut R, dim: usize) -> Poly {
    if rng.gen_bool(0.25) {
        return Poly::norm_squared(dim);
    }
    let mut base = Poly::norm_squared(dim);
    for axis in 0..dim - 1 {
        let b = rat(rng.gen_range(-2..=2));
        base = &base - &Poly::var(dim, axis).scale(&(rat(2) * &b));
        base = &base + &Poly::constant(dim, &b * &b);
    }
    &base + &Poly::constant(dim, ratio(rng.gen_range(1..=6), rng.gen_range(1..=3)))
}

pub fn random_algebra_element<R: Rng>(rng: &mut R, dim: usize) -> RadialPowerExpr {
    algebra_element(rng, dim, false)
}

/// Even in the last variable, so that the weighted Laplacian stays in the algebra.
pub fn random_even_algebra_element<R: Rng>(rng: &mut R, dim: usize) -> RadialPowerExpr {
    algebra_element(rng, dim, true)
}

fn algebra_element<R: Rng>(rng: &mut R, dim: usize, even: bool) -> RadialPowerExpr {
    let mut e = RadialPowerExpr::zero(dim);
    for _ in 0..rng.gen_range(1..=2) {
        let mut coeff = random_poly(rng, dim, 3, 3);
        if even {
            let kept = coeff.terms().filter(|(m, _)| m.last() % 2 == 0).map(|(m, c)| (m.exps().to_vec(), c.clone()));
            coeff = Poly::from_terms(dim, kept.collect::<Vec<_>>()).unwrap();
        }
        let mut factors = Vec::new();
        for _ in 0..rng.gen_range(1..=2) {
            let base = random_quadratic_base(rng, dim);
            factors.push(PowerFactor::new(base, random_rational(rng, 3, 3)).unwrap());
        }
        let term = RadialPowerExpr::from_terms(dim, vec![RadialTerm { coeff, factors }]).unwrap();
        e = e.add(&term);
    }
    e
}

/// Univariate polynomial in `w`, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct UPoly(pub Vec<Rational>);

impl UPoly {
    fn coeff(&self, k: usize) -> Rational {
        self.0.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    fn derivative(&self) -> UPoly {
        UPoly((1..self.0.len()).map(|k| rat(k as i64) * &self.0[k]).collect())
    }

    fn mul(&self, other: &UPoly) -> UPoly {
        if self.0.is_empty() || other.0.is_empty() {
            return UPoly(Vec::new());
        }
        let mut out = vec![Rational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UPoly(out)
    }

    fn add(&self, other: &UPoly) -> UPoly {
        let n = self.0.len().max(other.0.len());
        UPoly((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    fn scale(&self, c: &Rational) -> UPoly {
        UPoly(self.0.iter().map(|v| v * c).collect())
    }

    fn trim(mut self) -> UPoly {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }
}

/// Applies `(-L)^p` to `(1 + w)^{-s}`, `w = |x|^2`, using the radial form
/// `L g(w) = 4 w g'' + 2 D g'` of a weighted Laplacian in effective dimension `D`.
///
/// On `P(w) (1 + w)^e` the operator gives `(1 + w)^{e-2} Q(w)` with
/// `Q = 4w (P'' (1+w)^2 + 2e P' (1+w) + e(e-1) P) + 2D (P' (1+w)^2 + e P (1+w))`.
/// Returns `(Q, exponent)` after `p` steps.
pub fn radial_oracle(d: &Rational, s: &Rational, p: u32) -> (UPoly, Rational) {
    let one_plus_w = UPoly(vec![Rational::one(), Rational::one()]);
    let sq = one_plus_w.mul(&one_plus_w);
    let w = UPoly(vec![Rational::zero(), Rational::one()]);
    let mut poly = UPoly(vec![Rational::one()]);
    let mut e = -s.clone();
    for _ in 0..p {
        let d1 = poly.derivative();
        let d2 = d1.derivative();
        let inner = d2
            .mul(&sq)
            .add(&d1.mul(&one_plus_w).scale(&(rat(2) * &e)))
            .add(&poly.scale(&(&e * (&e - rat(1)))));
        let first = d1.mul(&sq).add(&poly.mul(&one_plus_w).scale(&e));
        let q = w.mul(&inner).scale(&rat(4)).add(&first.scale(&(rat(2) * d)));
        poly = q.scale(&rat(-1)).trim();
        e -= rat(2);
    }
    (poly, e)
}
