//! Sums of terms `Q(x) * prod_j B_j(x)^{g_j}` closed under differentiation.
//!
//! `Q` and the bases `B_j` are exact polynomials, the bases are even in the
//! last variable with degree at most four, and the exponents `g_j` are
//! rational. Bubbles, powers of `|x|` and Kelvin images all live here.
//!
//! The canonical form groups terms into classes that share the same
//! non-integer exponents modulo one. Each class is collapsed onto a single
//! term over the smallest exponents present, after which the polynomial
//! coefficient is divided by the class bases as long as the division is exact.
//! Zero is recognised syntactically: the canonical form has no terms.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{frac, is_nonneg_integer, pow_rational_exact, rat, to_f64, Rational};

/// Highest admissible base degree.
pub const MAX_BASE_DEGREE: u32 = 4;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PowerFactor {
    pub base: Poly,
    #[serde(with = "crate::rational::serde_str")]
    pub exponent: Rational,
}

impl PowerFactor {
    pub fn new(base: Poly, exponent: Rational) -> Result<Self> {
        check_base(&base)?;
        Ok(PowerFactor { base, exponent })
    }
}

pub(crate) fn check_base(base: &Poly) -> Result<()> {
    if base.is_zero() {
        return Err(Error::InadmissibleBase("zero base".into()));
    }
    if !base.is_even_in_last() {
        return Err(Error::InadmissibleBase(format!("base {base} is odd in the last variable")));
    }
    if base.degree().unwrap_or(0) > MAX_BASE_DEGREE {
        return Err(Error::InadmissibleBase(format!("base {base} has degree above {MAX_BASE_DEGREE}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RadialTerm {
    pub coeff: Poly,
    pub factors: Vec<PowerFactor>,
}

/// An element of the radial power algebra in a fixed ambient dimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ExprJson", into = "ExprJson")]
pub struct RadialPowerExpr {
    dim: usize,
    terms: Vec<RadialTerm>,
}

#[derive(Serialize, Deserialize)]
struct ExprJson {
    dim: usize,
    terms: Vec<RadialTerm>,
}

impl TryFrom<ExprJson> for RadialPowerExpr {
    type Error = Error;

    fn try_from(j: ExprJson) -> Result<Self> {
        RadialPowerExpr::from_terms(j.dim, j.terms)
    }
}

impl From<RadialPowerExpr> for ExprJson {
    fn from(e: RadialPowerExpr) -> Self {
        ExprJson { dim: e.dim, terms: e.terms }
    }
}

impl From<Poly> for RadialPowerExpr {
    fn from(p: Poly) -> Self {
        RadialPowerExpr::from_poly(p)
    }
}

impl RadialPowerExpr {
    pub fn zero(dim: usize) -> Self {
        RadialPowerExpr { dim, terms: Vec::new() }
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        Self::from_poly(Poly::constant(dim, c))
    }

    pub fn from_poly(p: Poly) -> Self {
        let dim = p.dim();
        if p.is_zero() {
            return Self::zero(dim);
        }
        RadialPowerExpr { dim, terms: vec![RadialTerm { coeff: p, factors: Vec::new() }] }
    }

    /// Validates every term and returns the canonical form.
    pub fn from_terms(dim: usize, terms: Vec<RadialTerm>) -> Result<Self> {
        for t in &terms {
            if t.coeff.dim() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: t.coeff.dim() });
            }
            for f in &t.factors {
                if f.base.dim() != dim {
                    return Err(Error::DimensionMismatch { left: dim, right: f.base.dim() });
                }
                check_base(&f.base)?;
            }
        }
        Ok(RadialPowerExpr { dim, terms }.normalize())
    }

    /// `coeff * base^exponent`.
    pub fn monomial_power(coeff: Poly, base: Poly, exponent: Rational) -> Result<Self> {
        let dim = coeff.dim();
        Self::from_terms(dim, vec![RadialTerm { coeff, factors: vec![PowerFactor::new(base, exponent)?] }])
    }

    /// `base^exponent`.
    pub fn power(base: Poly, exponent: Rational) -> Result<Self> {
        let dim = base.dim();
        Self::monomial_power(Poly::one(dim), base, exponent)
    }

    /// `|x|^t`, stored as `(|x|^2)^{t/2}`.
    pub fn norm_power(dim: usize, t: &Rational) -> Self {
        Self::power(Poly::norm_squared(dim), t / rat(2)).expect("|x|^2 is an admissible base")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[RadialTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The polynomial this expression equals, when it has no power factors.
    pub fn as_poly(&self) -> Option<Poly> {
        match self.terms.as_slice() {
            [] => Some(Poly::zero(self.dim)),
            [t] if t.factors.is_empty() => Some(t.coeff.clone()),
            _ => None,
        }
    }

    pub fn is_even_in_last(&self) -> bool {
        self.terms.iter().all(|t| t.coeff.is_even_in_last())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        RadialPowerExpr {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|t| RadialTerm { coeff: t.coeff.scale(c), factors: t.factors.clone() })
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "expression dimensions must agree");
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        RadialPowerExpr { dim: self.dim, terms }.normalize()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn mul_poly(&self, p: &Poly) -> Self {
        RadialPowerExpr {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|t| RadialTerm { coeff: &t.coeff * p, factors: t.factors.clone() })
                .collect(),
        }
        .normalize()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "expression dimensions must agree");
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let mut factors = a.factors.clone();
                factors.extend(b.factors.iter().cloned());
                terms.push(RadialTerm { coeff: &a.coeff * &b.coeff, factors });
            }
        }
        RadialPowerExpr { dim: self.dim, terms }.normalize()
    }

    /// Exact partial derivative along `axis` by the product and chain rules.
    pub fn differentiate(&self, axis: usize) -> Result<Self> {
        if axis >= self.dim {
            return Err(Error::AxisOutOfRange { axis, dim: self.dim });
        }
        let mut terms = Vec::new();
        for t in &self.terms {
            let dq = t.coeff.d(axis);
            if !dq.is_zero() {
                terms.push(RadialTerm { coeff: dq, factors: t.factors.clone() });
            }
            for (j, f) in t.factors.iter().enumerate() {
                let db = f.base.d(axis);
                if db.is_zero() || f.exponent.is_zero() {
                    continue;
                }
                let mut factors = t.factors.clone();
                factors[j].exponent = &f.exponent - Rational::one();
                terms.push(RadialTerm { coeff: (&t.coeff * &db).scale(&f.exponent), factors });
            }
        }
        Ok(RadialPowerExpr { dim: self.dim, terms }.normalize())
    }

    /// `x . grad e`.
    pub fn euler(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for axis in 0..self.dim {
            let d = self.differentiate(axis).expect("axis in range");
            out = out.add(&d.mul_poly(&Poly::var(self.dim, axis)));
        }
        out
    }

    /// Exact quotient by `x_{n+1}`; requires every class coefficient to be odd in it.
    pub fn divide_by_last_coordinate(&self) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let coeff = t.coeff.divide_by_last_var().ok_or(Error::NotDivisible)?;
                Ok(RadialTerm { coeff, factors: t.factors.clone() })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RadialPowerExpr { dim: self.dim, terms }.normalize())
    }

    pub fn evaluate(&self, point: &[f64]) -> Result<f64> {
        self.compile().evaluate(point)
    }

    /// Floating-point evaluator with coefficients converted once.
    pub fn compile(&self) -> NumericExpr {
        NumericExpr {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|t| NumericTerm {
                    coeff: NumericPoly::from(&t.coeff),
                    factors: t
                        .factors
                        .iter()
                        .map(|f| (NumericPoly::from(&f.base), to_f64(&f.exponent)))
                        .collect(),
                })
                .collect(),
        }
    }

    /// Canonical form; see the module documentation.
    pub fn normalize(self) -> Self {
        let dim = self.dim;
        let terms: Vec<RadialTerm> = self.terms.into_iter().filter_map(normalize_term).collect();
        let terms = unify_proportional_bases(terms);
        RadialPowerExpr { dim, terms: collapse_classes(dim, terms) }
    }

    /// Distinct bases across all terms.
    pub fn bases(&self) -> BTreeSet<Poly> {
        self.terms.iter().flat_map(|t| t.factors.iter().map(|f| f.base.clone())).collect()
    }
}

/// Merges equal bases inside one term and folds exact powers into the coefficient.
fn normalize_term(t: RadialTerm) -> Option<RadialTerm> {
    if t.coeff.is_zero() {
        return None;
    }
    let mut coeff = t.coeff;
    let mut merged: BTreeMap<Poly, Rational> = BTreeMap::new();
    for f in t.factors {
        if f.exponent.is_zero() {
            continue;
        }
        *merged.entry(f.base).or_insert_with(Rational::zero) += f.exponent;
    }
    let mut factors = Vec::new();
    for (base, exponent) in merged {
        if exponent.is_zero() {
            continue;
        }
        if let Some(c) = base.constant_value() {
            if let Some(v) = pow_rational_exact(&c, &exponent) {
                coeff = coeff.scale(&v);
                continue;
            }
        }
        if is_nonneg_integer(&exponent) {
            let k = exponent.numer().try_into().expect("small exponent");
            coeff = &coeff * &base.pow(k);
            continue;
        }
        factors.push(PowerFactor { base, exponent });
    }
    if coeff.is_zero() {
        return None;
    }
    Some(RadialTerm { coeff, factors })
}

/// Rewrites `B^g` as `c^g R^g` when `B = c R` for an earlier base `R` and `c^g` is rational.
fn unify_proportional_bases(terms: Vec<RadialTerm>) -> Vec<RadialTerm> {
    let bases: BTreeSet<Poly> = terms.iter().flat_map(|t| t.factors.iter().map(|f| f.base.clone())).collect();
    if bases.len() < 2 {
        return terms;
    }
    let bases: Vec<Poly> = bases.into_iter().collect();
    let mut representative: BTreeMap<Poly, (Poly, Rational)> = BTreeMap::new();
    for (i, b) in bases.iter().enumerate() {
        for r in &bases[..i] {
            if representative.contains_key(r) {
                continue;
            }
            if let Some(c) = b.proportionality(r) {
                if c.is_positive() {
                    representative.insert(b.clone(), (r.clone(), c));
                    break;
                }
            }
        }
    }
    if representative.is_empty() {
        return terms;
    }
    terms
        .into_iter()
        .filter_map(|t| {
            let mut coeff = t.coeff;
            let mut factors = Vec::with_capacity(t.factors.len());
            for f in t.factors {
                match representative.get(&f.base) {
                    Some((r, c)) => match pow_rational_exact(c, &f.exponent) {
                        Some(v) => {
                            coeff = coeff.scale(&v);
                            factors.push(PowerFactor { base: r.clone(), exponent: f.exponent });
                        }
                        None => factors.push(f),
                    },
                    None => factors.push(f),
                }
            }
            normalize_term(RadialTerm { coeff, factors })
        })
        .collect()
}

type ClassKey = Vec<(Poly, Rational)>;

fn class_key(t: &RadialTerm) -> ClassKey {
    t.factors
        .iter()
        .filter(|f| !f.exponent.is_integer())
        .map(|f| (f.base.clone(), frac(&f.exponent)))
        .collect()
}

fn collapse_classes(dim: usize, terms: Vec<RadialTerm>) -> Vec<RadialTerm> {
    let mut classes: BTreeMap<ClassKey, Vec<RadialTerm>> = BTreeMap::new();
    for t in terms {
        classes.entry(class_key(&t)).or_default().push(t);
    }
    let mut out = Vec::new();
    for (key, members) in classes {
        let fractional: BTreeSet<Poly> = key.iter().map(|(b, _)| b.clone()).collect();
        let mut lowest: BTreeMap<Poly, Rational> = BTreeMap::new();
        for t in &members {
            for f in &t.factors {
                lowest
                    .entry(f.base.clone())
                    .and_modify(|e| {
                        if f.exponent < *e {
                            *e = f.exponent.clone();
                        }
                    })
                    .or_insert_with(|| f.exponent.clone());
            }
        }
        // integer exponents are negative here, so a missing base (exponent 0) never lowers the minimum
        let mut coeff = Poly::zero(dim);
        for t in members {
            let mut q = t.coeff;
            for (base, e) in &lowest {
                let own = t
                    .factors
                    .iter()
                    .find(|f| &f.base == base)
                    .map(|f| f.exponent.clone())
                    .unwrap_or_else(Rational::zero);
                let lift = own - e;
                debug_assert!(is_nonneg_integer(&lift));
                let k: u32 = lift.numer().try_into().expect("small exponent gap");
                if k > 0 {
                    q = &q * &base.pow(k);
                }
            }
            coeff = &coeff + &q;
        }
        if coeff.is_zero() {
            continue;
        }
        let mut changed = true;
        while changed {
            changed = false;
            for (base, e) in lowest.iter_mut() {
                if base.is_constant() {
                    continue;
                }
                while (fractional.contains(base) || e.is_negative()) && !coeff.is_zero() {
                    match coeff.divide_exact(base) {
                        Some(q) => {
                            coeff = q;
                            *e += Rational::one();
                            changed = true;
                        }
                        None => break,
                    }
                }
            }
        }
        let factors = lowest
            .into_iter()
            .filter(|(_, e)| !e.is_zero())
            .map(|(base, exponent)| PowerFactor { base, exponent })
            .collect();
        out.push(RadialTerm { coeff, factors });
    }
    out.sort();
    out
}

#[derive(Clone, Debug)]
pub struct NumericPoly {
    terms: Vec<(f64, Vec<u32>)>,
}

impl From<&Poly> for NumericPoly {
    fn from(p: &Poly) -> Self {
        NumericPoly { terms: p.terms().map(|(m, c)| (to_f64(c), m.exps().to_vec())).collect() }
    }
}

impl NumericPoly {
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| e.iter().zip(x).fold(*c, |acc, (&k, &xi)| if k == 0 { acc } else { acc * xi.powi(k as i32) }))
            .sum()
    }
}

#[derive(Clone, Debug)]
struct NumericTerm {
    coeff: NumericPoly,
    factors: Vec<(NumericPoly, f64)>,
}

/// Compiled floating-point form of a [`RadialPowerExpr`].
#[derive(Clone, Debug)]
pub struct NumericExpr {
    dim: usize,
    terms: Vec<NumericTerm>,
}

impl NumericExpr {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: x.len() });
        }
        let mut acc = 0.0;
        for t in &self.terms {
            let mut v = t.coeff.evaluate(x);
            for (base, e) in &t.factors {
                let b = base.evaluate(x);
                if b <= 0.0 {
                    return Err(Error::SingularEvaluation(format!(
                        "base value {b:e} raised to exponent {e} at {x:?}"
                    )));
                }
                v *= b.powf(*e);
            }
            acc += v;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn bubble_base(dim: usize, c: i64) -> Poly {
        Poly::norm_squared(dim) + Poly::constant(dim, rat(c))
    }

    #[test]
    fn chain_rule_on_quadratic_base() {
        let g = ratio(-3, 2);
        let e = RadialPowerExpr::power(bubble_base(3, 2), g.clone()).unwrap();
        let d = e.differentiate(0).unwrap();
        let expected = RadialPowerExpr::monomial_power(
            Poly::var(3, 0).scale(&(rat(2) * &g)),
            bubble_base(3, 2),
            g - rat(1),
        )
        .unwrap();
        assert_eq!(d, expected);
    }

    #[test]
    fn derivative_of_pure_polynomial_matches_ring() {
        let p = Poly::var(2, 0).pow(3) + Poly::var(2, 1).pow(2);
        let e = RadialPowerExpr::from_poly(p.clone());
        assert_eq!(e.differentiate(0).unwrap().as_poly().unwrap(), p.partial_derivative(0).unwrap());
    }

    #[test]
    fn derivative_in_last_variable() {
        let e = RadialPowerExpr::power(bubble_base(2, 1), ratio(-1, 2)).unwrap();
        let expected =
            RadialPowerExpr::monomial_power(-Poly::var(2, 1), bubble_base(2, 1), ratio(-3, 2)).unwrap();
        assert_eq!(e.differentiate(1).unwrap(), expected);
    }

    #[test]
    fn division_by_last_coordinate() {
        let q = Poly::var(2, 0).pow(2) + Poly::one(2);
        let e = RadialPowerExpr::from_poly(&Poly::var(2, 1) * &q);
        assert_eq!(e.divide_by_last_coordinate().unwrap().as_poly().unwrap(), q);

        let g = ratio(1, 3);
        let odd = RadialPowerExpr::monomial_power(Poly::var(2, 1).scale(&(rat(2) * &g)), bubble_base(2, 1), g.clone() - rat(1))
            .unwrap();
        let expected = RadialPowerExpr::monomial_power(Poly::constant(2, rat(2) * &g), bubble_base(2, 1), g - rat(1)).unwrap();
        assert_eq!(odd.divide_by_last_coordinate().unwrap(), expected);

        let bad = RadialPowerExpr::from_poly(Poly::var(2, 0));
        assert_eq!(bad.divide_by_last_coordinate(), Err(Error::NotDivisible));
    }

    #[test]
    fn evaluation_examples() {
        let e = RadialPowerExpr::power(bubble_base(3, 1), ratio(-1, 2)).unwrap();
        assert_eq!(e.evaluate(&[0.0, 0.0, 0.0]).unwrap(), 1.0);
        let r2 = RadialPowerExpr::from_poly(Poly::norm_squared(2));
        assert_eq!(r2.evaluate(&[3.0, 4.0]).unwrap(), 25.0);
        let inv = RadialPowerExpr::norm_power(2, &rat(-1));
        assert!(matches!(inv.evaluate(&[0.0, 0.0]), Err(Error::SingularEvaluation(_))));
    }

    #[test]
    fn integer_powers_become_polynomials() {
        let b = bubble_base(2, 1);
        let q = Poly::var(2, 0);
        let e = RadialPowerExpr::monomial_power(q.clone(), b.clone(), rat(2)).unwrap();
        assert_eq!(e.as_poly().unwrap(), &q * &b.pow(2));
    }

    #[test]
    fn cancellation_yields_zero() {
        let e = RadialPowerExpr::power(bubble_base(2, 1), ratio(-1, 3)).unwrap()
            .add(&RadialPowerExpr::from_poly(Poly::var(2, 0)));
        assert!(e.sub(&e).is_zero());
    }

    #[test]
    fn like_terms_merge() {
        let b = bubble_base(2, 1);
        let e1 = RadialPowerExpr::monomial_power(Poly::var(2, 0), b.clone(), ratio(1, 2)).unwrap();
        let e2 = RadialPowerExpr::monomial_power(Poly::one(2), b.clone(), ratio(1, 2)).unwrap();
        let sum = e1.add(&e2);
        assert_eq!(sum.terms().len(), 1);
        assert_eq!(sum.terms()[0].coeff, Poly::var(2, 0) + Poly::one(2));
    }

    #[test]
    fn exponents_differing_by_integers_share_a_class() {
        // B^{1/2} - B * B^{-1/2} == 0
        let b = bubble_base(2, 3);
        let e1 = RadialPowerExpr::power(b.clone(), ratio(1, 2)).unwrap();
        let e2 = RadialPowerExpr::monomial_power(b.clone(), b.clone(), ratio(-1, 2)).unwrap();
        assert!(e1.sub(&e2).is_zero());
    }

    #[test]
    fn proportional_bases_merge_when_exact() {
        let b = bubble_base(2, 1);
        let e1 = RadialPowerExpr::power(b.scale(&rat(4)), ratio(1, 2)).unwrap();
        let e2 = RadialPowerExpr::power(b.clone(), ratio(1, 2)).unwrap().scale(&rat(2));
        assert!(e1.sub(&e2).is_zero());
    }

    #[test]
    fn rejects_inadmissible_bases() {
        assert!(RadialPowerExpr::power(Poly::var(2, 1), ratio(1, 2)).is_err());
        assert!(RadialPowerExpr::power(Poly::zero(2), ratio(1, 2)).is_err());
        assert!(RadialPowerExpr::power(Poly::var(2, 0).pow(6), ratio(1, 2)).is_err());
    }

    #[test]
    fn json_round_trip() {
        let e = RadialPowerExpr::monomial_power(Poly::var(3, 0), bubble_base(3, 1), ratio(-5, 2)).unwrap();
        let text = serde_json::to_string(&e).unwrap();
        let back: RadialPowerExpr = serde_json::from_str(&text).unwrap();
        assert_eq!(back, e);
        assert!(text.contains("\"-5/2\""));
    }
}
