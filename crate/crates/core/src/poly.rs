//! Exact multivariate polynomials over the rationals.
//!
//! A [`Poly`] lives in a fixed ambient dimension `d = n + 1`; the last
//! variable plays the role of the degenerate coordinate `x_{n+1}`. Terms are
//! stored in graded lexicographic order so equality is structural.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, rat, to_f64, Rational};

/// Exponent vector of a monomial, one entry per ambient variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(dim: usize) -> Self {
        Monomial(vec![0; dim])
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn last(&self) -> u32 {
        *self.0.last().unwrap_or(&0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: total degree first, then `x1 > x2 > ...`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial with exact rational coefficients and no stored zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PolyJson", into = "PolyJson")]
pub struct Poly {
    dim: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim
            .cmp(&other.dim)
            .then_with(|| self.terms.iter().rev().cmp(other.terms.iter().rev()))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Poly {
    pub fn zero(dim: usize) -> Self {
        Poly { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        Self::from_monomial(Monomial::one(dim), c)
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rational::one())
    }

    /// The coordinate function `x_{axis+1}`.
    pub fn var(dim: usize, axis: usize) -> Self {
        assert!(axis < dim, "axis {axis} out of range for dimension {dim}");
        let mut e = vec![0; dim];
        e[axis] = 1;
        Self::from_monomial(Monomial(e), Rational::one())
    }

    pub fn from_monomial(m: Monomial, c: Rational) -> Self {
        let mut p = Poly::zero(m.dim());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, summing repeats.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut p = Poly::zero(dim);
        for (exps, c) in terms {
            if exps.len() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: exps.len() });
            }
            p.add_term(Monomial(exps), c);
        }
        Ok(p)
    }

    /// `|x|^2 = x1^2 + ... + x_d^2`.
    pub fn norm_squared(dim: usize) -> Self {
        let mut p = Poly::zero(dim);
        for i in 0..dim {
            let mut e = vec![0; dim];
            e[i] = 2;
            p.add_term(Monomial(e), Rational::one());
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).min()
    }

    pub fn constant_value(&self) -> Option<Rational> {
        match self.degree() {
            None => Some(Rational::zero()),
            Some(0) => Some(self.coeff(&Monomial::one(self.dim))),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    fn check_dim(&self, other: &Poly) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    /// Exact product. Fails on dimension mismatch.
    pub fn multiply(&self, other: &Poly) -> Result<Poly> {
        self.check_dim(other)?;
        let mut out = Poly::zero(self.dim);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.dim);
        }
        Poly {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::one(self.dim);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                out = &out * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        out
    }

    /// Formal partial derivative along `axis` (0-based).
    pub fn partial_derivative(&self, axis: usize) -> Result<Poly> {
        if axis >= self.dim {
            return Err(Error::AxisOutOfRange { axis, dim: self.dim });
        }
        let mut out = Poly::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m.0[axis];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[axis] -= 1;
            out.add_term(Monomial(exps), c * rat(e as i64));
        }
        Ok(out)
    }

    pub(crate) fn d(&self, axis: usize) -> Poly {
        self.partial_derivative(axis).expect("axis in range")
    }

    /// Euler operator `x . grad`, which scales each homogeneous part by its degree.
    pub fn euler(&self) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * rat(m.degree() as i64));
        }
        out
    }

    /// Splits into homogeneous parts keyed by degree; zero maps to an empty map.
    pub fn homogeneous_components(&self) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree())
                .or_insert_with(|| Poly::zero(self.dim))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    pub fn homogeneous_part(&self, degree: u32) -> Poly {
        Poly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous_components().len() <= 1
    }

    pub fn is_even_in_last(&self) -> bool {
        self.terms.keys().all(|m| m.last() % 2 == 0)
    }

    pub fn is_odd_in_last(&self) -> bool {
        self.terms.keys().all(|m| m.last() % 2 == 1)
    }

    /// Restriction to the hyperplane `x_last = 0`, kept in the same dimension.
    pub fn restrict_last_zero(&self) -> Poly {
        Poly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.last() == 0)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Exact quotient by `x_last`, if every monomial contains it.
    pub fn divide_by_last_var(&self) -> Option<Poly> {
        let last = self.dim - 1;
        let mut out = Poly::zero(self.dim);
        for (m, c) in &self.terms {
            if m.0[last] == 0 {
                return None;
            }
            let mut e = m.0.clone();
            e[last] -= 1;
            out.terms.insert(Monomial(e), c.clone());
        }
        Some(out)
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a remainder.
    pub fn divide_exact(&self, divisor: &Poly) -> Option<Poly> {
        if divisor.is_zero() || self.dim != divisor.dim {
            return None;
        }
        let (lm, lc) = divisor.leading()?;
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.dim);
        while let Some((m, c)) = rem.leading() {
            if !lm.divides(m) {
                return None;
            }
            let qm = m.div(&lm);
            let qc = c / &lc;
            for (dm, dc) in &divisor.terms {
                rem.add_term(qm.mul(dm), -(&qc * dc));
            }
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Returns `c` with `self = c * other`, when the two are proportional.
    pub fn proportionality(&self, other: &Poly) -> Option<Rational> {
        if self.dim != other.dim || self.len() != other.len() || other.is_zero() {
            return None;
        }
        let (om, oc) = other.leading()?;
        let c = self.coeff(om) / oc;
        if c.is_zero() {
            return None;
        }
        (other.scale(&c) == *self).then_some(c)
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        self.terms
            .iter()
            .map(|(m, c)| {
                m.0.iter()
                    .zip(x)
                    .fold(to_f64(c), |acc, (&e, &xi)| acc * xi.powi(e as i32))
            })
            .sum()
    }

    pub fn evaluate_exact(&self, x: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (&e, xi) in m.0.iter().zip(x) {
                t *= num_traits::Pow::pow(xi, e);
            }
            acc += t;
        }
        acc
    }

    /// Applies `f` to every monomial and sums the resulting polynomials scaled by the coefficients.
    pub fn substitute_monomials<F>(&self, target_dim: usize, mut f: F) -> Poly
    where
        F: FnMut(&Monomial) -> Poly,
    {
        let mut out = Poly::zero(target_dim);
        for (m, c) in &self.terms {
            let image = f(m);
            for (im, ic) in image.terms {
                out.add_term(im, ic * c);
            }
        }
        out
    }

    /// Largest absolute coefficient; zero for the zero polynomial.
    pub fn max_abs_coeff(&self) -> Rational {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(Rational::zero)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.checked_add(rhs).expect("polynomial dimensions must agree")
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.checked_sub(rhs).expect("polynomial dimensions must agree")
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.multiply(rhs).expect("polynomial dimensions must agree")
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Rational::one())
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, e) })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", format_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", format_rational(&abs), vars.join("*"))?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    coeff: String,
    exps: Vec<u32>,
}

/// Wire format: `{"dim": d, "terms": [{"coeff": "p/q", "exps": [...]}, ...]}`.
#[derive(Serialize, Deserialize)]
struct PolyJson {
    dim: usize,
    terms: Vec<TermJson>,
}

impl TryFrom<PolyJson> for Poly {
    type Error = Error;

    fn try_from(j: PolyJson) -> Result<Poly> {
        let terms = j
            .terms
            .into_iter()
            .map(|t| Ok((t.exps, parse_rational(&t.coeff)?)))
            .collect::<Result<Vec<_>>>()?;
        Poly::from_terms(j.dim, terms)
    }
}

impl From<Poly> for PolyJson {
    fn from(p: Poly) -> PolyJson {
        PolyJson {
            dim: p.dim,
            terms: p
                .terms
                .iter()
                .rev()
                .map(|(m, c)| TermJson { coeff: format_rational(c), exps: m.0.clone() })
                .collect(),
        }
    }
}

impl Poly {
    pub fn from_json(text: &str) -> Result<Poly> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("polynomial serializes")
    }

    /// Parses the [`Display`](fmt::Display) syntax, e.g. `x1^2 - 2/3*x2^2 + 1`, in `dim` variables.
    pub fn parse_text(text: &str, dim: usize) -> Result<Poly> {
        let bad = |why: &str| Error::Parse(format!("{why} in {text:?}"));
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad("empty polynomial"));
        }
        let mut pieces: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut negative = false;
        for ch in compact.chars() {
            if (ch == '+' || ch == '-') && !current.ends_with('^') {
                if !current.is_empty() {
                    pieces.push((negative, std::mem::take(&mut current)));
                } else if !pieces.is_empty() || negative {
                    return Err(bad("dangling sign"));
                }
                negative = ch == '-';
            } else {
                current.push(ch);
            }
        }
        if current.is_empty() {
            return Err(bad("trailing sign"));
        }
        pieces.push((negative, current));
        let mut out = Poly::zero(dim);
        for (negative, piece) in pieces {
            let mut coeff = Rational::one();
            let mut exps = vec![0u32; dim];
            for factor in piece.split('*') {
                if let Some(var) = factor.strip_prefix('x') {
                    let (idx, exp) = match var.split_once('^') {
                        Some((i, e)) => (i, e.parse::<u32>().map_err(|_| bad("bad exponent"))?),
                        None => (var, 1),
                    };
                    let idx: usize = idx.parse().map_err(|_| bad("bad variable index"))?;
                    if idx == 0 || idx > dim {
                        return Err(Error::AxisOutOfRange { axis: idx, dim });
                    }
                    exps[idx - 1] += exp;
                } else {
                    coeff *= parse_rational(factor)?;
                }
            }
            if negative {
                coeff = -coeff;
            }
            out.add_term(Monomial(exps), coeff);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn x(dim: usize, i: usize) -> Poly {
        Poly::var(dim, i)
    }

    #[test]
    fn difference_of_squares() {
        let (x1, x2) = (x(2, 0), x(2, 1));
        let lhs = (&x1 + &x2) * (&x1 - &x2);
        assert_eq!(lhs, &x1 * &x1 - &x2 * &x2);
    }

    #[test]
    fn multiply_identity_and_disjoint_squares() {
        let p = &x(3, 0) * &x(3, 2) + Poly::constant(3, ratio(2, 3));
        assert_eq!(p.multiply(&Poly::one(3)).unwrap(), p);
        let sq = x(2, 0).pow(2) * x(2, 1).pow(2);
        assert_eq!(sq, Poly::from_terms(2, [(vec![2, 2], rat(1))]).unwrap());
    }

    #[test]
    fn text_round_trip() {
        let p = Poly::parse_text("x1^2 - 2/3*x2^2 + 1", 2).unwrap();
        assert_eq!(p.to_string(), "x1^2 - 2/3*x2^2 + 1");
        assert_eq!(Poly::parse_text(&p.to_string(), 2).unwrap(), p);
        assert_eq!(Poly::parse_text("-x1*x2 + 3*x1*x2", 2).unwrap(), (x(2, 0) * x(2, 1)).scale(&rat(2)));
        assert_eq!(Poly::parse_text("0", 3).unwrap(), Poly::zero(3));
        assert!(Poly::parse_text("x3", 2).is_err());
        assert!(Poly::parse_text("1.5*x1", 2).is_err());
        assert!(Poly::parse_text("x1 +", 2).is_err());
        assert!(Poly::parse_text("", 2).is_err());
    }

    #[test]
    fn multiply_rejects_dimension_mismatch() {
        assert_eq!(
            x(2, 0).multiply(&x(3, 0)),
            Err(Error::DimensionMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn partial_derivatives() {
        let x1 = x(2, 0);
        assert_eq!(x1.pow(2).partial_derivative(0).unwrap(), x1.scale(&rat(2)));
        assert!(x1.partial_derivative(1).unwrap().is_zero());
        assert_eq!((&x1 * &x(2, 1)).partial_derivative(0).unwrap(), x(2, 1));
        assert_eq!(x1.partial_derivative(2), Err(Error::AxisOutOfRange { axis: 2, dim: 2 }));
    }

    #[test]
    fn homogeneous_components_examples() {
        let x1 = x(2, 0);
        let c = (x1.pow(2) + x1.clone()).homogeneous_components();
        assert_eq!(c.len(), 2);
        assert_eq!(c[&2], x1.pow(2));
        assert_eq!(c[&1], x1);
        assert!(Poly::zero(2).homogeneous_components().is_empty());
        let c = (Poly::norm_squared(3) + Poly::constant(3, rat(3))).homogeneous_components();
        assert_eq!(c[&2], Poly::norm_squared(3));
        assert_eq!(c[&0], Poly::constant(3, rat(3)));
    }

    #[test]
    fn parity_in_last_variable() {
        assert!(x(3, 2).pow(2).is_even_in_last());
        assert!(!(x(3, 0) * x(3, 2)).is_even_in_last());
        assert!(Poly::constant(3, rat(5)).is_even_in_last());
    }

    #[test]
    fn exact_division() {
        let b = Poly::norm_squared(2) + Poly::one(2);
        let q = x(2, 0).pow(3) - x(2, 1).scale(&ratio(1, 2));
        assert_eq!((&b * &q).divide_exact(&b), Some(q.clone()));
        assert_eq!((&b * &q + Poly::one(2)).divide_exact(&b), None);
        assert_eq!(x(2, 0).divide_by_last_var(), None);
        assert_eq!((x(2, 0) * x(2, 1)).divide_by_last_var(), Some(x(2, 0)));
    }

    #[test]
    fn proportional_detection() {
        let b = Poly::norm_squared(2) + Poly::one(2);
        assert_eq!(b.scale(&ratio(3, 2)).proportionality(&b), Some(ratio(3, 2)));
        assert_eq!((&b + &x(2, 0)).proportionality(&b), None);
    }

    #[test]
    fn json_examples() {
        let p = Poly::from_json(r#"{"dim":2,"terms":[{"coeff":"1","exps":[0,2]}]}"#).unwrap();
        assert_eq!(p, x(2, 1).pow(2));
        assert!(Poly::from_json(r#"{"dim":2,"terms":[]}"#).unwrap().is_zero());
        assert!(Poly::from_json(r#"{"dim":2,"terms":[{"coeff":"1.5","exps":[0,2]}]}"#).is_err());
        assert!(Poly::from_json(r#"{"dim":2,"terms":[{"coeff":"1","exps":[0,2,1]}]}"#).is_err());
        let q = x(3, 0).scale(&ratio(-3, 2)) + x(3, 2).pow(2);
        assert_eq!(Poly::from_json(&q.to_json()).unwrap(), q);
    }

    #[test]
    fn display_is_readable() {
        let p = x(2, 0).pow(2) - x(2, 1).pow(2).scale(&ratio(2, 3)) + Poly::constant(2, rat(1));
        assert_eq!(p.to_string(), "x1^2 - 2/3*x2^2 + 1");
    }
}
