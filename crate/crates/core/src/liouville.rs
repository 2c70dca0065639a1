//! The critical bubble family, its constant, the growth recursions behind the
//! subcritical blow-up argument, and numeric sign checks.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kelvin::relative_gap;
use crate::operator::{apply_power, OperatorParams};
use crate::poly::Poly;
use crate::radial::RadialPowerExpr;
use crate::rational::{format_rational, pow_int, rat, to_f64, Rational};

/// `(t^2 + |X - (x0, 0)|^2)^{-s}` with `s = (n+2a-2p)/2`.
pub fn bubble_profile(t: &Rational, x0: &[Rational], params: &OperatorParams) -> Result<RadialPowerExpr> {
    if !t.is_positive() {
        return Err(Error::InvalidParams("t must be positive".into()));
    }
    if x0.len() != params.n() {
        return Err(Error::DimensionMismatch { left: params.n(), right: x0.len() });
    }
    let dim = params.dim();
    let mut base = Poly::constant(dim, t * t);
    for (i, c) in x0.iter().enumerate() {
        let shifted = Poly::var(dim, i) - Poly::constant(dim, c.clone());
        base = &base + &shifted.pow(2);
    }
    base = &base + &Poly::var(dim, dim - 1).pow(2);
    RadialPowerExpr::power(base, -params.bubble_exponent())
}

/// `K` and `c_0` with `(-L_a)^p (t^2+|X|^2)^{-s} = K (t^2+|X|^2)^{-s-2p}` and `c_0 = K^{(n+2a-2p)/(4p)}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BubbleConstant {
    #[serde(with = "crate::rational::serde_str")]
    pub k: Rational,
    /// `c_0 = k^exponent`, kept symbolically since it is usually irrational.
    #[serde(with = "crate::rational::serde_str")]
    pub exponent: Rational,
    pub c0: f64,
}

pub fn verify_bubble_constant(params: &OperatorParams) -> Result<BubbleConstant> {
    verify_bubble_constant_with_t(params, &Rational::one())
}

/// As [`verify_bubble_constant`] for the profile with parameter `t`; the image constant is then `K t^{2p}`.
pub fn verify_bubble_constant_with_t(params: &OperatorParams, t: &Rational) -> Result<BubbleConstant> {
    let zero = vec![Rational::zero(); params.n()];
    let profile = bubble_profile(t, &zero, params)?;
    let image = apply_power(&profile, params, params.p())?;
    let base = &profile.terms()[0].factors[0].base;
    let s = params.bubble_exponent();
    let expected_exponent = -(&s + rat(2 * params.p() as i64));
    let k = match image.terms() {
        [term] if term.factors.len() == 1
            && &term.factors[0].base == base
            && term.factors[0].exponent == expected_exponent =>
        {
            term.coeff.constant_value().ok_or_else(|| {
                Error::NonconstantRemainder(format!("image coefficient {} has positive degree", term.coeff))
            })?
        }
        _ => {
            return Err(Error::NonconstantRemainder(format!(
                "image is not a multiple of the base to the power {}",
                format_rational(&expected_exponent)
            )))
        }
    };
    let k = k / pow_int(t, 2 * params.p() as i64);
    if !k.is_positive() {
        return Err(Error::NonconstantRemainder(format!("constant {} is not positive", format_rational(&k))));
    }
    let exponent = &s / rat(2 * params.p() as i64);
    let c0 = to_f64(&k).powf(to_f64(&exponent));
    Ok(BubbleConstant { k, exponent, c0 })
}

/// `u_{t,x0}` in both coordinate systems.
#[derive(Clone, Debug)]
pub struct BubbleSolution {
    pub t: Rational,
    pub x0: Vec<Rational>,
    pub params: OperatorParams,
    pub constant: BubbleConstant,
    /// `(t^2 + |X - (x0,0)|^2)^{-s}`; the solution is `prefactor` times this.
    pub profile: RadialPowerExpr,
    /// `c_0 t^s`.
    pub prefactor: f64,
}

pub fn make_bubble(t: &Rational, x0: &[Rational], params: &OperatorParams) -> Result<BubbleSolution> {
    let constant = verify_bubble_constant(params)?;
    let profile = bubble_profile(t, x0, params)?;
    let prefactor = constant.c0 * to_f64(t).powf(to_f64(&params.bubble_exponent()));
    Ok(BubbleSolution { t: t.clone(), x0: x0.to_vec(), params: params.clone(), constant, profile, prefactor })
}

impl BubbleSolution {
    pub fn c0(&self) -> f64 {
        self.constant.c0
    }

    /// Value at `X = (x, x_{n+1})`.
    pub fn evaluate_even(&self, point: &[f64]) -> Result<f64> {
        Ok(self.prefactor * self.profile.evaluate(point)?)
    }

    /// `c_0 (t / (t^2 + 4y + |x - x0|^2))^s` on the half space `y >= 0`.
    pub fn evaluate_halfspace(&self, x: &[f64], y: f64) -> Result<f64> {
        if x.len() != self.params.n() {
            return Err(Error::DimensionMismatch { left: self.params.n(), right: x.len() });
        }
        if y < 0.0 {
            return Err(Error::SingularEvaluation(format!("y = {y} is outside the half space")));
        }
        let t = to_f64(&self.t);
        let d2: f64 = x.iter().zip(&self.x0).map(|(a, b)| (a - to_f64(b)).powi(2)).sum();
        let s = to_f64(&self.params.bubble_exponent());
        Ok(self.c0() * (t / (t * t + 4.0 * y + d2)).powf(s))
    }

    /// Max of `|(-L_a)^p u - u^{α_crit}| / u^{α_crit}` over `points`.
    pub fn pde_residual(&self, points: &[Vec<f64>]) -> Result<f64> {
        let lhs = apply_power(&self.profile, &self.params, self.params.p())?.compile();
        let u = self.profile.compile();
        let alpha = to_f64(&self.params.alpha_crit());
        let gaps = points
            .par_iter()
            .map(|x| {
                let l = self.prefactor * lhs.evaluate(x)?;
                let r = (self.prefactor * u.evaluate(x)?).powf(alpha);
                Ok(relative_gap(l, r))
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(gaps.into_iter().fold(0.0, f64::max))
    }
}

/// Sequences of the subcritical blow-up argument.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthTrace {
    pub p: u32,
    #[serde(with = "crate::rational::serde_str")]
    pub alpha: Rational,
    pub k_max: usize,
    #[serde(serialize_with = "serialize_rationals")]
    pub sigma: Vec<Rational>,
    #[serde(serialize_with = "serialize_rationals")]
    pub b: Vec<Rational>,
    pub r: Vec<f64>,
    /// `2α(p-1) + n + 2a + 2p`.
    #[serde(with = "crate::rational::serde_str")]
    pub a_const: Rational,
    /// `c = 2^{Σ_k 2p/(α σ_k + 1)}` so that `r_k <= c r_0`.
    pub c: f64,
    pub closed_forms_match: bool,
    pub monotone_and_bounded: bool,
}

fn serialize_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_rational))
}

/// `σ_k = 2(p-1)α^k + 2p(α^k-1)/(α-1)`.
pub fn sigma_closed_form(p: u32, alpha: &Rational, k: usize) -> Rational {
    let ak = pow_int(alpha, k as i64);
    rat(2 * (p as i64 - 1)) * &ak + rat(2 * p as i64) * (&ak - rat(1)) / (alpha - rat(1))
}

/// `b_k = 2p(α(α^k-1)/(α-1)^2 - k/(α-1))`.
pub fn b_closed_form(p: u32, alpha: &Rational, k: usize) -> Rational {
    let ak = pow_int(alpha, k as i64);
    let am1 = alpha - rat(1);
    rat(2 * p as i64) * (alpha * (&ak - rat(1)) / (&am1 * &am1) - rat(k as i64) / &am1)
}

pub fn growth_sequences(
    p: u32,
    alpha: &Rational,
    effective_dim: &Rational,
    r0: f64,
    k_max: usize,
) -> Result<GrowthTrace> {
    if alpha <= &Rational::one() {
        return Err(Error::InvalidParams("alpha must exceed 1".into()));
    }
    if k_max > 64 {
        return Err(Error::InvalidParams("k_max is capped at 64".into()));
    }
    if p < 1 || r0 <= 0.0 {
        return Err(Error::InvalidParams("need p >= 1 and r0 > 0".into()));
    }
    let two_p = rat(2 * p as i64);
    let mut sigma = vec![rat(2 * (p as i64 - 1))];
    let mut b = vec![Rational::zero()];
    for k in 0..k_max {
        sigma.push(alpha * &sigma[k] + &two_p);
        b.push(alpha * &b[k] + &two_p * rat(k as i64 + 1));
    }
    let closed_forms_match = (0..=k_max)
        .all(|k| sigma[k] == sigma_closed_form(p, alpha, k) && b[k] == b_closed_form(p, alpha, k));
    let af = to_f64(alpha);
    let two_pf = 2.0 * p as f64;
    let exponent_term = |s: f64| two_pf / (af * s + 1.0);
    let mut r = vec![r0];
    for k in 0..k_max {
        r.push(r[k] * 2f64.powf(exponent_term(to_f64(&sigma[k]))));
    }
    // σ_k grows like α^k, so the series converges geometrically
    let mut sum = 0.0;
    let mut s = to_f64(&sigma[0]);
    for _ in 0..10_000 {
        let term = exponent_term(s);
        sum += term;
        if term < 1e-18 * sum || !s.is_finite() {
            break;
        }
        s = af * s + two_pf;
    }
    let c = 2f64.powf(sum);
    let monotone_and_bounded = r.windows(2).all(|w| w[1] >= w[0]) && r.iter().all(|v| *v <= c * r0 * (1.0 + 1e-12));
    let a_const = rat(2) * alpha * rat(p as i64 - 1) + effective_dim + &two_p;
    Ok(GrowthTrace { p, alpha: alpha.clone(), k_max, sigma, b, r, a_const, c, closed_forms_match, monotone_and_bounded })
}

impl GrowthTrace {
    /// `log(c0^{α^k} r^{σ_k} / A^{b_k})` for each `k`: the quantity that is forced to blow up.
    pub fn blow_up_log_trace(&self, c0: f64, radius: f64) -> Vec<f64> {
        let a = to_f64(&self.a_const).ln();
        let af = to_f64(&self.alpha);
        (0..self.sigma.len())
            .map(|k| af.powi(k as i32) * c0.ln() + to_f64(&self.sigma[k]) * radius.ln() - to_f64(&self.b[k]) * a)
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityReport {
    pub radii: Vec<f64>,
    /// `-d/dr [r f' + (n+2a-2p) f]` at each radius.
    pub values: Vec<f64>,
    pub min_value: f64,
    /// Every value strictly positive.
    pub pass: bool,
}

/// Checks `(r f' + (n+2a-2p) f)' < 0` on `radii` after checking the premises `(-L_a)^k f >= 0`, `k = 0..=p`.
pub fn radial_monotonicity_check(
    f: &RadialPowerExpr,
    scale: f64,
    params: &OperatorParams,
    radii: &[f64],
) -> Result<MonotonicityReport> {
    let dim = params.dim();
    if f.dim() != dim {
        return Err(Error::DimensionMismatch { left: f.dim(), right: dim });
    }
    let along = |r: f64, axis: usize| {
        let mut x = vec![0.0; dim];
        x[axis] = r;
        x
    };
    let compiled = f.compile();
    let diagonal = |r: f64| vec![r / (dim as f64).sqrt(); dim];
    for &r in radii {
        let v0 = compiled.evaluate(&along(r, 0))?;
        for x in [along(r, dim - 1), diagonal(r)] {
            let v = compiled.evaluate(&x)?;
            if relative_gap(v, v0) > 1e-10 {
                return Err(Error::InvalidParams(format!("f is not radial at radius {r}")));
            }
        }
    }
    let mut w = f.clone();
    for k in 0..=params.p() {
        let c = w.compile();
        for &r in radii {
            if scale * c.evaluate(&along(r, 0))? < 0.0 {
                return Err(Error::PremiseViolated { k: k as usize, radius: r });
            }
        }
        if k < params.p() {
            w = apply_power(&w, params, 1)?;
        }
    }
    let g = f.euler().add(&f.scale(&(rat(2) * params.bubble_exponent())));
    let dg = g.euler().compile();
    let values = radii
        .iter()
        .map(|&r| Ok(-scale * dg.evaluate(&along(r, 0))? / r))
        .collect::<Result<Vec<f64>>>()?;
    let min_value = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(MonotonicityReport { radii: radii.to_vec(), values, min_value, pass: min_value > 0.0 })
}

#[derive(Clone, Debug, Serialize)]
pub struct PositivityReport {
    pub points: usize,
    /// Smallest value of `(-L_a)^i u` for `i = 1..p-1`.
    pub min_by_level: Vec<f64>,
    pub non_positive: usize,
    pub pass: bool,
}

pub fn positivity_scan(
    u: &RadialPowerExpr,
    scale: f64,
    params: &OperatorParams,
    samples: &[Vec<f64>],
) -> Result<PositivityReport> {
    let mut min_by_level = Vec::new();
    let mut non_positive = 0;
    let mut w = u.clone();
    for _ in 1..params.p() {
        w = apply_power(&w, params, 1)?;
        let c = w.compile();
        let values = samples
            .par_iter()
            .map(|x| c.evaluate(x).map(|v| scale * v))
            .collect::<Result<Vec<f64>>>()?;
        non_positive += values.iter().filter(|v| **v <= 0.0).count();
        min_by_level.push(values.into_iter().fold(f64::INFINITY, f64::min));
    }
    Ok(PositivityReport { points: samples.len(), min_by_level, non_positive, pass: non_positive == 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn constant_for_three_dimensional_case() {
        let pr = OperatorParams::new(1, rat(1), 1).unwrap();
        let c = verify_bubble_constant(&pr).unwrap();
        assert_eq!(c.k, rat(3));
        assert!((c.c0 - 3f64.powf(0.25)).abs() < 1e-15);
    }

    #[test]
    fn constant_is_independent_of_t() {
        let pr = OperatorParams::new(2, rat(2), 2).unwrap();
        let k1 = verify_bubble_constant(&pr).unwrap().k;
        let k2 = verify_bubble_constant_with_t(&pr, &rat(2)).unwrap().k;
        assert_eq!(k1, k2);
    }

    #[test]
    fn halfspace_and_even_forms_agree() {
        let pr = OperatorParams::new(2, ratio(3, 2), 1).unwrap();
        let b = make_bubble(&ratio(3, 2), &[rat(1), ratio(-1, 2)], &pr).unwrap();
        let (x, xl) = ([0.3, -0.7], 1.1);
        let y = xl * xl / 4.0;
        let even = b.evaluate_even(&[x[0], x[1], xl]).unwrap();
        let half = b.evaluate_halfspace(&x, y).unwrap();
        assert!(relative_gap(even, half) < 1e-14);
    }

    #[test]
    fn growth_examples() {
        let g = growth_sequences(2, &rat(2), &rat(6), 1.0, 10).unwrap();
        assert_eq!(g.sigma[..4], [rat(2), rat(8), rat(20), rat(44)]);
        assert_eq!(g.b[1], rat(4));
        assert!(g.closed_forms_match && g.monotone_and_bounded);
        assert!(growth_sequences(2, &rat(1), &rat(6), 1.0, 10).is_err());
    }

    #[test]
    fn premise_violation_for_square() {
        let pr = OperatorParams::new(1, rat(1), 1).unwrap();
        let f = RadialPowerExpr::from_poly(Poly::norm_squared(2));
        let err = radial_monotonicity_check(&f, 1.0, &pr, &[0.5, 1.0]).unwrap_err();
        assert!(matches!(err, Error::PremiseViolated { k: 1, .. }));
    }

    #[test]
    fn constant_is_a_boundary_case() {
        let pr = OperatorParams::new(1, rat(1), 1).unwrap();
        let f = RadialPowerExpr::constant(2, rat(1));
        let rep = radial_monotonicity_check(&f, 1.0, &pr, &[0.5, 1.0]).unwrap();
        assert_eq!(rep.min_value, 0.0);
        assert!(!rep.pass);
    }

    #[test]
    fn constant_fails_positivity() {
        let pr = OperatorParams::new(2, rat(2), 2).unwrap();
        let rep = positivity_scan(&RadialPowerExpr::constant(3, rat(1)), 1.0, &pr, &[vec![0.1, 0.2, 0.3]]).unwrap();
        assert!(!rep.pass);
    }
}
