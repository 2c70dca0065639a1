//! Kelvin transform `u*(x) = |x|^{2p-n-2a} u(x/|x|^2)` on the radial algebra,
//! the product constants of the eigenvalue identity, the `(c_i, f_i)`
//! inversion chain, and far-field expansion fits.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extrapolate::{extrapolate_to_zero, loglog_slope};
use crate::operator::{apply_power, apply_weighted_laplacian, OperatorParams};
use crate::poly::Poly;
use crate::quadrature::WeightedQuadratureGrid;
use crate::radial::{PowerFactor, RadialPowerExpr, RadialTerm};
use crate::rational::{pow_rational_exact, rat, to_f64, Rational};

/// Writes `B(x/|x|^2) = (|x|^2)^shift * B'(x)` with `B'` not divisible by `|x|^2`.
fn invert_base(base: &Poly) -> Result<(Poly, Rational)> {
    let dim = base.dim();
    let db = base.degree().unwrap_or(0);
    let r2 = Poly::norm_squared(dim);
    let mut star = Poly::zero(dim);
    for (d, part) in base.homogeneous_components() {
        star = &star + &(&part * &r2.pow(db - d));
    }
    let mut stripped = 0u32;
    while !star.is_constant() {
        match star.divide_exact(&r2) {
            Some(q) => {
                star = q;
                stripped += 1;
            }
            None => break,
        }
    }
    Ok((star, rat(stripped as i64) - rat(db as i64)))
}

/// `e(x/|x|^2)` in canonical form.
///
/// Fails with [`Error::InadmissibleBase`] when an inverted base leaves the algebra (degree above four).
pub fn invert_argument(e: &RadialPowerExpr) -> Result<RadialPowerExpr> {
    let dim = e.dim();
    let r2 = Poly::norm_squared(dim);
    let mut terms = Vec::new();
    for t in e.terms() {
        let mut factors = Vec::with_capacity(t.factors.len() + 1);
        let mut r2_exp = Rational::zero();
        for f in &t.factors {
            let (b, shift) = invert_base(&f.base)?;
            r2_exp += shift * &f.exponent;
            factors.push(PowerFactor::new(b, f.exponent.clone())?);
        }
        for (deg, q) in t.coeff.homogeneous_components() {
            let mut fs = factors.clone();
            fs.push(PowerFactor::new(r2.clone(), &r2_exp - rat(deg as i64))?);
            terms.push(RadialTerm { coeff: q, factors: fs });
        }
    }
    RadialPowerExpr::from_terms(dim, terms)
}

pub fn kelvin_transform(e: &RadialPowerExpr, params: &OperatorParams) -> Result<RadialPowerExpr> {
    check_dim(e, params)?;
    let prefactor = RadialPowerExpr::norm_power(e.dim(), &params.kelvin_exponent());
    Ok(invert_argument(e)?.mul(&prefactor))
}

fn check_dim(e: &RadialPowerExpr, params: &OperatorParams) -> Result<()> {
    if e.dim() != params.dim() {
        return Err(Error::DimensionMismatch { left: e.dim(), right: params.dim() });
    }
    Ok(())
}

/// `A_{m,t} = prod_{j<m} [(t-2j)(t-2j+D-2) - k(k+D-2)]`.
pub fn product_a(m: u32, t: &Rational, k: u32, params: &OperatorParams) -> Rational {
    let shift = params.effective_dim() - rat(2);
    let kk = rat(k as i64) * (rat(k as i64) + &shift);
    (0..m)
        .map(|j| {
            let tj = t - rat(2 * j as i64);
            &tj * (&tj + &shift) - &kk
        })
        .fold(Rational::one(), |acc, f| acc * f)
}

/// `B_{m,t} = prod_{j<m} [(2m-D-t-2j)(2m-t-2j-2) - k(k+D-2)]`.
pub fn product_b(m: u32, t: &Rational, k: u32, params: &OperatorParams) -> Rational {
    let d = params.effective_dim();
    let kk = rat(k as i64) * (rat(k as i64) + &d - rat(2));
    (0..m)
        .map(|j| {
            let base = rat(2 * m as i64) - t - rat(2 * j as i64);
            (&base - &d) * (&base - rat(2)) - &kk
        })
        .fold(Rational::one(), |acc, f| acc * f)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainLevel {
    pub i: u32,
    pub c: Rational,
    pub f: RadialPowerExpr,
}

#[derive(Clone, Debug)]
pub struct InversionChain {
    pub params: OperatorParams,
    pub levels: Vec<ChainLevel>,
}

impl InversionChain {
    /// `c_i |x|^{-(n+2a-2p+2i)} f_i(x/|x|^2)`, the claimed value of `(-L_a)^i u*`.
    pub fn predicted(&self, i: u32) -> Result<RadialPowerExpr> {
        let level = self
            .levels
            .get(i as usize)
            .ok_or(Error::DegenerateLevel { level: i as usize })?;
        let dim = self.params.dim();
        let exponent = -(rat(2) * self.params.bubble_exponent() + rat(2 * i as i64));
        Ok(invert_argument(&level.f)?
            .mul(&RadialPowerExpr::norm_power(dim, &exponent))
            .scale(&level.c))
    }
}

/// One step of the recursion,
/// `(2p-2i-2)(D-2p+2i) f_{i+1} = (2p-2i-2)(D-2p+2i) f_i + 4(p-i-1) x.∇f_i - |x|^2 L_a f_i`.
pub fn chain_step(level: &ChainLevel, params: &OperatorParams) -> Result<ChainLevel> {
    let i = level.i;
    let p = params.p();
    if i + 1 >= p {
        return Err(Error::DegenerateLevel { level: i as usize });
    }
    let factor = rat(2 * (p - i - 1) as i64) * (rat(2) * params.bubble_exponent() + rat(2 * i as i64));
    let f = &level.f;
    let lap = apply_weighted_laplacian(f, params)?;
    let rhs = f
        .scale(&factor)
        .add(&f.euler().scale(&rat(4 * (p - i - 1) as i64)))
        .sub(&lap.mul_poly(&Poly::norm_squared(f.dim())));
    Ok(ChainLevel { i: i + 1, c: &level.c * &factor, f: rhs.scale(&factor.recip()) })
}

/// Exact value at the origin, when every factor is finite and rational there.
pub fn value_at_origin(e: &RadialPowerExpr) -> Option<Rational> {
    let origin = vec![Rational::zero(); e.dim()];
    let mut acc = Rational::zero();
    for t in e.terms() {
        let mut v = t.coeff.evaluate_exact(&origin);
        if v.is_zero() {
            continue;
        }
        for f in &t.factors {
            let b = f.base.evaluate_exact(&origin);
            if !b.is_positive() {
                return None;
            }
            v *= pow_rational_exact(&b, &f.exponent)?;
        }
        acc += v;
    }
    Some(acc)
}

/// Builds levels `0..p-1`; checks `f_i(0) = u(0)` and parity at every level.
pub fn inversion_chain(u: &RadialPowerExpr, params: &OperatorParams) -> Result<InversionChain> {
    check_dim(u, params)?;
    if !u.is_even_in_last() {
        return Err(Error::OddParity);
    }
    let u0 = value_at_origin(u)
        .ok_or_else(|| Error::InvalidParams("u must be finite with a rational value at the origin".into()))?;
    let mut levels = vec![ChainLevel { i: 0, c: Rational::one(), f: u.clone() }];
    while levels.len() < params.p() as usize {
        let next = chain_step(levels.last().expect("nonempty"), params)?;
        if value_at_origin(&next.f).as_ref() != Some(&u0) {
            return Err(Error::InvalidParams(format!("f_{}(0) differs from u(0)", next.i)));
        }
        if !next.f.is_even_in_last() {
            return Err(Error::OddParity);
        }
        levels.push(next);
    }
    Ok(InversionChain { params: params.clone(), levels })
}

#[derive(Clone, Debug, Serialize)]
pub struct PdeCheck {
    pub points: usize,
    pub max_relative_residual: f64,
    pub pass: bool,
}

/// Pointwise `(-L_a)^p u* = |x|^{-τ} (u*)^α` for `scale * u`, with the left side taken from the symbolic image.
pub fn kelvin_pde_check(
    u: &RadialPowerExpr,
    scale: f64,
    alpha: &Rational,
    params: &OperatorParams,
    samples: &[Vec<f64>],
    tol: f64,
) -> Result<PdeCheck> {
    let star = kelvin_transform(u, params)?;
    let lhs = apply_power(&star, params, params.p())?.compile();
    let star = star.compile();
    let tau = to_f64(&params.tau(alpha));
    let alpha = to_f64(alpha);
    let residuals = samples
        .par_iter()
        .map(|x| {
            let l = scale * lhs.evaluate(x)?;
            let v = scale * star.evaluate(x)?;
            let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
            let rhs = r.powf(-tau) * v.abs().powf(alpha) * v.signum();
            Ok(relative_gap(l, rhs))
        })
        .collect::<Result<Vec<f64>>>()?;
    let max_relative_residual = residuals.into_iter().fold(0.0, f64::max);
    Ok(PdeCheck { points: samples.len(), max_relative_residual, pass: max_relative_residual <= tol })
}

pub(crate) fn relative_gap(a: f64, b: f64) -> f64 {
    let diff = (a - b).abs();
    if diff == 0.0 {
        0.0
    } else {
        diff / b.abs().max(a.abs()).max(f64::MIN_POSITIVE)
    }
}

/// `e(x) ≈ |x|^{-l} (a_0 + Σ a_i x_i / |x|^2)` at infinity.
#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticExpansion {
    pub order: f64,
    pub a0: f64,
    pub ai: Vec<f64>,
    /// Decay order of the remainder; infinite when it sits at roundoff.
    pub residual_order_estimate: f64,
}

/// Fits the far-field expansion on the spheres `|x| = R` for `R` in `radii`.
///
/// Weighted sphere averages isolate `a_0` and first moments give `a_i`; both are
/// extrapolated in `R^{-2}`. The remainder order is the negated log-log slope of
/// the largest deviation on each sphere.
pub fn asymptotic_fit(
    e: &RadialPowerExpr,
    l: &Rational,
    radii: &[f64],
    grid: &WeightedQuadratureGrid,
) -> Result<AsymptoticExpansion> {
    if radii.len() < 3 || radii.windows(2).any(|w| w[1] <= w[0]) || radii[0] < 10.0 {
        return Err(Error::InvalidParams("radii must be increasing, at least three, and >= 10".into()));
    }
    if e.dim() != grid.dim() {
        return Err(Error::DimensionMismatch { left: e.dim(), right: grid.dim() });
    }
    let dim = e.dim();
    let lf = to_f64(l);
    let compiled = e.compile();
    let total = grid.total_weight();
    let second: Vec<f64> = (0..dim)
        .map(|i| grid.sphere_integral(1.0, |w| Ok(w[i] * w[i])).expect("pure quadrature"))
        .collect();
    let mut a0_at = Vec::with_capacity(radii.len());
    let mut ai_at = vec![Vec::with_capacity(radii.len()); dim];
    for &r in radii {
        let scaled = |x: &[f64]| compiled.evaluate(x).map(|v| v * r.powf(lf));
        a0_at.push(grid.sphere_integral(r, scaled)? / total);
        for (i, col) in ai_at.iter_mut().enumerate() {
            let m = grid.sphere_integral(r, |x| scaled(x).map(|v| v * x[i] / r))?;
            col.push(r * m / second[i]);
        }
    }
    let inv_r2: Vec<f64> = radii.iter().map(|r| r.powi(-2)).collect();
    // the remainder is a series in R^{-2}; extrapolate it away
    let intercept = |ys: &[f64]| extrapolate_to_zero(&inv_r2, ys).unwrap_or(ys[ys.len() - 1]);
    let a0 = intercept(&a0_at);
    let ai: Vec<f64> = ai_at.iter().map(|c| intercept(c)).collect();
    let mut remainders = Vec::with_capacity(radii.len());
    for &r in radii {
        let worst = grid
            .nodes
            .iter()
            .map(|w| {
                let x: Vec<f64> = w.iter().map(|c| r * c).collect();
                let model = r.powf(-lf) * (a0 + ai.iter().zip(w).map(|(a, c)| a * c).sum::<f64>() / r);
                Ok((compiled.evaluate(&x)? - model).abs())
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        remainders.push(worst);
    }
    let floor = 1e-12 * a0.abs().max(1.0);
    let at_roundoff = radii.iter().zip(&remainders).all(|(r, rem)| rem * r.powf(lf) <= floor);
    let residual_order_estimate = if at_roundoff {
        f64::INFINITY
    } else {
        -loglog_slope(radii, &remainders).ok_or(Error::PoorFit { estimate: f64::NAN, required: lf + 1.5 })?
    };
    if residual_order_estimate < lf + 1.5 {
        return Err(Error::PoorFit { estimate: residual_order_estimate, required: lf + 1.5 });
    }
    Ok(AsymptoticExpansion { order: lf, a0, ai, residual_order_estimate })
}
