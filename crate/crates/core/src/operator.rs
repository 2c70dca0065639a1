//! The weighted operator `L_a = Δ + ((2a-1)/x_{n+1}) ∂_{n+1}`, its powers, and
//! the half-space operator `A = y ∂_y^2 + a ∂_y + Δ_x` it is conjugate to under
//! `x_{n+1} = 2 sqrt(y)`.

use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{Monomial, Poly};
use crate::radial::RadialPowerExpr;
use crate::rational::{format_rational, pow_int, rat, ratio, Rational};

/// `(n, a, p)` with `a >= 1` and `2p < n + 2a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OperatorParams {
    n: usize,
    a: Rational,
    p: u32,
}

impl OperatorParams {
    pub fn new(n: usize, a: Rational, p: u32) -> Result<Self> {
        Self::build(n, a, p, false)
    }

    /// Like [`new`](Self::new) but admits `1/2 < a < 1`, printing a warning.
    pub fn with_small_a(n: usize, a: Rational, p: u32) -> Result<Self> {
        Self::build(n, a, p, true)
    }

    fn build(n: usize, a: Rational, p: u32, allow_small_a: bool) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        if p < 1 {
            return Err(Error::InvalidParams("p must be at least 1".into()));
        }
        if a < Rational::one() {
            if !allow_small_a {
                return Err(Error::InvalidParams(format!("a = {} is below 1", format_rational(&a))));
            }
            if a <= ratio(1, 2) {
                return Err(Error::InvalidParams(format!("a = {} must exceed 1/2", format_rational(&a))));
            }
            eprintln!("warning: a = {} < 1 is outside the supported range", format_rational(&a));
        }
        let d = rat(n as i64) + rat(2) * &a;
        if rat(2 * p as i64) >= d {
            return Err(Error::InvalidParams(format!(
                "need 2p < n + 2a, got p = {p}, n + 2a = {}",
                format_rational(&d)
            )));
        }
        Ok(OperatorParams { n, a, p })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Ambient dimension `n + 1`.
    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// Effective dimension `D = n + 2a`.
    pub fn effective_dim(&self) -> Rational {
        rat(self.n as i64) + rat(2) * &self.a
    }

    /// Bubble exponent `s = (n + 2a - 2p) / 2`.
    pub fn bubble_exponent(&self) -> Rational {
        (self.effective_dim() - rat(2 * self.p as i64)) / rat(2)
    }

    pub fn alpha_crit(&self) -> Rational {
        let d = self.effective_dim();
        let tp = rat(2 * self.p as i64);
        (&d + &tp) / (&d - &tp)
    }

    /// `tau = (n + 2a + 2p) - alpha (n + 2a - 2p)`.
    pub fn tau(&self, alpha: &Rational) -> Rational {
        let d = self.effective_dim();
        let tp = rat(2 * self.p as i64);
        (&d + &tp) - alpha * (&d - &tp)
    }

    /// Kelvin exponent `2p - n - 2a`.
    pub fn kelvin_exponent(&self) -> Rational {
        rat(2 * self.p as i64) - self.effective_dim()
    }

    pub fn weight_exponent(&self) -> Rational {
        rat(2) * &self.a - rat(1)
    }

    pub fn summary(&self) -> ParamsSummary {
        ParamsSummary {
            n: self.n,
            a: format_rational(&self.a),
            p: self.p,
            effective_dim: format_rational(&self.effective_dim()),
            alpha_crit: format_rational(&self.alpha_crit()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ParamsSummary {
    pub n: usize,
    pub a: String,
    pub p: u32,
    pub effective_dim: String,
    pub alpha_crit: String,
}

/// Exact `L_a p` for a polynomial even in the last variable.
pub fn weighted_laplacian_poly(p: &Poly, a: &Rational) -> Result<Poly> {
    let dim = p.dim();
    let last = dim - 1;
    let mut out = Poly::zero(dim);
    for axis in 0..dim {
        out = &out + &p.d(axis).d(axis);
    }
    let drift = p.d(last).divide_by_last_var().ok_or(Error::NotDivisible)?;
    Ok(&out + &drift.scale(&(rat(2) * a - rat(1))))
}

/// Exact image of `e` under `L_a`.
pub fn apply_weighted_laplacian(e: &RadialPowerExpr, params: &OperatorParams) -> Result<RadialPowerExpr> {
    check_dim(e.dim(), params)?;
    if let Some(p) = e.as_poly() {
        return Ok(weighted_laplacian_poly(&p, params.a())?.into());
    }
    let last = e.dim() - 1;
    let mut out = RadialPowerExpr::zero(e.dim());
    for axis in 0..e.dim() {
        out = out.add(&e.differentiate(axis)?.differentiate(axis)?);
    }
    let drift = e.differentiate(last)?.divide_by_last_coordinate()?;
    Ok(out.add(&drift.scale(&params.weight_exponent())))
}

/// `(-L_a)^k e`, by `k` sequential applications.
pub fn apply_power(e: &RadialPowerExpr, params: &OperatorParams, k: u32) -> Result<RadialPowerExpr> {
    let mut cur = e.clone();
    for _ in 0..k {
        cur = apply_weighted_laplacian(&cur, params)?.scale(&-Rational::one());
    }
    Ok(cur)
}

fn check_dim(dim: usize, params: &OperatorParams) -> Result<()> {
    if dim != params.dim() {
        return Err(Error::DimensionMismatch { left: dim, right: params.dim() });
    }
    Ok(())
}

/// `t(t + D - 2) - k(k + D - 2)`: the factor in `L_a(|x|^{t-k} h) = λ |x|^{t-2-k} h` for `h` weighted-harmonic of degree `k`.
pub fn eigen_factor(t: &Rational, k: u32, params: &OperatorParams) -> Rational {
    let shift = params.effective_dim() - rat(2);
    let k = rat(k as i64);
    t * (t + &shift) - &k * (&k + &shift)
}

/// Polynomial in `(x_1, ..., x_n, y)` on the half space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfSpacePoly(pub Poly);

impl HalfSpacePoly {
    pub fn poly(&self) -> &Poly {
        &self.0
    }
}

/// `A u = y u_yy + a u_y + Δ_x u`.
pub fn apply_a_halfspace(u: &HalfSpacePoly, params: &OperatorParams) -> Result<HalfSpacePoly> {
    let p = &u.0;
    check_dim(p.dim(), params)?;
    let y = p.dim() - 1;
    let y_var = Poly::var(p.dim(), y);
    let mut out = &(&y_var * &p.d(y).d(y)) + &p.d(y).scale(params.a());
    for axis in 0..y {
        out = &out + &p.d(axis).d(axis);
    }
    Ok(HalfSpacePoly(out))
}

/// `v(x, x_{n+1}) = u(x, x_{n+1}^2 / 4)`.
pub fn substitute_parabolic(u: &HalfSpacePoly) -> Poly {
    let dim = u.0.dim();
    u.0.substitute_monomials(dim, |m| {
        let mut e = m.exps().to_vec();
        let k = e[dim - 1];
        e[dim - 1] = 2 * k;
        Poly::from_monomial(Monomial::new(e), pow_int(&ratio(1, 4), k as i64))
    })
}

/// True iff every odd `t`-derivative of order `2l - 1 <= 2k - 1` of the substituted polynomial vanishes at `t = 0`.
pub fn check_vanishing_odd_derivatives(u: &HalfSpacePoly, k: u32) -> bool {
    let v = substitute_parabolic(u);
    let last = v.dim() - 1;
    let mut cur = v;
    for order in 1..=(2 * k.max(1) - 1) {
        cur = cur.d(last);
        if order % 2 == 1 && !cur.restrict_last_zero().is_zero() {
            return false;
        }
    }
    true
}

/// Convenience: the sign-checked power `(-L_a)^k` on a bare polynomial.
pub fn apply_power_poly(p: &Poly, params: &OperatorParams, k: u32) -> Result<Poly> {
    let mut cur = p.clone();
    for _ in 0..k {
        cur = -weighted_laplacian_poly(&cur, params.a())?;
    }
    Ok(cur)
}
