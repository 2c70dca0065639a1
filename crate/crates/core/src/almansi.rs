//! Decomposition of even homogeneous polynomials into weighted-harmonic parts,
//! `p = p_m + |x|^2 p_{m-2} + |x|^4 p_{m-4} + ...`, obtained by inverting
//! `T(q) = L_a((1 - |x|^2) q)` on the space `W` of even polynomials of degree
//! at most `m - 2`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::operator::{weighted_laplacian_poly, OperatorParams};
use crate::poly::{Monomial, Poly};
use crate::rational::Rational;

/// Homogeneous monomials of `degree` with even last exponent, in descending graded-lex order.
pub fn even_monomials(dim: usize, degree: u32) -> Vec<Monomial> {
    fn rec(dim: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if prefix.len() + 1 == dim {
            if left.is_multiple_of(2) {
                let mut e = prefix.clone();
                e.push(left);
                out.push(Monomial::new(e));
            }
            return;
        }
        for e in (0..=left).rev() {
            prefix.push(e);
            rec(dim, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, degree, &mut Vec::with_capacity(dim), &mut out);
    out
}

/// `dim P_m` for even homogeneous polynomials (zero for negative `m`).
pub fn even_space_dim(dim: usize, degree: i64) -> usize {
    if degree < 0 {
        0
    } else {
        even_monomials(dim, degree as u32).len()
    }
}

fn coords(p: &Poly, index: &HashMap<Monomial, usize>, len: usize) -> Result<Vec<Rational>> {
    let mut v = vec![Rational::zero(); len];
    for (m, c) in p.terms() {
        let &i = index.get(m).ok_or(Error::SingularSystem)?;
        v[i] = c.clone();
    }
    Ok(v)
}

fn from_coords(dim: usize, basis: &[Monomial], v: &[Rational]) -> Poly {
    Poly::from_terms(dim, basis.iter().zip(v).map(|(m, c)| (m.exps().to_vec(), c.clone())))
        .expect("basis dimension")
}

type CacheKey = (u32, usize, Rational);

struct TSolver {
    basis: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    inverse: Matrix,
}

fn t_solver_cache() -> &'static RwLock<HashMap<CacheKey, Arc<TSolver>>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, Arc<TSolver>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn basis_cache() -> &'static RwLock<HashMap<CacheKey, Arc<Vec<Poly>>>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, Arc<Vec<Poly>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn t_solver(m: u32, params: &OperatorParams) -> Result<Arc<TSolver>> {
    let key = (m, params.dim(), params.a().clone());
    if let Some(s) = t_solver_cache().read().expect("cache lock").get(&key) {
        return Ok(s.clone());
    }
    let dim = params.dim();
    let basis: Vec<Monomial> = (0..=m - 2).rev().flat_map(|d| even_monomials(dim, d)).collect();
    let index: HashMap<Monomial, usize> = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let one_minus_r2 = &Poly::one(dim) - &Poly::norm_squared(dim);
    let n = basis.len();
    let mut t = vec![vec![Rational::zero(); n]; n];
    for (j, mono) in basis.iter().enumerate() {
        let w = Poly::from_monomial(mono.clone(), Rational::from_integer(1.into()));
        let image = weighted_laplacian_poly(&(&one_minus_r2 * &w), params.a())?;
        for (i, v) in coords(&image, &index, n)?.into_iter().enumerate() {
            t[i][j] = v;
        }
    }
    let solver = Arc::new(TSolver { basis, index, inverse: linalg::inverse(&t)? });
    // concurrent fills compute the same value, so last writer wins harmlessly
    t_solver_cache().write().expect("cache lock").insert(key, solver.clone());
    Ok(solver)
}

/// The `q` in `W` with `L_a((1 - |x|^2) q + p) = 0`, i.e. `T(q) = -L_a p`.
pub fn solve_t(p: &Poly, params: &OperatorParams) -> Result<Poly> {
    if p.dim() != params.dim() {
        return Err(Error::DimensionMismatch { left: p.dim(), right: params.dim() });
    }
    if !p.is_even_in_last() {
        return Err(Error::OddParity);
    }
    let m = p.degree().unwrap_or(0);
    if m < 2 {
        return Ok(Poly::zero(p.dim()));
    }
    let solver = t_solver(m, params)?;
    let rhs = -weighted_laplacian_poly(p, params.a())?;
    let rhs = coords(&rhs, &solver.index, solver.basis.len())?;
    let q = linalg::mat_vec(&solver.inverse, &rhs);
    Ok(from_coords(p.dim(), &solver.basis, &q))
}

pub fn is_weighted_harmonic(p: &Poly, params: &OperatorParams) -> bool {
    p.dim() == params.dim()
        && p.is_even_in_last()
        && weighted_laplacian_poly(p, params.a()).map(|q| q.is_zero()).unwrap_or(false)
}

/// `p = sum_i |x|^{2i} parts[i]` with every part weighted-harmonic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneousDecomposition {
    pub degree: u32,
    /// `(i, p_{m-2i})`, zero parts omitted, increasing `i`.
    pub parts: Vec<(u32, Poly)>,
}

impl HomogeneousDecomposition {
    pub fn reconstruct(&self, dim: usize) -> Poly {
        let r2 = Poly::norm_squared(dim);
        self.parts
            .iter()
            .fold(Poly::zero(dim), |acc, (i, part)| &acc + &(&r2.pow(*i) * part))
    }
}

/// Peels off weighted-harmonic components one degree at a time via [`solve_t`].
pub fn almansi_decompose(p: &Poly, params: &OperatorParams) -> Result<HomogeneousDecomposition> {
    if p.dim() != params.dim() {
        return Err(Error::DimensionMismatch { left: p.dim(), right: params.dim() });
    }
    if !p.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    if !p.is_even_in_last() {
        return Err(Error::OddParity);
    }
    let degree = p.degree().unwrap_or(0);
    let r2 = Poly::norm_squared(p.dim());
    let mut parts = Vec::new();
    let mut current = p.clone();
    let mut i = 0;
    while !current.is_zero() {
        let m = current.degree().expect("nonzero");
        if m < 2 {
            parts.push((i, current));
            break;
        }
        let q = solve_t(&current, params)?.homogeneous_part(m - 2);
        let harmonic = &current - &(&r2 * &q);
        debug_assert!(is_weighted_harmonic(&harmonic, params));
        if !harmonic.is_zero() {
            parts.push((i, harmonic));
        }
        current = q;
        i += 1;
    }
    Ok(HomogeneousDecomposition { degree, parts })
}

/// Basis of the weighted-harmonic even polynomials of degree `m`.
#[derive(Clone, Debug)]
pub struct HarmonicBasis {
    pub degree: u32,
    pub params: OperatorParams,
    pub elements: Vec<Poly>,
}

/// Exact kernel of `L_a : P_m -> P_{m-2}`; memoized per `(m, n, a)`.
pub fn harmonic_basis(m: u32, params: &OperatorParams) -> Result<HarmonicBasis> {
    let key = (m, params.dim(), params.a().clone());
    let cached = basis_cache().read().expect("cache lock").get(&key).cloned();
    let elements = match cached {
        Some(e) => e,
        None => {
            let e = Arc::new(compute_harmonic_basis(m, params)?);
            basis_cache().write().expect("cache lock").insert(key, e.clone());
            e
        }
    };
    Ok(HarmonicBasis { degree: m, params: params.clone(), elements: elements.as_ref().clone() })
}

fn compute_harmonic_basis(m: u32, params: &OperatorParams) -> Result<Vec<Poly>> {
    let dim = params.dim();
    let domain = even_monomials(dim, m);
    if m < 2 {
        return Ok(domain.into_iter().map(|mono| Poly::from_monomial(mono, Rational::from_integer(1.into()))).collect());
    }
    let target = even_monomials(dim, m - 2);
    let index: HashMap<Monomial, usize> = target.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let mut mat = vec![vec![Rational::zero(); domain.len()]; target.len()];
    for (j, mono) in domain.iter().enumerate() {
        let image = weighted_laplacian_poly(&Poly::from_monomial(mono.clone(), Rational::from_integer(1.into())), params.a())?;
        for (i, v) in coords(&image, &index, target.len())?.into_iter().enumerate() {
            mat[i][j] = v;
        }
    }
    Ok(linalg::nullspace(&mat, domain.len())
        .into_iter()
        .map(|v| from_coords(dim, &domain, &v))
        .collect())
}
