//! Gauss rules from three-term recurrences via Golub-Welsch.

use nalgebra::{DMatrix, SymmetricEigen};
use libm::{lgamma as ln_gamma, tgamma as gamma};

use crate::error::{Error, Result};

/// Nodes and weights on `[-1, 1]` for the weight `(1-x)^alpha (1+x)^beta`.
pub fn gauss_jacobi(k: usize, alpha: f64, beta: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if k == 0 {
        return Err(Error::Quadrature("a Gauss rule needs at least one node".into()));
    }
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(Error::Quadrature(format!("Jacobi parameters ({alpha}, {beta}) must exceed -1")));
    }
    let ab = alpha + beta;
    let diag = |j: usize| -> f64 {
        let j = j as f64;
        if j == 0.0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * j + ab) * (2.0 * j + ab + 2.0))
        }
    };
    // squared off-diagonal entries b_j, j >= 1
    let off2 = |j: usize| -> f64 {
        let j = j as f64;
        if j == 1.0 {
            4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            let s = 2.0 * j + ab;
            4.0 * j * (j + alpha) * (j + beta) * (j + ab) / (s * s * (s + 1.0) * (s - 1.0))
        }
    };
    let mut jm = DMatrix::<f64>::zeros(k, k);
    for j in 0..k {
        jm[(j, j)] = diag(j);
        if j + 1 < k {
            let b = off2(j + 1).sqrt();
            jm[(j, j + 1)] = b;
            jm[(j + 1, j)] = b;
        }
    }
    let mu0 = 2f64.powf(ab + 1.0) * gamma(alpha + 1.0) * gamma_ratio(beta + 1.0, ab + 2.0);
    let eig = SymmetricEigen::new(jm);
    let a: Vec<f64> = (0..k).map(diag).collect();
    let b: Vec<f64> = (0..=k).map(|j| if j == 0 { 0.0 } else { off2(j).sqrt() }).collect();
    // orthonormal recurrence with p_0 = 1: values p_k(x), p_k'(x) and sum_{j<k} p_j(x)^2
    let eval = |x: f64| {
        let (mut p0, mut p1) = (0.0, 1.0);
        let (mut d0, mut d1) = (0.0, 0.0);
        let mut sum = 0.0;
        for j in 0..k {
            sum += p1 * p1;
            let p2 = ((x - a[j]) * p1 - b[j] * p0) / b[j + 1];
            let d2 = ((x - a[j]) * d1 + p1 - b[j] * d0) / b[j + 1];
            (p0, p1, d0, d1) = (p1, p2, d1, d2);
        }
        (p1, d1, sum)
    };
    let mut pairs: Vec<(f64, f64)> = (0..k)
        .map(|i| {
            let mut x = eig.eigenvalues[i];
            for _ in 0..3 {
                let (p, d, _) = eval(x);
                if d == 0.0 {
                    break;
                }
                x -= p / d;
            }
            (x, mu0 / eval(x).2)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs.into_iter().unzip())
}

/// `Γ(x) / Γ(y)`. Direct evaluation is kept where it cannot overflow since
/// exponentiating `ln Γ` costs about two digits.
pub fn gamma_ratio(x: f64, y: f64) -> f64 {
    if x < 150.0 && y < 150.0 {
        gamma(x) / gamma(y)
    } else {
        (ln_gamma(x) - ln_gamma(y)).exp()
    }
}

pub fn gauss_legendre(k: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    gauss_jacobi(k, 0.0, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(5).unwrap();
        for deg in 0..10 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "degree {deg}: {q} vs {exact}");
        }
    }

    #[test]
    fn chebyshev_weight_total_mass() {
        let (_, w) = gauss_jacobi(7, -0.5, -0.5).unwrap();
        assert!((w.iter().sum::<f64>() - std::f64::consts::PI).abs() < 1e-13);
    }

    #[test]
    fn jacobi_moment_matches_beta_function() {
        let (alpha, beta) = (0.5, 1.5);
        let (x, w) = gauss_jacobi(6, alpha, beta).unwrap();
        let q: f64 = x.iter().zip(&w).map(|(x, w)| w * (1.0 + x)).sum();
        // ∫ (1-x)^a (1+x)^{b+1} = 2^{a+b+2} B(a+1, b+2)
        let exact = (2f64.powf(alpha + beta + 2.0)
            * (ln_gamma(alpha + 1.0) + ln_gamma(beta + 2.0) - ln_gamma(alpha + beta + 3.0)).exp())
            .abs();
        assert!((q - exact).abs() < 1e-13 * exact);
    }

    #[test]
    fn many_nodes_keep_full_precision() {
        let (x, w) = gauss_jacobi(12, -0.5, 0.0).unwrap();
        for m in 0..23 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * ((1.0 + x) / 2.0).powi(m)).sum();
            // ∫ (1-x)^{-1/2} ((1+x)/2)^m = 2^{1/2} B(1/2, m+1)
            let exact = 2f64.sqrt() * 2.0 * (1..=m).map(|j| j as f64 / (j as f64 + 0.5)).product::<f64>();
            assert!((q - exact).abs() < 1e-14 * exact, "m = {m}: {:e}", (q - exact) / exact);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(gauss_jacobi(0, 0.0, 0.0).is_err());
        assert!(gauss_jacobi(3, -1.0, 0.0).is_err());
    }
}
