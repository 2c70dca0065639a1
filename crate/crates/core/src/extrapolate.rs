//! Richardson extrapolation for sequences `I(h_k)` with `h_k = 2^{-k} h_0`.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Extrapolation {
    pub value: f64,
    /// Estimated convergence order in `h`; `None` when the sequence had already settled.
    pub order: Option<f64>,
    pub error_estimate: f64,
}

/// Minimum number of levels accepted.
pub const MIN_LEVELS: usize = 6;

/// Extrapolates to `h -> 0`, estimating the order from consecutive differences.
///
/// Fails with [`Error::NonConvergentLimit`] when the differences do not shrink
/// geometrically or the last two extrapolants disagree beyond `tol`.
pub fn richardson(values: &[f64], tol: f64) -> Result<Extrapolation> {
    if values.len() < MIN_LEVELS {
        return Err(Error::NonConvergentLimit(format!(
            "need at least {MIN_LEVELS} levels, got {}",
            values.len()
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonConvergentLimit("non-finite level value".into()));
    }
    let last = *values.last().expect("nonempty");
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let d_last = *diffs.last().expect("at least one difference");
    if d_last.abs() <= tol * scale {
        return Ok(Extrapolation { value: last, order: None, error_estimate: d_last.abs() });
    }
    let extrapolant = |k: usize| -> Option<(f64, f64)> {
        // uses diffs[k-1], diffs[k]; returns (value, ratio)
        let (d0, d1) = (diffs[k - 1], diffs[k]);
        if d1 == 0.0 {
            return Some((values[k + 1], f64::INFINITY));
        }
        let ratio = d0 / d1;
        (ratio > 1.0).then(|| (values[k + 1] + d1 / (ratio - 1.0), ratio))
    };
    let k = diffs.len() - 1;
    let (e1, ratio) = extrapolant(k)
        .ok_or_else(|| Error::NonConvergentLimit(format!("differences are not shrinking (last {d_last:e})")))?;
    let (e0, _) = extrapolant(k - 1)
        .ok_or_else(|| Error::NonConvergentLimit("differences are not shrinking geometrically".into()))?;
    let err = (e1 - e0).abs();
    if err > tol * scale.max(e1.abs()) {
        return Err(Error::NonConvergentLimit(format!(
            "extrapolants {e0:e} and {e1:e} differ by {err:e}"
        )));
    }
    Ok(Extrapolation { value: e1, order: Some(ratio.log2()), error_estimate: err })
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Intercept and slope of the least-squares line `y = c + m x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = x.len().min(y.len());
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = x[..n].iter().sum::<f64>() / nf;
    let my = y[..n].iter().sum::<f64>() / nf;
    let sxx: f64 = x[..n].iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x[..n].iter().zip(&y[..n]).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let m = sxy / sxx;
    Some((my - m * mx, m))
}

/// Value at `x = 0` of the interpolating polynomial through `(x_i, y_i)` (Neville).
pub fn extrapolate_to_zero(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len().min(y.len());
    if n == 0 {
        return None;
    }
    let mut p = y[..n].to_vec();
    for k in 1..n {
        for i in 0..n - k {
            let d = x[i] - x[i + k];
            if d == 0.0 {
                return None;
            }
            p[i] = (x[i] * p[i + 1] - x[i + k] * p[i]) / d;
        }
    }
    Some(p[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neville_is_exact_on_polynomials() {
        let x = [0.4, 0.2, 0.1, 0.05];
        let y: Vec<f64> = x.iter().map(|h| 2.0 - h + 3.0 * h * h - h * h * h).collect();
        assert!((extrapolate_to_zero(&x, &y).unwrap() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn recovers_limit_of_power_law_sequence() {
        let h: Vec<f64> = (0..10).map(|k| 0.5f64.powi(k)).collect();
        let values: Vec<f64> = h.iter().map(|h| 3.0 - 2.0 * h.powi(3)).collect();
        let e = richardson(&values, 1e-10).unwrap();
        assert!((e.value - 3.0).abs() < 1e-12);
        assert!((e.order.unwrap() - 3.0).abs() < 1e-6);
    }

    #[test]
    fn settled_sequence_returns_last_value() {
        let values = vec![1.0; 8];
        let e = richardson(&values, 1e-12).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.order, None);
    }

    #[test]
    fn divergent_sequence_is_rejected() {
        let values: Vec<f64> = (0..8).map(|k| 2f64.powi(k)).collect();
        assert!(matches!(richardson(&values, 1e-8), Err(Error::NonConvergentLimit(_))));
        assert!(richardson(&[1.0, 2.0], 1e-8).is_err());
    }

    #[test]
    fn slope_of_power_law() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 5.0 * v.powf(-2.5)).collect();
        assert!((loglog_slope(&x, &y).unwrap() + 2.5).abs() < 1e-12);
        let (c, m) = linear_fit(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        assert!((c - 1.0).abs() < 1e-15 && (m - 2.0).abs() < 1e-15);
    }
}
