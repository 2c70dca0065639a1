//! Integration against `|x_{n+1}|^{2a-1}` on spheres and balls, and the
//! integral checks built on it: the divergence identity, the average law, the
//! Jensen step and the integrability test at the origin.
//!
//! Surface measure is the true one (no normalization to `|S^n| = 1`); the
//! normalizer `omega_a` is made explicit wherever an identity needs it.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extrapolate::{loglog_slope, richardson, Extrapolation};
use crate::gauss::{gamma_ratio, gauss_jacobi, gauss_legendre};
use crate::operator::{apply_power, OperatorParams};
use crate::radial::{NumericExpr, RadialPowerExpr};
use crate::rational::to_f64;

/// Unweighted rule on `S^{dim-1}`.
#[derive(Clone, Debug)]
pub struct SphereRule {
    pub dim: usize,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

/// Rule on `S^{dim-1}` exact for polynomials of degree `<= degree`.
pub fn unit_sphere_rule(dim: usize, degree: u32) -> Result<SphereRule> {
    match dim {
        0 => Err(Error::Quadrature("sphere dimension must be positive".into())),
        1 => Ok(SphereRule { dim, nodes: vec![vec![-1.0], vec![1.0]], weights: vec![1.0, 1.0] }),
        2 => {
            let count = degree as usize + 1;
            let w = std::f64::consts::TAU / count as f64;
            let nodes = (0..count)
                .map(|j| {
                    let th = std::f64::consts::TAU * (j as f64 + 0.5) / count as f64;
                    vec![th.cos(), th.sin()]
                })
                .collect();
            Ok(SphereRule { dim, nodes, weights: vec![w; count] })
        }
        _ => {
            let k = degree as usize / 2 + 1;
            let g = (dim as f64 - 3.0) / 2.0;
            let (s, ws) = gauss_jacobi(k, g, g)?;
            let sub = unit_sphere_rule(dim - 1, degree)?;
            let mut nodes = Vec::with_capacity(k * sub.nodes.len());
            let mut weights = Vec::with_capacity(nodes.capacity());
            for (si, wi) in s.iter().zip(&ws) {
                let c = (1.0 - si * si).max(0.0).sqrt();
                for (xi, wj) in sub.nodes.iter().zip(&sub.weights) {
                    let mut p: Vec<f64> = xi.iter().map(|v| c * v).collect();
                    p.push(*si);
                    nodes.push(p);
                    weights.push(wi * wj);
                }
            }
            Ok(SphereRule { dim, nodes, weights })
        }
    }
}

/// `∫_{S^n} |x_{n+1}|^{2a-1+2m} dS = 2 π^{n/2} Γ(a+m) / Γ(a+m+n/2)`.
pub fn weighted_sphere_moment(params: &OperatorParams, m: u32) -> f64 {
    let n = params.n() as f64;
    let a = to_f64(params.a()) + m as f64;
    2.0 * std::f64::consts::PI.powf(0.5 * n) * gamma_ratio(a, a + n / 2.0)
}

/// Weighted measure of the unit sphere, `omega_a`.
pub fn omega_a(params: &OperatorParams) -> f64 {
    weighted_sphere_moment(params, 0)
}

/// `∫_{B_1} |x_{n+1}|^{2a-1} dx = omega_a / (n + 2a)`.
pub fn weighted_ball_volume(params: &OperatorParams) -> f64 {
    omega_a(params) / to_f64(&params.effective_dim())
}

/// Nodes on `S^n` with weights for `|x_{n+1}|^{2a-1} dS`, exact up to degree `2q - 1`.
#[derive(Clone, Debug)]
pub struct WeightedQuadratureGrid {
    pub params: OperatorParams,
    pub q: u32,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub polar_nodes: usize,
}

pub fn build_weighted_sphere_rule(params: &OperatorParams, q: u32) -> Result<WeightedQuadratureGrid> {
    if q < 1 {
        return Err(Error::Quadrature("quadrature degree q must be at least 1".into()));
    }
    let degree = 2 * q - 1;
    let n = params.n();
    let a = to_f64(params.a());
    // u = s^2 turns the polar weight into u^{a-1} (1-u)^{(n-2)/2} on [0, 1]
    let k = (degree as usize + 2).div_ceil(4);
    let alpha = (n as f64 - 2.0) / 2.0;
    let (x, wx) = gauss_jacobi(k, alpha, a - 1.0)?;
    let jac = 2f64.powf(1.0 - a - n as f64 / 2.0);
    let sub = unit_sphere_rule(n, degree)?;
    let mut nodes = Vec::with_capacity(2 * k * sub.nodes.len());
    let mut weights = Vec::with_capacity(nodes.capacity());
    for (xi, wi) in x.iter().zip(&wx) {
        let u = (1.0 + xi) / 2.0;
        let s = u.sqrt();
        let c = ((1.0 - xi) / 2.0).max(0.0).sqrt();
        let wu = 0.5 * jac * wi;
        for sign in [-1.0, 1.0] {
            for (xi, wj) in sub.nodes.iter().zip(&sub.weights) {
                let mut p: Vec<f64> = xi.iter().map(|v| c * v).collect();
                p.push(sign * s);
                nodes.push(p);
                weights.push(wu * wj);
            }
        }
    }
    let grid = WeightedQuadratureGrid { params: params.clone(), q, nodes, weights, polar_nodes: 2 * k };
    let err = grid.moment_error();
    if err > 1e-12 {
        return Err(Error::Quadrature(format!("moment check failed with relative error {err:e}")));
    }
    Ok(grid)
}

impl WeightedQuadratureGrid {
    pub fn degree(&self) -> u32 {
        2 * self.q - 1
    }

    pub fn dim(&self) -> usize {
        self.params.dim()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Largest relative error over the closed-form moments within the exactness degree.
    pub fn moment_error(&self) -> f64 {
        let last = self.dim() - 1;
        let n = self.params.n() as f64;
        let a = to_f64(self.params.a());
        let mut worst = 0.0f64;
        for m in 0..=self.degree() / 2 {
            let q: f64 = self.nodes.iter().zip(&self.weights).map(|(x, w)| w * x[last].powi(2 * m as i32)).sum();
            let exact = weighted_sphere_moment(&self.params, m);
            worst = worst.max((q - exact).abs() / exact);
            if m >= 1 {
                // ∫ x_1^2 s^{2m-2} = M_{m-1} / (2(a+m-1) + n) by symmetry in x_1..x_n and |x|^2 = 1
                let q1: f64 = self
                    .nodes
                    .iter()
                    .zip(&self.weights)
                    .map(|(x, w)| w * x[0] * x[0] * x[last].powi(2 * m as i32 - 2))
                    .sum();
                let exact1 = weighted_sphere_moment(&self.params, m - 1) / (2.0 * (a + m as f64 - 1.0) + n);
                worst = worst.max((q1 - exact1).abs() / exact1);
            }
        }
        worst
    }

    /// `∫_{S^n} |ω_{n+1}|^{2a-1} f(r ω) dS`, summed in node order.
    pub fn sphere_integral<F>(&self, r: f64, f: F) -> Result<f64>
    where
        F: Fn(&[f64]) -> Result<f64> + Sync,
    {
        let eval = |x: &Vec<f64>| {
            let p: Vec<f64> = x.iter().map(|v| r * v).collect();
            f(&p)
        };
        let values: Vec<f64> = if self.nodes.len() >= 512 {
            self.nodes.par_iter().map(eval).collect::<Result<_>>()?
        } else {
            self.nodes.iter().map(eval).collect::<Result<_>>()?
        };
        Ok(values.iter().zip(&self.weights).map(|(v, w)| v * w).sum())
    }

    pub fn sphere_integral_expr(&self, e: &NumericExpr, r: f64) -> Result<f64> {
        self.sphere_integral(r, |x| e.evaluate(x))
    }

    /// `∫_{inner < |x| < outer} |x_{n+1}|^{2a-1} f(x) dx` with composite Gauss-Legendre in the radius.
    pub fn shell_integral<F>(&self, inner: f64, outer: f64, rule: &RadialRule, f: F) -> Result<f64>
    where
        F: Fn(&[f64]) -> Result<f64> + Sync,
    {
        let (t, wt) = gauss_legendre(rule.points)?;
        let radial_power = self.params.n() as f64 + to_f64(self.params.a()) * 2.0 - 1.0;
        let h = (outer - inner) / rule.panels as f64;
        let mut total = 0.0;
        for panel in 0..rule.panels {
            let lo = inner + h * panel as f64;
            for (ti, wi) in t.iter().zip(&wt) {
                let rho = lo + 0.5 * h * (ti + 1.0);
                let s = self.sphere_integral(rho, &f)?;
                total += 0.5 * h * wi * rho.powf(radial_power) * s;
            }
        }
        Ok(total)
    }
}

/// Composite Gauss-Legendre rule applied on every dyadic shell `[s/2, s]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RadialRule {
    pub panels: usize,
    pub points: usize,
}

impl Default for RadialRule {
    fn default() -> Self {
        RadialRule { panels: 2, points: 10 }
    }
}

/// Inner radii `s_k = 2^{-k} s_0`, `k = 0..=levels`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShrinkSchedule {
    pub s0: f64,
    pub levels: usize,
}

impl Default for ShrinkSchedule {
    fn default() -> Self {
        ShrinkSchedule { s0: 1.0, levels: 24 }
    }
}

impl ShrinkSchedule {
    pub fn radii(&self) -> Vec<f64> {
        (0..=self.levels).map(|k| self.s0 * 0.5f64.powi(k as i32)).collect()
    }
}

/// Integrals over the dyadic shells between consecutive radii of `schedule`, starting from the unit sphere.
fn dyadic_shells<F>(
    grid: &WeightedQuadratureGrid,
    schedule: &ShrinkSchedule,
    rule: &RadialRule,
    f: F,
) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    if schedule.s0 > 1.0 || schedule.s0 <= 0.0 {
        return Err(Error::InvalidParams("shrink schedule must start inside the unit ball".into()));
    }
    let mut radii = vec![1.0];
    radii.extend(schedule.radii().into_iter().filter(|&s| s < 1.0));
    radii.windows(2).map(|w| grid.shell_integral(w[1], w[0], rule, &f)).collect()
}

fn cumulative(shells: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = vec![0.0];
    for s in shells {
        acc += s;
        out.push(acc);
    }
    out
}

/// `∫_{S^n} |ω_{n+1}|^{2a-1} u(r ω) dS`, which equals `r^{-(n+2a-1)} ∫_{∂B_r} |x_{n+1}|^{2a-1} u dS`.
pub fn weighted_average_z(e: &RadialPowerExpr, r: f64, grid: &WeightedQuadratureGrid) -> Result<f64> {
    grid.sphere_integral_expr(&e.compile(), r)
}

#[derive(Clone, Debug, Serialize)]
pub struct DivergenceLevel {
    pub i: u32,
    /// `∫_{∂B_1} [∂_r v_i - (2a-1) v_i] dS`.
    pub boundary: f64,
    /// `lim_{s->0} ∫_{B_1 \ B_s} v_{i+1} dx`.
    pub interior: f64,
    pub residual: f64,
    pub relative_residual: f64,
    pub extrapolation_order: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DivergenceReport {
    pub levels: Vec<DivergenceLevel>,
    pub rule: RadialRule,
    pub tol: f64,
    pub pass: bool,
}

impl DivergenceReport {
    pub fn max_residual(&self) -> f64 {
        self.levels.iter().fold(0.0, |m, l| m.max(l.residual.abs()))
    }

    pub fn max_relative_residual(&self) -> f64 {
        self.levels.iter().fold(0.0, |m, l| m.max(l.relative_residual))
    }

    /// `beta_i = B_i + I_i`, the flux through the shrinking inner sphere.
    pub fn betas(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.residual).collect()
    }
}

fn boundary_and_interior(
    w: &RadialPowerExpr,
    w_next: &RadialPowerExpr,
    grid: &WeightedQuadratureGrid,
    schedule: &ShrinkSchedule,
    rule: &RadialRule,
) -> Result<(f64, Extrapolation)> {
    let flux = w.euler().compile();
    let boundary = grid.sphere_integral_expr(&flux, 1.0)?;
    let next = w_next.compile();
    let shells = dyadic_shells(grid, schedule, rule, |x| next.evaluate(x))?;
    let interior = richardson(&cumulative(&shells), 1e-13)?;
    Ok((boundary, interior))
}

/// Checks `B_i + I_i = 0` for `i = 0..p-1`, with `v_i = |x_{n+1}|^{2a-1} (-L_a)^i u`.
pub fn divergence_identity_check(
    u: &RadialPowerExpr,
    params: &OperatorParams,
    grid: &WeightedQuadratureGrid,
    schedule: &ShrinkSchedule,
    rule: &RadialRule,
    tol: f64,
) -> Result<DivergenceReport> {
    if !u.is_even_in_last() {
        return Err(Error::OddParity);
    }
    let mut levels = Vec::new();
    let mut w = u.clone();
    for i in 0..params.p() {
        let w_next = apply_power(&w, params, 1)?;
        let (boundary, interior) = boundary_and_interior(&w, &w_next, grid, schedule, rule)?;
        let residual = boundary + interior.value;
        levels.push(DivergenceLevel {
            i,
            boundary,
            interior: interior.value,
            residual,
            relative_residual: residual.abs() / (boundary.abs() + interior.value.abs() + 1.0),
            extrapolation_order: interior.order,
        });
        w = w_next;
    }
    let pass = levels.iter().all(|l| l.relative_residual <= tol);
    Ok(DivergenceReport { levels, rule: *rule, tol, pass })
}

#[derive(Clone, Debug, Serialize)]
pub struct RefinementStudy {
    pub panels: Vec<usize>,
    pub residuals: Vec<f64>,
    /// Log-log slope of residual against panel width (positive means convergence).
    pub slope: f64,
}

/// Repeats the divergence check with `points`-point panels, doubling the panel count from 1.
pub fn divergence_refinement_study(
    u: &RadialPowerExpr,
    params: &OperatorParams,
    grid: &WeightedQuadratureGrid,
    schedule: &ShrinkSchedule,
    points: usize,
    refinements: usize,
) -> Result<RefinementStudy> {
    let panels: Vec<usize> = (0..refinements).map(|k| 1 << k).collect();
    let residuals = panels
        .iter()
        .map(|&p| {
            let rule = RadialRule { panels: p, points };
            divergence_identity_check(u, params, grid, schedule, &rule, f64::INFINITY).map(|r| r.max_residual())
        })
        .collect::<Result<Vec<f64>>>()?;
    // drop levels that have reached the roundoff floor
    let usable: Vec<(f64, f64)> = panels
        .iter()
        .zip(&residuals)
        .filter(|(_, r)| **r > 1e-13)
        .map(|(p, r)| (1.0 / *p as f64, *r))
        .collect();
    let (h, r): (Vec<f64>, Vec<f64>) = usable.into_iter().unzip();
    let slope = loglog_slope(&h, &r).ok_or_else(|| {
        Error::NonConvergentLimit("too few refinement levels above roundoff to estimate a slope".into())
    })?;
    Ok(RefinementStudy { panels, residuals, slope })
}

#[derive(Clone, Debug, Serialize)]
pub struct AverageLawReport {
    pub i: u32,
    pub radii: Vec<f64>,
    /// `r^{n-1} v̄_i(r)` with `v̄_i(r) = r^{-n} ∫_{∂B_r} v_i dS`.
    pub scaled_averages: Vec<f64>,
    pub fitted_constant: f64,
    pub beta_from_fit: f64,
    pub beta_from_definition: f64,
    pub relative_gap: f64,
    pub pass: bool,
}

/// Compares `-(n+2a-2) lim r^{n-1} v̄_i(r)` with `beta_i` assembled from its definition.
pub fn average_law_check(
    u: &RadialPowerExpr,
    i: u32,
    params: &OperatorParams,
    grid: &WeightedQuadratureGrid,
    schedule: &ShrinkSchedule,
    rule: &RadialRule,
    tol: f64,
) -> Result<AverageLawReport> {
    let d = to_f64(&params.effective_dim());
    let w = apply_power(u, params, i)?;
    let w_next = apply_power(&w, params, 1)?;
    let compiled = w.compile();
    let radii = schedule.radii();
    let scaled_averages = radii
        .iter()
        .map(|&r| Ok(r.powf(d - 2.0) * grid.sphere_integral_expr(&compiled, r)?))
        .collect::<Result<Vec<f64>>>()?;
    let fit = richardson(&scaled_averages, 1e-9)?;
    let (boundary, interior) = boundary_and_interior(&w, &w_next, grid, schedule, rule)?;
    let beta_from_definition = boundary + interior.value;
    let beta_from_fit = -(d - 2.0) * fit.value;
    let relative_gap = (beta_from_fit - beta_from_definition).abs() / beta_from_definition.abs().max(1.0);
    Ok(AverageLawReport {
        i,
        radii,
        scaled_averages,
        fitted_constant: fit.value,
        beta_from_fit,
        beta_from_definition,
        relative_gap,
        pass: relative_gap <= tol,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct JensenReport {
    pub alpha: f64,
    pub rho: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    /// Weighted measure of the unit sphere used as the normalizer.
    pub normalizer: f64,
    pub pass: bool,
}

/// `∫_{∂B_ρ} |x_{n+1}|^{2a-1} u^α dS >= ρ^{n+2a-1} ω^{1-α} z(ρ)^α`.
pub fn jensen_weighted_check(
    u: &RadialPowerExpr,
    alpha: f64,
    rho: f64,
    grid: &WeightedQuadratureGrid,
) -> Result<JensenReport> {
    if alpha < 1.0 {
        return Err(Error::InvalidParams(format!("Jensen step needs alpha >= 1, got {alpha}")));
    }
    let e = u.compile();
    let positive = |x: &[f64]| {
        let v = e.evaluate(x)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(Error::InvalidParams(format!("u = {v:e} is not positive at {x:?}")))
        }
    };
    let z = grid.sphere_integral(rho, positive)?;
    let powered = grid.sphere_integral(rho, |x| positive(x).map(|v| v.powf(alpha)))?;
    let d = to_f64(&grid.params.effective_dim());
    let scale = rho.powf(d - 1.0);
    let normalizer = grid.total_weight();
    let lhs = scale * powered;
    let rhs = scale * normalizer.powf(1.0 - alpha) * z.powf(alpha);
    let gap = lhs - rhs;
    Ok(JensenReport { alpha, rho, lhs, rhs, gap, normalizer, pass: gap >= -1e-12 * lhs.abs() })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Integrability {
    Integrable { value: f64, tail_ratio: f64 },
    /// `∫_{B_1 \ B_s}` grows like `s^{-exponent}` (`exponent = 0` is logarithmic).
    Divergent { exponent: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct L1Report {
    pub tau: f64,
    pub alpha: f64,
    pub radii: Vec<f64>,
    pub shells: Vec<f64>,
    pub partial_integrals: Vec<f64>,
    pub outcome: Integrability,
}

/// Decides whether `|x_{n+1}|^{2a-1} |x|^{-τ} e^α` is integrable near the origin from dyadic shell contributions.
pub fn l1_singularity_check(
    e: &RadialPowerExpr,
    tau: f64,
    alpha: f64,
    grid: &WeightedQuadratureGrid,
    schedule: &ShrinkSchedule,
    rule: &RadialRule,
) -> Result<L1Report> {
    let compiled = e.compile();
    let integrand = |x: &[f64]| {
        let v = compiled.evaluate(x)?;
        if v < 0.0 {
            return Err(Error::SingularEvaluation(format!("negative value {v:e} raised to {alpha}")));
        }
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        Ok(r.powf(-tau) * v.powf(alpha))
    };
    let shells = dyadic_shells(grid, schedule, rule, integrand)?;
    let partial_integrals = cumulative(&shells);
    let outcome = classify_shells(&shells, partial_integrals.last().copied().unwrap_or(0.0))?;
    Ok(L1Report { tau, alpha, radii: schedule.radii(), shells, partial_integrals, outcome })
}

fn classify_shells(shells: &[f64], total: f64) -> Result<Integrability> {
    if shells.iter().all(|s| *s == 0.0) {
        return Ok(Integrability::Integrable { value: total, tail_ratio: 0.0 });
    }
    if shells.len() < 6 {
        return Err(Error::Inconclusive("too few shells".into()));
    }
    let ratios: Vec<f64> = shells.windows(2).map(|w| w[1] / w[0]).collect();
    let tail = &ratios[ratios.len() - 4..];
    let last = *tail.last().expect("four ratios");
    let stable = last.is_finite() && last > 0.0 && tail.iter().all(|r| ((r - last) / last).abs() < 0.05);
    if !stable {
        return Err(Error::Inconclusive(format!("shell ratios do not settle: {tail:?}")));
    }
    if last < 0.999 {
        let remainder = shells.last().expect("nonempty") * last / (1.0 - last);
        Ok(Integrability::Integrable { value: total + remainder, tail_ratio: last })
    } else {
        Ok(Integrability::Divergent { exponent: last.log2().max(0.0) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;
    use crate::rational::{rat, ratio};

    fn grid(n: usize, a: crate::rational::Rational, q: u32) -> WeightedQuadratureGrid {
        let params = OperatorParams::new(n, a, 1).unwrap();
        build_weighted_sphere_rule(&params, q).unwrap()
    }

    #[test]
    fn closed_form_moments() {
        let params = OperatorParams::new(1, rat(1), 1).unwrap();
        assert!((omega_a(&params) - 4.0).abs() < 1e-14);
        assert!((weighted_sphere_moment(&params, 1) - 8.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn grids_reproduce_moments() {
        for (n, a) in [(1, rat(1)), (2, ratio(3, 2)), (3, ratio(5, 4)), (4, rat(2))] {
            let g = grid(n, a, 6);
            assert!(g.moment_error() < 1e-13, "{n} {}", g.moment_error());
        }
    }

    #[test]
    fn circle_weight_total() {
        let g = grid(1, rat(1), 4);
        assert!((g.total_weight() - 4.0).abs() < 1e-13);
        let odd = g.sphere_integral(1.0, |x| Ok(x[0])).unwrap();
        assert!(odd.abs() < 1e-15);
    }

    #[test]
    fn unit_sphere_areas() {
        let s2 = unit_sphere_rule(3, 5).unwrap();
        assert!((s2.weights.iter().sum::<f64>() - 4.0 * std::f64::consts::PI).abs() < 1e-13);
        let s3 = unit_sphere_rule(4, 5).unwrap();
        assert!((s3.weights.iter().sum::<f64>() - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn z_of_constant_and_square() {
        let g = grid(2, ratio(3, 2), 4);
        let one = RadialPowerExpr::constant(3, rat(1));
        let r2 = RadialPowerExpr::from_poly(Poly::norm_squared(3));
        let w = omega_a(&g.params);
        for r in [0.3, 1.0, 2.5] {
            assert!((weighted_average_z(&one, r, &g).unwrap() - w).abs() < 1e-12 * w);
            assert!((weighted_average_z(&r2, r, &g).unwrap() - w * r * r).abs() < 1e-12 * w * r * r);
        }
    }

    #[test]
    fn ball_integral_of_one() {
        let g = grid(1, ratio(3, 2), 4);
        let shells = dyadic_shells(&g, &ShrinkSchedule::default(), &RadialRule::default(), |_| Ok(1.0)).unwrap();
        let total: f64 = shells.iter().sum();
        let exact = weighted_ball_volume(&g.params);
        assert!((total - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn shell_classification() {
        let geometric: Vec<f64> = (0..10).map(|k| 0.25f64.powi(k)).collect();
        match classify_shells(&geometric, 1.0).unwrap() {
            Integrability::Integrable { tail_ratio, .. } => assert!((tail_ratio - 0.25).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        let growing: Vec<f64> = (0..10).map(|k| 2f64.powi(k)).collect();
        assert_eq!(classify_shells(&growing, 0.0).unwrap(), Integrability::Divergent { exponent: 1.0 });
        let noisy = vec![1.0, 2.0, 0.5, 3.0, 0.1, 4.0, 0.2];
        assert!(matches!(classify_shells(&noisy, 0.0), Err(Error::Inconclusive(_))));
    }
}
