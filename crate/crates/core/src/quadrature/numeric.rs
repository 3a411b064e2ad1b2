//! Graded polar tensor-product quadrature over the model domains.
//!
//! The first radius is split into cells `[2^{-j-1}, 2^{-j}]`, each carrying a
//! fixed-order Gauss rule; the region below the last cell is either filled by
//! geometric extrapolation of the cell contributions or by one more Gauss
//! cell. The second radius uses `r2 = r1 * s` on the Hartogs triangle and
//! `r2 = s` on bidiscs. Angles use equispaced nodes.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gauss::gauss_legendre;
use crate::error::{Error, Result};
use crate::geometry::{Domain, Point2C, Weight};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Gauss nodes per radial cell.
    pub radial_order: usize,
    /// Equispaced nodes per angular period.
    pub angular_order: usize,
    /// Number of dyadic cells toward `r1 = 0`.
    pub grading_levels: usize,
    /// Dyadic cells toward `s = 0` in the second radius (0: a single cell).
    pub inner_grading_levels: usize,
    /// Number of refinements after the first pass.
    pub refinement_cap: usize,
    /// Divergence fit window `eps = 10^-1 .. 10^-window_decades`.
    pub window_decades: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            radial_order: 8,
            angular_order: 16,
            grading_levels: 40,
            inner_grading_levels: 0,
            refinement_cap: 4,
            window_decades: 6,
        }
    }
}

impl QuadratureSpec {
    pub const MAX_GRADING: usize = 60;

    pub fn validate(&self) -> Result<()> {
        if self.radial_order < 2 || self.angular_order < 2 {
            return Err(Error::invalid("quadrature orders must be at least 2"));
        }
        if self.grading_levels > Self::MAX_GRADING || self.inner_grading_levels > Self::MAX_GRADING
        {
            return Err(Error::invalid(format!(
                "grading levels must not exceed {}",
                Self::MAX_GRADING
            )));
        }
        if self.window_decades < 4
            || 10f64.powi(-(self.window_decades as i32)) < 0.5f64.powi(Self::MAX_GRADING as i32)
        {
            return Err(Error::invalid("divergence window must span 4..18 decades"));
        }
        Ok(())
    }

    /// Parameters of refinement pass `k` (pass 0 is `self`).
    pub fn pass(&self, k: usize) -> QuadratureSpec {
        QuadratureSpec {
            radial_order: self.radial_order + 4 * k,
            angular_order: self.angular_order + 8 * k,
            grading_levels: (self.grading_levels + 8 * k).min(Self::MAX_GRADING),
            inner_grading_levels: if self.inner_grading_levels == 0 {
                0
            } else {
                (self.inner_grading_levels + 4 * k).min(Self::MAX_GRADING)
            },
            ..self.clone()
        }
    }

    pub fn window(&self) -> Vec<f64> {
        (1..=self.window_decades as i32)
            .map(|k| 10f64.powi(-k))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Verdict {
    Converged,
    /// Truncated integrals grow like `a + log_slope * ln(1/eps)`; the growth
    /// exponent `g` fits increments `~ eps^{-g}` (0 for logarithmic growth).
    Diverged {
        log_slope: f64,
        growth_exponent: f64,
    },
    Inconclusive,
}

impl Verdict {
    pub fn is_diverged(&self) -> bool {
        matches!(self, Verdict::Diverged { .. })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TruncatedValue {
    pub epsilon: f64,
    pub value: f64,
    pub value_im: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegrationResult {
    #[serde(serialize_with = "ser_complex")]
    pub value: Complex64,
    #[serde(serialize_with = "ser_f64")]
    pub error_estimate: f64,
    pub verdict: Verdict,
    /// `int_{r1 > eps}` over the divergence window, from the final pass.
    pub truncated: Vec<TruncatedValue>,
    /// Error estimates of successive refinements.
    pub error_history: Vec<f64>,
    pub passes: usize,
}

impl IntegrationResult {
    pub fn is_converged(&self) -> bool {
        self.verdict == Verdict::Converged
    }

    pub fn real(&self) -> f64 {
        self.value.re
    }
}

fn ser_f64<S: serde::Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_str(&format!("{x}"))
    }
}

fn ser_complex<S: serde::Serializer>(c: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&c.re)?;
    t.serialize_element(&c.im)?;
    t.end()
}

/// Equispaced angular nodes in one or two angles.
pub struct AngularGrid {
    pub n: usize,
    pub dim: usize,
    roots: Vec<Complex64>,
}

impl AngularGrid {
    pub fn new(n: usize, dim: usize) -> Self {
        AngularGrid {
            n,
            dim,
            roots: (0..n)
                .map(|j| Complex64::from_polar(1.0, TAU * j as f64 / n as f64))
                .collect(),
        }
    }

    pub fn n2(&self) -> usize {
        if self.dim == 2 {
            self.n
        } else {
            1
        }
    }

    pub fn len(&self) -> usize {
        self.n * self.n2()
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn angle(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n as f64
    }

    /// `e^{i k theta_j}`.
    pub fn phase(&self, k: i64, j: usize) -> Complex64 {
        let n = self.n as i64;
        self.roots[(k * j as i64).rem_euclid(n) as usize]
    }

    /// Measure of one grid cell, `(2 pi / n)^dim`.
    pub fn cell_weight(&self) -> f64 {
        (TAU / self.n as f64).powi(self.dim as i32)
    }
}

/// A function that can be integrated numerically over the model domains.
pub trait Integrand: Sync {
    fn value(&self, z: &Point2C) -> Complex64;

    /// Values on the torus grid at radii `(r1, r2)`: `out[j1 * n2 + j2]`.
    fn fill_grid(&self, r1: f64, r2: f64, grid: &AngularGrid, out: &mut [Complex64]) {
        let n2 = grid.n2();
        for j1 in 0..grid.n {
            for j2 in 0..n2 {
                let z = if grid.dim == 1 {
                    Point2C::one(r1, grid.angle(j1))
                } else {
                    Point2C::two(r1, grid.angle(j1), r2, grid.angle(j2))
                };
                out[j1 * n2 + j2] = self.value(&z);
            }
        }
    }
}

impl<F> Integrand for F
where
    F: Fn(&Point2C) -> Complex64 + Sync,
{
    fn value(&self, z: &Point2C) -> Complex64 {
        self(z)
    }
}

impl Integrand for super::TermSum {
    fn value(&self, z: &Point2C) -> Complex64 {
        self.eval(z)
    }

    fn fill_grid(&self, r1: f64, r2: f64, grid: &AngularGrid, out: &mut [Complex64]) {
        super::TermSum::fill_grid(self, r1, r2, grid, out)
    }
}

impl<C: crate::series::Coefficient> Integrand for crate::series::CoeffSeries<C> {
    fn value(&self, z: &Point2C) -> Complex64 {
        let s = z.second();
        self.eval_polar(z.z1.radius, z.z1.angle, s.radius, s.angle)
    }

    fn fill_grid(&self, r1: f64, r2: f64, grid: &AngularGrid, out: &mut [Complex64]) {
        out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        let n2 = grid.n2();
        for (k, c) in self.iter() {
            let amp = c.to_c64() * (r1.powi(k.m as i32) * r2.powi(k.n as i32));
            for j1 in 0..grid.n {
                let e1 = amp * grid.phase(k.m, j1);
                let row = &mut out[j1 * n2..(j1 + 1) * n2];
                if n2 == 1 {
                    row[0] += e1;
                } else {
                    for (j2, v) in row.iter_mut().enumerate() {
                        *v += e1 * grid.phase(k.n, j2);
                    }
                }
            }
        }
    }
}

/// `|f|^p`.
pub struct AbsPow<'a> {
    pub f: &'a dyn Integrand,
    pub p: f64,
}

pub(crate) fn abs_pow(v: Complex64, p: f64) -> f64 {
    let n2 = v.norm_sqr();
    if p == 2.0 {
        n2
    } else if p.fract() == 0.0 && p > 0.0 && p <= 16.0 {
        let k = p as i32;
        if k % 2 == 0 {
            n2.powi(k / 2)
        } else {
            n2.powi(k / 2) * n2.sqrt()
        }
    } else {
        n2.powf(0.5 * p)
    }
}

impl Integrand for AbsPow<'_> {
    fn value(&self, z: &Point2C) -> Complex64 {
        Complex64::new(abs_pow(self.f.value(z), self.p), 0.0)
    }

    fn fill_grid(&self, r1: f64, r2: f64, grid: &AngularGrid, out: &mut [Complex64]) {
        self.f.fill_grid(r1, r2, grid, out);
        for v in out.iter_mut() {
            *v = Complex64::new(abs_pow(*v, self.p), 0.0);
        }
    }
}

/// `f * conj(g)`.
pub struct ConjProduct<'a> {
    pub f: &'a dyn Integrand,
    pub g: &'a dyn Integrand,
}

impl Integrand for ConjProduct<'_> {
    fn value(&self, z: &Point2C) -> Complex64 {
        self.f.value(z) * self.g.value(z).conj()
    }

    fn fill_grid(&self, r1: f64, r2: f64, grid: &AngularGrid, out: &mut [Complex64]) {
        self.f.fill_grid(r1, r2, grid, out);
        let mut tmp = vec![Complex64::new(0.0, 0.0); out.len()];
        self.g.fill_grid(r1, r2, grid, &mut tmp);
        for (v, g) in out.iter_mut().zip(&tmp) {
            *v *= g.conj();
        }
    }
}

/// Contributions of a graded one-dimensional integral over `(0, 1)`.
pub(crate) struct Graded {
    pub total: Complex64,
    /// Running totals when the lower limit reaches each window point.
    pub truncated: Vec<Complex64>,
}

/// Ratio tolerance for accepting a geometric tail.
const RATIO_STABILITY: f64 = 1e-2;

fn geometric_tail(levels: &[Complex64]) -> Option<Complex64> {
    let n = levels.len();
    if n < 3 {
        return None;
    }
    let (c0, c1, c2) = (levels[n - 3], levels[n - 2], levels[n - 1]);
    if c2.norm() == 0.0 {
        return Some(Complex64::new(0.0, 0.0));
    }
    if c1.norm() == 0.0 || c0.norm() == 0.0 {
        return None;
    }
    let rho = c2 / c1;
    let rho_prev = c1 / c0;
    if rho.norm() < 0.95 && (rho - rho_prev).norm() <= RATIO_STABILITY * rho.norm() {
        Some(c2 * rho / (1.0 - rho))
    } else {
        None
    }
}

/// `int_0^1 f(r) dr` on dyadic cells toward 0.
///
/// `window` lists lower limits (descending) at which running totals are
/// recorded. With `early_stop`, the grading ends once cell contributions are
/// negligible against the running total and past the window.
pub(crate) fn graded_integral<F>(
    f: &F,
    levels: usize,
    order: usize,
    window: &[f64],
    parallel: bool,
) -> Graded
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let rule = gauss_legendre(order);
    let cell = |a: f64, b: f64| -> Complex64 {
        if parallel {
            let vals: Vec<Complex64> = rule
                .on_interval(a, b)
                .collect::<Vec<_>>()
                .par_iter()
                .map(|(x, w)| f(*x) * *w)
                .collect();
            pairwise_sum(&vals)
        } else {
            rule.on_interval(a, b).map(|(x, w)| f(x) * w).sum()
        }
    };

    let mut total = Complex64::new(0.0, 0.0);
    let mut truncated = vec![None; window.len()];
    let mut level_sums = Vec::with_capacity(levels);
    let mut next_window = 0;
    let mut hi = 1.0f64;
    let mut stopped = false;
    for j in 0..levels {
        let lo = 0.5f64.powi(j as i32 + 1);
        let mut level = Complex64::new(0.0, 0.0);
        let mut a = hi;
        // split the dyadic cell at window points
        while next_window < window.len() && window[next_window] >= lo {
            let eps = window[next_window];
            if eps < a {
                level += cell(eps, a);
                a = eps;
            }
            truncated[next_window] = Some(total + level);
            next_window += 1;
        }
        if a > lo {
            level += cell(lo, a);
        }
        total += level;
        level_sums.push(level);
        hi = lo;
        let scale = total.norm();
        if next_window >= window.len()
            && j >= 6
            && scale > 0.0
            && level.norm() <= 1e-17 * scale
            && level_sums[j - 1].norm() <= 1e-16 * scale
        {
            stopped = true;
            break;
        }
    }
    if !stopped {
        let tail = geometric_tail(&level_sums).unwrap_or_else(|| cell(0.0, hi));
        total += tail;
    }
    let truncated = truncated.into_iter().map(|t| t.unwrap_or(total)).collect();
    Graded { total, truncated }
}

/// Pairwise summation in a fixed order.
pub(crate) fn pairwise_sum(v: &[Complex64]) -> Complex64 {
    match v.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => v[0],
        n => {
            let (a, b) = v.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// The inner integral over the second radius and the angles at fixed `r1`,
/// including the Jacobian and the weight.
fn inner_at_r1(
    f: &dyn Integrand,
    d: Domain,
    w: &Weight,
    grid: &AngularGrid,
    spec: &QuadratureSpec,
    r1: f64,
) -> Complex64 {
    let weight = w.at_radius_fast(r1);
    let mut buf = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut ring = |r2: f64| -> Complex64 {
        f.fill_grid(r1, r2, grid, &mut buf);
        pairwise_sum(&buf) * grid.cell_weight()
    };
    match d {
        Domain::Disc | Domain::PuncturedDisc => ring(0.0) * (r1 * weight),
        Domain::Bidisc | Domain::PuncturedBidisc | Domain::HartogsTriangle => {
            let scale = if d == Domain::HartogsTriangle {
                r1
            } else {
                1.0
            };
            // dV = r1 r2 dr1 dr2 dtheta, r2 = scale * s
            let jac = r1 * scale * scale * weight;
            let mut inner = |s: f64| ring(scale * s) * s;
            let rule = gauss_legendre(spec.radial_order);
            let val = if spec.inner_grading_levels == 0 {
                rule.on_interval(0.0, 1.0)
                    .map(|(s, ws)| inner(s) * ws)
                    .sum()
            } else {
                // sequential: `ring` borrows the buffer mutably
                let cell_sum = |a: f64, b: f64, g: &mut dyn FnMut(f64) -> Complex64| {
                    rule.on_interval(a, b)
                        .map(|(s, ws)| g(s) * ws)
                        .sum::<Complex64>()
                };
                let mut g = inner;
                let mut total = Complex64::new(0.0, 0.0);
                let mut levels = Vec::new();
                let mut hi = 1.0f64;
                for j in 0..spec.inner_grading_levels {
                    let lo = 0.5f64.powi(j as i32 + 1);
                    let c = cell_sum(lo, hi, &mut g);
                    total += c;
                    levels.push(c);
                    hi = lo;
                }
                total + geometric_tail(&levels).unwrap_or_else(|| cell_sum(0.0, hi, &mut g))
            };
            val * jac
        }
    }
}

struct PassOutcome {
    total: Complex64,
    truncated: Vec<Complex64>,
}

fn run_pass(f: &dyn Integrand, d: Domain, w: &Weight, spec: &QuadratureSpec) -> PassOutcome {
    let grid = AngularGrid::new(spec.angular_order, d.dim());
    let window = spec.window();
    let g = graded_integral(
        &|r1: f64| inner_at_r1(f, d, w, &grid, spec, r1),
        spec.grading_levels,
        spec.radial_order,
        &window,
        true,
    );
    PassOutcome {
        total: g.total,
        truncated: g.truncated,
    }
}

/// Divergence signature of truncated integrals over a decade window: the
/// increments per decade do not decay and the fitted logarithmic slope is
/// above `10 * tol`.
pub(crate) fn divergence_signature(
    window: &[f64],
    truncated: &[Complex64],
    tol: f64,
) -> Option<(f64, f64)> {
    let n = truncated.len();
    if n < 4 {
        return None;
    }
    // least-squares fit of value against ln(1/eps) over the last four points
    let xs: Vec<f64> = window[n - 4..].iter().map(|e| (1.0 / e).ln()).collect();
    let ys = &truncated[n - 4..];
    let xm = xs.iter().sum::<f64>() / 4.0;
    let ym = ys.iter().sum::<Complex64>() / 4.0;
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    let sxy: Complex64 = xs.iter().zip(ys).map(|(x, y)| (y - ym) * (x - xm)).sum();
    let slope = sxy / sxx;

    let incs: Vec<f64> = truncated.windows(2).map(|p| (p[1] - p[0]).norm()).collect();
    let m = incs.len();
    if incs[m - 3] == 0.0 || incs[m - 2] == 0.0 {
        return None;
    }
    let r1 = incs[m - 2] / incs[m - 3];
    let r2 = incs[m - 1] / incs[m - 2];
    let non_decaying = r1 >= 0.95 && r2 >= 0.95;
    if !(non_decaying && slope.norm() > 10.0 * tol) {
        return None;
    }
    // growth exponent per decade: |increment| ~ eps^{-g}
    let decade = |i: usize| (window[i] / window[i + 1]).log10();
    let g = ((r1.log10() / decade(n - 3)) + (r2.log10() / decade(n - 2))) / 2.0;
    let sign = if slope.re < 0.0 { -1.0 } else { 1.0 };
    Some((sign * slope.norm(), g))
}

/// Numerical integral of `f * w` over `d`, refined until successive passes
/// agree to `tol * max(1, |value|)`.
pub fn integrate_numeric(
    f: &dyn Integrand,
    d: Domain,
    w: &Weight,
    spec: &QuadratureSpec,
    tol: f64,
) -> Result<IntegrationResult> {
    spec.validate()?;
    if !(tol > 0.0) {
        return Err(Error::invalid(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let window = spec.window();
    let mut prev: Option<Complex64> = None;
    let mut prev_divergent = false;
    let mut history = Vec::new();
    let mut last = None;
    for k in 0..=spec.refinement_cap {
        let pspec = spec.pass(k);
        let pass = run_pass(f, d, w, &pspec);
        let truncated = window
            .iter()
            .zip(&pass.truncated)
            .map(|(e, v)| TruncatedValue {
                epsilon: *e,
                value: v.re,
                value_im: v.im,
            })
            .collect::<Vec<_>>();
        let signature = divergence_signature(&window, &pass.truncated, tol);
        if let Some((log_slope, growth_exponent)) = signature {
            if prev_divergent {
                return Ok(IntegrationResult {
                    value: *pass.truncated.last().expect("non-empty window"),
                    error_estimate: f64::INFINITY,
                    verdict: Verdict::Diverged {
                        log_slope,
                        growth_exponent,
                    },
                    truncated,
                    error_history: history,
                    passes: k + 1,
                });
            }
            prev_divergent = true;
        } else {
            prev_divergent = false;
        }
        if let Some(p) = prev {
            let err = (pass.total - p).norm();
            history.push(err);
            if !prev_divergent && err <= tol * pass.total.norm().max(1.0) {
                return Ok(IntegrationResult {
                    value: pass.total,
                    error_estimate: err,
                    verdict: Verdict::Converged,
                    truncated,
                    error_history: history,
                    passes: k + 1,
                });
            }
        }
        prev = Some(pass.total);
        last = Some((pass.total, truncated));
    }
    let (value, truncated) = last.expect("at least one pass");
    Ok(IntegrationResult {
        value,
        error_estimate: history.last().copied().unwrap_or(f64::INFINITY),
        verdict: Verdict::Inconclusive,
        truncated,
        error_history: history,
        passes: spec.refinement_cap + 1,
    })
}
