//! Bergman kernels, orthogonal monomial bases and the Bergman projection on
//! the model domains.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{exact_real, int, ExactComplex, PiScaled, Rational};
use crate::geometry::{check_dim, phi_inverse, Domain, Point2C};
use crate::quadrature::{
    gauss::gauss_legendre, inner_product_exact, pairwise_sum, AngularGrid, Integrand, MonomialTerm,
    QuadratureSpec, TermSum, DEFAULT_TOL,
};
use crate::series::{BiIndex, ExactSeries, FloatSeries, MultiplierSeq};

/// A basis monomial `z1^m z2^n` with its exact squared norm.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisElement {
    pub index: BiIndex,
    pub norm_sq: PiScaled,
}

impl BasisElement {
    pub fn term(&self) -> MonomialTerm {
        MonomialTerm::monomial(self.index.m, self.index.n, exact_real(int(1)))
    }
}

/// `||z1^m z2^n||^2` on `d`, a rational multiple of `pi^dim`.
pub fn monomial_norm_sq(d: Domain, idx: BiIndex) -> Result<PiScaled> {
    let (m, n) = (idx.m, idx.n);
    if !d.admits_index(m, n) {
        return Err(Error::NonIntegrableIndex { m, n, domain: d });
    }
    Ok(match d {
        Domain::Disc | Domain::PuncturedDisc => {
            PiScaled::real(Rational::new(1.into(), (m + 1).into()), 1)
        }
        Domain::Bidisc | Domain::PuncturedBidisc => {
            PiScaled::real(Rational::new(1.into(), ((m + 1) * (n + 1)).into()), 2)
        }
        Domain::HartogsTriangle => {
            PiScaled::real(Rational::new(1.into(), ((n + 1) * (m + n + 2)).into()), 2)
        }
    })
}

pub fn basis_element(d: Domain, idx: BiIndex) -> Result<BasisElement> {
    Ok(BasisElement {
        index: idx,
        norm_sq: monomial_norm_sq(d, idx)?,
    })
}

fn disc_kernel(z: Complex64, w: Complex64) -> Complex64 {
    let t = Complex64::new(1.0, 0.0) - z * w.conj();
    1.0 / (PI * t * t)
}

/// The Bergman kernel `B_d(z, w)`.
pub fn kernel(d: Domain, z: &Point2C, w: &Point2C) -> Result<Complex64> {
    check_dim(d, z)?;
    check_dim(d, w)?;
    if d == Domain::HartogsTriangle {
        let (a, b) = (phi_inverse(z)?, phi_inverse(w)?);
        for p in [z, w] {
            if !d.contains(p)? {
                return Err(Error::invalid("kernel arguments must be interior points"));
            }
        }
        let bidisc = kernel(Domain::PuncturedBidisc, &a, &b)?;
        return Ok(bidisc / (a.z1.to_complex() * b.z1.to_complex().conj()));
    }
    // the punctured domains share the kernel of their closures
    let closure = match d {
        Domain::PuncturedDisc => Domain::Disc,
        Domain::PuncturedBidisc => Domain::Bidisc,
        other => other,
    };
    for p in [z, w] {
        if !closure.contains(p)? {
            return Err(Error::invalid("kernel arguments must be interior points"));
        }
    }
    let (z1, z2) = z.to_rect();
    let (w1, w2) = w.to_rect();
    let mut k = disc_kernel(z1, w1);
    if let (Some(z2), Some(w2)) = (z2, w2) {
        k *= disc_kernel(z2, w2);
    }
    Ok(k)
}

/// `sum e(z) conj(e(w)) / ||e||^2` over a truncation box.
pub fn kernel_series(
    d: Domain,
    z: &Point2C,
    w: &Point2C,
    spec: &ProjectionSpec,
) -> Result<Complex64> {
    check_dim(d, z)?;
    check_dim(d, w)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for idx in spec.indices(d) {
        let e = TermSum::single(MonomialTerm::monomial(idx.m, idx.n, exact_real(int(1))));
        let nsq = monomial_norm_sq(d, idx)?.to_f64();
        acc += e.eval(z) * e.eval(w).conj() / nsq;
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ProjectionBackend {
    Exact,
    Numeric {
        quadrature: QuadratureSpec,
        tol: f64,
    },
}

/// Truncation box `m_min <= m <= m_max`, `0 <= n <= n_max` and a backend.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionSpec {
    pub m_min: i64,
    pub m_max: i64,
    pub n_max: i64,
    pub backend: ProjectionBackend,
}

impl Default for ProjectionSpec {
    fn default() -> Self {
        ProjectionSpec {
            m_min: -17,
            m_max: 16,
            n_max: 16,
            backend: ProjectionBackend::Exact,
        }
    }
}

impl ProjectionSpec {
    pub fn numeric() -> Self {
        ProjectionSpec {
            backend: ProjectionBackend::Numeric {
                quadrature: QuadratureSpec::default(),
                tol: DEFAULT_TOL,
            },
            ..ProjectionSpec::default()
        }
    }

    pub fn with_box(mut self, m_min: i64, m_max: i64, n_max: i64) -> Self {
        self.m_min = m_min;
        self.m_max = m_max;
        self.n_max = n_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max < 0 || self.m_max < self.m_min {
            return Err(Error::config(
                "box",
                "require n_max >= 0 and m_min <= m_max",
            ));
        }
        if self.m_min < -(self.n_max + 1) {
            return Err(Error::config(
                "m_min",
                format!(
                    "m_min = {} is below -(n_max + 1) = {}",
                    self.m_min,
                    -(self.n_max + 1)
                ),
            ));
        }
        if let ProjectionBackend::Numeric { quadrature, tol } = &self.backend {
            quadrature.validate()?;
            if !(*tol > 0.0) {
                return Err(Error::config("tol", "must be positive"));
            }
        }
        Ok(())
    }

    pub fn contains(&self, idx: BiIndex) -> bool {
        (self.m_min..=self.m_max).contains(&idx.m) && (0..=self.n_max).contains(&idx.n)
    }

    /// Basis indices of `d` inside the box.
    pub fn indices(&self, d: Domain) -> Vec<BiIndex> {
        let n_top = if d.dim() == 1 { 0 } else { self.n_max };
        let mut out = Vec::new();
        for n in 0..=n_top {
            for m in self.m_min..=self.m_max {
                if d.admits_index(m, n) {
                    out.push(BiIndex::new(m, n));
                }
            }
        }
        out
    }
}

/// What to project.
#[derive(Clone, Copy)]
pub enum ProjectInput<'a> {
    Symbolic(&'a TermSum),
    Function(&'a dyn Integrand),
}

#[derive(Clone, Debug)]
pub struct Projection {
    /// Present for the exact backend.
    pub exact: Option<ExactSeries>,
    pub series: FloatSeries,
    /// Every coefficient outside the box is exactly zero.
    pub certified_complete: bool,
    /// Nonzero coefficients that fell outside the box.
    pub omitted_nonzero: usize,
    pub error_estimate: f64,
}

/// Orthogonal projection of `f` onto the Bergman space of `d`.
pub fn project(f: ProjectInput<'_>, d: Domain, spec: &ProjectionSpec) -> Result<Projection> {
    spec.validate()?;
    match (&spec.backend, f) {
        (ProjectionBackend::Exact, ProjectInput::Symbolic(t)) => project_exact(t, d, spec),
        (ProjectionBackend::Exact, ProjectInput::Function(_)) => {
            Err(Error::invalid("the exact backend needs a symbolic input"))
        }
        (ProjectionBackend::Numeric { quadrature, tol }, input) => {
            let g: &dyn Integrand = match input {
                ProjectInput::Symbolic(t) => t,
                ProjectInput::Function(g) => g,
            };
            project_numeric(g, d, spec, quadrature, *tol)
        }
    }
}

fn project_exact(f: &TermSum, d: Domain, spec: &ProjectionSpec) -> Result<Projection> {
    let mut groups: BTreeMap<(i64, i64), Vec<MonomialTerm>> = BTreeMap::new();
    for t in f.terms() {
        groups.entry((t.k, t.l)).or_default().push(t.clone());
    }
    let mut exact = ExactSeries::new(d);
    let mut omitted = 0;
    for ((k, l), terms) in groups {
        if !d.admits_index(k, l) {
            continue;
        }
        let e = basis_element(d, BiIndex::new(k, l))?;
        let ip = inner_product_exact(&TermSum::new(terms), &TermSum::single(e.term()), d)?;
        let c: ExactComplex = if ip.is_zero() {
            ExactComplex::zero()
        } else {
            ip.ratio(&e.norm_sq)?
        };
        if c.is_zero() {
            continue;
        }
        if spec.contains(e.index) {
            exact.add_term(e.index, c)?;
        } else {
            omitted += 1;
        }
    }
    Ok(Projection {
        series: exact.to_float(),
        exact: Some(exact),
        certified_complete: omitted == 0,
        omitted_nonzero: omitted,
        error_estimate: 0.0,
    })
}

/// Row-column 2-D FFT of an `n1 x n2` row-major grid.
struct Fft2 {
    rows: Arc<dyn Fft<f64>>,
    cols: Option<Arc<dyn Fft<f64>>>,
    n1: usize,
    n2: usize,
}

impl Fft2 {
    fn new(n1: usize, n2: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            rows: planner.plan_fft_forward(n2.max(1)),
            cols: (n2 > 1).then(|| planner.plan_fft_forward(n1)),
            n1,
            n2,
        }
    }

    fn forward(&self, data: &mut [Complex64]) {
        if self.n2 == 1 {
            // one-dimensional: the data is a single column
            let mut planner = FftPlanner::new();
            planner.plan_fft_forward(self.n1).process(data);
            return;
        }
        self.rows.process(data);
        let mut col = vec![Complex64::new(0.0, 0.0); self.n1];
        let cols = self.cols.as_ref().expect("2-D plan");
        for j2 in 0..self.n2 {
            for j1 in 0..self.n1 {
                col[j1] = data[j1 * self.n2 + j2];
            }
            cols.process(&mut col);
            for j1 in 0..self.n1 {
                data[j1 * self.n2 + j2] = col[j1];
            }
        }
    }
}

/// `<f, z1^m z2^n>` for every index, from one pass of the graded rule.
fn numeric_inner_products(
    f: &dyn Integrand,
    d: Domain,
    indices: &[BiIndex],
    spec: &QuadratureSpec,
) -> Vec<Complex64> {
    let max_freq = indices
        .iter()
        .map(|i| i.m.abs().max(i.n))
        .max()
        .unwrap_or(0) as usize;
    let n = spec.angular_order.max(2 * max_freq + 2);
    let grid = AngularGrid::new(n, d.dim());
    let n2 = grid.n2();
    let fft = Fft2::new(n, n2);
    let rule = gauss_legendre(spec.radial_order);
    let scale = grid.cell_weight();
    let bin = |k: i64, len: usize| k.rem_euclid(len as i64) as usize;

    // contributions of one first-radius node, Jacobian included
    let at_r1 = |r1: f64| -> Vec<Complex64> {
        let mut acc = vec![Complex64::new(0.0, 0.0); indices.len()];
        let mut buf = vec![Complex64::new(0.0, 0.0); grid.len()];
        let mut sample = |r2: f64, w: f64, acc: &mut Vec<Complex64>| {
            f.fill_grid(r1, r2, &grid, &mut buf);
            fft.forward(&mut buf);
            for (a, idx) in acc.iter_mut().zip(indices) {
                let c = buf[bin(idx.m, n) * n2 + if n2 == 1 { 0 } else { bin(idx.n, n2) }];
                let radial = r1.powi(idx.m as i32)
                    * if idx.n == 0 {
                        1.0
                    } else {
                        r2.powi(idx.n as i32)
                    };
                *a += c * (radial * w * scale);
            }
        };
        match d {
            Domain::Disc | Domain::PuncturedDisc => sample(0.0, r1, &mut acc),
            _ => {
                let s_scale = if d == Domain::HartogsTriangle {
                    r1
                } else {
                    1.0
                };
                for (s, ws) in rule.on_interval(0.0, 1.0) {
                    let r2 = s_scale * s;
                    sample(r2, ws * r1 * s_scale * s_scale * s, &mut acc);
                }
            }
        }
        acc
    };

    let cell = |a: f64, b: f64| -> Vec<Complex64> {
        let nodes: Vec<(f64, f64)> = rule.on_interval(a, b).collect();
        let parts: Vec<Vec<Complex64>> = nodes
            .par_iter()
            .map(|(r, w)| at_r1(*r).into_iter().map(|v| v * *w).collect())
            .collect();
        (0..indices.len())
            .map(|i| pairwise_sum(&parts.iter().map(|p| p[i]).collect::<Vec<_>>()))
            .collect()
    };

    let mut total = vec![Complex64::new(0.0, 0.0); indices.len()];
    let mut hi = 1.0f64;
    let mut quiet = 0;
    let mut stopped = false;
    for j in 0..spec.grading_levels {
        let lo = 0.5f64.powi(j as i32 + 1);
        let c = cell(lo, hi);
        let mut small = true;
        for (t, v) in total.iter_mut().zip(&c) {
            *t += v;
            if v.norm() > 1e-17 * t.norm().max(1.0) {
                small = false;
            }
        }
        hi = lo;
        quiet = if small { quiet + 1 } else { 0 };
        if quiet >= 2 && j >= 6 {
            stopped = true;
            break;
        }
    }
    if !stopped {
        for (t, v) in total.iter_mut().zip(cell(0.0, hi)) {
            *t += v;
        }
    }
    total
}

fn project_numeric(
    f: &dyn Integrand,
    d: Domain,
    spec: &ProjectionSpec,
    quadrature: &QuadratureSpec,
    tol: f64,
) -> Result<Projection> {
    let indices = spec.indices(d);
    let norms: Vec<f64> = indices
        .iter()
        .map(|i| monomial_norm_sq(d, *i).map(|p| p.to_f64()))
        .collect::<Result<_>>()?;
    let coeffs = |k: usize| -> Vec<Complex64> {
        numeric_inner_products(f, d, &indices, &quadrature.pass(k))
            .into_iter()
            .zip(&norms)
            .map(|(ip, n)| ip / n)
            .collect()
    };
    let mut prev = coeffs(0);
    let mut err = f64::INFINITY;
    for k in 1..=quadrature.refinement_cap.max(1) {
        let next = coeffs(k);
        err = prev
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).norm() / b.norm().max(1.0))
            .fold(0.0, f64::max);
        prev = next;
        if err <= tol {
            break;
        }
    }
    // coefficients below the resolved accuracy are dropped
    let floor = err.max(1e-15);
    let series = FloatSeries::from_pairs(
        d,
        indices
            .iter()
            .zip(prev)
            .filter(|(_, c)| c.norm() > floor)
            .map(|(i, c)| (*i, c)),
    )?;
    Ok(Projection {
        exact: None,
        series,
        certified_complete: false,
        omitted_nonzero: 0,
        error_estimate: err,
    })
}

/// `U f = |w1|^2 * T f` with `t_mu = 1 + 1/(mu + 1)`, as a symbolic function
/// on the punctured bidisc.
pub fn right_inverse_u(f: &ExactSeries) -> Result<TermSum> {
    if !matches!(f.domain(), Domain::Bidisc | Domain::PuncturedBidisc) {
        return Err(Error::UnsupportedDomain {
            op: "right_inverse_u",
            domain: f.domain(),
        });
    }
    let t = MultiplierSeq::one_plus_reciprocal();
    let terms = f
        .iter()
        .map(|(idx, c)| {
            let tm = exact_real(t.term(idx.m as u64));
            MonomialTerm::new(int(idx.m + 2), int(idx.n), idx.m, idx.n, c * tm)
        })
        .collect();
    Ok(TermSum::new(terms))
}

/// `<|w1|^2 w1^mu, w1^m>_D / <w1^m, w1^m>_D` in exact arithmetic.
pub fn tmu_ratio(mu: i64, m: i64) -> Result<ExactComplex> {
    let d = Domain::Disc;
    let lhs = TermSum::single(MonomialTerm::new(
        int(mu + 2),
        int(0),
        mu,
        0,
        exact_real(int(1)),
    ));
    let e = basis_element(d, BiIndex::new(m, 0))?;
    let ip = inner_product_exact(&lhs, &TermSum::single(e.term()), d)?;
    if ip.is_zero() {
        return Ok(ExactComplex::zero());
    }
    ip.ratio(&e.norm_sq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, Cutoff};
    use crate::geometry::{phi, Weight};
    use crate::quadrature::{inner_product, integrate_numeric, Operand};
    use crate::series::{q, BellDirection};
    use num_traits::One;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn one() -> ExactComplex {
        exact_real(int(1))
    }

    fn counterexample(chi: Cutoff) -> TermSum {
        TermSum::single(MonomialTerm::new(int(1), int(0), -1, 0, one()).with_profile(chi))
    }

    #[test]
    fn basis_norms() {
        let h = Domain::HartogsTriangle;
        assert_eq!(
            monomial_norm_sq(h, BiIndex::new(-1, 0)).unwrap(),
            PiScaled::real(int(1), 2)
        );
        assert_eq!(
            monomial_norm_sq(h, BiIndex::new(0, 0)).unwrap(),
            PiScaled::real(rat(1, 2), 2)
        );
        assert!(matches!(
            monomial_norm_sq(h, BiIndex::new(-2, 0)),
            Err(Error::NonIntegrableIndex { .. })
        ));
        assert_eq!(
            monomial_norm_sq(Domain::Disc, BiIndex::new(3, 0)).unwrap(),
            PiScaled::real(rat(1, 4), 1)
        );
        assert_eq!(
            monomial_norm_sq(Domain::Bidisc, BiIndex::new(1, 2)).unwrap(),
            PiScaled::real(rat(1, 6), 2)
        );
        // closed forms agree with exact integration
        for d in Domain::ALL {
            for idx in ProjectionSpec::default().with_box(-5, 5, 5).indices(d) {
                let e = TermSum::single(MonomialTerm::monomial(idx.m, idx.n, one()));
                assert_eq!(
                    inner_product_exact(&e, &e, d).unwrap(),
                    monomial_norm_sq(d, idx).unwrap()
                );
            }
        }
    }

    #[test]
    fn kernel_values() {
        let z = Point2C::one(0.0, 0.0);
        assert!((kernel(Domain::Disc, &z, &z).unwrap() - 1.0 / PI).norm() < 1e-15);
        let z = Point2C::two(0.0, 0.0, 0.3, 1.0);
        assert!(matches!(
            kernel(Domain::HartogsTriangle, &z, &z),
            Err(Error::SingularEvaluation(_))
        ));
        let out = Point2C::two(0.5, 0.0, 0.7, 0.0);
        assert!(kernel(Domain::HartogsTriangle, &out, &out).is_err());
    }

    #[test]
    fn kernel_matches_basis_expansion() {
        let spec = ProjectionSpec::default().with_box(-41, 40, 40);
        let pts = [
            (
                Point2C::two(0.3, 0.2, 0.1, 1.0),
                Point2C::two(0.25, 2.0, 0.05, -1.0),
            ),
            (
                Point2C::two(0.4, 1.0, 0.2, 0.5),
                Point2C::two(0.35, 2.5, 0.1, 3.0),
            ),
        ];
        for (z, w) in pts {
            for d in [
                Domain::HartogsTriangle,
                Domain::Bidisc,
                Domain::PuncturedBidisc,
            ] {
                let k = kernel(d, &z, &w).unwrap();
                let s = kernel_series(d, &z, &w, &spec).unwrap();
                assert!((k - s).norm() < 1e-6 * k.norm().max(1.0), "{d}: {k} vs {s}");
            }
        }
        let z = Point2C::one(0.3, 0.2);
        let w = Point2C::one(0.5, 2.0);
        let k = kernel(Domain::Disc, &z, &w).unwrap();
        let s = kernel_series(Domain::Disc, &z, &w, &spec).unwrap();
        assert!((k - s).norm() < 1e-6);
    }

    #[test]
    fn hartogs_kernel_reproduces() {
        let targets = [
            TermSum::single(MonomialTerm::monomial(-1, 0, one())),
            TermSum::single(MonomialTerm::monomial(1, 1, one())),
        ];
        let pts = [
            Point2C::two(0.5, 0.3, 0.2, 1.0),
            Point2C::two(0.3, 2.0, 0.1, -2.0),
        ];
        let spec = QuadratureSpec {
            angular_order: 32,
            ..QuadratureSpec::default()
        };
        for f in &targets {
            for z in &pts {
                let z = *z;
                let g = |w: &Point2C| kernel(Domain::HartogsTriangle, &z, w).unwrap() * f.eval(w);
                let r =
                    integrate_numeric(&g, Domain::HartogsTriangle, &Weight::unit(), &spec, 1e-8)
                        .unwrap();
                let want = f.eval(&z);
                assert!(
                    (r.value - want).norm() < 1e-6 * want.norm(),
                    "{} vs {}",
                    r.value,
                    want
                );
            }
        }
    }

    #[test]
    fn counterexample_projection() {
        let spec = ProjectionSpec::default();
        let f = counterexample(Cutoff::default_step());
        let p = project(ProjectInput::Symbolic(&f), Domain::HartogsTriangle, &spec).unwrap();
        let e = p.exact.unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e.get(BiIndex::new(-1, 0)), q(15, 32));
        assert!(p.certified_complete);

        let f = counterexample(Cutoff::one());
        let p = project(ProjectInput::Symbolic(&f), Domain::HartogsTriangle, &spec).unwrap();
        assert_eq!(p.exact.unwrap().get(BiIndex::new(-1, 0)), q(1, 2));
    }

    #[test]
    fn counterexample_numeric_projection() {
        let spec = ProjectionSpec::numeric().with_box(-3, 3, 3);
        let chi = Cutoff::default_step();
        let f = move |z: &Point2C| z.z1.to_complex().conj() * chi.eval(z.z1.radius);
        let p = project(ProjectInput::Function(&f), Domain::HartogsTriangle, &spec).unwrap();
        let c = p.series.get(BiIndex::new(-1, 0));
        assert!((c - Complex64::new(15.0 / 32.0, 0.0)).norm() < 1e-8, "{c}");
        assert_eq!(p.series.len(), 1, "{:?}", p.series);
    }

    #[test]
    fn holomorphic_functions_are_fixed() {
        let f = TermSum::single(MonomialTerm::monomial(1, 1, one()));
        let p = project(
            ProjectInput::Symbolic(&f),
            Domain::HartogsTriangle,
            &ProjectionSpec::default(),
        )
        .unwrap();
        assert_eq!(
            p.exact.unwrap(),
            ExactSeries::monomial(Domain::HartogsTriangle, 1, 1, one()).unwrap()
        );
    }

    #[test]
    fn right_inverse_examples() {
        let d = Domain::PuncturedBidisc;
        let f = ExactSeries::monomial(Domain::Bidisc, 0, 0, one()).unwrap();
        let u = right_inverse_u(&f).unwrap();
        assert_eq!(u.terms()[0].coeff, q(2, 1));
        let p = project(ProjectInput::Symbolic(&u), d, &ProjectionSpec::default()).unwrap();
        assert_eq!(
            p.exact.unwrap(),
            ExactSeries::monomial(d, 0, 0, one()).unwrap()
        );

        let f = ExactSeries::monomial(Domain::Bidisc, 1, 1, one()).unwrap();
        let u = right_inverse_u(&f).unwrap();
        assert_eq!(u.terms()[0].coeff, q(3, 2));
        let p = project(ProjectInput::Symbolic(&u), d, &ProjectionSpec::default()).unwrap();
        assert_eq!(
            p.exact.unwrap(),
            ExactSeries::monomial(d, 1, 1, one()).unwrap()
        );

        assert!(right_inverse_u(&ExactSeries::new(Domain::Bidisc))
            .unwrap()
            .is_empty());
        assert!(right_inverse_u(&ExactSeries::new(Domain::HartogsTriangle)).is_err());
    }

    #[test]
    fn tmu_identity() {
        for mu in 0..=64 {
            for m in 0..=64 {
                let want = if mu == m {
                    exact_real(rat(mu + 1, mu + 2))
                } else {
                    ExactComplex::zero()
                };
                assert_eq!(tmu_ratio(mu, m).unwrap(), want);
            }
        }
    }

    fn random_family(rng: &mut ChaCha8Rng, terms: usize) -> TermSum {
        let chis = [
            Cutoff::one(),
            Cutoff::default_step(),
            Cutoff::default_smooth(),
        ];
        TermSum::new(
            (0..terms)
                .map(|_| {
                    let k = rng.gen_range(-4..=4);
                    let l = rng.gen_range(0..=3);
                    let a = rng.gen_range(0..=3) + k.min(0).max(-1);
                    let b = rng.gen_range(0..=2);
                    let c = exact_real(rat(rng.gen_range(-9..=9), rng.gen_range(1..=5)));
                    MonomialTerm::new(int(a), int(b), k, l, c)
                        .with_profile(chis[rng.gen_range(0..3)].clone())
                })
                .collect(),
        )
    }

    #[test]
    fn projection_properties_on_random_family() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let d = Domain::HartogsTriangle;
        let spec = ProjectionSpec::default();
        for _ in 0..20 {
            let f = random_family(&mut rng, 4);
            let g = random_family(&mut rng, 4);
            let pf = project(ProjectInput::Symbolic(&f), d, &spec)
                .unwrap()
                .exact
                .unwrap();
            let pg = project(ProjectInput::Symbolic(&g), d, &spec)
                .unwrap()
                .exact
                .unwrap();
            let pf_t = TermSum::from_series(&pf).unwrap();
            let pg_t = TermSum::from_series(&pg).unwrap();
            // idempotence
            let ppf = project(ProjectInput::Symbolic(&pf_t), d, &spec)
                .unwrap()
                .exact
                .unwrap();
            assert_eq!(ppf, pf);
            // self-adjointness
            assert_eq!(
                inner_product_exact(&pf_t, &g, d).unwrap(),
                inner_product_exact(&f, &pg_t, d).unwrap()
            );
            // contraction
            let nf = inner_product_exact(&f, &f, d).unwrap().to_f64();
            let npf = inner_product_exact(&pf_t, &pf_t, d).unwrap().to_f64();
            assert!(npf <= nf + 1e-12);
        }
    }

    #[test]
    fn numeric_projection_idempotent() {
        let f = |z: &Point2C| {
            let (a, b) = z.to_rect();
            let b = b.unwrap();
            (a.conj() * b + a * a).exp() * (1.0 - z.z1.radius)
        };
        let d = Domain::HartogsTriangle;
        let spec = ProjectionSpec::numeric().with_box(-4, 4, 3);
        let p = project(ProjectInput::Function(&f), d, &spec).unwrap();
        let pp = project(ProjectInput::Function(&p.series), d, &spec).unwrap();
        for (idx, c) in p.series.iter() {
            assert!((pp.series.get(*idx) - c).norm() < 1e-10, "{idx}");
        }
        assert_eq!(pp.series.len(), p.series.len());
    }

    #[test]
    fn numeric_and_exact_projections_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d = Domain::HartogsTriangle;
        let f = random_family(&mut rng, 3);
        let exact = project(
            ProjectInput::Symbolic(&f),
            d,
            &ProjectionSpec::default().with_box(-5, 5, 4),
        )
        .unwrap();
        let num = project(
            ProjectInput::Symbolic(&f),
            d,
            &ProjectionSpec::numeric().with_box(-5, 5, 4),
        )
        .unwrap();
        for idx in ProjectionSpec::default().with_box(-5, 5, 4).indices(d) {
            assert!(
                (exact.series.get(idx) - num.series.get(idx)).norm() < 1e-8,
                "{idx}"
            );
        }
    }

    #[test]
    fn bell_intertwining() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let spec = ProjectionSpec::default().with_box(-40, 40, 40);
        for _ in 0..10 {
            let f = random_family(&mut rng, 3);
            let lhs = project(
                ProjectInput::Symbolic(&f.bell_pullback()),
                Domain::PuncturedBidisc,
                &spec,
            )
            .unwrap()
            .exact
            .unwrap();
            let rhs = project(ProjectInput::Symbolic(&f), Domain::HartogsTriangle, &spec)
                .unwrap()
                .exact
                .unwrap()
                .bell_transform(BellDirection::HartogsToBidisc)
                .unwrap();
            assert_eq!(lhs, rhs);
        }
        let w = Point2C::two(0.5, 0.2, 0.4, 1.0);
        assert!(phi(&w).is_ok());
    }

    #[test]
    fn self_adjoint_numerically() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = Domain::HartogsTriangle;
        let spec = ProjectionSpec::default();
        let qs = QuadratureSpec::default();
        let f = random_family(&mut rng, 3);
        let g = random_family(&mut rng, 3);
        let pf = TermSum::from_series(
            &project(ProjectInput::Symbolic(&f), d, &spec)
                .unwrap()
                .exact
                .unwrap(),
        )
        .unwrap();
        let pg = TermSum::from_series(
            &project(ProjectInput::Symbolic(&g), d, &spec)
                .unwrap()
                .exact
                .unwrap(),
        )
        .unwrap();
        let a =
            inner_product(Operand::Function(&pf), Operand::Function(&g), d, &qs, 1e-10).unwrap();
        let b =
            inner_product(Operand::Function(&f), Operand::Function(&pg), d, &qs, 1e-10).unwrap();
        assert!((a - b).norm() < 1e-8);
        let _ = Rational::one();
    }
}
