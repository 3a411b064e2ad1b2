//! Exact and numerical integration over the model domains.

pub mod gauss;
mod monomial;
mod numeric;

use num_complex::Complex64;

pub use monomial::{inner_product_exact, weighted_l2_norm_sq_exact, MonomialTerm, TermSum};
pub(crate) use numeric::{abs_pow, pairwise_sum};
pub use numeric::{
    integrate_numeric, AbsPow, AngularGrid, ConjProduct, Integrand, IntegrationResult,
    QuadratureSpec, TruncatedValue, Verdict,
};

use crate::error::{Error, Result};
use crate::geometry::{Domain, Weight};

pub const DEFAULT_TOL: f64 = 1e-8;

/// Either a symbolic sum of monomial atoms or a black-box function.
#[derive(Clone, Copy)]
pub enum Operand<'a> {
    Symbolic(&'a TermSum),
    Function(&'a dyn Integrand),
}

impl<'a> Operand<'a> {
    pub fn as_integrand(&self) -> &'a dyn Integrand {
        match *self {
            Operand::Symbolic(t) => t,
            Operand::Function(f) => f,
        }
    }
}

impl<'a> From<&'a TermSum> for Operand<'a> {
    fn from(t: &'a TermSum) -> Self {
        Operand::Symbolic(t)
    }
}

/// Weighted `L^p` norm `(int |f|^p w dV)^{1/p}`.
///
/// The returned value and error estimate refer to the p-th root; the
/// `truncated` table keeps the raw integrals `int_{r1>eps} |f|^p w`.
pub fn lp_norm(
    f: &dyn Integrand,
    p: f64,
    d: Domain,
    w: &Weight,
    spec: &QuadratureSpec,
    tol: f64,
) -> Result<IntegrationResult> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::invalid(format!(
            "p must be a finite real >= 1, got {p}"
        )));
    }
    let g = AbsPow { f, p };
    // tolerance on the integral scaled so the root meets `tol`
    let mut r = integrate_numeric(&g, d, w, spec, tol)?;
    let integral = r.value.re.max(0.0);
    let root = integral.powf(1.0 / p);
    if r.error_estimate.is_finite() && integral > 0.0 {
        r.error_estimate *= root / (p * integral);
    }
    r.value = Complex64::new(root, 0.0);
    Ok(r)
}

/// `<f, g>_d = int_d f conj(g) dV`.
///
/// Two symbolic operands are integrated exactly by frequency matching.
pub fn inner_product(
    f: Operand<'_>,
    g: Operand<'_>,
    d: Domain,
    spec: &QuadratureSpec,
    tol: f64,
) -> Result<Complex64> {
    if let (Operand::Symbolic(a), Operand::Symbolic(b)) = (f, g) {
        return Ok(inner_product_exact(a, b, d)?.to_c64());
    }
    let h = ConjProduct {
        f: f.as_integrand(),
        g: g.as_integrand(),
    };
    let r = integrate_numeric(&h, d, &Weight::unit(), spec, tol)?;
    match r.verdict {
        Verdict::Diverged {
            log_slope,
            growth_exponent,
        } => Err(Error::DivergentIntegral {
            exponent: format!("growth exponent {growth_exponent:.3}"),
            detail: format!("inner product diverges, log slope {log_slope:.6e}"),
        }),
        _ => Ok(r.value),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{exact_real, int, rat};
    use crate::geometry::Point2C;
    use std::f64::consts::PI;

    fn inv_z1() -> TermSum {
        TermSum::single(MonomialTerm::monomial(-1, 0, exact_real(int(1))))
    }

    #[test]
    fn unweighted_norm_of_one() {
        let one = |_: &Point2C| Complex64::new(1.0, 0.0);
        let r = lp_norm(
            &one,
            2.0,
            Domain::HartogsTriangle,
            &Weight::unit(),
            &QuadratureSpec::default(),
            1e-10,
        )
        .unwrap();
        assert!((r.real() - (PI * PI / 2.0).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn weighted_norm_of_inverse_z1_is_pi_root() {
        // |z1|^{-p} |z1|^{p-2} = |z1|^{-2} integrates to pi^2
        let f = inv_z1();
        for p in [2.0, 3.0, 4.0, 6.0] {
            let r = lp_norm(
                &f,
                p,
                Domain::HartogsTriangle,
                &Weight::PowerDelta1(p - 2.0),
                &QuadratureSpec::default(),
                1e-9,
            )
            .unwrap();
            assert!(r.is_converged());
            let want = (PI * PI).powf(1.0 / p);
            assert!((r.real() - want).abs() < 1e-8 * want, "p={p}: {}", r.real());
        }
    }

    #[test]
    fn unweighted_l4_norm_of_inverse_z1_diverges() {
        let r = lp_norm(
            &inv_z1(),
            4.0,
            Domain::HartogsTriangle,
            &Weight::unit(),
            &QuadratureSpec::default(),
            1e-8,
        )
        .unwrap();
        assert!(r.verdict.is_diverged());
    }

    #[test]
    fn lp_norm_rejects_small_p() {
        let f = inv_z1();
        assert!(lp_norm(
            &f,
            0.5,
            Domain::HartogsTriangle,
            &Weight::unit(),
            &QuadratureSpec::default(),
            1e-8
        )
        .is_err());
    }

    #[test]
    fn inner_product_symbolic_and_numeric_agree() {
        let f = inv_z1();
        let g = TermSum::single(MonomialTerm::monomial(-1, 0, exact_real(rat(1, 3)))).add(
            &TermSum::single(MonomialTerm::monomial(2, 1, exact_real(int(1)))),
        );
        let spec = QuadratureSpec::default();
        let exact = inner_product(
            Operand::Symbolic(&f),
            Operand::Symbolic(&g),
            Domain::HartogsTriangle,
            &spec,
            1e-10,
        )
        .unwrap();
        assert!((exact - Complex64::new(PI * PI / 3.0, 0.0)).norm() < 1e-14);
        let num = inner_product(
            Operand::Function(&f),
            Operand::Symbolic(&g),
            Domain::HartogsTriangle,
            &spec,
            1e-10,
        )
        .unwrap();
        assert!((num - exact).norm() < 1e-9);
        let rev = inner_product(
            Operand::Symbolic(&g),
            Operand::Function(&f),
            Domain::HartogsTriangle,
            &spec,
            1e-10,
        )
        .unwrap();
        assert!((rev - num.conj()).norm() < 1e-12);
    }

    #[test]
    fn divergent_inner_product_errors() {
        let f = TermSum::single(MonomialTerm::monomial(-2, 0, exact_real(int(1))));
        let spec = QuadratureSpec::default();
        assert!(inner_product(
            Operand::Function(&f),
            Operand::Function(&f),
            Domain::HartogsTriangle,
            &spec,
            1e-8
        )
        .is_err());
        assert!(inner_product(
            Operand::Symbolic(&f),
            Operand::Symbolic(&f),
            Domain::HartogsTriangle,
            &spec,
            1e-8
        )
        .is_err());
    }
}
