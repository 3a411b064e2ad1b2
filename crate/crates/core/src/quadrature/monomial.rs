//! Integrand atoms `c * chi(r1) * r1^a r2^b e^{i k theta1} e^{i l theta2}` and
//! their closed-form integrals over the model domains.

use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{
    format_rational, int, to_c64, to_f64, Cutoff, ExactComplex, PiScaled, Rational,
};
use crate::geometry::{Domain, Point2C};
use crate::series::{CoeffSeries, Coefficient};

/// One integrand atom. `profile = None` means `chi = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialTerm {
    pub a: Rational,
    pub b: Rational,
    pub k: i64,
    pub l: i64,
    pub profile: Option<Cutoff>,
    pub coeff: ExactComplex,
}

impl MonomialTerm {
    pub fn new(a: Rational, b: Rational, k: i64, l: i64, coeff: ExactComplex) -> Self {
        MonomialTerm {
            a,
            b,
            k,
            l,
            profile: None,
            coeff,
        }
    }

    /// `c * z1^m z2^n`.
    pub fn monomial(m: i64, n: i64, coeff: ExactComplex) -> Self {
        MonomialTerm::new(int(m), int(n), m, n, coeff)
    }

    /// `c * |z1|^a`.
    pub fn radial(a: Rational, coeff: ExactComplex) -> Self {
        MonomialTerm::new(a, Rational::zero(), 0, 0, coeff)
    }

    pub fn with_profile(mut self, chi: Cutoff) -> Self {
        self.profile = if chi.is_one() { None } else { Some(chi) };
        self
    }

    pub fn conj(&self) -> Self {
        MonomialTerm {
            a: self.a.clone(),
            b: self.b.clone(),
            k: -self.k,
            l: -self.l,
            profile: self.profile.clone(),
            coeff: self.coeff.conj(),
        }
    }

    pub fn mul(&self, other: &MonomialTerm) -> Self {
        let profile = match (&self.profile, &other.profile) {
            (None, None) => None,
            (Some(p), None) | (None, Some(p)) => Some(p.clone()),
            (Some(p), Some(q)) => Some(p.mul(q)),
        };
        MonomialTerm {
            a: &self.a + &other.a,
            b: &self.b + &other.b,
            k: self.k + other.k,
            l: self.l + other.l,
            profile,
            coeff: &self.coeff * &other.coeff,
        }
    }

    /// Exact integral over `d` with respect to Lebesgue measure.
    ///
    /// In polar coordinates the angular factors vanish unless `k = l = 0`;
    /// the remaining radial integral over the Hartogs region
    /// `{0 <= r2 < r1 < 1}` is `int chi(r1) r1^{a+b+3} dr1 / (b + 2)`.
    pub fn integrate_exact(&self, d: Domain) -> Result<PiScaled> {
        let pi_power = d.dim() as u32;
        if d.dim() == 1 && (!self.b.is_zero() || self.l != 0) {
            return Err(Error::invalid(format!(
                "term with r2-dependence integrated over {d}"
            )));
        }
        if self.k != 0 || self.l != 0 || Zero::is_zero(&self.coeff) {
            return Ok(PiScaled::zero(pi_power));
        }
        let chi = self.profile.clone().unwrap_or_else(Cutoff::one);
        let one = Rational::one();
        let radial = match d {
            Domain::Disc | Domain::PuncturedDisc => {
                // 2 pi int chi(r) r^{a+1} dr
                chi.integrate_power(&(&self.a + &one))? * int(2)
            }
            Domain::Bidisc | Domain::PuncturedBidisc => {
                let inner = self.inner_r2_factor()?;
                chi.integrate_power(&(&self.a + &one))? * inner * int(4)
            }
            Domain::HartogsTriangle => {
                let inner = self.inner_r2_factor()?;
                let s = &self.a + &self.b + int(3);
                chi.integrate_power(&s).map_err(|e| match e {
                    Error::DivergentIntegral { .. } => Error::DivergentIntegral {
                        exponent: format_rational(&(&self.a + &self.b)),
                        detail: "r1^(a+b+3) near r1 = 0 requires a + b > -4".into(),
                    },
                    other => other,
                })? * inner
                    * int(4)
            }
        };
        Ok(PiScaled {
            coeff: &self.coeff * ExactComplex::new(radial, Rational::zero()),
            pi_power,
        })
    }

    /// `1 / (b + 2)`, the value of `int_0^1 s^{b+1} ds`.
    fn inner_r2_factor(&self) -> Result<Rational> {
        let e = &self.b + int(2);
        if !e.is_positive() {
            return Err(Error::DivergentIntegral {
                exponent: format_rational(&self.b),
                detail: "r2^(b+1) near r2 = 0 requires b > -2".into(),
            });
        }
        Ok(e.recip())
    }

    /// Pull-back along `Phi` times `det Phi' = w1`: the Hartogs atom becomes an
    /// atom on `D* x D`.
    pub fn bell_pullback(&self) -> Self {
        MonomialTerm {
            a: &self.a + &self.b + int(1),
            b: self.b.clone(),
            k: self.k + self.l + 1,
            l: self.l,
            profile: self.profile.clone(),
            coeff: self.coeff.clone(),
        }
    }

    /// Inverse of [`MonomialTerm::bell_pullback`].
    pub fn bell_pushforward(&self) -> Self {
        MonomialTerm {
            a: &self.a - &self.b - int(1),
            b: self.b.clone(),
            k: self.k - self.l - 1,
            l: self.l,
            profile: self.profile.clone(),
            coeff: self.coeff.clone(),
        }
    }
}

impl fmt::Display for MonomialTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({} + {}i) r1^{} r2^{} e^(i{}t1) e^(i{}t2)",
            format_rational(&self.coeff.re),
            format_rational(&self.coeff.im),
            format_rational(&self.a),
            format_rational(&self.b),
            self.k,
            self.l
        )?;
        if let Some(chi) = &self.profile {
            write!(f, " chi[{}]", chi.name())?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
struct FastTerm {
    a: f64,
    b: f64,
    a_int: Option<i32>,
    b_int: Option<i32>,
    k: i64,
    l: i64,
    coeff: Complex64,
    profile: Option<Cutoff>,
}

/// A finite sum of [`MonomialTerm`]s: the symbolic form of every
/// monomial-type function in this crate.
#[derive(Clone, Debug, Default)]
pub struct TermSum {
    terms: Vec<MonomialTerm>,
    fast: Vec<FastTerm>,
}

impl PartialEq for TermSum {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

fn small_int(q: &Rational) -> Option<i32> {
    if q.is_integer() {
        q.to_integer().try_into().ok()
    } else {
        None
    }
}

impl TermSum {
    pub fn new(terms: Vec<MonomialTerm>) -> Self {
        let terms: Vec<MonomialTerm> = terms
            .into_iter()
            .filter(|t| !Zero::is_zero(&t.coeff))
            .collect();
        let fast = terms
            .iter()
            .map(|t| FastTerm {
                a: to_f64(&t.a),
                b: to_f64(&t.b),
                a_int: small_int(&t.a),
                b_int: small_int(&t.b),
                k: t.k,
                l: t.l,
                coeff: to_c64(&t.coeff),
                profile: t.profile.clone(),
            })
            .collect();
        TermSum { terms, fast }
    }

    pub fn single(term: MonomialTerm) -> Self {
        TermSum::new(vec![term])
    }

    pub fn zero() -> Self {
        TermSum::new(Vec::new())
    }

    pub fn from_series<C: Coefficient>(s: &CoeffSeries<C>) -> Result<Self> {
        let mut terms = Vec::with_capacity(s.len());
        for (idx, c) in s.iter() {
            terms.push(MonomialTerm::monomial(idx.m, idx.n, c.to_exact()?));
        }
        Ok(TermSum::new(terms))
    }

    pub fn terms(&self) -> &[MonomialTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &TermSum) -> TermSum {
        TermSum::new(self.terms.iter().chain(&other.terms).cloned().collect())
    }

    pub fn scale(&self, c: &ExactComplex) -> TermSum {
        TermSum::new(
            self.terms
                .iter()
                .map(|t| MonomialTerm {
                    coeff: &t.coeff * c,
                    ..t.clone()
                })
                .collect(),
        )
    }

    pub fn map_terms(&self, f: impl Fn(&MonomialTerm) -> MonomialTerm) -> TermSum {
        TermSum::new(self.terms.iter().map(f).collect())
    }

    /// Multiplies every term by `|z1|^gamma`.
    pub fn times_delta1_power(&self, gamma: &Rational) -> TermSum {
        self.map_terms(|t| MonomialTerm {
            a: &t.a + gamma,
            ..t.clone()
        })
    }

    pub fn mul(&self, other: &TermSum) -> TermSum {
        let mut out = Vec::with_capacity(self.len() * other.len());
        for s in &self.terms {
            for t in &other.terms {
                out.push(s.mul(t));
            }
        }
        TermSum::new(out)
    }

    pub fn conj(&self) -> TermSum {
        self.map_terms(MonomialTerm::conj)
    }

    pub fn bell_pullback(&self) -> TermSum {
        self.map_terms(MonomialTerm::bell_pullback)
    }

    pub fn bell_pushforward(&self) -> TermSum {
        self.map_terms(MonomialTerm::bell_pushforward)
    }

    pub fn integrate_exact(&self, d: Domain) -> Result<PiScaled> {
        let mut acc = PiScaled::zero(d.dim() as u32);
        for t in &self.terms {
            acc = acc.add(&t.integrate_exact(d)?)?;
        }
        Ok(acc)
    }

    /// Distinct angular frequencies `(k, l)` present in the sum.
    pub fn frequencies(&self) -> Vec<(i64, i64)> {
        let mut f: Vec<(i64, i64)> = self.terms.iter().map(|t| (t.k, t.l)).collect();
        f.sort_unstable();
        f.dedup();
        f
    }

    /// Whether some term is singular at `r1 = 0` without a vanishing cutoff.
    pub fn has_negative_r1_power(&self) -> bool {
        self.terms.iter().any(|t| {
            t.a.is_negative() && t.profile.as_ref().is_none_or(|c| !c.vanishes_near_zero())
        })
    }

    pub fn eval_polar(&self, r1: f64, t1: f64, r2: f64, t2: f64) -> Complex64 {
        self.fast
            .iter()
            .map(|t| {
                let chi = t.profile.as_ref().map_or(1.0, |c| c.eval(r1));
                if chi == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let p1 = t.a_int.map_or_else(|| r1.powf(t.a), |e| r1.powi(e));
                let p2 = match t.b_int {
                    Some(0) => 1.0,
                    Some(e) => r2.powi(e),
                    None => r2.powf(t.b),
                };
                t.coeff * Complex64::from_polar(chi * p1 * p2, t.k as f64 * t1 + t.l as f64 * t2)
            })
            .sum()
    }

    pub fn eval(&self, z: &Point2C) -> Complex64 {
        let s = z.second();
        self.eval_polar(z.z1.radius, z.z1.angle, s.radius, s.angle)
    }

    /// Values on a torus grid, `out[j1 * n2 + j2]`, using per-frequency tables.
    pub(crate) fn fill_grid(
        &self,
        r1: f64,
        r2: f64,
        grid: &super::numeric::AngularGrid,
        out: &mut [Complex64],
    ) {
        out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        let n1 = grid.n;
        let n2 = grid.n2();
        for t in &self.fast {
            let chi = t.profile.as_ref().map_or(1.0, |c| c.eval(r1));
            if chi == 0.0 {
                continue;
            }
            let p1 = t.a_int.map_or_else(|| r1.powf(t.a), |e| r1.powi(e));
            let p2 = match t.b_int {
                Some(0) => 1.0,
                Some(e) => r2.powi(e),
                None => r2.powf(t.b),
            };
            let c = t.coeff * (chi * p1 * p2);
            for j1 in 0..n1 {
                let e1 = c * grid.phase(t.k, j1);
                let row = &mut out[j1 * n2..(j1 + 1) * n2];
                if n2 == 1 {
                    row[0] += e1;
                } else {
                    for (j2, v) in row.iter_mut().enumerate() {
                        *v += e1 * grid.phase(t.l, j2);
                    }
                }
            }
        }
    }
}

impl fmt::Display for TermSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// `<f, g> = int f conj(g) dV`, exactly, skipping frequency-mismatched pairs.
pub fn inner_product_exact(f: &TermSum, g: &TermSum, d: Domain) -> Result<PiScaled> {
    let mut acc = PiScaled::zero(d.dim() as u32);
    for s in f.terms() {
        for t in g.terms() {
            if s.k != t.k || s.l != t.l {
                continue;
            }
            acc = acc.add(&s.mul(&t.conj()).integrate_exact(d)?)?;
        }
    }
    Ok(acc)
}

/// `int |f|^2 * delta1^gamma dV`, exactly.
pub fn weighted_l2_norm_sq_exact(f: &TermSum, d: Domain, gamma: &Rational) -> Result<PiScaled> {
    inner_product_exact(&f.times_delta1_power(gamma), f, d)
}
