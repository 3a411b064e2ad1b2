//! Sparse Laurent-Taylor coefficient series and the coefficient-level
//! operators: partial sums in the first variable, bounded-variation
//! multipliers and the transform `h -> det(Phi') (h o Phi)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{
    exact_from_c64, exact_real, format_rational, int, parse_rational, rat, to_c64, to_f64,
    ExactComplex, Rational,
};
use crate::geometry::{check_dim, Domain, Point2C};

/// Index of the monomial `z1^m z2^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BiIndex {
    pub m: i64,
    pub n: i64,
}

impl BiIndex {
    pub const fn new(m: i64, n: i64) -> Self {
        BiIndex { m, n }
    }
}

impl fmt::Display for BiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.m, self.n)
    }
}

/// Scalar backends for coefficient series: exact complex rationals or
/// double-precision complex numbers.
pub trait Coefficient: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    const BACKEND: &'static str;

    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn to_c64(&self) -> Complex64;
    fn to_exact(&self) -> Result<ExactComplex>;
    fn format_parts(&self) -> (String, String);
    fn parse_parts(re: &str, im: &str) -> Result<Self>;
}

impl Coefficient for ExactComplex {
    const BACKEND: &'static str = "exact";

    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn from_rational(q: &Rational) -> Self {
        exact_real(q.clone())
    }
    fn to_c64(&self) -> Complex64 {
        to_c64(self)
    }
    fn to_exact(&self) -> Result<ExactComplex> {
        Ok(self.clone())
    }
    fn format_parts(&self) -> (String, String) {
        (format_rational(&self.re), format_rational(&self.im))
    }
    fn parse_parts(re: &str, im: &str) -> Result<Self> {
        Ok(ExactComplex::new(parse_rational(re)?, parse_rational(im)?))
    }
}

impl Coefficient for Complex64 {
    const BACKEND: &'static str = "float";

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn from_rational(q: &Rational) -> Self {
        Complex64::new(to_f64(q), 0.0)
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn to_exact(&self) -> Result<ExactComplex> {
        exact_from_c64(*self)
    }
    fn format_parts(&self) -> (String, String) {
        (format!("{:?}", self.re), format!("{:?}", self.im))
    }
    fn parse_parts(re: &str, im: &str) -> Result<Self> {
        let p = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::invalid(format!("not a float: `{s}`")))
        };
        Ok(Complex64::new(p(re)?, p(im)?))
    }
}

/// Finite sparse series `sum a_{m,n} z1^m z2^n` tagged with its domain.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffSeries<C: Coefficient> {
    domain: Domain,
    coeffs: BTreeMap<BiIndex, C>,
}

pub type ExactSeries = CoeffSeries<ExactComplex>;
pub type FloatSeries = CoeffSeries<Complex64>;

/// Direction of the transform induced by `Phi: D* x D -> H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BellDirection {
    /// `h` on the Hartogs triangle to `w1 * h(Phi(w))` on the punctured bidisc.
    HartogsToBidisc,
    /// The inverse map.
    BidiscToHartogs,
}

impl<C: Coefficient> CoeffSeries<C> {
    pub fn new(domain: Domain) -> Self {
        CoeffSeries {
            domain,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_pairs(
        domain: Domain,
        pairs: impl IntoIterator<Item = (BiIndex, C)>,
    ) -> Result<Self> {
        let mut s = CoeffSeries::new(domain);
        for (idx, c) in pairs {
            s.add_term(idx, c)?;
        }
        Ok(s)
    }

    pub fn monomial(domain: Domain, m: i64, n: i64, c: C) -> Result<Self> {
        CoeffSeries::from_pairs(domain, [(BiIndex::new(m, n), c)])
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Adds `c` to the coefficient at `idx`.
    pub fn add_term(&mut self, idx: BiIndex, c: C) -> Result<()> {
        if !self.domain.admits_index(idx.m, idx.n) {
            return Err(Error::NonIntegrableIndex {
                m: idx.m,
                n: idx.n,
                domain: self.domain,
            });
        }
        let v = match self.coeffs.remove(&idx) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !v.is_zero() {
            self.coeffs.insert(idx, v);
        }
        Ok(())
    }

    pub fn get(&self, idx: BiIndex) -> C {
        self.coeffs.get(&idx).cloned().unwrap_or_else(C::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BiIndex, &C)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_m(&self) -> Option<i64> {
        self.coeffs.keys().map(|k| k.m).max()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.domain != other.domain {
            return Err(Error::invalid(format!(
                "adding series on {} and {}",
                self.domain, other.domain
            )));
        }
        let mut out = self.clone();
        for (idx, c) in &other.coeffs {
            out.add_term(*idx, c.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        CoeffSeries {
            domain: self.domain,
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, v)| (*k, v.mul(c)))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }

    /// Evaluates the finite sum at `z`.
    pub fn eval(&self, z: &Point2C) -> Result<Complex64> {
        check_dim(self.domain, z)?;
        let (r1, t1) = (z.z1.radius, z.z1.angle);
        let (r2, t2) = (z.second().radius, z.second().angle);
        if r1 == 0.0 {
            if let Some(idx) = self.coeffs.keys().find(|k| k.m < 0) {
                return Err(Error::SingularEvaluation(format!("z1^{} at z1 = 0", idx.m)));
            }
        }
        Ok(self.eval_polar(r1, t1, r2, t2))
    }

    pub(crate) fn eval_polar(&self, r1: f64, t1: f64, r2: f64, t2: f64) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(k, c)| {
                let modulus = r1.powi(k.m as i32) * r2.powi(k.n as i32);
                c.to_c64() * Complex64::from_polar(modulus, k.m as f64 * t1 + k.n as f64 * t2)
            })
            .sum()
    }

    fn require_taylor(&self, op: &'static str) -> Result<()> {
        match self.domain {
            Domain::HartogsTriangle => Err(Error::UnsupportedDomain {
                op,
                domain: self.domain,
            }),
            _ => Ok(()),
        }
    }

    /// `S_N`: keeps the coefficients with first-variable degree `m <= N`.
    pub fn partial_sum(&self, n_max: u64) -> Result<Self> {
        self.require_taylor("partial_sum")?;
        Ok(CoeffSeries {
            domain: self.domain,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(k, _)| k.m as u64 <= n_max)
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        })
    }

    /// Multiplies the coefficient at `(mu, nu)` by `t_mu`.
    pub fn apply_multiplier(&self, t: &MultiplierSeq) -> Result<Self> {
        self.require_taylor("apply_multiplier")?;
        t.bv_bound()?;
        Ok(CoeffSeries {
            domain: self.domain,
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, v)| (*k, v.mul(&C::from_rational(&t.term(k.m as u64)))))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        })
    }

    /// Coefficient form of `T_Phi h = det(Phi') (h o Phi)` and its inverse.
    ///
    /// `z1^m z2^n` becomes `w1^(m+n+1) w2^n`; the inverse sends
    /// `w1^mu w2^nu` to `z1^(mu-nu-1) z2^nu`.
    pub fn bell_transform(&self, direction: BellDirection) -> Result<Self> {
        let (source_ok, target) = match direction {
            BellDirection::HartogsToBidisc => (
                self.domain == Domain::HartogsTriangle,
                Domain::PuncturedBidisc,
            ),
            BellDirection::BidiscToHartogs => (
                matches!(self.domain, Domain::PuncturedBidisc | Domain::Bidisc),
                Domain::HartogsTriangle,
            ),
        };
        if !source_ok {
            return Err(Error::UnsupportedDomain {
                op: "bell_transform",
                domain: self.domain,
            });
        }
        let mut coeffs = BTreeMap::new();
        for (k, v) in &self.coeffs {
            let image = bell_index(*k, direction);
            if !target.admits_index(image.m, image.n) {
                return Err(Error::Internal(format!(
                    "index {k} maps to {image}, outside the {target} index set"
                )));
            }
            coeffs.insert(image, v.clone());
        }
        Ok(CoeffSeries {
            domain: target,
            coeffs,
        })
    }

    pub fn to_float(&self) -> FloatSeries {
        CoeffSeries {
            domain: self.domain,
            coeffs: self.coeffs.iter().map(|(k, v)| (*k, v.to_c64())).collect(),
        }
    }

    pub fn to_exact(&self) -> Result<ExactSeries> {
        let mut coeffs = BTreeMap::new();
        for (k, v) in &self.coeffs {
            coeffs.insert(*k, v.to_exact()?);
        }
        Ok(CoeffSeries {
            domain: self.domain,
            coeffs,
        })
    }

    /// The same coefficients on another domain, checked against its index set.
    pub fn with_domain(&self, domain: Domain) -> Result<Self> {
        CoeffSeries::from_pairs(domain, self.coeffs.iter().map(|(k, v)| (*k, v.clone())))
    }

    /// Line-oriented text form; see [`CoeffSeries::from_text`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("hartogs-series v1\n");
        out.push_str(&format!("domain {}\n", self.domain));
        out.push_str(&format!("backend {}\n", C::BACKEND));
        for (k, v) in &self.coeffs {
            let (re, im) = v.format_parts();
            out.push_str(&format!("{} {} {} {}\n", k.m, k.n, re, im));
        }
        out
    }

    /// Parses the text form:
    ///
    /// ```text
    /// hartogs-series v1
    /// domain HartogsTriangle
    /// backend exact
    /// -1 0 15/32 0
    /// ```
    ///
    /// One coefficient per line as `m n re im`; `#` starts a comment line.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut domain = None;
        let mut seen_magic = false;
        let mut series: Option<Self> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: line_no, msg };
            if !seen_magic {
                if line != "hartogs-series v1" {
                    return Err(perr(format!("expected `hartogs-series v1`, got `{line}`")));
                }
                seen_magic = true;
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                ["domain", name] => {
                    domain = Some(name.parse::<Domain>().map_err(|e| perr(e.to_string()))?);
                }
                ["backend", b] => {
                    if *b != C::BACKEND {
                        return Err(perr(format!(
                            "backend `{b}` does not match requested `{}`",
                            C::BACKEND
                        )));
                    }
                    let d = domain.ok_or_else(|| perr("backend before domain".into()))?;
                    series = Some(CoeffSeries::new(d));
                }
                [m, n, re, im] => {
                    let s = series
                        .as_mut()
                        .ok_or_else(|| perr("coefficient before header".into()))?;
                    let m: i64 = m.parse().map_err(|_| perr(format!("bad m `{m}`")))?;
                    let n: i64 = n.parse().map_err(|_| perr(format!("bad n `{n}`")))?;
                    let c = C::parse_parts(re, im).map_err(|e| perr(e.to_string()))?;
                    s.add_term(BiIndex::new(m, n), c)
                        .map_err(|e| perr(e.to_string()))?;
                }
                _ => return Err(perr(format!("unrecognised line `{line}`"))),
            }
        }
        series.ok_or(Error::Parse {
            line: 0,
            msg: "missing header".into(),
        })
    }
}

/// Index map of the Bell transform.
pub fn bell_index(k: BiIndex, direction: BellDirection) -> BiIndex {
    match direction {
        BellDirection::HartogsToBidisc => BiIndex::new(k.m + k.n + 1, k.n),
        BellDirection::BidiscToHartogs => BiIndex::new(k.m - k.n - 1, k.n),
    }
}

/// Closed-form rules for multiplier sequences `t_mu`.
#[derive(Clone)]
pub enum MultiplierRule {
    Constant(Rational),
    /// `t_mu = 1 + 1/(mu + 1)`.
    OnePlusReciprocal,
    /// `t_mu = (-1)^mu`.
    Alternating,
    Custom {
        name: String,
        term: Arc<dyn Fn(u64) -> Rational + Send + Sync>,
        /// Limit of the sequence when it is known to be monotone and bounded.
        monotone_limit: Option<Rational>,
    },
}

impl fmt::Debug for MultiplierRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MultiplierRule::Constant(c) => write!(f, "Constant({})", format_rational(c)),
            MultiplierRule::OnePlusReciprocal => f.write_str("OnePlusReciprocal"),
            MultiplierRule::Alternating => f.write_str("Alternating"),
            MultiplierRule::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

/// Result of a bounded-variation computation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BvNorm {
    /// `sum_{mu < truncation} |t_{mu+1} - t_mu|`.
    pub partial: f64,
    /// `|lim t - t_truncation|` for monotone sequences.
    pub tail: Option<f64>,
    pub total: f64,
    pub limit: Option<f64>,
    /// Exact total when the sequence is monotone with a known limit.
    pub exact_total: Option<String>,
    /// Set when the tail is not certified.
    pub warning: bool,
}

#[derive(Clone, Debug)]
pub struct MultiplierSeq {
    rule: MultiplierRule,
}

impl MultiplierSeq {
    pub const DEFAULT_TRUNCATION: u64 = 1024;
    pub const DEFAULT_CAP: f64 = 1000.0;

    pub fn new(rule: MultiplierRule) -> Self {
        MultiplierSeq { rule }
    }

    pub fn one_plus_reciprocal() -> Self {
        MultiplierSeq::new(MultiplierRule::OnePlusReciprocal)
    }

    pub fn constant(c: Rational) -> Self {
        MultiplierSeq::new(MultiplierRule::Constant(c))
    }

    pub fn rule(&self) -> &MultiplierRule {
        &self.rule
    }

    pub fn term(&self, mu: u64) -> Rational {
        match &self.rule {
            MultiplierRule::Constant(c) => c.clone(),
            MultiplierRule::OnePlusReciprocal => Rational::one() + rat(1, mu as i64 + 1),
            MultiplierRule::Alternating => {
                if mu % 2 == 0 {
                    Rational::one()
                } else {
                    -Rational::one()
                }
            }
            MultiplierRule::Custom { term, .. } => term(mu),
        }
    }

    fn monotone_limit(&self) -> Option<Rational> {
        match &self.rule {
            MultiplierRule::Constant(c) => Some(c.clone()),
            MultiplierRule::OnePlusReciprocal => Some(Rational::one()),
            MultiplierRule::Alternating => None,
            MultiplierRule::Custom { monotone_limit, .. } => monotone_limit.clone(),
        }
    }

    /// Total variation `sum |t_{mu+1} - t_mu|`.
    pub fn bv_norm(&self, truncation: u64, cap: f64) -> Result<BvNorm> {
        if truncation < 1 {
            return Err(Error::invalid("truncation must be at least 1"));
        }
        let mut partial = Rational::zero();
        let mut prev = self.term(0);
        for mu in 0..truncation {
            let next = self.term(mu + 1);
            partial += (&next - &prev).abs();
            prev = next;
            if to_f64(&partial) > cap {
                return Err(Error::DivergentSequence {
                    partial: to_f64(&partial),
                    cap,
                });
            }
        }
        let limit = self.monotone_limit();
        let (tail, exact_total) = match &limit {
            Some(l) => {
                let tail = (l - &prev).abs();
                (Some(tail.clone()), Some(&partial + tail))
            }
            None => (None, None),
        };
        let partial_f = to_f64(&partial);
        Ok(BvNorm {
            partial: partial_f,
            tail: tail.as_ref().map(to_f64),
            total: exact_total.as_ref().map(to_f64).unwrap_or(partial_f),
            limit: limit.as_ref().map(to_f64),
            exact_total: exact_total.as_ref().map(format_rational),
            warning: limit.is_none(),
        })
    }

    /// Variation with the default truncation and cap.
    pub fn bv_bound(&self) -> Result<BvNorm> {
        self.bv_norm(Self::DEFAULT_TRUNCATION, Self::DEFAULT_CAP)
    }
}

/// Convenience constructor for exact coefficients.
pub fn q(num: i64, den: i64) -> ExactComplex {
    exact_real(rat(num, den))
}

/// Exact integer coefficient.
pub fn qi(n: i64) -> ExactComplex {
    exact_real(int(n))
}
