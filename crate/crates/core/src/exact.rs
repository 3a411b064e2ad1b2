//! Exact rational helpers, values of the form `q * pi^k`, and exact
//! piecewise-polynomial radial cutoffs.

use std::fmt;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;
pub type ExactComplex = Complex<BigRational>;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn exact_complex(re: Rational, im: Rational) -> ExactComplex {
    Complex::new(re, im)
}

pub fn exact_real(re: Rational) -> ExactComplex {
    Complex::new(re, Rational::zero())
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // to_f64 only fails on overflow; fall back to a ratio of floats.
        let n = q.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

pub fn to_c64(c: &ExactComplex) -> Complex64 {
    Complex64::new(to_f64(&c.re), to_f64(&c.im))
}

/// Exact dyadic rational equal to a finite `f64`.
pub fn from_f64(x: f64) -> Result<Rational> {
    BigRational::from_float(x).ok_or_else(|| Error::invalid(format!("non-finite value {x}")))
}

/// Rational with a small denominator when `x` is (close to) one, else exact dyadic.
///
/// Exponents such as `p = 4/3` arrive as floats; snapping them to the nearest
/// fraction with denominator at most 64 keeps exact closed forms readable.
pub fn snap_f64(x: f64) -> Result<Rational> {
    if !x.is_finite() {
        return Err(Error::invalid(format!("non-finite value {x}")));
    }
    for den in 1..=64i64 {
        let num = (x * den as f64).round();
        if ((num / den as f64) - x).abs() <= 1e-12 * x.abs().max(1.0) {
            return Ok(rat(num as i64, den));
        }
    }
    from_f64(x)
}

pub fn exact_from_c64(c: Complex64) -> Result<ExactComplex> {
    Ok(Complex::new(from_f64(c.re)?, from_f64(c.im)?))
}

/// Parses `p/q`, integers, or decimal/scientific notation exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::invalid(format!("not a rational number: `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Ok(BigRational::from_integer(n));
    }
    // decimal with optional exponent, parsed exactly
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (ip, fp) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{ip}{fp}0").parse().map_err(|_| bad())?;
    let mut q = BigRational::new(digits, BigInt::from(10));
    let scale = exp - fp.len() as i32;
    let ten = int(10);
    q *= if scale >= 0 {
        num_traits::pow(ten, scale as usize)
    } else {
        num_traits::pow(ten, (-scale) as usize).recip()
    };
    Ok(if neg { -q } else { q })
}

pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// `q^e` for rational `q` and rational `e`, exact when possible.
pub(crate) fn rational_pow(base: &Rational, e: &Rational) -> Result<Rational> {
    if e.is_integer() {
        let k = e
            .to_integer()
            .to_i32()
            .ok_or_else(|| Error::invalid(format!("exponent {e} too large")))?;
        if base.is_zero() {
            return if k > 0 {
                Ok(Rational::zero())
            } else if k == 0 {
                Ok(Rational::one())
            } else {
                Err(Error::SingularEvaluation(format!("0^{k}")))
            };
        }
        return Ok(num_traits::pow::Pow::pow(base, k));
    }
    if base.is_zero() && e.is_positive() {
        return Ok(Rational::zero());
    }
    if base.is_one() {
        return Ok(Rational::one());
    }
    Err(Error::Irrational(format!(
        "({})^({})",
        format_rational(base),
        format_rational(e)
    )))
}

/// An exact value `coeff * pi^pi_power`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiScaled {
    pub coeff: ExactComplex,
    pub pi_power: u32,
}

impl PiScaled {
    pub fn zero(pi_power: u32) -> Self {
        PiScaled {
            coeff: ExactComplex::zero(),
            pi_power,
        }
    }

    pub fn real(q: Rational, pi_power: u32) -> Self {
        PiScaled {
            coeff: exact_real(q),
            pi_power,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn to_c64(&self) -> Complex64 {
        to_c64(&self.coeff) * std::f64::consts::PI.powi(self.pi_power as i32)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_c64().re
    }

    /// Sum of two values carrying the same power of pi.
    pub fn add(&self, other: &PiScaled) -> Result<PiScaled> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.pi_power != other.pi_power {
            return Err(Error::Internal(format!(
                "adding pi^{} to pi^{}",
                self.pi_power, other.pi_power
            )));
        }
        Ok(PiScaled {
            coeff: &self.coeff + &other.coeff,
            pi_power: self.pi_power,
        })
    }

    /// Ratio of two values with equal pi powers (a pure rational).
    pub fn ratio(&self, other: &PiScaled) -> Result<ExactComplex> {
        if other.is_zero() {
            return Err(Error::invalid("division by an exact zero"));
        }
        if !self.is_zero() && self.pi_power != other.pi_power {
            return Err(Error::Irrational("ratio with unequal powers of pi".into()));
        }
        Ok(&self.coeff / &other.coeff)
    }
}

impl fmt::Display for PiScaled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = if self.coeff.im.is_zero() {
            format_rational(&self.coeff.re)
        } else {
            format!(
                "({} + {}i)",
                format_rational(&self.coeff.re),
                format_rational(&self.coeff.im)
            )
        };
        match self.pi_power {
            0 => write!(f, "{c}"),
            1 => write!(f, "{c}*pi"),
            k => write!(f, "{c}*pi^{k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Piece {
    lo: Rational,
    hi: Rational,
    /// Polynomial in `r`, ascending powers.
    coeffs: Vec<Rational>,
}

/// A piecewise-polynomial function on `[0, 1]` with rational breakpoints,
/// zero outside its pieces. Used for the radial cutoff `chi(|z1|)`.
#[derive(Clone, Debug)]
pub struct Cutoff {
    name: String,
    pieces: Vec<Piece>,
    fast: Vec<(f64, f64, Vec<f64>)>,
}

impl PartialEq for Cutoff {
    fn eq(&self, other: &Self) -> bool {
        self.pieces == other.pieces
    }
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

impl Cutoff {
    fn build(name: String, pieces: Vec<Piece>) -> Self {
        let fast = pieces
            .iter()
            .map(|p| {
                (
                    to_f64(&p.lo),
                    to_f64(&p.hi),
                    p.coeffs.iter().map(to_f64).collect(),
                )
            })
            .collect();
        Cutoff { name, pieces, fast }
    }

    /// `chi = 1` on `[0, 1]`.
    pub fn one() -> Self {
        Cutoff::build(
            "1".into(),
            vec![Piece {
                lo: Rational::zero(),
                hi: Rational::one(),
                coeffs: vec![Rational::one()],
            }],
        )
    }

    /// Indicator of `[lo, 1]`.
    pub fn step(lo: Rational) -> Self {
        assert!(lo.is_positive() && lo < Rational::one());
        Cutoff::build(
            format!("step[{},1]", format_rational(&lo)),
            vec![Piece {
                lo,
                hi: Rational::one(),
                coeffs: vec![Rational::one()],
            }],
        )
    }

    /// Cubic smoothstep rising from 0 at `a` to 1 at `b`, then 1 up to `r = 1`.
    pub fn smoothstep(a: Rational, b: Rational) -> Self {
        assert!(a.is_positive() && a < b && b <= Rational::one());
        let width = &b - &a;
        let t = vec![-(&a / &width), width.recip()];
        let t2 = poly_mul(&t, &t);
        let t3 = poly_mul(&t2, &t);
        let mut ramp = vec![Rational::zero(); 4];
        for (i, c) in t2.iter().enumerate() {
            ramp[i] += c * int(3);
        }
        for (i, c) in t3.iter().enumerate() {
            ramp[i] -= c * int(2);
        }
        let name = format!(
            "smoothstep[{},{}]",
            format_rational(&a),
            format_rational(&b)
        );
        let mut pieces = vec![Piece {
            lo: a,
            hi: b.clone(),
            coeffs: ramp,
        }];
        if b < Rational::one() {
            pieces.push(Piece {
                lo: b,
                hi: Rational::one(),
                coeffs: vec![Rational::one()],
            });
        }
        Cutoff::build(name, pieces)
    }

    /// Default cutoff: indicator of `[1/2, 1]`.
    pub fn default_step() -> Self {
        Cutoff::step(rat(1, 2))
    }

    /// Default smooth cutoff: smoothstep on `[1/4, 1/2]`.
    pub fn default_smooth() -> Self {
        Cutoff::smoothstep(rat(1, 4), rat(1, 2))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_one(&self) -> bool {
        self.pieces.len() == 1
            && self.pieces[0].lo.is_zero()
            && self.pieces[0].hi.is_one()
            && self.pieces[0].coeffs.len() == 1
            && self.pieces[0].coeffs[0].is_one()
    }

    /// Whether the cutoff is identically zero on some `[0, c)`, `c > 0`.
    pub fn vanishes_near_zero(&self) -> bool {
        self.pieces.first().is_none_or(|p| p.lo.is_positive())
    }

    /// Breakpoints strictly inside `(0, 1)`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .fast
            .iter()
            .flat_map(|(lo, hi, _)| [*lo, *hi])
            .filter(|x| *x > 0.0 && *x < 1.0)
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    pub fn eval(&self, r: f64) -> f64 {
        for (lo, hi, c) in &self.fast {
            if r >= *lo && (r < *hi || (*hi == 1.0 && r <= 1.0)) {
                return c.iter().rev().fold(0.0, |acc, x| acc * r + x);
            }
        }
        0.0
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Cutoff) -> Cutoff {
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        let mut pieces = Vec::new();
        for p in &self.pieces {
            for q in &other.pieces {
                let lo = if p.lo > q.lo { &p.lo } else { &q.lo };
                let hi = if p.hi < q.hi { &p.hi } else { &q.hi };
                if lo < hi {
                    pieces.push(Piece {
                        lo: lo.clone(),
                        hi: hi.clone(),
                        coeffs: poly_mul(&p.coeffs, &q.coeffs),
                    });
                }
            }
        }
        pieces.sort_by(|a, b| a.lo.cmp(&b.lo));
        let name = if self.name == other.name {
            format!("({})^2", self.name)
        } else {
            format!("{}*{}", self.name, other.name)
        };
        Cutoff::build(name, pieces)
    }

    /// `int_0^1 chi(r) r^s dr`, exactly.
    pub fn integrate_power(&self, s: &Rational) -> Result<Rational> {
        let mut total = Rational::zero();
        for p in &self.pieces {
            for (j, c) in p.coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let e = s + int(j as i64) + Rational::one();
                if p.lo.is_zero() && !e.is_positive() {
                    return Err(Error::DivergentIntegral {
                        exponent: format_rational(&(s + int(j as i64))),
                        detail: "integral of r^s near r = 0 with s <= -1".into(),
                    });
                }
                if e.is_zero() {
                    return Err(Error::Irrational(format!(
                        "log({}/{})",
                        format_rational(&p.hi),
                        format_rational(&p.lo)
                    )));
                }
                let v = (rational_pow(&p.hi, &e)? - rational_pow(&p.lo, &e)?) / &e;
                total += c * v;
            }
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("15/32").unwrap(), rat(15, 32));
        assert_eq!(parse_rational("-3").unwrap(), int(-3));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-1.5e-1").unwrap(), rat(-3, 20));
        assert_eq!(parse_rational("2E2").unwrap(), int(200));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert_eq!(format_rational(&rat(6, 4)), "3/2");
        assert_eq!(format_rational(&int(-7)), "-7");
    }

    #[test]
    fn snapping() {
        assert_eq!(snap_f64(4.0 / 3.0).unwrap(), rat(4, 3));
        assert_eq!(snap_f64(3.5).unwrap(), rat(7, 2));
        assert_eq!(snap_f64(-2.0).unwrap(), int(-2));
    }

    #[test]
    fn step_cutoff_moment() {
        // 2 * int_{1/2}^1 r^3 dr = 15/32
        let chi = Cutoff::default_step();
        let m = chi.integrate_power(&int(3)).unwrap();
        assert_eq!(m * int(2), rat(15, 32));
        assert_eq!(chi.eval(0.25), 0.0);
        assert_eq!(chi.eval(0.5), 1.0);
        assert_eq!(chi.eval(1.0), 1.0);
        assert!(chi.vanishes_near_zero());
        assert!(!Cutoff::one().vanishes_near_zero());
    }

    #[test]
    fn smoothstep_shape() {
        let chi = Cutoff::default_smooth();
        assert!((chi.eval(0.25)).abs() < 1e-15);
        assert!((chi.eval(0.375) - 0.5).abs() < 1e-15);
        assert!((chi.eval(0.5) - 1.0).abs() < 1e-15);
        assert_eq!(chi.eval(0.9), 1.0);
        assert_eq!(chi.eval(0.1), 0.0);
        // moment against a midpoint-rule oracle
        let n = 200_000;
        let h = 1.0 / n as f64;
        let numeric: f64 = (0..n)
            .map(|i| {
                let r = (i as f64 + 0.5) * h;
                chi.eval(r) * r.powi(3) * h
            })
            .sum();
        let exact = to_f64(&chi.integrate_power(&int(3)).unwrap());
        assert!((numeric - exact).abs() < 1e-9);
    }

    #[test]
    fn product_of_cutoffs() {
        let a = Cutoff::default_smooth();
        let b = Cutoff::default_step();
        let p = a.mul(&b);
        for r in [0.1, 0.3, 0.5, 0.7, 1.0] {
            assert!((p.eval(r) - a.eval(r) * b.eval(r)).abs() < 1e-15);
        }
        assert_eq!(Cutoff::one().mul(&b), b);
    }

    #[test]
    fn divergent_and_irrational_moments() {
        let one = Cutoff::one();
        assert_eq!(one.integrate_power(&rat(-1, 2)).unwrap(), int(2));
        assert!(matches!(
            one.integrate_power(&int(-1)),
            Err(Error::DivergentIntegral { .. })
        ));
        let chi = Cutoff::default_step();
        assert!(matches!(
            chi.integrate_power(&int(-1)),
            Err(Error::Irrational(_))
        ));
        assert!(matches!(
            chi.integrate_power(&rat(1, 2)),
            Err(Error::Irrational(_))
        ));
        // vanishing near zero keeps strongly singular powers integrable
        assert_eq!(chi.integrate_power(&int(-3)).unwrap(), rat(3, 2));
    }
}
