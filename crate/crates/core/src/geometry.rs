//! Model domains, points in polar form, radial weights and the map
//! `Phi(w1, w2) = (w1, w1 w2)` from the punctured bidisc onto the Hartogs
//! triangle.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The five model domains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Domain {
    /// Unit disc in C.
    Disc,
    /// Unit disc with the origin removed.
    PuncturedDisc,
    /// Unit bidisc in C^2.
    Bidisc,
    /// `{0 < |w1| < 1, |w2| < 1}`.
    PuncturedBidisc,
    /// `{|z2| < |z1| < 1}`.
    HartogsTriangle,
}

impl Domain {
    pub const ALL: [Domain; 5] = [
        Domain::Disc,
        Domain::PuncturedDisc,
        Domain::Bidisc,
        Domain::PuncturedBidisc,
        Domain::HartogsTriangle,
    ];

    pub fn dim(self) -> usize {
        match self {
            Domain::Disc | Domain::PuncturedDisc => 1,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Domain::Disc => "Disc",
            Domain::PuncturedDisc => "PuncturedDisc",
            Domain::Bidisc => "Bidisc",
            Domain::PuncturedBidisc => "PuncturedBidisc",
            Domain::HartogsTriangle => "HartogsTriangle",
        }
    }

    /// Whether `z1^m z2^n` is an admissible index for series on this domain.
    ///
    /// Punctured domains use the same constraint as their filled-in
    /// counterparts: square-integrable holomorphic functions extend across
    /// the puncture.
    pub fn admits_index(self, m: i64, n: i64) -> bool {
        match self {
            Domain::Disc | Domain::PuncturedDisc => m >= 0 && n == 0,
            Domain::Bidisc | Domain::PuncturedBidisc => m >= 0 && n >= 0,
            Domain::HartogsTriangle => n >= 0 && m >= -(n + 1),
        }
    }

    /// Open-set membership.
    pub fn contains(self, z: &Point2C) -> Result<bool> {
        check_dim(self, z)?;
        let r1 = z.z1.radius;
        Ok(match self {
            Domain::Disc => r1 < 1.0,
            Domain::PuncturedDisc => r1 > 0.0 && r1 < 1.0,
            Domain::Bidisc => r1 < 1.0 && z.second().radius < 1.0,
            Domain::PuncturedBidisc => r1 > 0.0 && r1 < 1.0 && z.second().radius < 1.0,
            Domain::HartogsTriangle => z.second().radius < r1 && r1 < 1.0,
        })
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "disc" | "d" => Ok(Domain::Disc),
            "punctureddisc" | "dstar" => Ok(Domain::PuncturedDisc),
            "bidisc" | "d2" => Ok(Domain::Bidisc),
            "puncturedbidisc" | "dstard" | "dstarxd" => Ok(Domain::PuncturedBidisc),
            "hartogstriangle" | "hartogs" | "h" => Ok(Domain::HartogsTriangle),
            _ => Err(Error::invalid(format!("unknown domain `{s}`"))),
        }
    }
}

pub(crate) fn check_dim(d: Domain, z: &Point2C) -> Result<()> {
    if d.dim() != z.dim() {
        return Err(Error::DimensionMismatch {
            expected: d.dim(),
            found: z.dim(),
        });
    }
    Ok(())
}

/// A complex number in polar form with the angle normalised to `[0, 2pi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Polar {
    pub radius: f64,
    pub angle: f64,
}

impl Polar {
    pub fn new(radius: f64, angle: f64) -> Self {
        assert!(radius >= 0.0, "negative radius {radius}");
        Polar {
            radius,
            angle: normalize_angle(angle),
        }
    }

    pub fn from_complex(c: Complex64) -> Self {
        Polar::new(c.norm(), c.arg())
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.radius, self.angle)
    }

    pub fn mul(self, other: Polar) -> Polar {
        Polar::new(self.radius * other.radius, self.angle + other.angle)
    }
}

fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// A point of C or C^2, stored in polar coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point2C {
    pub z1: Polar,
    pub z2: Option<Polar>,
}

impl Point2C {
    pub fn one(r: f64, theta: f64) -> Self {
        Point2C {
            z1: Polar::new(r, theta),
            z2: None,
        }
    }

    pub fn two(r1: f64, theta1: f64, r2: f64, theta2: f64) -> Self {
        Point2C {
            z1: Polar::new(r1, theta1),
            z2: Some(Polar::new(r2, theta2)),
        }
    }

    pub fn from_rect(z1: Complex64, z2: Option<Complex64>) -> Self {
        Point2C {
            z1: Polar::from_complex(z1),
            z2: z2.map(Polar::from_complex),
        }
    }

    pub fn dim(&self) -> usize {
        1 + usize::from(self.z2.is_some())
    }

    /// Second coordinate; the origin for one-dimensional points.
    pub fn second(&self) -> Polar {
        self.z2.unwrap_or(Polar {
            radius: 0.0,
            angle: 0.0,
        })
    }

    pub fn to_rect(&self) -> (Complex64, Option<Complex64>) {
        (self.z1.to_complex(), self.z2.map(Polar::to_complex))
    }

    /// `delta_1(z) = |z1|`.
    pub fn delta1(&self) -> f64 {
        self.z1.radius
    }

    /// Euclidean norm `|z|`.
    pub fn norm(&self) -> f64 {
        self.z1.radius.hypot(self.second().radius)
    }
}

/// A positive function of one variable on `(0, 1]`, composed with `delta_1`.
#[derive(Clone)]
pub struct RadialProfile {
    name: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl RadialProfile {
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        RadialProfile {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    /// `lambda(r) = r^beta`.
    pub fn power(beta: f64) -> Self {
        RadialProfile::new(format!("r^{beta}"), move |r: f64| r.powf(beta))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.f)(r)
    }
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RadialProfile({})", self.name)
    }
}

/// Weights on the model domains; all of them depend on `|z1|` only.
#[derive(Clone, Debug)]
pub enum Weight {
    Constant(f64),
    PowerDelta1(f64),
    RadialProfile(RadialProfile),
}

impl Weight {
    pub fn unit() -> Self {
        Weight::Constant(1.0)
    }

    pub fn describe(&self) -> String {
        match self {
            Weight::Constant(c) => format!("const({c})"),
            Weight::PowerDelta1(b) => format!("delta1^{b}"),
            Weight::RadialProfile(p) => format!("lambda[{}](delta1)", p.name()),
        }
    }

    /// Weight as a function of `delta_1 = r`.
    pub fn at_radius(&self, r: f64) -> Result<f64> {
        let v = match self {
            Weight::Constant(c) => *c,
            Weight::PowerDelta1(beta) => {
                if *beta == 0.0 {
                    1.0
                } else if r == 0.0 && *beta < 0.0 {
                    return Err(Error::SingularEvaluation(format!(
                        "delta1^{beta} at delta1 = 0"
                    )));
                } else {
                    r.powf(*beta)
                }
            }
            Weight::RadialProfile(p) => {
                if r == 0.0 {
                    return Err(Error::SingularEvaluation(format!(
                        "radial profile {} at delta1 = 0",
                        p.name()
                    )));
                }
                p.eval(r)
            }
        };
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::invalid(format!(
                "weight {} is not positive and finite at delta1 = {r}: {v}",
                self.describe()
            )));
        }
        Ok(v)
    }

    pub fn at(&self, z: &Point2C) -> Result<f64> {
        self.at_radius(z.delta1())
    }

    /// Unchecked evaluation for quadrature nodes, which never sit on `r = 0`.
    pub(crate) fn at_radius_fast(&self, r: f64) -> f64 {
        match self {
            Weight::Constant(c) => *c,
            Weight::PowerDelta1(beta) if *beta == 0.0 => 1.0,
            Weight::PowerDelta1(beta) => r.powf(*beta),
            Weight::RadialProfile(p) => p.eval(r),
        }
    }
}

/// `Phi(w1, w2) = (w1, w1 w2)`.
pub fn phi(w: &Point2C) -> Result<Point2C> {
    let w2 = w.z2.ok_or(Error::DimensionMismatch {
        expected: 2,
        found: 1,
    })?;
    Ok(Point2C {
        z1: w.z1,
        z2: Some(w.z1.mul(w2)),
    })
}

/// `Phi^{-1}(z1, z2) = (z1, z2 / z1)`.
pub fn phi_inverse(z: &Point2C) -> Result<Point2C> {
    let z2 = z.z2.ok_or(Error::DimensionMismatch {
        expected: 2,
        found: 1,
    })?;
    if z.z1.radius == 0.0 {
        return Err(Error::SingularEvaluation("phi_inverse at z1 = 0".into()));
    }
    Ok(Point2C {
        z1: z.z1,
        z2: Some(Polar::new(z2.radius / z.z1.radius, z2.angle - z.z1.angle)),
    })
}

/// `det Phi'(w) = w1`.
pub fn phi_jacobian_det(w: &Point2C) -> Complex64 {
    w.z1.to_complex()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_dstar_d(rng: &mut ChaCha8Rng) -> Point2C {
        Point2C::two(
            rng.gen_range(1e-6..1.0),
            rng.gen_range(0.0..TAU),
            rng.gen_range(0.0..1.0),
            rng.gen_range(0.0..TAU),
        )
    }

    #[test]
    fn hartogs_membership() {
        let h = Domain::HartogsTriangle;
        assert!(h.contains(&Point2C::two(0.5, 1.0, 0.2, 2.0)).unwrap());
        assert!(!h.contains(&Point2C::two(0.2, 1.0, 0.5, 2.0)).unwrap());
        assert!(!h.contains(&Point2C::two(0.5, 0.0, 0.5, 0.0)).unwrap());
        assert!(!h.contains(&Point2C::two(1.0, 0.0, 0.5, 0.0)).unwrap());
    }

    #[test]
    fn punctured_membership() {
        let d = Domain::PuncturedBidisc;
        assert!(!d.contains(&Point2C::two(0.0, 0.0, 0.3, 0.0)).unwrap());
        assert!(d.contains(&Point2C::two(0.1, 0.0, 0.3, 0.0)).unwrap());
        assert!(Domain::Bidisc
            .contains(&Point2C::two(0.0, 0.0, 0.3, 0.0))
            .unwrap());
        assert!(!Domain::PuncturedDisc
            .contains(&Point2C::one(0.0, 0.0))
            .unwrap());
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let err = Domain::HartogsTriangle.contains(&Point2C::one(0.5, 0.0));
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
        let err = Domain::Disc.contains(&Point2C::two(0.5, 0.0, 0.1, 0.0));
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn weights() {
        let z = Point2C::two(0.5, 0.3, 0.1, 0.0);
        let p = 2.0;
        assert_eq!(Weight::PowerDelta1(2.0 - p).at(&z).unwrap(), 1.0);
        assert_eq!(Weight::PowerDelta1(2.0).at(&z).unwrap(), 0.25);
        let lam = Weight::RadialProfile(RadialProfile::new("r^2", |r| r * r));
        assert_eq!(lam.at(&z).unwrap(), 0.25);
        assert_eq!(
            Weight::PowerDelta1(0.0).at(&z).unwrap(),
            Weight::Constant(1.0).at(&z).unwrap()
        );
        let origin = Point2C::two(0.0, 0.0, 0.0, 0.0);
        assert!(matches!(
            Weight::PowerDelta1(-1.0).at(&origin),
            Err(Error::SingularEvaluation(_))
        ));
        assert_eq!(Weight::PowerDelta1(0.0).at(&origin).unwrap(), 1.0);
    }

    #[test]
    fn phi_example() {
        let w = Point2C::two(0.5, 0.0, 0.5, PI);
        let z = phi(&w).unwrap();
        assert_eq!(z.z1.radius, 0.5);
        assert!((z.second().radius - 0.25).abs() < 1e-15);
        assert!((z.second().angle - PI).abs() < 1e-15);
        assert!(matches!(
            phi_inverse(&Point2C::two(0.0, 0.0, 0.0, 0.0)),
            Err(Error::SingularEvaluation(_))
        ));
    }

    #[test]
    fn phi_round_trip_and_image() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for i in 0..10_000 {
            let w = random_dstar_d(&mut rng);
            assert!(Domain::PuncturedBidisc.contains(&w).unwrap());
            let z = phi(&w).unwrap();
            assert!(Domain::HartogsTriangle.contains(&z).unwrap());
            // |det Phi'(w)| = |w1|
            assert!(
                (phi_jacobian_det(&w).norm() - w.z1.radius).abs()
                    <= 4.0 * f64::EPSILON * w.z1.radius
            );
            if i < 100 {
                let back = phi_inverse(&z).unwrap();
                let (a1, a2) = back.to_rect();
                let (b1, b2) = w.to_rect();
                assert!((a1 - b1).norm() < 1e-14);
                assert!((a2.unwrap() - b2.unwrap()).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        // det of the complex Jacobian of (w1, w1 w2) by central differences.
        let w1 = Complex64::new(0.3, 0.2);
        let w2 = Complex64::new(-0.4, 0.1);
        let h = 1e-6;
        let f = |a: Complex64, b: Complex64| (a, a * b);
        let d1 = |a: Complex64, b: Complex64| {
            let (p1, p2) = f(a + h, b);
            let (m1, m2) = f(a - h, b);
            ((p1 - m1) / (2.0 * h), (p2 - m2) / (2.0 * h))
        };
        let d2 = |a: Complex64, b: Complex64| {
            let (p1, p2) = f(a, b + h);
            let (m1, m2) = f(a, b - h);
            ((p1 - m1) / (2.0 * h), (p2 - m2) / (2.0 * h))
        };
        let (j11, j21) = d1(w1, w2);
        let (j12, j22) = d2(w1, w2);
        let det = j11 * j22 - j12 * j21;
        assert!((det - w1).norm() < 1e-9);
    }

    #[test]
    fn delta1_comparable_to_norm_on_hartogs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let r1: f64 = rng.gen_range(1e-9..1.0);
            let r2 = r1 * rng.gen_range(0.0..1.0);
            let z = Point2C::two(r1, rng.gen_range(0.0..TAU), r2, rng.gen_range(0.0..TAU));
            let d = z.delta1();
            assert!(z.norm() / 2f64.sqrt() <= d * (1.0 + 1e-15));
            assert!(d <= z.norm());
        }
    }

    #[test]
    fn power_weights_are_reciprocal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let beta: f64 = rng.gen_range(-6.0..6.0);
            let z = Point2C::two(rng.gen_range(1e-3..1.0), 0.0, 0.0, 0.0);
            let prod = Weight::PowerDelta1(beta).at(&z).unwrap()
                * Weight::PowerDelta1(-beta).at(&z).unwrap();
            assert!((prod - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn polar_rect_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let p = Polar::from_complex(c);
            assert!(p.angle >= 0.0 && p.angle < TAU);
            assert!((p.to_complex() - c).norm() <= 4.0 * f64::EPSILON * c.norm().max(1.0));
        }
    }
}
