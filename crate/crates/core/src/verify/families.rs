//! Seeded random test families built from monomial atoms, so that exact
//! ground truth stays available.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::exact::{exact_complex, int, rat, Cutoff};
use crate::geometry::Domain;
use crate::quadrature::{MonomialTerm, TermSum};
use crate::series::{BiIndex, ExactSeries};

fn small_rational(rng: &mut ChaCha8Rng) -> crate::exact::Rational {
    rat(rng.gen_range(-9..=9), rng.gen_range(1..=6))
}

/// Bounded, generally non-holomorphic functions on the Hartogs triangle:
/// sums of `r1^a r2^b e^{i k t1} e^{i l t2} chi(r1)`.
pub fn random_bounded_terms(rng: &mut ChaCha8Rng, terms: usize) -> TermSum {
    let cutoffs = [
        Cutoff::default_step(),
        Cutoff::default_smooth(),
        Cutoff::one(),
    ];
    let v = (0..terms)
        .map(|_| {
            let chi = cutoffs[rng.gen_range(0..cutoffs.len())].clone();
            let a_min = if chi.vanishes_near_zero() { -1 } else { 0 };
            let a = rng.gen_range(a_min..=3);
            let b = rng.gen_range(0..=2);
            let k = rng.gen_range(-4..=4);
            let l = rng.gen_range(0..=3);
            let c = exact_complex(small_rational(rng), small_rational(rng));
            MonomialTerm::new(int(a), int(b), k, l, c).with_profile(chi)
        })
        .collect();
    TermSum::new(v)
}

/// A polynomial with up to `terms` monomials of degree at most `degree` in
/// each variable.
pub fn random_polynomial(
    rng: &mut ChaCha8Rng,
    domain: Domain,
    degree: i64,
    terms: usize,
) -> ExactSeries {
    let mut s = ExactSeries::new(domain);
    let n_top = if domain.dim() == 1 { 0 } else { degree };
    for _ in 0..terms {
        let idx = BiIndex::new(rng.gen_range(0..=degree), rng.gen_range(0..=n_top));
        let c = exact_complex(small_rational(rng), small_rational(rng));
        s.add_term(idx, c)
            .expect("nonnegative indices are admissible");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn families_are_seeded() {
        let a = random_bounded_terms(&mut ChaCha8Rng::seed_from_u64(1), 5);
        let b = random_bounded_terms(&mut ChaCha8Rng::seed_from_u64(1), 5);
        assert_eq!(a, b);
        let p = random_polynomial(&mut ChaCha8Rng::seed_from_u64(2), Domain::Bidisc, 20, 8);
        assert!(p.iter().all(|(i, _)| i.m <= 20 && i.n <= 20));
    }

    #[test]
    fn bounded_terms_have_finite_norms() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let f = random_bounded_terms(&mut rng, 4);
            let n =
                crate::quadrature::inner_product_exact(&f, &f, Domain::HartogsTriangle).unwrap();
            assert!(n.to_f64() >= 0.0);
        }
    }
}
