use hartogs::bergman::{project, ProjectInput, ProjectionSpec};
use hartogs::exact::{exact_complex, exact_real, int, rat, to_c64};
use hartogs::quadrature::{
    inner_product_exact, integrate_numeric, ConjProduct, MonomialTerm, QuadratureSpec, TermSum,
};
use hartogs::series::BellDirection;
use hartogs::{BiIndex, Domain, ExactSeries, Weight};
use proptest::prelude::*;

const H: Domain = Domain::HartogsTriangle;

fn hartogs_index() -> impl Strategy<Value = (i64, i64)> {
    (0i64..5).prop_flat_map(|n| (-(n + 1)..6, Just(n)))
}

fn coeff() -> impl Strategy<Value = (i64, i64)> {
    (-9i64..10, -9i64..10)
}

fn monomial((m, n): (i64, i64), (re, im): (i64, i64)) -> TermSum {
    TermSum::single(MonomialTerm::monomial(
        m,
        n,
        exact_complex(int(re), int(im)),
    ))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_and_numeric_agree(i in hartogs_index(), j in hartogs_index(), a in coeff(), b in coeff()) {
        let f = monomial(i, a);
        let g = monomial(j, b);
        let exact = inner_product_exact(&f, &g, H).unwrap().to_c64();
        let r = integrate_numeric(&ConjProduct { f: &f, g: &g }, H, &Weight::unit(), &QuadratureSpec::default(), 1e-10).unwrap();
        prop_assert!((r.value - exact).norm() <= 1e-8 * (1.0 + exact.norm()));
    }

    #[test]
    fn inner_product_is_hermitian(i in hartogs_index(), j in hartogs_index(), a in coeff(), b in coeff()) {
        let f = monomial(i, a);
        let g = monomial(j, b);
        let fg = inner_product_exact(&f, &g, H).unwrap();
        let gf = inner_product_exact(&g, &f, H).unwrap();
        prop_assert_eq!(fg.coeff.clone(), gf.coeff.conj());
        let ff = inner_product_exact(&f, &f, H).unwrap();
        prop_assert!(ff.coeff.im == int(0) && ff.coeff.re >= int(0));
    }

    #[test]
    fn bell_transform_round_trips(terms in prop::collection::vec((hartogs_index(), coeff()), 1..6)) {
        let mut s = ExactSeries::new(H);
        for ((m, n), (re, im)) in terms {
            s.add_term(BiIndex::new(m, n), exact_complex(int(re), int(im))).unwrap();
        }
        let there = s.bell_transform(BellDirection::HartogsToBidisc).unwrap();
        prop_assert_eq!(there.domain(), Domain::PuncturedBidisc);
        let back = there.bell_transform(BellDirection::BidiscToHartogs).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn projection_fixes_holomorphic_polynomials(terms in prop::collection::vec((hartogs_index(), coeff()), 1..6)) {
        let mut s = ExactSeries::new(H);
        for ((m, n), (re, im)) in terms {
            s.add_term(BiIndex::new(m, n), exact_complex(int(re), int(im))).unwrap();
        }
        let f = TermSum::from_series(&s).unwrap();
        let p = project(ProjectInput::Symbolic(&f), H, &ProjectionSpec::default()).unwrap();
        prop_assert_eq!(p.exact.unwrap(), s);
    }

    #[test]
    fn series_text_round_trips(m in -5i64..6, n in 0i64..5, num in -50i64..50, den in 1i64..50) {
        prop_assume!(m + n >= -1);
        let s = ExactSeries::monomial(H, m, n, exact_real(rat(num, den))).unwrap();
        let back = ExactSeries::from_text(&s.to_text()).unwrap();
        prop_assert_eq!(back.get(BiIndex::new(m, n)), s.get(BiIndex::new(m, n)));
        prop_assert!((to_c64(&s.get(BiIndex::new(m, n))).re - num as f64 / den as f64).abs() < 1e-15);
    }
}
