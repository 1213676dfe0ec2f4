use proptest::prelude::*;
use varalg_core::nonlin::{catalog_make, probe_hypotheses, CatalogParams, Nonlinearity, Verdict};
use varalg_core::oracle::reference_primitive;

fn catalog() -> Vec<(&'static str, Nonlinearity)> {
    let base = CatalogParams::with_n(2);
    vec![
        ("ex37_sqrt", catalog_make("ex37_sqrt", &base).unwrap()),
        ("ex41_log", catalog_make("ex41_log", &base).unwrap()),
        ("ex42_logistic_log", catalog_make("ex42_logistic_log", &base).unwrap()),
        ("rational_sq", catalog_make("rational_sq", &base).unwrap()),
        ("power", catalog_make("power", &base.clone().number("q", 0.5)).unwrap()),
        ("power_pos", catalog_make("power", &base.clone().number("q", 0.3).number("positive_part", 1.0)).unwrap()),
        ("custom_expr", catalog_make("custom_expr", &base.text("expr", "s/(1+abs(s))")).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn closed_form_matches_quadrature(t in -10.0..10.0f64) {
        for (name, nl) in catalog() {
            for f in nl.components().iter().filter(|f| f.has_closed_primitive()) {
                let closed = f.primitive_value(t).unwrap();
                let quad = f.integrate(0.0, t).unwrap();
                prop_assert!((closed - quad).abs() < 1e-8, "{name} at {t}: {closed} vs {quad}");
            }
        }
    }

    #[test]
    fn primitive_is_additive(t1 in -10.0..10.0f64, t in -10.0..10.0f64) {
        for (name, nl) in catalog() {
            for f in nl.components() {
                let direct = f.primitive_value(t).unwrap();
                let chained = f.primitive_value(t1).unwrap() + f.integrate(t1, t).unwrap();
                prop_assert!((direct - chained).abs() < 1e-9, "{name}: {direct} vs {chained}");
            }
        }
    }

    #[test]
    fn oracle_quadrature_agrees(t in -10.0..10.0f64) {
        for (name, nl) in catalog() {
            for f in nl.components() {
                let main = f.primitive_value(t).unwrap();
                let reference = reference_primitive(f, t);
                prop_assert!((main - reference).abs() < 1e-8, "{name} at {t}: {main} vs {reference}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn power_probe_fits_exponent(q in 0.1..0.9f64) {
        let nl = catalog_make("power", &CatalogParams::with_n(1).number("q", q)).unwrap();
        let v = probe_hypotheses(&nl, 1.0);
        prop_assert_eq!(v.h1.verdict, Verdict::Pass);
        prop_assert!((v.h1_star.q - q).abs() <= 0.05, "fitted {} for {}", v.h1_star.q, q);
    }
}
