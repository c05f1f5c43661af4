use gls_core::constants::{k_hr, k_s, riesz_reciprocal, ConstantKind, HardyRellichQuery, SobolevQuery};
use gls_core::gls::{build_psi_v, build_psi_w, gls_norm, GlsSpace};
use gls_core::psi::{degenerate_psi_r, make_power_psi, unit_psi, Interval};
use gls_core::quadrature::QuadratureSpec;
use gls_core::radial::{gaussian, gaussian_lp_norm, gaussian_mixture, lp_norm};
use proptest::prelude::*;

fn dims_and_p() -> impl Strategy<Value = (usize, f64)> {
    (3usize..=12).prop_flat_map(|n| (Just(n), 0.001f64..0.999).prop_map(move |(n, u)| (n, 1.0 + u * (n as f64 / 2.0 - 1.0))))
}

fn sobolev_triple() -> impl Strategy<Value = (usize, f64, f64)> {
    (2usize..=12, 0.02f64..0.98, 0.001f64..0.999).prop_map(|(n, b, u)| {
        let beta = b * n as f64;
        (n, beta, 1.0 + u * (n as f64 / beta - 1.0))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn sobolev_constant_at_beta_two_is_hardy_rellich((n, p) in dims_and_p()) {
        let a = k_s(&SobolevQuery::new(n, 2.0, p).unwrap()).unwrap();
        let b = k_hr(&HardyRellichQuery::new(n, p).unwrap());
        prop_assert!((a / b - 1.0).abs() <= 1e-10, "n={} p={}: {} vs {}", n, p, a, b);
    }

    #[test]
    fn two_gamma_routes_agree((n, beta, p) in sobolev_triple()) {
        let q = SobolevQuery::new(n, beta, p).unwrap();
        let (a, b) = (k_s(&q).unwrap(), riesz_reciprocal(&q).unwrap());
        prop_assert!(((a - b) / a).abs() <= 1e-10);
    }

    #[test]
    fn envelope_is_positive_and_finite((n, p) in dims_and_p()) {
        let kind = ConstantKind::<f64>::HardyRellich;
        let env = gls_core::constants::envelope(n, p, kind).unwrap();
        prop_assert!(env > 0.0 && env.is_finite());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn gls_norm_is_homogeneous(c in prop_oneof![-50.0f64..-0.01, 0.01f64..50.0], t in 0.2f64..3.0) {
        let q = QuadratureSpec::default();
        let f = gaussian::<f64>(4, t).unwrap();
        let g = f.scaled(c);
        let space = GlsSpace::over_domain(make_power_psi(1.0, 2.0, 0.5, 1.0).unwrap());
        let a = gls_norm(&|p| lp_norm(&f, p, &q), &space).unwrap().value;
        let b = gls_norm(&|p| lp_norm(&g, p, &q), &space).unwrap().value;
        prop_assert!((b / (c.abs() * a) - 1.0).abs() <= 1e-12, "{} vs {}", b, c.abs() * a);
    }

    #[test]
    fn degenerate_psi_picks_one_exponent(r in 1.01f64..4.99, t in 0.2f64..3.0) {
        let q = QuadratureSpec::default();
        let f = gaussian::<f64>(3, t).unwrap();
        let psi = degenerate_psi_r(r, Interval::new(1.0, 5.0).unwrap()).unwrap();
        let got = gls_norm(&|p| lp_norm(&f, p, &q), &GlsSpace::over_domain(psi)).unwrap().value;
        prop_assert!((got / gaussian_lp_norm(3, t, r) - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn refined_sup_dominates_grid(c in 0.1f64..0.9, t2 in 1.5f64..6.0) {
        let q = QuadratureSpec::default();
        let f = gaussian_mixture::<f64>(3, &[(1.0, 1.0), (-c, t2)]).unwrap();
        let res = gls_norm(&|p| lp_norm(&f, p, &q), &GlsSpace::over_domain(unit_psi(1.0, 3.0).unwrap())).unwrap();
        prop_assert!(res.samples.iter().all(|s| s.ratio <= res.value));
        prop_assert!(res.argmax_p > 1.0 && res.argmax_p < 3.0);
    }

    #[test]
    fn weighted_psis_are_constant_times_base(p in 1.001f64..2.499, beta in 0.5f64..1.5) {
        let base = make_power_psi(1.0, 5.0, 1.0, 0.5).unwrap();
        let v = build_psi_v(5, &base).unwrap();
        let k = k_hr(&HardyRellichQuery::new(5, p).unwrap());
        prop_assert!((v.eval(p).unwrap() / (k * base.eval(p).unwrap()) - 1.0).abs() <= 1e-14);
        let w = build_psi_w(5, beta, &base).unwrap();
        let p = 1.0 + (p - 1.0) / 1.5 * (5.0 / beta - 1.0) / 2.0;
        let ks = k_s(&SobolevQuery::new(5, beta, p).unwrap()).unwrap();
        prop_assert!((w.eval(p).unwrap() / (ks * base.eval(p).unwrap()) - 1.0).abs() <= 1e-14);
    }
}
