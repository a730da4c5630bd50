use std::sync::Arc;

use hankel_lab::bda::{bda_value, m_r, BdaProblem};
use hankel_lab::bergman::{KernelSeries, SymbolField};
use hankel_lab::carleson::{carleson_sup, polar_grid, DiscMeasure};
use hankel_lab::geometry::{beta_metric, mobius, BergmanDisc, DiscParam, Lattice, PartitionOfUnity};
use hankel_lab::lab::Config;
use hankel_lab::quadrature::{lq_mean, DiscRule};
use hankel_lab::weights::{ap_constant, classify, weight_w, RadialWeight};
use hankel_lab::Complex64;
use proptest::prelude::*;

fn point(max: f64) -> impl Strategy<Value = Complex64> {
    (0.0..max, 0.0..std::f64::consts::TAU).prop_map(|(t, a)| Complex64::from_polar(t, a))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tails_are_nonincreasing_and_vanish(alpha in -0.9f64..3.0, a in 0.0f64..0.99, b in 0.0f64..0.99) {
        let w = RadialWeight::power(alpha);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(w.eval(lo) >= 0.0);
        prop_assert!(w.tail(lo).unwrap() >= w.tail(hi).unwrap() - 1e-12);
        // (1 − r)^{1+α} decay: slow for α near −1, but strictly toward 0
        let near = w.tail(0.999999).unwrap();
        prop_assert!(near > 0.0 && near < w.tail(0.99).unwrap() && near < 0.2);
    }

    #[test]
    fn moments_decrease(alpha in -0.5f64..3.0, gamma in -1.0f64..2.0, x in 0.5f64..20.0) {
        for w in [RadialWeight::power(alpha), RadialWeight::power_log(alpha, gamma)] {
            prop_assert!(w.moment(x + 0.5).unwrap() < w.moment(x).unwrap());
        }
    }

    #[test]
    fn class_report_is_consistent(alpha in -0.9f64..4.0, gamma in -1.0f64..1.0) {
        for w in [RadialWeight::power(alpha), RadialWeight::power_log(alpha, gamma)] {
            let cls = classify(&w, 20).unwrap();
            if cls.in_r {
                prop_assert!(cls.in_dhat && cls.in_dcheck);
            }
            if cls.in_dhat {
                prop_assert!(cls.beta > 0.0);
            }
        }
    }

    #[test]
    fn one_weight_ap_constant_is_one(alpha in -0.9f64..3.0, p in 1.1f64..6.0) {
        let w = RadialWeight::power(alpha);
        prop_assert!((ap_constant(&w, &w, p).unwrap().value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mixed_weight_reduces_when_v_equals_eta(alpha in -0.5f64..2.0, q in 1.1f64..2.0, dp in 0.1f64..3.0, r in 0.0f64..0.99) {
        let v = RadialWeight::power(alpha);
        let w = weight_w(&v, &v, q + dp, q).unwrap();
        prop_assert!((w.eval(r) - v.eval(r)).abs() <= 1e-10 * v.eval(r).max(1.0));
    }

    #[test]
    fn euclidean_realization_matches_membership(z in point(0.95), r in 0.1f64..2.5, w in point(0.999)) {
        let d = BergmanDisc::new(z, r).unwrap();
        prop_assert!(d.euclid_center.norm() + d.euclid_radius < 1.0);
        let margin = ((w - d.euclid_center).norm() - d.euclid_radius).abs();
        if margin > 1e-9 {
            prop_assert_eq!(beta_metric(z, w) < r, (w - d.euclid_center).norm() < d.euclid_radius);
        }
    }

    #[test]
    fn bergman_metric_is_mobius_invariant(a in point(0.9), z in point(0.9), w in point(0.9)) {
        let lhs = beta_metric(mobius(a, z), mobius(a, w));
        let rhs = beta_metric(z, w);
        prop_assert!((lhs - rhs).abs() <= 1e-8 * rhs.max(1.0));
    }

    #[test]
    fn disc_rules_carry_normalized_area(c in point(0.5), rad in 0.01f64..0.49, nr in 2usize..40, na in 3usize..80) {
        let rule = DiscRule::polar(c, rad, nr, na);
        prop_assert!((rule.total_weight() - rad * rad).abs() <= 1e-12 * rad * rad);
    }

    #[test]
    fn power_means_increase_with_q(z in point(0.9), r in 0.2f64..2.0, q1 in 0.5f64..4.0, dq in 0.0f64..3.0) {
        let d = BergmanDisc::new(z, r).unwrap();
        let f = |w: Complex64| w.conj() - Complex64::new(0.3, 0.1) * w * w;
        let a = lq_mean(f, &d, q1, None).unwrap();
        let b = lq_mean(f, &d, q1 + dq, None).unwrap();
        prop_assert!(a <= b * (1.0 + 1e-10));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kernel_is_hermitian(alpha in 0.0f64..3.0, z in point(0.9), zeta in point(0.9)) {
        let k = KernelSeries::new(RadialWeight::power(alpha), 400).unwrap();
        let a = k.eval(z, zeta).unwrap();
        let b = k.eval(zeta, z).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-12 * a.norm());
        let c0 = k.eval(z, Complex64::new(0.0, 0.0)).unwrap();
        prop_assert!((c0.re - k.coeff(0)).abs() < 1e-14 && c0.im.abs() < 1e-14);
    }

    #[test]
    fn bda_value_is_nonnegative_homogeneous_and_below_mean(z in point(0.9), r in 0.3f64..2.0, q in 1.2f64..4.0, c in 0.1f64..5.0) {
        let f = SymbolField::zbar();
        let base = bda_value(&BdaProblem::new(f.clone(), z, r, q).unwrap().with_degree(4)).unwrap().value;
        let scaled = bda_value(
            &BdaProblem::new(f.scaled(Complex64::new(0.0, c)), z, r, q).unwrap().with_degree(4),
        )
        .unwrap()
        .value;
        prop_assert!(base >= 0.0);
        prop_assert!((scaled - c * base).abs() <= 1e-6 * c * base.max(1e-12));
        prop_assert!(m_r(&f, z, r, q).unwrap() >= base * (1.0 - 1e-9));
    }

    #[test]
    fn carleson_sup_is_homogeneous(gamma in 0.0f64..2.0, c in 0.1f64..10.0) {
        let w0 = RadialWeight::power(0.0);
        let mu = DiscMeasure::gap_power(gamma).unwrap();
        let grid = polar_grid(0.9, 4, 3);
        let a = carleson_sup(&mu, &w0, 2.0, 2.0, 1.0, DiscParam::Bergman, &grid).unwrap().sup;
        let b = carleson_sup(&mu.scaled(c).unwrap(), &w0, 2.0, 2.0, 1.0, DiscParam::Bergman, &grid).unwrap().sup;
        prop_assert!((b - c * a).abs() <= 1e-9 * c * a);
    }

    #[test]
    fn config_overrides_win(p in 1.1f64..9.0, seed in any::<u64>()) {
        let mut cfg = Config::parse_str("p = 2\nseed = 1\n", None).unwrap();
        cfg.apply_override(&format!("p={p}")).unwrap();
        cfg.apply_override(&format!("seed = {seed}")).unwrap();
        prop_assert_eq!(cfg.get("p").unwrap().parse::<f64>().unwrap(), p);
        prop_assert_eq!(cfg.get("seed").unwrap().parse::<u64>().unwrap(), seed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn lattices_are_separated_and_partitions_sum_to_one(r in 0.5f64..2.0, seed in 0u64..1000, z in point(0.8)) {
        let lat = Arc::new(Lattice::generate(r, 0.85, seed).unwrap());
        for (i, a) in lat.points.iter().enumerate() {
            for b in &lat.points[i + 1..] {
                prop_assert!(beta_metric(*a, *b) >= r / 2.0 - 1e-12);
            }
        }
        let pou = PartitionOfUnity::new(Arc::clone(&lat), 2.0).unwrap();
        let total: f64 = pou.eval(z).unwrap().iter().map(|t| t.phi).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }
}
