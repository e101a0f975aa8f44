mod common;

use common::{depth2, sofic, weights};
use proptest::prelude::*;
use thermoshift::factor::FactorMap;
use thermoshift::gibbs::build_nu;
use thermoshift::numeric::log_sum_exp;
use thermoshift::potential::subadditivity_defect;
use thermoshift::pressure::log_partition_series;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fibers_partition_the_domain(s in sofic(4)) {
        let fm = FactorMap::from_sofic(&s).unwrap();
        for n in 1..=6 {
            let total: usize = fm
                .codomain()
                .enumerate_words(n, None)
                .unwrap()
                .iter()
                .map(|v| fm.preimage_words(v).unwrap().len())
                .sum();
            prop_assert_eq!(total as u128, fm.domain().count_words(n).unwrap());
        }
    }

    #[test]
    fn pushforward_weight_sums_fibers(s in sofic(4), raw in weights()) {
        let fm = FactorMap::from_sofic(&s).unwrap();
        let f = depth2(fm.domain(), &raw);
        let g = fm.pushforward_weight(f.clone());
        for n in 1..=5 {
            for v in fm.codomain().enumerate_words(n, None).unwrap() {
                let fiber: Vec<f64> = fm
                    .preimage_words(&v)
                    .unwrap()
                    .iter()
                    .map(|u| f.eval(fm.domain(), u.symbols()))
                    .collect();
                let lhs = g.eval(fm.codomain(), v.symbols());
                prop_assert!((lhs - log_sum_exp(&fiber)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn pushforward_measure_keeps_mass(s in sofic(4), raw in weights()) {
        let fm = FactorMap::from_sofic(&s).unwrap();
        let f = depth2(fm.domain(), &raw);
        let nu = build_nu(&f, fm.domain(), 6).unwrap();
        let pushed = fm.pushforward_measure(&nu).unwrap();
        prop_assert!((pushed.total_mass() - 1.0).abs() < 1e-12);
        for k in 1..6 {
            let a = pushed.marginal(k).unwrap();
            let b = fm.pushforward_measure(&nu.marginal(k).unwrap()).unwrap();
            prop_assert!(a.l1_distance(&b).unwrap() < 1e-12);
        }
    }

    /// For locally constant `F`, `Z_n(G) = Z_n(F)` (both inequalities, `M = 1`),
    /// and `G` keeps a finite sub-additivity defect.
    #[test]
    fn partition_sums_agree_across_the_map(s in sofic(4), raw in weights()) {
        let fm = FactorMap::from_sofic(&s).unwrap();
        let f = depth2(fm.domain(), &raw);
        let g = fm.pushforward_weight(f.clone());
        let zf = log_partition_series(&f, fm.domain(), 10).unwrap();
        let zg = log_partition_series(&g, fm.codomain(), 10).unwrap();
        for (a, b) in zf.iter().zip(&zg) {
            prop_assert!(*b <= *a + 1e-9 && *a <= *b + 1e-9);
        }
        let d = subadditivity_defect(&g, fm.codomain(), 6).unwrap();
        prop_assert!(d.c_hat.0.is_finite());
    }
}
