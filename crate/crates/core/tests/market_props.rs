use proptest::collection::vec;
use proptest::prelude::*;

use prophet_core::market::{
    prophet_value, resolve_price, run_market, surrogate_picks, surrogate_picks_above,
};
use prophet_core::{DistributionSpec, Instance, PricePolicy};

fn instance(n: usize, k: usize) -> Instance {
    Instance::iid(DistributionSpec::uniform(0.0, 1.0).unwrap(), n, k).unwrap()
}

/// Values and samples of equal length plus a capacity.
fn market() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, usize)> {
    (1usize..16).prop_flat_map(|n| {
        (vec(0.0f64..1.0, n), vec(0.0f64..1.0, n), 1..=n)
    })
}

proptest! {
    #[test]
    fn raising_the_price_never_adds_picks(
        (xs, _, k) in market(), p in 0.0f64..1.0, bump in 0.0f64..0.5
    ) {
        let inst = instance(xs.len(), k);
        let low = run_market(&inst, p, &xs);
        let high = run_market(&inst, p + bump, &xs);
        prop_assert!(high.picks <= low.picks);
    }

    #[test]
    fn alg_never_beats_prophet((xs, ys, k) in market(), r in 1usize..16) {
        let inst = instance(xs.len(), k);
        let r = r.min(xs.len());
        let price = resolve_price(&PricePolicy::SampleOrderStatistic { r }, &ys, &inst).unwrap();
        let out = run_market(&inst, price, &xs);
        prop_assert!(out.picks <= k);
        prop_assert_eq!(out.picks, out.accepted_indices.len());
        prop_assert!(out.alg_value <= out.prophet_value + 1e-12);
        prop_assert!(out.accepted_indices.windows(2).all(|w| w[0] < w[1]));
        for &i in &out.accepted_indices {
            prop_assert!(xs[i] > price);
        }
    }

    #[test]
    fn alg_collects_at_least_the_surrogate((xs, ys, k) in market(), r in 1usize..16) {
        let inst = instance(xs.len(), k);
        let r = r.min(xs.len());
        let price = resolve_price(&PricePolicy::SampleOrderStatistic { r }, &ys, &inst).unwrap();
        let out = run_market(&inst, price, &xs);
        let surrogate = surrogate_picks(&xs, &ys, r, k);
        prop_assert!(surrogate.len() <= k);
        prop_assert_eq!(surrogate.len(), out.picks);
        prop_assert!(out.alg_value >= surrogate.iter().sum::<f64>() - 1e-12);
    }

    #[test]
    fn surrogate_counts_bounded((xs, ys, k) in market(), r in 1usize..16, a in 0.0f64..1.0) {
        let r = r.min(xs.len());
        let all = surrogate_picks_above(&xs, &ys, r, k, 0.0);
        prop_assert_eq!(all, surrogate_picks(&xs, &ys, r, k).len());
        let some = surrogate_picks_above(&xs, &ys, r, k, a);
        prop_assert!(some <= all && all <= k);
    }

    #[test]
    fn lower_order_statistic_posts_higher_price((_, ys, _) in market(), r1 in 1usize..16, r2 in 1usize..16) {
        let n = ys.len();
        let inst = instance(n, 1);
        let (a, b) = (r1.min(r2).min(n), r1.max(r2).min(n));
        let pa = resolve_price(&PricePolicy::SampleOrderStatistic { r: a }, &ys, &inst).unwrap();
        let pb = resolve_price(&PricePolicy::SampleOrderStatistic { r: b }, &ys, &inst).unwrap();
        prop_assert!(pa >= pb);
    }

    #[test]
    fn zero_price_full_capacity_is_prophet(xs in vec(0.0f64..1.0, 1..16)) {
        let inst = instance(xs.len(), xs.len());
        let out = run_market(&inst, 0.0, &xs);
        prop_assert_eq!(out.alg_value, out.prophet_value);
        prop_assert_eq!(out.prophet_value, xs.iter().sum::<f64>());
    }

    #[test]
    fn prophet_is_top_k_sum(xs in vec(0.0f64..1.0, 1..16), k in 1usize..16) {
        let k = k.min(xs.len());
        let mut sorted = xs.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let expected: f64 = sorted[..k].iter().sum();
        prop_assert!((prophet_value(&xs, k) - expected).abs() < 1e-12);
    }

    #[test]
    fn policy_json_round_trip(r in 1usize..1000, p in 0.0f64..10.0, q in 0.01f64..10.0) {
        for policy in [
            PricePolicy::SampleOrderStatistic { r },
            PricePolicy::FixedPrice { p },
            PricePolicy::ExpectedDemandPrice { q },
        ] {
            prop_assert_eq!(PricePolicy::from_json(&policy.to_json()).unwrap(), policy);
        }
    }

    #[test]
    fn expected_demand_price_hits_target(n in 2usize..30, frac in 0.05f64..0.95) {
        let inst = Instance::new(
            (1..=n).map(|i| DistributionSpec::exponential(i as f64).unwrap()).collect(),
            1,
        ).unwrap();
        let q = frac * n as f64;
        let price = resolve_price(&PricePolicy::ExpectedDemandPrice { q }, &vec![0.0; n], &inst).unwrap();
        let demand: f64 = inst.dists().iter().map(|d| d.sf(price)).sum();
        prop_assert!((demand - q).abs() < 1e-9, "demand {} vs {}", demand, q);
    }
}

#[test]
fn documented_allocation_examples() {
    let inst = instance(4, 2);
    let out = run_market(&inst, 0.5, &[0.6, 0.4, 0.7, 0.9]);
    assert_eq!(out.accepted_indices, vec![0, 2]);
    assert!((out.alg_value - 1.3).abs() < 1e-15);
    assert!((out.prophet_value - 1.6).abs() < 1e-15);
    assert_eq!(prophet_value(&[5.0, 1.0, 1.0], 1), 5.0);
    let p = resolve_price(&PricePolicy::SampleOrderStatistic { r: 2 }, &[0.9, 0.2, 0.5], &instance(3, 1)).unwrap();
    assert_eq!(p, 0.5);
    let half = resolve_price(&PricePolicy::ExpectedDemandPrice { q: 5.0 }, &[0.0; 10], &instance(10, 1)).unwrap();
    assert!((half - 0.5).abs() < 1e-12);
    assert_eq!(surrogate_picks_above(&[3.0, 2.0, 1.0], &[0.5, 0.4, 0.3], 1, 1, 2.0), 0);
    assert_eq!(surrogate_picks_above(&[3.0, 2.0, 1.0], &[5.0, 0.4, 0.3], 1, 1, 0.0), 0);
}
