use proptest::prelude::*;

use prophet_core::market::surrogate_picks;
use prophet_core::oracle::{
    all_scenarios, check_half_lemma, check_main_inequality, verify_lemmas, Dyadic, RankedScenario,
    ScenarioSpace, LEMMA_CASE_FORMULA, LEMMA_CLAIM, LEMMA_HALF, LEMMA_INBETWEEN, LEMMA_MAIN,
};
use prophet_core::Error;

/// Float values for one split: rank `r` has value `2n + 1 - r`.
struct Split {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Split {
    fn order_stat(values: &[f64], i: usize) -> f64 {
        match i {
            0 => f64::INFINITY,
            i if i <= values.len() => values[i - 1],
            _ => 0.0,
        }
    }
    fn x(&self, i: usize) -> f64 {
        Self::order_stat(&self.xs, i)
    }
    fn y(&self, i: usize) -> f64 {
        Self::order_stat(&self.ys, i)
    }
}

fn splits(pairs: &[(usize, usize)]) -> Vec<Split> {
    let n = pairs.len();
    let value = |r: usize| (2 * n + 1 - r) as f64;
    (0u32..1 << n)
        .map(|mask| {
            let (mut xs, mut ys) = (Vec::new(), Vec::new());
            for (p, &(a, b)) in pairs.iter().enumerate() {
                let (x, y) = if mask >> p & 1 == 1 { (a, b) } else { (b, a) };
                xs.push(value(x));
                ys.push(value(y));
            }
            xs.sort_by(|a, b| b.total_cmp(a));
            ys.sort_by(|a, b| b.total_cmp(a));
            Split { xs, ys }
        })
        .collect()
}

fn frac(splits: &[Split], pred: impl Fn(&Split) -> bool) -> Dyadic {
    Dyadic::new(splits.iter().filter(|s| pred(s)).count() as u64, splits.len() as u64)
}

fn space(pairs: &[(usize, usize)]) -> ScenarioSpace {
    RankedScenario::from_pairs(pairs).unwrap().space().unwrap()
}

#[test]
fn scenario_counts_are_double_factorials() {
    let counts: Vec<usize> = (1..=6).map(|n| all_scenarios(n).unwrap().len()).collect();
    assert_eq!(counts, vec![1, 3, 15, 105, 945, 10395]);
    assert!(matches!(all_scenarios(0), Err(Error::Resource(_))));
    assert!(matches!(all_scenarios(7), Err(Error::Resource(_))));
}

#[test]
fn every_value_is_an_x_half_the_time() {
    for n in 1..=5 {
        for s in all_scenarios(n).unwrap() {
            let sp = s.space().unwrap();
            for rank in 1..=2 * n {
                assert_eq!(sp.prob(|a| a.is_x(rank)), Dyadic::new(1, 2));
            }
        }
    }
}

#[test]
fn comparison_probabilities_are_symmetric_and_counted() {
    for n in 1..=5 {
        for s in all_scenarios(n).unwrap() {
            let sp = s.space().unwrap();
            for j in 1..=2 * n {
                // Pr(X^i > Y^{j+1-i}) and Pr(X^{j+1-i} > Y^i) swap the roles of X and Y
                for i in 1..=j.min(n) {
                    let m = j + 1 - i;
                    if m > n {
                        continue;
                    }
                    let a = sp.prob(|a| a.x_beats_y(i, m));
                    let b = sp.prob(|a| a.y_beats_x(m, i));
                    assert_eq!(
                        Dyadic::new(a.numerator + b.numerator, a.denominator),
                        Dyadic::new(1, 1),
                        "pairs {:?} i={i} m={m}",
                        s.pairs()
                    );
                }
                // ranks 1..=j hold j/2 X-values on average
                let e = sp.expectation(|a| (1..=j).filter(|&r| a.is_x(r)).count() as u64);
                assert_eq!(e, Dyadic::new(j as u64, 2));
            }
        }
    }
}

#[test]
fn enumerated_probabilities_match_float_splits() {
    for n in 1..=4 {
        for s in all_scenarios(n).unwrap() {
            let pairs = s.pairs();
            let sp = s.space().unwrap();
            let fl = splits(&pairs);
            for i in 0..=n + 1 {
                for j in 0..=n + 1 {
                    assert_eq!(sp.prob(|a| a.x_beats_y(i, j)), frac(&fl, |f| f.x(i) > f.y(j)));
                    for l in 0..=n + 1 {
                        assert_eq!(
                            sp.prob(|a| a.y_between(i, j, l)),
                            frac(&fl, |f| f.x(i) > f.y(j) && f.y(j) > f.x(l)),
                            "pairs {pairs:?} i={i} j={j} l={l}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn surrogate_counts_match_market_module() {
    for n in 1..=4 {
        for s in all_scenarios(n).unwrap() {
            let pairs = s.pairs();
            let sp = s.space().unwrap();
            let fl = splits(&pairs);
            for (a, f) in sp.assignments().iter().zip(&fl) {
                for k in 1..=n {
                    let picked = surrogate_picks(&f.xs, &f.ys, k, k);
                    for j in 1..=2 * n {
                        let threshold = (2 * n + 1 - j) as f64;
                        let want = picked.iter().filter(|&&v| v >= threshold).count();
                        assert_eq!(a.surrogate_picks_at_or_above(k, k, j), want);
                    }
                }
            }
        }
    }
}

#[test]
fn exhaustive_sweep_finds_no_violations() {
    let summary = verify_lemmas(5, 0).unwrap();
    assert_eq!(summary.scenarios_checked, 1069);
    assert!(summary.violations.is_empty(), "{:?}", summary.violations.first());
    for lemma in [LEMMA_HALF, LEMMA_INBETWEEN, LEMMA_CLAIM, LEMMA_CASE_FORMULA, LEMMA_MAIN] {
        assert!(summary.tuples_checked_per_lemma[lemma] > 0, "{lemma}");
    }
    assert_eq!(verify_lemmas(3, 1).unwrap(), verify_lemmas(3, 4).unwrap());
    assert_eq!(verify_lemmas(1, 0).unwrap().scenarios_checked, 1);
    assert!(matches!(verify_lemmas(7, 0), Err(Error::Resource(_))));
}

#[test]
fn checks_reject_out_of_domain_indices() {
    let sp = space(&[(1, 2), (3, 4)]);
    assert!(matches!(check_half_lemma(&sp, 0, 1, 1), Err(Error::Domain(_))));
    assert!(matches!(check_half_lemma(&sp, 1, 3, 2), Err(Error::Domain(_))));
    assert!(matches!(check_main_inequality(&sp, 3, 1), Err(Error::Domain(_))));
    assert!(matches!(check_main_inequality(&sp, 1, 5), Err(Error::Domain(_))));
    assert!(matches!(RankedScenario::from_pairs(&[(1, 1)]), Err(Error::Domain(_))));
    assert!(matches!(RankedScenario::from_pairs(&[(1, 3)]), Err(Error::Domain(_))));
    assert!(matches!(RankedScenario::from_json(r#"{"n":2,"matching":[[1,2]]}"#), Err(Error::Parse(_))));
}

fn matching(max_pairs: usize) -> impl Strategy<Value = Vec<(usize, usize)>> {
    (1..=max_pairs)
        .prop_flat_map(|n| Just((1..=2 * n).collect::<Vec<_>>()).prop_shuffle())
        .prop_map(|ranks| ranks.chunks(2).map(|c| (c[0], c[1])).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn main_inequality_on_random_matchings(pairs in matching(8)) {
        let sp = space(&pairs);
        let n = pairs.len();
        for k in 1..=n {
            for j in 1..=2 * n {
                let c = check_main_inequality(&sp, k, j).unwrap();
                prop_assert!(c.holds, "pairs {:?} k={} j={}: {} < {}", pairs, k, j, c.lhs, c.rhs);
            }
        }
    }

    #[test]
    fn half_lemma_on_random_matchings(pairs in matching(8)) {
        let sp = space(&pairs);
        let n = pairs.len();
        for k in 1..=n {
            for j in 1..=2 * n {
                for i in (j + 1).saturating_sub(k).max(1)..=j {
                    let c = check_half_lemma(&sp, i, j, k).unwrap();
                    prop_assert!(c.holds, "pairs {:?} i={} j={} k={}", pairs, i, j, k);
                }
            }
        }
    }

    #[test]
    fn scenario_json_round_trip(pairs in matching(10)) {
        let s = RankedScenario::from_pairs(&pairs).unwrap();
        prop_assert_eq!(RankedScenario::from_json(&s.to_json()).unwrap(), s);
    }
}
