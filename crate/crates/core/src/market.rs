//! Price policies and the sequential k-unit allocation.
//!
//! The allocation is a posted price: buyers arrive in order and each one
//! whose value is strictly above the price is served while units remain.
//! A value exactly equal to the price is rejected.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Instance;

const DEMAND_BISECTION_TOL: f64 = 1e-12;
const DEMAND_BISECTION_MAX_ITER: usize = 200;

/// Rule mapping the sample vector to a single static price.
///
/// JSON form is tagged by `rule`, e.g. `{"rule": "sample_order_statistic", "r": 3}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum PricePolicy {
    /// Post the `r`-th largest sample.
    SampleOrderStatistic { r: usize },
    /// Post a deterministic price.
    FixedPrice { p: f64 },
    /// Full-information baseline: the price `T` whose expected demand
    /// `sum_i Pr(X_i > T)` equals `q`.
    ExpectedDemandPrice { q: f64 },
}

/// A policy checked against an instance, with any sample-independent price
/// already resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum PreparedPolicy {
    OrderStatistic(usize),
    Constant(f64),
}

impl PricePolicy {
    pub fn from_json(text: &str) -> Result<Self> {
        let policy: PricePolicy = serde_json::from_str(text)?;
        policy.validate()?;
        Ok(policy)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("policy serialization cannot fail")
    }

    /// Instance-independent checks.
    pub fn validate(&self) -> Result<()> {
        match *self {
            PricePolicy::SampleOrderStatistic { r } if r == 0 => {
                Err(Error::Config("order statistic r must be >= 1".into()))
            }
            PricePolicy::FixedPrice { p } if !(p.is_finite() && p >= 0.0) => {
                Err(Error::Config(format!("fixed price must be finite and >= 0, got {p}")))
            }
            PricePolicy::ExpectedDemandPrice { q } if !(q.is_finite() && q > 0.0) => {
                Err(Error::Config(format!("demand target must be finite and > 0, got {q}")))
            }
            _ => Ok(()),
        }
    }

    /// Short label used in report rows: `3`, `fixed_price=0.7`,
    /// `expected_demand_price=5`.
    pub fn label(&self) -> String {
        match *self {
            PricePolicy::SampleOrderStatistic { r } => r.to_string(),
            PricePolicy::FixedPrice { p } => format!("fixed_price={p}"),
            PricePolicy::ExpectedDemandPrice { q } => format!("expected_demand_price={q}"),
        }
    }

    pub(crate) fn prepare(&self, instance: &Instance) -> Result<PreparedPolicy> {
        self.validate()?;
        match *self {
            PricePolicy::SampleOrderStatistic { r } => {
                if r > instance.n() {
                    return Err(Error::Config(format!(
                        "order statistic r = {r} exceeds the number of buyers n = {}",
                        instance.n()
                    )));
                }
                Ok(PreparedPolicy::OrderStatistic(r))
            }
            PricePolicy::FixedPrice { p } => Ok(PreparedPolicy::Constant(p)),
            PricePolicy::ExpectedDemandPrice { q } => {
                Ok(PreparedPolicy::Constant(expected_demand_price(instance, q)?))
            }
        }
    }
}

impl PreparedPolicy {
    /// `scratch` is clobbered.
    pub(crate) fn price(&self, samples: &[f64], scratch: &mut Vec<f64>) -> f64 {
        match *self {
            PreparedPolicy::OrderStatistic(r) => {
                scratch.clear();
                scratch.extend_from_slice(samples);
                kth_largest(scratch, r)
            }
            PreparedPolicy::Constant(p) => p,
        }
    }
}

/// `r`-th largest entry (1-based). Reorders `values`.
pub(crate) fn kth_largest(values: &mut [f64], r: usize) -> f64 {
    debug_assert!(r >= 1 && r <= values.len());
    let (_, v, _) = values.select_nth_unstable_by(r - 1, |a, b| b.total_cmp(a));
    *v
}

/// Resolve `policy` to a price given the sample vector.
pub fn resolve_price(policy: &PricePolicy, samples: &[f64], instance: &Instance) -> Result<f64> {
    if samples.len() != instance.n() {
        return Err(Error::Config(format!(
            "expected {} samples, got {}",
            instance.n(),
            samples.len()
        )));
    }
    let prepared = policy.prepare(instance)?;
    Ok(prepared.price(samples, &mut Vec::with_capacity(samples.len())))
}

/// Solve `sum_i (1 - F_i(T)) = q` for `T` by bisection.
///
/// The bracket runs from the smallest support lower bound (demand `n`) to
/// the largest finite support upper bound. Unbounded supports are capped at
/// the largest `(1 - q/(2n))`-quantile, where demand is at most `q/2`.
pub fn expected_demand_price(instance: &Instance, q: f64) -> Result<f64> {
    let n = instance.n() as f64;
    if !(q > 0.0 && q < n) {
        return Err(Error::Config(format!(
            "expected demand {q} is unreachable with n = {n} buyers; need 0 < q < n"
        )));
    }
    let demand = |t: f64| -> f64 { instance.dists().iter().map(|d| d.sf(t)).sum() };

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let cap_level = 1.0 - q / (2.0 * n);
    for d in instance.dists() {
        let (s_lo, s_hi) = d.support();
        lo = lo.min(s_lo);
        let top = if s_hi.is_finite() {
            s_hi
        } else {
            d.quantile(cap_level)?
        };
        hi = hi.max(top);
    }

    for _ in 0..DEMAND_BISECTION_MAX_ITER {
        if hi - lo <= DEMAND_BISECTION_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let excess = demand(mid) - q;
        if excess == 0.0 {
            return Ok(mid);
        }
        if excess > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Result of one pass of the posted-price allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketOutcome {
    pub alg_value: f64,
    pub picks: usize,
    /// 0-based arrival indices of the served buyers.
    pub accepted_indices: Vec<usize>,
    pub prophet_value: f64,
}

/// Serve, in arrival order, every buyer whose value is strictly above
/// `price` until `instance.k()` units are gone.
pub fn run_market(instance: &Instance, price: f64, x_values: &[f64]) -> MarketOutcome {
    let k = instance.k();
    let mut accepted_indices = Vec::with_capacity(k);
    let mut alg_value = 0.0;
    for (i, &x) in x_values.iter().enumerate() {
        if accepted_indices.len() == k {
            break;
        }
        if x > price {
            alg_value += x;
            accepted_indices.push(i);
        }
    }
    MarketOutcome {
        alg_value,
        picks: accepted_indices.len(),
        accepted_indices,
        prophet_value: prophet_value(x_values, k),
    }
}

/// Allocation without bookkeeping of indices. Same summation order as
/// [`run_market`].
pub(crate) fn allocate(k: usize, price: f64, x_values: &[f64]) -> (f64, usize) {
    let mut picks = 0;
    let mut value = 0.0;
    for &x in x_values {
        if picks == k {
            break;
        }
        if x > price {
            value += x;
            picks += 1;
        }
    }
    (value, picks)
}

/// Sum of the `k` largest entries.
///
/// The chosen entries are summed in their original order, so when the
/// allocation serves exactly the top `k` buyers both totals agree to the bit.
pub fn prophet_value(x_values: &[f64], k: usize) -> f64 {
    prophet_value_with(x_values, k, &mut Vec::with_capacity(x_values.len()))
}

pub(crate) fn prophet_value_with(x_values: &[f64], k: usize, scratch: &mut Vec<f64>) -> f64 {
    let k = k.min(x_values.len());
    if k == 0 {
        return 0.0;
    }
    if k == x_values.len() {
        return x_values.iter().sum();
    }
    scratch.clear();
    scratch.extend_from_slice(x_values);
    let cutoff = kth_largest(scratch, k);
    let above = x_values.iter().filter(|&&x| x > cutoff).count();
    let mut ties_left = k - above;
    let mut total = 0.0;
    for &x in x_values {
        if x > cutoff {
            total += x;
        } else if x == cutoff && ties_left > 0 {
            total += x;
            ties_left -= 1;
        }
    }
    total
}

/// The surrogate allocation used in the half-competitiveness argument.
///
/// With price `Y^r` and `t` values above it, the surrogate keeps the
/// `min(t, k)` *lowest* values above the price. Returns those values in
/// descending order. The real allocation always collects at least their
/// sum.
pub fn surrogate_picks(x_values: &[f64], samples: &[f64], r: usize, k: usize) -> Vec<f64> {
    assert!(r >= 1 && r <= samples.len(), "r must be in 1..=n");
    let mut s = samples.to_vec();
    let price = kth_largest(&mut s, r);
    let mut above: Vec<f64> = x_values.iter().copied().filter(|&x| x > price).collect();
    above.sort_by(|a, b| b.total_cmp(a));
    let t = above.len();
    above.split_off(t - t.min(k))
}

/// Number of surrogate picks that are `>= threshold`.
pub fn surrogate_picks_above(
    x_values: &[f64],
    samples: &[f64],
    r: usize,
    k: usize,
    threshold: f64,
) -> usize {
    surrogate_picks(x_values, samples, r, k)
        .into_iter()
        .filter(|&x| x >= threshold)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DistributionSpec;

    fn uniform_instance(n: usize, k: usize) -> Instance {
        Instance::iid(DistributionSpec::uniform(0.0, 1.0).unwrap(), n, k).unwrap()
    }

    #[test]
    fn order_statistic_price() {
        let inst = uniform_instance(3, 1);
        let p = PricePolicy::SampleOrderStatistic { r: 2 };
        assert_eq!(resolve_price(&p, &[0.9, 0.2, 0.5], &inst).unwrap(), 0.5);
    }

    #[test]
    fn fixed_price_ignores_samples() {
        let inst = uniform_instance(3, 1);
        let p = PricePolicy::FixedPrice { p: 0.7 };
        assert_eq!(resolve_price(&p, &[0.1, 0.95, 0.3], &inst).unwrap(), 0.7);
    }

    #[test]
    fn expected_demand_uniform() {
        let inst = uniform_instance(10, 1);
        let p = PricePolicy::ExpectedDemandPrice { q: 5.0 };
        let t = resolve_price(&p, &[0.5; 10], &inst).unwrap();
        assert!((t - 0.5).abs() < 1e-12);
    }

    #[test]
    fn expected_demand_unbounded_support() {
        // 4 Exp(1): 4 e^{-T} = 1 => T = ln 4
        let inst = Instance::iid(DistributionSpec::exponential(1.0).unwrap(), 4, 1).unwrap();
        let t = expected_demand_price(&inst, 1.0).unwrap();
        assert!((t - 4f64.ln()).abs() < 1e-11, "{t}");
    }

    #[test]
    fn policy_configuration_errors() {
        let inst = uniform_instance(3, 1);
        let s = [0.1, 0.2, 0.3];
        for p in [
            PricePolicy::SampleOrderStatistic { r: 4 },
            PricePolicy::SampleOrderStatistic { r: 0 },
            PricePolicy::ExpectedDemandPrice { q: 3.0 },
            PricePolicy::ExpectedDemandPrice { q: 0.0 },
            PricePolicy::FixedPrice { p: -1.0 },
        ] {
            assert!(matches!(resolve_price(&p, &s, &inst), Err(Error::Config(_))), "{p:?}");
        }
        assert!(resolve_price(&PricePolicy::FixedPrice { p: 1.0 }, &s[..2], &inst).is_err());
    }

    #[test]
    fn market_serves_in_arrival_order() {
        let inst = uniform_instance(4, 2);
        let out = run_market(&inst, 0.5, &[0.6, 0.4, 0.7, 0.9]);
        assert_eq!(out.accepted_indices, vec![0, 2]);
        assert_eq!(out.picks, 2);
        assert!((out.alg_value - 1.3).abs() < 1e-15);
        assert!((out.prophet_value - 1.6).abs() < 1e-15);
    }

    #[test]
    fn market_nothing_clears_price() {
        let inst = uniform_instance(3, 2);
        let out = run_market(&inst, 1.0, &[0.2, 0.99, 0.5]);
        assert_eq!(out.picks, 0);
        assert_eq!(out.alg_value, 0.0);
    }

    #[test]
    fn market_tie_with_price_is_rejected() {
        let inst = uniform_instance(2, 2);
        let out = run_market(&inst, 0.5, &[0.5, 0.6]);
        assert_eq!(out.accepted_indices, vec![1]);
    }

    #[test]
    fn zero_price_full_capacity_matches_prophet() {
        let x = [0.3, 0.1, 0.7, 0.25, 0.9];
        let inst = uniform_instance(5, 5);
        let out = run_market(&inst, 0.0, &x);
        assert_eq!(out.alg_value, x.iter().sum::<f64>());
        assert_eq!(out.alg_value, out.prophet_value);
    }

    #[test]
    fn prophet_examples() {
        assert!((prophet_value(&[0.6, 0.4, 0.7, 0.9], 2) - 1.6).abs() < 1e-15);
        assert_eq!(prophet_value(&[5.0, 1.0, 1.0], 1), 5.0);
        assert_eq!(prophet_value(&[1.0, 1.0, 1.0], 2), 2.0);
        assert_eq!(prophet_value(&[0.5, 0.25], 2), 0.75);
    }

    #[test]
    fn surrogate_examples() {
        let x = [3.0, 2.0, 1.0];
        let y = [0.5, 0.4, 0.3];
        assert_eq!(surrogate_picks(&x, &y, 1, 1), vec![1.0]);
        assert_eq!(surrogate_picks_above(&x, &y, 1, 1, 2.0), 0);
        assert_eq!(surrogate_picks_above(&x, &y, 1, 2, 0.0), 2);
        assert_eq!(surrogate_picks_above(&x, &y, 1, 5, 0.0), 3);
        assert_eq!(surrogate_picks_above(&[0.1, 0.2, 0.3], &y, 1, 2, 0.0), 0);
    }

    #[test]
    fn policy_json_round_trip() {
        let p = PricePolicy::from_json(r#"{"rule": "sample_order_statistic", "r": 3}"#).unwrap();
        assert_eq!(p, PricePolicy::SampleOrderStatistic { r: 3 });
        let q = PricePolicy::from_json(&PricePolicy::ExpectedDemandPrice { q: 2.5 }.to_json());
        assert_eq!(q.unwrap(), PricePolicy::ExpectedDemandPrice { q: 2.5 });
        assert!(PricePolicy::from_json(r#"{"rule": "fixed_price", "p": -2}"#).is_err());
        assert!(PricePolicy::from_json(r#"{"rule": "sample_order_statistic", "r": 0}"#).is_err());
        assert!(PricePolicy::from_json(r#"{"rule": "dynamic"}"#).is_err());
    }

    #[test]
    fn labels() {
        assert_eq!(PricePolicy::SampleOrderStatistic { r: 3 }.label(), "3");
        assert_eq!(PricePolicy::FixedPrice { p: 0.7 }.label(), "fixed_price=0.7");
    }
}
