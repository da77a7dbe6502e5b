//! Adversarial instance families and the experiments run on them.
//!
//! Both families put `n - 1` nearly identical buyers in front of a last
//! buyer who, with probability `1/N`, is worth `N^2`. Any price low enough
//! to sell to the crowd risks running out before that buyer arrives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::{allocate, PricePolicy};
use crate::model::{DistributionSpec, Instance, DEFAULT_SPIKE_WIDTH_FRACTION};
use crate::montecarlo::{play_trial, run_trials, RatioAccumulator, SimConfig, SimReport, TrialScratch};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardInstanceParams {
    pub n: usize,
    pub k: usize,
    /// Width of the base interval `(1 - delta, 1)`.
    pub delta: f64,
    /// `N`: the spike sits at `N^2` with probability `1/N`.
    pub spike_scale: f64,
    /// Width of the spike sliver `[N^2, N^2 + spike_width]`.
    pub spike_width: f64,
}

impl HardInstanceParams {
    /// Parameters with the default sliver width.
    pub fn new(n: usize, k: usize, delta: f64, spike_scale: f64) -> Result<Self> {
        let p = HardInstanceParams {
            n,
            k,
            delta,
            spike_scale,
            spike_width: DEFAULT_SPIKE_WIDTH_FRACTION * spike_scale * spike_scale,
        };
        p.validate()?;
        Ok(p)
    }

    /// The family with `N = n`.
    pub fn scale_n(n: usize, k: usize, delta: f64) -> Result<Self> {
        Self::new(n, k, delta, n as f64)
    }

    pub fn with_spike_width(mut self, width: f64) -> Result<Self> {
        self.spike_width = width;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.k == 0 || self.k > self.n {
            return Err(Error::InvalidInstance(format!(
                "hard instances need n >= 2 and 1 <= k <= n, got n = {}, k = {}",
                self.n, self.k
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidInstance(format!(
                "delta must be in (0, 1), got {}",
                self.delta
            )));
        }
        if !(self.spike_scale > 1.0 && self.spike_scale.is_finite()) {
            return Err(Error::InvalidInstance(format!(
                "spike scale must be finite and > 1, got {}",
                self.spike_scale
            )));
        }
        if !(self.spike_width > 0.0 && self.spike_width.is_finite()) {
            return Err(Error::InvalidInstance(format!(
                "spike width must be finite and > 0, got {}",
                self.spike_width
            )));
        }
        Ok(())
    }
}

/// `n - 1` buyers `Uniform(1 - delta, 1)`, then one buyer worth
/// `spike_scale^2` with probability `1 / spike_scale` and
/// `Uniform(1 - delta, 1)` otherwise.
pub fn half_tight_instance(params: &HardInstanceParams) -> Result<Instance> {
    params.validate()?;
    let lo = 1.0 - params.delta;
    let base = DistributionSpec::uniform(lo, 1.0)?;
    let spike = DistributionSpec::spike(
        lo,
        1.0,
        params.spike_scale * params.spike_scale,
        1.0 / params.spike_scale,
        Some(params.spike_width),
    )?;
    let mut dists = vec![base; params.n - 1];
    dists.push(spike);
    Instance::new(dists, params.k)
}

/// One `Uniform(v - radius, v + radius)` buyer per value, in the given
/// order. The intervals must be pairwise disjoint.
pub fn disjoint_support_instance(values: &[f64], radius: f64, k: usize) -> Result<Instance> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidInstance(format!(
            "radius must be finite and > 0, got {radius}"
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    if let Some(w) = sorted.windows(2).find(|w| w[1] - w[0] <= 2.0 * radius) {
        return Err(Error::InvalidInstance(format!(
            "intervals around {} and {} overlap at radius {radius}",
            w[0], w[1]
        )));
    }
    let dists = values
        .iter()
        .map(|&v| DistributionSpec::uniform(v - radius, v + radius))
        .collect::<Result<Vec<_>>>()?;
    Instance::new(dists, k)
}

/// Sales threshold of the tightness argument:
/// `k - ceil(sqrt((2 - epsilon/2) k ln k))`, or `None` if below one.
pub fn tightness_threshold(k: usize, epsilon: f64) -> Option<usize> {
    let kf = k as f64;
    let shift = ((2.0 - 0.5 * epsilon) * kf * kf.ln()).sqrt().ceil() as usize;
    k.checked_sub(shift).filter(|&s| s >= 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TightnessReport {
    pub k: usize,
    pub epsilon: f64,
    pub n: usize,
    pub spike_scale: f64,
    pub r: usize,
    pub s: usize,
    pub delta: f64,
    pub report: SimReport,
    /// Fraction of trials selling at least `s` units to the first `n - 1`
    /// buyers.
    pub capacity_exhaust_prob: f64,
    pub capacity_exhaust_stderr: f64,
}

/// Run the sample-order-statistic policy `r` on the family with
/// `delta = epsilon / (16 sqrt k)`, spike `N^2` with probability `1/N`.
pub fn tightness_experiment(
    k: usize,
    epsilon: f64,
    n: usize,
    spike_scale: f64,
    r: usize,
    config: &SimConfig,
) -> Result<TightnessReport> {
    if !(epsilon > 0.0 && epsilon < 4.0) {
        return Err(Error::Config(format!("epsilon must be in (0, 4), got {epsilon}")));
    }
    let s = tightness_threshold(k, epsilon).ok_or_else(|| {
        Error::Config(format!("k = {k} is too small: the sales threshold s is below 1"))
    })?;
    let delta = epsilon / (16.0 * (k as f64).sqrt());
    let params = HardInstanceParams::new(n, k, delta, spike_scale)?;
    let instance = half_tight_instance(&params)?;
    let policy = PricePolicy::SampleOrderStatistic { r };
    let prepared = policy.prepare(&instance)?;

    let mut acc = RatioAccumulator::new(k);
    let mut exhausted = 0u64;
    run_trials(
        config,
        TrialScratch::default,
        |scratch: &mut TrialScratch, rng| {
            let (outcome, price) = play_trial(&instance, &prepared, config.estimator, scratch, rng);
            let (_, head_sales) = allocate(k, price, &scratch.xs[..n - 1]);
            (outcome, head_sales >= s)
        },
        |(t, hit)| {
            exhausted += hit as u64;
            acc.push(t.alg, t.prophet, t.picks)
        },
    )?;
    let report = acc.finish(&instance, policy.label(), config)?;
    let trials = config.trials as f64;
    let p = exhausted as f64 / trials;
    Ok(TightnessReport {
        k,
        epsilon,
        n,
        spike_scale,
        r,
        s,
        delta,
        report,
        capacity_exhaust_prob: p,
        capacity_exhaust_stderr: (p * (1.0 - p) / trials).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scale_n_constructor() {
        let p = HardInstanceParams::scale_n(10, 1, 0.01).unwrap();
        let inst = half_tight_instance(&p).unwrap();
        assert_eq!(inst.n(), 10);
        assert_eq!(inst.k(), 1);
        for d in &inst.dists()[..9] {
            assert_eq!(*d, DistributionSpec::Uniform { lo: 0.99, hi: 1.0 });
        }
        match inst.dists()[9] {
            DistributionSpec::SpikeMixture {
                spike_lo,
                spike_prob,
                spike_hi,
                ..
            } => {
                assert_eq!(spike_lo, 100.0);
                assert_eq!(spike_prob, 0.1);
                assert!((spike_hi - 100.0 - 1e-4).abs() < 1e-12);
            }
            other => panic!("unexpected last buyer {other:?}"),
        }
    }

    #[test]
    fn params_validated() {
        assert!(HardInstanceParams::scale_n(1, 1, 0.1).is_err());
        assert!(HardInstanceParams::scale_n(10, 11, 0.1).is_err());
        assert!(HardInstanceParams::scale_n(10, 1, 1.0).is_err());
        assert!(HardInstanceParams::new(10, 1, 0.1, 1.0).is_err());
        let p = HardInstanceParams::scale_n(10, 1, 0.1).unwrap();
        assert!(p.with_spike_width(0.0).is_err());
    }

    #[test]
    fn disjoint_constructor() {
        let inst = disjoint_support_instance(&[0.991, 0.993, 0.995], 1e-4, 2).unwrap();
        assert_eq!(inst.n(), 3);
        assert!(disjoint_support_instance(&[0.991, 0.9912], 1e-4, 1).is_err());
        assert!(disjoint_support_instance(&[0.5], 0.0, 1).is_err());
    }

    #[test]
    fn threshold() {
        // sqrt(1.95 * 100 * ln 100) = 29.97 -> 30
        assert_eq!(tightness_threshold(100, 0.1), Some(70));
        assert_eq!(tightness_threshold(2, 0.1), None);
    }

    #[test]
    fn small_k_rejected() {
        let cfg = SimConfig::new(10, 1);
        assert!(matches!(tightness_experiment(2, 0.1, 10, 10.0, 1, &cfg), Err(Error::Config(_))));
        assert!(tightness_experiment(100, 0.0, 1000, 10.0, 1, &cfg).is_err());
    }
}
