//! Seeded Monte Carlo estimation of `E[ALG] / E[prophet]`.
//!
//! Trial `i` draws from its own ChaCha8 stream, keyed by `(seed, i)`, so a
//! trial's randomness does not depend on which worker runs it. Trials are
//! evaluated in fixed-size chunks; each chunk is computed in parallel,
//! collected in index order, and folded into compensated accumulators in
//! ascending trial index. Reports are therefore bit-identical for any
//! thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::analytics::pmf::CompensatedSum;
use crate::error::{Error, Result};
use crate::market::{allocate, kth_largest, prophet_value_with, PreparedPolicy, PricePolicy};
use crate::model::Instance;

/// Trials per parallel batch. Part of the reproducibility contract only in
/// that it must not depend on the worker count.
const TRIAL_CHUNK: u64 = 8192;

/// How a trial's welfare pair is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    /// Realised ALG and prophet welfare.
    #[default]
    Plain,
    /// Expected ALG and prophet welfare given everything except the last
    /// buyer's value, which is integrated out in closed form. Unbiased for
    /// the same ratio; removes the variance a rare high-value last buyer
    /// contributes. The pick histogram still counts realised sales.
    ConditionLast,
}

impl Estimator {
    pub fn label(self) -> &'static str {
        match self {
            Estimator::Plain => "plain",
            Estimator::ConditionLast => "condition-last",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    /// Two-sided confidence level of `[ci_lo, ci_hi]`.
    pub ci_level: f64,
    /// Worker threads; 0 uses the global rayon pool. Never affects results.
    pub threads: usize,
    pub estimator: Estimator,
}

impl SimConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        SimConfig {
            trials,
            seed,
            ci_level: 0.99,
            threads: 0,
            estimator: Estimator::Plain,
        }
    }

    pub fn with_estimator(mut self, estimator: Estimator) -> Self {
        self.estimator = estimator;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(Error::Config(format!(
                "ci_level must be in (0, 1), got {}",
                self.ci_level
            )));
        }
        Ok(())
    }

    pub(crate) fn z_score(&self) -> f64 {
        let normal = Normal::standard();
        normal.inverse_cdf(0.5 + 0.5 * self.ci_level)
    }
}

/// The random stream of one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Run `trial` for every index in `0..config.trials` and feed the results
/// to `consume` in ascending index order.
///
/// `init` builds per-worker scratch state.
pub(crate) fn run_trials<S, T, I, F, C>(
    config: &SimConfig,
    init: I,
    trial: F,
    mut consume: C,
) -> Result<()>
where
    T: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, &mut ChaCha8Rng) -> T + Sync + Send,
    C: FnMut(T) -> Result<()>,
{
    config.validate()?;
    let seed = config.seed;
    let pool = match config.threads {
        0 => None,
        t => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::Config(format!("cannot start {t} workers: {e}")))?,
        ),
    };
    let compute = |start: u64, end: u64| -> Vec<T> {
        (start..end)
            .into_par_iter()
            .map_init(&init, |state, i| {
                let mut rng = trial_rng(seed, i);
                trial(state, &mut rng)
            })
            .collect()
    };
    let mut start = 0u64;
    while start < config.trials {
        let end = (start + TRIAL_CHUNK).min(config.trials);
        let batch = match &pool {
            Some(pool) => pool.install(|| compute(start, end)),
            None => compute(start, end),
        };
        for out in batch {
            consume(out)?;
        }
        start = end;
    }
    Ok(())
}

/// Monte Carlo estimate of the competitive ratio of one policy.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub k: usize,
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    /// Policy label, see [`PricePolicy::label`].
    pub rule: String,
    pub mean_alg: f64,
    pub mean_prophet: f64,
    /// Ratio of means.
    pub ratio: f64,
    /// First-order delta-method standard error of `ratio`.
    pub stderr_ratio: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// `pick_histogram[j]` = number of trials selling exactly `j` units.
    pub pick_histogram: Vec<u64>,
}

/// Streaming sums for the paired (ALG, prophet) sample.
///
/// Second moments are accumulated around the first observation to keep the
/// variance free of catastrophic cancellation.
#[derive(Debug, Clone)]
pub(crate) struct RatioAccumulator {
    count: u64,
    shift: Option<(f64, f64)>,
    sum_alg: CompensatedSum,
    sum_prophet: CompensatedSum,
    dev_alg: CompensatedSum,
    dev_prophet: CompensatedSum,
    sq_alg: CompensatedSum,
    sq_prophet: CompensatedSum,
    cross: CompensatedSum,
    histogram: Vec<u64>,
}

impl RatioAccumulator {
    pub(crate) fn new(k: usize) -> Self {
        RatioAccumulator {
            count: 0,
            shift: None,
            sum_alg: CompensatedSum::default(),
            sum_prophet: CompensatedSum::default(),
            dev_alg: CompensatedSum::default(),
            dev_prophet: CompensatedSum::default(),
            sq_alg: CompensatedSum::default(),
            sq_prophet: CompensatedSum::default(),
            cross: CompensatedSum::default(),
            histogram: vec![0; k + 1],
        }
    }

    pub(crate) fn push(&mut self, alg: f64, prophet: f64, picks: usize) -> Result<()> {
        if !alg.is_finite() || !prophet.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite trial value (alg = {alg}, prophet = {prophet})"
            )));
        }
        let (a0, p0) = *self.shift.get_or_insert((alg, prophet));
        let (da, dp) = (alg - a0, prophet - p0);
        self.count += 1;
        self.sum_alg.add(alg);
        self.sum_prophet.add(prophet);
        self.dev_alg.add(da);
        self.dev_prophet.add(dp);
        self.sq_alg.add(da * da);
        self.sq_prophet.add(dp * dp);
        self.cross.add(da * dp);
        self.histogram[picks] += 1;
        Ok(())
    }

    pub(crate) fn finish(
        self,
        instance: &Instance,
        rule: String,
        config: &SimConfig,
    ) -> Result<SimReport> {
        let n = self.count as f64;
        let mean_alg = self.sum_alg.value() / n;
        let mean_prophet = self.sum_prophet.value() / n;
        if !(mean_prophet > 0.0) || !mean_prophet.is_finite() {
            return Err(Error::Numeric(format!(
                "mean prophet welfare is {mean_prophet}; the ratio is undefined"
            )));
        }
        let ratio = mean_alg / mean_prophet;
        let stderr_ratio = if self.count < 2 {
            0.0
        } else {
            let (sa, sp) = (self.dev_alg.value(), self.dev_prophet.value());
            let var_a = (self.sq_alg.value() - sa * sa / n) / (n - 1.0);
            let var_p = (self.sq_prophet.value() - sp * sp / n) / (n - 1.0);
            let cov = (self.cross.value() - sa * sp / n) / (n - 1.0);
            let var_ratio =
                (var_a - 2.0 * ratio * cov + ratio * ratio * var_p) / (n * mean_prophet * mean_prophet);
            var_ratio.max(0.0).sqrt()
        };
        if !ratio.is_finite() || !stderr_ratio.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite estimate (ratio = {ratio}, stderr = {stderr_ratio})"
            )));
        }
        let z = config.z_score();
        Ok(SimReport {
            k: instance.k(),
            n: instance.n(),
            trials: self.count,
            seed: config.seed,
            rule,
            mean_alg,
            mean_prophet,
            ratio,
            stderr_ratio,
            ci_lo: ratio - z * stderr_ratio,
            ci_hi: ratio + z * stderr_ratio,
            pick_histogram: self.histogram,
        })
    }
}

/// Per-worker buffers for one market trial.
#[derive(Default)]
pub(crate) struct TrialScratch {
    pub(crate) xs: Vec<f64>,
    pub(crate) ys: Vec<f64>,
    pub(crate) work: Vec<f64>,
}

/// One simulated market: samples first, then values.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TrialOutcome {
    pub(crate) alg: f64,
    pub(crate) prophet: f64,
    pub(crate) picks: usize,
}

/// Estimate the competitive ratio of `policy` on `instance`.
///
/// Each trial draws `Y_1..Y_n`, then `X_1..X_n`, posts the price resolved
/// from the `Y` vector, serves the `X` sequence, and records ALG and the
/// prophet's top-`k` sum.
pub fn estimate_ratio(
    instance: &Instance,
    policy: &PricePolicy,
    config: &SimConfig,
) -> Result<SimReport> {
    let prepared = policy.prepare(instance)?;
    let k = instance.k();
    let mut acc = RatioAccumulator::new(k);
    run_trials(
        config,
        TrialScratch::default,
        |s: &mut TrialScratch, rng| play_trial(instance, &prepared, config.estimator, s, rng).0,
        |t: TrialOutcome| acc.push(t.alg, t.prophet, t.picks),
    )?;
    acc.finish(instance, policy.label(), config)
}

/// Draw samples then values, post the price, and score the trial. Also
/// returns the price.
pub(crate) fn play_trial(
    instance: &Instance,
    prepared: &PreparedPolicy,
    estimator: Estimator,
    s: &mut TrialScratch,
    rng: &mut ChaCha8Rng,
) -> (TrialOutcome, f64) {
    instance.sample_into(rng, &mut s.ys);
    instance.sample_into(rng, &mut s.xs);
    let price = prepared.price(&s.ys, &mut s.work);
    let outcome = match estimator {
        Estimator::Plain => {
            let (alg, picks) = allocate(instance.k(), price, &s.xs);
            let prophet = prophet_value_with(&s.xs, instance.k(), &mut s.work);
            TrialOutcome { alg, prophet, picks }
        }
        Estimator::ConditionLast => condition_last(instance, price, s),
    };
    (outcome, price)
}

/// Score a trial with the last buyer's value replaced by its conditional
/// expectation given the price and the earlier values.
pub(crate) fn condition_last(instance: &Instance, price: f64, s: &mut TrialScratch) -> TrialOutcome {
    let k = instance.k();
    let (head, last_x) = s.xs.split_at(s.xs.len() - 1);
    let last = instance.dists()[head.len()];
    let (head_alg, head_picks) = allocate(k, price, head);
    let (alg, picks) = if head_picks < k {
        let sold_last = (last_x[0] > price) as usize;
        (head_alg + last.upper_partial_mean(price), head_picks + sold_last)
    } else {
        (head_alg, head_picks)
    };
    let prophet = if head.len() < k {
        head.iter().sum::<f64>() + last.mean()
    } else {
        let top = prophet_value_with(head, k, &mut s.work);
        s.work.clear();
        s.work.extend_from_slice(head);
        let cutoff = kth_largest(&mut s.work, k);
        // E[(X - cutoff)^+] replaces the cutoff when the last buyer beats it
        top + last.upper_partial_mean(cutoff) - cutoff * last.sf(cutoff)
    };
    TrialOutcome { alg, prophet, picks }
}

/// One [`estimate_ratio`] per order statistic `r = 1..=r_max`, trial seed
/// `seed ^ r`.
pub fn sweep_r(
    instance: &Instance,
    config: &SimConfig,
    r_max: usize,
) -> Result<Vec<(usize, SimReport)>> {
    if r_max == 0 || r_max > instance.n() {
        return Err(Error::Config(format!(
            "sweep bound r_max = {r_max} must be in 1..={}",
            instance.n()
        )));
    }
    (1..=r_max)
        .map(|r| {
            let cfg = config.with_seed(config.seed ^ r as u64);
            let report = estimate_ratio(instance, &PricePolicy::SampleOrderStatistic { r }, &cfg)?;
            Ok((r, report))
        })
        .collect()
}
