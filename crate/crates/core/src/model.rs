//! Value distributions and market instances.
//!
//! Every family is continuous, so two independent draws tie with
//! probability zero. Point masses (the "huge value with small probability"
//! buyer of the adversarial families) are represented by a narrow uniform
//! sliver, see [`DistributionSpec::spike`].

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative width of a spike sliver when none is given.
pub const DEFAULT_SPIKE_WIDTH_FRACTION: f64 = 1e-6;

/// A continuous value distribution.
///
/// The JSON form is internally tagged by `family`, e.g.
/// `{"family": "uniform", "lo": 0.0, "hi": 1.0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    Uniform {
        lo: f64,
        hi: f64,
    },
    Exponential {
        rate: f64,
    },
    Pareto {
        scale: f64,
        shape: f64,
    },
    /// `Uniform(base_lo, base_hi)` with probability `1 - spike_prob`,
    /// otherwise `Uniform(spike_lo, spike_hi)`.
    SpikeMixture {
        base_lo: f64,
        base_hi: f64,
        spike_lo: f64,
        spike_hi: f64,
        spike_prob: f64,
    },
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidDistribution(msg()))
    }
}

impl DistributionSpec {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        let d = DistributionSpec::Uniform { lo, hi };
        d.validate()?;
        Ok(d)
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        let d = DistributionSpec::Exponential { rate };
        d.validate()?;
        Ok(d)
    }

    pub fn pareto(scale: f64, shape: f64) -> Result<Self> {
        let d = DistributionSpec::Pareto { scale, shape };
        d.validate()?;
        Ok(d)
    }

    pub fn spike_mixture(
        base_lo: f64,
        base_hi: f64,
        spike_lo: f64,
        spike_hi: f64,
        spike_prob: f64,
    ) -> Result<Self> {
        let d = DistributionSpec::SpikeMixture {
            base_lo,
            base_hi,
            spike_lo,
            spike_hi,
            spike_prob,
        };
        d.validate()?;
        Ok(d)
    }

    /// Base `Uniform(base_lo, base_hi)` plus a spike at `spike_value` with
    /// probability `spike_prob`, continuified to
    /// `[spike_value, spike_value + width]`. `width` defaults to
    /// `DEFAULT_SPIKE_WIDTH_FRACTION * spike_value`.
    pub fn spike(
        base_lo: f64,
        base_hi: f64,
        spike_value: f64,
        spike_prob: f64,
        width: Option<f64>,
    ) -> Result<Self> {
        let width = width.unwrap_or(DEFAULT_SPIKE_WIDTH_FRACTION * spike_value);
        Self::spike_mixture(base_lo, base_hi, spike_value, spike_value + width, spike_prob)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DistributionSpec::Uniform { lo, hi } => require(
                lo.is_finite() && hi.is_finite() && lo < hi,
                || format!("uniform needs finite lo < hi, got [{lo}, {hi}]"),
            ),
            DistributionSpec::Exponential { rate } => require(
                rate.is_finite() && rate > 0.0,
                || format!("exponential rate must be finite and > 0, got {rate}"),
            ),
            DistributionSpec::Pareto { scale, shape } => require(
                scale.is_finite() && shape.is_finite() && scale > 0.0 && shape > 0.0,
                || format!("pareto needs finite scale > 0 and shape > 0, got ({scale}, {shape})"),
            ),
            DistributionSpec::SpikeMixture {
                base_lo,
                base_hi,
                spike_lo,
                spike_hi,
                spike_prob,
            } => {
                let all_finite = [base_lo, base_hi, spike_lo, spike_hi, spike_prob]
                    .iter()
                    .all(|v| v.is_finite());
                require(all_finite, || "spike mixture parameters must be finite".into())?;
                require(base_lo < base_hi, || {
                    format!("spike mixture base needs lo < hi, got [{base_lo}, {base_hi}]")
                })?;
                require(spike_lo < spike_hi, || {
                    format!("spike mixture spike needs lo < hi, got [{spike_lo}, {spike_hi}]")
                })?;
                require(base_hi <= spike_lo, || {
                    format!("spike [{spike_lo}, {spike_hi}] must lie above base_hi {base_hi}")
                })?;
                require(spike_prob > 0.0 && spike_prob < 1.0, || {
                    format!("spike_prob must be in (0, 1), got {spike_prob}")
                })
            }
        }
    }

    /// Closed support interval; the upper end may be infinite.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            DistributionSpec::Uniform { lo, hi } => (lo, hi),
            DistributionSpec::Exponential { .. } => (0.0, f64::INFINITY),
            DistributionSpec::Pareto { scale, .. } => (scale, f64::INFINITY),
            DistributionSpec::SpikeMixture {
                base_lo, spike_hi, ..
            } => (base_lo, spike_hi),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            DistributionSpec::Uniform { lo, hi } => 0.5 * (lo + hi),
            DistributionSpec::Exponential { rate } => 1.0 / rate,
            DistributionSpec::Pareto { scale, shape } => {
                if shape > 1.0 {
                    shape * scale / (shape - 1.0)
                } else {
                    f64::INFINITY
                }
            }
            DistributionSpec::SpikeMixture {
                base_lo,
                base_hi,
                spike_lo,
                spike_hi,
                spike_prob,
            } => {
                (1.0 - spike_prob) * 0.5 * (base_lo + base_hi)
                    + spike_prob * 0.5 * (spike_lo + spike_hi)
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            DistributionSpec::Uniform { lo, hi } => uniform_cdf(lo, hi, x),
            DistributionSpec::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            DistributionSpec::Pareto { scale, shape } => {
                if x <= scale {
                    0.0
                } else {
                    -(shape * (scale / x).ln()).exp_m1()
                }
            }
            DistributionSpec::SpikeMixture {
                base_lo,
                base_hi,
                spike_lo,
                spike_hi,
                spike_prob,
            } => {
                if x < spike_lo {
                    (1.0 - spike_prob) * uniform_cdf(base_lo, base_hi, x)
                } else {
                    (1.0 - spike_prob) + spike_prob * uniform_cdf(spike_lo, spike_hi, x)
                }
            }
        }
    }

    /// Survival function `Pr(X > x)`.
    pub fn sf(&self, x: f64) -> f64 {
        match *self {
            DistributionSpec::Exponential { rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-rate * x).exp()
                }
            }
            DistributionSpec::Pareto { scale, shape } => {
                if x <= scale {
                    1.0
                } else {
                    (scale / x).powf(shape)
                }
            }
            _ => 1.0 - self.cdf(x),
        }
    }

    /// Partial expectation `E[X · 1{X > t}]`. Infinite for Pareto with
    /// `shape <= 1`.
    pub fn upper_partial_mean(&self, t: f64) -> f64 {
        match *self {
            DistributionSpec::Uniform { lo, hi } => uniform_upper_partial_mean(lo, hi, t),
            DistributionSpec::Exponential { rate } => {
                if t <= 0.0 {
                    1.0 / rate
                } else {
                    (-rate * t).exp() * (t + 1.0 / rate)
                }
            }
            DistributionSpec::Pareto { scale, shape } => {
                if shape <= 1.0 {
                    f64::INFINITY
                } else if t <= scale {
                    shape * scale / (shape - 1.0)
                } else {
                    shape * scale / (shape - 1.0) * (scale / t).powf(shape - 1.0)
                }
            }
            DistributionSpec::SpikeMixture {
                base_lo,
                base_hi,
                spike_lo,
                spike_hi,
                spike_prob,
            } => {
                (1.0 - spike_prob) * uniform_upper_partial_mean(base_lo, base_hi, t)
                    + spike_prob * uniform_upper_partial_mean(spike_lo, spike_hi, t)
            }
        }
    }

    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Domain(format!("quantile level must be in (0, 1), got {q}")));
        }
        Ok(self.quantile_unchecked(q))
    }

    fn quantile_unchecked(&self, q: f64) -> f64 {
        match *self {
            DistributionSpec::Uniform { lo, hi } => lo + q * (hi - lo),
            DistributionSpec::Exponential { rate } => -(-q).ln_1p() / rate,
            DistributionSpec::Pareto { scale, shape } => scale * (-(-q).ln_1p() / shape).exp(),
            DistributionSpec::SpikeMixture {
                base_lo,
                base_hi,
                spike_lo,
                spike_hi,
                spike_prob,
            } => {
                let base_mass = 1.0 - spike_prob;
                if q <= base_mass {
                    base_lo + (q / base_mass) * (base_hi - base_lo)
                } else {
                    spike_lo + ((q - base_mass) / spike_prob) * (spike_hi - spike_lo)
                }
            }
        }
    }

    /// One draw by inversion of a single open-interval uniform.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.sample(Open01);
        self.quantile_unchecked(u)
    }
}

fn uniform_upper_partial_mean(lo: f64, hi: f64, t: f64) -> f64 {
    if t <= lo {
        0.5 * (lo + hi)
    } else if t >= hi {
        0.0
    } else {
        0.5 * (hi - t) * (hi + t) / (hi - lo)
    }
}

fn uniform_cdf(lo: f64, hi: f64, x: f64) -> f64 {
    if x <= lo {
        0.0
    } else if x >= hi {
        1.0
    } else {
        (x - lo) / (hi - lo)
    }
}

/// An ordered list of buyer distributions plus the seller's capacity `k`.
///
/// JSON form: `{"k": 3, "dists": [{"family": "uniform", ...}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct Instance {
    k: usize,
    dists: Vec<DistributionSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    k: usize,
    dists: Vec<DistributionSpec>,
}

impl TryFrom<RawInstance> for Instance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        Instance::new(raw.dists, raw.k)
    }
}

impl Instance {
    pub fn new(dists: Vec<DistributionSpec>, k: usize) -> Result<Self> {
        if dists.is_empty() {
            return Err(Error::InvalidInstance("instance needs at least one buyer".into()));
        }
        if k == 0 || k > dists.len() {
            return Err(Error::InvalidInstance(format!(
                "capacity k = {k} must satisfy 1 <= k <= n = {}",
                dists.len()
            )));
        }
        for (i, d) in dists.iter().enumerate() {
            d.validate()
                .map_err(|e| Error::InvalidInstance(format!("buyer {i}: {e}")))?;
        }
        Ok(Instance { k, dists })
    }

    /// `n` independent copies of `dist`.
    pub fn iid(dist: DistributionSpec, n: usize, k: usize) -> Result<Self> {
        Instance::new(vec![dist; n], k)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.dists.len()
    }

    pub fn dists(&self) -> &[DistributionSpec] {
        &self.dists
    }

    /// Same buyers with a different capacity.
    pub fn with_k(&self, k: usize) -> Result<Self> {
        Instance::new(self.dists.clone(), k)
    }

    /// Draw one value per buyer, in arrival order, into `out`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.dists.iter().map(|d| d.sample(rng)));
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn families() -> Vec<DistributionSpec> {
        vec![
            DistributionSpec::uniform(2.0, 4.0).unwrap(),
            DistributionSpec::exponential(2.0).unwrap(),
            DistributionSpec::pareto(1.5, 2.5).unwrap(),
            DistributionSpec::spike_mixture(0.0, 1.0, 10.0, 11.0, 0.25).unwrap(),
        ]
    }

    #[test]
    fn uniform_cdf_and_quantile() {
        let u = DistributionSpec::uniform(0.0, 1.0).unwrap();
        assert_eq!(u.cdf(0.3), 0.3);
        let u = DistributionSpec::uniform(2.0, 4.0).unwrap();
        assert_eq!(u.quantile(0.5).unwrap(), 3.0);
    }

    #[test]
    fn exponential_boundary_and_inverse() {
        let e = DistributionSpec::exponential(1.0).unwrap();
        assert_eq!(e.cdf(0.0), 0.0);
        let q = 1.0 - (-1.0f64).exp();
        assert!((e.quantile(q).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spike_mixture_mass_below_spike() {
        let s = DistributionSpec::spike_mixture(0.0, 1.0, 10.0, 11.0, 0.25).unwrap();
        assert!((s.cdf(1.0) - 0.75).abs() < 1e-15);
        // exactly spike_prob of the mass sits above base_hi
        assert!((s.sf(1.0) - 0.25).abs() < 1e-15);
        assert!((s.sf(5.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn quantile_rejects_levels_outside_open_unit_interval() {
        let u = DistributionSpec::uniform(0.0, 1.0).unwrap();
        for q in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(u.quantile(q), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn round_trip_on_grid() {
        for d in families() {
            for i in 0..1000 {
                let q = (i as f64 + 0.5) / 1000.0;
                let x = d.quantile(q).unwrap();
                let back = d.cdf(x);
                assert!((back - q).abs() < 1e-12 * q.max(1e-300) + 1e-15, "{d:?} q={q} back={back}");
            }
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(DistributionSpec::uniform(1.0, 1.0).is_err());
        assert!(DistributionSpec::uniform(0.0, f64::INFINITY).is_err());
        assert!(DistributionSpec::exponential(0.0).is_err());
        assert!(DistributionSpec::pareto(-1.0, 2.0).is_err());
        assert!(DistributionSpec::pareto(1.0, 0.0).is_err());
        // spike must dominate base support
        assert!(DistributionSpec::spike_mixture(0.0, 2.0, 1.5, 3.0, 0.1).is_err());
        assert!(DistributionSpec::spike_mixture(0.0, 1.0, 1.0, 3.0, 1.0).is_err());
        assert!(DistributionSpec::spike_mixture(0.0, 1.0, 1.0, 3.0, 0.0).is_err());
    }

    #[test]
    fn spike_default_width() {
        let s = DistributionSpec::spike(0.99, 1.0, 100.0, 0.1, None).unwrap();
        match s {
            DistributionSpec::SpikeMixture { spike_lo, spike_hi, .. } => {
                assert_eq!(spike_lo, 100.0);
                assert!((spike_hi - spike_lo - 1e-4).abs() < 1e-12);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn samples_stay_in_support_and_are_reproducible() {
        for d in families() {
            let (lo, hi) = d.support();
            let mut a = ChaCha8Rng::seed_from_u64(11);
            let mut b = ChaCha8Rng::seed_from_u64(11);
            for _ in 0..10_000 {
                let x = d.sample(&mut a);
                assert!(x >= lo && x <= hi, "{d:?} produced {x}");
                assert_eq!(x.to_bits(), d.sample(&mut b).to_bits());
            }
        }
    }

    #[test]
    fn instance_validation() {
        let u = DistributionSpec::uniform(0.0, 1.0).unwrap();
        assert!(Instance::new(vec![], 1).is_err());
        assert!(Instance::iid(u, 3, 0).is_err());
        assert!(Instance::iid(u, 3, 4).is_err());
        let bad = DistributionSpec::Uniform { lo: 1.0, hi: 0.0 };
        assert!(Instance::new(vec![u, bad], 1).is_err());
        assert_eq!(Instance::iid(u, 3, 3).unwrap().n(), 3);
    }

    #[test]
    fn instance_json_schema() {
        let text = r#"{"k": 2, "dists": [
            {"family": "uniform", "lo": 0, "hi": 1},
            {"family": "exponential", "rate": 2.0},
            {"family": "pareto", "scale": 1.0, "shape": 3.0},
            {"family": "spike_mixture", "base_lo": 0.9, "base_hi": 1.0,
             "spike_lo": 100.0, "spike_hi": 100.001, "spike_prob": 0.01}
        ]}"#;
        let inst = Instance::from_json(text).unwrap();
        assert_eq!(inst.k(), 2);
        assert_eq!(inst.n(), 4);
        let again = Instance::from_json(&inst.to_json()).unwrap();
        assert_eq!(inst, again);
        assert!(inst.to_json().starts_with(r#"{"k":2,"dists":[{"family":"uniform","lo":0.0"#));
    }

    #[test]
    fn instance_json_rejects_invalid() {
        for text in [
            r#"{"k": 0, "dists": [{"family": "uniform", "lo": 0, "hi": 1}]}"#,
            r#"{"k": 1, "dists": []}"#,
            r#"{"k": 1, "dists": [{"family": "uniform", "lo": 1, "hi": 0}]}"#,
            r#"{"k": 1, "dists": [{"family": "cauchy"}]}"#,
            r#"{"k": 1, "dists": [{"family": "uniform", "lo": 0, "hi": 1, "mid": 3}]}"#,
            r#"{"dists": [{"family": "uniform", "lo": 0, "hi": 1}]}"#,
        ] {
            assert!(Instance::from_json(text).is_err(), "{text}");
        }
    }
}
