//! Closed-form quantities in the binomial case, the large-`k` bound and
//! its rounding rule, the moderate-deviation tail estimate, the
//! deterministic-price guarantee, and the full-information Poisson fixed
//! point.
//!
//! "Binomial case" means every rank comparison between the `X` and `Y`
//! order statistics is replaced by a tail of `Binom(·, 1/2)`, which is its
//! limit for many i.i.d. buyers and an upper bound on the comparison in
//! general.

pub mod pmf;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Instance;
use crate::montecarlo::{run_trials, SimConfig};
use pmf::{
    half_binom_pmf, half_binom_window, poisson_pmf, poisson_window, sum_unimodal_ascending,
    CompensatedSum,
};

const POISSON_MAX_ITER: usize = 200;

/// Masses of `Binom(n, 1/2)` at `t <= m` and at `t > m`, unnormalised.
///
/// Mirrored terms are computed identically, so the two halves are bitwise
/// equal whenever `m` splits the support symmetrically.
fn half_binom_split(n: u64, m: u64) -> (f64, f64) {
    let (wlo, whi) = half_binom_window(n);
    let f = |t: u64| half_binom_pmf(n, t);
    let lower = if m < wlo {
        0.0
    } else {
        sum_unimodal_ascending(wlo, m.min(whi), f)
    };
    let upper = if m >= whi {
        0.0
    } else {
        sum_unimodal_ascending((m + 1).max(wlo), whi, f)
    };
    (lower, upper)
}

/// `Pr(Binom(n, 1/2) <= m)`.
pub fn binom_tail(n: u64, m: u64) -> f64 {
    if m >= n {
        return 1.0;
    }
    let (lower, upper) = half_binom_split(n, m);
    lower / (lower + upper)
}

/// `Pr(Binom(n, 1/2) > m)`, accurate when it is tiny.
pub fn binom_upper_tail(n: u64, m: u64) -> f64 {
    if m >= n {
        return 0.0;
    }
    let (lower, upper) = half_binom_split(n, m);
    upper / (lower + upper)
}

/// Binomial-case `Pr(X^a < Y^b)`, i.e. `Pr(Binom(a + b - 1, 1/2) < a)`.
pub fn prob_rank_exceeds(a: u64, b: u64) -> Result<f64> {
    if a == 0 || a > b {
        return Err(Error::Domain(format!("need 1 <= a <= b, got a = {a}, b = {b}")));
    }
    Ok(binom_tail(a + b - 1, a - 1))
}

/// Binomial-case `Pr(X^j > Y^r > X^{j+1}) = C(j + r - 1, j) / 2^{j + r}`.
pub fn gap_prob(j: u64, r: u64) -> Result<f64> {
    if r == 0 {
        return Err(Error::Domain("gap_prob needs r >= 1".into()));
    }
    Ok(0.5 * half_binom_pmf(j + r - 1, j))
}

/// Guaranteed competitive ratio of the `r`-th sample price with capacity
/// `k`: `(r Pr(Z <= k-1) - r C(2r-1, r) / 2^{2r-1}) / k` with
/// `Z ~ Binom(r + k - 1, 1/2)`.
///
/// Not clamped: small `k` gives zero or negative (vacuous) values.
pub fn theorem2_bound(r: u64, k: u64) -> Result<f64> {
    check_r_k(r, k)?;
    let rf = r as f64;
    let stay = binom_tail(r + k - 1, k - 1);
    let central = half_binom_pmf(2 * r - 1, r);
    Ok((rf * stay - rf * central) / k as f64)
}

/// Sharper variant `(r Pr(Z <= k-1) / k) (1 - C(2r-1, r) / 2^{2r-1})`
/// whose proof has not been published. Report-only.
pub fn unproven_bound(r: u64, k: u64) -> Result<f64> {
    check_r_k(r, k)?;
    let stay = binom_tail(r + k - 1, k - 1);
    let central = half_binom_pmf(2 * r - 1, r);
    Ok(r as f64 * stay / k as f64 * (1.0 - central))
}

fn check_r_k(r: u64, k: u64) -> Result<()> {
    if r == 0 || r > k {
        return Err(Error::Domain(format!("need 1 <= r <= k, got r = {r}, k = {k}")));
    }
    Ok(())
}

/// `ceil(sqrt(c k ln k))`.
fn sqrt_shift(k: u64, c: f64) -> u64 {
    let kf = k as f64;
    (c * kf * kf.ln()).sqrt().ceil() as u64
}

/// `max(1, k - ceil(sqrt(2 k ln k)))`.
pub fn recommended_r(k: u64) -> u64 {
    assert!(k >= 1, "capacity must be positive");
    k.saturating_sub(sqrt_shift(k, 2.0)).max(1)
}

/// `1 - sqrt(2 ln k / k)`.
pub fn single_sample_asymptote(k: u64) -> f64 {
    let kf = k as f64;
    1.0 - (2.0 * kf.ln() / kf).sqrt()
}

/// `1 - sqrt(ln k / k)`.
pub fn full_information_asymptote(k: u64) -> f64 {
    let kf = k as f64;
    1.0 - (kf.ln() / kf).sqrt()
}

/// Cramér leading-term approximation of `Pr(Z <= k - 1)`,
/// `Z ~ Binom(r + k - 1, 1/2)`, for `r = k - ceil(sqrt(c k ln k))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModerateDeviation {
    pub k: u64,
    pub c: f64,
    pub r: u64,
    /// Number of binomial trials `r + k - 1`.
    pub trials: u64,
    /// Distance `k - 1 - r` of the threshold above the mean, times two.
    pub scaled_deviation: f64,
    /// Approximation of `Pr(Z > k - 1)`.
    pub tail: f64,
    /// Approximation of `Pr(Z <= k - 1)`.
    pub estimate: f64,
    /// `n λ² >= 4` and `n λ³ <= 1`; outside this the leading term is a poor
    /// guide.
    pub in_regime: bool,
}

pub fn moderate_dev_estimate(k: u64, c: f64) -> Result<ModerateDeviation> {
    if k < 3 {
        return Err(Error::Domain(format!("moderate deviations need k >= 3, got {k}")));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Domain(format!("c must be finite and > 0, got {c}")));
    }
    let shift = sqrt_shift(k, c);
    if shift + 1 > k {
        return Err(Error::Domain(format!(
            "r = k - ceil(sqrt(c k ln k)) is below 1 for k = {k}, c = {c}"
        )));
    }
    let r = k - shift;
    let n = r + k - 1;
    let nf = n as f64;
    // n λ = 2(k - 1) - n = shift - 1
    let n_lambda = (shift - 1) as f64;
    let n_lambda_sq = n_lambda * n_lambda / nf;
    let n_lambda_cube = n_lambda_sq * n_lambda / nf;
    let tail = (-0.5 * n_lambda_sq).exp() / (2.0 * PI * n_lambda_sq).sqrt();
    Ok(ModerateDeviation {
        k,
        c,
        r,
        trials: n,
        scaled_deviation: n_lambda,
        tail,
        estimate: 1.0 - tail,
        in_regime: n_lambda_sq >= 4.0 && n_lambda_cube <= 1.0,
    })
}

/// Monte Carlo evaluation of the two terms of the deterministic-price
/// guarantee `min{Pr(X^k < p), sum_{i<=k} Pr(X^i >= p) / k}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdlReport {
    pub price: f64,
    pub trials: u64,
    pub pr_all_below: f64,
    pub demand_term: f64,
    pub min: f64,
    pub stderr_all_below: f64,
    pub stderr_demand: f64,
    /// Standard error of whichever term attains the minimum.
    pub stderr_min: f64,
}

pub fn cdl_ratio(instance: &Instance, p: f64, config: &SimConfig) -> Result<CdlReport> {
    if !p.is_finite() {
        return Err(Error::Config(format!("price must be finite, got {p}")));
    }
    let k = instance.k();
    let mut below = CompensatedSum::default();
    let mut below_sq = CompensatedSum::default();
    let mut demand = CompensatedSum::default();
    let mut demand_sq = CompensatedSum::default();
    run_trials(
        config,
        Vec::<f64>::new,
        |xs, rng| {
            instance.sample_into(rng, xs);
            xs.iter().filter(|&&x| x >= p).count()
        },
        |at_or_above: usize| {
            let b = if at_or_above < k { 1.0 } else { 0.0 };
            let d = at_or_above.min(k) as f64 / k as f64;
            below.add(b);
            below_sq.add(b * b);
            demand.add(d);
            demand_sq.add(d * d);
            Ok(())
        },
    )?;
    let n = config.trials as f64;
    let stderr = |sum: &CompensatedSum, sq: &CompensatedSum| -> f64 {
        if config.trials < 2 {
            return 0.0;
        }
        let mean = sum.value() / n;
        let var = (sq.value() - n * mean * mean) / (n - 1.0);
        (var.max(0.0) / n).sqrt()
    };
    let pr_all_below = below.value() / n;
    let demand_term = demand.value() / n;
    let stderr_all_below = stderr(&below, &below_sq);
    let stderr_demand = stderr(&demand, &demand_sq);
    let (min, stderr_min) = if pr_all_below <= demand_term {
        (pr_all_below, stderr_all_below)
    } else {
        (demand_term, stderr_demand)
    };
    Ok(CdlReport {
        price: p,
        trials: config.trials,
        pr_all_below,
        demand_term,
        min,
        stderr_all_below,
        stderr_demand,
        stderr_min,
    })
}

/// Solution of `E[min(X, k)] / k = Pr(X <= k - 1)` for `X ~ Poisson(lambda)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonFixedPoint {
    pub k: u64,
    pub lambda: f64,
    /// Common value of both sides: the full-information static-price ratio.
    pub ratio: f64,
    pub residual: f64,
}

/// Both sides of the fixed-point equation at `lambda`: `(E[min(X,k)]/k, Pr(X <= k-1))`.
pub fn poisson_sides(k: u64, lambda: f64) -> (f64, f64) {
    let (wlo, whi) = poisson_window(lambda);
    let f = |t: u64| poisson_pmf(t, lambda);
    // t <= k - 2
    let low = if k < 2 || k - 2 < wlo {
        0.0
    } else {
        sum_unimodal_ascending(wlo, (k - 2).min(whi), f)
    };
    let mid = f(k - 1);
    let high = if k > whi {
        0.0
    } else {
        sum_unimodal_ascending(k.max(wlo), whi, f)
    };
    let total = low + mid + high;
    let (p_le_km2, p_le_km1, p_ge_k) = (low / total, (low + mid) / total, high / total);
    // E[X 1{X <= k-1}] = lambda Pr(X <= k-2)
    let kf = k as f64;
    let lhs = (lambda * p_le_km2 + kf * p_ge_k) / kf;
    (lhs, p_le_km1)
}

/// Bisection on `lambda` in `(0, k]`. The left side increases and the right
/// side decreases in `lambda`, so the crossing is unique.
pub fn poisson_optimal_lambda(k: u64) -> Result<PoissonFixedPoint> {
    if k == 0 {
        return Err(Error::Domain("capacity must be positive".into()));
    }
    let excess = |lambda: f64| {
        let (lhs, rhs) = poisson_sides(k, lambda);
        lhs - rhs
    };
    let (mut lo, mut hi) = (0.0f64, k as f64);
    for _ in 0..POISSON_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let e = excess(mid);
        if e == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if e < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);
    let (lhs, rhs) = poisson_sides(k, lambda);
    let residual = (lhs - rhs).abs();
    if !residual.is_finite() {
        return Err(Error::Numeric(format!("Poisson fixed point diverged for k = {k}")));
    }
    Ok(PoissonFixedPoint {
        k,
        lambda,
        ratio: rhs,
        residual,
    })
}

/// One row of the bound table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub k: u64,
    pub r: u64,
    pub bound: f64,
    pub vacuous: bool,
    /// `1 - sqrt(2 ln k / k)`.
    pub asymptote: f64,
    /// `asymptote - bound`.
    pub gap: f64,
    pub unproven_bound: f64,
    /// Present for `k >= 3`.
    pub moderate_dev_estimate: Option<f64>,
    pub poisson_lambda: f64,
    pub poisson_ratio: f64,
    /// `1 - sqrt(ln k / k)`.
    pub poisson_asymptote: f64,
}

pub fn bound_row(k: u64) -> Result<BoundRow> {
    if k == 0 {
        return Err(Error::Config("capacity must be positive".into()));
    }
    let r = recommended_r(k);
    let bound = theorem2_bound(r, k)?;
    let asymptote = single_sample_asymptote(k);
    let poisson = poisson_optimal_lambda(k)?;
    let moderate = if k >= 3 {
        moderate_dev_estimate(k, 2.0).ok().map(|m| m.estimate)
    } else {
        None
    };
    Ok(BoundRow {
        k,
        r,
        bound,
        vacuous: bound <= 0.0,
        asymptote,
        gap: asymptote - bound,
        unproven_bound: unproven_bound(r, k)?,
        moderate_dev_estimate: moderate,
        poisson_lambda: poisson.lambda,
        poisson_ratio: poisson.ratio,
        poisson_asymptote: full_information_asymptote(k),
    })
}

/// Rows for every `k`, sorted ascending and deduplicated.
pub fn bound_table(ks: &[u64]) -> Result<Vec<BoundRow>> {
    if ks.is_empty() {
        return Err(Error::Config("bound table needs at least one k".into()));
    }
    let mut ks = ks.to_vec();
    ks.sort_unstable();
    ks.dedup();
    ks.into_iter().map(bound_row).collect()
}
