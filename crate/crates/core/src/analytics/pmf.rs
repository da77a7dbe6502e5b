//! Log-space binomial and Poisson masses.
//!
//! Uses Loader's saddle-point expansion: a Stirling remainder term plus a
//! cancellation-free deviance `bd0`. Relative accuracy is close to machine
//! precision for any `n` that fits in memory, unlike differences of
//! `ln Γ` values which lose digits as `n` grows.

use std::f64::consts::{LN_2, PI};

/// Below this `n` the half-binomial mass `C(n, t) / 2^n` is exact in f64.
const EXACT_HALF_BINOMIAL_MAX_N: u64 = 56;

/// `ln Γ(n + 1) - (n + 1/2) ln n + n - ln √(2π)` for `n = 0..=15`.
const STIRLERR_TABLE: [f64; 16] = [
    0.0,
    0.081_061_466_795_327_258_219_67,
    0.041_340_695_955_409_294_093_82,
    0.027_677_925_684_998_339_148_79,
    0.020_790_672_103_765_093_111_52,
    0.016_644_691_189_821_192_163_19,
    0.013_876_128_823_070_747_998_75,
    0.011_896_709_945_891_770_095_06,
    0.010_411_265_261_972_096_497_48,
    0.009_255_462_182_712_732_917_729,
    0.008_330_563_433_362_871_256_469,
    0.007_573_675_487_951_840_794_972,
    0.006_942_840_107_209_529_865_664,
    0.006_408_994_188_004_207_068_44,
    0.005_951_370_112_758_847_735_624,
    0.005_554_733_551_962_801_371_039,
];

/// Remainder of Stirling's series for `ln n!`.
pub(crate) fn stirlerr(n: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n < STIRLERR_TABLE.len() as u64 {
        return STIRLERR_TABLE[n as usize];
    }
    let nf = n as f64;
    let nn = nf * nf;
    if n > 500 {
        (S0 - S1 / nn) / nf
    } else if n > 80 {
        (S0 - (S1 - S2 / nn) / nn) / nf
    } else if n > 35 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / nf
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / nf
    }
}

/// Deviance term `x ln(x/np) + np - x`, evaluated without cancellation.
pub(crate) fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        let mut j = 1.0;
        loop {
            ej *= v2;
            let s1 = s + ej / (2.0 * j + 1.0);
            if s1 == s {
                return s1;
            }
            s = s1;
            j += 1.0;
        }
    }
    x * (x / np).ln() + np - x
}

/// Exact `C(n, t)` for small `n`.
fn small_binomial(n: u64, t: u64) -> u64 {
    let t = t.min(n - t);
    let mut c: u128 = 1;
    for i in 0..t {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c as u64
}

/// `ln( C(n, t) / 2^n )`.
pub(crate) fn ln_half_binom_pmf(n: u64, t: u64) -> f64 {
    debug_assert!(t <= n);
    // canonical side keeps the mass bitwise symmetric in t <-> n - t
    let t = t.min(n - t);
    if t == 0 {
        return -(n as f64) * LN_2;
    }
    let nf = n as f64;
    let tf = t as f64;
    let uf = (n - t) as f64;
    let half = 0.5 * nf;
    stirlerr(n) - stirlerr(t) - stirlerr(n - t) - bd0(tf, half) - bd0(uf, half)
        + 0.5 * (nf / (2.0 * PI * tf * uf)).ln()
}

/// `C(n, t) / 2^n`, zero for `t > n`.
pub fn half_binom_pmf(n: u64, t: u64) -> f64 {
    if t > n {
        return 0.0;
    }
    if n <= EXACT_HALF_BINOMIAL_MAX_N {
        return small_binomial(n, t) as f64 * 0.5f64.powi(n as i32);
    }
    ln_half_binom_pmf(n, t).exp()
}

/// `ln Pr(Poisson(lambda) = t)` for `lambda > 0`.
pub(crate) fn ln_poisson_pmf(t: u64, lambda: f64) -> f64 {
    if t == 0 {
        return -lambda;
    }
    let tf = t as f64;
    -stirlerr(t) - bd0(tf, lambda) - 0.5 * (2.0 * PI * tf).ln()
}

pub fn poisson_pmf(t: u64, lambda: f64) -> f64 {
    ln_poisson_pmf(t, lambda).exp()
}

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sum `f(lo..=hi)` smallest terms first, given that `f` is unimodal on the
/// range: a two-pointer merge from both ends visits terms in ascending order.
pub(crate) fn sum_unimodal_ascending(lo: u64, hi: u64, f: impl Fn(u64) -> f64) -> f64 {
    if lo > hi {
        return 0.0;
    }
    let mut acc = CompensatedSum::default();
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    loop {
        if a == b {
            acc.add(fa);
            break;
        }
        if fa <= fb {
            acc.add(fa);
            a += 1;
            fa = f(a);
        } else {
            acc.add(fb);
            b -= 1;
            fb = f(b);
        }
    }
    acc.value()
}

/// Indices of `Binom(n, 1/2)` outside this window have masses that
/// underflow to zero.
pub(crate) fn half_binom_window(n: u64) -> (u64, u64) {
    let width = (40.0 * (n as f64).sqrt()).ceil() as u64 + 50;
    let lo = (n / 2).saturating_sub(width);
    (lo, n - lo)
}

/// Same for `Poisson(lambda)`.
pub(crate) fn poisson_window(lambda: f64) -> (u64, u64) {
    let width = 40.0 * lambda.sqrt() + 50.0;
    let lo = (lambda - width).max(0.0).floor() as u64;
    let hi = (lambda + width).ceil() as u64;
    (lo, hi)
}
