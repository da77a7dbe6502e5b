//! Exact verification of the rank lemmas on small ranked scenarios.
//!
//! A scenario fixes `2n` realised values `a_1 > a_2 > ... > a_{2n}` (only
//! their ranks matter) and a perfect matching pairing each buyer's two
//! draws. Each pair independently sends one member to `X` and the other to
//! `Y` with probability 1/2, so there are `2^n` equally likely assignments
//! and every event probability is an exact dyadic rational.
//!
//! Order statistics are ranks: `X^i` is the rank of the `i`-th largest
//! `X`-value, a smaller rank meaning a larger value. `X^0` is rank `0`
//! (value infinity) and `X^i` for `i > n` is rank `2n + 1` (value zero);
//! likewise for `Y`. Comparisons between two sentinels of equal rank are
//! false.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `n` accepted by [`ScenarioSpace::new`].
pub const MAX_ENUMERATION_PAIRS: usize = 12;
/// Largest `n` accepted by [`all_scenarios`] and [`verify_lemmas`].
pub const MAX_SCENARIO_PAIRS: usize = 6;

/// An exact non-negative dyadic rational `numerator / denominator`.
///
/// Event probabilities have `numerator <= denominator`; expectations of
/// counts may exceed one.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Dyadic {
    pub numerator: u64,
    pub denominator: u64,
}

/// Probability of an event over the `2^n` assignments.
pub type EventProbability = Dyadic;

impl Dyadic {
    pub fn new(numerator: u64, denominator: u64) -> Self {
        assert!(denominator > 0, "zero denominator");
        Dyadic {
            numerator,
            denominator,
        }
    }

    /// `self / 2`.
    pub fn halved(self) -> Self {
        Dyadic::new(self.numerator, 2 * self.denominator)
    }

    pub fn to_f64(self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Dyadic {}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.numerator as u128 * other.denominator as u128;
        let rhs = other.numerator as u128 * self.denominator as u128;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

/// A perfect matching on ranks `1..=2n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedScenario {
    /// `partner[rank - 1]` is the rank paired with `rank`.
    partner: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioJson {
    n: usize,
    matching: Vec<(usize, usize)>,
}

impl RankedScenario {
    /// Build from `n` disjoint pairs of ranks covering `1..=2n`.
    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self> {
        let two_n = 2 * pairs.len();
        if pairs.is_empty() {
            return Err(Error::Domain("a scenario needs at least one pair".into()));
        }
        let mut partner = vec![0usize; two_n];
        for &(a, b) in pairs {
            for r in [a, b] {
                if r == 0 || r > two_n {
                    return Err(Error::Domain(format!("rank {r} outside 1..={two_n}")));
                }
                if partner[r - 1] != 0 || a == b {
                    return Err(Error::Domain(format!("rank {r} matched twice")));
                }
            }
            partner[a - 1] = b;
            partner[b - 1] = a;
        }
        Ok(RankedScenario { partner })
    }

    /// Number of pairs.
    pub fn n(&self) -> usize {
        self.partner.len() / 2
    }

    pub fn partner(&self, rank: usize) -> usize {
        self.partner[rank - 1]
    }

    /// Pairs `(a, b)` with `a < b`, ordered by `a`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (1..=self.partner.len())
            .filter(|&a| a < self.partner(a))
            .map(|a| (a, self.partner(a)))
            .collect()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ScenarioJson = serde_json::from_str(text)?;
        if raw.matching.len() != raw.n {
            return Err(Error::Parse(format!(
                "scenario declares n = {} but lists {} pairs",
                raw.n,
                raw.matching.len()
            )));
        }
        RankedScenario::from_pairs(&raw.matching)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ScenarioJson {
            n: self.n(),
            matching: self.pairs(),
        })
        .expect("scenario serialization cannot fail")
    }

    pub fn space(&self) -> Result<ScenarioSpace> {
        ScenarioSpace::new(self)
    }
}

/// All perfect matchings of `1..=2n`, `(2n - 1)!!` of them, in canonical
/// order: the smallest unmatched rank is paired with each larger unmatched
/// rank in increasing order, recursively.
pub fn all_scenarios(n: usize) -> Result<Vec<RankedScenario>> {
    if n == 0 || n > MAX_SCENARIO_PAIRS {
        return Err(Error::Resource(format!(
            "scenario enumeration supports 1 <= n <= {MAX_SCENARIO_PAIRS}, got {n}"
        )));
    }
    fn recurse(
        unmatched: &mut Vec<usize>,
        pairs: &mut Vec<(usize, usize)>,
        out: &mut Vec<RankedScenario>,
    ) {
        if unmatched.is_empty() {
            out.push(RankedScenario::from_pairs(pairs).expect("generated matching is perfect"));
            return;
        }
        let first = unmatched.remove(0);
        for idx in 0..unmatched.len() {
            let other = unmatched.remove(idx);
            pairs.push((first, other));
            recurse(unmatched, pairs, out);
            pairs.pop();
            unmatched.insert(idx, other);
        }
        unmatched.insert(0, first);
    }
    let mut out = Vec::new();
    recurse(&mut (1..=2 * n).collect(), &mut Vec::new(), &mut out);
    Ok(out)
}

/// One of the `2^n` equally likely X/Y splits of a scenario.
#[derive(Debug, Clone)]
pub struct Assignment {
    /// Ranks of the X-values, best first.
    x: Vec<usize>,
    /// Ranks of the Y-values, best first.
    y: Vec<usize>,
    is_x: Vec<bool>,
}

impl Assignment {
    fn sentinel_low(&self) -> usize {
        2 * self.x.len() + 1
    }

    /// Rank of `X^i`.
    pub fn x(&self, i: usize) -> usize {
        match i {
            0 => 0,
            i if i <= self.x.len() => self.x[i - 1],
            _ => self.sentinel_low(),
        }
    }

    /// Rank of `Y^i`.
    pub fn y(&self, i: usize) -> usize {
        match i {
            0 => 0,
            i if i <= self.y.len() => self.y[i - 1],
            _ => self.sentinel_low(),
        }
    }

    /// Whether `a_rank` is an X-value.
    pub fn is_x(&self, rank: usize) -> bool {
        self.is_x[rank - 1]
    }

    /// `X^i > Y^j`.
    pub fn x_beats_y(&self, i: usize, j: usize) -> bool {
        self.x(i) < self.y(j)
    }

    /// `Y^j > X^i`.
    pub fn y_beats_x(&self, j: usize, i: usize) -> bool {
        self.y(j) < self.x(i)
    }

    /// `X^i > Y^j > X^l`.
    pub fn y_between(&self, i: usize, j: usize, l: usize) -> bool {
        self.x_beats_y(i, j) && self.y_beats_x(j, l)
    }

    /// Number of surrogate picks of rank at most `j` (value `>= a_j`) when
    /// the price is `Y^r` and capacity is `k`: the `min(t, k)` lowest of
    /// the `t` X-values above the price.
    pub fn surrogate_picks_at_or_above(&self, r: usize, k: usize, j: usize) -> usize {
        let price = self.y(r);
        let t = self.x.iter().take_while(|&&rank| rank < price).count();
        let m = t.min(k);
        self.x[t - m..t].iter().filter(|&&rank| rank <= j).count()
    }
}

/// A scenario with all of its assignments materialised.
#[derive(Debug, Clone)]
pub struct ScenarioSpace {
    scenario: RankedScenario,
    assignments: Vec<Assignment>,
}

impl ScenarioSpace {
    pub fn new(scenario: &RankedScenario) -> Result<Self> {
        let n = scenario.n();
        if n > MAX_ENUMERATION_PAIRS {
            return Err(Error::Resource(format!(
                "2^{n} assignments exceed the enumeration limit of 2^{MAX_ENUMERATION_PAIRS}"
            )));
        }
        let pairs = scenario.pairs();
        let assignments = (0u64..1 << n)
            .map(|mask| {
                let mut is_x = vec![false; 2 * n];
                for (p, &(hi, lo)) in pairs.iter().enumerate() {
                    let first_is_x = mask >> p & 1 == 1;
                    is_x[hi - 1] = first_is_x;
                    is_x[lo - 1] = !first_is_x;
                }
                let x = (1..=2 * n).filter(|&r| is_x[r - 1]).collect();
                let y = (1..=2 * n).filter(|&r| !is_x[r - 1]).collect();
                Assignment { x, y, is_x }
            })
            .collect();
        Ok(ScenarioSpace {
            scenario: scenario.clone(),
            assignments,
        })
    }

    pub fn scenario(&self) -> &RankedScenario {
        &self.scenario
    }

    pub fn n(&self) -> usize {
        self.scenario.n()
    }

    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    fn denominator(&self) -> u64 {
        self.assignments.len() as u64
    }

    pub fn prob(&self, predicate: impl Fn(&Assignment) -> bool) -> EventProbability {
        let hits = self.assignments.iter().filter(|a| predicate(a)).count() as u64;
        Dyadic::new(hits, self.denominator())
    }

    /// Exact expectation of an integer-valued statistic.
    pub fn expectation(&self, statistic: impl Fn(&Assignment) -> u64) -> Dyadic {
        Dyadic::new(self.assignments.iter().map(statistic).sum(), self.denominator())
    }
}

/// Probability of `predicate` over all assignments of `scenario`.
pub fn event_prob(
    scenario: &RankedScenario,
    predicate: impl Fn(&Assignment) -> bool,
) -> Result<EventProbability> {
    Ok(ScenarioSpace::new(scenario)?.prob(predicate))
}

/// Two sides of an inequality `lhs >= rhs` (or `<=`, see each check).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Comparison {
    pub lhs: Dyadic,
    pub rhs: Dyadic,
    pub holds: bool,
}

impl Comparison {
    fn at_least(lhs: Dyadic, rhs: Dyadic) -> Self {
        Comparison {
            lhs,
            rhs,
            holds: lhs >= rhs,
        }
    }

    fn at_most(lhs: Dyadic, rhs: Dyadic) -> Self {
        Comparison {
            lhs,
            rhs,
            holds: lhs <= rhs,
        }
    }
}

fn domain(msg: String) -> Error {
    Error::Domain(msg)
}

/// `Pr(X^i > Y^{j+1-i}, Y^k > X^{i+k}) >= Pr(X^i > Y^{j+1-i}) / 2`
/// for `j - k < i <= j`, `1 <= k <= n`, `j <= 2n`.
pub fn check_half_lemma(space: &ScenarioSpace, i: usize, j: usize, k: usize) -> Result<Comparison> {
    let n = space.n();
    if !(i >= 1 && i <= j && j < i + k && k >= 1 && k <= n && j <= 2 * n) {
        return Err(domain(format!(
            "half lemma needs j - k < i <= j, 1 <= k <= n, j <= 2n; got i={i} j={j} k={k} n={n}"
        )));
    }
    let m = j + 1 - i;
    let lhs = space.prob(|a| a.x_beats_y(i, m) && a.y_beats_x(k, i + k));
    let rhs = space.prob(|a| a.x_beats_y(i, m)).halved();
    Ok(Comparison::at_least(lhs, rhs))
}

/// `F(i, j, k) = Pr(X^i > Y^j > X^k)`.
pub fn between_prob(space: &ScenarioSpace, i: usize, j: usize, k: usize) -> EventProbability {
    space.prob(|a| a.y_between(i, j, k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InbetweenCheck {
    /// `F(i, j, k) >= F(i, k, k)`.
    pub comparison: Comparison,
    /// `j' -> F(i, j', k)` on `[i, k]` never rises after a strict fall.
    pub unimodal: bool,
    /// `F(i, i, k) = F(i, k, k)`.
    pub endpoints_equal: bool,
}

impl InbetweenCheck {
    pub fn holds(&self) -> bool {
        self.comparison.holds && self.unimodal && self.endpoints_equal
    }
}

/// `Pr(X^i > Y^j > X^k) >= Pr(X^i > Y^k > X^k)` for `1 <= i <= j <= k <= n`.
pub fn check_inbetween_lemma(
    space: &ScenarioSpace,
    i: usize,
    j: usize,
    k: usize,
) -> Result<InbetweenCheck> {
    let n = space.n();
    if !(1 <= i && i <= j && j <= k && k <= n) {
        return Err(domain(format!(
            "in-between lemma needs 1 <= i <= j <= k <= n; got i={i} j={j} k={k} n={n}"
        )));
    }
    let profile: Vec<Dyadic> = (i..=k).map(|jj| between_prob(space, i, jj, k)).collect();
    let mut fell = false;
    let mut unimodal = true;
    for w in profile.windows(2) {
        match w[1].cmp(&w[0]) {
            Ordering::Less => fell = true,
            Ordering::Greater if fell => unimodal = false,
            _ => {}
        }
    }
    let first = profile[0];
    let last = *profile.last().expect("non-empty profile");
    Ok(InbetweenCheck {
        comparison: Comparison::at_least(profile[j - i], last),
        unimodal,
        endpoints_equal: first == last,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClaimCheck {
    /// `Pr(X^{j-1} > Y^i > X^j) >= Pr(X^j > Y^i > X^{j+1})`.
    pub lower_index: Comparison,
    /// `Pr(X^{j-1} > Y^k > X^j) <= Pr(X^j > Y^k > X^{j+1})`.
    pub upper_index: Comparison,
}

impl ClaimCheck {
    pub fn holds(&self) -> bool {
        self.lower_index.holds && self.upper_index.holds
    }
}

/// Monotonicity of the gap probabilities for `1 <= i < j < k <= n`.
pub fn check_claim_monotone(
    space: &ScenarioSpace,
    i: usize,
    j: usize,
    k: usize,
) -> Result<ClaimCheck> {
    let n = space.n();
    if !(1 <= i && i < j && j < k && k <= n) {
        return Err(domain(format!(
            "monotone claim needs 1 <= i < j < k <= n; got i={i} j={j} k={k} n={n}"
        )));
    }
    let gap = |y: usize, jj: usize| between_prob(space, jj - 1, y, jj);
    Ok(ClaimCheck {
        lower_index: Comparison::at_least(gap(i, j), gap(i, j + 1)),
        upper_index: Comparison::at_most(gap(k, j), gap(k, j + 1)),
    })
}

fn binomial(n: usize, t: usize) -> u64 {
    if t > n {
        return 0;
    }
    let t = t.min(n - t);
    (0..t).fold(1u64, |c, i| c * (n - i) as u64 / (i + 1) as u64)
}

/// Closed form of `Pr(X^{j-1} > Y^i > X^j)` from the pairing structure of
/// the first `i + j - 1` ranks, with `l` the number of pairs lying wholly
/// inside that prefix:
///
/// * `C(i+j-2l-2, j-l-1) / 2^{i+j-2l-1}` if `a_{i+j-1}`'s partner ranks lower,
/// * `C(i+j-2l-1, j-l-1) / 2^{i+j-2l}` otherwise.
pub fn gap_case_formula(scenario: &RankedScenario, i: usize, j: usize) -> Result<Dyadic> {
    let two_n = 2 * scenario.n();
    if !(i >= 1 && j >= 2 && i + j - 1 <= two_n) {
        return Err(domain(format!(
            "case formula needs i >= 1, j >= 2, i + j - 1 <= 2n; got i={i} j={j}"
        )));
    }
    let last = i + j - 1;
    let l = (1..=last).filter(|&a| a < scenario.partner(a) && scenario.partner(a) <= last).count();
    let paired = scenario.partner(last) < last;
    // i + j - 1 - 2l >= 1 when unpaired, >= 0 when paired
    let (trials, exponent) = if paired {
        (i + j - 2 * l - 1, i + j - 2 * l)
    } else {
        (i + j - 2 * l - 2, i + j - 2 * l - 1)
    };
    let numerator = match (j - 1).checked_sub(l) {
        Some(t) => binomial(trials, t),
        None => 0,
    };
    Ok(Dyadic::new(numerator, 1u64 << exponent))
}

/// Enumerated `Pr(X^{j-1} > Y^i > X^j)` against [`gap_case_formula`].
pub fn check_claim_case_formula(space: &ScenarioSpace, i: usize, j: usize) -> Result<Comparison> {
    let formula = gap_case_formula(space.scenario(), i, j)?;
    let enumerated = between_prob(space, j - 1, i, j);
    Ok(Comparison {
        lhs: enumerated,
        rhs: formula,
        holds: enumerated == formula,
    })
}

/// `E[#surrogate picks >= a_j] >= (1/2) sum_{i=1}^k Pr(X^i > Y^{j+1-i})`
/// with price `Y^k`, for `1 <= k <= n`, `1 <= j <= 2n`.
pub fn check_main_inequality(space: &ScenarioSpace, k: usize, j: usize) -> Result<Comparison> {
    let n = space.n();
    if !(1 <= k && k <= n && 1 <= j && j <= 2 * n) {
        return Err(domain(format!(
            "main inequality needs 1 <= k <= n, 1 <= j <= 2n; got k={k} j={j} n={n}"
        )));
    }
    let lhs = space.expectation(|a| a.surrogate_picks_at_or_above(k, k, j) as u64);
    // Y^{j+1-i} with j + 1 - i <= 0 is the infinite sentinel
    let rhs = space
        .expectation(|a| {
            (1..=k.min(j))
                .filter(|&i| a.x_beats_y(i, j + 1 - i))
                .count() as u64
        })
        .halved();
    Ok(Comparison::at_least(lhs, rhs))
}

/// A failed check, serialised into the verify-lemmas summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub lemma: String,
    pub n: usize,
    /// Position of the scenario in [`all_scenarios`] order.
    pub scenario_index: usize,
    pub matching: Vec<(usize, usize)>,
    pub indices: BTreeMap<String, usize>,
    pub lhs: String,
    pub rhs: String,
    pub detail: String,
}

/// Output of [`verify_lemmas`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    /// Largest number of pairs enumerated.
    pub n: usize,
    pub scenarios_checked: u64,
    pub tuples_checked_per_lemma: BTreeMap<String, u64>,
    pub violations: Vec<Violation>,
}

pub const LEMMA_HALF: &str = "half_lemma";
pub const LEMMA_INBETWEEN: &str = "inbetween_lemma";
pub const LEMMA_CLAIM: &str = "claim_monotone";
pub const LEMMA_CASE_FORMULA: &str = "claim_case_formula";
pub const LEMMA_MAIN: &str = "main_inequality";

#[derive(Default)]
struct ScenarioOutcome {
    counts: BTreeMap<&'static str, u64>,
    violations: Vec<Violation>,
}

impl ScenarioOutcome {
    fn record(
        &mut self,
        scenario: &RankedScenario,
        index: usize,
        lemma: &'static str,
        indices: &[(&str, usize)],
        cmp: Comparison,
        ok: bool,
        detail: &str,
    ) {
        *self.counts.entry(lemma).or_default() += 1;
        if !ok {
            self.violations.push(Violation {
                lemma: lemma.to_string(),
                n: scenario.n(),
                scenario_index: index,
                matching: scenario.pairs(),
                indices: indices.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
                lhs: cmp.lhs.to_string(),
                rhs: cmp.rhs.to_string(),
                detail: detail.to_string(),
            });
        }
    }
}

/// Run every check over every eligible index tuple of one scenario.
fn check_scenario(scenario: &RankedScenario, index: usize) -> Result<ScenarioOutcome> {
    let space = ScenarioSpace::new(scenario)?;
    let n = space.n();
    let mut out = ScenarioOutcome::default();

    for k in 1..=n {
        for j in 1..=2 * n {
            for i in (j + 1).saturating_sub(k).max(1)..=j {
                let c = check_half_lemma(&space, i, j, k)?;
                out.record(scenario, index, LEMMA_HALF, &[("i", i), ("j", j), ("k", k)], c, c.holds, "");
            }
            let c = check_main_inequality(&space, k, j)?;
            out.record(scenario, index, LEMMA_MAIN, &[("j", j), ("k", k)], c, c.holds, "");
        }
    }

    for i in 1..=n {
        for k in i..=n {
            for j in i..=k {
                let c = check_inbetween_lemma(&space, i, j, k)?;
                let detail = match (c.comparison.holds, c.unimodal, c.endpoints_equal) {
                    (true, true, true) => "",
                    (false, _, _) => "inequality fails",
                    (_, false, _) => "profile not unimodal",
                    _ => "endpoints differ",
                };
                let idx = [("i", i), ("j", j), ("k", k)];
                out.record(scenario, index, LEMMA_INBETWEEN, &idx, c.comparison, c.holds(), detail);
            }
            for j in i + 1..k {
                let c = check_claim_monotone(&space, i, j, k)?;
                let idx = [("i", i), ("j", j), ("k", k)];
                out.record(scenario, index, LEMMA_CLAIM, &idx, c.lower_index, c.lower_index.holds, "lower index");
                out.record(scenario, index, LEMMA_CLAIM, &idx, c.upper_index, c.upper_index.holds, "upper index");
            }
        }
    }

    for i in 1..=n {
        for j in 2..=n {
            let c = check_claim_case_formula(&space, i, j)?;
            out.record(scenario, index, LEMMA_CASE_FORMULA, &[("i", i), ("j", j)], c, c.holds, "");
        }
    }
    Ok(out)
}

/// Exhaust every check over every scenario with `1..=n_max` pairs.
///
/// Scenarios are checked in parallel; counts and violations are merged in
/// canonical scenario order, so the summary does not depend on `threads`
/// (0 uses the global pool).
pub fn verify_lemmas(n_max: usize, threads: usize) -> Result<VerifySummary> {
    if n_max == 0 || n_max > MAX_SCENARIO_PAIRS {
        return Err(Error::Resource(format!(
            "verify-lemmas supports 1 <= n_max <= {MAX_SCENARIO_PAIRS}, got {n_max}"
        )));
    }
    let body = || -> Result<VerifySummary> {
        let mut summary = VerifySummary {
            n: n_max,
            scenarios_checked: 0,
            tuples_checked_per_lemma: [LEMMA_HALF, LEMMA_INBETWEEN, LEMMA_CLAIM, LEMMA_CASE_FORMULA, LEMMA_MAIN]
                .iter()
                .map(|l| (l.to_string(), 0))
                .collect(),
            violations: Vec::new(),
        };
        for n in 1..=n_max {
            let scenarios = all_scenarios(n)?;
            let outcomes: Vec<Result<ScenarioOutcome>> = scenarios
                .par_iter()
                .enumerate()
                .map(|(idx, s)| check_scenario(s, idx))
                .collect();
            for outcome in outcomes {
                let outcome = outcome?;
                summary.scenarios_checked += 1;
                for (lemma, count) in outcome.counts {
                    *summary.tuples_checked_per_lemma.entry(lemma.to_string()).or_default() += count;
                }
                summary.violations.extend(outcome.violations);
            }
        }
        Ok(summary)
    };
    if threads == 0 {
        body()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {threads} workers: {e}")))?
            .install(body)
    }
}
