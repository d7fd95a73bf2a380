//! Exact counting of Zimin instances and exact evaluation of the upper and
//! lower bounds on `f(n, q)`.
//!
//! `C(n, q, M)` is the set of `q`-ary words of length `M` that are
//! `Z_n`-instances. Counts are words (set membership); the first-moment
//! bound instead counts subword occurrences, bounding each of the
//! `binom(M+1, 2)` spans by the per-length instance probability.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::pattern::{zimin_instance_slice, zimin_length};

/// Decimal digits beyond which bounds are kept in tower form.
pub const DEFAULT_DIGIT_CAP: u64 = 1_000_000;
/// Largest `q^M` that [`count_instances`] will enumerate.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 100_000_000;

const CHUNK: u64 = 1 << 15;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceCount {
    pub n: usize,
    pub q: usize,
    pub length: usize,
    pub count: BigUint,
}

/// Exact value of a bound, or a tower `base^base^...^base` of `height` copies
/// when the integer would exceed the digit cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundValue {
    Integer(BigUint),
    Rational(BigRational),
    Tower { base: u64, height: u32 },
}

impl BoundValue {
    pub fn as_integer(&self) -> Option<&BigUint> {
        match self {
            BoundValue::Integer(v) => Some(v),
            _ => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            BoundValue::Integer(v) => json!({ "kind": "integer", "value": v.to_string() }),
            BoundValue::Rational(r) => json!({ "kind": "rational", "value": r.to_string() }),
            BoundValue::Tower { base, height } => {
                json!({ "kind": "tower", "base": base, "height": height })
            }
        }
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundValue::Integer(v) => write!(f, "{v}"),
            BoundValue::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            BoundValue::Tower { base, height } => write!(f, "tower(base {base}, height {height})"),
        }
    }
}

/// Upper bound on the expected number of `Z_n`-instance subword occurrences
/// in a uniformly random word of length `length`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentBound {
    pub n: usize,
    pub q: usize,
    pub length: u64,
    pub expectation_upper: BigRational,
}

/// Both sides of `|C(n,q,M+1)| >= q |C(n,q,M)|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotonicityCheck {
    pub n: usize,
    pub q: usize,
    pub length: usize,
    pub longer_count: BigUint,
    pub scaled_count: BigUint,
}

impl MonotonicityCheck {
    pub fn holds(&self) -> bool {
        self.longer_count >= self.scaled_count
    }

    pub fn is_equality(&self) -> bool {
        self.longer_count == self.scaled_count
    }
}

fn rational(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn pow_rational(base: &BigRational, exp: i64) -> BigRational {
    let magnitude = num_traits::pow(base.clone(), exp.unsigned_abs() as usize);
    if exp < 0 {
        magnitude.recip()
    } else {
        magnitude
    }
}

fn need_q_at_least_two(q: usize) -> Result<()> {
    if q < 2 {
        return Err(Error::Domain(format!("bound needs q >= 2, got {q}")));
    }
    Ok(())
}

fn need_n_positive(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    Ok(())
}

/// `2^n` as an exponent, refusing values whose powers of `q` would blow the digit cap.
fn two_pow(n: usize, q: usize, digit_cap: u64) -> Result<i64> {
    let digits = (n as f64) * 2f64.log10();
    let limit = (digit_cap as f64 / (q as f64).log10().max(1e-9)).log10();
    if n >= 62 || digits > limit {
        return Err(Error::Size {
            what: format!("q^(2^{n}) for q = {q}"),
            limit: digit_cap,
        });
    }
    Ok(1i64 << n)
}

/// `|C(n, q, M)|` by enumerating all `q^M` words, within the default budget.
pub fn count_instances(n: usize, q: usize, length: usize) -> Result<InstanceCount> {
    count_instances_with_budget(n, q, length, DEFAULT_ENUMERATION_BUDGET)
}

pub fn count_instances_with_budget(
    n: usize,
    q: usize,
    length: usize,
    budget: u64,
) -> Result<InstanceCount> {
    if q == 0 || q > 255 {
        return Err(Error::Domain(format!("alphabet size {q} outside 1..=255")));
    }
    let total = (q as u64)
        .checked_pow(length as u32)
        .filter(|&t| t <= budget)
        .ok_or_else(|| Error::Size {
            what: format!("{q}^{length} words"),
            limit: budget,
        })?;
    let count = if zimin_length(n).is_none_or(|min| length < min) {
        0
    } else {
        let chunks = total.div_ceil(CHUNK);
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let lo = c * CHUNK;
                let hi = (lo + CHUNK).min(total);
                count_range(n, q, length, lo, hi)
            })
            .sum()
    };
    Ok(InstanceCount {
        n,
        q,
        length,
        count: BigUint::from(count),
    })
}

/// Instances among the words with base-`q` index in `lo..hi`.
fn count_range(n: usize, q: usize, length: usize, lo: u64, hi: u64) -> u64 {
    let mut word = vec![0u8; length];
    let mut i = lo;
    for slot in word.iter_mut().rev() {
        *slot = (i % q as u64) as u8;
        i /= q as u64;
    }
    let mut found = 0;
    for _ in lo..hi {
        if zimin_instance_slice(&word, n) {
            found += 1;
        }
        for slot in word.iter_mut().rev() {
            *slot += 1;
            if (*slot as usize) < q {
                break;
            }
            *slot = 0;
        }
    }
    found
}

pub fn check_monotonicity(n: usize, q: usize, length: usize) -> Result<MonotonicityCheck> {
    let shorter = count_instances(n, q, length)?;
    let longer = count_instances(n, q, length + 1)?;
    Ok(MonotonicityCheck {
        n,
        q,
        length,
        longer_count: longer.count,
        scaled_count: shorter.count * BigUint::from(q),
    })
}

/// `(q/(q-1))^(n-1) * q^(M - 2^n + n + 1)`, an upper bound on `|C(n, q, M)|`.
pub fn lemma2_bound(n: usize, q: usize, length: usize) -> Result<BigRational> {
    need_q_at_least_two(q)?;
    need_n_positive(n)?;
    let two_n = two_pow(n, q, DEFAULT_DIGIT_CAP)?;
    let ratio = BigRational::new(BigInt::from(q), BigInt::from(q - 1));
    let exp = length as i64 - two_n + n as i64 + 1;
    Ok(pow_rational(&ratio, n as i64 - 1) * pow_rational(&rational(q), exp))
}

/// `(q/(q-1))^(n-1) * q^(-2^n + n + 1)`: bound on the probability that a
/// uniform word of any fixed length is a `Z_n`-instance.
pub fn probability_bound(n: usize, q: usize) -> Result<BigRational> {
    lemma2_bound(n, q, 0)
}

/// `|C(n, q, M)| / q^M`.
pub fn instance_probability(n: usize, q: usize, length: usize) -> Result<BigRational> {
    let c = count_instances(n, q, length)?;
    let total = num_traits::pow(BigInt::from(q), length);
    Ok(BigRational::new(BigInt::from(c.count), total))
}

/// `binom(M+1, 2) * (q/(q-1))^(n-1) * q^(-2^n + n + 1)`.
pub fn moment_bound(n: usize, q: usize, length: u64) -> Result<MomentBound> {
    let spans = BigInt::from(length) * BigInt::from(length + 1) / 2;
    Ok(MomentBound {
        n,
        q,
        length,
        expectation_upper: rational(spans) * probability_bound(n, q)?,
    })
}

/// Largest `M` whose [`moment_bound`] is below 1, so that some word of
/// length `M` avoids `Z_n`. Zero for `n = 1`.
pub fn first_moment_max_length(n: usize, q: usize) -> Result<BigUint> {
    need_q_at_least_two(q)?;
    need_n_positive(n)?;
    if n == 1 {
        return Ok(BigUint::zero());
    }
    // M(M+1)/2 * a/b < 1  <=>  M(M+1) * a < 2b
    let c = probability_bound(n, q)?;
    let a = c.numer().to_biguint().expect("positive");
    let two_b = c.denom().to_biguint().expect("positive") * 2u32;
    let fits = |m: &BigUint| m * (m + 1u32) * &a < two_b;
    let mut lo = BigUint::zero();
    let mut hi = BigUint::one();
    while fits(&hi) {
        lo = hi.clone();
        hi <<= 1;
    }
    while &hi - &lo > BigUint::one() {
        let mid: BigUint = (&lo + &hi) >> 1;
        if fits(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

fn digits_of_power(base: u64, exponent: &BigUint) -> f64 {
    exponent.to_f64().unwrap_or(f64::INFINITY) * (base as f64).log10()
}

/// `^(n-1) Q` with `Q = 2q + 1`: a tower of `n - 1` copies of `Q` (1 for `n = 1`).
pub fn tower_upper_bound(n: usize, q: usize) -> Result<BoundValue> {
    tower_upper_bound_with_cap(n, q, DEFAULT_DIGIT_CAP)
}

pub fn tower_upper_bound_with_cap(n: usize, q: usize, digit_cap: u64) -> Result<BoundValue> {
    need_n_positive(n)?;
    let base = 2 * q as u64 + 1;
    let height = (n - 1) as u32;
    let mut value = BigUint::one();
    for _ in 0..height {
        if digits_of_power(base, &value) > digit_cap as f64 {
            return Ok(BoundValue::Tower { base, height });
        }
        let exp = value.to_u32().expect("bounded by the digit cap");
        value = num_traits::pow(BigUint::from(base), exp as usize);
    }
    Ok(BoundValue::Integer(value))
}

/// Iterates `T_1 = 1`, `T_{k+1} = (T_k + 1)(q^{T_k} + 1) - 1` up to `T_n`.
///
/// Past the digit cap the value is replaced by the tower `^(n-1)(2q+1)`,
/// which dominates it.
pub fn recurrence_upper_bound(n: usize, q: usize) -> Result<BoundValue> {
    recurrence_upper_bound_with_cap(n, q, DEFAULT_DIGIT_CAP)
}

pub fn recurrence_upper_bound_with_cap(n: usize, q: usize, digit_cap: u64) -> Result<BoundValue> {
    need_n_positive(n)?;
    let mut t = BigUint::one();
    for _ in 1..n {
        if q >= 2 && digits_of_power(q as u64, &t) > digit_cap as f64 {
            return Ok(BoundValue::Tower {
                base: 2 * q as u64 + 1,
                height: (n - 1) as u32,
            });
        }
        let power = if q <= 1 {
            BigUint::from(q)
        } else {
            num_traits::pow(
                BigUint::from(q),
                t.to_usize().expect("bounded by the digit cap"),
            )
        };
        t = (&t + 1u32) * (power + 1u32) - 1u32;
    }
    Ok(BoundValue::Integer(t))
}

/// One length of a lemma sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepRow {
    pub length: usize,
    pub count: BigUint,
    pub bound: BigRational,
    pub probability: BigRational,
    pub next_count: BigUint,
}

impl SweepRow {
    pub fn within_bound(&self) -> bool {
        rational(BigInt::from(self.count.clone())) <= self.bound
    }

    pub fn monotone(&self, q: usize) -> bool {
        self.next_count >= &self.count * BigUint::from(q)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaSweep {
    pub n: usize,
    pub q: usize,
    pub rows: Vec<SweepRow>,
}

impl LemmaSweep {
    /// Lengths whose count exceeds the bound, violate monotonicity, or whose
    /// probability drops below the previous length's.
    pub fn violations(&self) -> Vec<usize> {
        let mut bad = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            let prob_drop = i > 0 && row.probability < self.rows[i - 1].probability;
            if !row.within_bound() || !row.monotone(self.q) || prob_drop {
                bad.push(row.length);
            }
        }
        bad
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<_> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                json!({
                    "M": r.length,
                    "count": r.count.to_string(),
                    "lemma2_bound": r.bound.to_string(),
                    "count_within_bound": r.within_bound(),
                    "next_count": r.next_count.to_string(),
                    "monotone": r.monotone(self.q),
                    "monotone_equality": r.next_count == &r.count * BigUint::from(self.q),
                    "probability": r.probability.to_string(),
                    "probability_non_decreasing": i == 0 || r.probability >= self.rows[i - 1].probability,
                })
            })
            .collect();
        json!({ "n": self.n, "q": self.q, "rows": rows, "violations": self.violations() })
    }
}

/// Counts, bounds and monotonicity for every `M` from `2^n - 1` to `max_length`.
pub fn lemma_sweep(n: usize, q: usize, max_length: usize) -> Result<LemmaSweep> {
    need_q_at_least_two(q)?;
    need_n_positive(n)?;
    let start = zimin_length(n).ok_or_else(|| Error::Size {
        what: format!("Z_{n}"),
        limit: usize::BITS as u64,
    })?;
    let mut rows = Vec::new();
    let mut count = count_instances(n, q, start)?.count;
    for length in start..=max_length {
        let next_count = count_instances(n, q, length + 1)?.count;
        let total = num_traits::pow(BigInt::from(q), length);
        rows.push(SweepRow {
            length,
            bound: lemma2_bound(n, q, length)?,
            probability: BigRational::new(BigInt::from(count.clone()), total),
            count,
            next_count: next_count.clone(),
        });
        count = next_count;
    }
    Ok(LemmaSweep { n, q, rows })
}
