//! Prime enumeration, primality, and the analytic quantities built on them.
//!
//! The sieve is segmented and stores odd numbers only; each segment covers
//! [`SEGMENT_ODDS`] odd integers. Segments are independent, so callers with a
//! thread pool can hand them to an [`Executor`].

mod gaps;
mod pairs;
mod smooth;

pub use gaps::{
    iterated_log, max_gap, max_gap_with, rankin_lower_bound, rankin_lower_bound_from_log, record_gaps,
    record_gaps_with, GapRecord,
};
pub use pairs::{circle_identity_check, theta_discrepancy, twin_constant, twin_pair_sum, CircleCheck};
pub use smooth::{optimize_eta, psi_exact, psi_exact_with, rankin_upper_bound, EtaOptimum, RankinBound};

use crate::arith::{mul_mod, pow_mod};
use crate::exec::{Executor, Sequential};
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Odd integers per sieve segment.
pub const SEGMENT_ODDS: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DomainError {
    #[error("iterated logarithm undefined: intermediate value {value} <= 0 at depth {depth}")]
    IteratedLog { depth: u32, value: f64 },
    #[error("argument outside domain: {0}")]
    Argument(&'static str),
}

/// All primes `<= limit` by a plain sieve; used for base primes.
pub fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Primes in `[lo, hi)`, ascending.
pub fn sieve_segment(lo: u64, hi: u64) -> Vec<u64> {
    sieve_segment_with(lo, hi, &Sequential)
}

/// [`sieve_segment`] with segments dispatched through `exec`.
pub fn sieve_segment_with<E: Executor>(lo: u64, hi: u64, exec: &E) -> Vec<u64> {
    let mut out = Vec::new();
    if hi <= lo || hi <= 2 {
        return out;
    }
    if lo <= 2 {
        out.push(2);
    }
    let (segments, first_odd, base) = segment_layout(lo, hi);
    let parts = exec.map_chunks(segments, |i| odd_segment(first_odd + 2 * SEGMENT_ODDS * i as u64, hi, &base));
    for part in parts {
        out.extend(part);
    }
    out
}

/// Segment count, first odd integer `>= max(lo, 3)`, and base primes.
fn segment_layout(lo: u64, hi: u64) -> (usize, u64, Vec<u64>) {
    let start = lo.max(3) | 1;
    if start >= hi {
        return (0, start, Vec::new());
    }
    let odds = (hi - start).div_ceil(2);
    let segments = odds.div_ceil(SEGMENT_ODDS) as usize;
    let base = small_primes(crate::arith::isqrt(hi - 1));
    (segments, start, base)
}

/// Odd primes in `[start, min(start + 2*SEGMENT_ODDS, hi))`; `start` is odd.
fn odd_segment(start: u64, hi: u64, base: &[u64]) -> Vec<u64> {
    let end = (start + 2 * SEGMENT_ODDS).min(hi);
    if end <= start {
        return Vec::new();
    }
    let count = (end - start).div_ceil(2) as usize;
    let mut bits = vec![0u64; count.div_ceil(64)];
    for &p in base.iter().skip(1) {
        if p * p >= end {
            break;
        }
        let mut m = (p * p).max(start.div_ceil(p) * p);
        if m % 2 == 0 {
            m += p;
        }
        let mut idx = ((m - start) / 2) as usize;
        while idx < count {
            bits[idx / 64] |= 1 << (idx % 64);
            idx += p as usize;
        }
    }
    let mut out = Vec::new();
    for idx in 0..count {
        if bits[idx / 64] >> (idx % 64) & 1 == 0 {
            let n = start + 2 * idx as u64;
            if n > 1 {
                out.push(n);
            }
        }
    }
    out
}

/// Ascending primes `<= limit` with `pi(x)` and membership by binary search.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    primes: Vec<u64>,
    limit: u64,
}

impl PrimeTable {
    pub fn new(limit: u64) -> Self {
        Self::with_executor(limit, &Sequential)
    }

    pub fn with_executor<E: Executor>(limit: u64, exec: &E) -> Self {
        Self { primes: sieve_segment_with(0, limit.saturating_add(1), exec), limit }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Number of primes `<= x`, for `x <= limit`.
    pub fn pi(&self, x: u64) -> usize {
        self.primes.partition_point(|&p| p <= x)
    }

    pub fn contains(&self, n: u64) -> bool {
        self.primes.binary_search(&n).is_ok()
    }

    /// Primes in `(lo, hi]`.
    pub fn range(&self, lo: u64, hi: u64) -> &[u64] {
        let a = self.primes.partition_point(|&p| p <= lo);
        let b = self.primes.partition_point(|&p| p <= hi);
        &self.primes[a..b.max(a)]
    }
}

/// Verdict of a primality test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Primality {
    Composite,
    Prime,
    /// Passed Miller-Rabin for every base tried; no proof attempted.
    ProbablePrime,
}

impl Primality {
    /// True for both proven and probable primes.
    pub fn is_prime(self) -> bool {
        !matches!(self, Primality::Composite)
    }
}

const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
// Deterministic for every n < 2^64.
const MR_BASES_U64: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];

/// Deterministic primality for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for a in MR_BASES_U64 {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Primality of an arbitrary-size integer. Values below 2^64 get a proof;
/// larger ones are tested with the first 64 primes as Miller-Rabin bases.
pub fn is_prime_big(n: &BigUint) -> Primality {
    if let Some(v) = n.to_u64() {
        return if is_prime(v) { Primality::Prime } else { Primality::Composite };
    }
    let bases = small_primes(311);
    debug_assert_eq!(bases.len(), 64);
    for &p in &bases {
        if (n % p).is_zero() {
            return Primality::Composite;
        }
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'bases: for &a in &bases {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == n_minus_1 {
                continue 'bases;
            }
        }
        return Primality::Composite;
    }
    Primality::ProbablePrime
}

/// Smallest prime `> n`.
pub fn next_prime_big(n: &BigUint) -> BigUint {
    let mut c = n + 1u32;
    while !is_prime_big(&c).is_prime() {
        c += 1u32;
    }
    c
}

/// Largest prime `< n`, if any.
pub fn prev_prime_big(n: &BigUint) -> Option<BigUint> {
    let two = BigUint::from(2u32);
    if *n <= two {
        return None;
    }
    let mut c = n - 1u32;
    while !is_prime_big(&c).is_prime() {
        c -= 1u32;
    }
    Some(c)
}

/// Product of all primes strictly below `x`.
pub fn primorial(x: u64) -> BigUint {
    let mut acc = BigUint::one();
    // Multiply word-sized batches first to keep the big products few.
    let mut batch: u64 = 1;
    for p in sieve_segment(0, x) {
        match batch.checked_mul(p) {
            Some(b) => batch = b,
            None => {
                acc *= batch;
                batch = p;
            }
        }
    }
    acc * batch
}
