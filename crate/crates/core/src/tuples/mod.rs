//! Admissible tuples and the sieve weights used to find several primes in
//! one tuple.

mod gpy;
mod maynard;
mod simplex;

pub use gpy::{gpy_lambda, gpy_weight, s_statistic, GpyConfig, SStatistic};
pub use maynard::{
    maynard_state, maynard_weight, omega_count, singular_series, singular_series_excluding, w_factor, LinearForm,
    LinearFormSet, MaynardConfig, MaynardWeightState, OmegaInfo, SingularSeries, TupleError, WFactor,
};
pub use simplex::{ik_jk, ik_jk_with, power_closed_form, IkJk, SimplexFunction, IKJK_CHUNK};

use crate::primes::sieve_segment;
use alloc::collections::BTreeSet;
use alloc::vec::Vec;

/// True when no prime `p` has the offsets covering every residue mod `p`.
/// Only primes `p <= len` can fail, so only those are checked. Offsets are
/// expected to be distinct.
pub fn is_admissible(offsets: &[i64]) -> bool {
    let k = offsets.len() as u64;
    sieve_segment(0, k + 1).into_iter().all(|p| {
        let residues: BTreeSet<i64> = offsets.iter().map(|h| h.rem_euclid(p as i64)).collect();
        (residues.len() as u64) < p
    })
}

/// The `r` consecutive primes following `pi(r)`: `p_{pi(r)+1}, ..., p_{pi(r)+r}`.
/// Every such tuple is admissible because each entry exceeds `r`.
pub fn first_primes_tuple(r: usize) -> Vec<i64> {
    let mut limit = 16u64.max(4 * r as u64);
    loop {
        let primes = sieve_segment(0, limit);
        let start = primes.partition_point(|&p| p <= r as u64);
        if primes.len() >= start + r {
            return primes[start..start + r].iter().map(|&p| p as i64).collect();
        }
        limit *= 2;
    }
}

/// Distinct primes dividing `n != 0`, ascending.
pub(crate) fn prime_divisors(n: i128) -> Vec<u64> {
    let mut m = n.unsigned_abs();
    let mut out = Vec::new();
    let mut d = 2u128;
    while d * d <= m {
        if m % d == 0 {
            out.push(d as u64);
            while m % d == 0 {
                m /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push(m as u64);
    }
    out
}
