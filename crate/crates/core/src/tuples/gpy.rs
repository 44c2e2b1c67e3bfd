//! Weights of the form `(sum_{d | P(n), d < R} mu(d) log(R/d)^k)^2`.

use super::prime_divisors;
use crate::arith::{is_squarefree, mobius};
use crate::primes::sieve_segment;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpyConfig {
    /// Truncation level `R`.
    pub r: f64,
    /// Exponent `k`, normally the tuple length.
    pub k: u32,
}

/// `mu(d) log(R/d)^k` for squarefree `d < R`, else zero.
pub fn gpy_lambda(d: u64, cfg: &GpyConfig) -> f64 {
    if d == 0 || (d as f64) >= cfg.r || !is_squarefree(d) {
        return 0.0;
    }
    mobius(d) as f64 * libm::pow(libm::log(cfg.r / d as f64), cfg.k as f64)
}

/// `w_n = (sum_{d | prod (n + h_i)} lambda_d)^2`. A zero factor makes every
/// `d` a divisor.
pub fn gpy_weight(n: i64, offsets: &[i64], cfg: &GpyConfig) -> f64 {
    let terms: Vec<i128> = offsets.iter().map(|&h| n as i128 + h as i128).collect();
    let primes: Vec<u64> = if terms.contains(&0) {
        sieve_segment(0, libm::ceil(cfg.r) as u64)
    } else {
        let mut all: Vec<u64> = terms.iter().flat_map(|&t| prime_divisors(t)).collect();
        all.sort_unstable();
        all.dedup();
        all
    };
    let mut sum = 0.0;
    squarefree_below(&primes, cfg.r, 0, 1, &mut |d| sum += gpy_lambda(d, cfg));
    sum * sum
}

/// Calls `f` on every product of distinct `primes[i..]` (times `d`) below `r`.
fn squarefree_below(primes: &[u64], r: f64, i: usize, d: u64, f: &mut dyn FnMut(u64)) {
    if (d as f64) >= r {
        return;
    }
    f(d);
    for j in i..primes.len() {
        let next = d.saturating_mul(primes[j]);
        if (next as f64) >= r {
            break;
        }
        squarefree_below(primes, r, j + 1, next, f);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SStatistic {
    /// `sum_{N <= n <= 2N} (#{i : n + h_i prime} - rho) w_n`.
    pub s: f64,
    /// An `n` with more than `floor(rho)` primes among `n + h_i` and positive
    /// weight; always present when `s > 0`.
    pub witness: Option<i64>,
}

pub fn s_statistic(n_lo: i64, rho: f64, offsets: &[i64], cfg: &GpyConfig) -> SStatistic {
    let mut s = 0.0;
    let mut witness = None;
    for n in n_lo..=2 * n_lo {
        let w = gpy_weight(n, offsets, cfg);
        let primes = offsets.iter().filter(|&&h| u64::try_from(n + h).is_ok_and(crate::primes::is_prime)).count();
        let term = (primes as f64 - rho) * w;
        s += term;
        if witness.is_none() && term > 0.0 {
            witness = Some(n);
        }
    }
    SStatistic { s, witness }
}
