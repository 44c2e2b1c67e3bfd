//! Smooth-number counts and Rankin's upper bound for them.

use super::{sieve_segment, DomainError};
use crate::exec::{Executor, Sequential};
use alloc::vec::Vec;

const PSI_SEGMENT: u64 = 1 << 16;

/// Exact count of `1 <= n <= x` whose prime factors are all `<= y`.
pub fn psi_exact(x: u64, y: u64) -> u64 {
    psi_exact_with(x, y, &Sequential)
}

pub fn psi_exact_with<E: Executor>(x: u64, y: u64, exec: &E) -> u64 {
    if x == 0 {
        return 0;
    }
    let primes = sieve_segment(0, y.min(x).saturating_add(1));
    let segments = x.div_ceil(PSI_SEGMENT) as usize;
    exec.map_chunks(segments, |i| {
        let lo = 1 + i as u64 * PSI_SEGMENT;
        let hi = (lo + PSI_SEGMENT).min(x + 1);
        let mut rem: Vec<u64> = (lo..hi).collect();
        for &p in &primes {
            let mut m = lo.div_ceil(p) * p;
            while m < hi {
                let r = &mut rem[(m - lo) as usize];
                while *r % p == 0 {
                    *r /= p;
                }
                m += p;
            }
        }
        rem.iter().filter(|&&r| r == 1).count() as u64
    })
    .into_iter()
    .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankinBound {
    pub value: f64,
    pub log_value: f64,
    /// Set for `0 < eta <= 1`, where the bound still holds for the finite
    /// product but loses the usual justification.
    pub weak_exponent: bool,
}

/// `x^eta * prod_{p <= y} (1 - p^-eta)^-1`, an upper bound for `psi(x, y)`.
pub fn rankin_upper_bound(x: f64, y: u64, eta: f64) -> Result<RankinBound, DomainError> {
    if !(eta > 0.0) {
        return Err(DomainError::Argument("eta must be positive"));
    }
    if !(x >= 1.0) {
        return Err(DomainError::Argument("x must be at least 1"));
    }
    let log_value = log_bound(x, &sieve_segment(0, y.saturating_add(1)), eta);
    Ok(RankinBound { value: libm::exp(log_value), log_value, weak_exponent: eta <= 1.0 })
}

fn log_bound(x: f64, primes: &[u64], eta: f64) -> f64 {
    let mut s = eta * libm::log(x);
    for &p in primes {
        s -= libm::log1p(-libm::pow(p as f64, -eta));
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaOptimum {
    pub eta: f64,
    pub bound: f64,
}

/// Minimises [`rankin_upper_bound`] over `eta` in `(1, 8]` by golden-section
/// search to a bracket of width `1e-6`. The log of the bound is convex in
/// `eta`, so the search finds the global minimum on the interval.
pub fn optimize_eta(x: f64, y: u64) -> Result<EtaOptimum, DomainError> {
    if !(x >= 1.0) {
        return Err(DomainError::Argument("x must be at least 1"));
    }
    let primes = sieve_segment(0, y.saturating_add(1));
    let f = |eta: f64| log_bound(x, &primes, eta);
    let inv_phi = (libm::sqrt(5.0) - 1.0) / 2.0;
    let (mut a, mut b) = (1.0f64, 8.0f64);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-6 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let (mut eta, mut best) = if fc < fd { (c, fc) } else { (d, fd) };
    let f8 = f(8.0);
    if f8 < best {
        (eta, best) = (8.0, f8);
    }
    Ok(EtaOptimum { eta, bound: libm::exp(best) })
}
