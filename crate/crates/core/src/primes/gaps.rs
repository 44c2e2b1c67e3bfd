//! Maximal prime gaps and the Rankin-order normalisation.

use super::{odd_segment, segment_layout, DomainError};
use crate::exec::{Executor, Sequential};
use alloc::vec::Vec;

/// A pair of consecutive primes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapRecord {
    pub p_lo: u64,
    pub p_hi: u64,
    pub gap: u64,
    /// `gap / ln p_lo`.
    pub merit: f64,
    /// `gap / rankin_lower_bound(p_lo)`; `None` where the bound is undefined
    /// (`p_lo` below about 3.8e6).
    pub rankin_merit: Option<f64>,
}

impl GapRecord {
    pub fn new(p_lo: u64, p_hi: u64) -> Self {
        let gap = p_hi - p_lo;
        Self {
            p_lo,
            p_hi,
            gap,
            merit: gap as f64 / libm::log(p_lo as f64),
            rankin_merit: rankin_lower_bound(p_lo as f64).ok().map(|b| gap as f64 / b),
        }
    }
}

/// `log_k x`, the logarithm applied `k` times.
pub fn iterated_log(x: f64, k: u32) -> Result<f64, DomainError> {
    let mut v = x;
    for depth in 0..k {
        if !(v > 0.0) {
            return Err(DomainError::IteratedLog { depth, value: v });
        }
        v = libm::log(v);
    }
    Ok(v)
}

/// `log X * log_2 X * log_4 X / (log_3 X)^2`, the growth shape of the
/// classical lower bound for maximal gaps below `X` (no constant factor).
/// Needs `log_4 X > 0`, i.e. `X` above roughly 3.8e6.
pub fn rankin_lower_bound(x: f64) -> Result<f64, DomainError> {
    if !(x > 0.0) {
        return Err(DomainError::IteratedLog { depth: 0, value: x });
    }
    rankin_lower_bound_from_log(libm::log(x))
}

/// [`rankin_lower_bound`] taking `log X`, for `X` too large for an `f64`.
pub fn rankin_lower_bound_from_log(log_x: f64) -> Result<f64, DomainError> {
    let l2 = iterated_log(log_x, 1)?;
    let l3 = iterated_log(l2, 1)?;
    let l4 = iterated_log(l3, 1)?;
    if !(l4 > 0.0) {
        return Err(DomainError::Argument("log_4 X must be positive"));
    }
    Ok(log_x * l2 * l4 / (l3 * l3))
}

#[derive(Debug, Default)]
struct Summary {
    first: Option<u64>,
    last: Option<u64>,
    /// Running maxima inside the segment as `(p_lo, p_hi)`, first occurrence.
    records: Vec<(u64, u64)>,
}

fn summarize(primes: &[u64]) -> Summary {
    let mut s = Summary { first: primes.first().copied(), last: primes.last().copied(), records: Vec::new() };
    let mut best = 0;
    for w in primes.windows(2) {
        if w[1] - w[0] > best {
            best = w[1] - w[0];
            s.records.push((w[0], w[1]));
        }
    }
    s
}

/// Gaps between consecutive primes `<= limit` that exceed every earlier gap.
pub fn record_gaps(limit: u64) -> Vec<GapRecord> {
    record_gaps_with(limit, &Sequential)
}

pub fn record_gaps_with<E: Executor>(limit: u64, exec: &E) -> Vec<GapRecord> {
    let mut out = Vec::new();
    if limit < 3 {
        return out;
    }
    let hi = limit + 1;
    let (segments, first_odd, base) = segment_layout(0, hi);
    let mut parts = alloc::vec![summarize(&[2])];
    parts.extend(
        exec.map_chunks(segments, |i| {
            summarize(&odd_segment(first_odd + 2 * super::SEGMENT_ODDS * i as u64, hi, &base))
        }),
    );
    let mut best = 0;
    let mut prev_last: Option<u64> = None;
    for part in parts {
        let boundary = prev_last.zip(part.first);
        for (lo, hi) in boundary.into_iter().chain(part.records.iter().copied()) {
            if hi - lo > best {
                best = hi - lo;
                out.push(GapRecord::new(lo, hi));
            }
        }
        if part.last.is_some() {
            prev_last = part.last;
        }
    }
    out
}

/// Largest gap between consecutive primes `p_lo < p_hi <= x`; ties go to the
/// smallest `p_lo`. `None` when fewer than two primes are `<= x`.
pub fn max_gap(x: u64) -> Option<GapRecord> {
    record_gaps(x).pop()
}

pub fn max_gap_with<E: Executor>(x: u64, exec: &E) -> Option<GapRecord> {
    record_gaps_with(x, exec).pop()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::sieve_segment;

    fn naive_max_gap(x: u64) -> (u64, u64) {
        let p = sieve_segment(0, x + 1);
        let mut best = (0, 0);
        for w in p.windows(2) {
            if w[1] - w[0] > best.1 - best.0 {
                best = (w[0], w[1]);
            }
        }
        best
    }

    #[test]
    fn small_maximal_gaps() {
        let g = max_gap(100).unwrap();
        assert_eq!((g.p_lo, g.p_hi, g.gap), (89, 97, 8));
        assert_eq!(max_gap(2), None);
        let g = max_gap(3).unwrap();
        assert_eq!((g.p_lo, g.p_hi, g.gap), (2, 3, 1));
        for x in [10, 30, 1000, 5000, 77_777] {
            let g = max_gap(x).unwrap();
            assert_eq!((g.p_lo, g.p_hi), naive_max_gap(x), "x = {x}");
        }
    }

    #[test]
    fn record_sequence_prefix() {
        let lows: Vec<u64> = record_gaps(1000).iter().map(|g| g.p_lo).collect();
        assert_eq!(lows, [2, 3, 7, 23, 89, 113, 523, 887]);
    }

    #[test]
    fn iterated_log_domain() {
        let e = core::f64::consts::E;
        assert!((iterated_log(e, 1).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(iterated_log(e, 2).unwrap(), 0.0);
        assert!(iterated_log(e, 3).is_err());
        assert!(iterated_log(-1.0, 1).is_err());
        assert_eq!(iterated_log(5.0, 0).unwrap(), 5.0);
    }

    #[test]
    fn rankin_shape() {
        assert!(rankin_lower_bound(1e6).is_err());
        let x: f64 = 1e18;
        let (l1, l2) = (x.ln(), x.ln().ln());
        let (l3, l4) = (l2.ln(), l2.ln().ln());
        let want = l1 * l2 * l4 / (l3 * l3);
        assert!((rankin_lower_bound(x).unwrap() - want).abs() < 1e-12 * want);
        // At log X = e^(e^e) the inner logs are e^e, e and 1.
        let e = core::f64::consts::E;
        let ee = e.powf(e);
        let v = rankin_lower_bound_from_log(e.powf(ee)).unwrap();
        let want = e.powf(ee) * ee / (e * e);
        assert!((v - want).abs() < 1e-9 * want);
    }
}
