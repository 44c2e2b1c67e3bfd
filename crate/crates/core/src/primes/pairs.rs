//! Prime-pair sums, the circle-method identity they satisfy, and related
//! diagnostics.

use super::{sieve_segment, DomainError};
use crate::arith::{gcd, totient};
use alloc::vec;
use alloc::vec::Vec;

fn prime_flags(x: u64) -> Vec<bool> {
    let mut flags = vec![false; x as usize + 1];
    for p in sieve_segment(0, x + 1) {
        flags[p as usize] = true;
    }
    flags
}

/// `Z(2n) = sum log p * log p'` over primes `p < p' = p + 2n <= x`.
/// `n = 0` gives `sum (log p)^2`.
pub fn twin_pair_sum(x: u64, n: u64) -> f64 {
    let flags = prime_flags(x);
    pair_sum(&flags, x, n)
}

fn pair_sum(flags: &[bool], x: u64, n: u64) -> f64 {
    let mut s = 0.0;
    for p in 2..=x {
        let q = p + 2 * n;
        if q > x {
            break;
        }
        if flags[p as usize] && flags[q as usize] {
            s += libm::log(p as f64) * libm::log(q as f64);
        }
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleCheck {
    /// Quadrature of `int_0^1 |S(a)|^2 T(a) da`.
    pub lhs: f64,
    /// The same integral expanded into pair sums.
    pub rhs: f64,
}

impl CircleCheck {
    pub fn relative_error(&self) -> f64 {
        libm::fabs(self.lhs - self.rhs) / libm::fabs(self.rhs).max(f64::MIN_POSITIVE)
    }
}

/// Evaluates both sides of
/// `int_0^1 |S(a)|^2 T(a) da = t(0) Z(0) + 2 sum_{m=1}^{2L} t(m) Z(2m)` with
/// `S(a) = sum_{p<=x} log p e(pa)`, `T = |sum_{|m|<=L} e(2ma)|^2` and
/// `t(j) = 2L + 1 - |j|`.
///
/// The left side uses an `M`-point rectangle rule with `M` a power of two
/// exceeding `x + 4L`; every frequency in the integrand is then below `M`, so
/// the rule is exact up to rounding.
pub fn circle_identity_check(x: u64, l: u64) -> Result<CircleCheck, DomainError> {
    if x < 2 {
        return Err(DomainError::Argument("x must be at least 2"));
    }
    let flags = prime_flags(x);
    let primes: Vec<(u64, f64)> = (2..=x).filter(|&p| flags[p as usize]).map(|p| (p, libm::log(p as f64))).collect();
    let m = (x + 4 * l + 1).next_power_of_two();
    let tau = 2.0 * core::f64::consts::PI / m as f64;
    let cos: Vec<f64> = (0..m).map(|j| libm::cos(tau * j as f64)).collect();
    let sin: Vec<f64> = (0..m).map(|j| libm::sin(tau * j as f64)).collect();
    let mut lhs = 0.0;
    for k in 0..m {
        let (mut re, mut im) = (0.0, 0.0);
        for &(p, w) in &primes {
            let j = (p * k % m) as usize;
            re += w * cos[j];
            im += w * sin[j];
        }
        // U(a) = sum_{|m|<=L} e(2ma) is real.
        let mut u = 1.0;
        for r in 1..=l {
            u += 2.0 * cos[(2 * r * k % m) as usize];
        }
        lhs += (re * re + im * im) * u * u;
    }
    lhs /= m as f64;
    let t = |j: u64| (2 * l + 1 - j) as f64;
    let mut rhs = t(0) * pair_sum(&flags, x, 0);
    for j in 1..=2 * l {
        rhs += 2.0 * t(j) * pair_sum(&flags, x, j);
    }
    Ok(CircleCheck { lhs, rhs })
}

/// `sum_{q<=Q} max_{(a,q)=1} |theta(x; q, a) - x / phi(q)|`.
pub fn theta_discrepancy(x: u64, q_max: u64) -> f64 {
    let primes = sieve_segment(0, x + 1);
    let logs: Vec<f64> = primes.iter().map(|&p| libm::log(p as f64)).collect();
    let mut total = 0.0;
    for q in 1..=q_max {
        let mut theta = vec![0.0f64; q as usize];
        for (&p, &w) in primes.iter().zip(&logs) {
            theta[(p % q) as usize] += w;
        }
        let expect = x as f64 / totient(q) as f64;
        let worst =
            (0..q).filter(|&a| gcd(a, q) == 1).map(|a| libm::fabs(theta[a as usize] - expect)).fold(0.0, f64::max);
        total += worst;
    }
    total
}

/// Partial twin-prime constant `2 * prod_{2<p<=limit} p(p-2)/(p-1)^2`.
pub fn twin_constant(limit: u64) -> f64 {
    let mut log_sum = 0.0;
    for p in sieve_segment(3, limit.saturating_add(1)) {
        let d = (p - 1) as f64;
        log_sum += libm::log1p(-1.0 / (d * d));
    }
    2.0 * libm::exp(log_sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_sums() {
        let ln = |v: f64| v.ln();
        let z2_10 = ln(3.) * ln(5.) + ln(5.) * ln(7.);
        assert!((twin_pair_sum(10, 1) - z2_10).abs() < 1e-12);
        let z0_10 = [2.0f64, 3., 5., 7.].iter().map(|&p| ln(p).powi(2)).sum::<f64>();
        assert!((twin_pair_sum(10, 0) - z0_10).abs() < 1e-12);
        assert_eq!(twin_pair_sum(4, 1), 0.0);
    }

    #[test]
    fn circle_identity_small() {
        let c = circle_identity_check(2, 3).unwrap();
        let want = 7.0 * 2f64.ln().powi(2);
        assert!((c.rhs - want).abs() < 1e-12);
        assert!(c.relative_error() < 1e-10);
        for (x, l) in [(10, 1), (50, 4), (300, 10)] {
            assert!(circle_identity_check(x, l).unwrap().relative_error() < 1e-9);
        }
    }

    #[test]
    fn theta_discrepancy_by_hand() {
        let ln = |v: f64| v.ln();
        let q1 = (ln(210.) - 10.0).abs();
        let q2 = (ln(105.) - 10.0).abs();
        let q3 = (ln(7.) - 5.0).abs().max((ln(10.) - 5.0).abs());
        assert!((theta_discrepancy(10, 3) - (q1 + q2 + q3)).abs() < 1e-12);
    }

    #[test]
    fn twin_constant_values() {
        assert!((twin_constant(3) - 1.5).abs() < 1e-15);
        assert_eq!(twin_constant(2), 2.0);
        assert!((twin_constant(1_000_000) - 1.3203).abs() < 2e-4);
    }
}
