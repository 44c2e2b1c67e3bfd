//! Beatty and Piatetski-Shapiro sequences restricted to primes.
//!
//! Slopes are exact: a rational, or `(a + b sqrt c)/d` with `c` squarefree.
//! Piatetski-Shapiro exponents are rationals `p/q`. Every floor is computed
//! with integer square or `q`-th roots, so no floor is ever in doubt.

use crate::kpower::{MaierMatrix, RowScan};
use crate::primes::is_prime;
use alloc::string::String;
use alloc::vec::Vec;
use core::str::FromStr;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Pow, ToPrimitive};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecialError {
    #[error("cannot parse {0:?} as an exact real")]
    Parse(String),
    #[error("slope must be positive")]
    NonPositive,
    #[error("exponent must be at least 1")]
    ExponentBelowOne,
    #[error("integer overflow while evaluating an exact floor")]
    Overflow,
    #[error("continued fraction terminated after {0} terms: the number is rational")]
    Rational(usize),
    #[error("value {0} does not fit the scan range")]
    TooLarge(String),
}

/// `(a + b sqrt c) / d` with `d > 0`; `b = 0` (and `c = 1`) for rationals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactReal {
    pub a: i128,
    pub b: i128,
    pub c: i128,
    pub d: i128,
}

fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (libm::sqrt(n as f64) as u128).max(1);
    while x.checked_mul(x).map_or(true, |v| v > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|v| v <= n) {
        x += 1;
    }
    x
}

/// Largest `s` with `s^2 | n`, and `n / s^2`.
fn split_square(n: i128) -> (i128, i128) {
    let mut s = 1i128;
    let mut rest = n;
    let mut f = 2i128;
    while f * f <= rest {
        while rest % (f * f) == 0 {
            rest /= f * f;
            s *= f;
        }
        f += 1;
    }
    (s, rest)
}

impl ExactReal {
    pub fn rational(num: i128, den: i128) -> Self {
        Self::new(num, 0, 1, den)
    }

    /// Normalises signs, square factors and common divisors.
    pub fn new(a: i128, b: i128, c: i128, d: i128) -> Self {
        assert!(d != 0 && c >= 0, "denominator must be nonzero, radicand non-negative");
        let (s, c) = if b == 0 || c == 0 { (0, 1) } else { split_square(c) };
        let (mut a, mut b, mut d) = if c == 1 { (a + b * s, 0, d) } else { (a, b * s, d) };
        let c = if b == 0 { 1 } else { c };
        if d < 0 {
            (a, b, d) = (-a, -b, -d);
        }
        let g = a.gcd(&b).gcd(&d);
        Self { a: a / g, b: b / g, c, d: d / g }
    }

    pub fn is_rational(&self) -> bool {
        self.b == 0
    }

    pub fn to_f64(&self) -> f64 {
        (self.a as f64 + self.b as f64 * libm::sqrt(self.c as f64)) / self.d as f64
    }

    pub fn is_positive(&self) -> bool {
        // Sign of a + b sqrt c.
        match (self.a.signum(), self.b.signum()) {
            (sa, sb) if sa >= 0 && sb >= 0 => sa + sb > 0,
            (sa, sb) if sa <= 0 && sb <= 0 => false,
            (1, _) => self.a * self.a > self.b * self.b * self.c,
            _ => self.b * self.b * self.c > self.a * self.a,
        }
    }

    /// `floor(self * n + beta)`.
    pub fn floor_affine(&self, n: i128, beta: (i128, i128)) -> Result<i128, SpecialError> {
        let (bn, bd) = beta;
        let ovf = |v: Option<i128>| v.ok_or(SpecialError::Overflow);
        let m = ovf(self.d.checked_mul(bd))?;
        let a = ovf(ovf(self.a.checked_mul(n))?.checked_mul(bd).and_then(|x| x.checked_add(bn.checked_mul(self.d)?)))?;
        let b = ovf(ovf(self.b.checked_mul(n))?.checked_mul(bd))?;
        floor_surd(a, b, self.c, m)
    }
}

/// `floor((a + b sqrt c) / m)` for `m > 0` and non-square `c` when `b != 0`.
fn floor_surd(a: i128, b: i128, c: i128, m: i128) -> Result<i128, SpecialError> {
    if b == 0 {
        return Ok(Integer::div_floor(&a, &m));
    }
    // b sqrt c is irrational, so its floor is r or -(r + 1) with r = isqrt(b^2 c).
    if let Some(sq) = b.checked_mul(b).and_then(|v| v.checked_mul(c)) {
        let r = isqrt_u128(sq as u128) as i128;
        let fb = if b > 0 { r } else { -r - 1 };
        if let Some(whole) = a.checked_add(fb) {
            return Ok(Integer::div_floor(&whole, &m));
        }
    }
    let r = BigInt::from((BigUint::from(b.unsigned_abs()).pow(2u32) * c as u128).sqrt());
    let fb = if b > 0 { r } else { -r - 1 };
    Integer::div_floor(&(BigInt::from(a) + fb), &BigInt::from(m)).to_i128().ok_or(SpecialError::Overflow)
}

fn parse_int(s: &str) -> Option<i128> {
    (!s.is_empty()).then(|| s.parse().ok()).flatten()
}

/// `"1.05"`, `"-3"`, `"22/7"` as `(num, den)`.
fn parse_rational(s: &str) -> Option<(i128, i128)> {
    if let Some((n, d)) = s.split_once('/') {
        let (n, d) = (parse_int(n)?, parse_int(d)?);
        return (d != 0).then_some((n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = alloc::format!("{int}{frac}");
    let num: i128 = digits.parse().ok()?;
    let den = 10i128.checked_pow(frac.len() as u32)?;
    Some((if neg { -num } else { num }, den))
}

/// `"2sqrt3"`, `"-sqrt(5)"`, `"3*sqrt2"` as `(coefficient, radicand)`.
fn parse_surd_term(s: &str) -> Option<(i128, i128)> {
    let (coef, rad) = s.split_once("sqrt")?;
    let coef = coef.strip_suffix('*').unwrap_or(coef);
    let coef = match coef {
        "" | "+" => 1,
        "-" => -1,
        other => parse_int(other)?,
    };
    let rad = rad.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(rad);
    let rad = parse_int(rad)?;
    (rad >= 0).then_some((coef, rad))
}

/// A sum of at most one rational term and one surd term.
fn parse_sum(s: &str) -> Option<ExactReal> {
    let split = s.char_indices().skip(1).find(|&(i, ch)| (ch == '+' || ch == '-') && !s[..i].ends_with('('));
    let terms: Vec<&str> = match split {
        Some((i, _)) => alloc::vec![&s[..i], &s[i..]],
        None => alloc::vec![s],
    };
    let (mut rn, mut rd, mut b, mut c) = (0i128, 1i128, 0i128, 1i128);
    let mut seen_surd = false;
    let mut seen_rat = false;
    for t in terms {
        if t.contains("sqrt") {
            if seen_surd {
                return None;
            }
            (b, c) = parse_surd_term(t)?;
            seen_surd = true;
        } else {
            if seen_rat {
                return None;
            }
            (rn, rd) = parse_rational(t)?;
            seen_rat = true;
        }
    }
    Some(ExactReal::new(rn, rd * b, c, rd))
}

impl FromStr for ExactReal {
    type Err = SpecialError;

    /// Accepts rationals (`"1.5"`, `"22/7"`), `"phi"`/`"golden"`, `"sqrt2"`,
    /// `"sqrt(2)"`, and `"(a+b*sqrtc)/d"` forms.
    fn from_str(raw: &str) -> Result<Self, Self::Err> {
        let s: String = raw.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_ascii_lowercase();
        let err = || SpecialError::Parse(String::from(raw));
        if s == "phi" || s == "golden" {
            return Ok(ExactReal::new(1, 1, 5, 2));
        }
        if let Some(inner) = s.strip_prefix('(') {
            let (body, tail) = inner.rsplit_once(')').ok_or_else(err)?;
            let v = parse_sum(body).ok_or_else(err)?;
            let d = match tail {
                "" => 1,
                t => parse_int(t.strip_prefix('/').ok_or_else(err)?).filter(|&d| d != 0).ok_or_else(err)?,
            };
            return Ok(ExactReal::new(v.a, v.b, v.c, v.d * d));
        }
        if !s.contains("sqrt") {
            let (n, d) = parse_rational(&s).ok_or_else(err)?;
            return Ok(ExactReal::rational(n, d));
        }
        parse_sum(&s).ok_or_else(err)
    }
}

/// Partial quotients of a continued fraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContinuedFraction {
    pub terms: Vec<i128>,
    /// True when the expansion ended, i.e. the number is rational.
    pub terminated: bool,
}

/// First `count` partial quotients of `x`, exactly.
pub fn continued_fraction(x: &ExactReal, count: usize) -> Result<ContinuedFraction, SpecialError> {
    let mut terms = Vec::new();
    if x.is_rational() {
        let (mut n, mut d) = (x.a, x.d);
        while terms.len() < count && d != 0 {
            let q = Integer::div_floor(&n, &d);
            terms.push(q);
            (n, d) = (d, n - q * d);
        }
        return Ok(ContinuedFraction { terminated: d == 0, terms });
    }
    // Write x = (P + sqrt D) / Q with Q | D - P^2.
    let ovf = |v: Option<i128>| v.ok_or(SpecialError::Overflow);
    let (a, b, d) = if x.b > 0 { (x.a, x.b, x.d) } else { (-x.a, -x.b, -x.d) };
    let dd = ovf(b.checked_mul(b).and_then(|v| v.checked_mul(x.c)).and_then(|v| v.checked_mul(d * d)))?;
    let mut p = ovf(a.checked_mul(d.abs()))?;
    let mut q = ovf(d.checked_mul(d.abs()))?;
    let s = isqrt_u128(dd as u128) as i128;
    while terms.len() < count {
        // floor((p + sqrt dd) / q) with sqrt dd irrational.
        let t = if q > 0 { Integer::div_floor(&(p + s), &q) } else { Integer::div_floor(&(-p - s - 1), &-q) };
        terms.push(t);
        p = ovf(t.checked_mul(q))? - p;
        q = ovf(dd.checked_sub(ovf(p.checked_mul(p))?))? / q;
    }
    Ok(ContinuedFraction { terms, terminated: false })
}

/// Convergents `(p_k, q_k)` of a list of partial quotients.
pub fn convergents(terms: &[i128]) -> Result<Vec<(i128, i128)>, SpecialError> {
    let (mut p0, mut q0, mut p1, mut q1) = (1i128, 0i128, 0i128, 1i128);
    let mut out = Vec::with_capacity(terms.len());
    for &a in terms {
        let p = a.checked_mul(p0).and_then(|v| v.checked_add(p1)).ok_or(SpecialError::Overflow)?;
        let q = a.checked_mul(q0).and_then(|v| v.checked_add(q1)).ok_or(SpecialError::Overflow)?;
        (p1, q1, p0, q0) = (p0, q0, p, q);
        out.push((p, q));
    }
    Ok(out)
}

/// Proxy for the irrationality type: the largest
/// `log(a_{k+1} q_k) / log q_k` over convergents `k ∈ [depth/2, depth)`.
/// The first half is skipped because tiny `q_k` dominate otherwise.
pub fn irrationality_type_estimate(x: &ExactReal, depth: usize) -> Result<f64, SpecialError> {
    let cf = continued_fraction(x, depth + 1)?;
    if cf.terminated {
        return Err(SpecialError::Rational(cf.terms.len()));
    }
    // q_k in floating point; exact values overflow long before the logs do.
    let mut q = Vec::with_capacity(depth);
    let (mut q0, mut q1) = (1.0f64, 0.0f64);
    for &a in &cf.terms[..depth] {
        let next = a as f64 * q0 + q1;
        (q1, q0) = (q0, next);
        q.push(next);
    }
    let mut best = 1.0f64;
    for (k, &qk) in q.iter().enumerate().skip(depth / 2) {
        if qk > 1.0 {
            let a_next = cf.terms[k + 1] as f64;
            best = best.max(libm::log(a_next * qk) / libm::log(qk));
        }
    }
    Ok(best)
}

/// Slope and rational offset of a Beatty sequence `floor(alpha n + beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BeattyParams {
    pub alpha: ExactReal,
    /// `beta = num / den`, `den > 0`.
    pub beta: (i128, i128),
}

impl BeattyParams {
    pub fn new(alpha: ExactReal, beta: (i128, i128)) -> Result<Self, SpecialError> {
        if !alpha.is_positive() {
            return Err(SpecialError::NonPositive);
        }
        let beta = if beta.1 < 0 { (-beta.0, -beta.1) } else { beta };
        if beta.1 == 0 {
            return Err(SpecialError::Parse(String::from("zero denominator in beta")));
        }
        Ok(Self { alpha, beta })
    }
}

/// `floor(alpha n + beta)`.
pub fn beatty(n: i128, params: &BeattyParams) -> Result<i128, SpecialError> {
    params.alpha.floor_affine(n, params.beta)
}

/// Some `n >= 1` with `floor(alpha n + beta) = v`, if one exists. The
/// sequence is increasing, so a galloping binary search finds the first `n`
/// with value `>= v` using exact floors only.
pub fn beatty_index(v: i128, params: &BeattyParams) -> Result<Option<i128>, SpecialError> {
    let n = first_at_least(|n| Ok(beatty(n, params)? >= v))?;
    Ok((beatty(n, params)? == v).then_some(n))
}

/// Smallest `n >= 1` satisfying a monotone predicate, or `Overflow` if it
/// fails up to `2^126`.
fn first_at_least(mut pred: impl FnMut(i128) -> Result<bool, SpecialError>) -> Result<i128, SpecialError> {
    let mut hi = 1i128;
    while !pred(hi)? {
        hi = hi.checked_mul(2).ok_or(SpecialError::Overflow)?;
    }
    let mut lo = hi / 2 + 1;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(lo)
}

/// Primes `floor(alpha n + beta) <= limit` over `n >= 1`, each with the
/// first index producing it.
pub fn beatty_primes(limit: u64, params: &BeattyParams) -> Result<Vec<(u64, u64)>, SpecialError> {
    let mut out: Vec<(u64, u64)> = Vec::new();
    let mut n = 1i128;
    loop {
        let v = beatty(n, params)?;
        if v > limit as i128 {
            return Ok(out);
        }
        if v >= 2 && is_prime(v as u64) && out.last().map_or(true, |&(p, _)| p != v as u64) {
            out.push((v as u64, n as u64));
        }
        n += 1;
    }
}

/// Piatetski-Shapiro exponent `c = p/q >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PsExponent {
    pub p: u32,
    pub q: u32,
}

impl PsExponent {
    pub fn new(p: u32, q: u32) -> Result<Self, SpecialError> {
        if q == 0 || p < q {
            return Err(SpecialError::ExponentBelowOne);
        }
        let g = p.gcd(&q);
        Ok(Self { p: p / g, q: q / g })
    }

    pub fn to_f64(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

impl FromStr for PsExponent {
    type Err = SpecialError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || SpecialError::Parse(String::from(s));
        let (n, d) = parse_rational(s.trim()).ok_or_else(err)?;
        let (n, d) = (u32::try_from(n).map_err(|_| err())?, u32::try_from(d).map_err(|_| err())?);
        Self::new(n, d)
    }
}

/// `floor(l^c)` as the integer `q`-th root of `l^p`.
pub fn ps_value(l: u64, c: PsExponent) -> BigUint {
    ps_value_wide(l as u128, c)
}

fn ps_value_wide(l: u128, c: PsExponent) -> BigUint {
    Pow::pow(BigUint::from(l), c.p).nth_root(c.q)
}

/// Some `l >= 1` with `floor(l^c) = v`, if one exists.
pub fn ps_index(v: &BigUint, c: PsExponent) -> Result<Option<u128>, SpecialError> {
    let l = first_at_least(|l| Ok(&ps_value_wide(l as u128, c) >= v))? as u128;
    Ok((&ps_value_wide(l, c) == v).then_some(l))
}

/// Primes `floor(l^c) <= limit` with their index `l`.
pub fn ps_primes(limit: u64, c: PsExponent) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for l in 1u64.. {
        let v = ps_value(l, c).to_u64().unwrap_or(u64::MAX);
        if v > limit {
            break;
        }
        if is_prime(v) {
            out.push((v, l));
        }
    }
    out
}

/// Sequence that a winning row's prime must belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialFamily {
    AllPrimes,
    Beatty(BeattyParams),
    PiatetskiShapiro(PsExponent),
}

impl SpecialFamily {
    /// Index witnessing membership of `v`; 0 for [`SpecialFamily::AllPrimes`].
    pub fn index_of(&self, v: &BigUint) -> Result<Option<u128>, SpecialError> {
        match self {
            SpecialFamily::AllPrimes => Ok(Some(0)),
            SpecialFamily::Beatty(b) => {
                let v = v.to_i128().ok_or_else(|| SpecialError::TooLarge(alloc::format!("{v}")))?;
                Ok(beatty_index(v, b)?.map(|n| n as u128))
            }
            SpecialFamily::PiatetskiShapiro(c) => ps_index(v, *c),
        }
    }
}

/// Winners of `scan` whose base prime lies in `family`, as `(row, index)`.
pub fn restricted_column_scan(
    m: &MaierMatrix,
    scan: &RowScan,
    family: &SpecialFamily,
) -> Result<Vec<(u64, u128)>, SpecialError> {
    let mut out = Vec::new();
    for &r in &scan.winners {
        if let Some(idx) = family.index_of(&m.base(r))? {
            out.push((r, idx));
        }
    }
    Ok(out)
}
