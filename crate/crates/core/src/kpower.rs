//! Congruence conditions for `K`-th powers and the row/column matrix that
//! locates a prime `K`-th power inside a long run of composites.
//!
//! `n` is *solvable* at a prime `p` when `1 - n ≡ c^K (mod p)` for some
//! `c ≢ 0`. With `D = gcd(p - 1, K)` and `rho` a primitive root this holds
//! exactly when `D | ind_rho(1 - n)`.

use crate::arith::{gcd, inv_mod, isqrt, mul_mod, pow_mod, primitive_root};
use crate::crt::{crt_assemble, CrtError, GapCertificate};
use crate::exec::{below, stream_rng};
use crate::primes::{is_prime, is_prime_big, next_prime_big, prev_prime_big, sieve_segment};
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigUint;
use num_traits::{One, Pow, ToPrimitive, Zero};

/// Default cap on `rows * y` for a matrix.
pub const MATRIX_BUDGET: u64 = 10_000_000;

/// Largest prime with a full index table.
const TABLE_LIMIT: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KPowerError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("exponent K must be positive")]
    ZeroExponent,
    #[error("modulus {0} must be an odd prime")]
    EvenModulus(u64),
    #[error("matrix of {rows} rows and {cols} columns exceeds the budget {budget}")]
    OverBudget { rows: u64, cols: u64, budget: u64 },
    #[error("certificate modulus has a factor outside the primes below {0}")]
    UnfactoredModulus(u64),
    #[error(transparent)]
    Crt(#[from] CrtError),
}

/// Discrete-log tables for one prime and exponent.
#[derive(Debug, Clone)]
pub struct KPowerContext {
    pub p: u64,
    pub k: u64,
    /// `gcd(p - 1, K)`.
    pub d: u64,
    pub generator: u64,
    /// `index[v] = ind(v)` for `p <= 2^16`.
    index: Option<Vec<u32>>,
}

impl KPowerContext {
    pub fn new(p: u64, k: u64) -> Result<Self, KPowerError> {
        if !is_prime(p) {
            return Err(KPowerError::NotPrime(p));
        }
        if k == 0 {
            return Err(KPowerError::ZeroExponent);
        }
        let generator = primitive_root(p);
        let index = (p <= TABLE_LIMIT).then(|| {
            let mut t = vec![0u32; p as usize];
            let mut v = 1u64;
            for e in 0..p - 1 {
                t[v as usize] = e as u32;
                v = mul_mod(v, generator, p);
            }
            t
        });
        Ok(Self { p, k, d: gcd(p - 1, k), generator, index })
    }

    /// `ind(v)` for `v ≢ 0 (mod p)`, by table or baby-step giant-step.
    pub fn dlog(&self, v: u64) -> u64 {
        let v = v % self.p;
        assert!(v != 0, "zero has no index");
        if let Some(t) = &self.index {
            return t[v as usize] as u64;
        }
        let n = self.p - 1;
        let m = isqrt(n) + 1;
        let mut baby = BTreeMap::new();
        let mut e = 1u64;
        for j in 0..m {
            baby.entry(e).or_insert(j);
            e = mul_mod(e, self.generator, self.p);
        }
        let factor = inv_mod(pow_mod(self.generator, m, self.p), self.p).expect("generator is a unit");
        let mut gamma = v;
        for i in 0..m {
            if let Some(&j) = baby.get(&gamma) {
                return (i * m + j) % n;
            }
            gamma = mul_mod(gamma, factor, self.p);
        }
        unreachable!("generator spans the unit group")
    }

    fn target(&self, n: i64) -> u64 {
        (1 - n as i128).rem_euclid(self.p as i128) as u64
    }
}

/// Whether `1 - n` is a nonzero `K`-th power mod `p`.
pub fn kpower_solvable(n: i64, ctx: &KPowerContext) -> bool {
    let v = ctx.target(n);
    v != 0 && ctx.dlog(v) % ctx.d == 0
}

/// `(1/D) sum_{l < D} e(l s / D)` with `1 - n ≡ rho^s`; zero when `p | 1 - n`.
/// Equals 1 on solvable `n` and 0 otherwise, up to rounding.
pub fn character_indicator(n: i64, ctx: &KPowerContext) -> f64 {
    let v = ctx.target(n);
    if v == 0 {
        return 0.0;
    }
    let s = ctx.dlog(v);
    let d = ctx.d as f64;
    // The imaginary parts cancel in pairs l, D - l.
    let sum: f64 = (0..ctx.d).map(|l| libm::cos(2.0 * core::f64::consts::PI * ((l * s) % ctx.d) as f64 / d)).sum();
    sum / d
}

/// `a_s = 1 - (c_s + 1)^K mod s` for each prime `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueVectorK {
    pub k: u64,
    /// `(s, a_s, c_s)` with `c_s ∈ [0, s - 2]`.
    pub entries: Vec<(u64, u64, u64)>,
}

impl ResidueVectorK {
    pub fn from_choices(k: u64, choices: &[(u64, u64)]) -> Result<Self, KPowerError> {
        let mut entries = Vec::with_capacity(choices.len());
        for &(s, c) in choices {
            if s == 2 || !is_prime(s) {
                return Err(if s == 2 { KPowerError::EvenModulus(s) } else { KPowerError::NotPrime(s) });
            }
            let a = (1 + s - pow_mod(c + 1, k, s)) % s;
            entries.push((s, a, c));
        }
        Ok(Self { k, entries })
    }

    /// `(a_s, s)` pairs for [`sifted_set`].
    pub fn classes(&self) -> Vec<(i64, u64)> {
        self.entries.iter().map(|&(s, a, _)| (a as i64, s)).collect()
    }
}

/// Draws `c_s` uniformly from `[0, s - 2]` for each prime; `c_s = s - 1` is
/// excluded so that `c_s + 1` stays a unit.
pub fn select_residues_k(primes: &[u64], k: u64, seed: u64) -> Result<ResidueVectorK, KPowerError> {
    let mut rng = stream_rng(seed, 0);
    let mut choices = Vec::with_capacity(primes.len());
    for &s in primes {
        if s < 3 {
            return Err(KPowerError::EvenModulus(s));
        }
        choices.push((s, below(&mut rng, s - 1)));
    }
    ResidueVectorK::from_choices(k, &choices)
}

/// Integers in `(lo, hi]` avoiding every class `a mod s`.
pub fn sifted_set(lo: i64, hi: i64, classes: &[(i64, u64)]) -> Vec<i64> {
    ((lo + 1)..=hi).filter(|&n| classes.iter().all(|&(a, s)| (n - a).rem_euclid(s as i64) != 0)).collect()
}

/// Congruence used for `tilde_primes` when `K` is even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvenRule {
    /// `p ≡ 3 (mod 2K)`.
    #[default]
    TwoK,
    /// `p ≡ 3 (mod 3K)`.
    ThreeK,
}

/// Primes in `(x, c0 x]` with `p ≡ 2 (mod 3)` for odd `K`, or the
/// [`EvenRule`] congruence for even `K`.
pub fn tilde_primes(x: u64, c0: f64, k: u64, rule: EvenRule) -> Vec<u64> {
    let hi = libm::floor(c0 * x as f64) as u64;
    let (modulus, residue) = if k % 2 == 1 {
        (3, 2)
    } else {
        match rule {
            EvenRule::TwoK => (2 * k, 3 % (2 * k)),
            EvenRule::ThreeK => (3 * k, 3 % (3 * k)),
        }
    };
    sieve_segment(x + 1, hi + 1).into_iter().filter(|p| p % modulus == residue).collect()
}

/// Legendre symbol `(a/p)` for an odd prime `p`, by Euler's criterion.
pub fn legendre(a: i64, p: u64) -> i32 {
    let r = pow_mod(a.rem_euclid(p as i64) as u64, (p - 1) / 2, p);
    match r {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

/// Offsets `u ∈ [0, y]` for which `-u` is a quadratic residue modulo at most
/// `delta |P|` of the primes `P`.
pub fn exceptional_u(y: u64, tilde: &[u64], delta: f64) -> Vec<u64> {
    let threshold = delta * tilde.len() as f64;
    (0..=y)
        .filter(|&u| {
            let hits = tilde.iter().filter(|&&p| legendre(-(u as i64), p) == 1).count();
            hits as f64 <= threshold
        })
        .collect()
}

/// Families `S_u = {s : s ≡ u (mod K)}` for the good-set test.
#[derive(Debug, Clone)]
pub struct GoodSetParams {
    pub k: u64,
    pub eps: f64,
    /// Keyed by `u ∈ [1, K]` coprime to `K`.
    pub families: BTreeMap<u64, Vec<KPowerContext>>,
}

impl GoodSetParams {
    /// Families from the primes in `(lo, hi]` coprime to `K`.
    pub fn from_range(k: u64, lo: u64, hi: u64, eps: f64) -> Result<Self, KPowerError> {
        let mut families: BTreeMap<u64, Vec<KPowerContext>> = BTreeMap::new();
        for s in sieve_segment(lo + 1, hi + 1) {
            if gcd(s, k) != 1 {
                continue;
            }
            let u = (s - 1) % k + 1;
            families.entry(u).or_default().push(KPowerContext::new(s, k)?);
        }
        Ok(Self { k, eps, families })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoodSetReport {
    pub in_g: bool,
    /// `(u, r(n, u), r*(u))` per family.
    pub families: Vec<(u64, f64, f64)>,
}

/// `n ∈ G` when `|r(n, u) - r*(u)| <= eps` for every family, where
/// `r(n, u) = sum_{s ∈ S_u, n solvable at s} 1/s` and
/// `r*(u) = sum_{s ∈ S_u} 1/s / gcd(u - 1, K)`.
pub fn good_set_membership(n: i64, params: &GoodSetParams) -> GoodSetReport {
    let mut in_g = true;
    let mut families = Vec::new();
    for (&u, ctxs) in &params.families {
        let d = gcd(u - 1, params.k) as f64;
        let r_star: f64 = ctxs.iter().map(|c| 1.0 / c.p as f64).sum::<f64>() / d;
        let r: f64 = ctxs.iter().filter(|c| kpower_solvable(n, c)).map(|c| 1.0 / c.p as f64).sum();
        if libm::fabs(r - r_star) > params.eps {
            in_g = false;
        }
        families.push((u, r, r_star));
    }
    GoodSetReport { in_g, families }
}

/// Entries `a_{r,u} = (m0 + 1 + r Px)^K + u - 1` for `1 <= r <= rows`,
/// `1 <= u <= y`. Column 1 holds the `K`-th powers themselves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaierMatrix {
    pub m0: BigUint,
    pub px: BigUint,
    pub k: u64,
    pub rows: u64,
    pub y: u64,
    /// Primes dividing `px`, ascending.
    pub moduli: Vec<u64>,
}

impl MaierMatrix {
    pub fn new(m0: BigUint, moduli: Vec<u64>, k: u64, rows: u64, y: u64, budget: u64) -> Result<Self, KPowerError> {
        if k == 0 {
            return Err(KPowerError::ZeroExponent);
        }
        if rows.saturating_mul(y) > budget {
            return Err(KPowerError::OverBudget { rows, cols: y, budget });
        }
        let px = moduli.iter().fold(BigUint::one(), |acc, &p| acc * p);
        Ok(Self { m0, px, k, rows, y, moduli })
    }

    /// `m0 + 1 + r Px`.
    pub fn base(&self, r: u64) -> BigUint {
        &self.m0 + 1u32 + &self.px * r
    }

    pub fn entry(&self, r: u64, u: u64) -> BigUint {
        Pow::pow(self.base(r), self.k as u32) + u - 1u32
    }

    /// For each `u = 1..=y`, the smallest `p | Px` dividing every entry of
    /// column `u`. Column 1 never has one because the bases are coprime to `Px`.
    pub fn column_witnesses(&self) -> Vec<Option<u64>> {
        let lead: Vec<(u64, u64)> = self
            .moduli
            .iter()
            .map(|&p| (p, pow_mod(((&self.m0 + 1u32) % p).to_u64().expect("reduced"), self.k, p)))
            .collect();
        (1..=self.y).map(|u| lead.iter().find(|&&(p, c)| (c + u - 1) % p == 0).map(|&(p, _)| p)).collect()
    }
}

/// Re-roots a certificate so that column 1 carries `K`-th powers.
///
/// For each `p | Px` the class `h_p ≡ -m0` asks for `(m0' + 1)^K ≡ 1 - h_p`.
/// When `1 - h_p` is a nonzero `K`-th power `c^K`, take `m0' ≡ c - 1`;
/// otherwise take `m0' ≡ 0`, which keeps the bases coprime to `p`. Columns
/// that lose their witness become exceptional and are settled by primality
/// tests.
pub fn power_matrix(cert: &GapCertificate, k: u64, rows: u64, budget: u64) -> Result<MaierMatrix, KPowerError> {
    if k == 0 {
        return Err(KPowerError::ZeroExponent);
    }
    let mut rest = cert.modulus.clone();
    let mut moduli = Vec::new();
    for p in sieve_segment(0, cert.x.max(2)) {
        if (&rest % p).is_zero() {
            rest /= p;
            moduli.push(p);
        }
    }
    if !rest.is_one() {
        return Err(KPowerError::UnfactoredModulus(cert.x));
    }
    let mut system = Vec::with_capacity(moduli.len());
    for &p in &moduli {
        let target = ((&cert.m0 + 1u32) % p).to_u64().expect("reduced");
        let c = if target == 0 { 1 } else { (1..p).find(|&c| pow_mod(c, k, p) == target).unwrap_or(1) };
        system.push(((c + p - 1) % p, p));
    }
    let (m0, _) = crt_assemble(&system)?;
    MaierMatrix::new(m0, moduli, k, rows, cert.y, budget)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowScan {
    /// Rows whose base is prime.
    pub r0: Vec<u64>,
    /// Rows of `r0` with a prime among the exceptional columns.
    pub r1: Vec<u64>,
    /// `r0 \ r1`.
    pub winners: Vec<u64>,
    /// Columns checked by primality: the requested ones plus those without
    /// a covering witness, excluding column 1.
    pub exceptional: Vec<u64>,
}

pub fn scan_rows(m: &MaierMatrix, exceptional: &BTreeSet<u64>) -> RowScan {
    let witnesses = m.column_witnesses();
    let mut cols: BTreeSet<u64> = exceptional.iter().copied().filter(|&u| (2..=m.y).contains(&u)).collect();
    cols.extend((2..=m.y).filter(|&u| witnesses[u as usize - 1].is_none()));
    let mut scan =
        RowScan { r0: Vec::new(), r1: Vec::new(), winners: Vec::new(), exceptional: cols.iter().copied().collect() };
    for r in 1..=m.rows {
        let base = m.base(r);
        if !is_prime_big(&base).is_prime() {
            continue;
        }
        scan.r0.push(r);
        let power: BigUint = Pow::pow(&base, m.k as u32);
        if cols.iter().any(|&u| is_prime_big(&(&power + u - 1u32)).is_prime()) {
            scan.r1.push(r);
        } else {
            scan.winners.push(r);
        }
    }
    scan
}

/// Full check of row `r`: prime base, and every entry of columns `2..=y`
/// composite by a primality test.
pub fn verify_winner_row(m: &MaierMatrix, r: u64) -> bool {
    let base = m.base(r);
    if !is_prime_big(&base).is_prime() {
        return false;
    }
    let power: BigUint = Pow::pow(&base, m.k as u32);
    (2..=m.y).all(|u| !is_prime_big(&(&power + u - 1u32)).is_prime())
}

/// A prime power `q^K` strictly between consecutive primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KthPowerInGap {
    pub row: u64,
    pub q: BigUint,
    pub k: u64,
    pub power: BigUint,
    pub p_lo: BigUint,
    pub p_hi: BigUint,
}

/// Scans `rows` rows of the re-rooted matrix and returns the first winner,
/// with its surrounding primes found directly.
pub fn find_kth_power_in_gap(cert: &GapCertificate, k: u64, rows: u64) -> Result<Option<KthPowerInGap>, KPowerError> {
    let m = power_matrix(cert, k, rows, MATRIX_BUDGET)?;
    let scan = scan_rows(&m, &BTreeSet::new());
    let Some(&row) = scan.winners.first() else { return Ok(None) };
    let q = m.base(row);
    let power: BigUint = Pow::pow(&q, k as u32);
    let p_lo = prev_prime_big(&power).expect("q^K exceeds 2");
    let p_hi = next_prime_big(&power);
    Ok(Some(KthPowerInGap { row, q, k, power, p_lo, p_hi }))
}

/// A prime `q` with `p_lo < q^K < p_hi`, if any.
pub fn kth_power_prime_in_interval(p_lo: u64, p_hi: u64, k: u32) -> Option<u64> {
    (2..)
        .map(|q: u64| (q, q.checked_pow(k)))
        .take_while(|&(_, v)| v.is_some_and(|v| v < p_hi))
        .find(|&(q, v)| v.is_some_and(|v| v > p_lo) && is_prime(q))
        .map(|(q, _)| q)
}
