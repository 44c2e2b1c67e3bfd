//! Multidimensional sieve weights attached to a set of linear forms.
//!
//! Notation: `L_i(n) = a_i n + b_i` for `i < k`; `W` is the product of the
//! primes `p <= 2k^2` not dividing `B`; for each prime `p`, every root `u` of
//! `prod L_i mod p` records the least index `j` with `p | L_j(u)`.
//! A tuple `r = (r_1..r_k)` lies in `D_k` when `prod r_i` is squarefree and
//! coprime to `WB`, and `p | r_j` only for indices `j` recorded at `p`.

use super::simplex::SimplexFunction;
use crate::arith::inv_mod;
use crate::primes::sieve_segment;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigUint;
use num_traits::One;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TupleError {
    #[error("linear form {0} has zero slope")]
    ZeroSlope(usize),
    #[error("at least one linear form is required")]
    Empty,
    #[error("truncation level R must exceed 1")]
    BadLevel,
}

/// `a n + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinearForm {
    pub a: i64,
    pub b: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearFormSet {
    forms: Vec<LinearForm>,
}

impl LinearFormSet {
    pub fn new(forms: Vec<LinearForm>) -> Result<Self, TupleError> {
        if forms.is_empty() {
            return Err(TupleError::Empty);
        }
        if let Some(i) = forms.iter().position(|f| f.a == 0) {
            return Err(TupleError::ZeroSlope(i));
        }
        Ok(Self { forms })
    }

    /// Forms `n + h` for each offset.
    pub fn from_offsets(offsets: &[i64]) -> Result<Self, TupleError> {
        Self::new(offsets.iter().map(|&b| LinearForm { a: 1, b }).collect())
    }

    pub fn forms(&self) -> &[LinearForm] {
        &self.forms
    }

    pub fn k(&self) -> usize {
        self.forms.len()
    }

    pub fn eval(&self, i: usize, n: i64) -> i128 {
        let f = self.forms[i];
        f.a as i128 * n as i128 + f.b as i128
    }

    /// A prime dividing `prod L_i(n)` for every `n`, if one exists.
    pub fn fixed_prime_divisor(&self) -> Option<u64> {
        let max_a = self.forms.iter().map(|f| f.a.unsigned_abs()).max().unwrap_or(1);
        let bound = max_a.max(self.k() as u64);
        sieve_segment(0, bound + 1).into_iter().find(|&p| omega_count(p, self).count == p)
    }
}

/// Roots of `prod L_i mod p` with their least indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaInfo {
    pub p: u64,
    pub count: u64,
    /// `(root, least index)`, ascending by root; indices are zero-based.
    pub roots: Vec<(u64, usize)>,
}

impl OmegaInfo {
    /// Indices that may carry the prime `p` in a `D_k` tuple.
    pub fn allowed_indices(&self) -> BTreeSet<usize> {
        self.roots.iter().map(|&(_, j)| j).collect()
    }
}

pub fn omega_count(p: u64, forms: &LinearFormSet) -> OmegaInfo {
    let mut roots: BTreeMap<u64, usize> = BTreeMap::new();
    for (j, f) in forms.forms().iter().enumerate() {
        let a = f.a.rem_euclid(p as i64) as u64;
        let b = f.b.rem_euclid(p as i64) as u64;
        if a == 0 {
            if b == 0 {
                for u in 0..p {
                    roots.entry(u).or_insert(j);
                }
            }
            continue;
        }
        let u = (p - b) % p * inv_mod(a, p).expect("p prime, a nonzero") % p;
        roots.entry(u).or_insert(j);
    }
    OmegaInfo { p, count: roots.len() as u64, roots: roots.into_iter().collect() }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularSeries {
    pub value: f64,
    /// Estimated log of the omitted factor over `p > cutoff`, assuming
    /// `omega(p) = k` there.
    pub tail_log_estimate: f64,
}

/// `prod_{p <= cutoff, p ∤ B} (1 - omega(p)/p)(1 - 1/p)^(-k)`.
pub fn singular_series(forms: &LinearFormSet, b: u64, cutoff: u64) -> SingularSeries {
    let excluded: Vec<u64> = sieve_segment(0, cutoff + 1).into_iter().filter(|&p| b % p == 0).collect();
    singular_series_excluding(forms, &excluded, cutoff)
}

/// The same product with the primes in `excluded` left out.
pub fn singular_series_excluding(forms: &LinearFormSet, excluded: &[u64], cutoff: u64) -> SingularSeries {
    let k = forms.k() as f64;
    let mut log_value = 0.0;
    for p in sieve_segment(0, cutoff + 1) {
        if excluded.contains(&p) {
            continue;
        }
        let w = omega_count(p, forms).count;
        if w == p {
            return SingularSeries { value: 0.0, tail_log_estimate: 0.0 };
        }
        let pf = p as f64;
        log_value += libm::log1p(-(w as f64) / pf) - k * libm::log1p(-1.0 / pf);
    }
    let c = (cutoff.max(2)) as f64;
    let tail_log_estimate = -k * (k - 1.0) / (2.0 * c * libm::log(c));
    SingularSeries { value: libm::exp(log_value), tail_log_estimate }
}

/// `W = prod_{p <= 2k^2, p ∤ B} p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WFactor {
    pub primes: Vec<u64>,
    pub value: BigUint,
}

pub fn w_factor(k: usize, b: u64) -> WFactor {
    let bound = 2 * (k as u64) * (k as u64);
    let primes: Vec<u64> = sieve_segment(0, bound + 1).into_iter().filter(|&p| b % p != 0).collect();
    let value = primes.iter().fold(BigUint::one(), |acc, &p| acc * p);
    WFactor { primes, value }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaynardConfig {
    /// Truncation level `R`.
    pub r: f64,
    /// Exceptional modulus `B`, 1 when unused.
    pub b: u64,
    pub f: SimplexFunction,
    /// Last prime of the truncated singular series; raised to `R` if smaller.
    pub cutoff: u64,
}

impl MaynardConfig {
    pub fn new(k: usize, r: f64) -> Self {
        Self { r, b: 1, f: SimplexFunction::default_for(k), cutoff: 1000 }
    }
}

/// Precomputed `lambda_d` for every `d` in its support.
#[derive(Debug, Clone)]
pub struct MaynardWeightState {
    pub forms: LinearFormSet,
    pub w: WFactor,
    /// Primes dividing `WB`.
    pub excluded: Vec<u64>,
    /// `S_WB`, the singular series without the primes dividing `WB`.
    pub singular_wb: f64,
    lambda: BTreeMap<Vec<u64>, f64>,
}

impl MaynardWeightState {
    /// `lambda_d`; zero outside the support.
    pub fn lambda(&self, d: &[u64]) -> f64 {
        self.lambda.get(d).copied().unwrap_or(0.0)
    }

    pub fn support(&self) -> impl Iterator<Item = (&Vec<u64>, f64)> {
        self.lambda.iter().map(|(d, &v)| (d, v))
    }
}

/// Builds `lambda_d = mu(prod d) prod d * sum_{r : d_i | r_i, prod r <= R} Y_r / phi_omega(prod r)`
/// with `Y_r = (WB/phi(WB))^k S_WB F(log r_1/log R, ..)` on `D_k` and
/// `phi_omega(m) = prod_{p | m} (p - omega(p))`.
pub fn maynard_state(forms: &LinearFormSet, cfg: &MaynardConfig) -> Result<MaynardWeightState, TupleError> {
    if !(cfg.r > 1.0) {
        return Err(TupleError::BadLevel);
    }
    let k = forms.k();
    let w = w_factor(k, cfg.b);
    let mut excluded = w.primes.clone();
    excluded.extend(crate::arith::factorize(cfg.b).iter().map(|&(p, _)| p));
    excluded.sort_unstable();
    excluded.dedup();
    let cutoff = cfg.cutoff.max(libm::ceil(cfg.r) as u64);
    let singular_wb = singular_series_excluding(forms, &excluded, cutoff).value;
    let wb_ratio: f64 = excluded.iter().map(|&p| libm::pow(p as f64 / (p as f64 - 1.0), k as f64)).product();
    let scale = wb_ratio * singular_wb;

    // Primes that may appear in D_k, with their allowed indices and p - omega(p).
    let mut usable: Vec<(u64, Vec<usize>, f64)> = Vec::new();
    for p in sieve_segment(0, libm::floor(cfg.r) as u64 + 1) {
        if excluded.contains(&p) {
            continue;
        }
        let info = omega_count(p, forms);
        if info.count > 0 && info.count < p {
            usable.push((p, info.allowed_indices().into_iter().collect(), (p - info.count) as f64));
        }
    }

    let mut lambda: BTreeMap<Vec<u64>, f64> = BTreeMap::new();
    if scale != 0.0 {
        let log_r = libm::log(cfg.r);
        let mut r = vec![1u64; k];
        let mut chosen: Vec<(usize, usize)> = Vec::new();
        enumerate_dk(&usable, cfg.r, 0, 1, &mut r, &mut chosen, &mut |r, chosen| {
            let t: Vec<f64> = r.iter().map(|&ri| libm::log(ri as f64) / log_r).collect();
            let y = scale * cfg.f.eval(&t);
            if y == 0.0 {
                return;
            }
            let phi: f64 = chosen.iter().map(|&(pi, _)| usable[pi].2).product();
            let term = y / phi;
            // Every sub-tuple d of r receives the term.
            for mask in 0u64..(1 << chosen.len()) {
                let mut d = vec![1u64; k];
                for (bit, &(pi, j)) in chosen.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        d[j] *= usable[pi].0;
                    }
                }
                *lambda.entry(d).or_insert(0.0) += term;
            }
        });
        for (d, v) in lambda.iter_mut() {
            let primes: u32 = d.iter().map(|&di| crate::arith::factorize(di).len() as u32).sum();
            let prod: f64 = d.iter().map(|&di| di as f64).product();
            let mu = if primes % 2 == 0 { 1.0 } else { -1.0 };
            *v *= mu * prod;
        }
    }
    Ok(MaynardWeightState { forms: forms.clone(), w, excluded, singular_wb, lambda })
}

/// Receives a `D_k` tuple and the `(index into usable, coordinate)` pairs
/// that built it.
type DkVisitor<'a> = dyn FnMut(&[u64], &[(usize, usize)]) + 'a;

/// Depth-first walk over `D_k` tuples with product `<= R`. `chosen` lists
/// `(index into usable, coordinate)` for the primes used so far.
fn enumerate_dk(
    usable: &[(u64, Vec<usize>, f64)],
    level: f64,
    from: usize,
    prod: u64,
    r: &mut Vec<u64>,
    chosen: &mut Vec<(usize, usize)>,
    visit: &mut DkVisitor<'_>,
) {
    visit(r, chosen);
    for i in from..usable.len() {
        let p = usable[i].0;
        let next = prod.saturating_mul(p);
        if next as f64 > level {
            break;
        }
        for &j in &usable[i].1 {
            r[j] *= p;
            chosen.push((i, j));
            enumerate_dk(usable, level, i + 1, next, r, chosen, visit);
            chosen.pop();
            r[j] /= p;
        }
    }
}

/// `w(n) = (sum_{d_i | L_i(n)} lambda_d)^2`; a zero value `L_i(n)` is divisible
/// by every `d_i`.
pub fn maynard_weight(n: i64, state: &MaynardWeightState) -> f64 {
    let values: Vec<i128> = (0..state.forms.k()).map(|i| state.forms.eval(i, n)).collect();
    let sum: f64 = state
        .support()
        .filter(|(d, _)| d.iter().zip(&values).all(|(&di, &v)| v % di as i128 == 0))
        .map(|(_, v)| v)
        .sum();
    sum * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::twin_constant;

    fn twins() -> LinearFormSet {
        LinearFormSet::from_offsets(&[0, 2]).unwrap()
    }

    #[test]
    fn omega_small_primes() {
        let o2 = omega_count(2, &twins());
        assert_eq!((o2.count, o2.roots.clone()), (1, vec![(0, 0)]));
        let o3 = omega_count(3, &twins());
        assert_eq!((o3.count, o3.roots.clone()), (2, vec![(0, 0), (1, 1)]));
        let fixed = LinearFormSet::from_offsets(&[0, 1]).unwrap();
        assert_eq!(fixed.fixed_prime_divisor(), Some(2));
        assert_eq!(twins().fixed_prime_divisor(), None);
        assert!(LinearFormSet::new(vec![LinearForm { a: 0, b: 1 }]).is_err());
    }

    #[test]
    fn twin_singular_series() {
        let s = singular_series(&twins(), 1, 100).value;
        assert!((s - twin_constant(100)).abs() < 1e-12 * s);
    }

    #[test]
    fn w_values() {
        assert_eq!(w_factor(2, 1).value, BigUint::from(210u32));
        assert_eq!(w_factor(3, 1).value, BigUint::from(510_510u32));
        assert_eq!(w_factor(2, 7).primes, vec![2, 3, 5]);
    }

    #[test]
    fn tiny_level_has_only_unit_tuple() {
        let cfg = MaynardConfig::new(2, 6.0);
        let st = maynard_state(&twins(), &cfg).unwrap();
        let support: Vec<&Vec<u64>> = st.support().map(|(d, _)| d).collect();
        assert_eq!(support, vec![&vec![1, 1]]);
        let l = st.lambda(&[1, 1]);
        assert!((maynard_weight(15, &st) - l * l).abs() < 1e-12 * l * l);
    }

    #[test]
    fn zero_function_gives_zero_weights() {
        let mut cfg = MaynardConfig::new(2, 200.0);
        cfg.f = SimplexFunction::Zero;
        let st = maynard_state(&twins(), &cfg).unwrap();
        assert!((0..50).all(|n| maynard_weight(n, &st) == 0.0));
    }
}
