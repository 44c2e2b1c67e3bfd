//! Smooth functions on the simplex `{t_i >= 0, sum t_i <= 1}` and Monte
//! Carlo estimates of the two integrals that drive the sieve ratio.

use crate::exec::{chunk_sizes, open_unit_f64, stream_rng, unit_f64, Executor, Sequential};
use alloc::vec::Vec;
use rand_core::RngCore;

/// Samples per Monte Carlo chunk.
pub const IKJK_CHUNK: u64 = 1 << 16;

/// Function supported on the simplex `R_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SimplexFunction {
    Zero,
    /// `(1 - sum t_i)^exponent`; exponent 0 is the indicator of `R_k`.
    Power {
        exponent: f64,
    },
}

impl SimplexFunction {
    /// `(1 - sum t)^k`.
    pub fn default_for(k: usize) -> Self {
        SimplexFunction::Power { exponent: k as f64 }
    }

    /// Value at `t`, zero outside `R_k`.
    pub fn eval(&self, t: &[f64]) -> f64 {
        let s: f64 = t.iter().sum();
        if t.iter().any(|&v| v < 0.0) || s > 1.0 {
            return 0.0;
        }
        match *self {
            SimplexFunction::Zero => 0.0,
            SimplexFunction::Power { exponent } => libm::pow(1.0 - s, exponent),
        }
    }
}

/// Estimates of `I_k = int_{R_k} F^2` and
/// `J_k = int_{R_{k-1}} (int_0^{1 - sum t} F dt_k)^2`, with standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IkJk {
    pub k: usize,
    pub samples: u64,
    pub i: f64,
    pub i_se: f64,
    pub j: f64,
    pub j_se: f64,
}

impl IkJk {
    /// `J_k k / (I_k log k)`; undefined for `k < 2` or `I_k = 0`.
    pub fn ratio(&self) -> Option<f64> {
        (self.k >= 2 && self.i > 0.0).then(|| self.j * self.k as f64 / (self.i * libm::log(self.k as f64)))
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    si: f64,
    si2: f64,
    sj: f64,
    sj2: f64,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|v| v as f64).product()
}

/// Uniform point of `R_m` from `m + 1` exponential spacings.
fn simplex_point<R: RngCore>(rng: &mut R, m: usize, out: &mut Vec<f64>) {
    out.clear();
    let mut total = 0.0;
    for _ in 0..=m {
        let e = -libm::log(open_unit_f64(rng));
        out.push(e);
        total += e;
    }
    out.pop();
    for v in out.iter_mut() {
        *v /= total;
    }
}

/// `I` samples uniformly on `R_k`. `J` samples `t` on `R_{k-1}` and two
/// independent `t_k` on `[0, 1 - sum t]`, whose product of `F` values is an
/// unbiased estimate of the squared inner integral.
fn chunk(f: &SimplexFunction, k: usize, seed: u64, index: usize, count: u64) -> Moments {
    let mut rng = stream_rng(seed, index as u64);
    let vol_k = 1.0 / factorial(k);
    let vol_km1 = 1.0 / factorial(k - 1);
    let mut m = Moments::default();
    let mut t = Vec::with_capacity(k + 1);
    for _ in 0..count {
        simplex_point(&mut rng, k, &mut t);
        let fi = f.eval(&t);
        let xi = vol_k * fi * fi;

        simplex_point(&mut rng, k - 1, &mut t);
        let s = 1.0 - t.iter().sum::<f64>();
        t.push(unit_f64(&mut rng) * s);
        let f1 = f.eval(&t);
        *t.last_mut().expect("pushed above") = unit_f64(&mut rng) * s;
        let f2 = f.eval(&t);
        let xj = vol_km1 * s * s * f1 * f2;

        m.n += 1;
        m.si += xi;
        m.si2 += xi * xi;
        m.sj += xj;
        m.sj2 += xj * xj;
    }
    m
}

pub fn ik_jk(f: &SimplexFunction, k: usize, samples: u64, seed: u64) -> IkJk {
    ik_jk_with(f, k, samples, seed, &Sequential)
}

/// Monte Carlo over `samples` points in chunks of [`IKJK_CHUNK`]; chunk `c`
/// uses ChaCha stream `c`, so results do not depend on the executor.
pub fn ik_jk_with<E: Executor>(f: &SimplexFunction, k: usize, samples: u64, seed: u64, exec: &E) -> IkJk {
    assert!(k >= 1, "k must be positive");
    let (chunks, size) = chunk_sizes(samples, IKJK_CHUNK);
    let parts = exec.map_chunks(chunks, |c| chunk(f, k, seed, c, size(c)));
    let mut m = Moments::default();
    for p in parts {
        m.n += p.n;
        m.si += p.si;
        m.si2 += p.si2;
        m.sj += p.sj;
        m.sj2 += p.sj2;
    }
    let n = m.n.max(1) as f64;
    let se = |s: f64, s2: f64| {
        let mean = s / n;
        let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
        libm::sqrt(var / n)
    };
    IkJk { k, samples: m.n, i: m.si / n, i_se: se(m.si, m.si2), j: m.sj / n, j_se: se(m.sj, m.sj2) }
}

/// Exact `I_k` and `J_k` for `F = (1 - sum t)^a`.
pub fn power_closed_form(k: usize, a: f64) -> (f64, f64) {
    // int_{R_k} (1 - s)^c = Gamma(c + 1) / Gamma(c + k + 1).
    let beta = |c: f64, k: usize| libm::exp(libm::lgamma(c + 1.0) - libm::lgamma(c + k as f64 + 1.0));
    let i = beta(2.0 * a, k);
    let j = beta(2.0 * a + 2.0, k - 1) / ((a + 1.0) * (a + 1.0));
    (i, j)
}
