//! Random hypergraph covering: the survival recursion for a layered random
//! edge model, a nibble simulator for it, and colored matchings in
//! `K`-uniform graphs.

use crate::exec::{below, chunk_sizes, open_unit_f64, shuffle, stream_rng, unit_f64, Executor};
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use rand_core::RngCore;

/// Rejection attempts before a conditioned edge is declared empty.
const MAX_TRIES: u32 = 10_000;
/// Trials per simulation chunk.
pub const TRIAL_CHUNK: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HyperError {
    #[error("invalid parameter: {0}")]
    Invalid(&'static str),
    #[error("edge {0} uses a vertex or color out of range")]
    OutOfRange(usize),
}

/// Law of one random edge over vertices `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub enum EdgeDistribution {
    /// `sets[i]` with probability `probs[i]`; the empty set otherwise.
    Choice { sets: Vec<Vec<u32>>, probs: Vec<f64> },
    /// A uniformly random `size`-subset of `lo..hi`.
    Uniform { lo: u32, hi: u32, size: u32 },
    /// Every vertex independently with probability `q`.
    Bernoulli { q: f64 },
}

impl EdgeDistribution {
    fn validate(&self, n: u32) -> Result<(), HyperError> {
        match self {
            EdgeDistribution::Choice { sets, probs } => {
                let total: f64 = probs.iter().sum();
                if sets.len() != probs.len() || probs.iter().any(|&p| !(0.0..=1.0).contains(&p)) || total > 1.0 + 1e-12
                {
                    return Err(HyperError::Invalid("choice probabilities must be in [0, 1] and sum to at most 1"));
                }
                if sets.iter().flatten().any(|&v| v >= n) {
                    return Err(HyperError::Invalid("choice set vertex out of range"));
                }
            }
            EdgeDistribution::Uniform { lo, hi, size } => {
                if lo >= hi || *hi > n || *size == 0 || size > &(hi - lo) {
                    return Err(HyperError::Invalid("uniform edge needs 0 < size <= hi - lo and hi <= n"));
                }
            }
            EdgeDistribution::Bernoulli { q } => {
                if !(0.0..=1.0).contains(q) {
                    return Err(HyperError::Invalid("bernoulli q must be in [0, 1]"));
                }
            }
        }
        Ok(())
    }

    fn max_size(&self, n: u32) -> usize {
        match self {
            EdgeDistribution::Choice { sets, .. } => sets.iter().map(Vec::len).max().unwrap_or(0),
            EdgeDistribution::Uniform { size, .. } => *size as usize,
            EdgeDistribution::Bernoulli { q } => {
                if *q > 0.0 {
                    n as usize
                } else {
                    0
                }
            }
        }
    }

    /// `P(v ∈ e)` for every vertex.
    fn inclusion(&self, n: u32) -> Vec<f64> {
        let mut out = vec![0.0; n as usize];
        match self {
            EdgeDistribution::Choice { sets, probs } => {
                for (s, &p) in sets.iter().zip(probs) {
                    let distinct: BTreeSet<u32> = s.iter().copied().collect();
                    for v in distinct {
                        out[v as usize] += p;
                    }
                }
            }
            EdgeDistribution::Uniform { lo, hi, size } => {
                let p = *size as f64 / (hi - lo) as f64;
                out[*lo as usize..*hi as usize].iter_mut().for_each(|x| *x = p);
            }
            EdgeDistribution::Bernoulli { q } => out.iter_mut().for_each(|x| *x = *q),
        }
        out
    }

    /// `P(a, b ∈ e)` for `a != b`, ignoring `Choice` sets (handled separately).
    fn generic_codegree(&self, a: u32, b: u32) -> f64 {
        match self {
            EdgeDistribution::Choice { .. } => 0.0,
            EdgeDistribution::Uniform { lo, hi, size } => {
                let inside = |v: u32| (*lo..*hi).contains(&v);
                if inside(a) && inside(b) {
                    let (s, m) = (*size as f64, (hi - lo) as f64);
                    s * (s - 1.0) / (m * (m - 1.0))
                } else {
                    0.0
                }
            }
            EdgeDistribution::Bernoulli { q } => q * q,
        }
    }

    fn sample<R: RngCore>(&self, rng: &mut R, n: u32, out: &mut Vec<u32>) {
        out.clear();
        match self {
            EdgeDistribution::Choice { sets, probs } => {
                let mut u = unit_f64(rng);
                for (s, &p) in sets.iter().zip(probs) {
                    if u < p {
                        out.extend_from_slice(s);
                        return;
                    }
                    u -= p;
                }
            }
            EdgeDistribution::Uniform { lo, hi, size } => {
                while out.len() < *size as usize {
                    let v = lo + below(rng, (hi - lo) as u64) as u32;
                    if !out.contains(&v) {
                        out.push(v);
                    }
                }
            }
            EdgeDistribution::Bernoulli { q } => {
                if *q <= 0.0 {
                    return;
                }
                if *q >= 1.0 {
                    out.extend(0..n);
                    return;
                }
                // Geometric skips between included vertices.
                let lq = libm::log1p(-q);
                let mut v = 0f64;
                loop {
                    v += libm::floor(libm::log(open_unit_f64(rng)) / lq);
                    if v >= n as f64 {
                        return;
                    }
                    out.push(v as u32);
                    v += 1.0;
                }
            }
        }
    }
}

/// `count` independent edges drawn from distribution `dist`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeBatch {
    pub dist: usize,
    pub count: u64,
}

/// Vertices `0..n_vertices` and layers of independent random edges.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredEdgeModel {
    pub n_vertices: u32,
    /// Declared bound on edge size.
    pub r: usize,
    pub distributions: Vec<EdgeDistribution>,
    pub layers: Vec<Vec<EdgeBatch>>,
}

impl LayeredEdgeModel {
    pub fn validate(&self) -> Result<(), HyperError> {
        for d in &self.distributions {
            d.validate(self.n_vertices)?;
        }
        if self.layers.iter().flatten().any(|b| b.dist >= self.distributions.len()) {
            return Err(HyperError::Invalid("edge batch names an unknown distribution"));
        }
        Ok(())
    }

    pub fn layer_size(&self, j: usize) -> u64 {
        self.layers[j].iter().map(|b| b.count).sum()
    }

    /// `d_{I_j}(v) = sum_{i ∈ I_j} P(v ∈ e_i)`, indexed `[layer][vertex]`.
    pub fn degrees(&self) -> Vec<Vec<f64>> {
        let incl: Vec<Vec<f64>> = self.distributions.iter().map(|d| d.inclusion(self.n_vertices)).collect();
        self.layers
            .iter()
            .map(|layer| {
                let mut deg = vec![0.0; self.n_vertices as usize];
                for b in layer {
                    for (x, p) in deg.iter_mut().zip(&incl[b.dist]) {
                        *x += b.count as f64 * p;
                    }
                }
                deg
            })
            .collect()
    }

    /// `max_{a != b} sum_{i ∈ I_j} P(a, b ∈ e_i)` for layer `j`.
    pub fn max_codegree(&self, j: usize) -> f64 {
        let layer = &self.layers[j];
        let generic = |a: u32, b: u32| -> f64 {
            layer.iter().map(|bt| bt.count as f64 * self.distributions[bt.dist].generic_codegree(a, b)).sum()
        };
        let mut best = 0.0f64;
        // Generic contributions are constant on products of the intervals
        // cut out by the uniform ranges, so one pair per product suffices.
        let mut cuts: BTreeSet<u32> = [0, self.n_vertices].into_iter().collect();
        for bt in layer {
            if let EdgeDistribution::Uniform { lo, hi, .. } = self.distributions[bt.dist] {
                cuts.insert(lo);
                cuts.insert(hi);
            }
        }
        let cuts: Vec<u32> = cuts.into_iter().collect();
        for i in 0..cuts.len() - 1 {
            for jj in i..cuts.len() - 1 {
                let (a, b) = if i == jj { (cuts[i], cuts[i] + 1) } else { (cuts[i], cuts[jj]) };
                if b < cuts[jj + 1] {
                    best = best.max(generic(a, b));
                }
            }
        }
        let mut pairs: BTreeMap<(u32, u32), f64> = BTreeMap::new();
        for bt in layer {
            if let EdgeDistribution::Choice { sets, probs } = &self.distributions[bt.dist] {
                for (s, &p) in sets.iter().zip(probs) {
                    let distinct: Vec<u32> = s.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
                    for x in 0..distinct.len() {
                        for y in x + 1..distinct.len() {
                            *pairs.entry((distinct[x], distinct[y])).or_insert(0.0) += bt.count as f64 * p;
                        }
                    }
                }
            }
        }
        for (&(a, b), &c) in &pairs {
            best = best.max(c + generic(a, b));
        }
        best
    }

    /// `max_{i ∈ I_j, v} P(v ∈ e_i)`.
    pub fn max_inclusion(&self, j: usize) -> f64 {
        self.layers[j]
            .iter()
            .map(|b| self.distributions[b.dist].inclusion(self.n_vertices).into_iter().fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }
}

/// Survival probabilities: `P_0 = 1`, `P_{j+1} = P_j exp(-d_{j+1} / P_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PjTable {
    /// `p[j][v]` for `j = 0..=m`.
    pub p: Vec<Vec<f64>>,
}

impl PjTable {
    pub fn min(&self, j: usize) -> f64 {
        self.p[j].iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn mean(&self, j: usize) -> f64 {
        self.p[j].iter().sum::<f64>() / self.p[j].len().max(1) as f64
    }
}

/// Runs the recursion on `degrees[layer][vertex]`; all rows must have the
/// same length.
pub fn pj_recursion(degrees: &[Vec<f64>]) -> PjTable {
    let n = degrees.first().map_or(0, Vec::len);
    let mut p = vec![vec![1.0; n]];
    for d in degrees {
        let prev = p.last().expect("starts with P_0");
        let next = prev.iter().zip(d).map(|(&pj, &dj)| pj * libm::exp(-dj / pj)).collect();
        p.push(next);
    }
    PjTable { p }
}

/// Constants for [`check_hypotheses`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypothesisParams {
    pub delta: f64,
    pub kappa: f64,
    /// Degree cap `D`.
    pub d_cap: f64,
    /// Exponent `A`.
    pub a: f64,
    /// Number of layers checked.
    pub m: usize,
    /// Absolute constant in the smallness condition; 1 unless set.
    pub c0: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisCheck {
    pub name: &'static str,
    /// Layer the check refers to; `None` for global checks.
    pub layer: Option<usize>,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

impl HypothesisCheck {
    /// `bound - value`; non-negative exactly when the check passes.
    pub fn margin(&self) -> f64 {
        self.bound - self.value
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport {
    pub checks: Vec<HypothesisCheck>,
    /// Set when a probability came from sampling with error above its margin.
    /// Every quantity here is computed exactly, so this stays false.
    pub variance_warning: bool,
}

impl HypothesisReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Checks, for layers `1..=m`:
/// * smallness: `log delta <= 10^(m+2) (A log kappa - log C0 - A D)`;
/// * edge size: every edge has at most `r` vertices;
/// * sparsity: `P(v ∈ e_i) <= delta / sqrt(|I_j|)`;
/// * codegree: `sum_{i ∈ I_j} P(a, b ∈ e_i) <= delta`;
/// * degree: `d_{I_j}(v) <= D P_{j-1}(v)`;
/// * survival: `P_j(v) >= kappa`.
pub fn check_hypotheses(model: &LayeredEdgeModel, hp: &HypothesisParams) -> Result<HypothesisReport, HyperError> {
    model.validate()?;
    let m = hp.m.min(model.layers.len());
    let mut checks = Vec::new();
    let exponent = libm::pow(10.0, (hp.m + 2) as f64);
    let rhs = exponent * (hp.a * libm::log(hp.kappa) - libm::log(hp.c0) - hp.a * hp.d_cap);
    let lhs = libm::log(hp.delta);
    checks.push(HypothesisCheck { name: "smallness", layer: None, value: lhs, bound: rhs, pass: lhs <= rhs });
    let size = model.distributions.iter().map(|d| d.max_size(model.n_vertices)).max().unwrap_or(0);
    checks.push(HypothesisCheck {
        name: "edge-size",
        layer: None,
        value: size as f64,
        bound: model.r as f64,
        pass: size <= model.r,
    });
    let degrees = model.degrees();
    let table = pj_recursion(&degrees[..m]);
    for (j, layer_degrees) in degrees[..m].iter().enumerate() {
        let n_edges = model.layer_size(j);
        let sparsity_bound = if n_edges == 0 { f64::INFINITY } else { hp.delta / libm::sqrt(n_edges as f64) };
        let incl = model.max_inclusion(j);
        checks.push(HypothesisCheck {
            name: "sparsity",
            layer: Some(j + 1),
            value: incl,
            bound: sparsity_bound,
            pass: incl <= sparsity_bound,
        });
        let co = model.max_codegree(j);
        checks.push(HypothesisCheck {
            name: "codegree",
            layer: Some(j + 1),
            value: co,
            bound: hp.delta,
            pass: co <= hp.delta,
        });
        // Worst vertex for d(v) / (D P_{j-1}(v)).
        let (value, bound) = layer_degrees
            .iter()
            .zip(&table.p[j])
            .map(|(&d, &p)| (d, hp.d_cap * p))
            .fold((0.0, f64::INFINITY), |acc, (d, b)| if d - b > acc.0 - acc.1 { (d, b) } else { acc });
        checks.push(HypothesisCheck { name: "degree", layer: Some(j + 1), value, bound, pass: value <= bound });
        let pmin = table.min(j + 1);
        // Stored as (-P, -kappa) so that value <= bound means pass.
        checks.push(HypothesisCheck {
            name: "survival",
            layer: Some(j + 1),
            value: -pmin,
            bound: -hp.kappa,
            pass: pmin >= hp.kappa,
        });
    }
    Ok(HypothesisReport { checks, variance_warning: false })
}

/// Empirical against predicted survival after one layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerSurvival {
    pub layer: usize,
    /// Mean surviving fraction of vertices.
    pub empirical: f64,
    /// Standard error of `empirical` across trials.
    pub std_error: f64,
    /// Mean of `P_j(v)` over vertices.
    pub predicted: f64,
    /// `5^-j`, the reference decay rate.
    pub reference: f64,
}

impl LayerSurvival {
    /// `|empirical - predicted| / std_error`.
    pub fn z_score(&self) -> f64 {
        let diff = libm::fabs(self.empirical - self.predicted);
        if self.std_error > 0.0 {
            diff / self.std_error
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Runs `trials` independent passes over the first `m` layers. Within a layer
/// every edge is drawn conditioned on lying inside the current survivors
/// (by rejection); the vertices they cover are removed when the layer ends.
pub fn nibble_simulate<E: Executor>(
    model: &LayeredEdgeModel,
    m: usize,
    trials: u64,
    seed: u64,
    exec: &E,
) -> Result<Vec<LayerSurvival>, HyperError> {
    model.validate()?;
    if m > model.layers.len() {
        return Err(HyperError::Invalid("more layers requested than the model has"));
    }
    let n = model.n_vertices;
    let (chunks, size) = chunk_sizes(trials, TRIAL_CHUNK);
    let parts = exec.map_chunks(chunks, |c| {
        let mut rng = stream_rng(seed, c as u64);
        let mut sums = vec![(0.0f64, 0.0f64); m];
        let mut alive = vec![true; n as usize];
        let mut edge = Vec::new();
        let mut covered = Vec::new();
        for _ in 0..size(c) {
            alive.iter_mut().for_each(|a| *a = true);
            let mut remaining = n as u64;
            for (j, layer) in model.layers[..m].iter().enumerate() {
                covered.clear();
                for b in layer {
                    let dist = &model.distributions[b.dist];
                    for _ in 0..b.count {
                        let mut tries = 0;
                        loop {
                            dist.sample(&mut rng, n, &mut edge);
                            if edge.iter().all(|&v| alive[v as usize]) {
                                covered.extend_from_slice(&edge);
                                break;
                            }
                            tries += 1;
                            if tries >= MAX_TRIES {
                                break;
                            }
                        }
                    }
                }
                for &v in &covered {
                    if alive[v as usize] {
                        alive[v as usize] = false;
                        remaining -= 1;
                    }
                }
                let frac = remaining as f64 / n as f64;
                sums[j].0 += frac;
                sums[j].1 += frac * frac;
            }
        }
        sums
    });
    let mut total = vec![(0.0f64, 0.0f64); m];
    for part in parts {
        for (t, p) in total.iter_mut().zip(part) {
            t.0 += p.0;
            t.1 += p.1;
        }
    }
    let table = pj_recursion(&model.degrees()[..m]);
    let t = trials.max(1) as f64;
    Ok(total
        .iter()
        .enumerate()
        .map(|(j, &(s, s2))| {
            let mean = s / t;
            let var = (s2 / t - mean * mean).max(0.0) * t / (t - 1.0).max(1.0);
            LayerSurvival {
                layer: j + 1,
                empirical: mean,
                std_error: libm::sqrt(var / t),
                predicted: table.mean(j + 1),
                reference: libm::pow(5.0, -((j + 1) as f64)),
            }
        })
        .collect())
}

/// Edge-colored graph; colors are `1..=n_colors`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredGraph {
    pub n_vertices: u32,
    pub n_colors: u32,
    /// `(a, b, color)`.
    pub edges: Vec<(u32, u32, u32)>,
}

impl ColoredGraph {
    pub fn validate(&self) -> Result<(), HyperError> {
        for (i, &(a, b, c)) in self.edges.iter().enumerate() {
            if a >= self.n_vertices || b >= self.n_vertices || a == b || c == 0 || c > self.n_colors {
                return Err(HyperError::OutOfRange(i));
            }
        }
        Ok(())
    }

    /// Block of a color for `K` blocks: color `c` is in block `i` when
    /// `(i-1) N/K < c <= i N/K`; blocks are numbered from 1.
    pub fn block_of(&self, color: u32, k: u32) -> u32 {
        ((color as u64 * k as u64).div_ceil(self.n_colors as u64)) as u32
    }

    /// `(S, T)` if every color has `S` edges and every vertex meets exactly
    /// `T/K` edges from each color block.
    pub fn uniformity(&self, k: u32) -> Option<(u64, u64)> {
        let mut per_color = vec![0u64; self.n_colors as usize + 1];
        let mut per_vertex_block = vec![0u64; self.n_vertices as usize * k as usize];
        for &(a, b, c) in &self.edges {
            per_color[c as usize] += 1;
            let blk = (self.block_of(c, k) - 1) as usize;
            per_vertex_block[a as usize * k as usize + blk] += 1;
            per_vertex_block[b as usize * k as usize + blk] += 1;
        }
        let s = per_color[1];
        let t_over_k = per_vertex_block[0];
        (per_color[1..].iter().all(|&v| v == s) && per_vertex_block.iter().all(|&v| v == t_over_k))
            .then_some((s, t_over_k * k as u64))
    }
}

/// A `K`-uniform graph on `c N` vertices with `N` colors: each color block
/// gets `T/K` random perfect matchings, whose edges are shuffled and dealt
/// `S = cT/2` to each color of the block. Matchings repeating an edge are
/// redrawn.
pub fn generate_uniform_graph(n_colors: u32, c: u32, k: u32, t: u32, seed: u64) -> Result<ColoredGraph, HyperError> {
    if k == 0 || n_colors % k != 0 || t % k != 0 || t == 0 {
        return Err(HyperError::Invalid("K must divide both N and T"));
    }
    let n = n_colors as u64 * c as u64;
    if n % 2 != 0 || n < 2 || n > u32::MAX as u64 {
        return Err(HyperError::Invalid("c N must be even and fit in u32"));
    }
    if (c as u64 * t as u64) % 2 != 0 {
        return Err(HyperError::Invalid("c T must be even"));
    }
    let n = n as u32;
    let s = (c as u64 * t as u64 / 2) as usize;
    let per_block = n_colors / k;
    let mut rng = stream_rng(seed, 0);
    let mut seen: BTreeSet<(u32, u32)> = BTreeSet::new();
    let mut edges = Vec::new();
    let mut verts: Vec<u32> = (0..n).collect();
    for block in 0..k {
        let mut block_edges: Vec<(u32, u32)> = Vec::new();
        for _ in 0..t / k {
            let mut attempt = 0;
            let matching = loop {
                shuffle(&mut rng, &mut verts);
                let m: Vec<(u32, u32)> = verts.chunks(2).map(|p| (p[0].min(p[1]), p[0].max(p[1]))).collect();
                attempt += 1;
                if attempt >= 1000 || m.iter().all(|e| !seen.contains(e)) {
                    break m;
                }
            };
            seen.extend(matching.iter().copied());
            block_edges.extend(matching);
        }
        shuffle(&mut rng, &mut block_edges);
        for (i, chunk) in block_edges.chunks(s).enumerate() {
            let color = block * per_block + i as u32 + 1;
            edges.extend(chunk.iter().map(|&(a, b)| (a, b, color)));
        }
    }
    Ok(ColoredGraph { n_vertices: n, n_colors, edges })
}

/// Edges picked per block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredMatching {
    /// Indices into the graph's edge list.
    pub edges: Vec<usize>,
    pub block_sizes: Vec<usize>,
}

/// Processes color blocks `1..=K` in order; within a block, scans edges by
/// color then input order and keeps each edge whose vertices and color are
/// still free. Each block's pick is maximal given the earlier blocks.
pub fn greedy_color_matching(g: &ColoredGraph, k: u32) -> ColoredMatching {
    let mut order: Vec<usize> = (0..g.edges.len()).collect();
    order.sort_by_key(|&i| (g.block_of(g.edges[i].2, k), g.edges[i].2, i));
    let mut used_v = vec![false; g.n_vertices as usize];
    let mut used_c = vec![false; g.n_colors as usize + 1];
    let mut out = ColoredMatching { edges: Vec::new(), block_sizes: vec![0; k as usize] };
    for i in order {
        let (a, b, c) = g.edges[i];
        if !used_v[a as usize] && !used_v[b as usize] && !used_c[c as usize] {
            used_v[a as usize] = true;
            used_v[b as usize] = true;
            used_c[c as usize] = true;
            out.edges.push(i);
            out.block_sizes[(g.block_of(c, k) - 1) as usize] += 1;
        }
    }
    out
}

/// Vertex-disjoint and color-distinct.
pub fn validate_matching(g: &ColoredGraph, m: &ColoredMatching) -> bool {
    let mut vs = BTreeSet::new();
    let mut cs = BTreeSet::new();
    m.edges.iter().all(|&i| {
        let (a, b, c) = g.edges[i];
        vs.insert(a) && vs.insert(b) && cs.insert(c)
    })
}

/// `(cN/4)(1 - exp(-4/c + 8/(c^2 K)))`.
pub fn matching_bound(n_colors: u32, c: f64, k: u32) -> f64 {
    let n = n_colors as f64;
    c * n / 4.0 * (1.0 - libm::exp(-4.0 / c + 8.0 / (c * c * k as f64)))
}

/// Configuration for [`random_sift_sim`].
#[derive(Debug, Clone, PartialEq)]
pub struct SiftConfig {
    /// Moduli `s`, each receiving a uniform class `a_s`.
    pub primes: Vec<u64>,
    /// Integers whose survival is counted.
    pub targets: Vec<i64>,
    /// Tuples whose joint survival is estimated.
    pub probes: Vec<Vec<i64>>,
}

impl SiftConfig {
    /// Primes `(log x)^2 < s <= sqrt(x)`, targets the primes in `(x, 2x]`,
    /// probes the first pair and triple of targets.
    pub fn desk(x: u64) -> Self {
        let lx = libm::log(x as f64);
        let lo = libm::floor(lx * lx) as u64;
        let primes = crate::primes::sieve_segment(lo + 1, crate::arith::isqrt(x) + 1);
        let targets: Vec<i64> = crate::primes::sieve_segment(x + 1, 2 * x + 1).into_iter().map(|p| p as i64).collect();
        let probes = [2usize, 3].iter().filter(|&&t| targets.len() >= t).map(|&t| targets[..t].to_vec()).collect();
        Self { primes, targets, probes }
    }

    /// `sigma = prod (1 - 1/s)`.
    pub fn sigma(&self) -> f64 {
        self.primes.iter().map(|&s| 1.0 - 1.0 / s as f64).product()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeEstimate {
    pub tuple: Vec<i64>,
    pub empirical: f64,
    pub std_error: f64,
    /// `prod_s (1 - nu_s / s)` with `nu_s` the residues the tuple occupies.
    pub exact: f64,
    /// `sigma^t`.
    pub sigma_power: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SiftReport {
    pub sigma: f64,
    pub expected_survivors: f64,
    pub mean_survivors: f64,
    pub var_survivors: f64,
    pub probes: Vec<ProbeEstimate>,
}

/// Draws `a_s` uniformly for every modulus and counts targets avoiding all
/// classes.
pub fn random_sift_sim<E: Executor>(cfg: &SiftConfig, trials: u64, seed: u64, exec: &E) -> SiftReport {
    let np = cfg.probes.len();
    let (chunks, size) = chunk_sizes(trials, TRIAL_CHUNK);
    let parts = exec.map_chunks(chunks, |c| {
        let mut rng = stream_rng(seed, c as u64);
        let mut acc = (0.0f64, 0.0f64, vec![0u64; np]);
        for _ in 0..size(c) {
            let a: Vec<u64> = cfg.primes.iter().map(|&s| below(&mut rng, s)).collect();
            let survives = |n: i64| cfg.primes.iter().zip(&a).all(|(&s, &r)| n.rem_euclid(s as i64) as u64 != r);
            let count = cfg.targets.iter().filter(|&&n| survives(n)).count() as f64;
            acc.0 += count;
            acc.1 += count * count;
            for (hit, probe) in acc.2.iter_mut().zip(&cfg.probes) {
                if probe.iter().all(|&n| survives(n)) {
                    *hit += 1;
                }
            }
        }
        acc
    });
    let mut s = 0.0;
    let mut s2 = 0.0;
    let mut hits = vec![0u64; np];
    for (a, b, h) in parts {
        s += a;
        s2 += b;
        hits.iter_mut().zip(h).for_each(|(x, y)| *x += y);
    }
    let t = trials.max(1) as f64;
    let mean = s / t;
    let sigma = cfg.sigma();
    let probes = cfg
        .probes
        .iter()
        .zip(hits)
        .map(|(tuple, h)| {
            let p = h as f64 / t;
            let exact = cfg
                .primes
                .iter()
                .map(|&q| {
                    let nu = tuple.iter().map(|n| n.rem_euclid(q as i64)).collect::<BTreeSet<_>>().len();
                    1.0 - nu as f64 / q as f64
                })
                .product();
            ProbeEstimate {
                tuple: tuple.clone(),
                empirical: p,
                std_error: libm::sqrt(p * (1.0 - p) / t),
                exact,
                sigma_power: libm::pow(sigma, tuple.len() as f64),
            }
        })
        .collect();
    SiftReport {
        sigma,
        expected_survivors: sigma * cfg.targets.len() as f64,
        mean_survivors: mean,
        var_survivors: (s2 / t - mean * mean).max(0.0),
        probes,
    }
}
