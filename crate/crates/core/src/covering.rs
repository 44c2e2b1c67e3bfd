//! Residue-class coverings of `(0, y]` with one class per prime modulus.
//!
//! A covering is built in stages. Zero stages give each listed prime the
//! class `0 mod p`. The greedy stage gives each prime the class hitting the
//! most surviving integers. The weak stage spends one prime per survivor.
//! Every prime below `x` ends up with exactly one class.

use crate::exec::stream_rng;
use crate::primes::sieve_segment;
use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use rand_core::RngCore;

/// Stage that produced a class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    ZeroSmall = 1,
    ZeroMedium = 2,
    Greedy = 3,
    Weak = 4,
}

impl Stage {
    pub fn label(self) -> u8 {
        self as u8
    }

    pub fn from_label(v: u8) -> Option<Self> {
        match v {
            1 => Some(Stage::ZeroSmall),
            2 => Some(Stage::ZeroMedium),
            3 => Some(Stage::Greedy),
            4 => Some(Stage::Weak),
            _ => None,
        }
    }
}

/// `n ≡ residue (mod modulus)`, with `residue < modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CongruenceClass {
    pub modulus: u64,
    pub residue: u64,
    pub stage: Stage,
}

impl CongruenceClass {
    pub fn contains(&self, n: u64) -> bool {
        n % self.modulus == self.residue
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoveringError {
    #[error("modulus {0} is assigned more than one class")]
    DuplicateModulus(u64),
    #[error("modulus {0} is not a prime")]
    NotPrime(u64),
    #[error("residue {residue} is not reduced modulo {modulus}")]
    Unreduced { modulus: u64, residue: u64 },
}

/// A set of classes meant to cover `(0, y]`, using primes below `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringSystem {
    pub x: u64,
    pub y: u64,
    /// Sorted by modulus.
    pub classes: Vec<CongruenceClass>,
    pub complete: bool,
}

impl CoveringSystem {
    /// Assembles a system from explicit classes, checking distinct reduced
    /// moduli and recomputing completeness.
    pub fn from_classes(x: u64, y: u64, mut classes: Vec<CongruenceClass>) -> Result<Self, CoveringError> {
        classes.sort_by_key(|c| c.modulus);
        for w in classes.windows(2) {
            if w[0].modulus == w[1].modulus {
                return Err(CoveringError::DuplicateModulus(w[0].modulus));
            }
        }
        for c in &classes {
            if c.residue >= c.modulus {
                return Err(CoveringError::Unreduced { modulus: c.modulus, residue: c.residue });
            }
            if !crate::primes::is_prime(c.modulus) {
                return Err(CoveringError::NotPrime(c.modulus));
            }
        }
        let mut cs = Self { x, y, classes, complete: false };
        cs.complete = verify_covering(&cs).is_complete();
        Ok(cs)
    }

    /// Smallest modulus whose class contains `u`.
    pub fn witness(&self, u: u64) -> Option<u64> {
        self.classes.iter().find(|c| c.contains(u)).map(|c| c.modulus)
    }
}

/// Outcome of [`verify_covering`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Coverage {
    pub first_uncovered: Option<u64>,
}

impl Coverage {
    pub fn is_complete(&self) -> bool {
        self.first_uncovered.is_none()
    }
}

/// Checks that every `u` in `(0, y]` lies in some class.
pub fn verify_covering(cs: &CoveringSystem) -> Coverage {
    let y = cs.y as usize;
    let mut hit = vec![false; y + 1];
    for c in &cs.classes {
        let step = c.modulus as usize;
        let mut u = if c.residue == 0 { step } else { c.residue as usize };
        while u <= y {
            hit[u] = true;
            u += step;
        }
    }
    Coverage { first_uncovered: (1..=y).find(|&u| !hit[u]).map(|u| u as u64) }
}

/// For each class, how many members of `residual` it contains.
pub fn hitting_numbers(classes: &[CongruenceClass], residual: &[u64]) -> Vec<(u64, usize)> {
    classes.iter().map(|c| (c.modulus, residual.iter().filter(|&&u| c.contains(u)).count())).collect()
}

/// Survivors after a stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageTrace {
    pub stage: Stage,
    pub residual_after: Vec<u64>,
}

/// Primes assigned to each stage.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StagePlan {
    pub zero_small: Vec<u64>,
    pub zero_medium: Vec<u64>,
    pub greedy: Vec<u64>,
    pub weak: Vec<u64>,
}

impl StagePlan {
    /// Default plan for the primes below `x`:
    /// `p <= x^(1/4)` and `sqrt(x) < p <= x/2` take class zero, primes in
    /// `(x^(1/4), sqrt(x)]` are greedy and primes in `(x/2, x)` are weak.
    pub fn erdos(x: u64) -> Self {
        Self::erdos_truncated(x, x)
    }

    /// The default plan for `x_eff`, with the primes in `[x_eff, x)`
    /// appended to the weak stage.
    pub fn erdos_truncated(x_eff: u64, x: u64) -> Self {
        let xf = x_eff as f64;
        let quarter = libm::pow(xf, 0.25);
        let root = libm::sqrt(xf);
        let half = xf / 2.0;
        let mut plan = StagePlan::default();
        for p in sieve_segment(0, x) {
            let pf = p as f64;
            let bucket = if p >= x_eff || pf > half {
                &mut plan.weak
            } else if pf <= quarter {
                &mut plan.zero_small
            } else if pf <= root {
                &mut plan.greedy
            } else {
                &mut plan.zero_medium
            };
            bucket.push(p);
        }
        plan
    }
}

/// Incremental covering construction over a shrinking residual set.
#[derive(Debug, Clone)]
pub struct CoveringBuilder {
    y: u64,
    residual: Vec<u64>,
    classes: Vec<CongruenceClass>,
    used: BTreeSet<u64>,
    trace: Vec<StageTrace>,
}

impl CoveringBuilder {
    pub fn new(y: u64) -> Self {
        Self { y, residual: (1..=y).collect(), classes: Vec::new(), used: BTreeSet::new(), trace: Vec::new() }
    }

    pub fn residual(&self) -> &[u64] {
        &self.residual
    }

    pub fn classes(&self) -> &[CongruenceClass] {
        &self.classes
    }

    pub fn trace(&self) -> &[StageTrace] {
        &self.trace
    }

    fn claim(&mut self, p: u64) -> Result<(), CoveringError> {
        if !self.used.insert(p) {
            return Err(CoveringError::DuplicateModulus(p));
        }
        Ok(())
    }

    fn push(&mut self, modulus: u64, residue: u64, stage: Stage) {
        self.residual.retain(|&u| u % modulus != residue);
        self.classes.push(CongruenceClass { modulus, residue, stage });
    }

    fn close(&mut self, stage: Stage) {
        self.trace.push(StageTrace { stage, residual_after: self.residual.clone() });
    }

    /// Assigns `0 mod p` to every prime.
    pub fn stage_residue_zero(&mut self, primes: &[u64], stage: Stage) -> Result<(), CoveringError> {
        for &p in primes {
            self.claim(p)?;
            self.push(p, 0, stage);
        }
        self.close(stage);
        Ok(())
    }

    /// Primes in the given order each take the residue class containing the
    /// most survivors; ties go to the smallest residue.
    pub fn stage_greedy(&mut self, primes: &[u64]) -> Result<(), CoveringError> {
        self.greedy_inner(primes, &mut |_| 0)
    }

    /// [`stage_greedy`](Self::stage_greedy) with ties broken uniformly at random.
    pub fn stage_greedy_random<R: RngCore>(&mut self, primes: &[u64], rng: &mut R) -> Result<(), CoveringError> {
        self.greedy_inner(primes, &mut |n| crate::exec::below(rng, n as u64) as usize)
    }

    fn greedy_inner(&mut self, primes: &[u64], pick: &mut dyn FnMut(usize) -> usize) -> Result<(), CoveringError> {
        for &p in primes {
            self.claim(p)?;
            let mut counts = vec![0usize; p as usize];
            for &u in &self.residual {
                counts[(u % p) as usize] += 1;
            }
            let best = counts.iter().copied().max().unwrap_or(0);
            let ties: Vec<usize> = (0..counts.len()).filter(|&h| counts[h] == best).collect();
            let h = ties[pick(ties.len())];
            self.push(p, h as u64, Stage::Greedy);
        }
        self.close(Stage::Greedy);
        Ok(())
    }

    /// Primes in ascending order each take the class of the smallest
    /// survivor; primes left over once nothing survives take class zero.
    pub fn stage_weak(&mut self, primes: &[u64]) -> Result<(), CoveringError> {
        let mut sorted = primes.to_vec();
        sorted.sort_unstable();
        for p in sorted {
            self.claim(p)?;
            let h = self.residual.first().map_or(0, |&u| u % p);
            self.push(p, h, Stage::Weak);
        }
        self.close(Stage::Weak);
        Ok(())
    }

    pub fn finish(self, x: u64) -> (CoveringSystem, Vec<StageTrace>) {
        let mut classes = self.classes;
        classes.sort_by_key(|c| c.modulus);
        let complete = self.residual.is_empty();
        (CoveringSystem { x, y: self.y, classes, complete }, self.trace)
    }
}

/// Runs `plan` in stage order: zero-small, zero-medium, greedy, weak.
pub fn run_plan(x: u64, y: u64, plan: &StagePlan) -> Result<(CoveringSystem, Vec<StageTrace>), CoveringError> {
    let mut b = CoveringBuilder::new(y);
    b.stage_residue_zero(&plan.zero_small, Stage::ZeroSmall)?;
    b.stage_residue_zero(&plan.zero_medium, Stage::ZeroMedium)?;
    b.stage_greedy(&plan.greedy)?;
    b.stage_weak(&plan.weak)?;
    Ok(b.finish(x))
}

/// Builds a covering of `(0, y]` with one class per prime below `x`.
///
/// The default plan for `x` is tried first. If it leaves survivors, the
/// default plans for each smaller prime threshold are tried, largest first,
/// with the surplus primes joining the weak stage. Success for `x` therefore
/// implies success for every larger `x`. The returned system has
/// `complete = false` if no plan succeeds; it is then the attempt from the
/// full plan.
pub fn build_erdos_covering(x: u64, y: u64) -> CoveringSystem {
    build_erdos_covering_traced(x, y).0
}

pub fn build_erdos_covering_traced(x: u64, y: u64) -> (CoveringSystem, Vec<StageTrace>) {
    let first = run_plan(x, y, &StagePlan::erdos(x)).expect("default plans use each prime once");
    if first.0.complete {
        return first;
    }
    let primes = sieve_segment(0, x);
    for &q in primes.iter().rev() {
        let attempt = run_plan(x, y, &StagePlan::erdos_truncated(q + 1, x)).expect("default plans use each prime once");
        if attempt.0.complete {
            return attempt;
        }
    }
    first
}

/// A covering from the default plan with greedy ties broken at random.
/// Successive seeds give different (but each valid) systems.
pub fn build_randomized_covering(x: u64, y: u64, seed: u64) -> CoveringSystem {
    let mut rng = stream_rng(seed, 0);
    let plan = StagePlan::erdos(x);
    let mut b = CoveringBuilder::new(y);
    let run = (|| {
        b.stage_residue_zero(&plan.zero_small, Stage::ZeroSmall)?;
        b.stage_residue_zero(&plan.zero_medium, Stage::ZeroMedium)?;
        b.stage_greedy_random(&plan.greedy, &mut rng)?;
        b.stage_weak(&plan.weak)
    })();
    run.expect("default plans use each prime once");
    b.finish(x).0
}
