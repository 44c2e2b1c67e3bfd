//! Chinese-remainder assembly of a covering into an explicit run of
//! composites, with checkable certificates.

use crate::arith::{gcd, inv_mod};
use crate::covering::{verify_covering, CoveringSystem};
use crate::primes::{is_prime, GapRecord};
use alloc::vec::Vec;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// Largest `m0 + y` accepted by [`brute_gap_check`]. Primality is exact on
/// `u64`, and the headroom keeps the forward search from overflowing.
pub const BRUTE_LIMIT: u64 = 1 << 63;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CrtError {
    #[error("moduli {0} and {1} are not coprime")]
    NotCoprime(u64, u64),
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("covering of (0, {y}] misses {first_uncovered}")]
    Incomplete { y: u64, first_uncovered: u64 },
    #[error("the assembled origin is 0; lift the certificate")]
    ZeroOrigin,
    #[error("m0 + y = {0} exceeds the brute-force limit")]
    TooLarge(BigUint),
    #[error("no prime at or below m0")]
    NoPrimeBelow,
    #[error("consecutive primes {p_lo} and {p_hi} are closer than y = {y}")]
    GapTooSmall { p_lo: u64, p_hi: u64, y: u64 },
}

/// Solves `n ≡ r_i (mod m_i)` by Garner's method, taking moduli in ascending
/// order. Returns `(n, M)` with `0 <= n < M = prod m_i`.
pub fn crt_assemble(classes: &[(u64, u64)]) -> Result<(BigUint, BigUint), CrtError> {
    let mut sorted: Vec<(u64, u64)> = classes.iter().map(|&(r, m)| (r, m)).collect();
    if sorted.iter().any(|&(_, m)| m == 0) {
        return Err(CrtError::ZeroModulus);
    }
    sorted.sort_by_key(|&(_, m)| m);
    for i in 0..sorted.len() {
        for j in i + 1..sorted.len() {
            if gcd(sorted[i].1, sorted[j].1) != 1 {
                return Err(CrtError::NotCoprime(sorted[i].1, sorted[j].1));
            }
        }
    }
    let mut n = BigUint::zero();
    let mut modulus = BigUint::one();
    for (r, m) in sorted {
        let r = r % m;
        let cur = (&n % m).to_u64().expect("reduced below a u64 modulus");
        let mm = (&modulus % m).to_u64().expect("reduced below a u64 modulus");
        let inv = inv_mod(mm, m).expect("pairwise coprime");
        let t = ((r + m - cur) % m) as u128 * inv as u128 % m as u128;
        n += &modulus * BigUint::from(t as u64);
        modulus *= m;
    }
    Ok((n, modulus))
}

/// Explicit origin `m0` such that `m0 + u` has the listed proper divisor for
/// every `u` in `(0, y]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapCertificate {
    pub x: u64,
    pub y: u64,
    pub modulus: BigUint,
    pub m0: BigUint,
    /// `(u, p)` for `u = 1..=y`, with `p | m0 + u`.
    pub witnesses: Vec<(u64, u64)>,
}

/// First failed check of a certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertFailure {
    pub offset: u64,
    pub reason: FailureReason,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureReason {
    MissingWitness,
    TrivialWitness,
    /// The witness equals `m0 + u`, so it proves nothing.
    WitnessIsValue,
    NotDivisible,
}

impl GapCertificate {
    /// Offsets where the witness equals `m0 + u`.
    pub fn degenerate_offsets(&self) -> Vec<u64> {
        self.witnesses.iter().filter(|&&(u, p)| &self.m0 + u == BigUint::from(p)).map(|&(u, _)| u).collect()
    }
}

/// Turns a complete covering into a certificate: `m0 ≡ -h_p (mod p)` for each
/// class `h_p mod p`, and the witness of `u` is the smallest class modulus
/// containing it.
pub fn certify_gap(cs: &CoveringSystem) -> Result<GapCertificate, CrtError> {
    if let Some(u) = verify_covering(cs).first_uncovered {
        return Err(CrtError::Incomplete { y: cs.y, first_uncovered: u });
    }
    let system: Vec<(u64, u64)> = cs.classes.iter().map(|c| ((c.modulus - c.residue) % c.modulus, c.modulus)).collect();
    let (m0, modulus) = crt_assemble(&system)?;
    if m0.is_zero() {
        return Err(CrtError::ZeroOrigin);
    }
    let witnesses = (1..=cs.y).map(|u| (u, cs.witness(u).expect("covering verified"))).collect();
    Ok(GapCertificate { x: cs.x, y: cs.y, modulus, m0, witnesses })
}

/// Shifts the origin by `t` periods; `t >= 1` clears every degenerate
/// witness because `m0 + u` then exceeds the modulus.
pub fn lift_certificate(cert: &GapCertificate, t: u64) -> GapCertificate {
    GapCertificate { m0: &cert.m0 + &cert.modulus * t, ..cert.clone() }
}

/// Checks `1 < p < m0 + u` and `p | m0 + u` for every offset `u` in `(0, y]`.
pub fn verify_certificate(cert: &GapCertificate) -> Result<(), CertFailure> {
    let mut by_offset: Vec<Option<u64>> = alloc::vec![None; cert.y as usize + 1];
    for &(u, p) in &cert.witnesses {
        if (1..=cert.y).contains(&u) && by_offset[u as usize].is_none() {
            by_offset[u as usize] = Some(p);
        }
    }
    for u in 1..=cert.y {
        let fail = |reason| Err(CertFailure { offset: u, reason });
        let Some(p) = by_offset[u as usize] else { return fail(FailureReason::MissingWitness) };
        if p <= 1 {
            return fail(FailureReason::TrivialWitness);
        }
        let value = &cert.m0 + u;
        if BigUint::from(p) >= value {
            return fail(FailureReason::WitnessIsValue);
        }
        if !value.is_multiple_of(&BigUint::from(p)) {
            return fail(FailureReason::NotDivisible);
        }
    }
    Ok(())
}

/// Finds the primes around `m0` directly, testing every integer with the
/// deterministic primality test: the largest prime `<= m0` and the next prime
/// after it, which must be at least `y` apart.
pub fn brute_gap_check(cert: &GapCertificate) -> Result<GapRecord, CrtError> {
    let end = &cert.m0 + cert.y;
    let Some(end) = end.to_u64().filter(|&e| e <= BRUTE_LIMIT) else {
        return Err(CrtError::TooLarge(&cert.m0 + cert.y));
    };
    let m0 = end - cert.y;
    let p_lo = (2..=m0).rev().find(|&n| is_prime(n)).ok_or(CrtError::NoPrimeBelow)?;
    let p_hi = (p_lo + 1..).find(|&n| is_prime(n)).expect("primes are unbounded");
    if p_hi - p_lo < cert.y {
        return Err(CrtError::GapTooSmall { p_lo, p_hi, y: cert.y });
    }
    Ok(GapRecord::new(p_lo, p_hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::{build_erdos_covering, CongruenceClass, Stage};

    fn toy() -> CoveringSystem {
        let c = |modulus, residue| CongruenceClass { modulus, residue, stage: Stage::Greedy };
        CoveringSystem::from_classes(6, 4, alloc::vec![c(2, 0), c(3, 1), c(5, 3)]).unwrap()
    }

    #[test]
    fn garner_small() {
        let (n, m) = crt_assemble(&[(2, 3), (3, 5), (2, 7)]).unwrap();
        assert_eq!((n, m), (BigUint::from(23u32), BigUint::from(105u32)));
        assert_eq!(crt_assemble(&[(1, 4), (3, 6)]), Err(CrtError::NotCoprime(4, 6)));
        assert_eq!(crt_assemble(&[]).unwrap(), (BigUint::zero(), BigUint::one()));
    }

    #[test]
    fn toy_certificate_degenerates_then_lifts() {
        let cert = certify_gap(&toy()).unwrap();
        assert_eq!(cert.m0, BigUint::from(2u32));
        assert_eq!(cert.witnesses, alloc::vec![(1, 3), (2, 2), (3, 5), (4, 2)]);
        assert_eq!(cert.degenerate_offsets(), alloc::vec![1, 3]);
        let fail = verify_certificate(&cert).unwrap_err();
        assert_eq!((fail.offset, fail.reason), (1, FailureReason::WitnessIsValue));
        let lifted = lift_certificate(&cert, 1);
        assert_eq!(lifted.m0, BigUint::from(32u32));
        assert!(verify_certificate(&lifted).is_ok());
        let g = brute_gap_check(&lifted).unwrap();
        assert_eq!((g.p_lo, g.p_hi), (31, 37));
    }

    #[test]
    fn tampering_is_reported() {
        let mut cert = lift_certificate(&certify_gap(&toy()).unwrap(), 1);
        cert.witnesses[2].1 = 11;
        let fail = verify_certificate(&cert).unwrap_err();
        assert_eq!((fail.offset, fail.reason), (3, FailureReason::NotDivisible));
        cert.witnesses.pop();
        cert.witnesses[2].1 = 5;
        assert_eq!(verify_certificate(&cert).unwrap_err().reason, FailureReason::MissingWitness);
    }

    #[test]
    fn empty_run_is_vacuous() {
        let cert = GapCertificate {
            x: 5,
            y: 0,
            modulus: BigUint::from(6u32),
            m0: BigUint::from(5u32),
            witnesses: alloc::vec![],
        };
        assert!(verify_certificate(&cert).is_ok());
        let g = brute_gap_check(&cert).unwrap();
        assert_eq!((g.p_lo, g.p_hi), (5, 7));
    }

    #[test]
    fn built_coverings_certify() {
        for (x, y) in [(20, 20), (30, 30), (50, 50)] {
            let cs = build_erdos_covering(x, y);
            assert!(cs.complete);
            let cert = lift_certificate(&certify_gap(&cs).unwrap(), 1);
            verify_certificate(&cert).unwrap();
            if (&cert.m0 + y).to_u64().is_some_and(|v| v <= BRUTE_LIMIT) {
                assert!(brute_gap_check(&cert).unwrap().gap >= y);
            }
        }
        assert!(matches!(certify_gap(&build_erdos_covering(12, 14)), Err(CrtError::Incomplete { .. })));
    }
}
