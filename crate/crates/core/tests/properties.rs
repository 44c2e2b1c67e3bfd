use gapforge_core::arith::pow_mod;
use gapforge_core::covering::{
    build_erdos_covering, build_randomized_covering, verify_covering, CoveringBuilder, Stage,
};
use gapforge_core::crt::{certify_gap, crt_assemble, lift_certificate, verify_certificate};
use gapforge_core::hypercover::{generate_uniform_graph, greedy_color_matching, pj_recursion, validate_matching};
use gapforge_core::kpower::{kpower_solvable, sifted_set, KPowerContext};
use gapforge_core::primes::{is_prime, max_gap, psi_exact, rankin_upper_bound, sieve_segment};
use gapforge_core::special::{beatty, beatty_index, ps_value, BeattyParams, ExactReal, PsExponent};
use gapforge_core::tuples::{first_primes_tuple, gpy_weight, is_admissible, GpyConfig};
use num_traits::ToPrimitive;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sieve_window_matches_primality(lo in 0u64..2_000_000, len in 0u64..5000) {
        let got = sieve_segment(lo, lo + len);
        let want: Vec<u64> = (lo..lo + len).filter(|&n| is_prime(n)).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn max_gap_is_consecutive(x in 3u64..200_000) {
        let g = max_gap(x).unwrap();
        prop_assert!(is_prime(g.p_lo) && is_prime(g.p_hi) && g.p_hi <= x);
        prop_assert!((g.p_lo + 1..g.p_hi).all(|n| !is_prime(n)));
    }

    #[test]
    fn psi_monotone(x in 1u64..5000, y in 1u64..60) {
        let v = psi_exact(x, y);
        prop_assert!(v <= psi_exact(x + 1, y));
        prop_assert!(v <= psi_exact(x, y + 1));
        prop_assert!(v <= x);
    }

    #[test]
    fn rankin_dominates_psi(x in 1u64..20_000, y in 1u64..50, eta in 1.01f64..6.0) {
        let b = rankin_upper_bound(x as f64, y, eta).unwrap();
        prop_assert!(b.value >= psi_exact(x, y) as f64);
    }

    #[test]
    fn covering_claims_hold(x in 3u64..80, y in 0u64..80) {
        let cs = build_erdos_covering(x, y);
        let naive = (1..=y).all(|u| cs.classes.iter().any(|c| u % c.modulus == c.residue));
        prop_assert_eq!(cs.complete, naive);
        prop_assert_eq!(verify_covering(&cs).is_complete(), naive);
        let moduli: Vec<u64> = cs.classes.iter().map(|c| c.modulus).collect();
        prop_assert_eq!(moduli, sieve_segment(0, x));
    }

    #[test]
    fn stages_shrink_residual(y in 1u64..300, seed in any::<u64>()) {
        let primes = sieve_segment(0, 40);
        let mut b = CoveringBuilder::new(y);
        b.stage_residue_zero(&primes[..1], Stage::ZeroSmall).unwrap();
        let mut rng = gapforge_core::exec::stream_rng(seed, 0);
        b.stage_greedy_random(&primes[1..5], &mut rng).unwrap();
        b.stage_weak(&primes[5..]).unwrap();
        let mut prev: Vec<u64> = (1..=y).collect();
        for t in b.trace() {
            prop_assert!(t.residual_after.iter().all(|u| prev.contains(u)));
            let expect: Vec<u64> = prev.iter().copied()
                .filter(|&u| !b.classes().iter().filter(|c| c.stage == t.stage).any(|c| c.contains(u)))
                .collect();
            prop_assert_eq!(&t.residual_after, &expect);
            prev = t.residual_after.clone();
        }
    }

    #[test]
    fn crt_solution_satisfies_system(rs in proptest::collection::vec(any::<u64>(), 1..8)) {
        let moduli = [3u64, 7, 11, 13, 17, 19, 23, 29];
        let classes: Vec<(u64, u64)> = rs.iter().zip(moduli).map(|(&r, m)| (r % m, m)).collect();
        let (n, m) = crt_assemble(&classes).unwrap();
        prop_assert!(n < m);
        for &(r, q) in &classes {
            prop_assert_eq!((&n % q).to_u64().unwrap(), r);
        }
    }

    #[test]
    fn randomized_certificates_verify(x in 10u64..40, seed in any::<u64>()) {
        let y = x / 2;
        let cs = build_randomized_covering(x, y, seed);
        prop_assume!(cs.complete);
        let cert = lift_certificate(&certify_gap(&cs).unwrap(), 1);
        prop_assert!(verify_certificate(&cert).is_ok());
    }

    #[test]
    fn admissible_subsets(len in 1usize..12, mask in any::<u16>()) {
        let t = first_primes_tuple(len);
        prop_assert!(is_admissible(&t));
        let sub: Vec<i64> = t.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &h)| h).collect();
        prop_assert!(is_admissible(&sub));
    }

    #[test]
    fn gpy_weights_nonnegative(n in 1i64..10_000, r in 2.0f64..60.0, k in 1u32..4) {
        let offsets = first_primes_tuple(k as usize);
        let cfg = GpyConfig { r, k };
        prop_assert!(gpy_weight(n, &offsets, &cfg) >= 0.0);
    }

    #[test]
    fn solvability_matches_scan(pi in 1usize..60, k in 1u64..9, n in -500i64..500) {
        let p = sieve_segment(0, 300)[pi];
        let ctx = KPowerContext::new(p, k).unwrap();
        let v = (1 - n).rem_euclid(p as i64) as u64;
        let naive = (1..p).any(|c| pow_mod(c, k, p) == v);
        prop_assert_eq!(kpower_solvable(n, &ctx), naive);
    }

    #[test]
    fn sift_count_by_inclusion_exclusion(a1 in 0i64..5, a2 in 0i64..7, a3 in 0i64..11, lo in -50i64..50, len in 0i64..300) {
        let classes = [(a1, 5u64), (a2, 7), (a3, 11)];
        let got = sifted_set(lo, lo + len, &classes).len() as i64;
        // Counts in (lo, hi] of n ≡ r mod m.
        let count = |r: i64, m: i64| (lo + len - r).div_euclid(m) - (lo - r).div_euclid(m);
        let mut total = len;
        for mask in 1u32..8 {
            let chosen: Vec<(i64, u64)> = (0..3).filter(|i| mask >> i & 1 == 1).map(|i| classes[i]).collect();
            let sys: Vec<(u64, u64)> = chosen.iter().map(|&(a, m)| (a as u64, m)).collect();
            let (r, m) = crt_assemble(&sys).unwrap();
            let sign = if chosen.len() % 2 == 1 { -1 } else { 1 };
            total += sign * count(r.to_i64().unwrap(), m.to_i64().unwrap());
        }
        prop_assert_eq!(got, total);
    }

    #[test]
    fn survival_recursion_decreases(d in proptest::collection::vec(0.0f64..2.0, 1..6)) {
        let rows: Vec<Vec<f64>> = d.iter().map(|&x| vec![x]).collect();
        let t = pj_recursion(&rows);
        for w in t.p.windows(2) {
            prop_assert!(w[1][0] <= w[0][0] && w[1][0] >= 0.0);
        }
    }

    #[test]
    fn greedy_matchings_are_valid(n in 1u32..30, seed in any::<u64>(), k in prop_oneof![Just(2u32), Just(4)]) {
        let g = generate_uniform_graph(n * k, 2, k, 2 * k, seed).unwrap();
        let m = greedy_color_matching(&g, k);
        prop_assert!(validate_matching(&g, &m));
    }

    #[test]
    fn beatty_differences(b in 1i128..40, c in 2i128..50, d in 1i128..20, n in 1i128..5000) {
        let alpha = ExactReal::new(0, b, c, d);
        prop_assume!(!alpha.is_rational());
        let params = BeattyParams::new(alpha, (0, 1)).unwrap();
        let diff = beatty(n + 1, &params).unwrap() - beatty(n, &params).unwrap();
        let f = alpha.to_f64();
        prop_assert!(diff == f.floor() as i128 || diff == f.ceil() as i128);
        let v = beatty(n, &params).unwrap();
        let idx = beatty_index(v, &params).unwrap().unwrap();
        prop_assert_eq!(beatty(idx, &params).unwrap(), v);
    }

    #[test]
    fn ps_counting(limit in 1u64..20_000, p in 20u32..40) {
        let c = PsExponent::new(p, 20).unwrap();
        let count = (1u64..).take_while(|&l| ps_value(l, c).to_u64().unwrap() <= limit).count() as u64;
        let root = (limit as f64).powf(1.0 / c.to_f64()).floor() as u64;
        prop_assert!(count == root || count == root + 1 || count + 1 == root);
    }
}
