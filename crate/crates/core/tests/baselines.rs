mod common;

use std::collections::BTreeSet;

use atasses::atasses::{Atasses, AtassesConfig};
use atasses::baselines::{binomial, factorial, Replicated, Type1, Type2};
use atasses::ring::prime;
use atasses::rng::derive_rng;
use atasses::shamir;
use atasses::sim::{DropoutSchedule, Node};
use atasses::{ApproxSs, Error, RecOptions, Ring, RingPoly};
use common::*;
use num_bigint::BigUint;

fn excluded(n: usize, keep: &BTreeSet<usize>) -> DropoutSchedule {
    DropoutSchedule::Uninterested(complement(n, keep))
}

#[test]
fn replicated_piece_layout() {
    let ring = Ring::new(4, 97u64).unwrap();
    let s = Replicated::new(3, 2, ring.clone(), 1).unwrap();
    let m = random_message(&ring, 1, 1);
    let shares = s.share(&m, &mut derive_rng(1, &[])).unwrap();
    assert_eq!(s.subsets().len(), 3);
    assert!(shares.iter().all(|sh| sh.pieces.len() == 2));
    // Full threshold: plain additive sharing, one piece each.
    let s2 = Replicated::new(2, 2, ring.clone(), 1).unwrap();
    let shares2 = s2.share(&m, &mut derive_rng(1, &[])).unwrap();
    assert!(shares2.iter().all(|sh| sh.pieces.len() == 1));
    assert_eq!(shares2[0].pieces[0].1[0].add(&shares2[1].pieces[0].1[0]).unwrap(), m[0]);
}

#[test]
fn replicated_cover_is_exact_for_every_t_set() {
    let ring = Ring::new(2, 97u64).unwrap();
    for n in 2..=5 {
        for t in 1..=n {
            let s = Replicated::new(n, t, ring.clone(), 0).unwrap();
            let m = random_message(&ring, 1, (n * 10 + t) as u64);
            let shares = s.share(&m, &mut derive_rng(n as u64, &[t as u64])).unwrap();
            assert!(shares.iter().all(|sh| sh.pieces.len() as u128 == binomial(n - 1, t - 1)));
            for set in all_subsets(n).into_iter().filter(|s| s.len() >= t) {
                let picked: Vec<_> = set.iter().map(|&i| &shares[i - 1]).collect();
                assert_eq!(s.exact_rec(&picked).unwrap(), m, "n={n} t={t} set={set:?}");
                // Every subset's piece is held by someone in the set.
                for &mask in s.subsets() {
                    assert!(set.iter().any(|&i| mask & (1 << (i - 1)) == 0));
                }
            }
        }
    }
}

#[test]
fn replicated_bound_and_single_round() {
    let ring = Ring::new(4, 65537u64).unwrap();
    let b_sm = 100;
    let s = Replicated::new(3, 2, ring.clone(), b_sm).unwrap();
    for seed in 0..1000 {
        let m = random_message(&ring, 1, seed);
        let shares = s.share(&m, &mut derive_rng(seed, &[1])).unwrap();
        let report = s.approx_rec(&shares, &mut DropoutSchedule::None, seed, &RecOptions::default()).unwrap();
        let out = report.outcome.unwrap();
        assert!(max_norm(&diff(&out, &m)) as u128 <= 3 * b_sm as u128);
        // Replay: each subset's noise from its lowest-indexed holder in the used set.
        let used = &report.used[0];
        let mut expect = m.clone();
        for (idx, &mask) in s.subsets().iter().enumerate() {
            let holder = *used.iter().filter(|&&p| mask & (1 << (p - 1)) == 0).min().unwrap();
            let pos = shares[holder - 1].pieces.iter().position(|(mk, _)| *mk == mask).unwrap();
            expect[0].add_assign(&report.noise[&holder][pos]).unwrap();
            let _ = idx;
        }
        assert_eq!(out, expect);
        if seed == 0 {
            assert_eq!(report.transcript.rounds(), 1);
            assert!(report.transcript.events.iter().all(|e| e.receiver == Node::Aggregator));
            assert_eq!(report.transcript.events.len(), 3);
        }
    }
}

#[test]
fn replicated_bytes_follow_piece_count() {
    let ring = Ring::new(8, 65537u64).unwrap();
    let poly = 4 + 8 * 3;
    for (n, t) in [(4, 2), (5, 3), (6, 3)] {
        let s = Replicated::new(n, t, ring.clone(), 1).unwrap();
        let m = random_message(&ring, 2, 3);
        let shares = s.share(&m, &mut derive_rng(3, &[])).unwrap();
        let report = s.approx_rec(&shares, &mut DropoutSchedule::None, 3, &RecOptions::default()).unwrap();
        let pieces = binomial(n - 1, t - 1) as usize;
        let expect = 8 + pieces * (4 + 4 + 2 * poly);
        assert_eq!(report.transcript.measure().max_to_agg_sent(), expect);
    }
}

#[test]
fn replicated_capacity() {
    let ring = Ring::new(4096, 65537u64).unwrap();
    assert!(matches!(Replicated::new(21, 10, ring.clone(), 1), Err(Error::Capacity(_))));
    let s = Replicated::new(20, 10, ring.clone(), 1).unwrap();
    let m = random_message(&ring, 1, 0);
    assert!(matches!(s.share(&m, &mut derive_rng(0, &[])), Err(Error::Capacity(_))));
}

#[test]
fn type1_modulus_search() {
    let floor = BigUint::from(2u64 * 5 * 120 * 120 * 120 * 16);
    let p1 = Type1::smallest_modulus(5, 16);
    assert!(p1 > floor);
    let mut c = floor + 1u32;
    while !prime::is_prime(&c) {
        c += 1u32;
    }
    assert_eq!(p1, c);
    // Independent trial-division check of primality.
    let v: u64 = (&p1).try_into().unwrap();
    assert!((2..).take_while(|d| d * d <= v).all(|d| v % d != 0));
    assert_eq!(factorial(5), BigUint::from(120u32));
}

#[test]
fn type1_bound_and_replay() {
    let b_sm = 16;
    let s = Type1::new(3, 2, 4, b_sm).unwrap();
    let ring = s.message_ring().clone();
    assert_eq!(s.error_bound(), BigUint::from(648u32 * 16));
    for seed in 0..1000 {
        let m = random_message(&ring, 1, seed);
        let shares = s.share(&m, &mut derive_rng(seed, &[1])).unwrap();
        let report = s.approx_rec(&shares, &mut DropoutSchedule::None, seed, &RecOptions::default()).unwrap();
        let out = report.outcome.unwrap();
        let d = diff(&out, &m);
        assert!(d.iter().all(|p| p.inf_norm() <= s.error_bound()));
        let used: Vec<u64> = report.used[0].iter().map(|&i| i as u64).collect();
        let lag = shamir::lagrange_coeffs(&used, ring.modulus()).unwrap();
        let mut noise = ring.zero();
        for (p, l) in lag.iter() {
            noise.add_assign(&report.noise[&(p as usize)][0].scalar_mul(l)).unwrap();
        }
        assert_eq!(d[0], noise);
    }
}

#[test]
fn type2_replay_on_every_subset() {
    let ring = Ring::new(4, 65537u64).unwrap();
    let b_sm = 50;
    let s = Type2::new(4, 2, ring.clone(), b_sm).unwrap();
    let m = random_message(&ring, 2, 5);
    let shares = s.share(&m, &mut derive_rng(5, &[])).unwrap();
    for set in all_subsets(4).into_iter().filter(|x| x.len() >= 2) {
        let report = s.approx_rec(&shares, &mut excluded(4, &set), 5, &RecOptions::default()).unwrap();
        let out = report.outcome.unwrap();
        let noise = sum_polys(&ring, 2, report.noise.values().cloned());
        assert_eq!(report.noise.keys().copied().collect::<BTreeSet<_>>(), set);
        assert_eq!(diff(&out, &m), noise);
        assert!(max_norm(&noise) <= 4 * b_sm);
    }
}

#[test]
fn type2_bound_many_runs_and_bytes() {
    let ring = Ring::new(8, 65537u64).unwrap();
    let s = Type2::new(4, 3, ring.clone(), 1000).unwrap();
    for seed in 0..1000 {
        let m = random_message(&ring, 1, seed);
        let shares = s.share(&m, &mut derive_rng(seed, &[])).unwrap();
        let report = s.approx_rec(&shares, &mut DropoutSchedule::None, seed, &RecOptions::default()).unwrap();
        assert!(max_norm(&diff(&report.outcome.unwrap(), &m)) <= 4000);
        if seed == 0 {
            // Each party shares K = 3·8 coefficients of 3 bytes with the N - 1 others.
            let m3 = random_message(&ring, 3, 0);
            let sh3 = s.share(&m3, &mut derive_rng(0, &[])).unwrap();
            let r3 = s.approx_rec(&sh3, &mut DropoutSchedule::None, 0, &RecOptions::default()).unwrap();
            assert_eq!(r3.transcript.measure().max_p2p_sent(), 3 * (4 + 4 + 3 * (4 + 8 * 3)));
        }
    }
}

#[test]
fn type2_empty_message() {
    let ring = Ring::new(4, 65537u64).unwrap();
    let s = Type2::new(3, 2, ring, 10).unwrap();
    let shares: Vec<_> = (1..=3).map(|p| shamir::ShamirShare { point: p, payload: Vec::new() }).collect();
    let report = s.approx_rec(&shares, &mut DropoutSchedule::None, 0, &RecOptions::default()).unwrap();
    assert_eq!(report.outcome.unwrap(), Vec::<RingPoly>::new());
}

#[test]
fn all_schemes_agree_without_noise() {
    let p = 65537u64;
    let ring = Ring::new(4, p).unwrap();
    let m = random_message(&ring, 2, 77);
    let schedule = || DropoutSchedule::Uninterested(BTreeSet::from([2]));
    let opts = RecOptions::default();

    let at = Atasses::new(AtassesConfig::with_search(4, 3, ring.clone(), 4, 2, 0, 1).unwrap());
    let sh = at.share(&m, &mut derive_rng(1, &[])).unwrap();
    assert_eq!(at.approx_rec(&sh, &mut schedule(), 1, &opts).unwrap().outcome.unwrap(), m);

    let t2 = Type2::new(4, 3, ring.clone(), 0).unwrap();
    assert_eq!(t2.approx_rec(&sh, &mut schedule(), 1, &opts).unwrap().outcome.unwrap(), m);

    let rep = Replicated::new(4, 3, ring.clone(), 0).unwrap();
    let rsh = rep.share(&m, &mut derive_rng(1, &[])).unwrap();
    assert_eq!(rep.approx_rec(&rsh, &mut schedule(), 1, &opts).unwrap().outcome.unwrap(), m);

    let t1 = Type1::new(4, 3, 4, 0).unwrap();
    let big_ring = t1.message_ring().clone();
    let lifted: Vec<RingPoly> = m.iter().map(|x| x.lift_into(&big_ring).unwrap()).collect();
    let tsh = t1.share(&lifted, &mut derive_rng(1, &[])).unwrap();
    assert_eq!(t1.approx_rec(&tsh, &mut schedule(), 1, &opts).unwrap().outcome.unwrap(), lifted);
}
