mod common;

use std::collections::BTreeSet;

use atasses::atasses::{Atasses, AtassesConfig, AtassesSession, KIND_CTN, KIND_CTS, KIND_EK_SHARE};
use atasses::cipher::CipherParams;
use atasses::rng::derive_rng;
use atasses::shamir;
use atasses::sim::{run_session, DropoutSchedule, Node, SimConfig, Topology};
use atasses::{ApproxSs, Error, RecOptions, Ring};
use common::*;
use num_bigint::BigUint;

fn toy(n: usize, t: usize, b_sm: u64) -> Atasses {
    let ring = Ring::new(4, 257u64).unwrap();
    Atasses::new(AtassesConfig::with_search(n, t, ring, 4, 2, b_sm, 7).unwrap())
}

#[test]
fn toy_run_matches_logged_noise() {
    let scheme = toy(3, 2, 8);
    let ring = scheme.message_ring().clone();
    for seed in 0..50 {
        let m = random_message(&ring, 3, seed);
        let shares = scheme.share(&m, &mut derive_rng(seed, &[1])).unwrap();
        let report = scheme
            .approx_rec(&shares, &mut DropoutSchedule::None, seed, &RecOptions::default())
            .unwrap();
        let out = report.outcome.unwrap();
        let used = &report.used[0];
        assert_eq!(used.len(), 2);
        let expected = sum_polys(&ring, 3, std::iter::once(m.clone()).chain(used.iter().map(|i| report.noise[i].clone())));
        assert_eq!(out, expected, "seed {seed}");
        assert!(max_norm(&diff(&out, &m)) <= 16);
    }
}

#[test]
fn zero_noise_is_exact() {
    let scheme = toy(4, 3, 0);
    let ring = scheme.message_ring().clone();
    let m = random_message(&ring, 2, 3);
    let shares = scheme.share(&m, &mut derive_rng(3, &[1])).unwrap();
    let report = scheme.approx_rec(&shares, &mut DropoutSchedule::None, 3, &RecOptions::default()).unwrap();
    assert_eq!(report.outcome.unwrap(), m);
}

#[test]
fn decoupled_round_sets() {
    let scheme = toy(5, 3, 8);
    let ring = scheme.message_ring().clone();
    let m = random_message(&ring, 1, 11);
    let shares = scheme.share(&m, &mut derive_rng(11, &[1])).unwrap();
    let plan = vec![BTreeSet::from([4, 5]), BTreeSet::from([1, 2])];
    let report = scheme
        .approx_rec(&shares, &mut DropoutSchedule::per_round(plan), 11, &RecOptions::default())
        .unwrap();
    assert_eq!(report.used, vec![vec![1, 2, 3], vec![3, 4, 5]]);
    let out = report.outcome.unwrap();
    let expected = sum_polys(&ring, 1, std::iter::once(m.clone()).chain([1, 2, 3].iter().map(|i| report.noise[i].clone())));
    assert_eq!(out, expected);
}

#[test]
fn too_few_in_round_two_aborts() {
    let scheme = toy(5, 3, 8);
    let ring = scheme.message_ring().clone();
    let m = random_message(&ring, 1, 12);
    let shares = scheme.share(&m, &mut derive_rng(12, &[1])).unwrap();
    let plan = vec![BTreeSet::new(), BTreeSet::from([1, 2, 3])];
    let report = scheme
        .approx_rec(&shares, &mut DropoutSchedule::per_round(plan), 12, &RecOptions::default())
        .unwrap();
    assert_eq!(report.outcome.unwrap_err(), Error::InsufficientParticipants { round: 2, needed: 3, got: 2 });
}

#[test]
fn direct_topology_with_all_arrivals() {
    let scheme = toy(5, 3, 8);
    let ring = scheme.message_ring().clone();
    let m = random_message(&ring, 2, 13);
    let shares = scheme.share(&m, &mut derive_rng(13, &[1])).unwrap();
    for topology in [Topology::Direct, Topology::Relay] {
        let opts = RecOptions { topology, first_t_only: false, retain_payloads: false };
        let plan = vec![BTreeSet::from([2]), BTreeSet::new()];
        let report = scheme.approx_rec(&shares, &mut DropoutSchedule::per_round(plan), 13, &opts).unwrap();
        assert_eq!(report.used[0], vec![1, 3, 4, 5]);
        let out = report.outcome.unwrap();
        let expected =
            sum_polys(&ring, 2, std::iter::once(m.clone()).chain([1, 3, 4, 5].iter().map(|i| report.noise[i].clone())));
        assert_eq!(out, expected);
    }
}

#[test]
fn lagrange_example_for_one_and_three() {
    let q = BigUint::from(257u32);
    let lag = shamir::lagrange_coeffs(&[1, 3], &q).unwrap();
    let l1 = BigUint::from(3u32) * BigUint::from(2u32).modinv(&q).unwrap() % &q;
    let l3 = (&q - 1u32) * BigUint::from(2u32).modinv(&q).unwrap() % &q;
    assert_eq!(lag.coeffs(), &[l1, l3]);
    assert_eq!(shamir::coefficient_sum(&lag), BigUint::from(1u32));
}

#[test]
fn chunking_and_common_c1() {
    let scheme = toy(3, 2, 8);
    let ring = scheme.message_ring().clone();
    // K = 10·M' with M = M' = 4.
    let m = random_message(&ring, 10, 21);
    let shares = scheme.share(&m, &mut derive_rng(21, &[1])).unwrap();
    let opts = RecOptions { retain_payloads: true, ..Default::default() };
    let report = scheme.approx_rec(&shares, &mut DropoutSchedule::None, 21, &opts).unwrap();
    assert!(report.outcome.is_ok());
    let cts: Vec<_> = report.transcript.events.iter().filter(|e| e.kind == KIND_CTS).collect();
    assert_eq!(cts.len(), 3);
    let cipher = scheme.config().cipher();
    let poly_bytes = 4 + cipher.degree() * scheme.config().cipher().bfv().ct_ring().byte_width();
    assert_eq!(cts[0].bytes, 4 + 10 * 2 * poly_bytes);
    assert_eq!(report.transcript.rounds(), 2);
}

#[test]
fn key_share_bytes_do_not_depend_on_k() {
    let scheme = toy(4, 2, 8);
    let ring = scheme.message_ring().clone();
    let mut p2p = Vec::new();
    let mut to_agg = Vec::new();
    for width in [5, 10] {
        let m = random_message(&ring, width, 5);
        let shares = scheme.share(&m, &mut derive_rng(5, &[1])).unwrap();
        let report = scheme.approx_rec(&shares, &mut DropoutSchedule::None, 5, &RecOptions::default()).unwrap();
        let rep = report.transcript.measure();
        p2p.push(rep.max_p2p_sent());
        let cts_bytes: usize = report
            .transcript
            .events
            .iter()
            .filter(|e| e.sender == Node::Party(1) && (e.kind == KIND_CTS || e.kind == KIND_CTN))
            .map(|e| e.bytes)
            .sum();
        to_agg.push(cts_bytes);
        assert!(report.transcript.events.iter().any(|e| e.kind == KIND_EK_SHARE && e.relayed));
    }
    assert_eq!(p2p[0], p2p[1]);
    assert_eq!(to_agg[1] - 8, 2 * (to_agg[0] - 8));
}

#[test]
fn inner_error_within_budget() {
    let scheme = toy(5, 3, 8);
    let ring = scheme.message_ring().clone();
    let cipher: &CipherParams = scheme.config().cipher();
    for seed in 0..10 {
        let m = random_message(&ring, 1, seed);
        let shares = scheme.share(&m, &mut derive_rng(seed, &[1])).unwrap();
        let report = scheme.approx_rec(&shares, &mut DropoutSchedule::None, seed, &RecOptions::default()).unwrap();
        let err = report.inner_error.unwrap();
        assert!(err <= cipher.combined_error_bound());
        assert!(err * 2u32 < *cipher.delta());
    }
}

#[test]
fn session_is_deterministic() {
    let scheme = toy(4, 3, 8);
    let ring = scheme.message_ring().clone();
    let m = random_message(&ring, 2, 9);
    let shares = scheme.share(&m, &mut derive_rng(9, &[1])).unwrap();
    let cfg = SimConfig { topology: Topology::Relay, retain_payloads: true, seed: 9 };
    let run = || {
        let mut session = AtassesSession::new(scheme.config(), &shares, 9, true).unwrap();
        let result = run_session(&mut session, &mut DropoutSchedule::Random { p: 0.2, seed: 4 }, &cfg);
        (result.outcome.ok(), result.transcript.events.iter().map(|e| (e.sender, e.receiver, e.payload.clone())).collect::<Vec<_>>())
    };
    assert_eq!(run(), run());
}
