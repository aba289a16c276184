mod common;

use atasses::cipher::{combine_weighted, decode_round, Bfv, CipherParams, RlweCiphertext, SecretKey};
use atasses::ring::{sample_uniform, sample_wrapping};
use atasses::rng::{derive_rng, label};
use atasses::shamir;
use atasses::Ring;
use num_bigint::BigUint;

#[test]
fn full_scale_round_trip() {
    let params = CipherParams::search(4096, 65537u64, 19, 20).unwrap();
    let bfv = params.bfv();
    assert!(bfv.ct_ring().supports_ntt());
    let mut rng = derive_rng(1, &[label("test/cipher")]);
    let sk = bfv.keygen(&mut rng);
    for _ in 0..1000 {
        let a = sample_uniform(&mut rng, bfv.ct_ring());
        let m = sample_uniform(&mut rng, bfv.pt_ring());
        let ct = bfv.encrypt(&sk, &m, &a, params.bound(), &mut rng).unwrap();
        assert_eq!(bfv.decrypt(&sk, &ct).unwrap(), m);
    }
}

#[test]
fn toy_round_trips() {
    for degree in [4, 8] {
        let params = CipherParams::search(degree, 5u64, 1, 3).unwrap();
        let bfv = params.bfv();
        let mut rng = derive_rng(degree as u64, &[]);
        for _ in 0..1000 {
            let sk = bfv.keygen(&mut rng);
            let a = sample_uniform(&mut rng, bfv.ct_ring());
            let m = sample_uniform(&mut rng, bfv.pt_ring());
            let ct = bfv.encrypt(&sk, &m, &a, 1, &mut rng).unwrap();
            assert_eq!(bfv.decrypt(&sk, &ct).unwrap(), m);
        }
    }
}

#[test]
fn decode_exhaustive_small_delta() {
    let ct = Ring::new(1, 64u64).unwrap();
    let pt = Ring::new(1, 4u64).unwrap();
    let delta = BigUint::from(16u32);
    for m in 0..4i64 {
        for e in -7..=7i64 {
            let b = ct.from_i64s(&[16 * m + e]).unwrap();
            assert_eq!(decode_round(&b, &delta, &pt).unwrap(), pt.constant(m as u64));
        }
    }
}

#[test]
fn sum_of_keys_decrypts_sum_of_messages() {
    let params = CipherParams::search(8, 17u64, 2, 2).unwrap();
    let bfv = params.bfv();
    let mut rng = derive_rng(2, &[]);
    let a = sample_uniform(&mut rng, bfv.ct_ring());
    let (sk1, sk2) = (bfv.keygen(&mut rng), bfv.keygen(&mut rng));
    let (m1, m2) = (sample_uniform(&mut rng, bfv.pt_ring()), sample_uniform(&mut rng, bfv.pt_ring()));
    let c1 = bfv.encrypt(&sk1, &m1, &a, 2, &mut rng).unwrap();
    let c2 = bfv.encrypt(&sk2, &m2, &a, 2, &mut rng).unwrap();
    let sum = combine_weighted(&[&c1, &c2], &[BigUint::from(1u32), BigUint::from(1u32)]).unwrap();
    let sk = SecretKey(sk1.0.add(&sk2.0).unwrap());
    assert_eq!(bfv.decrypt(&sk, &sum).unwrap(), m1.add(&m2).unwrap());
}

/// Lagrange-weighted share ciphertexts plus unit-weight noise ciphertexts
/// decrypt to `Σ L_i·s_i + Σ n_i` under `Σ (L_i·ek_{i,1} + ek_{i,2})`.
#[test]
fn weighted_combination_of_shares_and_noise() {
    let (n, t) = (5usize, 3usize);
    let params = CipherParams::search(8, 257u64, 2, n).unwrap();
    let bfv = params.bfv();
    let pt = bfv.pt_ring().clone();
    let ct_ring = bfv.ct_ring().clone();
    let mut rng = derive_rng(3, &[]);
    let m = sample_uniform(&mut rng, &pt);
    let shares = shamir::share(&[m.clone()], n, t, &mut rng).unwrap();
    let members = [1u64, 3, 4, 5];
    let lag = shamir::lagrange_coeffs(&members, pt.modulus()).unwrap();
    let a = sample_uniform(&mut rng, &ct_ring);
    let mut cts: Vec<RlweCiphertext> = Vec::new();
    let mut noise_cts = Vec::new();
    let mut noise_sum = pt.zero();
    let mut dk = ct_ring.zero();
    for (p, l) in lag.iter() {
        let ek1 = bfv.keygen(&mut rng);
        let ek2 = bfv.keygen(&mut rng);
        let nu = sample_wrapping(&mut rng, &pt, 4);
        noise_sum.add_assign(&nu).unwrap();
        cts.push(bfv.encrypt(&ek1, &shares[p as usize - 1].payload[0], &a, 2, &mut rng).unwrap());
        noise_cts.push(bfv.encrypt(&ek2, &nu, &a, 2, &mut rng).unwrap());
        dk.add_assign(&ek1.0.scalar_mul(l).add(&ek2.0).unwrap()).unwrap();
    }
    let all: Vec<&RlweCiphertext> = cts.iter().chain(&noise_cts).collect();
    let mut weights = lag.coeffs().to_vec();
    weights.extend(std::iter::repeat(BigUint::from(1u32)).take(members.len()));
    let combined = combine_weighted(&all, &weights).unwrap();
    assert_eq!(bfv.decrypt(&SecretKey(dk.clone()), &combined).unwrap(), m.add(&noise_sum).unwrap());
    let err = bfv.error(&SecretKey(dk), &combined, &m.add(&noise_sum).unwrap()).unwrap();
    assert!(err.inf_norm() <= params.combined_error_bound());
}

#[test]
fn modulus_below_headline_bound_is_rejected() {
    let p = BigUint::from(65537u32);
    let bound = CipherParams::headline_bound(&p, 19, 20);
    assert!(CipherParams::new(4096, bound.clone(), p.clone(), 19, 20).is_err());
    assert!(CipherParams::new(4096, &bound - 1u32, p, 19, 20).is_err());
}

#[test]
fn bfv_rejects_mismatched_rings() {
    assert!(Bfv::new(Ring::new(4, 64u64).unwrap(), Ring::new(8, 4u64).unwrap()).is_err());
    assert!(Bfv::new(Ring::new(4, 4u64).unwrap(), Ring::new(4, 5u64).unwrap()).is_err());
}
