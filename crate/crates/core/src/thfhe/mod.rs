//! Threshold FHE over an approximate secret sharing backend.
//!
//! Setup (all parties present): every party draws a ternary local key
//! `sk_i`, shares it with the backend, and keeps the sum of the shares it
//! received as `skShare_i`, a share of `sk = Σ sk_i`. The collective public
//! key is `(Σ(-a·sk_i + e_i), a)` for a common `a`.
//!
//! Decryption of ciphertexts `(c0_c, c1_c)`:
//!
//! 1. each party maps its key share to a share of `[c0_c + c1_c·sk]_c`;
//! 2. the backend's approximate recovery returns `b' = Δ·m + e_CT + n`;
//! 3. every coefficient of `b'` is rounded back to the plaintext space.
//!
//! Only additions are evaluated, so no evaluation keys exist.

mod smudging;

pub use smudging::smudging_tv_distance;

use num_bigint::BigUint;
use num_integer::Integer;
use rand::Rng;
use rand_chacha::ChaCha20Rng;

use crate::approx::{ApproxSs, RecOptions, SessionReport};
use crate::cipher::{decode_round, Bfv, RlweCiphertext, SecretKey};
use crate::error::{Error, Result};
use crate::ring::{prime, sample_bounded, sample_ternary, sample_uniform, Ring, RingPoly};
use crate::rng::{derive_rng, label};
use crate::sim::DropoutSchedule;

/// Outer scheme parameters with the decryption budget checked.
///
/// With `C` summed fresh ciphertexts the post-evaluation error is at most
/// `B_CT = C·B_fresh + (C - 1)·r` where `B_fresh = B·(1 + 2·M·N)` bounds a
/// fresh public-key encryption under an `N`-party collective key and
/// `r = Q mod P` is the carry picked up when plaintexts wrap past `P`.
/// Decryption is correct when `2·(M_B + B_CT) < Δ`, `M_B` being the
/// backend's recovery error bound.
#[derive(Debug, Clone)]
pub struct OuterParams {
    bfv: Bfv,
    bound: u64,
    parties: usize,
    ciphertexts: usize,
    backend_bound: BigUint,
}

impl OuterParams {
    pub fn new(
        degree: usize,
        q: impl Into<BigUint>,
        p: impl Into<BigUint>,
        bound: u64,
        parties: usize,
        ciphertexts: usize,
        backend_bound: BigUint,
    ) -> Result<Self> {
        if parties == 0 || ciphertexts == 0 {
            return Err(Error::param("party and ciphertext counts must be positive"));
        }
        let bfv = Bfv::new(Ring::new(degree, q)?, Ring::new(degree, p)?)?;
        let params = OuterParams { bfv, bound, parties, ciphertexts, backend_bound };
        let need = (params.backend_bound.clone() + params.ct_bound()) * 2u32;
        if need >= *params.delta() {
            return Err(Error::param(format!(
                "2·(M_B + B_CT) = {need} is not below Δ = {}",
                params.delta()
            )));
        }
        Ok(params)
    }

    /// Smallest prime `Q ≡ 1 (mod lcm(2M, P))` that validates.
    pub fn search(
        degree: usize,
        p: u64,
        bound: u64,
        parties: usize,
        ciphertexts: usize,
        backend_bound: BigUint,
    ) -> Result<Self> {
        let step = BigUint::from(2 * degree as u64).lcm(&BigUint::from(p));
        let fresh = fresh_bound(degree, bound, parties);
        let mut floor = (backend_bound.clone() + fresh * ciphertexts as u64) * 2u32 * p;
        loop {
            let q = prime::smallest_prime_above(&floor, &step);
            match Self::new(degree, q.clone(), p, bound, parties, ciphertexts, backend_bound.clone()) {
                Ok(params) => return Ok(params),
                Err(Error::Parameter(msg)) if msg.starts_with("2·(M_B") => floor = q,
                Err(e) => return Err(e),
            }
        }
    }

    pub fn bfv(&self) -> &Bfv {
        &self.bfv
    }

    pub fn ring(&self) -> &Ring {
        self.bfv.ct_ring()
    }

    pub fn plaintext_ring(&self) -> &Ring {
        self.bfv.pt_ring()
    }

    pub fn degree(&self) -> usize {
        self.ring().degree()
    }

    pub fn q(&self) -> &BigUint {
        self.ring().modulus()
    }

    pub fn p(&self) -> &BigUint {
        self.plaintext_ring().modulus()
    }

    pub fn delta(&self) -> &BigUint {
        self.bfv.delta()
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn ciphertexts(&self) -> usize {
        self.ciphertexts
    }

    pub fn backend_bound(&self) -> &BigUint {
        &self.backend_bound
    }

    pub fn fresh_bound(&self) -> BigUint {
        fresh_bound(self.degree(), self.bound, self.parties)
    }

    /// `B_CT` for a sum of [`OuterParams::ciphertexts`] fresh encryptions.
    pub fn ct_bound(&self) -> BigUint {
        let r = self.q() % self.p();
        self.fresh_bound() * self.ciphertexts as u64 + r * (self.ciphertexts as u64 - 1)
    }
}

/// `B·(1 + 2·M·N)`.
pub fn fresh_bound(degree: usize, bound: u64, parties: usize) -> BigUint {
    BigUint::from(bound) * (1 + 2 * degree as u64 * parties as u64)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicKey {
    pub p0: RingPoly,
    pub p1: RingPoly,
}

/// Output of the setup stage. `local_keys` never leave their owners; they
/// are kept here for tests and error tracking.
#[derive(Debug, Clone)]
pub struct KeyMaterial<S> {
    pub local_keys: Vec<SecretKey>,
    pub key_shares: Vec<S>,
    pub pk: PublicKey,
}

impl<S> KeyMaterial<S> {
    /// `Σ sk_i`.
    pub fn global_key(&self) -> Result<SecretKey> {
        global_key(&self.local_keys)
    }
}

pub fn global_key(keys: &[SecretKey]) -> Result<SecretKey> {
    let (first, rest) = keys.split_first().ok_or_else(|| Error::Setup("no local keys".into()))?;
    let mut sum = first.0.clone();
    for k in rest {
        sum.add_assign(&k.0)?;
    }
    Ok(SecretKey(sum))
}

/// Result of one threshold decryption.
pub struct Decryption {
    pub plaintexts: Result<Vec<RingPoly>>,
    /// Recovery session; its outcome holds `b'`.
    pub report: SessionReport,
}

/// The pipeline over a backend whose message ring is the outer ciphertext
/// ring.
pub struct ThFhe<B: ApproxSs> {
    params: OuterParams,
    backend: B,
}

impl<B: ApproxSs> ThFhe<B> {
    pub fn new(params: OuterParams, backend: B) -> Result<Self> {
        params.ring().ensure_same(backend.message_ring())?;
        if backend.parties() != params.parties() {
            return Err(Error::param("backend and outer parameters disagree on N"));
        }
        if backend.error_bound() > *params.backend_bound() {
            return Err(Error::param(format!(
                "backend error bound {} exceeds the budgeted {}",
                backend.error_bound(),
                params.backend_bound()
            )));
        }
        Ok(ThFhe { params, backend })
    }

    pub fn params(&self) -> &OuterParams {
        &self.params
    }

    pub fn backend(&self) -> &B {
        &self.backend
    }

    pub fn ring(&self) -> &Ring {
        self.params.ring()
    }

    /// Ternary local keys for all parties.
    pub fn local_keygen(&self, seed: u64) -> Vec<SecretKey> {
        (1..=self.params.parties)
            .map(|i| SecretKey(sample_ternary(&mut derive_rng(seed, &[label("thfhe/sk"), i as u64]), self.ring())))
            .collect()
    }

    /// `skShare_i = Σ_j Share(sk_j)_i`. Needs every party's key.
    pub fn sk_share(&self, keys: &[SecretKey], rng: &mut ChaCha20Rng) -> Result<Vec<B::Share>> {
        let n = self.params.parties;
        if keys.len() != n {
            return Err(Error::Setup(format!("setup needs all {n} local keys, got {}", keys.len())));
        }
        let mut acc: Option<Vec<B::Share>> = None;
        for sk in keys {
            let shares = self.backend.share(std::slice::from_ref(&sk.0), rng)?;
            acc = Some(match acc {
                None => shares,
                Some(prev) => prev
                    .iter()
                    .zip(&shares)
                    .map(|(a, b)| self.backend.add(a, b))
                    .collect::<Result<Vec<_>>>()?,
            });
        }
        Ok(acc.expect("at least one party"))
    }

    /// Common `a` for the collective public key.
    pub fn crs(&self, crs_seed: u64) -> RingPoly {
        sample_uniform(&mut derive_rng(crs_seed, &[label("thfhe/crs")]), self.ring())
    }

    /// `(Σ_i (-a·sk_i + e_i), a)`.
    pub fn collective_pk_with_errors(&self, keys: &[SecretKey], a: &RingPoly, errors: &[RingPoly]) -> Result<PublicKey> {
        if keys.len() != errors.len() {
            return Err(Error::Setup("one key-generation error per party expected".into()));
        }
        let mut p0 = self.ring().zero();
        for (sk, e) in keys.iter().zip(errors) {
            p0.add_assign(&e.sub(&a.mul(&sk.0)?)?)?;
        }
        Ok(PublicKey { p0, p1: a.clone() })
    }

    pub fn collective_pkgen<R: Rng + ?Sized>(&self, keys: &[SecretKey], crs_seed: u64, rng: &mut R) -> Result<PublicKey> {
        if keys.len() != self.params.parties {
            return Err(Error::Setup(format!("setup needs all {} local keys", self.params.parties)));
        }
        let errors = keys
            .iter()
            .map(|_| sample_bounded(rng, self.ring(), self.params.bound))
            .collect::<Result<Vec<_>>>()?;
        self.collective_pk_with_errors(keys, &self.crs(crs_seed), &errors)
    }

    /// Full setup: local keys, key shares and public key.
    pub fn setup(&self, seed: u64) -> Result<KeyMaterial<B::Share>> {
        let local_keys = self.local_keygen(seed);
        let key_shares = self.sk_share(&local_keys, &mut derive_rng(seed, &[label("thfhe/share")]))?;
        let pk = self.collective_pkgen(&local_keys, seed, &mut derive_rng(seed, &[label("thfhe/pk")]))?;
        Ok(KeyMaterial { local_keys, key_shares, pk })
    }

    /// `(u·p0 + e0 + Δ·m, u·p1 + e1)`.
    pub fn pk_encrypt_with(
        &self,
        pk: &PublicKey,
        m: &RingPoly,
        u: &RingPoly,
        e0: &RingPoly,
        e1: &RingPoly,
    ) -> Result<RlweCiphertext> {
        let c0 = u.mul(&pk.p0)?.add(e0)?.add(&self.params.bfv.scale(m)?)?;
        let c1 = u.mul(&pk.p1)?.add(e1)?;
        Ok(RlweCiphertext { c0, c1 })
    }

    pub fn pk_encrypt<R: Rng + ?Sized>(&self, pk: &PublicKey, m: &RingPoly, rng: &mut R) -> Result<RlweCiphertext> {
        let u = sample_ternary(rng, self.ring());
        let e0 = sample_bounded(rng, self.ring(), self.params.bound)?;
        let e1 = sample_bounded(rng, self.ring(), self.params.bound)?;
        self.pk_encrypt_with(pk, m, &u, &e0, &e1)
    }

    /// Componentwise sum.
    pub fn eval_add(&self, cts: &[RlweCiphertext]) -> Result<RlweCiphertext> {
        let (first, rest) = cts.split_first().ok_or_else(|| Error::param("nothing to add"))?;
        rest.iter().try_fold(first.clone(), |acc, ct| acc.add(ct))
    }

    /// Party's share of `[c0_c + c1_c·sk]_c`.
    pub fn dec_phase1(&self, key_share: &B::Share, cts: &[RlweCiphertext]) -> Result<B::Share> {
        let scales: Vec<RingPoly> = cts.iter().map(|ct| ct.c1.clone()).collect();
        let offsets: Vec<RingPoly> = cts.iter().map(|ct| ct.c0.clone()).collect();
        self.backend.affine(key_share, &scales, &offsets)
    }

    /// Approximate recovery of `b'` from the phase-1 shares of all parties;
    /// the schedule decides who takes part.
    pub fn dec_phase2(
        &self,
        shares: &[B::Share],
        schedule: &mut DropoutSchedule,
        seed: u64,
        opts: &RecOptions,
    ) -> Result<SessionReport> {
        self.backend.approx_rec(shares, schedule, seed, opts)
    }

    /// Rounds each recovered polynomial to its plaintext.
    pub fn dec_phase3(&self, recovered: &[RingPoly]) -> Result<Vec<RingPoly>> {
        recovered
            .iter()
            .map(|b| decode_round(b, self.params.delta(), self.params.plaintext_ring()))
            .collect()
    }

    /// All three phases. A recovery abort shows up in
    /// [`Decryption::plaintexts`]; the transcript is kept either way.
    pub fn decrypt(
        &self,
        key_shares: &[B::Share],
        cts: &[RlweCiphertext],
        schedule: &mut DropoutSchedule,
        seed: u64,
        opts: &RecOptions,
    ) -> Result<Decryption> {
        let shares = key_shares
            .iter()
            .map(|s| self.dec_phase1(s, cts))
            .collect::<Result<Vec<_>>>()?;
        let report = self.dec_phase2(&shares, schedule, seed, opts)?;
        let plaintexts = match &report.outcome {
            Ok(b) => self.dec_phase3(b),
            Err(e) => Err(Error::ProtocolState(format!("recovery aborted: {e}"))),
        };
        Ok(Decryption { plaintexts, report })
    }
}
