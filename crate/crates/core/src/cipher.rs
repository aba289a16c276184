//! BFV-style secret-key RLWE encryption.
//!
//! A ciphertext `(c0, c1)` of `m` under `sk` satisfies
//! `c0 + c1·sk = Δ·m + e (mod Q)` with `Δ = ⌊Q/P⌋`. Ciphertexts that share the
//! same `c1 = -a` can be combined with per-ciphertext weights; the result
//! decrypts under the equally weighted sum of keys.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::ring::{prime, sample_bounded, sample_ternary, Ring, RingPoly};

/// Ternary secret key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecretKey(pub RingPoly);

impl SecretKey {
    pub fn poly(&self) -> &RingPoly {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RlweCiphertext {
    pub c0: RingPoly,
    pub c1: RingPoly,
}

impl RlweCiphertext {
    /// Componentwise sum; error bounds add.
    pub fn add(&self, other: &RlweCiphertext) -> Result<RlweCiphertext> {
        Ok(RlweCiphertext { c0: self.c0.add(&other.c0)?, c1: self.c1.add(&other.c1)? })
    }
}

/// Ciphertext ring, plaintext ring and scaling factor. No bound checks: see
/// [`CipherParams`] for the validated inner-cipher configuration.
#[derive(Debug, Clone)]
pub struct Bfv {
    ct: Ring,
    pt: Ring,
    delta: BigUint,
}

impl Bfv {
    pub fn new(ct: Ring, pt: Ring) -> Result<Bfv> {
        if ct.degree() != pt.degree() {
            return Err(Error::param("plaintext and ciphertext rings differ in degree"));
        }
        let delta = ct.modulus() / pt.modulus();
        if delta.is_zero() {
            return Err(Error::param("plaintext modulus exceeds ciphertext modulus"));
        }
        Ok(Bfv { ct, pt, delta })
    }

    pub fn ct_ring(&self) -> &Ring {
        &self.ct
    }

    pub fn pt_ring(&self) -> &Ring {
        &self.pt
    }

    pub fn delta(&self) -> &BigUint {
        &self.delta
    }

    pub fn keygen<R: Rng + ?Sized>(&self, rng: &mut R) -> SecretKey {
        SecretKey(sample_ternary(rng, &self.ct))
    }

    /// `Δ·m` with `m` lifted by its least non-negative residues.
    pub fn scale(&self, m: &RingPoly) -> Result<RingPoly> {
        self.pt.ensure_same(m.ring())?;
        Ok(m.lift_into(&self.ct)?.scalar_mul(&self.delta))
    }

    /// `(a·sk + e + Δ·m, -a)` with explicit error.
    pub fn encrypt_with_error(
        &self,
        sk: &SecretKey,
        m: &RingPoly,
        a: &RingPoly,
        e: &RingPoly,
    ) -> Result<RlweCiphertext> {
        let c0 = a.mul(&sk.0)?.add(e)?.add(&self.scale(m)?)?;
        Ok(RlweCiphertext { c0, c1: a.neg() })
    }

    /// Encryption with fresh error uniform on `[-bound, bound]`.
    pub fn encrypt<R: Rng + ?Sized>(
        &self,
        sk: &SecretKey,
        m: &RingPoly,
        a: &RingPoly,
        bound: u64,
        rng: &mut R,
    ) -> Result<RlweCiphertext> {
        let e = sample_bounded(rng, &self.ct, bound)?;
        self.encrypt_with_error(sk, m, a, &e)
    }

    /// `c0 + c1·sk`.
    pub fn phase(&self, sk: &SecretKey, ct: &RlweCiphertext) -> Result<RingPoly> {
        ct.c0.add(&ct.c1.mul(&sk.0)?)
    }

    pub fn decrypt(&self, sk: &SecretKey, ct: &RlweCiphertext) -> Result<RingPoly> {
        decode_round(&self.phase(sk, ct)?, &self.delta, &self.pt)
    }

    /// Error term `c0 + c1·sk - Δ·m` for a known plaintext.
    pub fn error(&self, sk: &SecretKey, ct: &RlweCiphertext, m: &RingPoly) -> Result<RingPoly> {
        self.phase(sk, ct)?.sub(&self.scale(m)?)
    }
}

/// Rounds `b = Δ·m + e` back to `m`. Exact whenever `‖e‖ < Δ/2`.
///
/// Each coefficient is lifted into the window `[-⌊Δ/2⌋, Q - ⌊Δ/2⌋)` before
/// rounding, which keeps the top plaintext value `P - 1` clear of the
/// wraparound at `Q` even when `P` does not divide `Q`.
pub fn decode_round(b: &RingPoly, delta: &BigUint, pt: &Ring) -> Result<RingPoly> {
    if b.degree() != pt.degree() {
        return Err(Error::param("decode: degree mismatch"));
    }
    if delta.is_zero() {
        return Err(Error::param("decode: zero scaling factor"));
    }
    let q = b.ring().modulus();
    let half = delta >> 1u32;
    let odd = u32::from(delta.is_odd());
    if let (Some(words), Some(qw), Some(d), Some(pw)) =
        (b.words(), b.ring().modulus_u64(), delta.to_u64(), pt.modulus_u64())
    {
        let h = d / 2;
        let vals: Vec<u64> = words
            .iter()
            .map(|&v| {
                let u = ((v as u128 + h as u128) % qw as u128) as u128;
                ((2 * u + odd as u128) / (2 * d as u128) % pw as u128) as u64
            })
            .collect();
        return pt.from_u64s(&vals);
    }
    let two_delta = delta << 1u32;
    let vals: Vec<BigUint> = b
        .to_biguints()
        .into_iter()
        .map(|v| {
            let u = (v + &half) % q;
            ((u << 1u32) + odd) / &two_delta % pt.modulus()
        })
        .collect();
    pt.from_biguints(&vals)
}

/// Weighted combination of ciphertexts under a common `c1`:
/// `c0 = Σ w_i·c0_i`, `c1` unchanged.
pub fn combine_weighted(cts: &[&RlweCiphertext], weights: &[BigUint]) -> Result<RlweCiphertext> {
    let first = cts.first().ok_or_else(|| Error::Combine("no ciphertexts".into()))?;
    if cts.len() != weights.len() {
        return Err(Error::Combine("ciphertext and weight counts differ".into()));
    }
    if cts.iter().any(|ct| ct.c1 != first.c1) {
        return Err(Error::Combine("ciphertexts do not share a common c1".into()));
    }
    let c0s: Vec<&RingPoly> = cts.iter().map(|ct| &ct.c0).collect();
    let c0 = first.c0.ring().lincomb(&c0s, weights)?;
    Ok(RlweCiphertext { c0, c1: first.c1.clone() })
}

/// Validated parameters of the inner cipher used by the recovery protocol.
///
/// Besides the headline requirement `Q' > 2·P'^2·B'·N + 2·P'`, validation
/// checks the full budget of a combined ciphertext: at most `N` share
/// ciphertexts weighted by integers below `P'`, `N` unit-weight noise
/// ciphertexts, and the carry term `r'·k` that appears when the combined
/// plaintext exceeds `P'` (`r' = Q' mod P'`, `k < N·P'`).
#[derive(Debug, Clone)]
pub struct CipherParams {
    bfv: Bfv,
    bound: u64,
    parties: usize,
}

impl CipherParams {
    pub fn new(degree: usize, q: impl Into<BigUint>, p: impl Into<BigUint>, bound: u64, parties: usize) -> Result<Self> {
        let (q, p) = (q.into(), p.into());
        if parties == 0 {
            return Err(Error::param("party count must be positive"));
        }
        if !prime::is_prime(&p) {
            return Err(Error::param(format!("plaintext modulus {p} is not prime")));
        }
        let headline = Self::headline_bound(&p, bound, parties);
        if q <= headline {
            return Err(Error::param(format!(
                "ciphertext modulus {q} does not exceed 2·P'^2·B'·N + 2·P' = {headline}"
            )));
        }
        let bfv = Bfv::new(Ring::new(degree, q)?, Ring::new(degree, p)?)?;
        let params = CipherParams { bfv, bound, parties };
        let budget = params.combined_error_bound();
        if budget * 2u32 >= *params.bfv.delta() {
            return Err(Error::param(format!(
                "combined error bound {} is not below Δ'/2 = {}/2",
                params.combined_error_bound(),
                params.bfv.delta()
            )));
        }
        Ok(params)
    }

    /// Smallest prime `Q' ≡ 1 (mod lcm(2M', P'))` that validates, so that
    /// `Q' mod P' = 1` and the NTT applies.
    pub fn search(degree: usize, p: impl Into<BigUint>, bound: u64, parties: usize) -> Result<Self> {
        let p = p.into();
        let step = BigUint::from(2 * degree as u64).lcm(&p);
        let mut floor = Self::headline_bound(&p, bound, parties);
        loop {
            let q = prime::smallest_prime_above(&floor, &step);
            match Self::new(degree, q.clone(), p.clone(), bound, parties) {
                Ok(params) => return Ok(params),
                Err(Error::Parameter(msg)) if msg.starts_with("combined error") => floor = q,
                Err(e) => return Err(e),
            }
        }
    }

    /// `2·P'^2·B'·N + 2·P'`.
    pub fn headline_bound(p: &BigUint, bound: u64, parties: usize) -> BigUint {
        BigUint::from(2u32) * p * p * bound * parties as u64 + p * 2u32
    }

    /// `N·P'·B' + r'·N·(P' - 1)`, the largest error magnitude a combined
    /// ciphertext can carry.
    pub fn combined_error_bound(&self) -> BigUint {
        let p = self.bfv.pt_ring().modulus();
        let q = self.bfv.ct_ring().modulus();
        let n = self.parties as u64;
        let r = q % p;
        p * self.bound * n + r * n * (p - 1u32)
    }

    pub fn bfv(&self) -> &Bfv {
        &self.bfv
    }

    pub fn degree(&self) -> usize {
        self.bfv.ct_ring().degree()
    }

    pub fn q(&self) -> &BigUint {
        self.bfv.ct_ring().modulus()
    }

    pub fn p(&self) -> &BigUint {
        self.bfv.pt_ring().modulus()
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
}
