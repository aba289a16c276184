//! T-out-of-N Shamir sharing of ring polynomials, coefficient by coefficient.
//!
//! Party `i` (1-based) owns evaluation point `x_i = i`. A secret may span
//! several polynomials; each share then carries one payload polynomial per
//! secret polynomial, all evaluated at the same point.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::ops;
use crate::ring::{prime, sample_uniform, Ring, RingPoly};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShamirShare {
    pub point: u64,
    pub payload: Vec<RingPoly>,
}

impl ShamirShare {
    pub fn ring(&self) -> Option<&Ring> {
        self.payload.first().map(RingPoly::ring)
    }
}

/// Lagrange coefficients at zero for a participant set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LagrangeSet {
    points: Vec<u64>,
    coeffs: Vec<BigUint>,
    modulus: BigUint,
}

impl LagrangeSet {
    pub fn points(&self) -> &[u64] {
        &self.points
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn coeff_for(&self, point: u64) -> Option<&BigUint> {
        self.points.iter().position(|&p| p == point).map(|i| &self.coeffs[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &BigUint)> {
        self.points.iter().copied().zip(self.coeffs.iter())
    }
}

/// The canonical evaluation points `1..=n`.
pub fn party_points(n: usize) -> Vec<u64> {
    (1..=n as u64).collect()
}

/// Checks that the points can serve a sharing over `modulus`.
pub fn validate_points(points: &[u64], modulus: &BigUint) -> Result<()> {
    if !prime::is_prime(modulus) {
        return Err(Error::param(format!("share modulus {modulus} is not prime")));
    }
    let mut seen = BTreeSet::new();
    for &p in points {
        if p == 0 || BigUint::from(p) >= *modulus {
            return Err(Error::param(format!("evaluation point {p} outside [1, {modulus})")));
        }
        if !seen.insert(p) {
            return Err(Error::param(format!("duplicate evaluation point {p}")));
        }
    }
    Ok(())
}

/// Shares `secret` T-out-of-N at points `1..=n`.
pub fn share<R: Rng + ?Sized>(secret: &[RingPoly], n: usize, t: usize, rng: &mut R) -> Result<Vec<ShamirShare>> {
    share_at(secret, &party_points(n), t, rng)
}

/// Shares `secret` at the given points with fresh uniform higher coefficients.
pub fn share_at<R: Rng + ?Sized>(
    secret: &[RingPoly],
    points: &[u64],
    t: usize,
    rng: &mut R,
) -> Result<Vec<ShamirShare>> {
    let ring = secret_ring(secret)?;
    let coeffs: Vec<Vec<RingPoly>> = secret
        .iter()
        .map(|_| (1..t.max(1)).map(|_| sample_uniform(rng, &ring)).collect())
        .collect();
    share_with_coeffs(secret, points, t, &coeffs)
}

/// Deterministic sharing with explicit higher coefficients:
/// `coeffs[c][k-1]` is the degree-`k` coefficient for secret polynomial `c`.
pub fn share_with_coeffs(
    secret: &[RingPoly],
    points: &[u64],
    t: usize,
    coeffs: &[Vec<RingPoly>],
) -> Result<Vec<ShamirShare>> {
    let ring = secret_ring(secret)?;
    if t == 0 || t > points.len() {
        return Err(Error::param(format!("threshold {t} must lie in [1, {}]", points.len())));
    }
    validate_points(points, ring.modulus())?;
    if coeffs.len() != secret.len() || coeffs.iter().any(|c| c.len() != t - 1) {
        return Err(Error::param("sharing polynomial has the wrong shape"));
    }
    let q = ring.modulus();
    let mut shares: Vec<ShamirShare> =
        points.iter().map(|&p| ShamirShare { point: p, payload: Vec::with_capacity(secret.len()) }).collect();
    for (m, higher) in secret.iter().zip(coeffs) {
        let mut terms: Vec<&RingPoly> = Vec::with_capacity(t);
        terms.push(m);
        terms.extend(higher.iter());
        for share in shares.iter_mut() {
            let x = BigUint::from(share.point);
            let mut weights = Vec::with_capacity(t);
            let mut w = BigUint::one();
            for _ in 0..t {
                weights.push(w.clone());
                w = w * &x % q;
            }
            share.payload.push(ring.lincomb(&terms, &weights)?);
        }
    }
    ops::count_shares(points.len() as u64);
    Ok(shares)
}

fn secret_ring(secret: &[RingPoly]) -> Result<Ring> {
    let ring = secret
        .first()
        .map(|p| p.ring().clone())
        .ok_or_else(|| Error::param("cannot share an empty secret"))?;
    for p in secret {
        ring.ensure_same(p.ring())?;
    }
    Ok(ring)
}

/// `L_i = prod_{j != i} x_j / (x_j - x_i) mod q` for every participant point.
pub fn lagrange_coeffs(points: &[u64], modulus: &BigUint) -> Result<LagrangeSet> {
    if points.is_empty() {
        return Err(Error::param("empty participant set"));
    }
    validate_points(points, modulus)?;
    let q = BigInt::from(modulus.clone());
    let mut coeffs = Vec::with_capacity(points.len());
    for (i, &xi) in points.iter().enumerate() {
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for (j, &xj) in points.iter().enumerate() {
            if i != j {
                num = num * BigInt::from(xj) % &q;
                den = den * (BigInt::from(xj) - BigInt::from(xi)) % &q;
            }
        }
        let den = ((den % &q) + &q) % &q;
        let den = den.to_biguint().expect("reduced");
        let inv = den
            .modinv(modulus)
            .ok_or_else(|| Error::param("point difference not invertible"))?;
        let num = ((num % &q) + &q) % &q;
        coeffs.push(num.to_biguint().expect("reduced") * inv % modulus);
    }
    Ok(LagrangeSet { points: points.to_vec(), coeffs, modulus: modulus.clone() })
}

/// Exact reconstruction from at least `t` shares at distinct points.
pub fn rec(shares: &[&ShamirShare], t: usize) -> Result<Vec<RingPoly>> {
    if shares.len() < t.max(1) {
        return Err(Error::InsufficientShares { needed: t.max(1), got: shares.len() });
    }
    let ring = shares[0].ring().ok_or_else(|| Error::param("share without payload"))?.clone();
    let width = shares[0].payload.len();
    if shares.iter().any(|s| s.payload.len() != width) {
        return Err(Error::param("shares carry different payload lengths"));
    }
    let points: Vec<u64> = shares.iter().map(|s| s.point).collect();
    let lag = lagrange_coeffs(&points, ring.modulus())?;
    (0..width)
        .map(|c| {
            let polys: Vec<&RingPoly> = shares.iter().map(|s| &s.payload[c]).collect();
            ring.lincomb(&polys, lag.coeffs())
        })
        .collect()
}

/// Weighted combination of shares held at one point: a share of the
/// correspondingly weighted secret.
pub fn linear_combine(shares: &[&ShamirShare], weights: &[BigUint]) -> Result<ShamirShare> {
    let first = shares.first().ok_or_else(|| Error::param("nothing to combine"))?;
    if shares.len() != weights.len() {
        return Err(Error::param("share and weight counts differ"));
    }
    if shares.iter().any(|s| s.point != first.point) {
        return Err(Error::param("cannot combine shares held at different points"));
    }
    let width = first.payload.len();
    if shares.iter().any(|s| s.payload.len() != width) {
        return Err(Error::param("shares carry different payload lengths"));
    }
    let ring = first.ring().ok_or_else(|| Error::param("share without payload"))?.clone();
    let payload = (0..width)
        .map(|c| {
            let polys: Vec<&RingPoly> = shares.iter().map(|s| &s.payload[c]).collect();
            ring.lincomb(&polys, weights)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ShamirShare { point: first.point, payload })
}

/// Share of `a + b` from shares of `a` and `b` held at one point.
pub fn add_shares(a: &ShamirShare, b: &ShamirShare) -> Result<ShamirShare> {
    if a.point != b.point || a.payload.len() != b.payload.len() {
        return Err(Error::param("cannot add shares of different shape or point"));
    }
    let payload = a.payload.iter().zip(&b.payload).map(|(x, y)| x.add(y)).collect::<Result<Vec<_>>>()?;
    Ok(ShamirShare { point: a.point, payload })
}

/// Share of `[scale_c·s + offset_c]_c` from a share of a one-polynomial
/// secret `s`. Valid because Lagrange coefficients sum to one.
pub fn affine_share(share: &ShamirShare, scales: &[RingPoly], offsets: &[RingPoly]) -> Result<ShamirShare> {
    if share.payload.len() != 1 {
        return Err(Error::param("affine map expects a single-polynomial share"));
    }
    if scales.len() != offsets.len() {
        return Err(Error::param("scale and offset counts differ"));
    }
    let s = &share.payload[0];
    let payload = scales
        .iter()
        .zip(offsets)
        .map(|(a, b)| a.mul(s)?.add(b))
        .collect::<Result<Vec<_>>>()?;
    Ok(ShamirShare { point: share.point, payload })
}

/// Sum of the Lagrange coefficients, which must be 1 for any set.
pub fn coefficient_sum(lag: &LagrangeSet) -> BigUint {
    lag.coeffs().iter().fold(BigUint::zero(), |acc, c| (acc + c) % lag.modulus())
}
