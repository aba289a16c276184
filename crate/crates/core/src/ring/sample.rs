//! Samplers for ring elements. All take an explicit generator.

use num_bigint::{BigUint, RandBigInt};
use rand::Rng;

use super::{Coeffs, Ring, RingPoly};
use crate::error::{Error, Result};

/// Coefficients i.i.d. uniform on `[0, Q)`.
pub fn sample_uniform<R: Rng + ?Sized>(rng: &mut R, ring: &Ring) -> RingPoly {
    let n = ring.degree();
    let coeffs = match ring.word() {
        Some(m) => Coeffs::Word((0..n).map(|_| rng.gen_range(0..m.q())).collect()),
        None => Coeffs::Big((0..n).map(|_| rng.gen_biguint_below(ring.modulus())).collect()),
    };
    RingPoly::from_parts(ring.clone(), coeffs)
}

/// Coefficients i.i.d. uniform on `[-B, B]`. Requires `2B + 1 <= Q`.
pub fn sample_bounded<R: Rng + ?Sized>(rng: &mut R, ring: &Ring, bound: u64) -> Result<RingPoly> {
    if BigUint::from(bound) * 2u32 + 1u32 > *ring.modulus() {
        return Err(Error::param(format!(
            "bound {bound} too large for modulus {}",
            ring.modulus()
        )));
    }
    Ok(sample_wrapping(rng, ring, bound))
}

/// Like [`sample_bounded`] but lets the interval wrap around when `2B + 1 > Q`.
///
/// Smudging noise is specified as an integer distribution and only then
/// reduced into the message ring, which may be narrower than the interval.
pub fn sample_wrapping<R: Rng + ?Sized>(rng: &mut R, ring: &Ring, bound: u64) -> RingPoly {
    let n = ring.degree();
    let b = bound as i128;
    let vals: Vec<i128> = (0..n).map(|_| if b == 0 { 0 } else { rng.gen_range(-b..=b) }).collect();
    ring.from_i128s(&vals)
}

/// Coefficients i.i.d. uniform on `{-1, 0, 1}`.
pub fn sample_ternary<R: Rng + ?Sized>(rng: &mut R, ring: &Ring) -> RingPoly {
    let vals: Vec<i128> = (0..ring.degree()).map(|_| rng.gen_range(-1..=1)).collect();
    ring.from_i128s(&vals)
}
