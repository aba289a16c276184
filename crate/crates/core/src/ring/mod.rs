//! Negacyclic polynomial rings `Z_Q[x]/(x^M + 1)`.
//!
//! Coefficients are always stored fully reduced in `[0, Q)`. Moduli below
//! 2^62 use a single-word representation with Barrett/Shoup kernels and, when
//! `Q` is a prime congruent to 1 mod `2M`, NTT multiplication. Larger moduli
//! fall back to arbitrary precision. The two paths are interchangeable: they
//! compute identical results and differ only in speed.

pub mod arith;
pub mod ntt;
pub mod prime;
pub mod sample;

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ops;
use arith::{WordMod, WORD_LIMIT};
use ntt::Ntt;

pub use sample::{sample_bounded, sample_ternary, sample_uniform, sample_wrapping};

/// Infinity norm of a polynomial after centered lift into `(-Q/2, Q/2]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignedNorm(BigUint);

impl SignedNorm {
    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }
}

impl PartialEq<u64> for SignedNorm {
    fn eq(&self, other: &u64) -> bool {
        self.0 == BigUint::from(*other)
    }
}

impl PartialOrd<u64> for SignedNorm {
    fn partial_cmp(&self, other: &u64) -> Option<std::cmp::Ordering> {
        self.0.partial_cmp(&BigUint::from(*other))
    }
}

impl PartialEq<BigUint> for SignedNorm {
    fn eq(&self, other: &BigUint) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<BigUint> for SignedNorm {
    fn partial_cmp(&self, other: &BigUint) -> Option<std::cmp::Ordering> {
        self.0.partial_cmp(other)
    }
}

impl fmt::Display for SignedNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

struct RingInner {
    degree: usize,
    modulus: BigUint,
    word: Option<WordMod>,
    byte_width: usize,
    ntt: OnceLock<Option<Ntt>>,
}

/// A ring `Z_Q[x]/(x^M + 1)`. Cheap to clone.
#[derive(Clone)]
pub struct Ring(Arc<RingInner>);

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.degree == other.0.degree && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Ring {}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring(M={}, Q={})", self.0.degree, self.0.modulus)
    }
}

/// Minimal number of bytes holding any residue in `[0, q)`.
pub fn byte_width(q: &BigUint) -> usize {
    let bits = (q - 1u32).bits().max(1);
    bits.div_ceil(8) as usize
}

impl Ring {
    pub fn new(degree: usize, modulus: impl Into<BigUint>) -> Result<Ring> {
        let modulus = modulus.into();
        if degree == 0 || !degree.is_power_of_two() {
            return Err(Error::param(format!("ring degree {degree} is not a power of two")));
        }
        if modulus < BigUint::from(2u32) {
            return Err(Error::param(format!("modulus {modulus} must be at least 2")));
        }
        let word = modulus.to_u64().filter(|&q| q < WORD_LIMIT).map(WordMod::new);
        Ok(Ring(Arc::new(RingInner {
            degree,
            byte_width: byte_width(&modulus),
            modulus,
            word,
            ntt: OnceLock::new(),
        })))
    }

    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn modulus(&self) -> &BigUint {
        &self.0.modulus
    }

    /// The modulus as a word, when the word kernels apply.
    pub fn modulus_u64(&self) -> Option<u64> {
        self.0.word.map(|m| m.q())
    }

    pub fn word(&self) -> Option<&WordMod> {
        self.0.word.as_ref()
    }

    /// Bytes per serialized coefficient.
    pub fn byte_width(&self) -> usize {
        self.0.byte_width
    }

    fn ntt(&self) -> Option<&Ntt> {
        self.0
            .ntt
            .get_or_init(|| self.0.word.and_then(|m| Ntt::new(m.q(), self.0.degree)))
            .as_ref()
    }

    pub fn supports_ntt(&self) -> bool {
        self.ntt().is_some()
    }

    pub fn ensure_same(&self, other: &Ring) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::param(format!("ring mismatch: {self:?} vs {other:?}")))
        }
    }

    pub fn zero(&self) -> RingPoly {
        let n = self.degree();
        let coeffs = match self.word() {
            Some(_) => Coeffs::Word(vec![0; n]),
            None => Coeffs::Big(vec![BigUint::zero(); n]),
        };
        RingPoly::from_parts(self.clone(), coeffs)
    }

    pub fn constant(&self, c: u64) -> RingPoly {
        let mut p = self.zero();
        p.set_coeff(0, &BigUint::from(c));
        p
    }

    pub fn one(&self) -> RingPoly {
        self.constant(1)
    }

    /// `x^k` reduced by `x^M = -1`, for any `k < 2M`.
    pub fn monomial(&self, k: usize) -> RingPoly {
        let n = self.degree();
        let mut p = self.zero();
        let one = BigUint::from(1u32);
        if k % (2 * n) < n {
            p.set_coeff(k % n, &one);
        } else {
            p.set_coeff(k % n, &(self.modulus() - 1u32));
        }
        p
    }

    /// Reduces an arbitrary integer into `[0, Q)`.
    pub fn reduce(&self, x: &BigUint) -> BigUint {
        x % self.modulus()
    }

    pub fn reduce_signed(&self, x: &BigInt) -> BigUint {
        let q = BigInt::from(self.modulus().clone());
        let r = ((x % &q) + &q) % &q;
        r.to_biguint().expect("non-negative after reduction")
    }

    /// Builds a polynomial from up to `M` unsigned values, zero-padding the rest.
    pub fn from_u64s(&self, vals: &[u64]) -> Result<RingPoly> {
        self.check_len(vals.len())?;
        let n = self.degree();
        let coeffs = match self.word() {
            Some(m) => {
                let mut v: Vec<u64> = vals.iter().map(|&x| x % m.q()).collect();
                v.resize(n, 0);
                Coeffs::Word(v)
            }
            None => {
                let mut v: Vec<BigUint> = vals.iter().map(|&x| BigUint::from(x) % self.modulus()).collect();
                v.resize(n, BigUint::zero());
                Coeffs::Big(v)
            }
        };
        Ok(RingPoly::from_parts(self.clone(), coeffs))
    }

    pub fn from_biguints(&self, vals: &[BigUint]) -> Result<RingPoly> {
        self.check_len(vals.len())?;
        let n = self.degree();
        let coeffs = match self.word() {
            Some(m) => {
                let q = BigUint::from(m.q());
                let mut v: Vec<u64> = vals.iter().map(|x| (x % &q).to_u64().expect("reduced")).collect();
                v.resize(n, 0);
                Coeffs::Word(v)
            }
            None => {
                let mut v: Vec<BigUint> = vals.iter().map(|x| x % self.modulus()).collect();
                v.resize(n, BigUint::zero());
                Coeffs::Big(v)
            }
        };
        Ok(RingPoly::from_parts(self.clone(), coeffs))
    }

    pub fn from_i64s(&self, vals: &[i64]) -> Result<RingPoly> {
        self.check_len(vals.len())?;
        let wide: Vec<i128> = vals.iter().map(|&v| v as i128).collect();
        Ok(self.from_i128s(&wide))
    }

    pub(crate) fn from_i128s(&self, vals: &[i128]) -> RingPoly {
        let n = self.degree();
        debug_assert!(vals.len() <= n);
        let coeffs = match self.word() {
            Some(m) => {
                let q = m.q() as i128;
                let mut v: Vec<u64> = vals.iter().map(|&x| x.rem_euclid(q) as u64).collect();
                v.resize(n, 0);
                Coeffs::Word(v)
            }
            None => {
                let mut v: Vec<BigUint> =
                    vals.iter().map(|&x| self.reduce_signed(&BigInt::from(x))).collect();
                v.resize(n, BigUint::zero());
                Coeffs::Big(v)
            }
        };
        RingPoly::from_parts(self.clone(), coeffs)
    }

    pub fn from_bigints(&self, vals: &[BigInt]) -> Result<RingPoly> {
        self.check_len(vals.len())?;
        let reduced: Vec<BigUint> = vals.iter().map(|x| self.reduce_signed(x)).collect();
        self.from_biguints(&reduced)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len > self.degree() {
            Err(Error::param(format!("{len} coefficients exceed ring degree {}", self.degree())))
        } else {
            Ok(())
        }
    }

    /// `sum_k weights[k] * polys[k]`, weights given as arbitrary integers.
    pub fn lincomb(&self, polys: &[&RingPoly], weights: &[BigUint]) -> Result<RingPoly> {
        if polys.len() != weights.len() {
            return Err(Error::param("lincomb: polynomial and weight counts differ"));
        }
        for p in polys {
            self.ensure_same(&p.ring)?;
        }
        ops::count_scalar_mults(polys.len() as u64);
        let n = self.degree();
        match self.word() {
            Some(m) => {
                let q = BigUint::from(m.q());
                let w: Vec<u64> = weights.iter().map(|x| (x % &q).to_u64().expect("reduced")).collect();
                let terms: Vec<&[u64]> = polys.iter().map(|p| p.words().expect("word ring")).collect();
                let mut out = vec![0u64; n];
                arith::lincomb(m, &mut out, &terms, &w);
                Ok(RingPoly::from_parts(self.clone(), Coeffs::Word(out)))
            }
            None => {
                let mut acc = vec![BigUint::zero(); n];
                for (p, w) in polys.iter().zip(weights) {
                    let w = w % self.modulus();
                    if w.is_zero() {
                        continue;
                    }
                    for (a, x) in acc.iter_mut().zip(p.bigs().expect("big ring")) {
                        *a += x * &w;
                    }
                }
                for a in acc.iter_mut() {
                    *a %= self.modulus();
                }
                Ok(RingPoly::from_parts(self.clone(), Coeffs::Big(acc)))
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub(crate) enum Coeffs {
    Word(Vec<u64>),
    Big(Vec<BigUint>),
}

/// An element of a [`Ring`].
#[derive(Clone, PartialEq, Eq)]
pub struct RingPoly {
    ring: Ring,
    coeffs: Coeffs,
}

impl fmt::Debug for RingPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown: Vec<String> = (0..self.ring.degree().min(8)).map(|i| self.coeff(i).to_string()).collect();
        let more = if self.ring.degree() > 8 { ", .." } else { "" };
        write!(f, "RingPoly[{:?}]([{}{}])", self.ring, shown.join(", "), more)
    }
}

impl RingPoly {
    pub(crate) fn from_parts(ring: Ring, coeffs: Coeffs) -> RingPoly {
        RingPoly { ring, coeffs }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn degree(&self) -> usize {
        self.ring.degree()
    }

    /// Word coefficients, when the ring uses the word representation.
    pub fn words(&self) -> Option<&[u64]> {
        match &self.coeffs {
            Coeffs::Word(v) => Some(v),
            Coeffs::Big(_) => None,
        }
    }

    fn bigs(&self) -> Option<&[BigUint]> {
        match &self.coeffs {
            Coeffs::Big(v) => Some(v),
            Coeffs::Word(_) => None,
        }
    }

    pub fn coeff(&self, i: usize) -> BigUint {
        match &self.coeffs {
            Coeffs::Word(v) => BigUint::from(v[i]),
            Coeffs::Big(v) => v[i].clone(),
        }
    }

    pub fn to_biguints(&self) -> Vec<BigUint> {
        (0..self.degree()).map(|i| self.coeff(i)).collect()
    }

    fn set_coeff(&mut self, i: usize, x: &BigUint) {
        let x = x % self.ring.modulus();
        match &mut self.coeffs {
            Coeffs::Word(v) => v[i] = x.to_u64().expect("reduced"),
            Coeffs::Big(v) => v[i] = x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.coeffs {
            Coeffs::Word(v) => v.iter().all(|&x| x == 0),
            Coeffs::Big(v) => v.iter().all(Zero::is_zero),
        }
    }

    /// Centered lift of coefficient `i`: `c` if `2c <= Q`, else `c - Q`.
    pub fn centered(&self, i: usize) -> BigInt {
        let c = self.coeff(i);
        if &c * 2u32 <= *self.ring.modulus() {
            BigInt::from(c)
        } else {
            BigInt::from(c) - BigInt::from(self.ring.modulus().clone())
        }
    }

    /// Centered lifts as machine integers, for word rings.
    pub fn centered_i64s(&self) -> Option<Vec<i64>> {
        let q = self.ring.modulus_u64()?;
        let v = self.words()?;
        Some(v.iter().map(|&c| if 2 * c <= q { c as i64 } else { c as i64 - q as i64 }).collect())
    }

    pub fn inf_norm(&self) -> SignedNorm {
        match (&self.coeffs, self.ring.modulus_u64()) {
            (Coeffs::Word(v), Some(q)) => {
                let m = v.iter().map(|&c| if 2 * c <= q { c } else { q - c }).max().unwrap_or(0);
                SignedNorm(BigUint::from(m))
            }
            _ => {
                let q = self.ring.modulus();
                let m = self
                    .to_biguints()
                    .into_iter()
                    .map(|c| if &c * 2u32 <= *q { c } else { q - c })
                    .max()
                    .unwrap_or_default();
                SignedNorm(m)
            }
        }
    }

    fn zip_with(
        &self,
        other: &RingPoly,
        word: impl Fn(&WordMod, u64, u64) -> u64,
        big: impl Fn(&BigUint, &BigUint, &BigUint) -> BigUint,
    ) -> Result<RingPoly> {
        self.ring.ensure_same(&other.ring)?;
        let coeffs = match (&self.coeffs, &other.coeffs, self.ring.word()) {
            (Coeffs::Word(a), Coeffs::Word(b), Some(m)) => {
                Coeffs::Word(a.iter().zip(b).map(|(&x, &y)| word(m, x, y)).collect())
            }
            (Coeffs::Big(a), Coeffs::Big(b), None) => {
                let q = self.ring.modulus();
                Coeffs::Big(a.iter().zip(b).map(|(x, y)| big(q, x, y)).collect())
            }
            _ => unreachable!("representation follows the ring"),
        };
        Ok(RingPoly::from_parts(self.ring.clone(), coeffs))
    }

    pub fn add(&self, other: &RingPoly) -> Result<RingPoly> {
        self.zip_with(other, |m, a, b| m.add(a, b), |q, a, b| (a + b) % q)
    }

    pub fn sub(&self, other: &RingPoly) -> Result<RingPoly> {
        self.zip_with(other, |m, a, b| m.sub(a, b), |q, a, b| (a + q - b) % q)
    }

    pub fn add_assign(&mut self, other: &RingPoly) -> Result<()> {
        self.ring.ensure_same(&other.ring)?;
        match (&mut self.coeffs, &other.coeffs, self.ring.word()) {
            (Coeffs::Word(a), Coeffs::Word(b), Some(m)) => {
                for (x, &y) in a.iter_mut().zip(b) {
                    *x = m.add(*x, y);
                }
            }
            (Coeffs::Big(a), Coeffs::Big(b), None) => {
                let q = self.ring.modulus();
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                    if *x >= *q {
                        *x -= q;
                    }
                }
            }
            _ => unreachable!("representation follows the ring"),
        }
        Ok(())
    }

    pub fn neg(&self) -> RingPoly {
        let coeffs = match (&self.coeffs, self.ring.word()) {
            (Coeffs::Word(a), Some(m)) => Coeffs::Word(a.iter().map(|&x| m.neg(x)).collect()),
            (Coeffs::Big(a), _) => {
                let q = self.ring.modulus();
                Coeffs::Big(a.iter().map(|x| if x.is_zero() { x.clone() } else { q - x }).collect())
            }
            _ => unreachable!("representation follows the ring"),
        };
        RingPoly::from_parts(self.ring.clone(), coeffs)
    }

    pub fn scalar_mul_u64(&self, c: u64) -> RingPoly {
        self.scalar_mul(&BigUint::from(c))
    }

    pub fn scalar_mul(&self, c: &BigUint) -> RingPoly {
        let c = self.ring.reduce(c);
        let coeffs = match (&self.coeffs, self.ring.word()) {
            (Coeffs::Word(a), Some(m)) => {
                let w = c.to_u64().expect("reduced");
                let ws = m.shoup(w);
                Coeffs::Word(a.iter().map(|&x| m.mul_shoup(x, w, ws)).collect())
            }
            (Coeffs::Big(a), _) => {
                let q = self.ring.modulus();
                Coeffs::Big(a.iter().map(|x| x * &c % q).collect())
            }
            _ => unreachable!("representation follows the ring"),
        };
        RingPoly::from_parts(self.ring.clone(), coeffs)
    }

    pub fn mul(&self, other: &RingPoly) -> Result<RingPoly> {
        self.ring.ensure_same(&other.ring)?;
        ops::count_ring_mult();
        let n = self.degree();
        let coeffs = match (&self.coeffs, &other.coeffs) {
            (Coeffs::Word(a), Coeffs::Word(b)) => {
                let m = self.ring.word().expect("word ring");
                if let Some(ntt) = self.ring.ntt() {
                    Coeffs::Word(ntt.multiply(a, b))
                } else if n >= 16 {
                    let big = kronecker(&to_big(a), &to_big(b), self.ring.modulus());
                    Coeffs::Word(big.iter().map(|x| x.to_u64().expect("reduced")).collect())
                } else {
                    Coeffs::Word(schoolbook_word(m, a, b))
                }
            }
            (Coeffs::Big(a), Coeffs::Big(b)) => {
                if n >= 16 {
                    Coeffs::Big(kronecker(a, b, self.ring.modulus()))
                } else {
                    Coeffs::Big(schoolbook_big(a, b, self.ring.modulus()))
                }
            }
            _ => unreachable!("representation follows the ring"),
        };
        Ok(RingPoly::from_parts(self.ring.clone(), coeffs))
    }

    /// Re-reads the least non-negative residues of `self` in another ring of
    /// the same degree, reducing by the target modulus.
    pub fn lift_into(&self, target: &Ring) -> Result<RingPoly> {
        if target.degree() != self.degree() {
            return Err(Error::param("lift_into: degree mismatch"));
        }
        match (self.words(), target.word()) {
            (Some(v), Some(m)) => {
                let q = m.q();
                let out = v.iter().map(|&x| x % q).collect();
                Ok(RingPoly::from_parts(target.clone(), Coeffs::Word(out)))
            }
            _ => target.from_biguints(&self.to_biguints()),
        }
    }
}

fn to_big(v: &[u64]) -> Vec<BigUint> {
    v.iter().map(|&x| BigUint::from(x)).collect()
}

/// Reference negacyclic product: `O(M^2)` with explicit `x^M = -1` folding.
pub fn schoolbook_negacyclic(a: &[BigUint], b: &[BigUint], q: &BigUint) -> Vec<BigUint> {
    schoolbook_big(a, b, q)
}

fn schoolbook_big(a: &[BigUint], b: &[BigUint], q: &BigUint) -> Vec<BigUint> {
    let n = a.len();
    let mut pos = vec![BigUint::zero(); n];
    let mut neg = vec![BigUint::zero(); n];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            let p = x * y;
            if i + j < n {
                pos[i + j] += p;
            } else {
                neg[i + j - n] += p;
            }
        }
    }
    pos.into_iter()
        .zip(neg)
        .map(|(p, m)| {
            let m = m % q;
            (p % q + q - m) % q
        })
        .collect()
}

fn schoolbook_word(m: &WordMod, a: &[u64], b: &[u64]) -> Vec<u64> {
    let n = a.len();
    let mut out = vec![0u64; n];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            let p = m.mul(x, y);
            if i + j < n {
                out[i + j] = m.add(out[i + j], p);
            } else {
                out[i + j - n] = m.sub(out[i + j - n], p);
            }
        }
    }
    out
}

/// Negacyclic product by Kronecker substitution: pack each operand into one
/// big integer, multiply once, and unpack the slots.
fn kronecker(a: &[BigUint], b: &[BigUint], q: &BigUint) -> Vec<BigUint> {
    let n = a.len();
    let qbits = (q - 1u32).bits().max(1);
    let slot = (2 * qbits + u64::from(n.trailing_zeros()) + 2) as usize;
    let pa = pack(a, slot);
    let pb = pack(b, slot);
    let prod = (pa * pb).to_u32_digits();
    (0..n)
        .map(|k| {
            let lo = unpack(&prod, k * slot, slot);
            let hi = unpack(&prod, (k + n) * slot, slot);
            (lo % q + q - hi % q) % q
        })
        .collect()
}

fn pack(vals: &[BigUint], slot: usize) -> BigUint {
    let total_bits = vals.len() * slot + 32;
    let mut digits = vec![0u32; total_bits.div_ceil(32)];
    for (i, v) in vals.iter().enumerate() {
        let mut bit = i * slot;
        for d in v.to_u32_digits() {
            let (w, s) = (bit / 32, bit % 32);
            digits[w] |= d << s;
            if s != 0 {
                digits[w + 1] |= d >> (32 - s);
            }
            bit += 32;
        }
    }
    BigUint::new(digits)
}

fn unpack(digits: &[u32], start: usize, len: usize) -> BigUint {
    let nwords = len.div_ceil(32);
    let mut out = vec![0u32; nwords];
    for (k, o) in out.iter_mut().enumerate() {
        let bit = start + 32 * k;
        let (w, s) = (bit / 32, bit % 32);
        let lo = digits.get(w).copied().unwrap_or(0);
        let hi = digits.get(w + 1).copied().unwrap_or(0);
        *o = if s == 0 { lo } else { (lo >> s) | (hi << (32 - s)) };
    }
    let extra = nwords * 32 - len;
    if extra > 0 {
        let last = out.last_mut().expect("non-empty");
        *last &= u32::MAX >> extra;
    }
    BigUint::new(out)
}
