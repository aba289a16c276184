//! Byte encoding of protocol messages.
//!
//! A polynomial is a `u32` little-endian coefficient count followed by each
//! coefficient in little-endian order using the minimal byte width of its
//! modulus. Lists are prefixed by a `u32` element count. Byte accounting in
//! the transcript uses [`Wire::encoded_len`], which always equals the length
//! of [`Wire::encode`].

use num_bigint::BigUint;

use crate::cipher::RlweCiphertext;
use crate::error::{Error, Result};
use crate::ring::{byte_width, Ring, RingPoly};
use crate::shamir::{LagrangeSet, ShamirShare};

pub trait Wire {
    fn encoded_len(&self) -> usize;
    fn encode_into(&self, out: &mut Vec<u8>);

    fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        self.encode_into(&mut out);
        out
    }
}

fn put_u32(out: &mut Vec<u8>, x: usize) {
    out.extend_from_slice(&u32::try_from(x).expect("length fits in u32").to_le_bytes());
}

fn put_uint(out: &mut Vec<u8>, x: &BigUint, width: usize) {
    let mut bytes = x.to_bytes_le();
    bytes.resize(width, 0);
    out.extend_from_slice(&bytes);
}

impl Wire for RingPoly {
    fn encoded_len(&self) -> usize {
        4 + self.degree() * self.ring().byte_width()
    }

    fn encode_into(&self, out: &mut Vec<u8>) {
        let width = self.ring().byte_width();
        put_u32(out, self.degree());
        match self.words() {
            Some(words) => {
                for w in words {
                    out.extend_from_slice(&w.to_le_bytes()[..width]);
                }
            }
            None => {
                for c in self.to_biguints() {
                    put_uint(out, &c, width);
                }
            }
        }
    }
}

impl<T: Wire> Wire for Vec<T> {
    fn encoded_len(&self) -> usize {
        4 + self.iter().map(Wire::encoded_len).sum::<usize>()
    }

    fn encode_into(&self, out: &mut Vec<u8>) {
        put_u32(out, self.len());
        for item in self {
            item.encode_into(out);
        }
    }
}

impl Wire for ShamirShare {
    fn encoded_len(&self) -> usize {
        4 + self.payload.encoded_len()
    }

    fn encode_into(&self, out: &mut Vec<u8>) {
        put_u32(out, self.point as usize);
        self.payload.encode_into(out);
    }
}

impl Wire for RlweCiphertext {
    fn encoded_len(&self) -> usize {
        self.c0.encoded_len() + self.c1.encoded_len()
    }

    fn encode_into(&self, out: &mut Vec<u8>) {
        self.c0.encode_into(out);
        self.c1.encode_into(out);
    }
}

impl Wire for LagrangeSet {
    fn encoded_len(&self) -> usize {
        4 + self.points().len() * (4 + byte_width(self.modulus()))
    }

    fn encode_into(&self, out: &mut Vec<u8>) {
        let width = byte_width(self.modulus());
        put_u32(out, self.points().len());
        for (p, c) in self.iter() {
            put_u32(out, p as usize);
            put_uint(out, c, width);
        }
    }
}

/// Decodes one polynomial of `ring` from the front of `bytes`, returning it
/// with the number of bytes consumed.
pub fn decode_poly(ring: &Ring, bytes: &[u8]) -> Result<(RingPoly, usize)> {
    let bad = |msg: &str| Error::Parse { line: 0, msg: msg.to_string() };
    let head: [u8; 4] = bytes.get(..4).ok_or_else(|| bad("truncated length"))?.try_into().expect("4 bytes");
    let n = u32::from_le_bytes(head) as usize;
    if n != ring.degree() {
        return Err(bad("coefficient count does not match ring degree"));
    }
    let width = ring.byte_width();
    let body = bytes.get(4..4 + n * width).ok_or_else(|| bad("truncated coefficients"))?;
    let coeffs: Vec<BigUint> = body.chunks(width).map(BigUint::from_bytes_le).collect();
    if coeffs.iter().any(|c| c >= ring.modulus()) {
        return Err(bad("coefficient not reduced"));
    }
    Ok((ring.from_biguints(&coeffs)?, 4 + n * width))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_layout() {
        let r = Ring::new(2, 65537u64).unwrap();
        let p = r.from_u64s(&[1, 65536]).unwrap();
        assert_eq!(p.encode(), vec![2, 0, 0, 0, 1, 0, 0, 0, 0, 1]);
        assert_eq!(p.encoded_len(), 10);
        assert_eq!(decode_poly(&r, &p.encode()).unwrap(), (p, 10));
    }

    #[test]
    fn lengths_match_for_big_moduli() {
        let q = (BigUint::from(1u32) << 100usize) + 277u32;
        let r = Ring::new(4, q).unwrap();
        let p = r.from_u64s(&[u64::MAX, 3]).unwrap();
        assert_eq!(p.encode().len(), p.encoded_len());
        let share = ShamirShare { point: 3, payload: vec![p.clone(), p] };
        assert_eq!(share.encode().len(), share.encoded_len());
        assert_eq!(decode_poly(&r, &share.encode()[8..]).unwrap().0, share.payload[0]);
    }
}
