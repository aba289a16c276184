//! Single-word modular kernels for moduli below 2^62.

/// Largest modulus handled by the word kernels. Keeps 4q below 2^64.
pub const WORD_LIMIT: u64 = 1 << 62;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WordMod {
    q: u64,
    shift: u32,
    mu: u64,
}

impl WordMod {
    pub fn new(q: u64) -> Self {
        assert!((2..WORD_LIMIT).contains(&q), "word modulus out of range");
        let k = 64 - q.leading_zeros();
        let mu = ((1u128 << (2 * k)) / q as u128) as u64;
        WordMod { q, shift: k, mu }
    }

    #[inline(always)]
    pub fn q(&self) -> u64 {
        self.q
    }

    #[inline(always)]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline(always)]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline(always)]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    /// Barrett reduction of `x < q^2`.
    #[inline(always)]
    pub fn reduce_u128(&self, x: u128) -> u64 {
        let k = self.shift;
        let t = (x >> (k - 1)) as u64;
        let qh = ((t as u128 * self.mu as u128) >> (k + 1)) as u64;
        let mut r = (x - qh as u128 * self.q as u128) as u64;
        while r >= self.q {
            r -= self.q;
        }
        r
    }

    #[inline(always)]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce_u128(a as u128 * b as u128)
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.q;
        base %= self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Inverse modulo a prime `q`.
    pub fn inv(&self, a: u64) -> Option<u64> {
        let a = a % self.q;
        if a == 0 {
            return None;
        }
        let r = self.pow(a, self.q - 2);
        (self.mul(r, a) == 1).then_some(r)
    }

    /// Precomputed Shoup constant for multiplying by `w < q`.
    #[inline(always)]
    pub fn shoup(&self, w: u64) -> u64 {
        (((w as u128) << 64) / self.q as u128) as u64
    }

    /// `a * w mod q` in `[0, 2q)` given the Shoup constant of `w`.
    #[inline(always)]
    pub fn mul_shoup_lazy(&self, a: u64, w: u64, w_shoup: u64) -> u64 {
        let qh = ((a as u128 * w_shoup as u128) >> 64) as u64;
        a.wrapping_mul(w).wrapping_sub(qh.wrapping_mul(self.q))
    }

    #[inline(always)]
    pub fn mul_shoup(&self, a: u64, w: u64, w_shoup: u64) -> u64 {
        let r = self.mul_shoup_lazy(a, w, w_shoup);
        if r >= self.q {
            r - self.q
        } else {
            r
        }
    }
}

/// Number of `(q-1)^2` products that fit in a `u64` accumulator.
pub fn lazy_u64_terms(q: u64) -> u64 {
    let p = (q as u128 - 1) * (q as u128 - 1);
    if p == 0 {
        u64::MAX
    } else {
        (u64::MAX as u128 / p).min(u64::MAX as u128) as u64
    }
}

/// Number of `(q-1)^2` products that fit in a `u128` accumulator.
pub fn lazy_u128_terms(q: u64) -> u64 {
    let p = (q as u128 - 1) * (q as u128 - 1);
    if p == 0 {
        u64::MAX
    } else {
        (u128::MAX / p).min(u64::MAX as u128) as u64
    }
}

/// `out = sum_k w_k * terms_k mod q`, all inputs reduced.
pub fn lincomb(m: &WordMod, out: &mut [u64], terms: &[&[u64]], weights: &[u64]) {
    debug_assert_eq!(terms.len(), weights.len());
    let q = m.q();
    let n = out.len();
    let per_u64 = lazy_u64_terms(q) as usize;
    if per_u64 >= 2 {
        // Products fit with room to spare: accumulate in u64, reduce per block.
        let mut acc = vec![0u64; n];
        for (block_t, block_w) in terms.chunks(per_u64 - 1).zip(weights.chunks(per_u64 - 1)) {
            for (t, &w) in block_t.iter().zip(block_w) {
                if w == 0 {
                    continue;
                }
                for (a, &x) in acc.iter_mut().zip(t.iter()) {
                    *a += x * w;
                }
            }
            for a in acc.iter_mut() {
                *a %= q;
            }
        }
        out.copy_from_slice(&acc);
        return;
    }
    let per_u128 = (lazy_u128_terms(q) as usize).max(2);
    let mut acc = vec![0u128; n];
    for (block_t, block_w) in terms.chunks(per_u128 - 1).zip(weights.chunks(per_u128 - 1)) {
        for (t, &w) in block_t.iter().zip(block_w) {
            if w == 0 {
                continue;
            }
            let w = w as u128;
            for (a, &x) in acc.iter_mut().zip(t.iter()) {
                *a += x as u128 * w;
            }
        }
        for a in acc.iter_mut() {
            *a %= q as u128;
        }
    }
    for (o, a) in out.iter_mut().zip(acc) {
        *o = a as u64;
    }
}
