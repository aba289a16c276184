//! Negacyclic number-theoretic transform over a word prime `q ≡ 1 (mod 2M)`.

use super::arith::WordMod;

#[derive(Debug)]
pub struct Ntt {
    n: usize,
    m: WordMod,
    psi_rev: Vec<u64>,
    psi_rev_shoup: Vec<u64>,
    psi_inv_rev: Vec<u64>,
    psi_inv_rev_shoup: Vec<u64>,
    n_inv: u64,
    n_inv_shoup: u64,
}

fn bit_reverse(x: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        x.reverse_bits() >> (usize::BITS - bits)
    }
}

/// Finds a primitive `2n`-th root of unity modulo the prime `q`.
fn find_psi(m: &WordMod, n: usize) -> Option<u64> {
    let q = m.q();
    let order = 2 * n as u64;
    if (q - 1) % order != 0 {
        return None;
    }
    let cofactor = (q - 1) / order;
    (2..q.min(1 << 20)).find_map(|g| {
        let psi = m.pow(g, cofactor);
        // With n a power of two, psi^n = -1 forces order exactly 2n.
        (m.pow(psi, n as u64) == q - 1).then_some(psi)
    })
}

impl Ntt {
    /// Builds tables when `q` is a prime supporting the transform, else `None`.
    pub fn new(q: u64, n: usize) -> Option<Ntt> {
        if n < 2 || !n.is_power_of_two() || !num_prime::nt_funcs::is_prime64(q) {
            return None;
        }
        let m = WordMod::new(q);
        let psi = find_psi(&m, n)?;
        let psi_inv = m.inv(psi)?;
        let bits = n.trailing_zeros();
        let mut psi_rev = vec![0; n];
        let mut psi_inv_rev = vec![0; n];
        let (mut p, mut pi) = (1u64, 1u64);
        for i in 0..n {
            let r = bit_reverse(i, bits);
            psi_rev[r] = p;
            psi_inv_rev[r] = pi;
            p = m.mul(p, psi);
            pi = m.mul(pi, psi_inv);
        }
        let n_inv = m.inv(n as u64 % q)?;
        Some(Ntt {
            n,
            m,
            psi_rev_shoup: psi_rev.iter().map(|&w| m.shoup(w)).collect(),
            psi_inv_rev_shoup: psi_inv_rev.iter().map(|&w| m.shoup(w)).collect(),
            psi_rev,
            psi_inv_rev,
            n_inv,
            n_inv_shoup: m.shoup(n_inv),
        })
    }

    pub fn forward(&self, a: &mut [u64]) {
        debug_assert_eq!(a.len(), self.n);
        let m = &self.m;
        let mut t = self.n;
        let mut len = 1;
        while len < self.n {
            t >>= 1;
            for i in 0..len {
                let w = self.psi_rev[len + i];
                let ws = self.psi_rev_shoup[len + i];
                let j1 = 2 * i * t;
                let (lo, hi) = a[j1..j1 + 2 * t].split_at_mut(t);
                for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                    let u = *x;
                    let v = m.mul_shoup(*y, w, ws);
                    *x = m.add(u, v);
                    *y = m.sub(u, v);
                }
            }
            len <<= 1;
        }
    }

    pub fn inverse(&self, a: &mut [u64]) {
        debug_assert_eq!(a.len(), self.n);
        let m = &self.m;
        let mut t = 1;
        let mut len = self.n;
        while len > 1 {
            let h = len >> 1;
            for i in 0..h {
                let w = self.psi_inv_rev[h + i];
                let ws = self.psi_inv_rev_shoup[h + i];
                let j1 = 2 * i * t;
                let (lo, hi) = a[j1..j1 + 2 * t].split_at_mut(t);
                for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                    let u = *x;
                    let v = *y;
                    *x = m.add(u, v);
                    *y = m.mul_shoup(m.sub(u, v), w, ws);
                }
            }
            t <<= 1;
            len = h;
        }
        for x in a.iter_mut() {
            *x = m.mul_shoup(*x, self.n_inv, self.n_inv_shoup);
        }
    }

    /// Negacyclic product of two reduced coefficient vectors.
    pub fn multiply(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut fa = a.to_vec();
        let mut fb = b.to_vec();
        self.forward(&mut fa);
        self.forward(&mut fb);
        for (x, y) in fa.iter_mut().zip(&fb) {
            *x = self.m.mul(*x, *y);
        }
        self.inverse(&mut fa);
        fa
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schoolbook(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
        let n = a.len();
        let mut out = vec![0i128; n];
        for i in 0..n {
            for j in 0..n {
                let p = (a[i] as i128 * b[j] as i128) % q as i128;
                if i + j < n {
                    out[i + j] += p;
                } else {
                    out[i + j - n] -= p;
                }
            }
        }
        out.iter().map(|&x| x.rem_euclid(q as i128) as u64).collect()
    }

    #[test]
    fn roundtrip_and_product() {
        for &(q, n) in &[(17u64, 8usize), (257, 16), (65537, 64), (786433, 256)] {
            let ntt = Ntt::new(q, n).expect("ntt-friendly");
            let a: Vec<u64> = (0..n as u64).map(|i| (i * 7 + 3) % q).collect();
            let b: Vec<u64> = (0..n as u64).map(|i| (i * i + 11) % q).collect();
            let mut c = a.clone();
            ntt.forward(&mut c);
            ntt.inverse(&mut c);
            assert_eq!(c, a);
            assert_eq!(ntt.multiply(&a, &b), schoolbook(&a, &b, q));
        }
    }

    #[test]
    fn rejects_unfriendly_moduli() {
        assert!(Ntt::new(17, 16).is_none());
        assert!(Ntt::new(15, 2).is_none());
    }
}
