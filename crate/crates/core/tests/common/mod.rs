#![allow(dead_code)]

use std::collections::BTreeSet;

use atasses::ring::sample_uniform;
use atasses::rng::{derive_rng, label};
use atasses::{Ring, RingPoly};

pub fn random_message(ring: &Ring, width: usize, seed: u64) -> Vec<RingPoly> {
    let mut rng = derive_rng(seed, &[label("test/message")]);
    (0..width).map(|_| sample_uniform(&mut rng, ring)).collect()
}

pub fn diff(a: &[RingPoly], b: &[RingPoly]) -> Vec<RingPoly> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.sub(y).unwrap()).collect()
}

pub fn max_norm(polys: &[RingPoly]) -> u64 {
    polys.iter().map(|p| p.inf_norm().to_u64().unwrap()).max().unwrap_or(0)
}

pub fn sum_polys(ring: &Ring, width: usize, parts: impl IntoIterator<Item = Vec<RingPoly>>) -> Vec<RingPoly> {
    let mut acc = vec![ring.zero(); width];
    for part in parts {
        for (a, p) in acc.iter_mut().zip(&part) {
            a.add_assign(p).unwrap();
        }
    }
    acc
}

/// All subsets of `1..=n`, as sorted sets.
pub fn all_subsets(n: usize) -> Vec<BTreeSet<usize>> {
    (0u32..1 << n).map(|mask| (1..=n).filter(|i| mask & 1 << (i - 1) != 0).collect()).collect()
}

pub fn complement(n: usize, set: &BTreeSet<usize>) -> BTreeSet<usize> {
    (1..=n).filter(|i| !set.contains(i)).collect()
}

pub mod fhe {
    use atasses::atasses::{Atasses, AtassesConfig};
    use atasses::baselines::{binomial, Replicated, Type1, Type2};
    use atasses::thfhe::{OuterParams, ThFhe};
    use atasses::Result;
    use num_bigint::BigUint;

    pub const DEGREE: usize = 256;
    pub const P: u64 = 16;
    pub const B: u64 = 2;
    pub const B_SM: u64 = 1 << 12;
    pub const INNER_DEGREE: usize = 4096;
    pub const INNER_B: u64 = 19;

    pub fn outer(n: usize, c: usize, m_b: BigUint) -> OuterParams {
        OuterParams::search(DEGREE, P, B, n, c, m_b).unwrap()
    }

    pub fn atasses(n: usize, t: usize, c: usize, b_sm: u64) -> Result<ThFhe<Atasses>> {
        let params = outer(n, c, BigUint::from(t as u64 * b_sm));
        let cfg = AtassesConfig::with_search(n, t, params.ring().clone(), INNER_DEGREE, INNER_B, b_sm, 99)?;
        ThFhe::new(params, Atasses::new(cfg))
    }

    pub fn type2(n: usize, t: usize, c: usize, b_sm: u64) -> Result<ThFhe<Type2>> {
        let params = outer(n, c, BigUint::from(n as u64 * b_sm));
        let backend = Type2::new(n, t, params.ring().clone(), b_sm)?;
        ThFhe::new(params, backend)
    }

    pub fn replicated(n: usize, t: usize, c: usize, b_sm: u64) -> Result<ThFhe<Replicated>> {
        let params = outer(n, c, BigUint::from(binomial(n, t - 1)) * b_sm);
        let backend = Replicated::new(n, t, params.ring().clone(), b_sm)?;
        ThFhe::new(params, backend)
    }

    pub fn type1(n: usize, t: usize, c: usize, b_sm: u64) -> Result<ThFhe<Type1>> {
        let f = atasses::baselines::factorial(n);
        let params = outer(n, c, BigUint::from(n) * &f * &f * &f * b_sm);
        let backend = Type1::with_ring(n, t, params.ring().clone(), b_sm)?;
        ThFhe::new(params, backend)
    }
}
