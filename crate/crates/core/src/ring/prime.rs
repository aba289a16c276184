use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Primality test; deterministic below 2^64, strong probable-prime above.
pub fn is_prime(n: &BigUint) -> bool {
    match n.to_u64() {
        Some(x) => num_prime::nt_funcs::is_prime64(x),
        None => num_prime::nt_funcs::is_prime(n, None).probably(),
    }
}

/// Smallest prime `p > bound` with `p ≡ 1 (mod step)`.
pub fn smallest_prime_above(bound: &BigUint, step: &BigUint) -> BigUint {
    assert!(!step.is_zero(), "step must be positive");
    let mut p = bound + 1u32;
    let r = (&p - 1u32) % step;
    if !r.is_zero() {
        p += step - r;
    }
    if step.is_one() {
        // Plain search: skip even candidates once past 2.
        if p <= BigUint::from(2u32) {
            return BigUint::from(2u32);
        }
        if (&p % 2u32).is_zero() {
            p += 1u32;
        }
        while !is_prime(&p) {
            p += 2u32;
        }
        return p;
    }
    while !is_prime(&p) {
        p += step;
    }
    p
}
