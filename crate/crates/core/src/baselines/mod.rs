//! Noisy-share baselines: each party perturbs what it submits with bounded
//! noise, and the aggregator combines the perturbed shares.
//!
//! * [`Replicated`]: replicated sharing with `{0,1}` recovery weights, one
//!   round, error at most `C(N, T-1)·B_sm`.
//! * [`Type1`]: Shamir sharing with noise pre-scaled by `N!` so that
//!   Lagrange-weighted noise stays integral, one round, error at most
//!   `N·(N!)^3·B_sm` over a modulus of that order.
//! * [`Type2`]: Shamir sharing plus a preliminary round in which every party
//!   shares fresh noise, two rounds, error at most `N·B_sm`.

mod replicated;
mod type1;
mod type2;

pub use replicated::{binomial, Replicated, ReplicatedShare};
pub use type1::{factorial, Type1};
pub use type2::Type2;

use crate::shamir::ShamirShare;

/// The aggregator's intake of one round: the first `T` arrivals, or all.
#[derive(Debug, Default)]
pub(crate) struct Intake {
    pub(crate) from: Vec<usize>,
    pub(crate) shares: Vec<ShamirShare>,
}

impl Intake {
    pub(crate) fn offer(&mut self, from: usize, share: ShamirShare, first_t: Option<usize>) {
        if first_t.is_some_and(|t| self.shares.len() >= t) {
            return;
        }
        self.from.push(from);
        self.shares.push(share);
    }

    pub(crate) fn sorted_from(&self) -> Vec<usize> {
        let mut v = self.from.clone();
        v.sort_unstable();
        v
    }
}
