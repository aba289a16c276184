//! The approximate secret sharing interface shared by ATASSES and the
//! baselines.

use std::collections::BTreeMap;
use std::time::Duration;

use num_bigint::BigUint;
use rand_chacha::ChaCha20Rng;

use crate::error::Result;
use crate::ring::{Ring, RingPoly};
use crate::sim::{DropoutSchedule, SessionResult, SessionTimings, SimConfig, Topology, Transcript};

/// Options for one approximate-recovery session.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecOptions {
    pub topology: Topology,
    /// Aggregator uses only the first `T` arrivals of each round.
    pub first_t_only: bool,
    pub retain_payloads: bool,
}

impl Default for RecOptions {
    fn default() -> Self {
        RecOptions { topology: Topology::Relay, first_t_only: true, retain_payloads: false }
    }
}

/// Noise each party contributed, in the scheme's own layout. For the
/// Shamir-based schemes this is one polynomial per message polynomial; the
/// replicated scheme logs one polynomial per piece, in piece order.
pub type NoiseLog = BTreeMap<usize, Vec<RingPoly>>;

pub struct SessionReport {
    pub outcome: Result<Vec<RingPoly>>,
    pub transcript: Transcript,
    pub timings: SessionTimings,
    /// Participants of each round reached, in arrival order.
    pub participants: Vec<Vec<usize>>,
    /// Parties whose contributions the aggregator used, per round.
    pub used: Vec<Vec<usize>>,
    pub noise: NoiseLog,
    /// Largest error measured inside an intermediate ciphertext, if any.
    pub inner_error: Option<BigUint>,
}

impl SessionReport {
    pub(crate) fn from_session(
        result: SessionResult<Vec<RingPoly>>,
        used: Vec<Vec<usize>>,
        noise: NoiseLog,
        inner_error: Option<BigUint>,
    ) -> Self {
        SessionReport {
            outcome: result.outcome,
            transcript: result.transcript,
            timings: result.timings,
            participants: result.participants,
            used,
            noise,
            inner_error,
        }
    }

    pub fn compute_time(&self) -> Duration {
        self.timings.compute()
    }
}

pub(crate) fn sim_config(opts: &RecOptions, seed: u64) -> SimConfig {
    SimConfig { topology: opts.topology, retain_payloads: opts.retain_payloads, seed }
}

/// Secret sharing with an approximate recovery protocol: recovery returns
/// `m' = m + n` with `n` drawn from a bounded set and never reveals `m`
/// exactly.
pub trait ApproxSs {
    type Share: Clone + std::fmt::Debug;

    fn name(&self) -> &'static str;
    fn parties(&self) -> usize;
    fn threshold(&self) -> usize;

    /// Ring of the shared message polynomials.
    fn message_ring(&self) -> &Ring;

    /// Bound on `‖m' - m‖` (centered, per coefficient).
    fn error_bound(&self) -> BigUint;

    /// Communication rounds of the recovery protocol.
    fn rounds(&self) -> usize;

    /// One share per party, in party order.
    fn share(&self, msg: &[RingPoly], rng: &mut ChaCha20Rng) -> Result<Vec<Self::Share>>;

    /// Share of the sum of two secrets.
    fn add(&self, a: &Self::Share, b: &Self::Share) -> Result<Self::Share>;

    /// From a share of a single-polynomial secret `s`, a share of the
    /// multi-polynomial secret `[scale_c·s + offset_c]_c`.
    fn affine(&self, share: &Self::Share, scales: &[RingPoly], offsets: &[RingPoly]) -> Result<Self::Share>;

    /// Exact reconstruction from at least `T` shares.
    fn exact_rec(&self, shares: &[&Self::Share]) -> Result<Vec<RingPoly>>;

    /// Runs the approximate-recovery protocol in the simulator.
    /// `shares[i - 1]` is party `i`'s share.
    fn approx_rec(
        &self,
        shares: &[Self::Share],
        schedule: &mut DropoutSchedule,
        seed: u64,
        opts: &RecOptions,
    ) -> Result<SessionReport>;
}

/// Concatenates the coefficients of `polys` and re-splits them into
/// polynomials of `target`, zero-padding the tail.
pub fn rechunk(polys: &[RingPoly], len: usize, target: &Ring) -> Result<Vec<RingPoly>> {
    let d = target.degree();
    if polys.iter().all(|p| p.degree() == d) && len == polys.len() * d {
        return polys.iter().map(|p| p.lift_into(target)).collect();
    }
    if target.word().is_some() && polys.iter().all(|p| p.words().is_some()) {
        let mut words: Vec<u64> = polys.iter().flat_map(|p| p.words().expect("word ring").iter().copied()).collect();
        words.truncate(len);
        return words.chunks(d).map(|c| target.from_u64s(c)).collect();
    }
    let coeffs = flatten(polys, len);
    coeffs
        .chunks(target.degree())
        .map(|c| target.from_biguints(c))
        .collect::<Result<Vec<_>>>()
}

/// The first `len` coefficients of the concatenation of `polys`.
pub fn flatten(polys: &[RingPoly], len: usize) -> Vec<BigUint> {
    let mut out: Vec<BigUint> = polys.iter().flat_map(RingPoly::to_biguints).collect();
    out.truncate(len);
    out
}

/// Checks that `shares` holds one share per party.
pub(crate) fn check_share_count<T>(shares: &[T], n: usize) -> Result<()> {
    if shares.len() != n {
        return Err(crate::Error::param(format!("expected {n} shares, got {}", shares.len())));
    }
    Ok(())
}
