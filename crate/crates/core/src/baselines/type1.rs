use num_bigint::BigUint;
use num_traits::One;
use rand_chacha::ChaCha20Rng;

use super::Intake;
use crate::approx::{check_share_count, sim_config, ApproxSs, NoiseLog, RecOptions, SessionReport};
use crate::error::{Error, Result};
use crate::ring::{prime, sample_bounded, Ring, RingPoly};
use crate::rng::{derive_rng, label};
use crate::shamir::{self, ShamirShare};
use crate::sim::{run_session, AggStep, Delivery, DropoutSchedule, Node, Outgoing, Protocol};

pub const KIND_NOISY_SHARE: &str = "noisy_share";

pub fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

/// Integerized-Lagrange baseline. Party `i` submits `s_i + N!·u_i` with
/// `‖u_i‖ <= B_sm`. Standard Lagrange recovery then yields
/// `m + Σ λ_i·u_i`, where every `λ_i = N!·L_i` is an integer with
/// `|λ_i| <= (N!)^2`, so the error stays below `N·(N!)^3·B_sm`.
#[derive(Debug, Clone)]
pub struct Type1 {
    n: usize,
    t: usize,
    ring: Ring,
    b_sm: u64,
    scale: BigUint,
}

impl Type1 {
    /// `2·N·(N!)^3·B_sm`, the smallest admissible modulus minus one.
    pub fn modulus_floor(n: usize, b_sm: u64) -> BigUint {
        let f = factorial(n);
        BigUint::from(2u32) * n as u64 * &f * &f * &f * b_sm
    }

    /// Smallest prime above [`Type1::modulus_floor`] and above `N`.
    pub fn smallest_modulus(n: usize, b_sm: u64) -> BigUint {
        let floor = Self::modulus_floor(n, b_sm).max(BigUint::from(n));
        prime::smallest_prime_above(&floor, &BigUint::one())
    }

    /// Configuration over the smallest admissible prime modulus.
    pub fn new(n: usize, t: usize, degree: usize, b_sm: u64) -> Result<Self> {
        Self::with_ring(n, t, Ring::new(degree, Self::smallest_modulus(n, b_sm))?, b_sm)
    }

    /// Configuration over a caller-chosen prime modulus above the floor.
    pub fn with_ring(n: usize, t: usize, ring: Ring, b_sm: u64) -> Result<Self> {
        if t == 0 || t > n {
            return Err(Error::param(format!("threshold {t} must lie in [1, {n}]")));
        }
        let floor = Self::modulus_floor(n, b_sm);
        if *ring.modulus() <= floor {
            return Err(Error::param(format!("modulus {} does not exceed 2·N·(N!)^3·B_sm = {floor}", ring.modulus())));
        }
        shamir::validate_points(&shamir::party_points(n), ring.modulus())?;
        Ok(Type1 { n, t, ring, b_sm, scale: factorial(n) })
    }
}

struct Session<'a> {
    cfg: &'a Type1,
    shares: &'a [ShamirShare],
    seed: u64,
    first_t: Option<usize>,
    noise: NoiseLog,
    intake: Intake,
}

impl Protocol for Session<'_> {
    type Msg = ShamirShare;
    type Output = Vec<RingPoly>;

    fn parties(&self) -> usize {
        self.cfg.n
    }

    fn threshold(&self) -> usize {
        self.cfg.t
    }

    fn rounds(&self) -> usize {
        1
    }

    fn party_round(&mut self, i: usize, _round: usize) -> Result<Vec<Outgoing<ShamirShare>>> {
        let mut rng = derive_rng(self.seed, &[label("type1/party"), i as u64]);
        let own = &self.shares[i - 1];
        let mut payload = Vec::with_capacity(own.payload.len());
        let mut noise = Vec::with_capacity(own.payload.len());
        for s in &own.payload {
            let n = sample_bounded(&mut rng, &self.cfg.ring, self.cfg.b_sm)?.scalar_mul(&self.cfg.scale);
            payload.push(s.add(&n)?);
            noise.push(n);
        }
        self.noise.insert(i, noise);
        Ok(vec![Outgoing::to_aggregator(KIND_NOISY_SHARE, ShamirShare { point: own.point, payload })])
    }

    fn party_receive(&mut self, _: usize, _: usize, _: Node, _: Delivery, _: &'static str, _: ShamirShare) -> Result<()> {
        Err(Error::ProtocolState("one-round protocol expects no party messages".into()))
    }

    fn aggregator_receive(&mut self, _round: usize, from: usize, _kind: &'static str, msg: ShamirShare) -> Result<()> {
        self.intake.offer(from, msg, self.first_t);
        Ok(())
    }

    fn aggregator_round(&mut self, _round: usize) -> Result<AggStep<ShamirShare, Vec<RingPoly>>> {
        let got = self.intake.shares.len();
        if got < self.cfg.t {
            return Err(Error::InsufficientParticipants { round: 1, needed: self.cfg.t, got });
        }
        let refs: Vec<&ShamirShare> = self.intake.shares.iter().collect();
        Ok(AggStep::Finish(shamir::rec(&refs, self.cfg.t)?))
    }
}

impl ApproxSs for Type1 {
    type Share = ShamirShare;

    fn name(&self) -> &'static str {
        "type1"
    }

    fn parties(&self) -> usize {
        self.n
    }

    fn threshold(&self) -> usize {
        self.t
    }

    fn message_ring(&self) -> &Ring {
        &self.ring
    }

    fn error_bound(&self) -> BigUint {
        let f = &self.scale;
        BigUint::from(self.n as u64) * f * f * f * self.b_sm
    }

    fn rounds(&self) -> usize {
        1
    }

    fn share(&self, msg: &[RingPoly], rng: &mut ChaCha20Rng) -> Result<Vec<ShamirShare>> {
        shamir::share(msg, self.n, self.t, rng)
    }

    fn add(&self, a: &ShamirShare, b: &ShamirShare) -> Result<ShamirShare> {
        shamir::add_shares(a, b)
    }

    fn affine(&self, share: &ShamirShare, scales: &[RingPoly], offsets: &[RingPoly]) -> Result<ShamirShare> {
        shamir::affine_share(share, scales, offsets)
    }

    fn exact_rec(&self, shares: &[&ShamirShare]) -> Result<Vec<RingPoly>> {
        shamir::rec(shares, self.t)
    }

    fn approx_rec(
        &self,
        shares: &[ShamirShare],
        schedule: &mut DropoutSchedule,
        seed: u64,
        opts: &RecOptions,
    ) -> Result<SessionReport> {
        check_share_count(shares, self.n)?;
        let mut session = Session {
            cfg: self,
            shares,
            seed,
            first_t: opts.first_t_only.then_some(self.t),
            noise: NoiseLog::new(),
            intake: Intake::default(),
        };
        let result = run_session(&mut session, schedule, &sim_config(opts, seed));
        let used = vec![session.intake.sorted_from()];
        Ok(SessionReport::from_session(result, used, session.noise, None))
    }
}
