use num_bigint::BigUint;
use rand_chacha::ChaCha20Rng;

use super::Intake;
use crate::approx::{check_share_count, sim_config, ApproxSs, NoiseLog, RecOptions, SessionReport};
use crate::error::{Error, Result};
use crate::ring::{sample_wrapping, Ring, RingPoly};
use crate::rng::{derive_rng, label};
use crate::shamir::{self, ShamirShare};
use crate::sim::{run_session, AggStep, Delivery, DropoutSchedule, Node, Outgoing, Protocol};

pub const KIND_NOISE_SHARE: &str = "noise_share";
pub const KIND_NOISY_SHARE: &str = "noisy_share";

/// Coordinated-noise baseline. Round 1 shares a fresh noise `ν_i` from every
/// party; party `j` then holds `n_j = Σ_i ν_i(j)`, a share of `Σ_i ν_i`.
/// Round 2 submits `s_j + n_j`.
#[derive(Debug, Clone)]
pub struct Type2 {
    n: usize,
    t: usize,
    ring: Ring,
    b_sm: u64,
}

impl Type2 {
    pub fn new(n: usize, t: usize, ring: Ring, b_sm: u64) -> Result<Self> {
        if t == 0 || t > n {
            return Err(Error::param(format!("threshold {t} must lie in [1, {n}]")));
        }
        shamir::validate_points(&shamir::party_points(n), ring.modulus())?;
        Ok(Type2 { n, t, ring, b_sm })
    }
}

struct Session<'a> {
    cfg: &'a Type2,
    shares: &'a [ShamirShare],
    seed: u64,
    first_t: Option<usize>,
    noise_sum: Vec<Option<Vec<RingPoly>>>,
    noise: NoiseLog,
    intake: Intake,
}

impl Session<'_> {
    fn width(&self) -> usize {
        self.shares[0].payload.len()
    }
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
        2
    }

    fn party_round(&mut self, i: usize, round: usize) -> Result<Vec<Outgoing<ShamirShare>>> {
        match round {
            1 => {
                let mut rng = derive_rng(self.seed, &[label("type2/party"), i as u64]);
                let nu: Vec<RingPoly> =
                    (0..self.width()).map(|_| sample_wrapping(&mut rng, &self.cfg.ring, self.cfg.b_sm)).collect();
                let shares = if nu.is_empty() {
                    shamir::party_points(self.cfg.n)
                        .into_iter()
                        .map(|p| ShamirShare { point: p, payload: Vec::new() })
                        .collect()
                } else {
                    shamir::share(&nu, self.cfg.n, self.cfg.t, &mut rng)?
                };
                self.noise.insert(i, nu);
                Ok(shares
                    .into_iter()
                    .enumerate()
                    .map(|(j, s)| Outgoing::to_party(j + 1, KIND_NOISE_SHARE, s))
                    .collect())
            }
            2 => {
                let own = &self.shares[i - 1];
                let noisy = match &self.noise_sum[i] {
                    Some(sum) => {
                        let payload =
                            own.payload.iter().zip(sum).map(|(s, n)| s.add(n)).collect::<Result<Vec<_>>>()?;
                        ShamirShare { point: own.point, payload }
                    }
                    None => return Err(Error::ProtocolState(format!("party {i} holds no noise shares"))),
                };
                Ok(vec![Outgoing::to_aggregator(KIND_NOISY_SHARE, noisy)])
            }
            _ => Err(Error::ProtocolState(format!("no round {round}"))),
        }
    }

    fn party_receive(
        &mut self,
        party: usize,
        _round: usize,
        from: Node,
        _delivery: Delivery,
        _kind: &'static str,
        msg: ShamirShare,
    ) -> Result<()> {
        if !matches!(from, Node::Party(_)) {
            return Err(Error::ProtocolState("unexpected aggregator message".into()));
        }
        match &mut self.noise_sum[party] {
            Some(sum) => {
                for (acc, p) in sum.iter_mut().zip(&msg.payload) {
                    acc.add_assign(p)?;
                }
            }
            slot @ None => *slot = Some(msg.payload),
        }
        Ok(())
    }

    fn aggregator_receive(&mut self, round: usize, from: usize, kind: &'static str, msg: ShamirShare) -> Result<()> {
        if round != 2 {
            return Err(Error::ProtocolState(format!("unexpected {kind} in round {round}")));
        }
        self.intake.offer(from, msg, self.first_t);
        Ok(())
    }

    fn aggregator_round(&mut self, round: usize) -> Result<AggStep<ShamirShare, Vec<RingPoly>>> {
        match round {
            1 => Ok(AggStep::Continue { broadcast: Vec::new() }),
            _ => {
                let got = self.intake.shares.len();
                if got < self.cfg.t {
                    return Err(Error::InsufficientParticipants { round: 2, needed: self.cfg.t, got });
                }
                if self.width() == 0 {
                    return Ok(AggStep::Finish(Vec::new()));
                }
                let refs: Vec<&ShamirShare> = self.intake.shares.iter().collect();
                Ok(AggStep::Finish(shamir::rec(&refs, self.cfg.t)?))
            }
        }
    }
}

impl ApproxSs for Type2 {
    type Share = ShamirShare;

    fn name(&self) -> &'static str {
        "type2"
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
        BigUint::from(self.n as u64) * self.b_sm
    }

    fn rounds(&self) -> usize {
        2
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
            noise_sum: vec![None; self.n + 1],
            noise: NoiseLog::new(),
            intake: Intake::default(),
        };
        let result = run_session(&mut session, schedule, &sim_config(opts, seed));
        let round1: Vec<usize> = result.participants.first().cloned().map(|mut v| {
            v.sort_unstable();
            v
        }).unwrap_or_default();
        let used = vec![round1, session.intake.sorted_from()];
        Ok(SessionReport::from_session(result, used, session.noise, None))
    }
}
