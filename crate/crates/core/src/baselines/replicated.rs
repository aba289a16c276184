use num_bigint::BigUint;
use rand_chacha::ChaCha20Rng;

use crate::approx::{check_share_count, sim_config, ApproxSs, NoiseLog, RecOptions, SessionReport};
use crate::error::{Error, Result};
use crate::ops;
use crate::ring::{sample_uniform, sample_wrapping, Ring, RingPoly};
use crate::rng::{derive_rng, label};
use crate::sim::{run_session, AggStep, Delivery, DropoutSchedule, Node, Outgoing, Protocol};
use crate::wire::Wire;

pub const KIND_NOISY_PIECES: &str = "noisy_pieces";

/// Largest supported party count: subsets are `u32` bitmasks.
pub const MAX_PARTIES: usize = 20;

/// Upper limit on coefficients held across all parties' shares.
pub const COEFF_BUDGET: u128 = 1 << 28;

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// All `k`-subsets of `{1..=n}` as bitmasks (bit `j - 1` for party `j`),
/// in lexicographic order of their sorted members.
pub fn subsets(n: usize, k: usize) -> Vec<u32> {
    fn walk(start: usize, n: usize, k: usize, mask: u32, out: &mut Vec<u32>) {
        if k == 0 {
            out.push(mask);
            return;
        }
        for j in start..=n + 1 - k {
            walk(j + 1, n, k - 1, mask | 1 << (j - 1), out);
        }
    }
    let mut out = Vec::new();
    walk(1, n, k, 0, &mut out);
    out
}

fn holds(party: usize, mask: u32) -> bool {
    mask & 1 << (party - 1) == 0
}

/// Party `party`'s share: one piece per `(T-1)`-subset it does not belong
/// to, sorted by subset mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplicatedShare {
    pub party: usize,
    pub pieces: Vec<(u32, Vec<RingPoly>)>,
}

impl Wire for ReplicatedShare {
    fn encoded_len(&self) -> usize {
        8 + self.pieces.iter().map(|(_, p)| 4 + p.encoded_len()).sum::<usize>()
    }

    fn encode_into(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&(self.party as u32).to_le_bytes());
        out.extend_from_slice(&(self.pieces.len() as u32).to_le_bytes());
        for (mask, p) in &self.pieces {
            out.extend_from_slice(&mask.to_le_bytes());
            p.encode_into(out);
        }
    }
}

/// Replicated-sharing baseline. The secret is the sum of one piece per
/// `(T-1)`-subset `S`, and every party outside `S` holds that piece. Any `T`
/// parties jointly cover every subset, so recovery only adds pieces. Each
/// party noises every piece it submits.
#[derive(Debug, Clone)]
pub struct Replicated {
    n: usize,
    t: usize,
    ring: Ring,
    b_sm: u64,
    subsets: Vec<u32>,
}

impl Replicated {
    pub fn new(n: usize, t: usize, ring: Ring, b_sm: u64) -> Result<Self> {
        if t == 0 || t > n {
            return Err(Error::param(format!("threshold {t} must lie in [1, {n}]")));
        }
        if n > MAX_PARTIES {
            return Err(Error::Capacity(format!("replicated sharing supports at most {MAX_PARTIES} parties, got {n}")));
        }
        Ok(Replicated { n, t, ring, b_sm, subsets: subsets(n, t - 1) })
    }

    pub fn subsets(&self) -> &[u32] {
        &self.subsets
    }

    /// Coefficients stored across all shares of a `k`-polynomial secret.
    pub fn stored_coeffs(&self, k: usize) -> u128 {
        self.n as u128 * binomial(self.n - 1, self.t - 1) * (k * self.ring.degree()) as u128
    }

    /// For each subset, the lowest-indexed party of `parties` outside it.
    fn cover(&self, parties: &[usize]) -> Result<Vec<usize>> {
        self.subsets
            .iter()
            .map(|&s| {
                parties
                    .iter()
                    .copied()
                    .filter(|&p| holds(p, s))
                    .min()
                    .ok_or_else(|| Error::InsufficientShares { needed: self.t, got: parties.len() })
            })
            .collect()
    }

    fn piece<'a>(share: &'a ReplicatedShare, mask: u32) -> Result<&'a [RingPoly]> {
        share
            .pieces
            .binary_search_by_key(&mask, |(m, _)| *m)
            .map(|i| share.pieces[i].1.as_slice())
            .map_err(|_| Error::Combine(format!("party {} holds no piece for subset {mask:#x}", share.party)))
    }

    /// Sums, per subset, the piece of the covering party.
    fn sum_cover(&self, shares: &[&ReplicatedShare], width: usize) -> Result<Vec<RingPoly>> {
        let parties: Vec<usize> = shares.iter().map(|s| s.party).collect();
        let cover = self.cover(&parties)?;
        let mut out = vec![self.ring.zero(); width];
        for (&mask, &p) in self.subsets.iter().zip(&cover) {
            let share = shares.iter().find(|s| s.party == p).expect("cover member");
            for (acc, x) in out.iter_mut().zip(Self::piece(share, mask)?) {
                acc.add_assign(x)?;
            }
        }
        Ok(out)
    }

    fn check_pair(a: &ReplicatedShare, b: &ReplicatedShare) -> Result<()> {
        if a.party != b.party || a.pieces.len() != b.pieces.len() {
            return Err(Error::Combine("shares belong to different parties".into()));
        }
        Ok(())
    }
}

struct Session<'a> {
    cfg: &'a Replicated,
    shares: &'a [ReplicatedShare],
    seed: u64,
    first_t: Option<usize>,
    noise: NoiseLog,
    intake: Vec<ReplicatedShare>,
}

impl Protocol for Session<'_> {
    type Msg = ReplicatedShare;
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

    fn party_round(&mut self, i: usize, _round: usize) -> Result<Vec<Outgoing<ReplicatedShare>>> {
        let mut rng = derive_rng(self.seed, &[label("replicated/party"), i as u64]);
        let own = &self.shares[i - 1];
        let mut noise = Vec::new();
        let mut pieces = Vec::with_capacity(own.pieces.len());
        for (mask, polys) in &own.pieces {
            let mut noisy = Vec::with_capacity(polys.len());
            for p in polys {
                let n = sample_wrapping(&mut rng, &self.cfg.ring, self.cfg.b_sm);
                noisy.push(p.add(&n)?);
                noise.push(n);
            }
            pieces.push((*mask, noisy));
        }
        self.noise.insert(i, noise);
        Ok(vec![Outgoing::to_aggregator(KIND_NOISY_PIECES, ReplicatedShare { party: i, pieces })])
    }

    fn party_receive(&mut self, _: usize, _: usize, _: Node, _: Delivery, _: &'static str, _: ReplicatedShare) -> Result<()> {
        Err(Error::ProtocolState("one-round protocol expects no party messages".into()))
    }

    fn aggregator_receive(&mut self, _round: usize, from: usize, _kind: &'static str, mut msg: ReplicatedShare) -> Result<()> {
        if self.first_t.is_some_and(|t| self.intake.len() >= t) {
            return Ok(());
        }
        msg.party = from;
        self.intake.push(msg);
        Ok(())
    }

    fn aggregator_round(&mut self, _round: usize) -> Result<AggStep<ReplicatedShare, Vec<RingPoly>>> {
        let got = self.intake.len();
        if got < self.cfg.t {
            return Err(Error::InsufficientParticipants { round: 1, needed: self.cfg.t, got });
        }
        let width = self.shares[0].pieces.first().map_or(0, |(_, p)| p.len());
        let refs: Vec<&ReplicatedShare> = self.intake.iter().collect();
        Ok(AggStep::Finish(self.cfg.sum_cover(&refs, width)?))
    }
}

impl ApproxSs for Replicated {
    type Share = ReplicatedShare;

    fn name(&self) -> &'static str {
        "replicated"
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
        BigUint::from(binomial(self.n, self.t - 1)) * self.b_sm
    }

    fn rounds(&self) -> usize {
        1
    }

    fn share(&self, msg: &[RingPoly], rng: &mut ChaCha20Rng) -> Result<Vec<ReplicatedShare>> {
        for m in msg {
            self.ring.ensure_same(m.ring())?;
        }
        let stored = self.stored_coeffs(msg.len());
        if stored > COEFF_BUDGET {
            return Err(Error::Capacity(format!(
                "replicated shares would hold {stored} coefficients, budget is {COEFF_BUDGET}"
            )));
        }
        let last = self.subsets.len() - 1;
        let mut pieces: Vec<Vec<RingPoly>> = Vec::with_capacity(self.subsets.len());
        let mut rest: Vec<RingPoly> = msg.to_vec();
        for _ in 0..last {
            let r: Vec<RingPoly> = msg.iter().map(|_| sample_uniform(rng, &self.ring)).collect();
            for (acc, x) in rest.iter_mut().zip(&r) {
                *acc = acc.sub(x)?;
            }
            pieces.push(r);
        }
        pieces.push(rest);
        ops::count_shares(self.n as u64);
        Ok((1..=self.n)
            .map(|i| {
                let mut held: Vec<(u32, Vec<RingPoly>)> = self
                    .subsets
                    .iter()
                    .zip(&pieces)
                    .filter(|(&s, _)| holds(i, s))
                    .map(|(&s, p)| (s, p.clone()))
                    .collect();
                held.sort_unstable_by_key(|(s, _)| *s);
                ReplicatedShare { party: i, pieces: held }
            })
            .collect())
    }

    fn add(&self, a: &ReplicatedShare, b: &ReplicatedShare) -> Result<ReplicatedShare> {
        Self::check_pair(a, b)?;
        let pieces = a
            .pieces
            .iter()
            .zip(&b.pieces)
            .map(|((ma, pa), (mb, pb))| {
                if ma != mb || pa.len() != pb.len() {
                    return Err(Error::Combine("piece layouts differ".into()));
                }
                Ok((*ma, pa.iter().zip(pb).map(|(x, y)| x.add(y)).collect::<Result<Vec<_>>>()?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ReplicatedShare { party: a.party, pieces })
    }

    fn affine(&self, share: &ReplicatedShare, scales: &[RingPoly], offsets: &[RingPoly]) -> Result<ReplicatedShare> {
        if scales.len() != offsets.len() {
            return Err(Error::param("scales and offsets differ in length"));
        }
        let first = self.subsets[0];
        let pieces = share
            .pieces
            .iter()
            .map(|(mask, p)| {
                let [s] = p.as_slice() else {
                    return Err(Error::param("affine expects a single-polynomial share"));
                };
                let mut out = scales.iter().map(|c| c.mul(s)).collect::<Result<Vec<_>>>()?;
                if *mask == first {
                    for (o, off) in out.iter_mut().zip(offsets) {
                        o.add_assign(off)?;
                    }
                }
                Ok((*mask, out))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ReplicatedShare { party: share.party, pieces })
    }

    fn exact_rec(&self, shares: &[&ReplicatedShare]) -> Result<Vec<RingPoly>> {
        if shares.len() < self.t {
            return Err(Error::InsufficientShares { needed: self.t, got: shares.len() });
        }
        let width = shares[0].pieces.first().map_or(0, |(_, p)| p.len());
        self.sum_cover(shares, width)
    }

    fn approx_rec(
        &self,
        shares: &[ReplicatedShare],
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
            intake: Vec::new(),
        };
        let result = run_session(&mut session, schedule, &sim_config(opts, seed));
        let mut used: Vec<usize> = session.intake.iter().map(|s| s.party).collect();
        used.sort_unstable();
        Ok(SessionReport::from_session(result, vec![used], session.noise, None))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(20, 10), 184_756);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn subset_order() {
        assert_eq!(subsets(4, 2), vec![0b0011, 0b0101, 0b1001, 0b0110, 0b1010, 0b1100]);
        assert_eq!(subsets(3, 0), vec![0]);
    }
}
