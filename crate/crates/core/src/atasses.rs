//! ATASSES: approximate recovery of a Shamir-shared message through
//! key-homomorphic encryption of the shares.
//!
//! Round 1: party `i` draws two ternary keys `ek_{i,1}`, `ek_{i,2}`, Shamir
//! shares both over `Z_Q'` to every party, and sends the aggregator, for
//! every chunk `k` of its message share, `CTs_{i,k}` (its share under
//! `ek_{i,1}`) and `CTn_{i,k}` (fresh smudging noise under `ek_{i,2}`), all
//! with the common CRS polynomial `a_k`. The aggregator fixes the participant
//! set `𝒯` and broadcasts its Lagrange coefficients.
//!
//! Round 2: each party `j` returns `dkShare_j = Σ_{i∈𝒯} L_i·ekShare_{i,j,1} +
//! ekShare_{i,j,2}`. From any `T` of them the aggregator rebuilds
//! `dk = Σ L_i·ek_{i,1} + ek_{i,2}` and decrypts `CTall_k = Σ L_i·CTs_{i,k} +
//! CTn_{i,k}`, which encrypts `Σ L_i·s_i + Σ n_i = m + Σ n_i`.
//!
//! The Lagrange coefficients are computed modulo the message modulus `P'`
//! and used as integers in `[0, P')` for both combinations. Reducing them
//! modulo `Q'` instead would break the plaintext identity and blow the error
//! budget, since `Q'` and `P'` are unrelated moduli.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::One;
use rand_chacha::ChaCha20Rng;

use crate::approx::{check_share_count, rechunk, sim_config, ApproxSs, NoiseLog, RecOptions, SessionReport};
use crate::cipher::{combine_weighted, CipherParams, RlweCiphertext, SecretKey};
use crate::error::{Error, Result};
use crate::ring::{sample_uniform, sample_wrapping, Ring, RingPoly};
use crate::rng::{derive_rng, label};
use crate::shamir::{self, LagrangeSet, ShamirShare};
use crate::sim::{run_session, AggStep, Delivery, DropoutSchedule, Node, Outgoing, Protocol};
use crate::wire::Wire;

#[derive(Debug, Clone)]
pub struct AtassesConfig {
    n: usize,
    t: usize,
    msg_ring: Ring,
    cipher: CipherParams,
    b_sm: u64,
    crs_seed: u64,
}

impl AtassesConfig {
    pub fn new(n: usize, t: usize, msg_ring: Ring, cipher: CipherParams, b_sm: u64, crs_seed: u64) -> Result<Self> {
        if t == 0 || t > n {
            return Err(Error::param(format!("threshold {t} must lie in [1, {n}]")));
        }
        if cipher.p() != msg_ring.modulus() {
            return Err(Error::param("inner plaintext modulus must equal the message modulus"));
        }
        if cipher.parties() < n {
            return Err(Error::param(format!(
                "inner cipher budgeted for {} parties, need {n}",
                cipher.parties()
            )));
        }
        shamir::validate_points(&shamir::party_points(n), msg_ring.modulus())?;
        shamir::validate_points(&shamir::party_points(n), cipher.q())?;
        Ok(AtassesConfig { n, t, msg_ring, cipher, b_sm, crs_seed })
    }

    /// Builds the configuration with the smallest valid inner modulus.
    pub fn with_search(
        n: usize,
        t: usize,
        msg_ring: Ring,
        inner_degree: usize,
        inner_bound: u64,
        b_sm: u64,
        crs_seed: u64,
    ) -> Result<Self> {
        let cipher = CipherParams::search(inner_degree, msg_ring.modulus().clone(), inner_bound, n)?;
        Self::new(n, t, msg_ring, cipher, b_sm, crs_seed)
    }

    pub fn parties(&self) -> usize {
        self.n
    }

    pub fn threshold(&self) -> usize {
        self.t
    }

    pub fn message_ring(&self) -> &Ring {
        &self.msg_ring
    }

    pub fn cipher(&self) -> &CipherParams {
        &self.cipher
    }

    pub fn smudging_bound(&self) -> u64 {
        self.b_sm
    }

    /// Number of inner chunks `C' = ⌈K / M'⌉` for `K` message coefficients.
    pub fn chunks(&self, k: usize) -> usize {
        k.div_ceil(self.cipher.degree())
    }

    /// The CRS polynomial `a_k` of a session.
    pub fn crs(&self, session: u64, k: usize) -> RingPoly {
        let mut rng = derive_rng(self.crs_seed, &[label("atasses/crs"), session, k as u64]);
        sample_uniform(&mut rng, self.cipher.bfv().ct_ring())
    }
}

#[derive(Debug, Clone)]
pub enum AtassesMsg {
    /// `[ekShare_{i,j,1}, ekShare_{i,j,2}]` at point `j`.
    EkShare(ShamirShare),
    Ciphertexts(Vec<RlweCiphertext>),
    Lagrange(LagrangeSet),
    DkShare(ShamirShare),
}

impl Wire for AtassesMsg {
    fn encoded_len(&self) -> usize {
        match self {
            AtassesMsg::EkShare(s) | AtassesMsg::DkShare(s) => s.encoded_len(),
            AtassesMsg::Ciphertexts(c) => c.encoded_len(),
            AtassesMsg::Lagrange(l) => l.encoded_len(),
        }
    }

    fn encode_into(&self, out: &mut Vec<u8>) {
        match self {
            AtassesMsg::EkShare(s) | AtassesMsg::DkShare(s) => s.encode_into(out),
            AtassesMsg::Ciphertexts(c) => c.encode_into(out),
            AtassesMsg::Lagrange(l) => l.encode_into(out),
        }
    }
}

pub const KIND_EK_SHARE: &str = "ek_share";
pub const KIND_CTS: &str = "cts";
pub const KIND_CTN: &str = "ctn";
pub const KIND_LAGRANGE: &str = "lagrange";
pub const KIND_DK_SHARE: &str = "dk_share";

#[derive(Default)]
struct PartyState {
    ek1: BTreeMap<usize, RingPoly>,
    ek2: BTreeMap<usize, RingPoly>,
    /// Running sum of second-key shares from relayed (hence admitted) senders.
    ek2_sum: Option<RingPoly>,
    folded: BTreeSet<usize>,
    lagrange: Option<LagrangeSet>,
}

#[derive(Default)]
struct AggState {
    accepted: Vec<usize>,
    cts: BTreeMap<usize, Vec<RlweCiphertext>>,
    ctn: BTreeMap<usize, Vec<RlweCiphertext>>,
    lagrange: Option<LagrangeSet>,
    dk_shares: Vec<ShamirShare>,
    dk_from: Vec<usize>,
}

/// One run of the protocol over fixed message shares.
pub struct AtassesSession<'a> {
    cfg: &'a AtassesConfig,
    shares: &'a [ShamirShare],
    k: usize,
    session: u64,
    first_t_only: bool,
    parties: Vec<PartyState>,
    agg: AggState,
    noise: NoiseLog,
    inner_error: Option<BigUint>,
}

impl<'a> AtassesSession<'a> {
    pub fn new(cfg: &'a AtassesConfig, shares: &'a [ShamirShare], session: u64, first_t_only: bool) -> Result<Self> {
        check_share_count(shares, cfg.n)?;
        let width = shares[0].payload.len();
        for (idx, s) in shares.iter().enumerate() {
            if s.point != idx as u64 + 1 || s.payload.len() != width {
                return Err(Error::param("shares must be in party order with equal payload lengths"));
            }
            for p in &s.payload {
                cfg.msg_ring.ensure_same(p.ring())?;
            }
        }
        Ok(AtassesSession {
            cfg,
            shares,
            k: width * cfg.msg_ring.degree(),
            session,
            first_t_only,
            parties: (0..=cfg.n).map(|_| PartyState::default()).collect(),
            agg: AggState::default(),
            noise: NoiseLog::new(),
            inner_error: None,
        })
    }

    fn accept(&mut self, sender: usize) -> bool {
        if self.agg.accepted.contains(&sender) {
            return true;
        }
        if self.first_t_only && self.agg.accepted.len() >= self.cfg.t {
            return false;
        }
        self.agg.accepted.push(sender);
        true
    }

    fn round1(&mut self, i: usize) -> Result<Vec<Outgoing<AtassesMsg>>> {
        let cfg = self.cfg;
        let bfv = cfg.cipher.bfv();
        let mut rng = derive_rng(self.session, &[label("atasses/party"), i as u64]);
        let ek1 = bfv.keygen(&mut rng);
        let ek2 = bfv.keygen(&mut rng);
        let key_shares = shamir::share(&[ek1.0.clone(), ek2.0.clone()], cfg.n, cfg.t, &mut rng)?;
        let mut out: Vec<Outgoing<AtassesMsg>> = key_shares
            .into_iter()
            .enumerate()
            .map(|(j, s)| Outgoing::to_party(j + 1, KIND_EK_SHARE, AtassesMsg::EkShare(s)))
            .collect();

        let pt = bfv.pt_ring();
        let chunks = rechunk(&self.shares[i - 1].payload, self.k, pt)?;
        let mut cts = Vec::with_capacity(chunks.len());
        let mut ctn = Vec::with_capacity(chunks.len());
        let mut noise = Vec::with_capacity(chunks.len());
        for (k, s) in chunks.iter().enumerate() {
            let a = cfg.crs(self.session, k);
            let n = sample_wrapping(&mut rng, pt, cfg.b_sm);
            cts.push(bfv.encrypt(&ek1, s, &a, cfg.cipher.bound(), &mut rng)?);
            ctn.push(bfv.encrypt(&ek2, &n, &a, cfg.cipher.bound(), &mut rng)?);
            noise.push(n);
        }
        self.noise.insert(i, rechunk(&noise, self.k, &cfg.msg_ring)?);
        out.push(Outgoing::to_aggregator(KIND_CTS, AtassesMsg::Ciphertexts(cts)));
        out.push(Outgoing::to_aggregator(KIND_CTN, AtassesMsg::Ciphertexts(ctn)));
        Ok(out)
    }

    fn round2(&mut self, j: usize) -> Result<Vec<Outgoing<AtassesMsg>>> {
        let state = &self.parties[j];
        let lag = state
            .lagrange
            .as_ref()
            .ok_or_else(|| Error::ProtocolState(format!("party {j} has no Lagrange coefficients")))?;
        let members: BTreeSet<usize> = lag.points().iter().map(|&p| p as usize).collect();
        if !state.folded.is_subset(&members) {
            return Err(Error::ProtocolState(format!("party {j} folded key shares from outside the participant set")));
        }
        let mut polys: Vec<&RingPoly> = Vec::with_capacity(2 * members.len());
        let mut weights: Vec<BigUint> = Vec::with_capacity(2 * members.len());
        for (p, l) in lag.iter() {
            let i = p as usize;
            let e1 = state
                .ek1
                .get(&i)
                .ok_or_else(|| Error::ProtocolState(format!("party {j} lacks a key share from party {i}")))?;
            polys.push(e1);
            weights.push(l.clone());
            if !state.folded.contains(&i) {
                let e2 = state
                    .ek2
                    .get(&i)
                    .ok_or_else(|| Error::ProtocolState(format!("party {j} lacks a key share from party {i}")))?;
                polys.push(e2);
                weights.push(BigUint::one());
            }
        }
        if let Some(sum) = &state.ek2_sum {
            polys.push(sum);
            weights.push(BigUint::one());
        }
        let ring = self.cfg.cipher.bfv().ct_ring();
        let dk = ring.lincomb(&polys, &weights)?;
        let share = ShamirShare { point: j as u64, payload: vec![dk] };
        Ok(vec![Outgoing::to_aggregator(KIND_DK_SHARE, AtassesMsg::DkShare(share))])
    }

    fn finish(&mut self) -> Result<Vec<RingPoly>> {
        let cfg = self.cfg;
        let bfv = cfg.cipher.bfv();
        if self.agg.dk_shares.len() < cfg.t {
            return Err(Error::InsufficientParticipants { round: 2, needed: cfg.t, got: self.agg.dk_shares.len() });
        }
        let refs: Vec<&ShamirShare> = self.agg.dk_shares.iter().collect();
        let dk = SecretKey(shamir::rec(&refs, cfg.t)?.remove(0));
        let lag = self.agg.lagrange.as_ref().ok_or_else(|| Error::ProtocolState("no participant set".into()))?;
        let chunks = cfg.chunks(self.k);
        let mut weights: Vec<BigUint> = lag.coeffs().to_vec();
        weights.extend(std::iter::repeat(BigUint::one()).take(lag.points().len()));
        let mut recovered = Vec::with_capacity(chunks);
        let mut worst = BigUint::default();
        for k in 0..chunks {
            let mut cts: Vec<&RlweCiphertext> = Vec::with_capacity(weights.len());
            for &p in lag.points() {
                cts.push(&self.agg.cts[&(p as usize)][k]);
            }
            for &p in lag.points() {
                cts.push(&self.agg.ctn[&(p as usize)][k]);
            }
            let all = combine_weighted(&cts, &weights)?;
            let m = bfv.decrypt(&dk, &all)?;
            worst = worst.max(bfv.error(&dk, &all, &m)?.inf_norm().into_inner());
            recovered.push(m);
        }
        self.inner_error = Some(worst);
        rechunk(&recovered, self.k, &cfg.msg_ring)
    }

    pub fn noise_log(&self) -> &NoiseLog {
        &self.noise
    }

    pub fn used(&self) -> Vec<Vec<usize>> {
        let round1 = self.agg.lagrange.as_ref().map(|l| l.points().iter().map(|&p| p as usize).collect());
        let mut dk: Vec<usize> = self.agg.dk_from.clone();
        dk.sort_unstable();
        round1.into_iter().chain((!dk.is_empty()).then_some(dk)).collect()
    }
}

impl Protocol for AtassesSession<'_> {
    type Msg = AtassesMsg;
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

    fn party_round(&mut self, party: usize, round: usize) -> Result<Vec<Outgoing<AtassesMsg>>> {
        match round {
            1 => self.round1(party),
            2 => self.round2(party),
            _ => Err(Error::ProtocolState(format!("no round {round}"))),
        }
    }

    fn party_receive(
        &mut self,
        party: usize,
        _round: usize,
        from: Node,
        delivery: Delivery,
        _kind: &'static str,
        msg: AtassesMsg,
    ) -> Result<()> {
        let state = &mut self.parties[party];
        match (msg, from) {
            (AtassesMsg::EkShare(share), Node::Party(i)) => {
                let mut payload = share.payload.into_iter();
                let (e1, e2) = match (payload.next(), payload.next()) {
                    (Some(a), Some(b)) => (a, b),
                    _ => return Err(Error::ProtocolState("malformed key share".into())),
                };
                state.ek1.insert(i, e1);
                if delivery == Delivery::Relayed {
                    match &mut state.ek2_sum {
                        Some(sum) => sum.add_assign(&e2)?,
                        None => state.ek2_sum = Some(e2),
                    }
                    state.folded.insert(i);
                } else {
                    state.ek2.insert(i, e2);
                }
                Ok(())
            }
            (AtassesMsg::Lagrange(lag), Node::Aggregator) => {
                state.lagrange = Some(lag);
                Ok(())
            }
            _ => Err(Error::ProtocolState("unexpected message to party".into())),
        }
    }

    fn aggregator_admit(&mut self, round: usize, sender: usize) -> bool {
        round == 1 && self.accept(sender)
    }

    fn aggregator_receive(&mut self, round: usize, from: usize, kind: &'static str, msg: AtassesMsg) -> Result<()> {
        match (round, msg) {
            (1, AtassesMsg::Ciphertexts(cts)) => {
                if !self.accept(from) {
                    return Ok(());
                }
                let chunks = self.cfg.chunks(self.k);
                if cts.len() != chunks {
                    return Err(Error::ProtocolState(format!("party {from} sent {} of {chunks} chunks", cts.len())));
                }
                let slot = if kind == KIND_CTS { &mut self.agg.cts } else { &mut self.agg.ctn };
                slot.insert(from, cts);
                Ok(())
            }
            (2, AtassesMsg::DkShare(share)) => {
                if self.first_t_only && self.agg.dk_shares.len() >= self.cfg.t {
                    return Ok(());
                }
                self.agg.dk_from.push(from);
                self.agg.dk_shares.push(share);
                Ok(())
            }
            _ => Err(Error::ProtocolState(format!("unexpected {kind} in round {round}"))),
        }
    }

    fn aggregator_round(&mut self, round: usize) -> Result<AggStep<AtassesMsg, Vec<RingPoly>>> {
        match round {
            1 => {
                let mut members: Vec<usize> = self
                    .agg
                    .accepted
                    .iter()
                    .copied()
                    .filter(|i| self.agg.cts.contains_key(i) && self.agg.ctn.contains_key(i))
                    .collect();
                if members.len() < self.cfg.t {
                    return Err(Error::InsufficientParticipants { round: 1, needed: self.cfg.t, got: members.len() });
                }
                members.sort_unstable();
                let points: Vec<u64> = members.iter().map(|&i| i as u64).collect();
                let lag = shamir::lagrange_coeffs(&points, self.cfg.msg_ring.modulus())?;
                self.agg.lagrange = Some(lag.clone());
                Ok(AggStep::Continue { broadcast: vec![(KIND_LAGRANGE, AtassesMsg::Lagrange(lag))] })
            }
            2 => Ok(AggStep::Finish(self.finish()?)),
            _ => Err(Error::ProtocolState(format!("no round {round}"))),
        }
    }
}

/// ATASSES behind the [`ApproxSs`] interface.
#[derive(Debug, Clone)]
pub struct Atasses {
    cfg: AtassesConfig,
}

impl Atasses {
    pub fn new(cfg: AtassesConfig) -> Self {
        Atasses { cfg }
    }

    pub fn config(&self) -> &AtassesConfig {
        &self.cfg
    }
}

impl ApproxSs for Atasses {
    type Share = ShamirShare;

    fn name(&self) -> &'static str {
        "atasses"
    }

    fn parties(&self) -> usize {
        self.cfg.n
    }

    fn threshold(&self) -> usize {
        self.cfg.t
    }

    fn message_ring(&self) -> &Ring {
        &self.cfg.msg_ring
    }

    fn error_bound(&self) -> BigUint {
        BigUint::from(self.cfg.t as u64) * self.cfg.b_sm
    }

    fn rounds(&self) -> usize {
        2
    }

    fn share(&self, msg: &[RingPoly], rng: &mut ChaCha20Rng) -> Result<Vec<ShamirShare>> {
        shamir::share(msg, self.cfg.n, self.cfg.t, rng)
    }

    fn add(&self, a: &ShamirShare, b: &ShamirShare) -> Result<ShamirShare> {
        shamir::add_shares(a, b)
    }

    fn affine(&self, share: &ShamirShare, scales: &[RingPoly], offsets: &[RingPoly]) -> Result<ShamirShare> {
        shamir::affine_share(share, scales, offsets)
    }

    fn exact_rec(&self, shares: &[&ShamirShare]) -> Result<Vec<RingPoly>> {
        shamir::rec(shares, self.cfg.t)
    }

    fn approx_rec(
        &self,
        shares: &[ShamirShare],
        schedule: &mut DropoutSchedule,
        seed: u64,
        opts: &RecOptions,
    ) -> Result<SessionReport> {
        let mut session = AtassesSession::new(&self.cfg, shares, seed, opts.first_t_only)?;
        let result = run_session(&mut session, schedule, &sim_config(opts, seed));
        let used = session.used();
        let inner = session.inner_error.take();
        Ok(SessionReport::from_session(result, used, std::mem::take(&mut session.noise), inner))
    }
}
