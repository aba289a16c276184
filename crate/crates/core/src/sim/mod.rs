//! Deterministic round-synchronous multi-party simulation.
//!
//! Each round, every participating party runs its round step in a seeded
//! arrival order. Messages to the aggregator are handed to it as they arrive;
//! party-to-party messages either go straight to the recipient (direct
//! topology) or through the aggregator (relay topology), which decides per
//! sender whether to forward without reading the payload. After all arrivals
//! the aggregator runs its round step and either broadcasts to every party
//! or finishes with the session output.
//!
//! Absent parties send nothing in that round but still receive. The
//! aggregator learns who participated only from what arrives.

mod schedule;
mod transcript;

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;

pub use schedule::{Adversary, DropoutSchedule};
pub use transcript::{ComplexityReport, Event, Node, Transcript};

use crate::error::{Error, Result};
use crate::ops;
use crate::rng::{derive_rng, label};
use crate::wire::Wire;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Topology {
    /// Party-to-party traffic passes through the aggregator, so the set of
    /// senders whose key material is delivered matches the set whose
    /// aggregator messages were accepted.
    #[default]
    Relay,
    /// Parties message each other directly.
    Direct,
}

/// How a party-to-party message reached its recipient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delivery {
    /// Local hand-off of a party's message to itself.
    Local,
    Direct,
    /// Forwarded by the aggregator after admitting the sender.
    Relayed,
}

pub struct Outgoing<M> {
    pub to: Node,
    pub kind: &'static str,
    pub msg: M,
}

impl<M> Outgoing<M> {
    pub fn to_party(j: usize, kind: &'static str, msg: M) -> Self {
        Outgoing { to: Node::Party(j), kind, msg }
    }

    pub fn to_aggregator(kind: &'static str, msg: M) -> Self {
        Outgoing { to: Node::Aggregator, kind, msg }
    }
}

pub enum AggStep<M, O> {
    Continue { broadcast: Vec<(&'static str, M)> },
    Finish(O),
}

/// A multi-round protocol as party and aggregator state machines.
pub trait Protocol {
    type Msg: Wire + Clone;
    type Output;

    fn parties(&self) -> usize;
    fn threshold(&self) -> usize;
    fn rounds(&self) -> usize;

    fn party_round(&mut self, party: usize, round: usize) -> Result<Vec<Outgoing<Self::Msg>>>;

    fn party_receive(
        &mut self,
        party: usize,
        round: usize,
        from: Node,
        delivery: Delivery,
        kind: &'static str,
        msg: Self::Msg,
    ) -> Result<()>;

    /// Relay topology: whether to forward this sender's party-to-party
    /// messages for the round. Called once per sender, on arrival, before
    /// any of its messages are handed on.
    fn aggregator_admit(&mut self, _round: usize, _sender: usize) -> bool {
        true
    }

    fn aggregator_receive(&mut self, round: usize, from: usize, kind: &'static str, msg: Self::Msg) -> Result<()>;

    fn aggregator_round(&mut self, round: usize) -> Result<AggStep<Self::Msg, Self::Output>>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SimConfig {
    pub topology: Topology,
    /// Keep encoded payloads in the transcript (memory heavy).
    pub retain_payloads: bool,
    pub seed: u64,
}

/// Wall-clock compute time of one round.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RoundTiming {
    /// Slowest party, counting its round step and message handling.
    pub max_party: Duration,
    pub aggregator: Duration,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SessionTimings {
    pub rounds: Vec<RoundTiming>,
}

impl SessionTimings {
    /// Parties within a round work in parallel; rounds and the aggregator
    /// are sequential.
    pub fn compute(&self) -> Duration {
        self.rounds.iter().map(|r| r.max_party + r.aggregator).sum()
    }
}

pub struct SessionResult<O> {
    pub outcome: Result<O>,
    pub transcript: Transcript,
    pub timings: SessionTimings,
    /// Participants of each round reached, in arrival order.
    pub participants: Vec<Vec<usize>>,
}

struct Clock {
    party: Vec<Duration>,
    agg: Duration,
}

impl Clock {
    fn new(n: usize) -> Self {
        Clock { party: vec![Duration::ZERO; n + 1], agg: Duration::ZERO }
    }

    fn close(&mut self) -> RoundTiming {
        let t = RoundTiming {
            max_party: self.party.iter().copied().max().unwrap_or_default(),
            aggregator: self.agg,
        };
        self.party.iter_mut().for_each(|d| *d = Duration::ZERO);
        self.agg = Duration::ZERO;
        t
    }
}

fn timed<T>(slot: &mut Duration, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    *slot += start.elapsed();
    out
}

/// Runs one session to completion or abort.
pub fn run_session<P: Protocol>(protocol: &mut P, schedule: &mut DropoutSchedule, cfg: &SimConfig) -> SessionResult<P::Output> {
    let ops_before = ops::snapshot();
    let mut transcript = Transcript::default();
    let mut timings = SessionTimings::default();
    let mut participants = Vec::new();
    let outcome = drive(protocol, schedule, cfg, &mut transcript, &mut timings, &mut participants);
    transcript.ops = ops::snapshot().since(ops_before);
    SessionResult { outcome, transcript, timings, participants }
}

fn drive<P: Protocol>(
    protocol: &mut P,
    schedule: &mut DropoutSchedule,
    cfg: &SimConfig,
    transcript: &mut Transcript,
    timings: &mut SessionTimings,
    participants: &mut Vec<Vec<usize>>,
) -> Result<P::Output> {
    let n = protocol.parties();
    let t = protocol.threshold();
    let mut clock = Clock::new(n);
    for round in 1..=protocol.rounds() {
        let absent = schedule.absent(round, n, t, transcript);
        let mut order: Vec<usize> = (1..=n).filter(|i| !absent.contains(i)).collect();
        order.shuffle(&mut derive_rng(cfg.seed, &[label("sim/arrival"), round as u64]));
        participants.push(order.clone());
        if order.len() < t {
            timings.rounds.push(clock.close());
            return Err(Error::InsufficientParticipants { round, needed: t, got: order.len() });
        }
        for &i in &order {
            let outgoing = timed(&mut clock.party[i], || protocol.party_round(i, round))?;
            let has_p2p = outgoing.iter().any(|o| matches!(o.to, Node::Party(_)));
            let admitted = match cfg.topology {
                Topology::Relay if has_p2p => timed(&mut clock.agg, || protocol.aggregator_admit(round, i)),
                _ => true,
            };
            for out in outgoing {
                let bytes = out.msg.encoded_len();
                let local = out.to == Node::Party(i);
                if !local {
                    transcript.events.push(Event {
                        round,
                        sender: Node::Party(i),
                        receiver: out.to,
                        kind: out.kind,
                        bytes,
                        relayed: cfg.topology == Topology::Relay && out.to != Node::Aggregator,
                        payload: cfg.retain_payloads.then(|| out.msg.encode()),
                    });
                }
                match out.to {
                    Node::Aggregator => {
                        timed(&mut clock.agg, || protocol.aggregator_receive(round, i, out.kind, out.msg))?;
                    }
                    Node::Party(j) => {
                        if !(1..=n).contains(&j) {
                            return Err(Error::ProtocolState(format!("message to unknown party {j}")));
                        }
                        let delivery = match cfg.topology {
                            _ if local && !admitted => continue,
                            _ if local => Delivery::Local,
                            Topology::Direct => Delivery::Direct,
                            Topology::Relay if admitted => Delivery::Relayed,
                            Topology::Relay => continue,
                        };
                        timed(&mut clock.party[j], || {
                            protocol.party_receive(j, round, Node::Party(i), delivery, out.kind, out.msg)
                        })?;
                    }
                }
            }
        }
        let step = timed(&mut clock.agg, || protocol.aggregator_round(round))?;
        timings.rounds.push(clock.close());
        match step {
            AggStep::Finish(output) => return Ok(output),
            AggStep::Continue { broadcast } => {
                // Broadcast handling counts toward the next round's party time.
                for (kind, msg) in broadcast {
                    let bytes = msg.encoded_len();
                    for j in 1..=n {
                        transcript.events.push(Event {
                            round,
                            sender: Node::Aggregator,
                            receiver: Node::Party(j),
                            kind,
                            bytes,
                            relayed: false,
                            payload: cfg.retain_payloads.then(|| msg.encode()),
                        });
                        let copy = msg.clone();
                        timed(&mut clock.party[j], || {
                            protocol.party_receive(j, round, Node::Aggregator, Delivery::Direct, kind, copy)
                        })?;
                    }
                }
            }
        }
    }
    Err(Error::ProtocolState("protocol ran out of rounds without an output".into()))
}
