use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};

use crate::ops::OpCounts;

/// A party id (1-based) or the aggregator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Party(usize),
    Aggregator,
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Party(i) => write!(f, "{i}"),
            Node::Aggregator => f.write_str("agg"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub round: usize,
    pub sender: Node,
    pub receiver: Node,
    pub kind: &'static str,
    pub bytes: usize,
    /// Party-to-party message carried through the aggregator.
    pub relayed: bool,
    pub payload: Option<Vec<u8>>,
}

impl Event {
    pub fn is_p2p(&self) -> bool {
        matches!((self.sender, self.receiver), (Node::Party(_), Node::Party(_)))
    }
}

/// Ordered record of every message of one session.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    pub events: Vec<Event>,
    pub ops: OpCounts,
}

/// Byte and operation totals derived from a transcript.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ComplexityReport {
    pub rounds: usize,
    /// Bytes sent by each party to other parties.
    pub p2p_sent: BTreeMap<usize, usize>,
    /// Bytes sent by each party to the aggregator.
    pub to_agg_sent: BTreeMap<usize, usize>,
    /// Bytes sent by the aggregator, counted once per recipient.
    pub agg_sent: usize,
    pub total_bytes: usize,
    /// Per round: largest number of bytes any single party sent.
    pub max_party_sent_per_round: Vec<usize>,
    /// Per round: largest number of bytes the aggregator sent one party.
    pub max_agg_sent_per_round: Vec<usize>,
    pub ops: OpCounts,
}

impl ComplexityReport {
    pub fn max_p2p_sent(&self) -> usize {
        self.p2p_sent.values().copied().max().unwrap_or(0)
    }

    pub fn max_to_agg_sent(&self) -> usize {
        self.to_agg_sent.values().copied().max().unwrap_or(0)
    }

    /// Bytes on the critical path: per round, the busiest party's upload
    /// plus the aggregator's download to one party.
    pub fn critical_path_bytes(&self) -> usize {
        self.max_party_sent_per_round.iter().sum::<usize>() + self.max_agg_sent_per_round.iter().sum::<usize>()
    }
}

impl Transcript {
    pub fn rounds(&self) -> usize {
        self.events.iter().map(|e| e.round).max().unwrap_or(0)
    }

    pub fn events_in_round(&self, round: usize) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(move |e| e.round == round)
    }

    pub fn total_bytes(&self) -> usize {
        self.events.iter().map(|e| e.bytes).sum()
    }

    pub fn measure(&self) -> ComplexityReport {
        let rounds = self.rounds();
        let mut report = ComplexityReport {
            rounds,
            max_party_sent_per_round: vec![0; rounds],
            max_agg_sent_per_round: vec![0; rounds],
            ops: self.ops,
            ..Default::default()
        };
        let mut per_round_party: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut per_round_agg: BTreeMap<(usize, Node), usize> = BTreeMap::new();
        for e in &self.events {
            report.total_bytes += e.bytes;
            match e.sender {
                Node::Party(i) => {
                    *per_round_party.entry((e.round, i)).or_default() += e.bytes;
                    if e.is_p2p() {
                        *report.p2p_sent.entry(i).or_default() += e.bytes;
                    } else {
                        *report.to_agg_sent.entry(i).or_default() += e.bytes;
                    }
                }
                Node::Aggregator => {
                    report.agg_sent += e.bytes;
                    *per_round_agg.entry((e.round, e.receiver)).or_default() += e.bytes;
                }
            }
        }
        for ((r, _), b) in per_round_party {
            let slot = &mut report.max_party_sent_per_round[r - 1];
            *slot = (*slot).max(b);
        }
        for ((r, _), b) in per_round_agg {
            let slot = &mut report.max_agg_sent_per_round[r - 1];
            *slot = (*slot).max(b);
        }
        report
    }

    /// Writes `round,sender,receiver,kind,bytes` lines.
    pub fn export<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "round,sender,receiver,kind,bytes")?;
        for e in &self.events {
            writeln!(out, "{},{},{},{},{}", e.round, e.sender, e.receiver, e.kind, e.bytes)?;
        }
        Ok(())
    }
}
