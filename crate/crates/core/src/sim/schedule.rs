use std::collections::BTreeSet;

use rand::Rng;

use super::transcript::Transcript;
use crate::rng::{derive_rng, label};

/// Chooses, per round, which parties fail to upload.
pub trait Adversary {
    fn choose(&mut self, round: usize, parties: usize, threshold: usize, so_far: &Transcript) -> BTreeSet<usize>;
}

impl<F> Adversary for F
where
    F: FnMut(usize, usize, usize, &Transcript) -> BTreeSet<usize>,
{
    fn choose(&mut self, round: usize, parties: usize, threshold: usize, so_far: &Transcript) -> BTreeSet<usize> {
        self(round, parties, threshold, so_far)
    }
}

/// Which parties are absent in each round. Protocol code never sees this.
pub enum DropoutSchedule {
    /// Everyone participates.
    None,
    /// A fixed set of parties never participates.
    Uninterested(BTreeSet<usize>),
    /// Each party independently drops each round with probability `p`.
    Random { p: f64, seed: u64 },
    /// An adversary picks the absent set each round, possibly adaptively.
    Targeted(Box<dyn Adversary>),
}

impl DropoutSchedule {
    /// A fixed per-round plan; `plan[r - 1]` is the absent set of round `r`.
    pub fn per_round(plan: Vec<BTreeSet<usize>>) -> Self {
        DropoutSchedule::Targeted(Box::new(move |round: usize, _: usize, _: usize, _: &Transcript| {
            plan.get(round - 1).cloned().unwrap_or_default()
        }))
    }

    pub fn absent(&mut self, round: usize, parties: usize, threshold: usize, so_far: &Transcript) -> BTreeSet<usize> {
        let set = match self {
            DropoutSchedule::None => BTreeSet::new(),
            DropoutSchedule::Uninterested(s) => s.clone(),
            DropoutSchedule::Random { p, seed } => {
                let mut rng = derive_rng(*seed, &[label("dropout"), round as u64]);
                (1..=parties).filter(|_| rng.gen_bool(p.clamp(0.0, 1.0))).collect()
            }
            DropoutSchedule::Targeted(adv) => adv.choose(round, parties, threshold, so_far),
        };
        set.into_iter().filter(|&i| (1..=parties).contains(&i)).collect()
    }
}

impl std::fmt::Debug for DropoutSchedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DropoutSchedule::None => f.write_str("None"),
            DropoutSchedule::Uninterested(s) => f.debug_tuple("Uninterested").field(s).finish(),
            DropoutSchedule::Random { p, seed } => f.debug_struct("Random").field("p", p).field("seed", seed).finish(),
            DropoutSchedule::Targeted(_) => f.write_str("Targeted(..)"),
        }
    }
}
