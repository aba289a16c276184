//! Per-thread operation counters.
//!
//! Sessions run single-threaded, so the simulator snapshots these counters
//! before and after a session to attribute work to it.

use std::cell::Cell;

thread_local! {
    static RING_MULTS: Cell<u64> = const { Cell::new(0) };
    static SCALAR_MULTS: Cell<u64> = const { Cell::new(0) };
    static SHARES_CREATED: Cell<u64> = const { Cell::new(0) };
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounts {
    /// Ring-by-ring polynomial products.
    pub ring_mults: u64,
    /// Scalar-by-polynomial products inside linear combinations.
    pub scalar_mults: u64,
    /// Shamir or replicated shares produced.
    pub shares_created: u64,
}

impl OpCounts {
    pub fn since(self, earlier: OpCounts) -> OpCounts {
        OpCounts {
            ring_mults: self.ring_mults - earlier.ring_mults,
            scalar_mults: self.scalar_mults - earlier.scalar_mults,
            shares_created: self.shares_created - earlier.shares_created,
        }
    }
}

pub fn snapshot() -> OpCounts {
    OpCounts {
        ring_mults: RING_MULTS.with(Cell::get),
        scalar_mults: SCALAR_MULTS.with(Cell::get),
        shares_created: SHARES_CREATED.with(Cell::get),
    }
}

pub(crate) fn count_ring_mult() {
    RING_MULTS.with(|c| c.set(c.get() + 1));
}

pub(crate) fn count_scalar_mults(n: u64) {
    SCALAR_MULTS.with(|c| c.set(c.get() + n));
}

pub(crate) fn count_shares(n: u64) {
    SHARES_CREATED.with(|c| c.set(c.get() + n));
}
