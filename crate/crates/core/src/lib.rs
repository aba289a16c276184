//! Arbitrary-threshold approximate secret sharing (ATASSES) and a threshold
//! FHE decryption pipeline built on top of it.
//!
//! The crate is organised bottom-up:
//!
//! * [`ring`]: exact arithmetic in `Z_Q[x]/(x^M + 1)`, sampling and norms.
//! * [`shamir`]: coefficient-wise Shamir sharing of ring elements.
//! * [`cipher`]: BFV-style secret-key RLWE encryption with key-homomorphic
//!   combination.
//! * [`atasses`]: the two-round approximate recovery protocol.
//! * [`baselines`]: replicated, Type-I and Type-II noisy-share schemes.
//! * [`thfhe`]: key setup, public-key encryption, additive evaluation and
//!   the three-phase threshold decryption over any [`ApproxSs`] backend.
//! * [`sim`]: a deterministic round-synchronous simulator with dropout
//!   schedules and a byte-accounted transcript.

pub mod approx;
pub mod atasses;
pub mod baselines;
pub mod cipher;
pub mod error;
pub mod ops;
pub mod params;
pub mod ring;
pub mod rng;
pub mod shamir;
pub mod sim;
pub mod thfhe;
pub mod wire;

pub use approx::{ApproxSs, RecOptions, SessionReport};
pub use error::{Error, Result};
pub use ring::{Ring, RingPoly, SignedNorm};
