//! Broadcast-channel protocols for exact and approximate median selection.
//!
//! `k` players each hold a multiset over `[n] = {1, …, n}` and cooperate on a
//! shared blackboard to find the median of the multiset sum — exactly, or as
//! an element whose rank lies in a window `[αt, (1−α)t]`. Every message is
//! metered in bits under an explicit [`CostModel`](channel::CostModel).
//!
//! | module | protocol |
//! |---|---|
//! | [`exact2`] | two-party exact median (count, halving, interval) |
//! | [`exactk`] | `k`-party exact median by min/max-median pruning |
//! | [`approxk`] | `k`-party α-mediocre element on dense disjoint sets |
//! | [`approx2`] | two-party α-mediocre element via prefix search |
//!
//! The [`oracle`] module holds brute-force references used for verification.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod approx2;
pub mod approxk;
pub mod channel;
pub mod error;
pub mod exact2;
pub mod exactk;
pub mod oracle;
pub mod reduce;
pub mod value;

pub use channel::{Board, CostModel, Message, MessageKind, Session, Transcript};
pub use error::{Error, Result};
pub use value::{AlphaRatio, MediocreSpec, MultisetSeq, PlayerId, RankInfo, Ratio, Universe, Value};
