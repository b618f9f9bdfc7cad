use core::fmt;

use crate::channel::MessageKind;
use crate::value::{PlayerId, Value};

pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong while validating inputs or running a protocol.
///
/// Variants named `*Violated` or [`Error::Invariant`] indicate a bug in a
/// protocol rather than a bad input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    EmptyMultiset,
    NotAMember { value: Value },
    PrefixTooWide { ell: u32, width: u32 },
    ValueOutOfRange { value: Value, bound: Value },
    SizeCapExceeded { player: PlayerId, len: usize, cap: u64 },
    InvalidUniverse,
    InvalidAlpha { p: u64, q: u64 },
    InvalidRatio { num: u64, den: u64 },
    InvalidMediocreSpec { top: u64, bottom: u64, total: u64 },
    SelectionOutOfRange { index: usize, len: usize },
    TargetBelowSize { player: PlayerId, target: usize, len: usize },
    PayloadOutOfRange { kind: MessageKind, payload: u64, limit: u64 },
    ReplayDivergence { index: usize },
    ReplayIncomplete { remaining: usize },
    TwoPartyEndgame { active: usize },
    DisjointnessViolated { value: Value },
    DuplicateValue { player: PlayerId, value: Value },
    DensityPrecondition { t: u64, n: u64 },
    TotalMismatch { declared: u64, actual: u64 },
    Lemma1Violated { round: u32, t: u64, u: u64, v: u64 },
    Invariant(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyMultiset => f.write_str("empty multiset"),
            Error::NotAMember { value } => write!(f, "not a member: {value}"),
            Error::PrefixTooWide { ell, width } => {
                write!(f, "prefix wider than representation ({ell} > {width})")
            }
            Error::ValueOutOfRange { value, bound } => {
                write!(f, "value {value} outside universe [1, {bound}]")
            }
            Error::SizeCapExceeded { player, len, cap } => {
                write!(f, "player {player} holds {len} values, cap is {cap}")
            }
            Error::InvalidUniverse => f.write_str("universe bound must be at least 1"),
            Error::InvalidAlpha { p, q } => write!(f, "alpha {p}/{q} must satisfy 0 < p/q < 1/2"),
            Error::InvalidRatio { num, den } => write!(f, "ratio {num}/{den} must lie in (0, 1]"),
            Error::InvalidMediocreSpec { top, bottom, total } => {
                write!(f, "mediocre spec ({top}, {bottom}) impossible for {total} elements")
            }
            Error::SelectionOutOfRange { index, len } => {
                write!(f, "selection index {index} outside 1..={len}")
            }
            Error::TargetBelowSize { player, target, len } => {
                write!(f, "player {player}: target {target} below current size {len}")
            }
            Error::PayloadOutOfRange { kind, payload, limit } => {
                write!(f, "payload exceeds cost-model range: {kind} {payload} (limit {limit})")
            }
            Error::ReplayDivergence { index } => {
                write!(f, "replay diverged from recorded transcript at message {index}")
            }
            Error::ReplayIncomplete { remaining } => {
                write!(f, "replay finished with {remaining} recorded messages unplayed")
            }
            Error::TwoPartyEndgame { active } => {
                write!(f, "use two-party endgame ({active} active players)")
            }
            Error::DisjointnessViolated { value } => {
                write!(f, "disjointness violated: {value} held by two players")
            }
            Error::DuplicateValue { player, value } => {
                write!(f, "player {player} holds {value} more than once")
            }
            Error::DensityPrecondition { t, n } => {
                write!(f, "density precondition: t={t} too small for n={n}")
            }
            Error::TotalMismatch { declared, actual } => {
                write!(f, "declared total {declared} but players hold {actual}")
            }
            Error::Lemma1Violated { round, t, u, v } => {
                write!(f, "lemma 1 violated in round {round}: t={t} u={u} v={v}")
            }
            Error::Invariant(what) => write!(f, "internal invariant violated: {what}"),
        }
    }
}

impl core::error::Error for Error {}
