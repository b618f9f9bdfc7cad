//! Broadcast blackboard with bit-exact metering.
//!
//! Every message posted by one player is visible to all. Protocols call
//! [`Board::post`] and read the returned [`Message`]; the payload is the only
//! thing the other players learn. A board built with [`Board::replaying`]
//! checks each post against a recorded transcript instead, which is how
//! determinism is verified: rerunning the players on the same inputs must
//! regenerate the transcript message for message.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::value::{ceil_log2, PlayerId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MessageKind {
    Value,
    Count,
    Signal,
    Prefix,
}

impl fmt::Display for MessageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MessageKind::Value => "VALUE",
            MessageKind::Count => "COUNT",
            MessageKind::Signal => "SIGNAL",
            MessageKind::Prefix => "PREFIX",
        })
    }
}

impl FromStr for MessageKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "VALUE" => Ok(MessageKind::Value),
            "COUNT" => Ok(MessageKind::Count),
            "SIGNAL" => Ok(MessageKind::Signal),
            "PREFIX" => Ok(MessageKind::Prefix),
            _ => Err(Error::Invariant("unknown message kind")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Message {
    pub sender: PlayerId,
    pub round: u32,
    pub kind: MessageKind,
    pub payload: u64,
    pub bit_cost: u32,
}

/// Fixed constants behind the asymptotic `O(log n)` message sizes.
///
/// VALUE payloads are in `[1, value_range]` and cost `⌈log2 value_range⌉`
/// bits; COUNT payloads are in `[0, count_range]` and cost
/// `⌈log2(count_range + 1)⌉`; SIGNAL costs `signal_bits`; PREFIX costs
/// `prefix_bits`. Every message costs at least one bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostModel {
    pub value_range: u64,
    pub count_range: u64,
    pub signal_bits: u32,
    pub prefix_bits: u32,
}

impl CostModel {
    pub const DEFAULT_SIGNAL_BITS: u32 = 2;

    pub fn new(value_range: u64) -> Self {
        CostModel {
            value_range,
            count_range: value_range,
            signal_bits: Self::DEFAULT_SIGNAL_BITS,
            prefix_bits: 0,
        }
    }

    pub fn with_count_range(mut self, count_range: u64) -> Self {
        self.count_range = count_range;
        self
    }

    pub fn with_signal_bits(mut self, bits: u32) -> Self {
        self.signal_bits = bits;
        self
    }

    pub fn with_prefix_bits(mut self, bits: u32) -> Self {
        self.prefix_bits = bits;
        self
    }

    pub fn bits_for(&self, kind: MessageKind) -> u32 {
        let bits = match kind {
            MessageKind::Value => ceil_log2(self.value_range),
            MessageKind::Count => ceil_log2(self.count_range.saturating_add(1)),
            MessageKind::Signal => self.signal_bits,
            MessageKind::Prefix => self.prefix_bits,
        };
        bits.max(1)
    }

    /// Checks that `payload` is encodable for `kind`.
    pub fn check(&self, kind: MessageKind, payload: u64) -> Result<u32> {
        let bits = self.bits_for(kind);
        let (ok, limit) = match kind {
            MessageKind::Value => ((1..=self.value_range).contains(&payload), self.value_range),
            MessageKind::Count => (payload <= self.count_range, self.count_range),
            MessageKind::Signal | MessageKind::Prefix => {
                let limit = if bits >= 64 { u64::MAX } else { (1u64 << bits) - 1 };
                (payload <= limit, limit)
            }
        };
        if kind == MessageKind::Prefix && self.prefix_bits == 0 {
            return Err(Error::PayloadOutOfRange { kind, payload, limit: 0 });
        }
        if ok {
            Ok(bits)
        } else {
            Err(Error::PayloadOutOfRange { kind, payload, limit })
        }
    }
}

/// Whether a protocol run records a fresh transcript or must reproduce a
/// recorded one.
#[derive(Debug, Clone, Copy, Default)]
pub enum Session<'a> {
    #[default]
    Fresh,
    Replay(&'a Transcript),
}

impl Session<'_> {
    pub fn open(self, cost: CostModel) -> Board {
        match self {
            Session::Fresh => Board::new(cost),
            Session::Replay(t) => Board::replaying(cost, t),
        }
    }
}

/// The live board of one protocol instance.
#[derive(Debug, Clone)]
pub struct Board {
    cost: CostModel,
    messages: Vec<Message>,
    round: u32,
    expected: Option<Vec<Message>>,
}

impl Board {
    pub fn new(cost: CostModel) -> Self {
        Board { cost, messages: Vec::new(), round: 0, expected: None }
    }

    /// A board that rejects any post deviating from `recorded`.
    pub fn replaying(cost: CostModel, recorded: &Transcript) -> Self {
        Board { cost, messages: Vec::new(), round: 0, expected: Some(recorded.messages.clone()) }
    }

    pub fn cost_model(&self) -> &CostModel {
        &self.cost
    }

    pub fn post(&mut self, sender: PlayerId, kind: MessageKind, payload: u64) -> Result<Message> {
        let bit_cost = self.cost.check(kind, payload)?;
        let msg = Message { sender, round: self.round, kind, payload, bit_cost };
        if let Some(expected) = &self.expected {
            let index = self.messages.len();
            if expected.get(index) != Some(&msg) {
                return Err(Error::ReplayDivergence { index });
            }
        }
        self.messages.push(msg);
        Ok(msg)
    }

    /// Closes the current round; empty rounds are not counted.
    pub fn next_round(&mut self) {
        if self.messages.last().is_some_and(|m| m.round == self.round) {
            self.round += 1;
        }
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn total_bits(&self) -> u64 {
        self.messages.iter().map(|m| m.bit_cost as u64).sum()
    }

    pub fn finalize(self) -> Result<Transcript> {
        if let Some(expected) = &self.expected {
            if expected.len() != self.messages.len() {
                return Err(Error::ReplayIncomplete {
                    remaining: expected.len().saturating_sub(self.messages.len()),
                });
            }
        }
        Ok(Transcript::from_messages(self.messages))
    }
}

/// Immutable record of a finished protocol run.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Transcript {
    messages: Vec<Message>,
    total_bits: u64,
    rounds: u32,
}

impl Transcript {
    pub fn from_messages(messages: Vec<Message>) -> Self {
        let total_bits = messages.iter().map(|m| m.bit_cost as u64).sum();
        let rounds = messages.iter().map(|m| m.round + 1).max().unwrap_or(0);
        Transcript { messages, total_bits, rounds }
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn total_bits(&self) -> u64 {
        self.total_bits
    }

    pub fn rounds(&self) -> u32 {
        self.rounds
    }

    /// Bits carried by messages of the given kind.
    pub fn bits_of(&self, kind: MessageKind) -> u64 {
        self.messages.iter().filter(|m| m.kind == kind).map(|m| m.bit_cost as u64).sum()
    }

    /// Parses the export format produced by `Display`. Bit costs are taken
    /// from the text and checked against the `TOTAL` trailer; lines after the
    /// trailer are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut messages = Vec::new();
        let mut trailer = None;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(rest) = line.strip_prefix("TOTAL ") {
                trailer = Some(parse_trailer(rest)?);
                break;
            }
            let mut it = line.split_ascii_whitespace();
            let mut field = || it.next().ok_or(Error::Invariant("truncated transcript line"));
            let round = field()?.parse().map_err(|_| Error::Invariant("bad round"))?;
            let sender = field()?.parse().map_err(|_| Error::Invariant("bad sender"))?;
            let kind = field()?.parse()?;
            let payload = field()?.parse().map_err(|_| Error::Invariant("bad payload"))?;
            let bit_cost = field()?.parse().map_err(|_| Error::Invariant("bad bit cost"))?;
            messages.push(Message { sender: PlayerId(sender), round, kind, payload, bit_cost });
        }
        let t = Transcript::from_messages(messages);
        match trailer {
            Some((bits, rounds)) if bits == t.total_bits && rounds == t.rounds => Ok(t),
            Some(_) => Err(Error::Invariant("transcript trailer disagrees with messages")),
            None => Err(Error::Invariant("transcript trailer missing")),
        }
    }
}

fn parse_trailer(rest: &str) -> Result<(u64, u32)> {
    let mut bits = None;
    let mut rounds = None;
    for kv in rest.split_ascii_whitespace() {
        match kv.split_once('=') {
            Some(("bits", v)) => bits = v.parse().ok(),
            Some(("rounds", v)) => rounds = v.parse().ok(),
            _ => {}
        }
    }
    bits.zip(rounds).ok_or(Error::Invariant("malformed TOTAL trailer"))
}

impl fmt::Display for Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.messages {
            writeln!(f, "{} {} {} {} {}", m.round, m.sender, m.kind, m.payload, m.bit_cost)?;
        }
        writeln!(f, "TOTAL bits={} rounds={}", self.total_bits, self.rounds)
    }
}

impl Transcript {
    pub fn to_text(&self) -> String {
        alloc::format!("{self}")
    }
}
