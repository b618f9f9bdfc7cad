//! Plain-text instance files.
//!
//! ```text
//! n=16 k=2
//! player 0: 3 1 4 1 5
//! player 1: 9 2 6
//! ```
//!
//! Values may appear in any order and are sorted on load.

use std::fmt;
use std::str::FromStr;

use mediocre::{MultisetSeq, PlayerId, Universe, Value};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("line {line}: expected `n=<int> k=<int>`")]
    Header { line: usize },
    #[error("line {line}: expected `player <id>: <values>`")]
    Player { line: usize },
    #[error("line {line}: bad integer `{token}`")]
    Integer { line: usize, token: String },
    #[error("header declares k={declared} but {found} players follow")]
    PlayerCount { declared: usize, found: usize },
    #[error("player {0} appears twice")]
    DuplicatePlayer(usize),
    #[error("value {value} of player {player} is outside [1, {n}]")]
    OutOfRange { player: usize, value: Value, n: u64 },
    #[error("n must be at least 1")]
    EmptyUniverse,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub n: u64,
    pub players: Vec<MultisetSeq>,
}

impl Instance {
    pub fn new(n: u64, mut players: Vec<MultisetSeq>) -> Self {
        players.sort_by_key(MultisetSeq::owner);
        Instance { n, players }
    }

    pub fn k(&self) -> usize {
        self.players.len()
    }

    /// Size of the multiset sum.
    pub fn t(&self) -> u64 {
        self.players.iter().map(|p| p.len() as u64).sum()
    }

    pub fn universe(&self) -> Universe {
        Universe::new(self.n).expect("instance n is validated on construction")
    }

    pub fn ground(&self) -> Vec<Value> {
        mediocre::value::multiset_sum(&self.players)
    }
}

fn int<T: FromStr>(token: &str, line: usize) -> Result<T, InstanceError> {
    token.parse().map_err(|_| InstanceError::Integer { line, token: token.to_string() })
}

impl FromStr for Instance {
    type Err = InstanceError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (line, header) = lines.next().ok_or(InstanceError::Header { line: 1 })?;
        let mut n = None;
        let mut k = None;
        for field in header.split_whitespace() {
            match field.split_once('=') {
                Some(("n", v)) => n = Some(int::<u64>(v, line)?),
                Some(("k", v)) => k = Some(int::<usize>(v, line)?),
                _ => return Err(InstanceError::Header { line }),
            }
        }
        let (n, k) = n.zip(k).ok_or(InstanceError::Header { line })?;
        if n == 0 {
            return Err(InstanceError::EmptyUniverse);
        }

        let mut players: Vec<MultisetSeq> = Vec::with_capacity(k);
        for (line, text) in lines {
            let rest = text.strip_prefix("player").ok_or(InstanceError::Player { line })?;
            let (id, values) = rest.split_once(':').ok_or(InstanceError::Player { line })?;
            let id: usize = int(id.trim(), line)?;
            if players.iter().any(|p| p.owner() == PlayerId(id)) {
                return Err(InstanceError::DuplicatePlayer(id));
            }
            let values = values.split_whitespace().map(|v| int::<Value>(v, line)).collect::<Result<Vec<_>, _>>()?;
            if let Some(&value) = values.iter().find(|&&v| v == 0 || v > n) {
                return Err(InstanceError::OutOfRange { player: id, value, n });
            }
            players.push(MultisetSeq::new(PlayerId(id), values));
        }
        if players.len() != k {
            return Err(InstanceError::PlayerCount { declared: k, found: players.len() });
        }
        Ok(Instance::new(n, players))
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={} k={}", self.n, self.k())?;
        for p in &self.players {
            write!(f, "player {}:", p.owner())?;
            for v in p.values() {
                write!(f, " {v}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
