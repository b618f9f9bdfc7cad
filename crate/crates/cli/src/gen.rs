//! Seeded instance generation.

use std::fmt;
use std::str::FromStr;

use mediocre::{MultisetSeq, PlayerId, Ratio, Value};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::instance::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum GenMode {
    /// Independent multisets, duplicates allowed.
    Multiset,
    /// A random subset of `[n]` of size at least `⌈cn⌉`, split among the players.
    DisjointDense,
}

impl fmt::Display for GenMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GenMode::Multiset => "MULTISET",
            GenMode::DisjointDense => "DISJOINT_DENSE",
        })
    }
}

impl FromStr for GenMode {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, GenError> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "MULTISET" => Ok(GenMode::Multiset),
            "DISJOINT_DENSE" => Ok(GenMode::DisjointDense),
            _ => Err(GenError::Mode(s.to_string())),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("n must be at least 2 (got {0})")]
    Universe(u64),
    #[error("k must be at least 1")]
    NoPlayers,
    #[error("unknown mode `{0}`")]
    Mode(String),
    #[error("density {c} needs {need} elements but [n] has only {n}")]
    Density { c: Ratio, need: u64, n: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenParams {
    pub n: u64,
    pub k: usize,
    pub mode: GenMode,
    /// Density for [`GenMode::DisjointDense`].
    pub c: Ratio,
    /// Largest multiset per player in [`GenMode::Multiset`]; clipped to `n²`.
    pub max_len: usize,
    /// Every player gets at least one element (two-party protocols need it).
    pub nonempty: bool,
}

impl GenParams {
    pub fn new(n: u64, k: usize, mode: GenMode) -> Self {
        GenParams { n, k, mode, c: Ratio::one(), max_len: 64, nonempty: true }
    }

    pub fn with_c(self, c: Ratio) -> Self {
        GenParams { c, ..self }
    }

    pub fn with_max_len(self, max_len: usize) -> Self {
        GenParams { max_len, ..self }
    }

    pub fn allow_empty(self) -> Self {
        GenParams { nonempty: false, ..self }
    }
}

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn generate(seed: u64, params: &GenParams) -> Result<Instance, GenError> {
    generate_with(&mut rng_for(seed, 0), params)
}

pub fn generate_with<R: Rng>(rng: &mut R, params: &GenParams) -> Result<Instance, GenError> {
    let GenParams { n, k, mode, c, .. } = *params;
    if n < 2 {
        return Err(GenError::Universe(n));
    }
    if k == 0 {
        return Err(GenError::NoPlayers);
    }
    let sets = match mode {
        GenMode::Multiset => multisets(rng, params),
        GenMode::DisjointDense => {
            let need = c.ceil_mul(n).max(if params.nonempty { k as u64 } else { 1 });
            if need > n {
                return Err(GenError::Density { c, need, n });
            }
            disjoint_dense(rng, n, k, need, params.nonempty)
        }
    };
    let players = sets.into_iter().enumerate().map(|(i, s)| MultisetSeq::new(PlayerId(i), s)).collect();
    Ok(Instance::new(n, players))
}

fn multisets<R: Rng>(rng: &mut R, params: &GenParams) -> Vec<Vec<Value>> {
    let n = params.n;
    let cap = (params.max_len as u128).min(n as u128 * n as u128).max(1) as usize;
    let lo = usize::from(params.nonempty);
    (0..params.k)
        .map(|_| {
            let len = rng.gen_range(lo..=cap);
            // a quarter of the players draw from a narrow band to force ties
            let (from, to) = if rng.gen_ratio(1, 4) {
                let width = rng.gen_range(1..=n.min(8));
                let from = rng.gen_range(1..=n - width + 1);
                (from, from + width - 1)
            } else {
                (1, n)
            };
            (0..len).map(|_| rng.gen_range(from..=to)).collect()
        })
        .collect()
}

fn disjoint_dense<R: Rng>(rng: &mut R, n: u64, k: usize, need: u64, nonempty: bool) -> Vec<Vec<Value>> {
    let t = rng.gen_range(need..=n) as usize;
    let chosen = sample(rng, n as usize, t);
    let mut sets = vec![Vec::new(); k];
    for (i, v) in chosen.into_iter().enumerate() {
        // the first k draws seed one element per player
        let owner = if nonempty && i < k { i } else { rng.gen_range(0..k) };
        sets[owner].push(v as Value + 1);
    }
    sets
}
