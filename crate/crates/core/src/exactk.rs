//! `k`-party exact median by min/max-median pruning.
//!
//! Every live player announces the median of its live slice. The player
//! holding the smallest median ("Alice") and the one holding the largest
//! ("Bob") then drop the same number of elements — Alice from the bottom,
//! Bob from the top — so the median of the union never moves. The smaller of
//! the two slices is halved, which bounds the number of rounds by
//! `O(k log n)`. Once two players remain they finish with the interval
//! protocol of [`exact2`](crate::exact2).
//!
//! Even-size slices have two medians; the players split the even-size
//! slices evenly between lower and upper medians so that every round's poset
//! keeps enough elements on each side of the discarded blocks.

use alloc::vec::Vec;
use core::fmt;

use crate::channel::{Board, CostModel, MessageKind, Session, Transcript};
use crate::error::{Error, Result};
use crate::exact2::{interval_protocol, RoundTrace};
use crate::value::{MultisetSeq, PlayerId, Universe, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MedianRole {
    Lower,
    Upper,
    Odd,
}

impl MedianRole {
    /// Offset of the designated median inside a slice of `len` elements.
    pub fn index_in(self, len: usize) -> usize {
        match self {
            MedianRole::Odd => (len - 1) / 2,
            MedianRole::Lower => len / 2 - 1,
            MedianRole::Upper => len / 2,
        }
    }
}

/// A player's sorted input with the live slice `values[lo..hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayerChain {
    pub id: PlayerId,
    values: Vec<Value>,
    lo: usize,
    hi: usize,
    pub role: MedianRole,
}

impl PlayerChain {
    pub fn new(seq: &MultisetSeq) -> Self {
        let len = seq.len();
        PlayerChain {
            id: seq.owner(),
            values: seq.values().to_vec(),
            lo: 0,
            hi: len,
            role: if len % 2 == 1 { MedianRole::Odd } else { MedianRole::Lower },
        }
    }

    pub fn live(&self) -> &[Value] {
        &self.values[self.lo..self.hi]
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo
    }

    /// The designated median under the current role.
    pub fn median(&self) -> Value {
        self.live()[self.role.index_in(self.len())]
    }

    fn drop_low(&mut self, d: usize) {
        self.lo += d;
    }

    fn drop_high(&mut self, d: usize) {
        self.hi -= d;
    }
}

/// Roles for slices of the given sizes, listed in ascending player-id order:
/// the first `⌈x/2⌉` of the `x` even sizes take the lower median.
pub fn assign_median_roles(sizes: &[usize]) -> Result<Vec<MedianRole>> {
    if sizes.contains(&0) {
        return Err(Error::EmptyMultiset);
    }
    let even = sizes.iter().filter(|&&s| s % 2 == 0).count();
    let mut lower_left = even.div_ceil(2);
    Ok(sizes
        .iter()
        .map(|&s| {
            if s % 2 == 1 {
                MedianRole::Odd
            } else if lower_left > 0 {
                lower_left -= 1;
                MedianRole::Lower
            } else {
                MedianRole::Upper
            }
        })
        .collect())
}

/// Snapshot of one pruning round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrunePoset {
    /// Designated medians in poset order, ties broken by player id.
    pub medians: Vec<(Value, PlayerId)>,
    pub t: usize,
    /// Elements strictly above Alice's highest discarded element.
    pub u: usize,
    /// Elements strictly below Bob's lowest discarded element.
    pub v: usize,
    pub alice: PlayerId,
    pub bob: PlayerId,
    pub charged: PlayerId,
    pub discard_count: usize,
}

impl PrunePoset {
    pub fn lemma1_holds(&self) -> bool {
        self.u >= (self.t + 1).div_ceil(2) && self.v >= self.t.div_ceil(2)
    }
}

impl fmt::Display for PrunePoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "t={} u={} v={} alice={} bob={} charged={} discard={} medians=",
            self.t, self.u, self.v, self.alice, self.bob, self.charged, self.discard_count
        )?;
        for (i, (value, id)) in self.medians.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{value}@{id}")?;
        }
        Ok(())
    }
}

/// What every player can reconstruct about a live chain from the board.
#[derive(Debug, Clone, Copy)]
struct PublicChain {
    id: PlayerId,
    len: usize,
    role: MedianRole,
    median: Value,
}

/// Decides a prune from public data only. Alice/Bob indices refer to `chains`.
fn plan_prune(chains: &[PublicChain]) -> Result<(PrunePoset, usize, usize)> {
    if chains.len() < 3 {
        return Err(Error::TwoPartyEndgame { active: chains.len() });
    }
    let mut order: Vec<usize> = (0..chains.len()).collect();
    order.sort_by_key(|&i| (chains[i].median, chains[i].id));
    let (ia, ib) = (order[0], order[order.len() - 1]);
    let (a, b) = (chains[ia].len, chains[ib].len);
    let (d, charged) = if a <= b { (a.div_ceil(2), chains[ia].id) } else { (b.div_ceil(2), chains[ib].id) };
    if d == 0 || d > a || d > b {
        return Err(Error::Invariant("infeasible discard count"));
    }

    let t: usize = chains.iter().map(|c| c.len).sum();
    let med_index = |c: &PublicChain| c.role.index_in(c.len);
    let u = (a - d)
        + chains
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != ia)
            .map(|(_, c)| c.len - med_index(c))
            .sum::<usize>();
    let v = (b - d)
        + chains
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != ib)
            .map(|(_, c)| med_index(c) + 1)
            .sum::<usize>();

    let poset = PrunePoset {
        medians: order.iter().map(|&i| (chains[i].median, chains[i].id)).collect(),
        t,
        u,
        v,
        alice: chains[ia].id,
        bob: chains[ib].id,
        charged,
        discard_count: d,
    };
    Ok((poset, ia, ib))
}

/// Assigns roles to the live chains (in the given order, which must be
/// ascending by id), prunes once and returns the round's poset.
pub fn prune_round(chains: &mut [PlayerChain]) -> Result<PrunePoset> {
    let sizes: Vec<usize> = chains.iter().map(PlayerChain::len).collect();
    for (chain, role) in chains.iter_mut().zip(assign_median_roles(&sizes)?) {
        chain.role = role;
    }
    let public: Vec<PublicChain> = chains
        .iter()
        .map(|c| PublicChain { id: c.id, len: c.len(), role: c.role, median: c.median() })
        .collect();
    let (poset, ia, ib) = plan_prune(&public)?;
    chains[ia].drop_low(poset.discard_count);
    chains[ib].drop_high(poset.discard_count);
    Ok(poset)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MedianKOptions {
    /// Fail with [`Error::Lemma1Violated`] instead of just recording the poset.
    pub assert_lemma1: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MedianKOutcome {
    pub median: Value,
    pub transcript: Transcript,
    pub posets: Vec<PrunePoset>,
    /// Trace of the two-party endgame, when one ran.
    pub endgame: Vec<RoundTrace>,
}

pub fn mediank(players: &[MultisetSeq], universe: &Universe, options: MedianKOptions) -> Result<MedianKOutcome> {
    mediank_in(players, universe, options, Session::Fresh)
}

pub fn mediank_in(
    players: &[MultisetSeq],
    universe: &Universe,
    options: MedianKOptions,
    session: Session<'_>,
) -> Result<MedianKOutcome> {
    if players.iter().all(MultisetSeq::is_empty) {
        return Err(Error::EmptyMultiset);
    }
    for p in players {
        p.validate(universe, universe.size_cap())?;
    }
    let mut board = session.open(CostModel::new(universe.bound()).with_count_range(universe.size_cap()));
    let mut chains: Vec<PlayerChain> = players.iter().map(PlayerChain::new).collect();
    chains.sort_by_key(|c| c.id);

    let mut posets = Vec::new();
    let mut endgame = Vec::new();

    if chains.len() == 1 {
        let median = post_own_median(&mut board, &chains[0])?;
        return Ok(MedianKOutcome { median, transcript: board.finalize()?, posets, endgame });
    }

    // cardinalities become public once; afterwards everyone tracks them
    let mut public_len = Vec::with_capacity(chains.len());
    for c in &chains {
        public_len.push(board.post(c.id, MessageKind::Count, c.len() as u64)?.payload as usize);
    }
    board.next_round();

    // public median per chain, or None when it has to be (re-)posted
    let mut known: Vec<Option<(MedianRole, Value)>> = alloc::vec![None; chains.len()];

    let median = loop {
        let live: Vec<usize> = (0..chains.len()).filter(|&i| public_len[i] > 0).collect();
        match live.len() {
            0 => return Err(Error::Invariant("every player dropped out")),
            1 => break post_own_median(&mut board, &chains[live[0]])?,
            2 => {
                let (x, y) = (&chains[live[0]], &chains[live[1]]);
                let (m, trace) =
                    interval_protocol(&mut board, (x.id, x.live()), (y.id, y.live()), universe, true)?;
                endgame = trace;
                break m;
            }
            _ => {}
        }

        let sizes: Vec<usize> = live.iter().map(|&i| public_len[i]).collect();
        let roles = assign_median_roles(&sizes)?;
        let mut public = Vec::with_capacity(live.len());
        for (&i, role) in live.iter().zip(roles) {
            chains[i].role = role;
            let median = match known[i] {
                Some((r, m)) if r == role => m,
                _ => {
                    let m = board.post(chains[i].id, MessageKind::Value, chains[i].median())?.payload;
                    known[i] = Some((role, m));
                    m
                }
            };
            public.push(PublicChain { id: chains[i].id, len: public_len[i], role, median });
        }
        board.next_round();

        let (poset, ia, ib) = plan_prune(&public)?;
        if options.assert_lemma1 && !poset.lemma1_holds() {
            return Err(Error::Lemma1Violated {
                round: posets.len() as u32,
                t: poset.t as u64,
                u: poset.u as u64,
                v: poset.v as u64,
            });
        }
        let (ia, ib) = (live[ia], live[ib]);
        chains[ia].drop_low(poset.discard_count);
        chains[ib].drop_high(poset.discard_count);
        public_len[ia] -= poset.discard_count;
        public_len[ib] -= poset.discard_count;
        known[ia] = None;
        known[ib] = None;
        posets.push(poset);
    };
    Ok(MedianKOutcome { median, transcript: board.finalize()?, posets, endgame })
}

fn post_own_median(board: &mut Board, chain: &PlayerChain) -> Result<Value> {
    let live = chain.live();
    let m = board.post(chain.id, MessageKind::Value, live[live.len().div_ceil(2) - 1])?.payload;
    board.next_round();
    Ok(m)
}
