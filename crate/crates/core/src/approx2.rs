//! Two-party α-mediocre element with communication independent of `n`.
//!
//! Both inputs are shifted into `[n+1, 2n]` and the smaller one is padded
//! with values from `[1, n]` and `[2n+1, 3n]` until the sets have the same
//! size `m`; the padded union then has its median at rank `m`. Each player
//! keeps `h` quantiles of its padded set and the players binary-search for
//! the median of the `2h` quantiles, comparing only `ℓ`-bit prefixes. The
//! quantiles are spread far enough apart that equal prefixes imply nearly
//! equal ranks, so whatever the search lands on is mediocre.
//!
//! `h` and `ℓ` depend only on `α` and `c`, so the search costs the same
//! number of bits for every `n`. Below the size threshold `8q²/c` the
//! players fall back to the exact interval protocol.

use alloc::vec::Vec;

use crate::approxk::validate_dense_disjoint;
use crate::channel::{CostModel, MessageKind, Session, Transcript};
use crate::error::{Error, Result};
use crate::exact2::interval_protocol;
use crate::oracle::prefix_bits;
use crate::value::{ceil_log2, AlphaRatio, MultisetSeq, PlayerId, Ratio, Universe, Value};

/// Parameters every player derives from `(α, c, n, t)` and its own size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstParams {
    pub alpha: AlphaRatio,
    pub c: Ratio,
    /// `n` rounded up to a power of two.
    pub n_pow2: u64,
    /// The density constant actually used, `2^-c_log2`, the largest power
    /// of two with `2^-c_log2 · n_pow2 ≤ c · n`.
    pub c_log2: u32,
    /// `⌈2q/(q − 2p)⌉`.
    pub h: usize,
    /// `⌈log2(12h · 2^c_log2)⌉`.
    pub ell: u32,
    /// Bits per padded value, `log2(4 · n_pow2)`.
    pub width: u32,
    pub s: usize,
    pub m: usize,
    pub t: usize,
}

impl ConstParams {
    pub fn new(alpha: AlphaRatio, c: Ratio, n: u64, s: usize, m: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidUniverse);
        }
        let n_pow2 = n.next_power_of_two();
        // smallest k with 2^-k ≤ c · n / n_pow2
        let mut c_log2 = 0;
        while (c.num() as u128 * n as u128) << c_log2 < c.den() as u128 * n_pow2 as u128 {
            c_log2 += 1;
        }
        let (p, q) = (alpha.p(), alpha.q());
        let h = (2 * q).div_ceil(q - 2 * p) as usize;
        let ell = ceil_log2(12 * h as u64) + c_log2;
        let width = ceil_log2(4 * n_pow2);
        Ok(ConstParams { alpha, c, n_pow2, c_log2, h, ell, width, s, m, t: s + m })
    }

    /// `8q² ≤ c_eff · n_pow2`, the size from which the constant protocol
    /// is guaranteed to work.
    pub fn main_path(&self) -> bool {
        let q = self.alpha.q() as u128;
        (8 * q * q) << self.c_log2 <= self.n_pow2 as u128
    }

    /// Quantile spacing `⌊m/h⌋`.
    pub fn step(&self) -> usize {
        self.m / self.h
    }

    pub fn prefix(&self, x: Value) -> Result<u64> {
        prefix_bits(x, self.ell, self.width)
    }

    /// Number of consecutive values sharing one `ℓ`-bit prefix.
    pub fn block(&self) -> u64 {
        1u64 << (self.width - self.ell)
    }
}

/// The two padded inputs; `alice` holds the smaller original set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaddedPair {
    pub alice: MultisetSeq,
    pub bob: MultisetSeq,
    pub small_pads: usize,
    pub large_pads: usize,
}

/// Shifts both sets by `+n` and pads the smaller one with `1, 2, …` and
/// `2n+1, 2n+2, …` so that both have `m` elements and the padded union has
/// its median, the shifted original median, at rank `m`.
///
/// Ties in size make the first argument Alice.
pub fn pad_to_3n(a: &MultisetSeq, b: &MultisetSeq, n: u64) -> Result<PaddedPair> {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let (s, m) = (small.len(), large.len());
    let half = (s + m).div_ceil(2);
    let small_pads = m - half;
    let large_pads = half - s;
    if small_pads as u64 > n || large_pads as u64 > n {
        return Err(Error::Invariant("padding does not fit into [3n]"));
    }
    let mut alice: Vec<Value> = (1..=small_pads as u64).collect();
    alice.extend(small.values().iter().map(|&v| v + n));
    alice.extend((1..=large_pads as u64).map(|i| 2 * n + i));
    let bob = large.values().iter().map(|&v| v + n).collect();
    Ok(PaddedPair {
        alice: MultisetSeq::new(small.owner(), alice),
        bob: MultisetSeq::new(large.owner(), bob),
        small_pads,
        large_pads,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantileSet {
    /// The `i·⌊m/h⌋`-th smallest elements, `i = 1..=h`.
    pub elements: Vec<Value>,
    pub h: usize,
    /// `⌊m/h⌋`, the number of set elements from one quantile to the next.
    pub gap_lower_bound: usize,
}

impl QuantileSet {
    pub fn prefixes(&self, params: &ConstParams) -> Result<Vec<u64>> {
        self.elements.iter().map(|&x| params.prefix(x)).collect()
    }
}

pub fn build_quantiles(x: &MultisetSeq, params: &ConstParams) -> Result<QuantileSet> {
    let (m, h) = (x.len(), params.h);
    if m < h || h == 0 {
        return Err(Error::Invariant("fewer elements than quantiles"));
    }
    let step = m / h;
    let elements: Vec<Value> = (1..=h).map(|i| x.values()[i * step - 1]).collect();
    let q = QuantileSet { elements, h, gap_lower_bound: step };
    let prefixes = q.prefixes(params)?;
    if prefixes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invariant("quantile prefixes are not pairwise distinct"));
    }
    Ok(q)
}

/// One comparison of the prefix search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchRound {
    /// `|Q′_A| = |Q′_B|` at the start of the round.
    pub size: usize,
    pub x_alice: Value,
    pub x_bob: Value,
    pub prefix_alice: u64,
    pub prefix_bob: u64,
    /// Alice's quantile just below `x_alice`, if any.
    pub pred_alice: Option<Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Approx2Path {
    Main,
    Fallback,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Approx2Outcome {
    /// Values found, tagged by the player that found them, in `[1, n]`.
    pub outputs: Vec<(PlayerId, Value)>,
    pub path: Approx2Path,
    pub params: ConstParams,
    pub alice: PlayerId,
    pub bob: PlayerId,
    /// Main path only.
    pub padded: Option<PaddedPair>,
    pub quantiles: Option<(QuantileSet, QuantileSet)>,
    pub trace: Vec<SearchRound>,
    /// Bits spent before any output is posted.
    pub search_bits: u64,
    pub terminal_bits: u64,
    pub transcript: Transcript,
}

pub fn approx_med2(
    a: &MultisetSeq,
    b: &MultisetSeq,
    alpha: AlphaRatio,
    c: Ratio,
    universe: &Universe,
) -> Result<Approx2Outcome> {
    approx_med2_in(a, b, alpha, c, universe, Session::Fresh)
}

pub fn approx_med2_in(
    a: &MultisetSeq,
    b: &MultisetSeq,
    alpha: AlphaRatio,
    c: Ratio,
    universe: &Universe,
    session: Session<'_>,
) -> Result<Approx2Outcome> {
    let pair = [a.clone(), b.clone()];
    let t = validate_dense_disjoint(&pair, universe)?;
    if t == 0 {
        return Err(Error::EmptyMultiset);
    }
    let n = universe.n();
    if !c.density_holds(t, n) {
        return Err(Error::DensityPrecondition { t, n });
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let params = ConstParams::new(alpha, c, n, small.len(), large.len())?;
    if params.main_path() {
        main_path(small, large, params, n, session)
    } else {
        fallback(small, large, params, universe, session)
    }
}

fn fallback(
    small: &MultisetSeq,
    large: &MultisetSeq,
    params: ConstParams,
    universe: &Universe,
    session: Session<'_>,
) -> Result<Approx2Outcome> {
    let mut board = session.open(CostModel::new(universe.bound()).with_count_range(universe.n()));
    let (alice, bob) = (small.owner(), large.owner());
    let outputs = if small.is_empty() {
        // t is public, so an empty Alice is known to everyone
        let v = large.values()[large.len().div_ceil(2) - 1];
        let v = board.post(bob, MessageKind::Value, v)?.payload;
        board.next_round();
        alloc::vec![(bob, v)]
    } else {
        let (median, _) =
            interval_protocol(&mut board, (alice, small.values()), (bob, large.values()), universe, false)?;
        // the outcome is on the board, so both players know it
        alloc::vec![(alice, median), (bob, median)]
    };
    let transcript = board.finalize()?;
    Ok(Approx2Outcome {
        outputs,
        path: Approx2Path::Fallback,
        params,
        alice,
        bob,
        padded: None,
        quantiles: None,
        trace: Vec::new(),
        search_bits: transcript.total_bits(),
        terminal_bits: 0,
        transcript,
    })
}

/// Live window `[lo, hi)` into a player's quantile list.
#[derive(Debug, Clone, Copy)]
struct Window {
    lo: usize,
    hi: usize,
}

impl Window {
    fn median_index(&self) -> usize {
        self.lo + (self.hi - self.lo).div_ceil(2) - 1
    }
}

/// Alice's comparison as posted by Bob.
fn compare_prefixes(pa: u64, pb: u64) -> u64 {
    match pa.cmp(&pb) {
        core::cmp::Ordering::Less => 0,
        core::cmp::Ordering::Equal => 1,
        core::cmp::Ordering::Greater => 2,
    }
}

fn main_path(
    small: &MultisetSeq,
    large: &MultisetSeq,
    params: ConstParams,
    n: u64,
    session: Session<'_>,
) -> Result<Approx2Outcome> {
    let padded = pad_to_3n(small, large, n)?;
    let qa = build_quantiles(&padded.alice, &params)?;
    let qb = build_quantiles(&padded.bob, &params)?;
    let (alice, bob) = (padded.alice.owner(), padded.bob.owner());

    let cost = CostModel::new(4 * params.n_pow2).with_prefix_bits(params.ell);
    let mut board = session.open(cost);
    let mut wa = Window { lo: 0, hi: params.h };
    let mut wb = Window { lo: 0, hi: params.h };
    let mut trace = Vec::new();

    // who outputs: (alice, bob)
    let found: (bool, bool) = loop {
        let size = wa.hi - wa.lo;
        let (ia, ib) = (wa.median_index(), wb.median_index());
        let (xa, xb) = (qa.elements[ia], qb.elements[ib]);
        let pa = board.post(alice, MessageKind::Prefix, params.prefix(xa)?)?.payload;
        let pb = params.prefix(xb)?;
        let verdict = board.post(bob, MessageKind::Signal, compare_prefixes(pa, pb))?.payload;
        board.next_round();
        trace.push(SearchRound {
            size,
            x_alice: xa,
            x_bob: xb,
            prefix_alice: pa,
            prefix_bob: pb,
            pred_alice: ia.checked_sub(1).map(|i| qa.elements[i]),
        });

        match (size, verdict) {
            (1, 1) | (2, 1) => break (true, true),
            (1, 0) => break (true, false),
            (1, _) => break (false, true),
            _ => {}
        }
        // equal prefixes: one fewer element per side, so the quantile
        // median cannot be discarded
        let d = if verdict == 1 { (size - 1) / 2 } else { size / 2 };
        if verdict <= 1 {
            wa.lo += d;
            wb.hi -= d;
        } else {
            wb.lo += d;
            wa.hi -= d;
        }
    };
    let search_bits = board.total_bits();

    let mut outputs = Vec::with_capacity(2);
    let last = trace.last().copied().ok_or(Error::Invariant("empty search"))?;
    for (who, x, yes) in [(alice, last.x_alice, found.0), (bob, last.x_bob, found.1)] {
        if yes {
            let z = board.post(who, MessageKind::Value, x)?.payload;
            if z <= n || z > 2 * n {
                return Err(Error::Invariant("output escaped the padding"));
            }
            outputs.push((who, z - n));
        }
    }
    board.next_round();
    let transcript = board.finalize()?;
    let terminal_bits = transcript.total_bits() - search_bits;
    Ok(Approx2Outcome {
        outputs,
        path: Approx2Path::Main,
        params,
        alice,
        bob,
        padded: Some(padded),
        quantiles: Some((qa, qb)),
        trace,
        search_bits,
        terminal_bits,
        transcript,
    })
}
