//! Value model shared by every protocol: universes, player multisets and the
//! rational parameters that drive the approximate protocols.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// Elements are positive integers drawn from a bounded universe.
pub type Value = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PlayerId(pub usize);

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `⌈log2 x⌉` for `x ≥ 1`; zero for `x ≤ 1`.
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// Values live in `[1, bound]`; `n` is the input range `[1, n]` before any
/// embedding (the two-party constant protocol embeds `[n]` into `[4n]`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Universe {
    n: u64,
    bound: u64,
    bit_width: u32,
}

impl Universe {
    pub fn new(n: u64) -> Result<Self> {
        Self::embedded(n, n)
    }

    pub fn embedded(n: u64, bound: u64) -> Result<Self> {
        if n == 0 || bound < n || bound > (1 << 62) {
            return Err(Error::InvalidUniverse);
        }
        Ok(Universe { n, bound, bit_width: ceil_log2(bound).max(1) })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn bit_width(&self) -> u32 {
        self.bit_width
    }

    pub fn contains(&self, v: Value) -> bool {
        (1..=self.bound).contains(&v)
    }

    /// Default polynomial size cap on a single player's multiset, `n²`.
    pub fn size_cap(&self) -> u64 {
        self.n.saturating_mul(self.n)
    }
}

/// A player's input: a sorted multiset of values.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MultisetSeq {
    owner: PlayerId,
    values: Vec<Value>,
}

impl MultisetSeq {
    /// Sorts `values`; the input order is irrelevant.
    pub fn new(owner: PlayerId, mut values: Vec<Value>) -> Self {
        values.sort_unstable();
        MultisetSeq { owner, values }
    }

    pub fn owner(&self) -> PlayerId {
        self.owner
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Value> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> Option<Value> {
        self.values.first().copied()
    }

    pub fn max(&self) -> Option<Value> {
        self.values.last().copied()
    }

    pub fn is_duplicate_free(&self) -> bool {
        self.values.windows(2).all(|w| w[0] < w[1])
    }

    /// Checks universe membership and the per-player size cap.
    pub fn validate(&self, universe: &Universe, cap: u64) -> Result<()> {
        if self.values.len() as u64 > cap {
            return Err(Error::SizeCapExceeded { player: self.owner, len: self.values.len(), cap });
        }
        for &v in [self.min(), self.max()].iter().flatten() {
            if !universe.contains(v) {
                return Err(Error::ValueOutOfRange { value: v, bound: universe.bound() });
            }
        }
        Ok(())
    }

    /// Number of values `< x`, `== x` and `> x`.
    pub fn split_counts(&self, x: Value) -> (usize, usize, usize) {
        let below = self.values.partition_point(|&v| v < x);
        let upto = self.values.partition_point(|&v| v <= x);
        (below, upto - below, self.values.len() - upto)
    }

    /// Number of values `≤ x`.
    pub fn count_le(&self, x: Value) -> usize {
        self.values.partition_point(|&v| v <= x)
    }
}

/// Multiset sum of all player sequences, sorted.
pub fn multiset_sum(players: &[MultisetSeq]) -> Vec<Value> {
    let mut all: Vec<Value> = players.iter().flat_map(|p| p.values().iter().copied()).collect();
    all.sort_unstable();
    all
}

/// Fails unless every player set is duplicate-free and no value is shared.
pub fn check_disjoint_sets(players: &[MultisetSeq]) -> Result<()> {
    for p in players {
        if let Some(w) = p.values().windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateValue { player: p.owner(), value: w[0] });
        }
    }
    let all = multiset_sum(players);
    match all.windows(2).find(|w| w[0] == w[1]) {
        Some(w) => Err(Error::DisjointnessViolated { value: w[0] }),
        None => Ok(()),
    }
}

/// Largest `q` accepted for [`AlphaRatio`].
pub const MAX_ALPHA_DENOMINATOR: u64 = 64;

/// The mediocrity parameter `α = p/q` with `0 < α < 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlphaRatio {
    p: u64,
    q: u64,
}

impl AlphaRatio {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        Self::with_max_denominator(p, q, MAX_ALPHA_DENOMINATOR)
    }

    /// Like [`AlphaRatio::new`] with a caller-chosen bound on `q`.
    pub fn with_max_denominator(p: u64, q: u64, max_q: u64) -> Result<Self> {
        if p == 0 || q == 0 || 2 * p >= q || q > max_q {
            return Err(Error::InvalidAlpha { p, q });
        }
        Ok(AlphaRatio { p, q })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `αt ≤ rank ≤ (1 − α)t`, compared exactly.
    pub fn window_contains(&self, t: u64, rank: u64) -> bool {
        let (p, q) = (self.p as u128, self.q as u128);
        let (t, r) = (t as u128, rank as u128);
        p * t <= q * r && q * r <= (q - p) * t
    }

    /// `len ≤ (1/2 − α)·t`, compared exactly.
    pub fn slack_covers(&self, len: u64, t: u64) -> bool {
        2 * self.q as u128 * len as u128 <= (self.q - 2 * self.p) as u128 * t as u128
    }

    /// `⌊αt⌋`.
    pub fn floor_of(&self, t: u64) -> u64 {
        (self.p as u128 * t as u128 / self.q as u128) as u64
    }
}

impl fmt::Display for AlphaRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for AlphaRatio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let r = parse_fraction(s).ok_or(Error::InvalidAlpha { p: 0, q: 0 })?;
        AlphaRatio::new(r.0, r.1)
    }
}

/// A rational in `(0, 1]`, used for the density constant `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    num: u64,
    den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 || num > den {
            return Err(Error::InvalidRatio { num, den });
        }
        Ok(Ratio { num, den })
    }

    pub fn one() -> Self {
        Ratio { num: 1, den: 1 }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    /// `t ≥ c·n`.
    pub fn density_holds(&self, t: u64, n: u64) -> bool {
        self.den as u128 * t as u128 >= self.num as u128 * n as u128
    }

    /// `⌈c·n⌉`.
    pub fn ceil_mul(&self, n: u64) -> u64 {
        ((self.num as u128 * n as u128).div_ceil(self.den as u128)) as u64
    }

    /// Smallest `k` with `2^-k ≤ self`, i.e. `1/c` rounded up to a power of two.
    pub fn reciprocal_log2_ceil(&self) -> u32 {
        let mut k = 0;
        while (self.num as u128) << k < self.den as u128 {
            k += 1;
        }
        k
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Ratio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let r = parse_fraction(s).ok_or(Error::InvalidRatio { num: 0, den: 0 })?;
        Ratio::new(r.0, r.1)
    }
}

fn parse_fraction(s: &str) -> Option<(u64, u64)> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => Some((a.trim().parse().ok()?, b.trim().parse().ok()?)),
        None => Some((s.parse().ok()?, 1)),
    }
}

/// `(i, j)`-mediocrity over a ground set of `total` elements: not among the
/// top `top` and not among the bottom `bottom`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MediocreSpec {
    top: u64,
    bottom: u64,
    total: u64,
}

impl MediocreSpec {
    pub fn new(top: u64, bottom: u64, total: u64) -> Result<Self> {
        if top + bottom >= total {
            return Err(Error::InvalidMediocreSpec { top, bottom, total });
        }
        Ok(MediocreSpec { top, bottom, total })
    }

    /// The tightest spec met by the `⌈t/2⌉`-th smallest element:
    /// top `⌊t/2⌋`, bottom `⌊(t−1)/2⌋`.
    pub fn median(total: u64) -> Result<Self> {
        Self::new(total / 2, total.saturating_sub(1) / 2, total)
    }

    pub fn top(&self) -> u64 {
        self.top
    }

    pub fn bottom(&self) -> u64 {
        self.bottom
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

/// Position of a value relative to a ground multiset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RankInfo {
    pub below: u64,
    pub equal: u64,
    pub above: u64,
}

impl RankInfo {
    pub fn total(&self) -> u64 {
        self.below + self.equal + self.above
    }

    /// 1-based rank of the first occurrence; meaningful for members.
    pub fn rank(&self) -> u64 {
        self.below + 1
    }
}
