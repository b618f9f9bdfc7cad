//! `k`-party approximate median on dense disjoint sets.
//!
//! The players keep a value interval `[a, b]` with fewer than `⌈t/2⌉`
//! elements `≤ a` and at least `⌈t/2⌉` elements `≤ b`, and halve it with one
//! COUNT per player per round. Once `b − a ≤ (½ − α)t` any element inside
//! the interval has rank in `[αt, (1−α)t]`; the players then report in id
//! order until one of them posts such an element.
//!
//! When `t ≥ cn` the interval gets short enough after
//! `ℓ = ⌈log2(2q/c)⌉` rounds, independent of `n`.

use alloc::vec::Vec;

use crate::channel::{CostModel, MessageKind, Session, Transcript};
use crate::error::{Error, Result};
use crate::value::{check_disjoint_sets, AlphaRatio, MultisetSeq, PlayerId, Ratio, Universe, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ApproxParams {
    pub alpha: AlphaRatio,
    pub c: Ratio,
    /// Size of the union, known to every player in advance.
    pub t: u64,
}

impl ApproxParams {
    pub fn new(alpha: AlphaRatio, c: Ratio, t: u64) -> Self {
        ApproxParams { alpha, c, t }
    }

    /// `ℓ = ⌈log2(2q/c)⌉`.
    pub fn ell(&self) -> u32 {
        // smallest k with num·2^k ≥ 2q·den
        let target = 2 * self.alpha.q() as u128 * self.c.den() as u128;
        let mut k = 0;
        while (self.c.num() as u128) << k < target {
            k += 1;
        }
        k
    }

    /// `(½ − α)t < 1`: no interval of positive length is short enough, so
    /// the search runs to the exact median.
    pub fn exact_mode(&self) -> bool {
        let (p, q) = (self.alpha.p(), self.alpha.q());
        ((q - 2 * p) as u128 * self.t as u128) < 2 * q as u128
    }

    fn stop(&self, a: Value, b: Value) -> bool {
        if self.exact_mode() {
            b - a <= 1
        } else {
            self.alpha.slack_covers(b - a, self.t)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxKOutcome {
    pub value: Value,
    /// Who posted the value; `None` when the search ended on the exact median.
    pub reporter: Option<PlayerId>,
    pub exact: bool,
    /// Interval before each halving round and, last, the final interval.
    pub intervals: Vec<(Value, Value)>,
    pub halving_rounds: u32,
    pub transcript: Transcript,
}

pub(crate) fn validate_dense_disjoint(players: &[MultisetSeq], universe: &Universe) -> Result<u64> {
    for p in players {
        p.validate(universe, universe.n())?;
        if let Some(w) = p.values().windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateValue { player: p.owner(), value: w[0] });
        }
    }
    check_disjoint_sets(players)?;
    Ok(players.iter().map(|p| p.len() as u64).sum())
}

pub fn approx_medk(players: &[MultisetSeq], universe: &Universe, params: ApproxParams) -> Result<ApproxKOutcome> {
    approx_medk_in(players, universe, params, Session::Fresh)
}

pub fn approx_medk_in(
    players: &[MultisetSeq],
    universe: &Universe,
    params: ApproxParams,
    session: Session<'_>,
) -> Result<ApproxKOutcome> {
    let actual = validate_dense_disjoint(players, universe)?;
    if actual == 0 {
        return Err(Error::EmptyMultiset);
    }
    if actual != params.t {
        return Err(Error::TotalMismatch { declared: params.t, actual });
    }
    let n = universe.n();
    if !params.c.density_holds(params.t, n) {
        return Err(Error::DensityPrecondition { t: params.t, n });
    }

    let mut players: Vec<&MultisetSeq> = players.iter().collect();
    players.sort_by_key(|p| p.owner());
    let mut board = session.open(CostModel::new(universe.bound()).with_count_range(n));
    let half = params.t.div_ceil(2);

    // a = 0 keeps "fewer than ⌈t/2⌉ elements ≤ a" true even if the median is 1
    let (mut a, mut b): (Value, Value) = (0, n);
    let mut intervals = Vec::new();
    let mut halving_rounds = 0;
    while !params.stop(a, b) {
        intervals.push((a, b));
        let mid = a + (b - a) / 2;
        let mut below = 0u64;
        for p in &players {
            below += board.post(p.owner(), MessageKind::Count, p.count_le(mid) as u64)?.payload;
        }
        board.next_round();
        halving_rounds += 1;
        if below < half {
            a = mid;
        } else {
            b = mid;
        }
    }
    intervals.push((a, b));

    if params.exact_mode() {
        return Ok(ApproxKOutcome {
            value: b,
            reporter: None,
            exact: true,
            intervals,
            halving_rounds,
            transcript: board.finalize()?,
        });
    }

    for p in &players {
        let lo = p.values().partition_point(|&v| v < a);
        match p.values().get(lo).filter(|&&v| v <= b) {
            Some(&z) => {
                let z = board.post(p.owner(), MessageKind::Value, z)?.payload;
                board.next_round();
                return Ok(ApproxKOutcome {
                    value: z,
                    reporter: Some(p.owner()),
                    exact: false,
                    intervals,
                    halving_rounds,
                    transcript: board.finalize()?,
                });
            }
            None => {
                board.post(p.owner(), MessageKind::Signal, 0)?;
            }
        }
    }
    Err(Error::Invariant("no player holds an element of the final interval"))
}
