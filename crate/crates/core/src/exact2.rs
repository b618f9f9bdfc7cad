//! Two-party exact median protocols.
//!
//! All three compute `Med(A ⊎ B)`, the `⌈|A ⊎ B|/2⌉`-th smallest element of
//! the multiset sum:
//!
//! * [`median2_count`]: binary search on the value range; Alice posts three
//!   counts per round and Bob answers with a trichotomy signal.
//!   `O(log n)` rounds of `O(log n)` bits.
//! * [`median2_halving`]: both players post the medians of their live
//!   slices; the lower one drops its lower half and the higher one its upper
//!   half. `O(log n)` rounds of `O(log n)` bits.
//! * [`median2_interval`]: the same halving, but the medians are only ever
//!   compared against the midpoint of a shared value interval, so each test
//!   costs a constant number of bits. `O(log n)` bits overall.

use alloc::vec::Vec;

use crate::channel::{Board, CostModel, MessageKind, Session, Transcript};
use crate::error::{Error, Result};
use crate::reduce::{padding_plan, PadPlan};
use crate::value::{MultisetSeq, PlayerId, Universe, Value};

/// Ternary comparison outcome carried by a SIGNAL.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trichotomy {
    Less = 0,
    Equal = 1,
    Greater = 2,
}

impl Trichotomy {
    pub fn of(x: Value, pivot: Value) -> Self {
        match x.cmp(&pivot) {
            core::cmp::Ordering::Less => Trichotomy::Less,
            core::cmp::Ordering::Equal => Trichotomy::Equal,
            core::cmp::Ordering::Greater => Trichotomy::Greater,
        }
    }

    pub fn from_payload(p: u64) -> Result<Self> {
        match p {
            0 => Ok(Trichotomy::Less),
            1 => Ok(Trichotomy::Equal),
            2 => Ok(Trichotomy::Greater),
            _ => Err(Error::Invariant("signal outside trichotomy")),
        }
    }

    pub fn payload(self) -> u64 {
        self as u64
    }
}

/// The shared value interval `[lo, hi]` known to contain the median.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntervalState {
    pub lo: Value,
    pub hi: Value,
}

/// The surviving contiguous slice `[live_lo, live_hi)` of a player's sorted
/// (padded) input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalvingState {
    pub live_lo: usize,
    pub live_hi: usize,
}

impl HalvingState {
    fn full(len: usize) -> Self {
        HalvingState { live_lo: 0, live_hi: len }
    }

    pub fn len(&self) -> usize {
        self.live_hi - self.live_lo
    }

    pub fn is_empty(&self) -> bool {
        self.live_hi == self.live_lo
    }

    /// Index of the lower median of the live slice.
    pub fn median_index(&self) -> usize {
        self.live_lo + self.len().div_ceil(2) - 1
    }

    fn drop_low(&mut self, k: usize) {
        self.live_lo += k;
    }

    fn drop_high(&mut self, k: usize) {
        self.live_hi -= k;
    }
}

/// What the players could see in one round; kept for invariant checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundTrace {
    pub interval: Option<IntervalState>,
    /// `(a*, b*)`: the live-slice medians, when they were determined.
    pub medians: Option<(Value, Value)>,
    /// Live slice sizes at the start of the round.
    pub live: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MedianOutcome {
    pub median: Value,
    pub transcript: Transcript,
    pub trace: Vec<RoundTrace>,
}

fn check_inputs(a: &MultisetSeq, b: &MultisetSeq, universe: &Universe) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyMultiset);
    }
    a.validate(universe, universe.size_cap())?;
    b.validate(universe, universe.size_cap())
}

fn board_for(universe: &Universe, session: Session<'_>) -> Board {
    session.open(CostModel::new(universe.bound()).with_count_range(universe.size_cap()))
}

pub fn median2_count(a: &MultisetSeq, b: &MultisetSeq, universe: &Universe) -> Result<MedianOutcome> {
    median2_count_in(a, b, universe, Session::Fresh)
}

pub fn median2_count_in(
    a: &MultisetSeq,
    b: &MultisetSeq,
    universe: &Universe,
    session: Session<'_>,
) -> Result<MedianOutcome> {
    check_inputs(a, b, universe)?;
    // counts are metered against Alice's own set size
    let mut board = session
        .open(CostModel::new(universe.bound()).with_count_range(a.len() as u64));
    let (alice, bob) = (a.owner(), b.owner());
    let total = a.len() + b.len();
    let target = total.div_ceil(2);
    let mut iv = IntervalState { lo: 1, hi: universe.bound() };
    let mut trace = Vec::new();

    let median = loop {
        trace.push(RoundTrace { interval: Some(iv), medians: None, live: (a.len(), b.len()) });
        if iv.lo == iv.hi {
            break iv.lo;
        }
        let mid = iv.lo + (iv.hi - iv.lo) / 2;

        let (below, equal, above) = a.split_counts(mid);
        let below = board.post(alice, MessageKind::Count, below as u64)?.payload as usize;
        let equal = board.post(alice, MessageKind::Count, equal as u64)?.payload as usize;
        board.post(alice, MessageKind::Count, above as u64)?;

        let (b_below, b_equal, _) = b.split_counts(mid);
        let verdict = if below + b_below >= target {
            Trichotomy::Less
        } else if below + b_below + equal + b_equal >= target {
            Trichotomy::Equal
        } else {
            Trichotomy::Greater
        };
        let verdict =
            Trichotomy::from_payload(board.post(bob, MessageKind::Signal, verdict.payload())?.payload)?;
        board.next_round();

        match verdict {
            Trichotomy::Less => iv.hi = mid - 1,
            Trichotomy::Equal => break mid,
            Trichotomy::Greater => iv.lo = mid + 1,
        }
        if iv.lo > iv.hi {
            return Err(Error::Invariant("median left the search interval"));
        }
    };
    Ok(MedianOutcome { median, transcript: board.finalize()?, trace })
}

/// One party of a halving protocol: its padded sorted input and live slice.
struct HalvingPlayer {
    id: PlayerId,
    values: Vec<Value>,
    state: HalvingState,
}

impl HalvingPlayer {
    fn padded(id: PlayerId, own: &[Value], plan: PadPlan, universe: &Universe) -> Self {
        let mut values = Vec::with_capacity(own.len() + plan.minima + plan.maxima);
        values.extend(core::iter::repeat_n(1, plan.minima));
        values.extend_from_slice(own);
        values.extend(core::iter::repeat_n(universe.bound(), plan.maxima));
        let state = HalvingState::full(values.len());
        HalvingPlayer { id, values, state }
    }

    fn median(&self) -> Value {
        self.values[self.state.median_index()]
    }

    fn single(&self) -> bool {
        self.state.len() == 1
    }
}

/// Announces sizes (unless already public) and pads both players to a common
/// power-of-two size with the universe sentinels.
fn exchange_and_pad(
    board: &mut Board,
    alice: (PlayerId, &[Value]),
    bob: (PlayerId, &[Value]),
    universe: &Universe,
    sizes_public: bool,
) -> Result<(HalvingPlayer, HalvingPlayer)> {
    let (mut sa, mut sb) = (alice.1.len(), bob.1.len());
    if !sizes_public {
        sa = board.post(alice.0, MessageKind::Count, sa as u64)?.payload as usize;
        sb = board.post(bob.0, MessageKind::Count, sb as u64)?.payload as usize;
        board.next_round();
    }
    let common = sa.max(sb).next_power_of_two();
    let plans = padding_plan(&[sa, sb], &[common, common])?;
    Ok((
        HalvingPlayer::padded(alice.0, alice.1, plans[0], universe),
        HalvingPlayer::padded(bob.0, bob.1, plans[1], universe),
    ))
}

/// The lower side drops its lower half (its median included), the higher
/// side its upper half.
fn halve(low: &mut HalvingPlayer, high: &mut HalvingPlayer) {
    let k = low.state.len() / 2;
    low.state.drop_low(k);
    high.state.drop_high(k);
}

pub fn median2_halving(a: &MultisetSeq, b: &MultisetSeq, universe: &Universe) -> Result<MedianOutcome> {
    median2_halving_in(a, b, universe, Session::Fresh)
}

pub fn median2_halving_in(
    a: &MultisetSeq,
    b: &MultisetSeq,
    universe: &Universe,
    session: Session<'_>,
) -> Result<MedianOutcome> {
    check_inputs(a, b, universe)?;
    let mut board = board_for(universe, session);
    let (mut pa, mut pb) =
        exchange_and_pad(&mut board, (a.owner(), a.values()), (b.owner(), b.values()), universe, false)?;
    let mut trace = Vec::new();

    let median = loop {
        let live = (pa.state.len(), pb.state.len());
        let ma = board.post(pa.id, MessageKind::Value, pa.median())?.payload;
        let mb = board.post(pb.id, MessageKind::Value, pb.median())?.payload;
        board.next_round();
        trace.push(RoundTrace { interval: None, medians: Some((ma, mb)), live });

        if ma == mb {
            break ma;
        }
        if pa.single() && pb.single() {
            break ma.min(mb);
        }
        if ma < mb {
            halve(&mut pa, &mut pb);
        } else {
            halve(&mut pb, &mut pa);
        }
    };
    Ok(MedianOutcome { median, transcript: board.finalize()?, trace })
}

pub fn median2_interval(a: &MultisetSeq, b: &MultisetSeq, universe: &Universe) -> Result<MedianOutcome> {
    median2_interval_in(a, b, universe, Session::Fresh)
}

pub fn median2_interval_in(
    a: &MultisetSeq,
    b: &MultisetSeq,
    universe: &Universe,
    session: Session<'_>,
) -> Result<MedianOutcome> {
    check_inputs(a, b, universe)?;
    let mut board = board_for(universe, session);
    let (median, trace) = interval_protocol(
        &mut board,
        (a.owner(), a.values()),
        (b.owner(), b.values()),
        universe,
        false,
    )?;
    Ok(MedianOutcome { median, transcript: board.finalize()?, trace })
}

/// The constant-bits-per-test interval protocol, on a shared board. With
/// `sizes_public` the size announcement is skipped (the k-party endgame
/// already tracks every cardinality).
pub(crate) fn interval_protocol(
    board: &mut Board,
    alice: (PlayerId, &[Value]),
    bob: (PlayerId, &[Value]),
    universe: &Universe,
    sizes_public: bool,
) -> Result<(Value, Vec<RoundTrace>)> {
    let (mut pa, mut pb) = exchange_and_pad(board, alice, bob, universe, sizes_public)?;
    let mut iv = IntervalState { lo: 1, hi: universe.bound() };
    let mut trace = Vec::new();

    let median = loop {
        let live = (pa.state.len(), pb.state.len());
        if iv.lo == iv.hi {
            trace.push(RoundTrace { interval: Some(iv), medians: None, live });
            break iv.lo;
        }
        if pa.single() && pb.single() {
            let va = board.post(pa.id, MessageKind::Value, pa.median())?.payload;
            let vb = board.post(pb.id, MessageKind::Value, pb.median())?.payload;
            board.next_round();
            trace.push(RoundTrace { interval: Some(iv), medians: Some((va, vb)), live });
            break va.min(vb);
        }
        let pivot = iv.lo + (iv.hi - iv.lo) / 2;
        let sa = Trichotomy::of(pa.median(), pivot);
        let sa = Trichotomy::from_payload(board.post(pa.id, MessageKind::Signal, sa.payload())?.payload)?;
        let sb = Trichotomy::of(pb.median(), pivot);
        let sb = Trichotomy::from_payload(board.post(pb.id, MessageKind::Signal, sb.payload())?.payload)?;
        board.next_round();
        trace.push(RoundTrace { interval: Some(iv), medians: Some((pa.median(), pb.median())), live });

        use Trichotomy::*;
        match (sa, sb) {
            (Equal, Equal) => break pivot,
            (Less, Less) => iv.hi = pivot - 1,
            (Greater, Greater) => iv.lo = pivot + 1,
            // split by the pivot, and not both on it: a* < b*
            (Less, _) | (Equal, Greater) => halve(&mut pa, &mut pb),
            // b* < a*
            (Greater, _) | (Equal, Less) => halve(&mut pb, &mut pa),
        }
        if iv.lo > iv.hi {
            return Err(Error::Invariant("median left the search interval"));
        }
    };
    Ok((median, trace))
}
