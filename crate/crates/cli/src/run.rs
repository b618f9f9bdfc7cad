//! Runs one protocol on one instance and judges it with the oracles.

use std::fmt;

use mediocre::approx2::{approx_med2, Approx2Path, ConstParams};
use mediocre::approxk::{approx_medk, ApproxParams};
use mediocre::exact2::{median2_count, median2_halving, median2_interval, MedianOutcome};
use mediocre::exactk::{mediank, MedianKOptions, PrunePoset};
use mediocre::oracle::{oracle_median, oracle_rank};
use mediocre::{AlphaRatio, PlayerId, Ratio, Transcript, Value};
use thiserror::Error;

use crate::instance::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Protocol {
    Count2,
    Halve2,
    Interval2,
    Mediank,
    Approxk,
    Approx2,
}

impl Protocol {
    pub const ALL: [Protocol; 6] =
        [Protocol::Count2, Protocol::Halve2, Protocol::Interval2, Protocol::Mediank, Protocol::Approxk, Protocol::Approx2];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Count2 => "count2",
            Protocol::Halve2 => "halve2",
            Protocol::Interval2 => "interval2",
            Protocol::Mediank => "mediank",
            Protocol::Approxk => "approxk",
            Protocol::Approx2 => "approx2",
        }
    }

    pub fn is_two_party(self) -> bool {
        matches!(self, Protocol::Count2 | Protocol::Halve2 | Protocol::Interval2 | Protocol::Approx2)
    }

    pub fn is_approximate(self) -> bool {
        matches!(self, Protocol::Approxk | Protocol::Approx2)
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    ExactMatch,
    MediocreOk,
    Fail,
    Skipped,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::ExactMatch => "EXACT_MATCH",
            Verdict::MediocreOk => "MEDIOCRE_OK",
            Verdict::Fail => "FAIL",
            Verdict::Skipped => "SKIPPED",
        })
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{protocol} needs exactly 2 players, the instance has {k}")]
    PlayerCount { protocol: Protocol, k: usize },
    #[error(transparent)]
    Protocol(#[from] mediocre::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunParams {
    pub alpha: AlphaRatio,
    pub c: Ratio,
    pub assert_lemma1: bool,
    pub verify: bool,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams {
            alpha: AlphaRatio::new(1, 4).expect("1/4 is a valid alpha"),
            c: Ratio::new(1, 2).expect("1/2 is a valid density"),
            assert_lemma1: false,
            verify: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutputRank {
    pub player: Option<PlayerId>,
    pub value: Value,
    /// Lowest rank the value occupies in the multiset sum (0 if absent).
    pub rank: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunRecord {
    pub protocol: Protocol,
    pub n: u64,
    pub k: usize,
    pub t: u64,
    pub alpha: Option<AlphaRatio>,
    pub c: Option<Ratio>,
    pub total_bits: u64,
    pub rounds: u32,
    /// approx2 only: bits before any output was posted.
    pub search_bits: Option<u64>,
    pub outputs: Vec<OutputRank>,
    /// Admissible closed rank window `[αt, (1−α)t]`, rounded inwards.
    pub rank_window: Option<(u64, u64)>,
    pub verdict: Verdict,
    pub transcript: Transcript,
    pub posets: Vec<PrunePoset>,
}

pub const SWEEP_HEADER: &str = "protocol,n,k,t,alpha,c,total_bits,rounds,verdict";
pub const RUN_HEADER: &str = "protocol,n,k,t,alpha,c,total_bits,rounds,verdict,outputs,rank_window,search_bits";

fn opt<T: fmt::Display>(x: &Option<T>) -> String {
    x.as_ref().map(T::to_string).unwrap_or_default()
}

impl RunRecord {
    pub fn sweep_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.protocol,
            self.n,
            self.k,
            self.t,
            opt(&self.alpha),
            opt(&self.c),
            self.total_bits,
            self.rounds,
            self.verdict
        )
    }

    pub fn run_row(&self) -> String {
        let outputs: Vec<String> = self
            .outputs
            .iter()
            .map(|o| format!("{}:{}:{}", o.player.map(|p| p.to_string()).unwrap_or_else(|| "*".into()), o.value, o.rank))
            .collect();
        let window = self.rank_window.map(|(lo, hi)| format!("{lo}..{hi}")).unwrap_or_default();
        format!("{},{},{},{}", self.sweep_row(), outputs.join(";"), window, opt(&self.search_bits))
    }

    /// Transcript export, followed by one `POSET` line per pruning round.
    pub fn transcript_text(&self) -> String {
        let mut text = self.transcript.to_text();
        for (round, p) in self.posets.iter().enumerate() {
            text.push_str(&format!("POSET round={round} {p}\n"));
        }
        text
    }
}

/// What the protocol produced, before judging.
struct Raw {
    outputs: Vec<(Option<PlayerId>, Value)>,
    transcript: Transcript,
    search_bits: Option<u64>,
    posets: Vec<PrunePoset>,
}

fn exact_raw(out: MedianOutcome) -> Raw {
    Raw { outputs: vec![(None, out.median)], transcript: out.transcript, search_bits: None, posets: vec![] }
}

/// The closed window `⌈αt⌉ ..= ⌊(1−α)t⌋`.
pub fn rank_window(alpha: AlphaRatio, t: u64) -> (u64, u64) {
    let (p, q) = (alpha.p() as u128, alpha.q() as u128);
    let t = t as u128;
    ((p * t).div_ceil(q) as u64, ((q - p) * t / q) as u64)
}

pub fn run(protocol: Protocol, instance: &Instance, params: &RunParams) -> Result<RunRecord, RunError> {
    let universe = instance.universe();
    let players = &instance.players;
    if protocol.is_two_party() && players.len() != 2 {
        return Err(RunError::PlayerCount { protocol, k: players.len() });
    }
    let t = instance.t();

    let raw = match protocol {
        Protocol::Count2 => exact_raw(median2_count(&players[0], &players[1], &universe)?),
        Protocol::Halve2 => exact_raw(median2_halving(&players[0], &players[1], &universe)?),
        Protocol::Interval2 => exact_raw(median2_interval(&players[0], &players[1], &universe)?),
        Protocol::Mediank => {
            let out = mediank(players, &universe, MedianKOptions { assert_lemma1: params.assert_lemma1 })?;
            Raw { outputs: vec![(None, out.median)], transcript: out.transcript, search_bits: None, posets: out.posets }
        }
        Protocol::Approxk => {
            let out = approx_medk(players, &universe, ApproxParams::new(params.alpha, params.c, t))?;
            Raw { outputs: vec![(out.reporter, out.value)], transcript: out.transcript, search_bits: None, posets: vec![] }
        }
        Protocol::Approx2 => {
            let out = approx_med2(&players[0], &players[1], params.alpha, params.c, &universe)?;
            let search = (out.path == Approx2Path::Main).then_some(out.search_bits);
            Raw {
                outputs: out.outputs.into_iter().map(|(p, v)| (Some(p), v)).collect(),
                transcript: out.transcript,
                search_bits: search,
                posets: vec![],
            }
        }
    };

    // every judgement below is the harness's own: parameters are recomputed
    // from (α, c, n, t) and values are checked against the oracles
    let ground = instance.ground();
    let outputs: Vec<OutputRank> = raw
        .outputs
        .iter()
        .map(|&(player, value)| {
            let r = oracle_rank(&ground, value);
            OutputRank { player, value, rank: if r.equal > 0 { r.rank() } else { 0 } }
        })
        .collect();

    let expects_exact = match protocol {
        Protocol::Approxk => ApproxParams::new(params.alpha, params.c, t).exact_mode(),
        Protocol::Approx2 => {
            let sizes = (players[0].len().min(players[1].len()), players[0].len().max(players[1].len()));
            !ConstParams::new(params.alpha, params.c, instance.n, sizes.0, sizes.1)?.main_path()
        }
        _ => true,
    };
    let window = protocol.is_approximate().then(|| rank_window(params.alpha, t));

    let verdict = if !params.verify {
        Verdict::Skipped
    } else if outputs.is_empty() {
        Verdict::Fail
    } else if expects_exact {
        let median = oracle_median(&ground)?;
        if outputs.iter().all(|o| o.value == median) {
            Verdict::ExactMatch
        } else {
            Verdict::Fail
        }
    } else if outputs.iter().all(|o| o.rank > 0 && params.alpha.window_contains(t, o.rank)) {
        Verdict::MediocreOk
    } else {
        Verdict::Fail
    };

    let approx = protocol.is_approximate();
    Ok(RunRecord {
        protocol,
        n: instance.n,
        k: instance.k(),
        t,
        alpha: approx.then_some(params.alpha),
        c: approx.then_some(params.c),
        total_bits: raw.transcript.total_bits(),
        rounds: raw.transcript.rounds(),
        search_bits: raw.search_bits,
        outputs,
        rank_window: window,
        verdict,
        transcript: raw.transcript,
        posets: raw.posets,
    })
}
