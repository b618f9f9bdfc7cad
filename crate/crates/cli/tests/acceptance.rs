//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use mediocre::approx2::{approx_med2, Approx2Outcome, Approx2Path, ConstParams};
use mediocre::approxk::{approx_medk, ApproxParams};
use mediocre::exact2::{median2_count, median2_halving, median2_interval};
use mediocre::exactk::{mediank, MedianKOptions, PrunePoset};
use mediocre::oracle::{oracle_median, oracle_rank, oracle_select};
use mediocre::reduce::reduce_selection_to_median;
use mediocre::value::{ceil_log2, multiset_sum};
use mediocre::{AlphaRatio, MultisetSeq, PlayerId, Ratio, Universe, Value};
use mediocre_cli::gen::{generate_with, rng_for, GenMode, GenParams};
use mediocre_cli::run::{run, Protocol, RunParams, Verdict};
use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;

type Check = Result<String, String>;
type Criterion = fn() -> Check;

const SEED: u64 = 0x5eed;

fn alpha(p: u64, q: u64) -> AlphaRatio {
    AlphaRatio::with_max_denominator(p, q, 1000).unwrap()
}

fn ratio(num: u64, den: u64) -> Ratio {
    Ratio::new(num, den).unwrap()
}

fn players(sets: Vec<Vec<Value>>) -> Vec<MultisetSeq> {
    sets.into_iter().enumerate().map(|(i, s)| MultisetSeq::new(PlayerId(i), s)).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// The exact median of `ps` as computed by each exact protocol that applies.
fn exact_answers(ps: &[MultisetSeq], u: &Universe) -> Result<Vec<(&'static str, Value)>, String> {
    let e = |e: mediocre::Error| e.to_string();
    let mut out = vec![("mediank", mediank(ps, u, MedianKOptions { assert_lemma1: true }).map_err(e)?.median)];
    if ps.len() == 2 && !ps[0].is_empty() && !ps[1].is_empty() {
        out.push(("count2", median2_count(&ps[0], &ps[1], u).map_err(e)?.median));
        out.push(("halve2", median2_halving(&ps[0], &ps[1], u).map_err(e)?.median));
        out.push(("interval2", median2_interval(&ps[0], &ps[1], u).map_err(e)?.median));
    }
    Ok(out)
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let per_protocol = 1000;
    let mut runs = 0;
    for protocol in [Protocol::Count2, Protocol::Halve2, Protocol::Interval2, Protocol::Mediank] {
        for trial in 0..per_protocol {
            let mut rng = rng_for(SEED ^ 1, (protocol as u64) << 32 | trial);
            let n = rng.gen_range(2..=1024u64);
            let k = if protocol == Protocol::Mediank { rng.gen_range(1..=8) } else { 2 };
            let max_len = rng.gen_range(1..=256usize);
            let inst = generate_with(&mut rng, &GenParams::new(n, k, GenMode::Multiset).with_max_len(max_len))
                .map_err(|e| e.to_string())?;
            let rec = run(protocol, &inst, &RunParams::default()).map_err(|e| format!("{protocol} trial {trial}: {e}"))?;
            ensure(rec.verdict == Verdict::ExactMatch, || format!("{protocol} trial {trial}: {:?}", rec.outputs))?;
            runs += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("{runs} runs took {secs:.1}s"))?;
    Ok(format!("{runs} runs, all equal to the oracle median, {secs:.1}s"))
}

/// All multisets over `[4]` with at most `max` elements.
fn multisets_over_4(max: usize) -> Vec<Vec<Value>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max {
        let mut next = Vec::new();
        for s in &frontier {
            let from = s.last().copied().unwrap_or(1);
            for v in from..=4 {
                let mut t: Vec<Value> = s.clone();
                t.push(v);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn criterion_2() -> Check {
    let u = Universe::new(4).unwrap();
    let all = multisets_over_4(4);
    let mut pairs = 0;
    for a in &all {
        for b in &all {
            if a.is_empty() && b.is_empty() {
                continue;
            }
            let ps = players(vec![a.clone(), b.clone()]);
            let want = oracle_median(&multiset_sum(&ps)).unwrap();
            for (name, got) in exact_answers(&ps, &u)? {
                ensure(got == want, || format!("{name} on {a:?},{b:?}: {got} ≠ {want}"))?;
            }
            pairs += 1;
        }
    }
    let small: Vec<Vec<Value>> = all.iter().filter(|s| (1..=2).contains(&s.len())).cloned().collect();
    let mut triples = 0;
    let mut all_doubletons = 0;
    for a in &small {
        for b in &small {
            for c in &small {
                let ps = players(vec![a.clone(), b.clone(), c.clone()]);
                let want = oracle_median(&multiset_sum(&ps)).unwrap();
                let got = mediank(&ps, &u, MedianKOptions { assert_lemma1: true }).map_err(|e| e.to_string())?.median;
                ensure(got == want, || format!("mediank on {a:?},{b:?},{c:?}: {got} ≠ {want}"))?;
                triples += 1;
                all_doubletons += usize::from(ps.iter().all(|p| p.len() == 2));
            }
        }
    }
    Ok(format!("{pairs} pairs, {triples} triples ({all_doubletons} with three doubletons)"))
}

fn lemma1(t: u64, u: u64, v: u64) -> bool {
    u >= (t + 1).div_ceil(2) && v >= t.div_ceil(2)
}

fn criterion_3() -> Check {
    for (t, u, v) in [(8, 6, 5), (9, 6, 7), (11, 6, 8), (7, 5, 4)] {
        ensure(lemma1(t, u, v), || format!("static tuple t={t} u={u} v={v}"))?;
    }
    let target = 10_000;
    let mut rounds = 0usize;
    let mut trial = 0u64;
    while rounds < target {
        let mut rng = rng_for(SEED ^ 3, trial);
        let n = rng.gen_range(2..=512u64);
        let k = rng.gen_range(3..=10);
        let inst = generate_with(&mut rng, &GenParams::new(n, k, GenMode::Multiset).allow_empty())
            .map_err(|e| e.to_string())?;
        let out = mediank(&inst.players, &inst.universe(), MedianKOptions { assert_lemma1: true })
            .map_err(|e| format!("trial {trial}: {e}"))?;
        for p in &out.posets {
            let PrunePoset { t, u, v, .. } = *p;
            ensure(p.lemma1_holds() && lemma1(t as u64, u as u64, v as u64), || format!("trial {trial}: {p}"))?;
        }
        rounds += out.posets.len();
        trial += 1;
    }
    Ok(format!("{rounds} pruning rounds over {trial} instances, static tuples hold"))
}

fn worst_ratio(runs: impl ParallelIterator<Item = (u64, f64)>) -> f64 {
    runs.map(|(bits, scale)| bits as f64 / scale).reduce(|| 0.0, f64::max)
}

fn criterion_4() -> Check {
    let trials = 200u64;
    let log = |n: u64| ceil_log2(n) as f64;
    let curve = |protocol: Protocol, n: u64| -> f64 {
        let ks: Vec<usize> = match protocol {
            Protocol::Mediank => (3..=8).collect(),
            Protocol::Approxk => (2..=8).collect(),
            _ => vec![2],
        };
        let mode = if protocol == Protocol::Approxk { GenMode::DisjointDense } else { GenMode::Multiset };
        let jobs: Vec<(usize, u64)> = ks.iter().flat_map(|&k| (0..trials).map(move |i| (k, i))).collect();
        worst_ratio(jobs.into_par_iter().map(|(k, i)| {
            let mut rng = rng_for(SEED ^ 4, n << 40 | (k as u64) << 32 | i);
            let params = GenParams::new(n, k, mode).with_c(ratio(1, 2)).with_max_len(n as usize);
            let inst = generate_with(&mut rng, &params).unwrap();
            let rec = run(protocol, &inst, &RunParams::default()).unwrap();
            assert_ne!(rec.verdict, Verdict::Fail);
            let l = log(n);
            let scale = match protocol {
                Protocol::Interval2 => l,
                Protocol::Count2 | Protocol::Halve2 => l * l,
                Protocol::Mediank => k as f64 * l * l,
                _ => {
                    let ell = ApproxParams::new(alpha(1, 4), ratio(1, 2), inst.t()).ell();
                    ell as f64 * k as f64 * l
                }
            };
            (rec.total_bits, scale)
        }))
    };
    let mut report = Vec::new();
    for protocol in [Protocol::Interval2, Protocol::Count2, Protocol::Halve2, Protocol::Mediank, Protocol::Approxk] {
        let frozen = curve(protocol, 1 << 6);
        let mut worst = 0f64;
        for e in 7..=12 {
            let r = curve(protocol, 1 << e) / frozen;
            ensure(r <= 2.0, || format!("{protocol} at n=2^{e}: {r:.2}× the frozen constant {frozen:.2}"))?;
            worst = worst.max(r);
        }
        report.push(format!("{protocol} C={frozen:.2} worst={worst:.2}×"));
    }
    Ok(report.join(", "))
}

/// Two-party dense instances; every other one gives the first player only a
/// handful of elements.
fn approx2_instance(stream: u64) -> (Vec<MultisetSeq>, u64, AlphaRatio, Ratio) {
    let mut rng = rng_for(SEED ^ 5, stream);
    let n = rng.gen_range(256..=4096u64);
    let (a, c) = [(alpha(1, 4), ratio(1, 2)), (alpha(1, 3), ratio(3, 4)), (alpha(1, 4), ratio(3, 4))][rng.gen_range(0..3)];
    let t = rng.gen_range(c.ceil_mul(n)..=n) as usize;
    let mut chosen: Vec<Value> = sample(&mut rng, n as usize, t).into_iter().map(|v| v as Value + 1).collect();
    let small = if stream.is_multiple_of(2) { rng.gen_range(1..=t / 2) } else { rng.gen_range(1..=8) };
    let mut sets = vec![Vec::new(), Vec::new()];
    // shuffle-free split: a random subset of `small` positions goes to player 0
    let picks: Vec<usize> = sample(&mut rng, t, small).into_vec();
    let mut mine = vec![false; t];
    picks.into_iter().for_each(|i| mine[i] = true);
    for (i, v) in chosen.drain(..).enumerate() {
        sets[usize::from(!mine[i])].push(v);
    }
    (players(sets), n, a, c)
}

fn main_path_runs(count: usize) -> Result<Vec<(Vec<MultisetSeq>, u64, Approx2Outcome)>, String> {
    let mut runs = Vec::with_capacity(count);
    let mut stream = 0;
    while runs.len() < count {
        let (ps, n, a, c) = approx2_instance(stream);
        stream += 1;
        let out = approx_med2(&ps[0], &ps[1], a, c, &Universe::new(n).unwrap()).map_err(|e| e.to_string())?;
        if out.path == Approx2Path::Main {
            runs.push((ps, n, out));
        }
    }
    Ok(runs)
}

fn criterion_5() -> Check {
    let mut bad = Vec::new();
    let mut k_runs = 0;
    for (p, q) in [(1, 3), (1, 4), (49, 100)] {
        let a = alpha(p, q);
        for trial in 0..334 {
            let mut rng = rng_for(SEED ^ 6, q << 32 | trial);
            let n = rng.gen_range(16..=2048u64);
            let k = rng.gen_range(1..=8);
            let c = ratio(rng.gen_range(1..=4), 4);
            let inst = generate_with(&mut rng, &GenParams::new(n, k, GenMode::DisjointDense).with_c(c))
                .map_err(|e| e.to_string())?;
            let t = inst.t();
            let params = ApproxParams::new(a, c, t);
            let out = approx_medk(&inst.players, &inst.universe(), params).map_err(|e| e.to_string())?;
            let ground = inst.ground();
            let r = oracle_rank(&ground, out.value);
            // when (½ − α)t < 1 the window may hold no integer rank at all;
            // there the protocol promises the median itself
            let ok = if params.exact_mode() {
                Some(out.value) == oracle_median(&ground).ok()
            } else {
                r.equal == 1 && a.window_contains(t, r.rank())
            };
            if !ok {
                bad.push(format!("approxk α={a} trial {trial}: rank {} of {t}", r.rank()));
            }
            k_runs += 1;
        }
    }
    let runs = main_path_runs(1000)?;
    for (i, (ps, _, out)) in runs.iter().enumerate() {
        if out.outputs.is_empty() {
            bad.push(format!("approx2 run {i}: no output"));
        }
        let ground = multiset_sum(ps);
        let t = ground.len() as u64;
        for &(who, z) in &out.outputs {
            let r = oracle_rank(&ground, z);
            if r.equal != 1 || !out.params.alpha.window_contains(t, r.rank()) {
                bad.push(format!(
                    "approx2 run {i} player {who}: z={z} rank {} of {t}, α={}, |A|={} |B|={}",
                    r.rank(),
                    out.params.alpha,
                    ps[0].len(),
                    ps[1].len()
                ));
            }
        }
    }
    ensure(bad.is_empty(), || format!("{} outputs outside [αt, (1−α)t]: {}", bad.len(), bad.join("; ")))?;
    Ok(format!("{k_runs} approxk runs and {} approx2 main-path runs inside [αt, (1−α)t]", runs.len()))
}

/// Splits of `[n]` defined relative to `n`, so the same shape exists at
/// every size.
fn adversarial_family(n: u64) -> Vec<Vec<MultisetSeq>> {
    let split = |f: &dyn Fn(u64) -> Option<bool>| {
        let mut sets = vec![Vec::new(), Vec::new()];
        for v in 1..=n {
            if let Some(first) = f(v) {
                sets[usize::from(!first)].push(v);
            }
        }
        players(sets)
    };
    vec![
        split(&|v| Some(v % 2 == 1)),
        split(&|v| Some(v <= n / 2)),
        split(&|v| Some(v > n / 2)),
        split(&|v| Some(((v - 1) / (n / 8)).is_multiple_of(2))),
        split(&|v| Some(v % 4 == 0)),
        split(&|v| (v % 4 != 3).then_some(v <= 3 * n / 4)),
        split(&|v| Some(v > n / 4 && v <= 3 * n / 4)),
    ]
}

fn criterion_6() -> Check {
    let (a, c) = (alpha(1, 4), ratio(1, 2));
    let bound = (7 + 2) * (ceil_log2(4) + 2) as u64;
    let mut per_member: Vec<Vec<u64>> = Vec::new();
    for e in 9..=16 {
        let n = 1u64 << e;
        for (j, ps) in adversarial_family(n).into_iter().enumerate() {
            let out = approx_med2(&ps[0], &ps[1], a, c, &Universe::new(n).unwrap()).map_err(|e| e.to_string())?;
            ensure(out.path == Approx2Path::Main && out.params.ell == 7 && out.params.h == 4, || {
                format!("member {j} at n=2^{e}: path {:?}, ℓ={}, h={}", out.path, out.params.ell, out.params.h)
            })?;
            if per_member.len() <= j {
                per_member.push(Vec::new());
            }
            per_member[j].push(out.search_bits);
        }
    }
    for (j, bits) in per_member.iter().enumerate() {
        ensure(bits.windows(2).all(|w| w[0] == w[1]), || format!("member {j}: search bits vary with n: {bits:?}"))?;
        ensure(bits[0] <= bound, || format!("member {j}: {} search bits > {bound}", bits[0]))?;
    }
    let values: Vec<u64> = per_member.iter().map(|b| b[0]).collect();
    Ok(format!("search bits per family member {values:?}, constant over n=2^9..2^16, bound {bound}"))
}

fn criterion_7() -> Check {
    let runs = main_path_runs(1000)?;
    let mut worst = 0f64;
    let mut pairs = 0;
    let mut bad = Vec::new();
    for (i, (_, n, out)) in runs.iter().enumerate() {
        let params: &ConstParams = &out.params;
        let (qa, qb) = out.quantiles.as_ref().ok_or("main path without quantiles")?;
        let (pa, pb) = (qa.prefixes(params).map_err(|e| e.to_string())?, qb.prefixes(params).map_err(|e| e.to_string())?);
        for p in [&pa, &pb] {
            let mut s = p.clone();
            s.sort_unstable();
            s.dedup();
            ensure(s.len() == p.len(), || format!("run {i}: repeated prefix in {p:?}"))?;
        }
        for (&x, &px) in qa.elements.iter().zip(&pa) {
            for (&y, &py) in qb.elements.iter().zip(&pb) {
                if px != py {
                    continue;
                }
                pairs += 1;
                let gap = x.abs_diff(y) as u128;
                let limit = 3 * *n as u128; // compared as gap · 2^ℓ ≤ 3n
                let r = (gap << params.ell) as f64 / limit as f64;
                worst = worst.max(r);
                if gap << params.ell > limit {
                    bad.push(format!("run {i}: |{x}−{y}|={gap} > 3n/2^ℓ = {}", limit as f64 / (1u64 << params.ell) as f64));
                }
            }
        }
    }
    ensure(bad.is_empty(), || format!("{} of {pairs} equal-prefix pairs too far apart, e.g. {}", bad.len(), bad[0]))?;
    Ok(format!("{} runs, distinct prefixes, {pairs} equal-prefix pairs, worst gap {worst:.2} of 3n/2^ℓ", runs.len()))
}

fn criterion_8() -> Check {
    let mut selections = 0;
    for trial in 0..200 {
        let mut rng = rng_for(SEED ^ 8, trial);
        let n = rng.gen_range(2..=300u64);
        // padding can double the multiset, which must stay within n²
        let len = rng.gen_range(1..=40.min(n * n / 2) as usize);
        let values: Vec<Value> = (0..len).map(|_| rng.gen_range(1..=n)).collect();
        let a = MultisetSeq::new(PlayerId(0), values.clone());
        let u = Universe::new(n).unwrap();
        for i in 1..=len {
            let reduced = reduce_selection_to_median(&a, i).map_err(|e| e.to_string())?;
            let want = oracle_select(&values, i).unwrap();
            // deal the reduced multiset out round-robin to 1–3 players
            let k = rng.gen_range(1..=3);
            let mut sets = vec![Vec::new(); k];
            for (j, &v) in reduced.values().iter().enumerate() {
                sets[j % k].push(v);
            }
            let ps = players(sets);
            for (name, got) in exact_answers(&ps, &u)? {
                ensure(got == want, || format!("trial {trial}, i={i}, {name}: {got} ≠ {want}"))?;
            }
            selections += 1;
        }
    }
    Ok(format!("{selections} selections over 200 instances"))
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 8] = [
        ("exact protocols agree with the oracle", criterion_1),
        ("exhaustive small cases", criterion_2),
        ("pruning size lemma", criterion_3),
        ("bit-scaling curves", criterion_4),
        ("mediocrity guarantees", criterion_5),
        ("constant communication", criterion_6),
        ("prefix structure", criterion_7),
        ("selection reduction", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let (verdict, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {}: {verdict} {name} ({:.1}s): {detail}", i + 1, started.elapsed().as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
