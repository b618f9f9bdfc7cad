//! Brute-force reference answers. Nothing here shares code with the
//! protocols; every verdict in the harness goes through these functions.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::value::{MediocreSpec, RankInfo, Value};

/// The `⌈|x|/2⌉`-th smallest element of `x`, counting multiplicity.
/// `x` need not be sorted.
pub fn oracle_median(x: &[Value]) -> Result<Value> {
    oracle_select(x, x.len().div_ceil(2))
}

/// The `i`-th smallest element (1-based) of `x`, by sorting a copy.
pub fn oracle_select(x: &[Value], i: usize) -> Result<Value> {
    if x.is_empty() {
        return Err(Error::EmptyMultiset);
    }
    if i == 0 || i > x.len() {
        return Err(Error::SelectionOutOfRange { index: i, len: x.len() });
    }
    let mut sorted: Vec<Value> = x.to_vec();
    sorted.sort_unstable();
    Ok(sorted[i - 1])
}

/// Exact below/equal/above counts of `z` over `ground`, by linear scan.
pub fn oracle_rank(ground: &[Value], z: Value) -> RankInfo {
    let mut r = RankInfo::default();
    for &v in ground {
        match v.cmp(&z) {
            core::cmp::Ordering::Less => r.below += 1,
            core::cmp::Ordering::Equal => r.equal += 1,
            core::cmp::Ordering::Greater => r.above += 1,
        }
    }
    r
}

/// Whether member `z` can occupy a rank `r` with `bottom < r ≤ total − top`.
///
/// With duplicates `z` occupies every rank in `below+1 ..= below+equal`; it
/// counts as mediocre if any of them qualifies.
pub fn is_mediocre(ground: &[Value], z: Value, spec: MediocreSpec) -> Result<bool> {
    if spec.total() != ground.len() as u64 {
        return Err(Error::InvalidMediocreSpec {
            top: spec.top(),
            bottom: spec.bottom(),
            total: ground.len() as u64,
        });
    }
    let r = oracle_rank(ground, z);
    if r.equal == 0 {
        return Err(Error::NotAMember { value: z });
    }
    let lowest = r.below + 1;
    let highest = r.below + r.equal;
    Ok(highest > spec.bottom() && lowest <= spec.total() - spec.top())
}

/// The number formed by the `ell` most significant bits of `x` written in
/// `width` bits.
pub fn prefix_bits(x: Value, ell: u32, width: u32) -> Result<u64> {
    if ell > width {
        return Err(Error::PrefixTooWide { ell, width });
    }
    if ell == 0 || width > 64 {
        return Err(Error::PrefixTooWide { ell, width });
    }
    if width < 64 && x >> width != 0 {
        return Err(Error::ValueOutOfRange { value: x, bound: (1u64 << width) - 1 });
    }
    Ok(if ell == 64 { x } else { x >> (width - ell) })
}

/// Nearest strictly smaller and strictly larger values around member `z` of
/// a sorted sequence.
pub fn pred_succ(sorted: &[Value], z: Value) -> Result<(Option<Value>, Option<Value>)> {
    let lo = sorted.partition_point(|&v| v < z);
    let hi = sorted.partition_point(|&v| v <= z);
    if lo == hi {
        return Err(Error::NotAMember { value: z });
    }
    let pred = lo.checked_sub(1).map(|i| sorted[i]);
    let succ = sorted.get(hi).copied();
    Ok((pred, succ))
}
