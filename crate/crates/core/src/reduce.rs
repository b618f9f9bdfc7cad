//! Reductions that let every protocol work on medians only.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::value::{MultisetSeq, Universe, Value};

/// Pads `a` with copies of its minimum or maximum so that the median of the
/// result is the `i`-th smallest element of `a` (1-based).
///
/// With `len = |a|`: `2i < len` adds `len − 2i` minima, `2i > len` adds
/// `2i − len` maxima, otherwise `a` is returned unchanged.
pub fn reduce_selection_to_median(a: &MultisetSeq, i: usize) -> Result<MultisetSeq> {
    let len = a.len();
    if i == 0 || i > len {
        return Err(Error::SelectionOutOfRange { index: i, len });
    }
    let mut values = a.values().to_vec();
    if 2 * i < len {
        let lo = a.min().ok_or(Error::EmptyMultiset)?;
        values.extend(core::iter::repeat_n(lo, len - 2 * i));
    } else if 2 * i > len {
        let hi = a.max().ok_or(Error::EmptyMultiset)?;
        values.extend(core::iter::repeat_n(hi, 2 * i - len));
    }
    Ok(MultisetSeq::new(a.owner(), values))
}

/// How many universe minima and maxima one player appends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PadPlan {
    pub minima: usize,
    pub maxima: usize,
}

/// Splits the total deficit into `L = ⌈(T+D)/2⌉ − ⌈T/2⌉` minima and
/// `H = D − L` maxima, handing them out greedily in player order (minima
/// first). Depends only on sizes, so every player can compute it from the
/// board.
pub fn padding_plan(sizes: &[usize], targets: &[usize]) -> Result<Vec<PadPlan>> {
    if sizes.len() != targets.len() {
        return Err(Error::Invariant("one target per player"));
    }
    let total: usize = sizes.iter().sum();
    let mut deficit = 0;
    for (idx, (&len, &target)) in sizes.iter().zip(targets).enumerate() {
        if target < len {
            return Err(Error::TargetBelowSize {
                player: crate::value::PlayerId(idx),
                target,
                len,
            });
        }
        deficit += target - len;
    }
    if total == 0 && deficit > 0 {
        return Err(Error::EmptyMultiset);
    }
    let mut minima = (total + deficit).div_ceil(2) - total.div_ceil(2);
    let mut plans = Vec::with_capacity(sizes.len());
    for (&len, &target) in sizes.iter().zip(targets) {
        let need = target - len;
        let lo = need.min(minima);
        minima -= lo;
        plans.push(PadPlan { minima: lo, maxima: need - lo });
    }
    Ok(plans)
}

/// Pads each player up to its target with the universe sentinels `1` and
/// `bound`, keeping the median of the multiset sum unchanged.
pub fn pad_preserving_median(
    players: &[MultisetSeq],
    targets: &[usize],
    universe: &Universe,
) -> Result<Vec<MultisetSeq>> {
    let sizes: Vec<usize> = players.iter().map(MultisetSeq::len).collect();
    let plans = padding_plan(&sizes, targets).map_err(|e| match e {
        Error::TargetBelowSize { player, target, len } => {
            Error::TargetBelowSize { player: players[player.0].owner(), target, len }
        }
        other => other,
    })?;
    Ok(players
        .iter()
        .zip(plans)
        .map(|(p, plan)| apply_plan(p, plan, universe))
        .collect())
}

pub(crate) fn apply_plan(p: &MultisetSeq, plan: PadPlan, universe: &Universe) -> MultisetSeq {
    let mut values: Vec<Value> = Vec::with_capacity(p.len() + plan.minima + plan.maxima);
    values.extend(core::iter::repeat_n(1, plan.minima));
    values.extend_from_slice(p.values());
    values.extend(core::iter::repeat_n(universe.bound(), plan.maxima));
    MultisetSeq::new(p.owner(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{oracle_median, oracle_select};
    use crate::value::{multiset_sum, PlayerId};
    use alloc::vec;
    use proptest::prelude::*;

    fn seq(values: &[Value]) -> MultisetSeq {
        MultisetSeq::new(PlayerId(0), values.to_vec())
    }

    #[test]
    fn selection_examples() {
        let r = reduce_selection_to_median(&seq(&[5, 1, 4, 2, 3]), 2).unwrap();
        assert_eq!(r.len(), 6);
        assert_eq!(oracle_median(r.values()), Ok(2));

        let a = seq(&[1, 2, 3, 4]);
        let r = reduce_selection_to_median(&a, 2).unwrap();
        assert_eq!(r, a);
        assert_eq!(oracle_median(r.values()), Ok(2));

        let r = reduce_selection_to_median(&a, 3).unwrap();
        assert_eq!(r.values(), &[1, 2, 3, 4, 4, 4]);
        assert_eq!(oracle_median(r.values()), Ok(3));

        assert!(reduce_selection_to_median(&a, 0).is_err());
        assert!(reduce_selection_to_median(&a, 5).is_err());
    }

    #[test]
    fn selection_exhaustive_small() {
        // every multiset over [3] of size ≤ 8, every valid i
        fn rec(prefix: &mut Vec<Value>, start: Value, left: usize) {
            if !prefix.is_empty() {
                let a = seq(prefix);
                for i in 1..=a.len() {
                    let r = reduce_selection_to_median(&a, i).unwrap();
                    assert_eq!(oracle_median(r.values()), oracle_select(a.values(), i));
                }
            }
            if left == 0 {
                return;
            }
            for v in start..=3 {
                prefix.push(v);
                rec(prefix, v, left - 1);
                prefix.pop();
            }
        }
        rec(&mut vec![], 1, 8);
    }

    #[test]
    fn padding_examples() {
        let u = Universe::new(8).unwrap();
        let p = pad_preserving_median(&[seq(&[1, 2, 3])], &[5], &u).unwrap();
        assert_eq!(p[0].values(), &[1, 1, 2, 3, 8]);
        assert_eq!(oracle_median(p[0].values()), Ok(2));

        let a = seq(&[1, 2]);
        let b = MultisetSeq::new(PlayerId(1), vec![3]);
        let plans = padding_plan(&[2, 1], &[2, 3]).unwrap();
        assert_eq!(plans, vec![PadPlan::default(), PadPlan { minima: 1, maxima: 1 }]);
        let p = pad_preserving_median(&[a.clone(), b.clone()], &[2, 3], &u).unwrap();
        assert_eq!(oracle_median(&multiset_sum(&p)), Ok(2));
        assert_eq!(p[1].owner(), PlayerId(1));

        let same = pad_preserving_median(&[a.clone(), b.clone()], &[2, 1], &u).unwrap();
        assert_eq!(same, vec![a.clone(), b]);

        assert!(matches!(
            pad_preserving_median(&[a], &[1], &u),
            Err(Error::TargetBelowSize { target: 1, len: 2, .. })
        ));
    }

    proptest! {
        #[test]
        fn selection_matches_sorted_index(values in prop::collection::vec(1u64..20, 1..40), pick in any::<prop::sample::Index>()) {
            let a = seq(&values);
            let i = pick.index(a.len()) + 1;
            let r = reduce_selection_to_median(&a, i).unwrap();
            prop_assert_eq!(oracle_median(r.values()), oracle_select(&values, i));
        }

        #[test]
        fn padding_preserves_union_median(
            sets in prop::collection::vec(prop::collection::vec(1u64..=16, 0..12), 1..5),
            extra in prop::collection::vec(0usize..10, 5),
        ) {
            let players: Vec<MultisetSeq> = sets.iter().enumerate()
                .map(|(i, v)| MultisetSeq::new(PlayerId(i), v.clone())).collect();
            prop_assume!(players.iter().any(|p| !p.is_empty()));
            let targets: Vec<usize> = players.iter().zip(&extra).map(|(p, e)| p.len() + e).collect();
            let u = Universe::new(16).unwrap();
            let padded = pad_preserving_median(&players, &targets, &u).unwrap();
            for (p, &t) in padded.iter().zip(&targets) {
                prop_assert_eq!(p.len(), t);
            }
            prop_assert_eq!(oracle_median(&multiset_sum(&padded)), oracle_median(&multiset_sum(&players)));
        }
    }
}
