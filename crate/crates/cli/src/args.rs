//! Parsers for list-valued command-line arguments.
//!
//! A list is comma separated; each item is an integer, a power `2^e`, or an
//! inclusive range. Ranges whose ends are both powers (`2^6..2^12`) step by
//! doubling, all others step by one.

use std::str::FromStr;

use mediocre::{AlphaRatio, Ratio};

fn scalar(s: &str) -> Result<(u64, bool), String> {
    let s = s.trim();
    match s.split_once('^') {
        Some((base, exp)) => {
            let base: u64 = base.trim().parse().map_err(|_| format!("bad base in `{s}`"))?;
            let exp: u32 = exp.trim().parse().map_err(|_| format!("bad exponent in `{s}`"))?;
            let v = base.checked_pow(exp).ok_or_else(|| format!("`{s}` overflows"))?;
            Ok((v, base == 2))
        }
        None => s.parse().map(|v| (v, false)).map_err(|_| format!("bad integer `{s}`")),
    }
}

pub fn parse_list(s: &str) -> Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for item in s.split(',').filter(|i| !i.trim().is_empty()) {
        match item.split_once("..") {
            Some((lo, hi)) => {
                let inclusive_hi = hi.strip_prefix('=').unwrap_or(hi);
                let ((lo, lo_pow), (hi, hi_pow)) = (scalar(lo)?, scalar(inclusive_hi)?);
                if lo > hi {
                    return Err(format!("empty range `{item}`"));
                }
                if lo_pow && hi_pow {
                    let mut v = lo;
                    while v <= hi {
                        out.push(v);
                        v *= 2;
                    }
                } else {
                    out.extend(lo..=hi);
                }
            }
            None => out.push(scalar(item)?.0),
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

pub fn parse_usize_list(s: &str) -> Result<Vec<usize>, String> {
    parse_list(s)?.into_iter().map(|v| usize::try_from(v).map_err(|e| e.to_string())).collect()
}

/// `α` as `p/q`, with denominators up to 1000.
pub fn parse_alpha(s: &str) -> Result<AlphaRatio, String> {
    let (p, q) = s.split_once('/').ok_or_else(|| format!("expected p/q, got `{s}`"))?;
    let p = p.trim().parse().map_err(|_| format!("bad numerator `{p}`"))?;
    let q = q.trim().parse().map_err(|_| format!("bad denominator `{q}`"))?;
    AlphaRatio::with_max_denominator(p, q, 1000).map_err(|e| e.to_string())
}

pub fn parse_ratio(s: &str) -> Result<Ratio, String> {
    Ratio::from_str(s).map_err(|e| e.to_string())
}
