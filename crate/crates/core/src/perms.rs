//! Lexicographic enumeration of permutations of `1..=n` and a chunked,
//! optionally parallel sweep over all of them.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

/// `n!`, saturating at `u64::MAX`.
pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).try_fold(1u64, |acc, k| acc.checked_mul(k)).unwrap_or(u64::MAX)
}

/// Advances `perm` to its lexicographic successor. Returns `false` (leaving
/// `perm` sorted ascending) when `perm` was the last permutation.
pub fn next_permutation(perm: &mut [u8]) -> bool {
    let len = perm.len();
    if len < 2 {
        return false;
    }
    let mut i = len - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        perm.reverse();
        return false;
    }
    let mut j = len - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// The permutation of `1..=n` with 0-based lexicographic rank `rank`.
pub fn unrank(n: usize, mut rank: u64) -> Vec<u8> {
    let mut pool: Vec<u8> = (1..=n as u8).collect();
    let mut out = Vec::with_capacity(n);
    for i in (0..n).rev() {
        let f = factorial(i);
        let idx = (rank / f) as usize;
        rank %= f;
        out.push(pool.remove(idx));
    }
    out
}

/// Iterator over all permutations of `1..=n` in lexicographic order.
pub struct Lexicographic {
    current: Option<Vec<u8>>,
}

impl Lexicographic {
    pub fn new(n: usize) -> Self {
        Self {
            current: Some((1..=n as u8).collect()),
        }
    }
}

impl Iterator for Lexicographic {
    type Item = Vec<u8>;

    fn next(&mut self) -> Option<Vec<u8>> {
        let cur = self.current.take()?;
        let mut succ = cur.clone();
        if next_permutation(&mut succ) {
            self.current = Some(succ);
        }
        Some(cur)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SweepOptions {
    pub witness_cap: usize,
    pub early_exit: bool,
    pub parallel: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepOutcome {
    pub checked: u64,
    pub failed: u64,
    /// Failing permutations in lexicographic order, at most `witness_cap`.
    pub witnesses: Vec<Vec<u8>>,
}

struct ChunkResult {
    checked: u64,
    failed: u64,
    witnesses: Vec<Vec<u8>>,
    first_failure: Option<u64>,
}

const MAX_CHUNKS: u64 = 1024;

/// Applies `check` to every permutation of `1..=n` and collects failures.
///
/// The lexicographic order is split into contiguous rank ranges. Merging is
/// order-independent, so sequential and parallel runs produce identical
/// outcomes. With `early_exit`, the sweep stops at the lexicographically first
/// failure and `checked` counts permutations up to and including it.
pub fn sweep<F>(n: usize, opts: SweepOptions, check: F) -> SweepOutcome
where
    F: Fn(&[u8]) -> bool + Sync,
{
    let total = factorial(n);
    let chunks = total.min(MAX_CHUNKS);
    let bounds = |i: u64| -> (u64, u64) {
        let lo = (u128::from(total) * u128::from(i) / u128::from(chunks)) as u64;
        let hi = (u128::from(total) * u128::from(i + 1) / u128::from(chunks)) as u64;
        (lo, hi)
    };
    let first_failing_chunk = AtomicUsize::new(usize::MAX);

    let run = |idx: u64| -> ChunkResult {
        let (lo, hi) = bounds(idx);
        let mut perm = unrank(n, lo);
        let mut res = ChunkResult {
            checked: 0,
            failed: 0,
            witnesses: Vec::new(),
            first_failure: None,
        };
        for rank in lo..hi {
            if opts.early_exit
                && rank % 256 == 0
                && first_failing_chunk.load(Ordering::Relaxed) < idx as usize
            {
                break;
            }
            res.checked += 1;
            if !check(&perm) {
                res.failed += 1;
                if res.witnesses.len() < opts.witness_cap {
                    res.witnesses.push(perm.clone());
                }
                if opts.early_exit {
                    res.first_failure = Some(rank);
                    first_failing_chunk.fetch_min(idx as usize, Ordering::Relaxed);
                    if res.witnesses.is_empty() {
                        res.witnesses.push(perm.clone());
                    }
                    break;
                }
            }
            next_permutation(&mut perm);
        }
        res
    };

    let results: Vec<ChunkResult> = if opts.parallel {
        (0..chunks).into_par_iter().map(run).collect()
    } else {
        let mut out = Vec::new();
        for idx in 0..chunks {
            let r = run(idx);
            let stop = opts.early_exit && r.first_failure.is_some();
            out.push(r);
            if stop {
                break;
            }
        }
        out
    };

    if opts.early_exit {
        if let Some(r) = results.iter().find(|r| r.first_failure.is_some()) {
            let witnesses = if opts.witness_cap == 0 {
                Vec::new()
            } else {
                vec![r.witnesses[r.witnesses.len() - 1].clone()]
            };
            return SweepOutcome {
                checked: r.first_failure.unwrap() + 1,
                failed: 1,
                witnesses,
            };
        }
        return SweepOutcome {
            checked: total,
            failed: 0,
            witnesses: Vec::new(),
        };
    }

    let mut out = SweepOutcome {
        checked: 0,
        failed: 0,
        witnesses: Vec::new(),
    };
    for r in results {
        out.checked += r.checked;
        out.failed += r.failed;
        out.witnesses.extend(r.witnesses);
    }
    out.witnesses.sort_unstable();
    out.witnesses.truncate(opts.witness_cap);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), 1);
        assert_eq!(factorial(5), 120);
        assert_eq!(factorial(20), 2_432_902_008_176_640_000);
        assert_eq!(factorial(21), u64::MAX);
    }

    #[test]
    fn lexicographic_order_and_unrank_agree() {
        let all: Vec<Vec<u8>> = Lexicographic::new(4).collect();
        assert_eq!(all.len(), 24);
        assert_eq!(all[0], vec![1, 2, 3, 4]);
        assert_eq!(all[23], vec![4, 3, 2, 1]);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        for (rank, p) in all.iter().enumerate() {
            assert_eq!(&unrank(4, rank as u64), p);
        }
    }

    #[test]
    fn next_permutation_wraps() {
        let mut p = vec![3, 2, 1];
        assert!(!next_permutation(&mut p));
        assert_eq!(p, vec![1, 2, 3]);
        let mut single = vec![1];
        assert!(!next_permutation(&mut single));
    }

    #[test]
    fn sweep_is_schedule_independent() {
        let check = |p: &[u8]| p[0] != 3 || p[1] < p[2];
        let mut outcomes = Vec::new();
        for parallel in [false, true] {
            for early_exit in [false, true] {
                let opts = SweepOptions {
                    witness_cap: 5,
                    early_exit,
                    parallel,
                };
                outcomes.push(sweep(6, opts, check));
            }
        }
        assert_eq!(outcomes[0], outcomes[2]);
        assert_eq!(outcomes[1], outcomes[3]);
        let full = &outcomes[0];
        assert_eq!(full.checked, 720);
        // p[0] = 3 and p[1] > p[2]: 60 of the 120 permutations starting with 3
        assert_eq!(full.failed, 60);
        assert_eq!(full.witnesses.len(), 5);
        assert_eq!(full.witnesses[0], vec![3, 2, 1, 4, 5, 6]);
        let early = &outcomes[1];
        assert_eq!(early.failed, 1);
        assert_eq!(early.witnesses, vec![vec![3, 2, 1, 4, 5, 6]]);
        // ranks 0..=239 start with 1 or 2; 3,2,1,4,5,6 is rank 240 + 24
        assert_eq!(early.checked, 240 + 24 + 1);
    }

    #[test]
    fn sweep_counts_everything_when_nothing_fails() {
        let opts = SweepOptions {
            witness_cap: 16,
            early_exit: true,
            parallel: true,
        };
        let out = sweep(5, opts, |_| true);
        assert_eq!(out.checked, 120);
        assert_eq!(out.failed, 0);
    }
}
