//! Subsequence containment in strings and cycles, and exhaustive rosary
//! verification.
//!
//! A pattern is contained in a cycle of length `r` when it is a subsequence
//! of one of the `r` one-loop readings `c_j, c_{j+1}, …, c_{j+r−1}`. The
//! reading includes its start element and stops before returning to it.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perms::{self, SweepOptions};
use crate::seqcore::{Cycle, Permutation};

/// Greedy leftmost subsequence test.
pub fn string_contains(text: &[u8], pattern: &[u8]) -> bool {
    let mut it = text.iter();
    pattern.iter().all(|p| it.any(|t| t == p))
}

const ABSENT: u32 = u32::MAX;

/// `next(i, v)` is the smallest `j >= i` with `text[j] == v`.
#[derive(Clone, Debug)]
pub struct NextOccurrenceTable {
    width: usize,
    len: usize,
    next: Vec<u32>,
}

impl NextOccurrenceTable {
    /// Builds the table for symbols `0..=alphabet` over `text`.
    pub fn new(text: &[u8], alphabet: usize) -> Self {
        let width = alphabet.max(text.iter().copied().max().map_or(0, usize::from)) + 1;
        let len = text.len();
        let mut next = vec![ABSENT; (len + 1) * width];
        for i in (0..len).rev() {
            let (row, below) = next[i * width..].split_at_mut(width);
            row.copy_from_slice(&below[..width]);
            row[usize::from(text[i])] = i as u32;
        }
        Self { width, len, next }
    }

    /// Length of the indexed text.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    fn raw(&self, i: usize, v: u8) -> u32 {
        self.next[i * self.width + usize::from(v)]
    }

    /// Next occurrence of `v` at or after offset `i` (0-based), if any.
    #[inline]
    pub fn next(&self, i: usize, v: u8) -> Option<usize> {
        if usize::from(v) >= self.width || i > self.len {
            return None;
        }
        match self.raw(i, v) {
            ABSENT => None,
            j => Some(j as usize),
        }
    }

    /// Greedy match of `pattern` starting at offset `from`; returns the offset
    /// of the last matched symbol if every match lands before `limit`.
    #[inline]
    fn greedy_end(&self, from: usize, pattern: &[u8], limit: usize) -> Option<usize> {
        let mut pos = from;
        let mut last = from;
        for &v in pattern {
            let t = self.next(pos, v)?;
            if t >= limit {
                return None;
            }
            last = t;
            pos = t + 1;
        }
        Some(last)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Greedy scan of every rotation.
    Naive,
    /// Next-occurrence table over the doubled cycle.
    #[default]
    NextTable,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Naive => "naive",
            Engine::NextTable => "nexttable",
        })
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Engine::Naive),
            "nexttable" | "next-table" | "table" => Ok(Engine::NextTable),
            _ => Err(Error::Domain(format!(
                "unknown engine `{s}` (expected `naive` or `nexttable`)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContainmentVerdict {
    pub contained: bool,
    /// Leftmost 1-based start position whose one-loop reading contains the
    /// pattern.
    pub start_index: Option<usize>,
}

impl ContainmentVerdict {
    fn from_start(start: Option<usize>) -> Self {
        Self {
            contained: start.is_some(),
            start_index: start.map(|s| s + 1),
        }
    }
}

/// A cycle prepared for repeated containment queries.
#[derive(Clone, Debug)]
pub struct CycleMatcher {
    cycle: Cycle,
    doubled: NextOccurrenceTable,
}

impl CycleMatcher {
    pub fn new(cycle: &Cycle) -> Self {
        Self {
            doubled: NextOccurrenceTable::new(&cycle.doubled(), cycle.n()),
            cycle: cycle.clone(),
        }
    }

    pub fn cycle(&self) -> &Cycle {
        &self.cycle
    }

    fn check_alphabet(&self, pattern: &[u8]) -> Result<()> {
        let n = self.cycle.n();
        match pattern.iter().find(|&&v| v == 0 || usize::from(v) > n) {
            Some(&v) => Err(Error::AlphabetMismatch { value: v.into(), n }),
            None => Ok(()),
        }
    }

    /// Leftmost 0-based start by trying every rotation in turn.
    pub fn leftmost_start_naive(&self, pattern: &[u8]) -> Option<usize> {
        let v = self.cycle.values();
        let r = v.len();
        (0..r).find(|&s| {
            let mut k = 0;
            for off in 0..r {
                if k == pattern.len() {
                    break;
                }
                if v[(s + off) % r] == pattern[k] {
                    k += 1;
                }
            }
            k == pattern.len()
        })
    }

    /// Leftmost 0-based start using the next-occurrence table.
    ///
    /// All starts between two consecutive occurrences of `pattern[0]` share
    /// the same greedy embedding, so one greedy pass per occurrence decides
    /// the whole range and yields the smallest start that fits in one loop.
    pub fn leftmost_start_table(&self, pattern: &[u8]) -> Option<usize> {
        let Some((&first, rest)) = pattern.split_first() else {
            return Some(0);
        };
        let r = self.cycle.len();
        let t = &self.doubled;
        let mut j = 0;
        while j < r {
            let o = t.next(j, first)?;
            let best = o.min(r - 1);
            let limit = best + r;
            if o < limit {
                if let Some(end) = t.greedy_end(o + 1, rest, limit) {
                    let end = if rest.is_empty() { o } else { end };
                    return Some(j.max((end + 1).saturating_sub(r)));
                }
            }
            j = best + 1;
        }
        None
    }

    /// Leftmost start with the chosen engine; the pattern is not validated.
    #[inline]
    pub fn leftmost_start(&self, pattern: &[u8], engine: Engine) -> Option<usize> {
        match engine {
            Engine::Naive => self.leftmost_start_naive(pattern),
            Engine::NextTable => self.leftmost_start_table(pattern),
        }
    }

    pub fn contains(&self, pattern: &[u8], engine: Engine) -> Result<ContainmentVerdict> {
        self.check_alphabet(pattern)?;
        Ok(ContainmentVerdict::from_start(
            self.leftmost_start(pattern, engine),
        ))
    }

    /// Whether some rotation of the cyclic `pattern` is contained.
    pub fn contains_cyclic(&self, pattern: &[u8]) -> Result<bool> {
        self.check_alphabet(pattern)?;
        Ok(self.rotation_contained(pattern).is_some())
    }

    /// 1-based start of the first rotation of `pattern` that is contained.
    pub fn rotation_contained(&self, pattern: &[u8]) -> Option<usize> {
        if pattern.is_empty() {
            return Some(1);
        }
        let m = pattern.len();
        let mut rotated = Vec::with_capacity(m);
        (0..m).find_map(|s| {
            rotated.clear();
            rotated.extend_from_slice(&pattern[s..]);
            rotated.extend_from_slice(&pattern[..s]);
            self.leftmost_start_table(&rotated).map(|_| s + 1)
        })
    }
}

pub fn cycle_contains_permutation(
    c: &Cycle,
    p: &Permutation,
    engine: Engine,
) -> Result<ContainmentVerdict> {
    CycleMatcher::new(c).contains(p.values(), engine)
}

/// Containment of the cycle `a` in the cycle `c`: some rotation of `a` is a
/// subsequence of some one-loop reading of `c`.
pub fn cyclic_contains(c: &Cycle, a: &Cycle) -> Result<bool> {
    CycleMatcher::new(c).contains_cyclic(a.values())
}

/// Replays the greedy match of `pattern` in the reading of `c` starting at
/// 1-based `start`. Returns the matched 1-based cycle positions.
pub fn embedding(c: &Cycle, pattern: &[u8], start: usize) -> Option<Vec<usize>> {
    let r = c.len();
    if start == 0 || start > r {
        return None;
    }
    let mut out = Vec::with_capacity(pattern.len());
    let mut off = 0;
    for &v in pattern {
        while off < r && c.at(start + off) != v {
            off += 1;
        }
        if off == r {
            return None;
        }
        out.push((start - 1 + off) % r + 1);
        off += 1;
    }
    Some(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub engine: Engine,
    /// Largest `n` for which the `n!` enumeration is attempted.
    pub max_n: usize,
    /// Number of missing permutations retained in reports.
    pub witness_cap: usize,
    pub early_exit: bool,
    pub parallel: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            engine: Engine::NextTable,
            max_n: 10,
            witness_cap: 16,
            early_exit: false,
            parallel: true,
        }
    }
}

impl VerifyConfig {
    fn sweep_options(&self) -> SweepOptions {
        SweepOptions {
            witness_cap: self.witness_cap,
            early_exit: self.early_exit,
            parallel: self.parallel,
        }
    }

    fn guard(&self, n: usize, length: usize) -> Result<()> {
        if n > self.max_n || n > 20 {
            let perms = (1..=n).map(|k| k as f64).product::<f64>();
            return Err(Error::CapExceeded {
                n,
                cap: self.max_n.min(20),
                perms,
                length,
                cost: perms * length as f64 * n as f64,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RosaryReport {
    pub n: usize,
    pub length: usize,
    pub is_rosary: bool,
    pub checked: u64,
    /// Exact number of missing permutations found (1 at most under early exit).
    pub missing_count: u64,
    pub missing: Vec<Permutation>,
    pub elapsed_ms: f64,
    pub engine: Engine,
}

/// Checks all `n!` permutation strings against `c`.
pub fn is_rosary(c: &Cycle, n: usize, cfg: &VerifyConfig) -> Result<RosaryReport> {
    if n < 2 {
        return Err(Error::Domain(format!("rosary degree must be at least 2, got {n}")));
    }
    if let Some(&v) = c.values().iter().find(|&&v| usize::from(v) > n) {
        return Err(Error::ValueOutOfRange { value: v.into(), n });
    }
    cfg.guard(n, c.len())?;
    let started = Instant::now();
    let cycle = if c.n() == n {
        c.clone()
    } else {
        Cycle::new(c.values().to_vec(), n)?
    };
    let matcher = CycleMatcher::new(&cycle);
    let engine = cfg.engine;
    let outcome = perms::sweep(n, cfg.sweep_options(), |p| {
        matcher.leftmost_start(p, engine).is_some()
    });
    let total = perms::factorial(n);
    Ok(RosaryReport {
        n,
        length: c.len(),
        is_rosary: outcome.failed == 0 && outcome.checked == total,
        checked: outcome.checked,
        missing_count: outcome.failed,
        missing: outcome
            .witnesses
            .into_iter()
            .map(|w| Permutation::new(w).expect("enumeration yields permutations"))
            .collect(),
        elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
        engine,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StringCheck {
    pub n: usize,
    pub length: usize,
    pub contains_all: bool,
    pub checked: u64,
    pub first_missing: Option<Permutation>,
}

/// Whether every permutation of `1..=n` is a subsequence of the linear string
/// `s`, stopping at the lexicographically first one that is not.
pub fn string_contains_all_permutations(
    s: &[u8],
    n: usize,
    cfg: &VerifyConfig,
) -> Result<StringCheck> {
    if n == 0 {
        return Err(Error::Domain("degree must be at least 1".into()));
    }
    cfg.guard(n, s.len())?;
    let table = NextOccurrenceTable::new(s, n);
    let opts = SweepOptions {
        witness_cap: 1,
        early_exit: true,
        parallel: cfg.parallel,
    };
    let outcome = perms::sweep(n, opts, |p| table.greedy_end(0, p, s.len()).is_some());
    Ok(StringCheck {
        n,
        length: s.len(),
        contains_all: outcome.failed == 0,
        checked: outcome.checked,
        first_missing: outcome
            .witnesses
            .into_iter()
            .next()
            .map(|w| Permutation::new(w).expect("enumeration yields permutations")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{catalog, naive_rosary};

    fn cyc(v: &[u8]) -> Cycle {
        Cycle::from_values(v.to_vec()).unwrap()
    }

    fn perm(v: &[u8]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    fn both(c: &Cycle, p: &[u8]) -> ContainmentVerdict {
        let m = CycleMatcher::new(c);
        let a = m.contains(p, Engine::Naive).unwrap();
        let b = m.contains(p, Engine::NextTable).unwrap();
        assert_eq!(a, b, "engines disagree on {p:?} in {c}");
        a
    }

    #[test]
    fn string_examples() {
        assert!(!string_contains(&[1, 2, 1, 3], &[1, 3, 2]));
        assert!(string_contains(&[1, 3, 1, 2], &[1, 3, 2]));
        assert!(string_contains(&[1, 2, 3], &[]));
        assert!(!string_contains(&[1, 2, 3], &[3, 1]));
    }

    #[test]
    fn next_table_basics() {
        let t = NextOccurrenceTable::new(&[2, 1, 2, 3], 3);
        assert_eq!(t.next(0, 2), Some(0));
        assert_eq!(t.next(1, 2), Some(2));
        assert_eq!(t.next(3, 2), None);
        assert_eq!(t.next(4, 1), None);
        assert_eq!(t.next(0, 3), Some(3));
    }

    #[test]
    fn cycle_examples() {
        let v = both(&cyc(&[1, 2]), &[2, 1]);
        assert_eq!(v.start_index, Some(2));

        let c = cyc(&[1, 2, 1, 3]);
        let v = both(&c, &[1, 3, 2]);
        assert_eq!(v.start_index, Some(3));
        assert_eq!(embedding(&c, &[1, 3, 2], 3), Some(vec![3, 4, 2]));

        let v = both(&cyc(&[1, 2, 3]), &[1, 3, 2]);
        assert!(!v.contained);
        assert_eq!(v.start_index, None);
    }

    #[test]
    fn leftmost_start_may_precede_the_first_symbol() {
        // Starting at position 1 reads 3,1,2 which contains 1,2.
        let c = cyc(&[3, 1, 2]);
        assert_eq!(both(&c, &[1, 2]).start_index, Some(1));
        // 2,1 needs the reading to begin at the 2 (position 3).
        assert_eq!(both(&c, &[2, 1]).start_index, Some(3));
        // 2,3 fits in the readings starting at positions 2 and 3
        assert_eq!(both(&c, &[2, 3]).start_index, Some(2));
    }

    #[test]
    fn alphabet_mismatch() {
        let m = CycleMatcher::new(&cyc(&[1, 2, 3]));
        assert_eq!(
            m.contains(&[1, 4], Engine::NextTable),
            Err(Error::AlphabetMismatch { value: 4, n: 3 })
        );
    }

    #[test]
    fn cyclic_examples() {
        assert!(!cyclic_contains(&cyc(&[1, 2, 3]), &cyc(&[1, 3, 2])).unwrap());
        assert!(cyclic_contains(&cyc(&[1, 2, 3, 1, 3, 2, 1]), &cyc(&[1, 3, 2])).unwrap());
        assert!(cyclic_contains(&cyc(&[1, 2]), &cyc(&[1, 2])).unwrap());
    }

    #[test]
    fn rosary_examples() {
        let cfg = VerifyConfig::default();
        let rep = is_rosary(&cyc(&[1, 2]), 2, &cfg).unwrap();
        assert!(rep.is_rosary);
        assert_eq!(rep.checked, 2);

        let rep = is_rosary(&cyc(&[1, 2, 3]), 3, &cfg).unwrap();
        assert!(!rep.is_rosary);
        assert_eq!(rep.missing[0], perm(&[1, 3, 2]));
        assert_eq!(
            rep.missing,
            vec![perm(&[1, 3, 2]), perm(&[2, 1, 3]), perm(&[3, 2, 1])]
        );
        assert_eq!(rep.missing_count, 3);

        let rep = is_rosary(&catalog("fig2-n6").unwrap(), 6, &cfg).unwrap();
        assert!(rep.is_rosary);
        assert_eq!(rep.checked, 720);
        assert!(rep.missing.is_empty());
    }

    #[test]
    fn rosary_guards() {
        let cfg = VerifyConfig {
            max_n: 5,
            ..VerifyConfig::default()
        };
        assert!(matches!(
            is_rosary(&naive_rosary(6).unwrap(), 6, &cfg),
            Err(Error::CapExceeded { n: 6, cap: 5, .. })
        ));
        assert!(matches!(
            is_rosary(&cyc(&[1, 2, 4]), 3, &cfg),
            Err(Error::ValueOutOfRange { value: 4, n: 3 })
        ));
    }

    #[test]
    fn early_exit_reports_first_missing() {
        let cfg = VerifyConfig {
            early_exit: true,
            ..VerifyConfig::default()
        };
        let rep = is_rosary(&cyc(&[1, 2, 3, 4]), 4, &cfg).unwrap();
        assert!(!rep.is_rosary);
        assert_eq!(rep.missing, vec![perm(&[1, 2, 4, 3])]);
        assert_eq!(rep.checked, 2);
    }

    #[test]
    fn string_check_examples() {
        let cfg = VerifyConfig::default();
        let fig2 = catalog("fig2-n6").unwrap();
        assert!(string_contains_all_permutations(&fig2.doubled(), 6, &cfg)
            .unwrap()
            .contains_all);
        let out = string_contains_all_permutations(&[1, 2, 3], 3, &cfg).unwrap();
        assert!(!out.contains_all);
        assert_eq!(out.first_missing, Some(perm(&[1, 3, 2])));
        let naive = naive_rosary(4).unwrap();
        assert!(string_contains_all_permutations(&naive.doubled(), 4, &cfg)
            .unwrap()
            .contains_all);
    }

    #[test]
    fn report_json_round_trip() {
        let rep = is_rosary(&cyc(&[1, 2, 3]), 3, &VerifyConfig::default()).unwrap();
        let json = serde_json::to_value(&rep).unwrap();
        assert_eq!(json["engine"], "nexttable");
        assert_eq!(json["missing"][0], serde_json::json!([1, 3, 2]));
        let back: RosaryReport = serde_json::from_value(json.clone()).unwrap();
        assert_eq!(serde_json::to_value(&back).unwrap(), json);
    }
}
