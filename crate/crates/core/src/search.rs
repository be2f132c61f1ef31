//! Depth-first search for rosaries of a given length, canonical forms under
//! the rotation/relabeling/reversal symmetry group, and exact minimum
//! lengths for tiny degrees.
//!
//! The DFS fills a cycle left to right after a fixed prefix. A sample of
//! permutations is tracked incrementally: for the filled part `S` and `u`
//! still-unknown positions, each sampled permutation must be completable,
//! i.e. the fewest pattern symbols that would have to land in the unknown
//! stretch is at most `u`. Every surviving leaf goes through the full
//! verifier before it is reported.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::{catalog_rosaries, naive_length};
use crate::containment::{is_rosary, VerifyConfig};
use crate::error::{Error, Result};
use crate::perms::{self, Lexicographic};
use crate::seqcore::Cycle;

/// Relabels `seq` so values appear in first-occurrence order `1, 2, …`.
fn first_occurrence_labels(seq: impl Iterator<Item = u8>, n: usize, out: &mut Vec<u8>) {
    let mut map = vec![0u8; n + 1];
    let mut next = 0u8;
    out.clear();
    for v in seq {
        let slot = &mut map[usize::from(v)];
        if *slot == 0 {
            next += 1;
            *slot = next;
        }
        out.push(*slot);
    }
}

/// Lexicographically least member of the orbit of `c` under rotations,
/// value relabelings and reversal.
pub fn canonical_form(c: &Cycle) -> Cycle {
    let v = c.values();
    let r = v.len();
    let mut best: Option<Vec<u8>> = None;
    let mut buf = Vec::with_capacity(r);
    for reversed in [false, true] {
        for j in 0..r {
            if reversed {
                first_occurrence_labels((0..r).map(|k| v[(j + r - k) % r]), c.n(), &mut buf);
            } else {
                first_occurrence_labels((0..r).map(|k| v[(j + k) % r]), c.n(), &mut buf);
            }
            if best.as_ref().is_none_or(|b| buf < *b) {
                best = Some(buf.clone());
            }
        }
    }
    Cycle::new(best.expect("cycles are non-empty"), c.n()).expect("labels stay within 1..=n")
}

/// Catalog key of a known rosary in the same symmetry class as `c`.
pub fn catalog_match(c: &Cycle) -> Option<&'static str> {
    let canon = canonical_form(c);
    catalog_rosaries()
        .filter(|e| e.cycle.n() == c.n() && e.cycle.len() == c.len())
        .find(|e| canonical_form(&e.cycle) == canon)
        .map(|e| e.key.as_str())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n: usize,
    pub length: usize,
    /// Fixed opening of every candidate; the identity block by default.
    pub prefix: Vec<u8>,
    pub time_budget: Option<Duration>,
    pub node_budget: Option<u64>,
    pub max_results: usize,
    /// Permutations tracked by the incremental feasibility filter.
    pub sample_size: usize,
    pub seed: u64,
    /// Never place a symbol next to an equal one (cyclically).
    pub prune_adjacent: bool,
    pub use_filter: bool,
    pub parallel: bool,
}

impl SearchConfig {
    pub fn new(n: usize, length: usize) -> Self {
        Self {
            n,
            length,
            prefix: (1..=n.min(255) as u8).collect(),
            time_budget: None,
            node_budget: None,
            max_results: 1,
            sample_size: 64,
            seed: 0,
            prune_adjacent: true,
            use_filter: true,
            parallel: true,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Infeasible(msg));
        if !(2..=12).contains(&self.n) {
            return bad(format!("degree {} outside 2..=12", self.n));
        }
        if self.length < self.n {
            return bad(format!("length {} is shorter than the degree {}", self.length, self.n));
        }
        if self.prefix.len() > self.length {
            return bad("prefix is longer than the target length".into());
        }
        if let Some(&v) = self.prefix.iter().find(|&&v| v == 0 || usize::from(v) > self.n) {
            return bad(format!("prefix value {v} outside 1..={}", self.n));
        }
        if self.max_results == 0 {
            return bad("max_results must be positive".into());
        }
        if self.time_budget == Some(Duration::ZERO) || self.node_budget == Some(0) {
            return bad("budgets must be positive".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub n: usize,
    pub length: usize,
    /// Verified rosaries in discovery order.
    pub found: Vec<Cycle>,
    pub nodes: u64,
    /// The whole constrained space was explored.
    pub exhausted: bool,
    /// Which budget stopped the search, if any.
    pub budget_hit: Option<String>,
    pub elapsed_ms: f64,
}

/// Per-permutation incremental matching state for a filled prefix `S`:
/// - `g[a]`: greedy match length of `p[a..]` inside `S`;
/// - `f[j]`: greedy match length of `p` inside `S[j..]`;
/// - `b[j]`: greedy match length of a suffix of `p` inside `S[..j]`,
///   matched right to left.
struct Filter {
    samples: Vec<Vec<u8>>,
    n: usize,
    length: usize,
    stride: usize,
}

impl Filter {
    fn new(cfg: &SearchConfig) -> Self {
        let n = cfg.n;
        let total = perms::factorial(n);
        let samples: Vec<Vec<u8>> = if !cfg.use_filter || cfg.sample_size == 0 {
            Vec::new()
        } else if total <= cfg.sample_size as u64 {
            Lexicographic::new(n).collect()
        } else {
            let mut rng = StdRng::seed_from_u64(cfg.seed);
            let mut picked = std::collections::BTreeSet::new();
            while picked.len() < cfg.sample_size {
                let mut p: Vec<u8> = (1..=n as u8).collect();
                p.shuffle(&mut rng);
                picked.insert(p);
            }
            picked.into_iter().collect()
        };
        let stride = n + 2 * (cfg.length + 1);
        Self {
            samples,
            n,
            length: cfg.length,
            stride,
        }
    }

    fn state_len(&self) -> usize {
        self.samples.len() * self.stride
    }

    /// Extends `parent` (state of `seq[..m]`) by `seq[m]` into `child`.
    /// Returns false when some sampled permutation can no longer fit.
    fn extend(&self, parent: &[u8], child: &mut [u8], seq: &[u8], m: usize) -> bool {
        let n = self.n;
        let s = seq[m];
        let unknown = self.length - (m + 1);
        for (idx, p) in self.samples.iter().enumerate() {
            let base = idx * self.stride;
            let src = &parent[base..base + self.stride];
            let dst = &mut child[base..base + self.stride];
            dst.copy_from_slice(src);
            let (g, rest) = dst.split_at_mut(n);
            let (f, b) = rest.split_at_mut(self.length + 1);

            let mut best_inner = 0u8;
            for a in 0..n {
                let k = a + usize::from(g[a]);
                if k < n && p[k] == s {
                    g[a] += 1;
                }
                best_inner = best_inner.max(g[a]);
            }
            for fj in f.iter_mut().take(m) {
                let k = usize::from(*fj);
                if k < n && p[k] == s {
                    *fj += 1;
                }
            }
            f[m] = u8::from(p[0] == s);
            // Suffix of p matched right to left inside seq[..m].
            let mut matched = 0usize;
            for &t in seq[..m].iter().rev() {
                if matched == n {
                    break;
                }
                if p[n - 1 - matched] == t {
                    matched += 1;
                }
            }
            b[m] = matched as u8;

            let mut best_split = 0usize;
            for j in 0..=m {
                best_split = best_split.max(usize::from(f[j]) + usize::from(b[j]));
            }
            let covered = best_split.min(n).max(usize::from(best_inner));
            if n - covered > unknown {
                return false;
            }
        }
        true
    }
}

struct Shared<'a> {
    cfg: &'a SearchConfig,
    filter: Filter,
    verify: VerifyConfig,
    nodes: AtomicU64,
    deadline: Option<Instant>,
    budget_stop: AtomicBool,
    found_per_branch: Vec<AtomicUsize>,
}

impl Shared<'_> {
    fn enough_found(&self, branch: usize) -> bool {
        let total: usize = self.found_per_branch[..=branch]
            .iter()
            .map(|c| c.load(Ordering::Relaxed))
            .sum();
        total >= self.cfg.max_results
    }

    /// Counts a node; returns false once a budget is exhausted.
    fn tick(&self) -> bool {
        if self.budget_stop.load(Ordering::Relaxed) {
            return false;
        }
        let count = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if let Some(limit) = self.cfg.node_budget {
            if count > limit {
                self.budget_stop.store(true, Ordering::Relaxed);
                return false;
            }
        }
        if count.is_multiple_of(4096) {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    self.budget_stop.store(true, Ordering::Relaxed);
                    return false;
                }
            }
        }
        true
    }
}

struct Branch {
    found: Vec<Cycle>,
    completed: bool,
}

struct Dfs<'s, 'a> {
    shared: &'s Shared<'a>,
    branch: usize,
    seq: Vec<u8>,
    /// `states[m]` is the filter state for `seq[..m]`.
    states: Vec<Vec<u8>>,
    found: Vec<Cycle>,
}

impl Dfs<'_, '_> {
    /// Explores completions of `seq[..m]`; returns false when stopped early.
    fn run(&mut self, m: usize) -> bool {
        if !self.shared.tick() {
            return false;
        }
        let cfg = self.shared.cfg;
        let length = cfg.length;
        if m == length {
            self.leaf();
            return !self.shared.enough_found(self.branch);
        }
        for s in 1..=cfg.n as u8 {
            if cfg.prune_adjacent {
                if m > 0 && self.seq[m - 1] == s {
                    continue;
                }
                if m + 1 == length && self.seq[0] == s {
                    continue;
                }
            }
            self.seq[m] = s;
            if !self.push(m) {
                continue;
            }
            if !self.run(m + 1) {
                return false;
            }
        }
        true
    }

    /// Filter step for `seq[m]`; fills `states[m + 1]`.
    fn push(&mut self, m: usize) -> bool {
        let (head, tail) = self.states.split_at_mut(m + 1);
        self.shared
            .filter
            .extend(&head[m], &mut tail[0], &self.seq, m)
    }

    fn leaf(&mut self) {
        let cfg = self.shared.cfg;
        let Ok(cycle) = Cycle::new(self.seq.clone(), cfg.n) else {
            return;
        };
        if !cycle.covers_alphabet() {
            return;
        }
        let report = is_rosary(&cycle, cfg.n, &self.shared.verify).expect("degree within cap");
        if report.is_rosary {
            self.found.push(cycle);
            self.shared.found_per_branch[self.branch].fetch_add(1, Ordering::Relaxed);
        }
    }
}

/// Searches for rosaries of length `cfg.length` that open with `cfg.prefix`.
pub fn search_rosaries(cfg: &SearchConfig) -> Result<SearchOutcome> {
    cfg.validate()?;
    let started = Instant::now();
    let filter = Filter::new(cfg);
    let state_len = filter.state_len();
    let shared = Shared {
        cfg,
        filter,
        verify: VerifyConfig {
            max_n: 12,
            witness_cap: 1,
            early_exit: true,
            parallel: false,
            ..VerifyConfig::default()
        },
        nodes: AtomicU64::new(0),
        deadline: cfg.time_budget.map(|d| started + d),
        budget_stop: AtomicBool::new(false),
        found_per_branch: Vec::new(),
    };

    let length = cfg.length;
    let mut seq = vec![0u8; length];
    let mut states = vec![vec![0u8; state_len]; length + 1];
    let mut prefix_ok = true;
    for (m, &v) in cfg.prefix.iter().enumerate() {
        seq[m] = v;
        let (head, tail) = states.split_at_mut(m + 1);
        if !shared.filter.extend(&head[m], &mut tail[0], &seq, m) {
            prefix_ok = false;
            break;
        }
    }
    let prefix_adjacent_ok = !cfg.prune_adjacent
        || (cfg.prefix.windows(2).all(|w| w[0] != w[1])
            && (cfg.prefix.len() < length
                || cfg.prefix.first() != cfg.prefix.last()
                || length == 1));

    // Branch on up to two positions after the prefix.
    let start = cfg.prefix.len();
    let depth = (length - start).min(2);
    let mut branches: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 0..depth {
        branches = branches
            .into_iter()
            .flat_map(|b| (1..=cfg.n as u8).map(move |s| [b.clone(), vec![s]].concat()))
            .collect();
    }
    if !(prefix_ok && prefix_adjacent_ok) {
        branches.clear();
    }
    let shared = Shared {
        found_per_branch: (0..branches.len()).map(|_| AtomicUsize::new(0)).collect(),
        ..shared
    };

    let explore = |(idx, choice): (usize, &Vec<u8>)| -> Branch {
        let mut dfs = Dfs {
            shared: &shared,
            branch: idx,
            seq: seq.clone(),
            states: states.clone(),
            found: Vec::new(),
        };
        if idx > 0 && shared.enough_found(idx - 1) {
            return Branch {
                found: Vec::new(),
                completed: false,
            };
        }
        for (off, &s) in choice.iter().enumerate() {
            let m = start + off;
            if cfg.prune_adjacent
                && ((m > 0 && dfs.seq[m - 1] == s) || (m + 1 == length && dfs.seq[0] == s))
            {
                return Branch {
                    found: Vec::new(),
                    completed: true,
                };
            }
            dfs.seq[m] = s;
            if !dfs.push(m) {
                return Branch {
                    found: Vec::new(),
                    completed: true,
                };
            }
        }
        let completed = dfs.run(start + choice.len());
        Branch {
            found: dfs.found,
            completed,
        }
    };

    let results: Vec<Branch> = if cfg.parallel {
        branches.par_iter().enumerate().map(explore).collect()
    } else {
        branches.iter().enumerate().map(explore).collect()
    };

    let budget_stop = shared.budget_stop.load(Ordering::Relaxed);
    let completed = results.iter().all(|b| b.completed);
    let mut found: Vec<Cycle> = results.into_iter().flat_map(|b| b.found).collect();
    found.truncate(cfg.max_results);
    let budget_hit = budget_stop.then(|| {
        if cfg.node_budget.is_some_and(|l| shared.nodes.load(Ordering::Relaxed) > l) {
            "nodes".to_string()
        } else {
            "time".to_string()
        }
    });
    Ok(SearchOutcome {
        n: cfg.n,
        length,
        found,
        nodes: shared.nodes.load(Ordering::Relaxed).min(cfg.node_budget.unwrap_or(u64::MAX)),
        exhausted: completed && !budget_stop,
        budget_hit,
        elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactLevel {
    pub length: usize,
    /// Canonical candidates that went through the full verifier.
    pub candidates: u64,
    pub rosaries: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactOutcome {
    pub n: usize,
    pub length: usize,
    pub witness: Cycle,
    pub levels: Vec<ExactLevel>,
    pub elapsed_ms: f64,
}

/// Canonical cycles of length `len` using all of `1..=n` with no two equal
/// cyclic neighbours.
fn canonical_candidates(n: usize, len: usize, mut visit: impl FnMut(&Cycle)) {
    fn rec(
        seq: &mut Vec<u8>,
        n: usize,
        len: usize,
        max_used: u8,
        visit: &mut dyn FnMut(&Cycle),
    ) {
        let m = seq.len();
        if m == len {
            if usize::from(max_used) != n || seq[0] == seq[len - 1] {
                return;
            }
            let c = Cycle::new(seq.clone(), n).expect("values within 1..=n");
            if canonical_form(&c) == c {
                visit(&c);
            }
            return;
        }
        if n - usize::from(max_used) > len - m {
            return;
        }
        let top = (max_used + 1).min(n as u8);
        for s in 1..=top {
            if m > 0 && seq[m - 1] == s {
                continue;
            }
            seq.push(s);
            rec(seq, n, len, max_used.max(s), visit);
            seq.pop();
        }
    }
    let mut seq = Vec::with_capacity(len);
    rec(&mut seq, n, len, 0, &mut visit);
}

/// Shortest rosary length for degree `n`, by exhaustive search over
/// canonical cycles of increasing length.
pub fn exact_r(n: usize, max_n: usize) -> Result<ExactOutcome> {
    if n < 2 {
        return Err(Error::Domain(format!("degree must be at least 2, got {n}")));
    }
    if n > max_n.min(6) {
        let perms = perms::factorial(n) as f64;
        return Err(Error::CapExceeded {
            n,
            cap: max_n.min(6),
            perms,
            length: naive_length(n),
            cost: perms * (n as f64).powi(naive_length(n) as i32),
        });
    }
    let started = Instant::now();
    let verify = VerifyConfig {
        witness_cap: 1,
        early_exit: true,
        parallel: false,
        ..VerifyConfig::default()
    };
    let mut levels = Vec::new();
    for len in n..=naive_length(n) {
        let mut level = ExactLevel {
            length: len,
            candidates: 0,
            rosaries: 0,
        };
        let mut witness: Option<Cycle> = None;
        canonical_candidates(n, len, |c| {
            level.candidates += 1;
            if is_rosary(c, n, &verify).expect("degree within cap").is_rosary {
                level.rosaries += 1;
                witness.get_or_insert_with(|| c.clone());
            }
        });
        levels.push(level);
        if let Some(witness) = witness {
            return Ok(ExactOutcome {
                n,
                length: len,
                witness,
                levels,
                elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
            });
        }
    }
    unreachable!("the naive construction is a rosary of length {}", naive_length(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::catalog;
    use crate::seqcore::Permutation;

    fn cyc(v: &[u8]) -> Cycle {
        Cycle::from_values(v.to_vec()).unwrap()
    }

    /// Brute-force orbit minimum over every rotation, relabeling and reversal.
    fn orbit_min(c: &Cycle) -> Vec<u8> {
        let mut best: Option<Vec<u8>> = None;
        for sigma in Lexicographic::new(c.n()) {
            let sigma = Permutation::new(sigma).unwrap();
            let relabeled = c.relabel(&sigma).unwrap();
            for base in [relabeled.clone(), relabeled.reverse()] {
                for j in 1..=base.len() {
                    let v = base.rotate(j).unwrap().values().to_vec();
                    if best.as_ref().is_none_or(|b| v < *b) {
                        best = Some(v);
                    }
                }
            }
        }
        best.unwrap()
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(canonical_form(&cyc(&[2, 1])), canonical_form(&cyc(&[1, 2])));
        assert_eq!(
            canonical_form(&cyc(&[1, 2, 1, 3])),
            canonical_form(&cyc(&[1, 3, 1, 2]))
        );
        for v in [
            &[1, 2, 1, 3][..],
            &[3, 1, 2, 3, 2],
            &[1, 2, 3, 4, 1, 4, 3, 2],
            &[2, 4, 1, 4, 3, 3, 1],
        ] {
            let c = cyc(v);
            assert_eq!(canonical_form(&c).values(), orbit_min(&c).as_slice(), "{v:?}");
        }
    }

    #[test]
    fn catalog_entries_match_themselves() {
        let fig2 = catalog("fig2-n6").unwrap();
        assert_eq!(catalog_match(&fig2.reverse()), Some("fig2-n6"));
        assert_eq!(catalog_match(&cyc(&[1, 2, 3])), None);
    }

    #[test]
    fn search_trivial_cases() {
        let out = search_rosaries(&SearchConfig::new(2, 2)).unwrap();
        assert_eq!(out.found, vec![cyc(&[1, 2])]);

        let out = search_rosaries(&SearchConfig::new(3, 3)).unwrap();
        assert!(out.found.is_empty());
        assert!(out.exhausted);
    }

    #[test]
    fn search_finds_small_catalog_lengths() {
        let mut cfg = SearchConfig::new(3, 4);
        cfg.max_results = 10;
        let out = search_rosaries(&cfg).unwrap();
        assert!(out.exhausted);
        assert_eq!(out.found, vec![cyc(&[1, 2, 3, 2])]);

        let mut cfg = SearchConfig::new(4, 8);
        cfg.max_results = 1000;
        let seq = search_rosaries(&SearchConfig {
            parallel: false,
            ..cfg.clone()
        })
        .unwrap();
        let par = search_rosaries(&cfg).unwrap();
        assert!(seq.exhausted && par.exhausted);
        assert_eq!(seq.found, par.found);
        assert!(seq.found.contains(&cyc(&[1, 2, 3, 4, 1, 4, 3, 2])));
    }

    #[test]
    fn filter_does_not_change_results() {
        let mut with = SearchConfig::new(4, 8);
        with.max_results = 1000;
        with.parallel = false;
        let without = SearchConfig {
            use_filter: false,
            ..with.clone()
        };
        let a = search_rosaries(&with).unwrap();
        let b = search_rosaries(&without).unwrap();
        assert_eq!(a.found, b.found);
        assert!(a.nodes < b.nodes);
    }

    #[test]
    fn budgets_are_reported() {
        let mut cfg = SearchConfig::new(5, 12);
        cfg.node_budget = Some(50);
        cfg.max_results = 1000;
        let out = search_rosaries(&cfg).unwrap();
        assert!(!out.exhausted);
        assert_eq!(out.budget_hit.as_deref(), Some("nodes"));
    }

    #[test]
    fn invalid_configs() {
        assert!(search_rosaries(&SearchConfig::new(4, 3)).is_err());
        let mut cfg = SearchConfig::new(4, 8);
        cfg.prefix = vec![1, 5];
        assert!(search_rosaries(&cfg).is_err());
        cfg.prefix = vec![1, 2];
        cfg.node_budget = Some(0);
        assert!(search_rosaries(&cfg).is_err());
    }

    #[test]
    fn exact_small() {
        let two = exact_r(2, 4).unwrap();
        assert_eq!(two.length, 2);
        assert_eq!(two.witness, cyc(&[1, 2]));
        let three = exact_r(3, 4).unwrap();
        assert_eq!(three.length, 4);
        assert!(three.witness.rotation_eq(&canonical_form(&catalog("fig1-n3").unwrap())));
        assert!(exact_r(5, 4).is_err());
    }
}
