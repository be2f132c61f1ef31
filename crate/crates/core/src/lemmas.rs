//! Window-sum predicates on lambda decompositions and the target cycles they
//! guarantee containment in, with exhaustive cross-checks against the
//! containment engine.
//!
//! Both predicates look at the window `λ_{i+1} + … + λ_{i+K}` of the cyclic
//! lambda vector. The first fires when the window reaches `y − M + 1` and
//! promises cyclic containment in
//! `(1,…,n)_{M−1} (1,…,n−1) (n,…,1)_{K−1} (n,…,2)`. The second (lucky index)
//! needs only `y − M` but also asks that the decreasing block closed by the
//! part `1 (0)_{λ_i}` ends in a value at most `N`; it promises containment in
//! `(1,…,n)_M (1,…,N) (n,…,1)_K`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::containment::CycleMatcher;
use crate::error::{Error, Result};
use crate::perms::Lexicographic;
use crate::seqcore::{code_of_cycle, lambda_decomposition, Cycle, LambdaDecomposition, Permutation};

fn ascending(m: usize) -> impl Iterator<Item = u8> + Clone {
    1..=m as u8
}

fn descending(from: usize, to: usize) -> impl Iterator<Item = u8> + Clone {
    (to as u8..=from as u8).rev()
}

fn repeat<I: Iterator<Item = u8> + Clone>(out: &mut Vec<u8>, part: I, times: usize) {
    for _ in 0..times {
        out.extend(part.clone());
    }
}

fn check_window(ld: &LambdaDecomposition, k: usize) -> Result<()> {
    if k == 0 || k > ld.x {
        return Err(Error::Domain(format!(
            "window length K = {k} must lie in 1..={} (the number of ascents)",
            ld.x
        )));
    }
    Ok(())
}

/// Least 1-based `i` with `λ_{i+1} + … + λ_{i+K} >= y − M + 1`.
pub fn lemma1_predicate(ld: &LambdaDecomposition, k: usize, m: usize) -> Result<Option<usize>> {
    check_window(ld, k)?;
    let threshold = ld.y as i64 - m as i64 + 1;
    Ok((1..=ld.x).find(|&i| ld.window_sum(i, k) as i64 >= threshold))
}

/// `(1,…,n)_{M−1} (1,…,n−1) (n,…,1)_{K−1} (n,…,2)`
pub fn lemma1_target(n: usize, k: usize, m: usize) -> Result<Cycle> {
    if n < 2 || k == 0 || m == 0 {
        return Err(Error::Domain(format!(
            "first target needs n >= 2, K >= 1, M >= 1 (got n={n}, K={k}, M={m})"
        )));
    }
    let mut v = Vec::with_capacity((m + k) * n);
    repeat(&mut v, ascending(n), m - 1);
    repeat(&mut v, ascending(n - 1), 1);
    repeat(&mut v, descending(n, 1), k - 1);
    repeat(&mut v, descending(n, 2), 1);
    Cycle::new(v, n)
}

/// `(1,…,n)_M (1,…,N) (n,…,1)_K`
pub fn lemma2_target(n: usize, k: usize, m: usize, ceiling: usize) -> Result<Cycle> {
    if n < 2 || k == 0 || ceiling == 0 || ceiling > n {
        return Err(Error::Domain(format!(
            "second target needs n >= 2, K >= 1, 1 <= N <= n (got n={n}, K={k}, N={ceiling})"
        )));
    }
    let mut v = Vec::with_capacity((m + k + 1) * n);
    repeat(&mut v, ascending(n), m);
    repeat(&mut v, ascending(ceiling), 1);
    repeat(&mut v, descending(n, 1), k);
    Cycle::new(v, n)
}

/// Parameters `(K, M, N)` of the lucky-index condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LuckyIndexQuery {
    /// Window length `K`.
    pub k: usize,
    /// Increasing-block budget `M`.
    pub m: usize,
    /// Value ceiling `N`.
    pub ceiling: usize,
}

impl LuckyIndexQuery {
    pub fn new(k: usize, m: usize, ceiling: usize) -> Self {
        Self { k, m, ceiling }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 || self.m == 0 || self.ceiling == 0 || self.ceiling > n {
            return Err(Error::Domain(format!(
                "lucky-index query needs K >= 1, M >= 1, 1 <= N <= {n} (got {self:?})"
            )));
        }
        Ok(())
    }
}

/// The decreasing block closed by the part `1 (0)_{λ_i}`: starts at the peak
/// right after the `i`-th 1-bit and ends `λ_i` positions later. Returns the
/// 1-based position and value of that last element.
pub fn block_end(c: &Cycle, ld: &LambdaDecomposition, i: usize) -> (usize, u8) {
    let r = c.len();
    let one = ld.one_position(i, r);
    let pos = (one - 1 + ld.lambda(i) + 1) % r + 1;
    (pos, c.at(pos))
}

fn decompose(p: &Permutation) -> Result<(Cycle, LambdaDecomposition)> {
    let c = p.as_cycle();
    let ld = lambda_decomposition(&code_of_cycle(&c)?)?;
    Ok((c, ld))
}

/// All 1-based `(K, M, N)`-lucky indices of `p` read as a cycle.
pub fn lucky_indices(p: &Permutation, q: LuckyIndexQuery) -> Result<Vec<usize>> {
    q.validate(p.n())?;
    let (c, ld) = decompose(p)?;
    check_window(&ld, q.k)?;
    Ok(lucky_in(&c, &ld, q))
}

fn lucky_in(c: &Cycle, ld: &LambdaDecomposition, q: LuckyIndexQuery) -> Vec<usize> {
    let threshold = ld.y as i64 - q.m as i64;
    (1..=ld.x)
        .filter(|&i| {
            ld.window_sum(i, q.k) as i64 >= threshold
                && usize::from(block_end(c, ld, i).1) <= q.ceiling
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub predicate_fired: bool,
    /// Witness index (least firing / lucky index).
    pub index: Option<usize>,
    /// Cyclic containment in the target, evaluated only when the predicate fired.
    pub containment_confirmed: Option<bool>,
}

pub fn check_lemma1(p: &Permutation, k: usize, m: usize) -> Result<LemmaCheck> {
    let (_, ld) = decompose(p)?;
    let index = lemma1_predicate(&ld, k, m)?;
    let containment_confirmed = match index {
        Some(_) => Some(CycleMatcher::new(&lemma1_target(p.n(), k, m)?).contains_cyclic(p.values())?),
        None => None,
    };
    Ok(LemmaCheck {
        predicate_fired: index.is_some(),
        index,
        containment_confirmed,
    })
}

pub fn check_lemma2(p: &Permutation, q: LuckyIndexQuery) -> Result<LemmaCheck> {
    let lucky = lucky_indices(p, q)?;
    let index = lucky.first().copied();
    let containment_confirmed = match index {
        Some(_) => Some(
            CycleMatcher::new(&lemma2_target(p.n(), q.k, q.m, q.ceiling)?)
                .contains_cyclic(p.values())?,
        ),
        None => None,
    };
    Ok(LemmaCheck {
        predicate_fired: index.is_some(),
        index,
        containment_confirmed,
    })
}

/// A parameter choice for which a predicate fired but containment failed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub permutation: Permutation,
    pub k: usize,
    pub m: usize,
    pub ceiling: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoundnessReport {
    pub n: usize,
    pub permutations: u64,
    /// Parameter combinations evaluated.
    pub cases: u64,
    pub fired: u64,
    pub confirmed: u64,
    pub violations: Vec<Violation>,
}

#[derive(Default)]
struct Tally {
    cases: u64,
    fired: u64,
    confirmed: u64,
    violations: Vec<Violation>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.cases += other.cases;
        self.fired += other.fired;
        self.confirmed += other.confirmed;
        self.violations.extend(other.violations);
        self
    }

    fn into_report(mut self, n: usize, permutations: u64) -> SoundnessReport {
        self.violations.sort_by(|a, b| {
            (&a.permutation, a.k, a.m, a.ceiling).cmp(&(&b.permutation, b.k, b.m, b.ceiling))
        });
        SoundnessReport {
            n,
            permutations,
            cases: self.cases,
            fired: self.fired,
            confirmed: self.confirmed,
            violations: self.violations,
        }
    }
}

fn all_permutations(n: usize) -> Vec<Permutation> {
    Lexicographic::new(n)
        .map(|v| Permutation::new(v).expect("enumeration yields permutations"))
        .collect()
}

/// Every permutation of `1..=n`, every `K ∈ 1..=x`, every `M ∈ 1..=n`: when
/// the first predicate fires, cyclic containment in its target must hold.
pub fn lemma1_sweep(n: usize) -> Result<SoundnessReport> {
    if !(2..=9).contains(&n) {
        return Err(Error::Domain(format!("sweep degree must be in 2..=9, got {n}")));
    }
    // targets[k-1][m-1]
    let targets: Vec<Vec<CycleMatcher>> = (1..=n)
        .map(|k| {
            (1..=n)
                .map(|m| lemma1_target(n, k, m).map(|t| CycleMatcher::new(&t)))
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let perms = all_permutations(n);
    let tally = perms
        .par_iter()
        .map(|p| {
            let (_, ld) = decompose(p).expect("permutations of n >= 2 have a code");
            let mut t = Tally::default();
            for k in 1..=ld.x {
                for m in 1..=n {
                    t.cases += 1;
                    if lemma1_predicate(&ld, k, m).expect("k <= x").is_none() {
                        continue;
                    }
                    t.fired += 1;
                    if targets[k - 1][m - 1].rotation_contained(p.values()).is_some() {
                        t.confirmed += 1;
                    } else {
                        t.violations.push(Violation {
                            permutation: p.clone(),
                            k,
                            m,
                            ceiling: None,
                        });
                    }
                }
            }
            t
        })
        .reduce(Tally::default, Tally::merge);
    Ok(tally.into_report(n, perms.len() as u64))
}

/// Lucky-index counterpart of [`lemma1_sweep`], over `K ∈ 1..=x`,
/// `M ∈ 1..=n`, `N ∈ 1..=n`.
pub fn lemma2_sweep(n: usize) -> Result<SoundnessReport> {
    if !(2..=8).contains(&n) {
        return Err(Error::Domain(format!("sweep degree must be in 2..=8, got {n}")));
    }
    let idx = |k: usize, m: usize, ceiling: usize| ((k - 1) * n + (m - 1)) * n + (ceiling - 1);
    let mut targets = Vec::with_capacity(n * n * n);
    for k in 1..=n {
        for m in 1..=n {
            for ceiling in 1..=n {
                targets.push(CycleMatcher::new(&lemma2_target(n, k, m, ceiling)?));
            }
        }
    }
    let perms = all_permutations(n);
    let tally = perms
        .par_iter()
        .map(|p| {
            let (c, ld) = decompose(p).expect("permutations of n >= 2 have a code");
            let mut t = Tally::default();
            for k in 1..=ld.x {
                for m in 1..=n {
                    for ceiling in 1..=n {
                        t.cases += 1;
                        let q = LuckyIndexQuery::new(k, m, ceiling);
                        if lucky_in(&c, &ld, q).is_empty() {
                            continue;
                        }
                        t.fired += 1;
                        if targets[idx(k, m, ceiling)].rotation_contained(p.values()).is_some() {
                            t.confirmed += 1;
                        } else {
                            t.violations.push(Violation {
                                permutation: p.clone(),
                                k,
                                m,
                                ceiling: Some(ceiling),
                            });
                        }
                    }
                }
            }
            t
        })
        .reduce(Tally::default, Tally::merge);
    Ok(tally.into_report(n, perms.len() as u64))
}
