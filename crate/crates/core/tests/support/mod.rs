//! Property checks shared by the proptest suite and the acceptance harness.

#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use rosary::containment::CycleMatcher;
use rosary::search::canonical_form;
use rosary::seqcore::{maximal_blocks, string_block_counts};
use rosary::{
    code_of_cycle, is_rosary, lambda_decomposition, string_contains, Cycle, Engine, Permutation,
    VerifyConfig,
};

pub const CASES: u32 = 1000;

pub fn runner(deterministic: bool) -> TestRunner {
    let config = Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    };
    if deterministic {
        TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
    } else {
        TestRunner::new(config)
    }
}

fn perm_of(n: u8) -> impl Strategy<Value = Vec<u8>> {
    Just((1..=n).collect::<Vec<u8>>()).prop_shuffle()
}

/// A degree, a cycle over it and a permutation of the same degree.
fn cycle_and_perm(max_n: u8, max_len: usize) -> impl Strategy<Value = (Cycle, Vec<u8>)> {
    (2..=max_n).prop_flat_map(move |n| {
        (
            prop::collection::vec(1..=n, 1..=max_len),
            perm_of(n),
        )
            .prop_map(move |(v, p)| (Cycle::new(v, n.into()).unwrap(), p))
    })
}

fn small_cycle(max_n: u8, max_len: usize) -> impl Strategy<Value = Cycle> {
    (2..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(1..=n, 1..=max_len)
            .prop_map(move |v| Cycle::new(v, n.into()).unwrap())
    })
}

fn exhaustive() -> VerifyConfig {
    VerifyConfig {
        witness_cap: usize::MAX,
        parallel: false,
        ..VerifyConfig::default()
    }
}

/// Sorted list of permutations missing from `c`.
pub fn missing(c: &Cycle) -> Vec<Vec<u8>> {
    let report = is_rosary(c, c.n(), &exhaustive()).unwrap();
    let mut out: Vec<Vec<u8>> = report.missing.iter().map(|p| p.values().to_vec()).collect();
    out.sort();
    out
}

fn rotation_eq_bits(a: &[u8], b: &[u8]) -> bool {
    a.len() == b.len() && (a.is_empty() || (0..a.len()).any(|s| (0..a.len()).all(|i| a[(i + s) % a.len()] == b[i])))
}

/// Leftmost 0-based start by trying every index tuple of every rotation.
fn enumerated_start(c: &Cycle, p: &[u8]) -> Option<usize> {
    let r = c.len();
    let k = p.len();
    (0..r).find(|&j| {
        let text = c.linearize(j + 1).unwrap();
        (0u32..1 << r).filter(|m| m.count_ones() as usize == k).any(|mask| {
            let picked: Vec<u8> = (0..r).filter(|i| mask >> i & 1 == 1).map(|i| text[i]).collect();
            picked == p
        })
    })
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

pub fn engine_agreement(runner: &mut TestRunner) -> Result<(), String> {
    runner
        .run(&cycle_and_perm(7, 40), |(c, p)| {
            let m = CycleMatcher::new(&c);
            let naive = m.leftmost_start(&p, Engine::Naive);
            let table = m.leftmost_start(&p, Engine::NextTable);
            check(naive == table, || format!("{c} / {p:?}: naive {naive:?} table {table:?}"))?;
            let cyclic = m.contains_cyclic(&p).unwrap();
            check(cyclic == m.rotation_contained(&p).is_some(), || format!("{c} / {p:?}"))
        })
        .map_err(|e| e.to_string())
}

pub fn greedy_vs_enumeration(runner: &mut TestRunner) -> Result<(), String> {
    runner
        .run(&cycle_and_perm(5, 12), |(c, p)| {
            let expected = enumerated_start(&c, &p);
            let m = CycleMatcher::new(&c);
            for engine in [Engine::Naive, Engine::NextTable] {
                let got = m.leftmost_start(&p, engine);
                check(got == expected, || {
                    format!("{c} / {p:?} ({engine}): got {got:?}, enumeration {expected:?}")
                })?;
            }
            let linear = string_contains(c.values(), &p);
            check(linear == (expected == Some(0)), || format!("linear {c} / {p:?}"))
        })
        .map_err(|e| e.to_string())
}

pub fn relabel_equivariance(runner: &mut TestRunner) -> Result<(), String> {
    let strat = small_cycle(4, 10).prop_flat_map(|c| {
        let n = c.n() as u8;
        (Just(c), perm_of(n))
    });
    runner
        .run(&strat, |(c, sigma)| {
            let sigma = Permutation::new(sigma).unwrap();
            let image = c.relabel(&sigma).unwrap();
            let mut expected: Vec<Vec<u8>> = missing(&c)
                .into_iter()
                .map(|m| m.iter().map(|&v| sigma.apply(v)).collect())
                .collect();
            expected.sort();
            check(missing(&image) == expected, || format!("{c} under {sigma}"))
        })
        .map_err(|e| e.to_string())
}

pub fn reversal_duality(runner: &mut TestRunner) -> Result<(), String> {
    runner
        .run(&cycle_and_perm(5, 12), |(c, p)| {
            let rev = c.reverse();
            let rp: Vec<u8> = p.iter().rev().copied().collect();
            let fwd = CycleMatcher::new(&c).leftmost_start(&p, Engine::NextTable).is_some();
            let back = CycleMatcher::new(&rev).leftmost_start(&rp, Engine::NextTable).is_some();
            check(fwd == back, || format!("{c} / {p:?}"))?;
            if c.n() <= 4 {
                let mut expected: Vec<Vec<u8>> = missing(&c)
                    .into_iter()
                    .map(|m| m.into_iter().rev().collect())
                    .collect();
                expected.sort();
                check(missing(&rev) == expected, || format!("missing sets of {c}"))?;
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn rotation_invariance(runner: &mut TestRunner) -> Result<(), String> {
    let strat = small_cycle(4, 12).prop_flat_map(|c| {
        let r = c.len();
        (Just(c), 1..=r)
    });
    runner
        .run(&strat, |(c, j)| {
            let rotated = c.rotate(j).unwrap();
            check(missing(&rotated) == missing(&c), || format!("{c} rotated at {j}"))
        })
        .map_err(|e| e.to_string())
}

pub fn adjacent_duplicate_removal(runner: &mut TestRunner) -> Result<(), String> {
    let seeds = [
        vec![1u8, 2, 1, 3],
        vec![1, 2, 3, 4, 1, 4, 3, 2],
        vec![1, 2, 3, 4, 2, 3, 4, 2],
    ];
    let random = small_cycle(4, 10).boxed();
    let known = prop::sample::select(seeds.to_vec())
        .prop_map(|v| Cycle::from_values(v).unwrap())
        .boxed();
    let strat = prop_oneof![random, known].prop_flat_map(|c| {
        let r = c.len();
        (Just(c), 0..r)
    });
    runner
        .run(&strat, |(c, i)| {
            let mut v = c.values().to_vec();
            v.insert(i, v[i]);
            let with_dup = Cycle::new(v, c.n()).unwrap();
            check(missing(&with_dup) == missing(&c), || format!("{c} doubling position {}", i + 1))
        })
        .map_err(|e| e.to_string())
}

pub fn lambda_bookkeeping(runner: &mut TestRunner) -> Result<(), String> {
    let perms = (2u8..=12).prop_flat_map(perm_of).prop_map(|p| Cycle::from_values(p).unwrap());
    let strat = prop_oneof![perms, small_cycle(6, 16)];
    runner
        .run(&strat, |c| {
            let r = c.len();
            if r < 2 {
                return Ok(());
            }
            let code = code_of_cycle(&c).unwrap();
            let ld = match lambda_decomposition(&code) {
                Ok(ld) => ld,
                Err(_) => return check(code.ones() == 0, || format!("{c}")),
            };
            check(ld.x + ld.y == r, || format!("x+y for {c}"))?;
            check(ld.lambdas.len() == ld.x, || format!("lambda count for {c}"))?;
            check(ld.lambdas.iter().sum::<usize>() == ld.y, || format!("sum lambda for {c}"))?;
            check(rotation_eq_bits(ld.to_code().bits(), code.bits()), || format!("code {c}"))?;

            let blocks = maximal_blocks(&c).unwrap();
            check(blocks.decreasing.len() == ld.x, || format!("decreasing count {c}"))?;
            check(blocks.increasing.len() == ld.y.max(1), || format!("increasing count {c}"))?;
            let mut dec: Vec<usize> = blocks.decreasing.iter().map(|b| b.len).collect();
            let mut expected: Vec<usize> = ld.lambdas.iter().map(|l| l + 1).collect();
            dec.sort_unstable();
            expected.sort_unstable();
            check(dec == expected, || format!("decreasing lengths {c}"))?;
            let inc_total: usize = blocks.increasing.iter().map(|b| b.len).sum();
            check(inc_total == r || ld.y == 0, || format!("increasing lengths {c}"))?;

            let (si, sd) = string_block_counts(c.values()).unwrap();
            let sc = rosary::code_of_string(c.values()).unwrap();
            check(si + sd == r + 1 && sd == sc.ones() + 1, || format!("string counts {c}"))
        })
        .map_err(|e| e.to_string())
}

pub fn code_order_isomorphism(runner: &mut TestRunner) -> Result<(), String> {
    let strat = (2u8..=12).prop_flat_map(|n| {
        (
            perm_of(n),
            prop::sample::subsequence((1u8..=200).collect::<Vec<u8>>(), usize::from(n)),
        )
    });
    runner
        .run(&strat, |(p, image)| {
            let c = Cycle::from_values(p.clone()).unwrap();
            let mapped = Cycle::from_values(p.iter().map(|&v| image[usize::from(v) - 1]).collect()).unwrap();
            let code = code_of_cycle(&c).unwrap();
            check(code.bits() == code_of_cycle(&mapped).unwrap().bits(), || format!("{c}"))?;

            let rev_code = code_of_cycle(&c.reverse()).unwrap();
            let complemented: Vec<u8> = code.bits().iter().rev().map(|b| 1 - b).collect();
            check(rotation_eq_bits(rev_code.bits(), &complemented), || format!("reverse {c}"))
        })
        .map_err(|e| e.to_string())
}

pub fn canonical_invariance(runner: &mut TestRunner) -> Result<(), String> {
    let strat = small_cycle(5, 10).prop_flat_map(|c| {
        let n = c.n() as u8;
        let r = c.len();
        (Just(c), perm_of(n), 1..=r, any::<bool>())
    });
    runner
        .run(&strat, |(c, sigma, j, flip)| {
            let sigma = Permutation::new(sigma).unwrap();
            let mut image = c.relabel(&sigma).unwrap().rotate(j).unwrap();
            if flip {
                image = image.reverse();
            }
            let canon = canonical_form(&c);
            check(canon == canonical_form(&image), || format!("{c} vs {image}"))?;
            check(canonical_form(&canon) == canon, || format!("idempotence {c}"))
        })
        .map_err(|e| e.to_string())
}

pub type Property = (&'static str, fn(&mut TestRunner) -> Result<(), String>);

pub const PROPERTIES: &[Property] = &[
    ("engine agreement", engine_agreement),
    ("greedy vs enumeration", greedy_vs_enumeration),
    ("relabel equivariance", relabel_equivariance),
    ("reversal duality", reversal_duality),
    ("rotation invariance", rotation_invariance),
    ("adjacent-duplicate removal", adjacent_duplicate_removal),
    ("lambda bookkeeping", lambda_bookkeeping),
    ("code order isomorphism", code_order_isomorphism),
    ("canonical form invariance", canonical_invariance),
];
