//! Explicit rosary constructions, closed-form lengths and the catalog of
//! known short rosaries and counterexample cycles.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::seqcore::{Cycle, Permutation};
use crate::text;

/// Raw catalog data in the shared text format.
pub const CATALOG_TEXT: &str = include_str!("../data/catalog.txt");

fn ascending(m: usize) -> impl Iterator<Item = u8> + Clone {
    1..=m as u8
}

/// `from, from-1, …, to`
fn descending(from: usize, to: usize) -> impl Iterator<Item = u8> + Clone {
    (to as u8..=from as u8).rev()
}

/// Concatenates repeated template factors; zero repetitions are allowed.
#[derive(Default)]
struct Template(Vec<u8>);

impl Template {
    fn push<I: Iterator<Item = u8> + Clone>(mut self, part: I, times: usize) -> Self {
        for _ in 0..times {
            self.0.extend(part.clone());
        }
        self
    }

    fn into_cycle(self, n: usize) -> Cycle {
        Cycle::new(self.0, n).expect("templates only emit values in 1..=n")
    }
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain(msg()))
    }
}

/// `1 (2,…,n)_{n−2} 2`, or `(1,2)` for `n = 2`.
pub fn naive_rosary(n: usize) -> Result<Cycle> {
    require((2..=255).contains(&n), || {
        format!("naive construction needs 2 <= n <= 255, got {n}")
    })?;
    if n == 2 {
        return Ok(Template(vec![1, 2]).into_cycle(2));
    }
    Ok(Template(vec![1])
        .push(2..=n as u8, n - 2)
        .push(std::iter::once(2), 1)
        .into_cycle(n))
}

/// Rosary of length `n²/2` for even `n >= 4`.
///
/// `n = 4k`: `(1,…,n)_k (1,n,n−1,…,2)_k`;
/// `n = 4k+2`: `(1,…,n)_{k+1} (1,n,n−1,…,2)_k`.
pub fn theorem1_rosary(n: usize) -> Result<Cycle> {
    require(n >= 4 && n.is_multiple_of(2) && n <= 254, || {
        format!("the even construction needs n = 4k or n = 4k+2 with n >= 4, got {n}")
    })?;
    let k = n / 4;
    let ups = if n.is_multiple_of(4) { k } else { k + 1 };
    let back = std::iter::once(1).chain(descending(n, 2));
    Ok(Template::default()
        .push(ascending(n), ups)
        .push(back, k)
        .into_cycle(n))
}

/// Rosary for odd `n >= 5`.
///
/// `n = 4k+1`: `(1,…,n)_k (1,…,3k) (n,…,1)_{k−1} (n,…,2)`;
/// `n = 4k+3`: `(1,…,n)_k (1,…,3k+2) (n,…,1)_k (n,…,2)`.
pub fn theorem2_rosary(n: usize) -> Result<Cycle> {
    require(n >= 5 && n % 2 == 1 && n <= 255, || {
        format!("the odd construction needs n = 4k+1 or n = 4k+3 with n >= 5, got {n}")
    })?;
    let k = n / 4;
    let (middle, downs) = if n % 4 == 1 {
        (3 * k, k - 1)
    } else {
        (3 * k + 2, k)
    };
    Ok(Template::default()
        .push(ascending(n), k)
        .push(ascending(middle), 1)
        .push(descending(n, 1), downs)
        .push(descending(n, 2), 1)
        .into_cycle(n))
}

/// The even or odd construction, whichever applies to `n`.
pub fn theorem_rosary(n: usize) -> Result<Cycle> {
    if n.is_multiple_of(2) {
        theorem1_rosary(n)
    } else {
        theorem2_rosary(n)
    }
}

pub fn naive_length(n: usize) -> usize {
    if n == 2 {
        2
    } else {
        n * n - 3 * n + 4
    }
}

/// Closed-form length of [`theorem_rosary`], when it is defined for `n`.
pub fn theorem_length(n: usize) -> Option<usize> {
    let k = n / 4;
    match n % 4 {
        _ if n < 4 => None,
        0 | 2 => Some(n * n / 2),
        1 if n >= 5 => Some(8 * k * k + 5 * k - 1),
        3 => Some(8 * k * k + 13 * k + 4),
        _ => None,
    }
}

/// Which construction produced a cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstructionId {
    Naive { n: usize },
    /// `n = 4k`
    EvenFourK { k: usize },
    /// `n = 4k + 2`
    EvenFourKPlusTwo { k: usize },
    /// `n = 4k + 1`
    OddFourKPlusOne { k: usize },
    /// `n = 4k + 3`
    OddFourKPlusThree { k: usize },
    Catalog { name: String },
}

impl ConstructionId {
    /// The theorem construction matching the residue of `n` modulo 4.
    pub fn theorem_for(n: usize) -> Result<Self> {
        let k = n / 4;
        let id = match n % 4 {
            0 => Self::EvenFourK { k },
            2 => Self::EvenFourKPlusTwo { k },
            1 => Self::OddFourKPlusOne { k },
            _ => Self::OddFourKPlusThree { k },
        };
        require(k >= 1, || {
            format!("theorem constructions need k >= 1 (n >= 4 even, n >= 5 odd), got n = {n}")
        })?;
        Ok(id)
    }

    pub fn degree(&self) -> Result<usize> {
        Ok(match self {
            Self::Naive { n } => *n,
            Self::EvenFourK { k } => 4 * k,
            Self::EvenFourKPlusTwo { k } => 4 * k + 2,
            Self::OddFourKPlusOne { k } => 4 * k + 1,
            Self::OddFourKPlusThree { k } => 4 * k + 3,
            Self::Catalog { name } => catalog(name)?.n(),
        })
    }

    pub fn build(&self) -> Result<Cycle> {
        match self {
            Self::Naive { n } => naive_rosary(*n),
            Self::Catalog { name } => catalog(name),
            Self::EvenFourK { k } | Self::EvenFourKPlusTwo { k } => {
                require(*k >= 1, || "k must be at least 1".into())?;
                theorem1_rosary(self.degree()?)
            }
            Self::OddFourKPlusOne { k } | Self::OddFourKPlusThree { k } => {
                require(*k >= 1, || "k must be at least 1".into())?;
                theorem2_rosary(self.degree()?)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub key: String,
    pub cycle: Cycle,
}

fn parse_catalog(text: &str) -> Result<Vec<CatalogEntry>> {
    let mut out: Vec<CatalogEntry> = Vec::new();
    let mut pending: Option<String> = None;
    for (i, line) in text.lines().enumerate() {
        if let Some(key) = line.trim().strip_prefix("# name:") {
            pending = Some(key.trim().to_string());
            continue;
        }
        if let Some(values) = text::parse_line(line, i + 1)? {
            let key = pending.take().ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: "catalog sequence without a preceding `# name:` line".into(),
            })?;
            out.push(CatalogEntry {
                key,
                cycle: Cycle::from_values(values)?,
            });
        }
    }
    Ok(out)
}

fn entries() -> &'static [CatalogEntry] {
    static ENTRIES: OnceLock<Vec<CatalogEntry>> = OnceLock::new();
    ENTRIES.get_or_init(|| parse_catalog(CATALOG_TEXT).expect("bundled catalog parses"))
}

pub fn catalog_entries() -> &'static [CatalogEntry] {
    entries()
}

pub fn catalog_keys() -> Vec<&'static str> {
    entries().iter().map(|e| e.key.as_str()).collect()
}

pub fn catalog(name: &str) -> Result<Cycle> {
    entries()
        .iter()
        .find(|e| e.key == name)
        .map(|e| e.cycle.clone())
        .ok_or_else(|| Error::UnknownKey(name.to_string()))
}

/// Catalog entries that are rosaries (everything except the `cx-` cycles).
pub fn catalog_rosaries() -> impl Iterator<Item = &'static CatalogEntry> {
    entries().iter().filter(|e| !e.key.starts_with("cx-"))
}

/// Hex SHA-256 of the bundled catalog data.
pub fn catalog_checksum() -> String {
    let digest = Sha256::digest(CATALOG_TEXT.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CounterexampleCase {
    N21,
    N33,
}

impl CounterexampleCase {
    pub fn catalog_key(self) -> &'static str {
        match self {
            Self::N21 => "cx-n21",
            Self::N33 => "cx-n33",
        }
    }
}

impl FromStr for CounterexampleCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n21" | "cx-n21" => Ok(Self::N21),
            "n33" | "cx-n33" => Ok(Self::N33),
            _ => Err(Error::UnknownKey(s.to_string())),
        }
    }
}

impl fmt::Display for CounterexampleCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::N21 => "n21",
            Self::N33 => "n33",
        })
    }
}

const CX_N21_PERM: [u8; 21] = [
    1, 5, 4, 3, 18, 17, 19, 20, 21, 6, 9, 8, 7, 12, 11, 10, 13, 14, 15, 16, 2,
];

const CX_N33_PERM: [u8; 33] = [
    1, 5, 4, 3, 2, 7, 6, 11, 10, 9, 8, 18, 19, 20, 21, 22, 23, 14, 13, 12, 25, 24, 26, 17, 16,
    15, 28, 27, 29, 30, 31, 32, 33,
];

/// Permutation and cycle of a claimed non-containment instance.
pub fn counterexample_instance(case: CounterexampleCase) -> Result<(Permutation, Cycle)> {
    let perm = match case {
        CounterexampleCase::N21 => CX_N21_PERM.to_vec(),
        CounterexampleCase::N33 => CX_N33_PERM.to_vec(),
    };
    Ok((Permutation::new(perm)?, catalog(case.catalog_key())?))
}

/// The counterexample cycle rebuilt from its template rather than the catalog.
pub fn counterexample_template(case: CounterexampleCase) -> Cycle {
    let (n, ups, middle, downs) = match case {
        CounterexampleCase::N21 => (21, 5, 12, 4),
        CounterexampleCase::N33 => (33, 8, 17, 7),
    };
    Template::default()
        .push(ascending(n), ups)
        .push(ascending(middle), 1)
        .push(descending(n, 1), downs)
        .push(descending(n, 2), 1)
        .into_cycle(n)
}

/// Known upper bounds on the shortest rosary of one degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub n: usize,
    pub naive_length: usize,
    pub theorem_length: Option<usize>,
    pub catalog_length: Option<usize>,
    pub conjecture_target: f64,
    /// `n²/2 + n/4 − 1`, odd `n` only.
    pub odd_bound: Option<f64>,
    pub best_length: usize,
}

fn shortest_catalog_lengths() -> BTreeMap<usize, usize> {
    let mut best = BTreeMap::new();
    for e in catalog_rosaries() {
        let slot = best.entry(e.cycle.n()).or_insert(usize::MAX);
        *slot = (*slot).min(e.cycle.len());
    }
    best
}

pub fn bounds_table(n_max: usize) -> Vec<BoundsRow> {
    let catalog = shortest_catalog_lengths();
    (2..=n_max)
        .map(|n| {
            let naive_length = naive_length(n);
            let theorem_length = theorem_length(n);
            let catalog_length = catalog.get(&n).copied();
            let best_length = [Some(naive_length), theorem_length, catalog_length]
                .into_iter()
                .flatten()
                .min()
                .unwrap();
            let nf = n as f64;
            BoundsRow {
                n,
                naive_length,
                theorem_length,
                catalog_length,
                conjecture_target: nf * nf / 2.0,
                odd_bound: (n % 2 == 1).then(|| nf * nf / 2.0 + nf / 4.0 - 1.0),
                best_length,
            }
        })
        .collect()
}
