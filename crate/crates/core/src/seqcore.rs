//! Cycles, permutations, ascent/descent codes, lambda decompositions and
//! maximal monotone blocks.
//!
//! Positions are 1-based throughout the public API, like the values
//! themselves. A position `i` of a cycle of length `r` refers to the element
//! stored at offset `(i - 1) mod r`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported alphabet size.
pub const MAX_DEGREE: usize = u8::MAX as usize;

fn check_degree(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DEGREE {
        return Err(Error::AlphabetSize(n));
    }
    Ok(())
}

/// Writes `1,2,3` style output shared by every textual interface.
pub(crate) fn write_csv(f: &mut fmt::Formatter<'_>, values: &[u8]) -> fmt::Result {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

/// A cyclic sequence over the alphabet `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cycle {
    values: Vec<u8>,
    n: usize,
}

impl Cycle {
    pub fn new(values: Vec<u8>, n: usize) -> Result<Self> {
        check_degree(n)?;
        if values.is_empty() {
            return Err(Error::Domain("a cycle needs at least one element".into()));
        }
        if let Some(&v) = values.iter().find(|&&v| v == 0 || usize::from(v) > n) {
            return Err(Error::ValueOutOfRange {
                value: v.into(),
                n,
            });
        }
        Ok(Self { values, n })
    }

    /// Builds a cycle whose alphabet size is its largest value.
    pub fn from_values(values: Vec<u8>) -> Result<Self> {
        let n = values.iter().copied().max().map_or(0, usize::from);
        Self::new(values, n.max(1))
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Alphabet size (degree).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Value at 1-based cyclic position `i` (any `i >= 1` wraps around).
    pub fn at(&self, i: usize) -> u8 {
        assert!(i >= 1, "positions are 1-based");
        self.values[(i - 1) % self.values.len()]
    }

    /// True when every value of `1..=n` occurs at least once.
    pub fn covers_alphabet(&self) -> bool {
        let mut seen = vec![false; self.n + 1];
        for &v in &self.values {
            seen[usize::from(v)] = true;
        }
        seen[1..].iter().all(|&s| s)
    }

    /// Equality as cycles: some rotation of `self` equals `other` positionally.
    pub fn rotation_eq(&self, other: &Cycle) -> bool {
        if self.n != other.n || self.len() != other.len() {
            return false;
        }
        let r = self.len();
        (0..r).any(|j| (0..r).all(|i| self.values[(i + j) % r] == other.values[i]))
    }

    /// The cycle read starting at 1-based position `j`.
    pub fn rotate(&self, j: usize) -> Result<Cycle> {
        let r = self.len();
        if j == 0 || j > r {
            return Err(Error::IndexOutOfRange { index: j, len: r });
        }
        let mut values = self.values.clone();
        values.rotate_left(j - 1);
        Ok(Cycle { values, n: self.n })
    }

    /// Applies `sigma` pointwise: value `v` becomes `sigma(v)`.
    pub fn relabel(&self, sigma: &Permutation) -> Result<Cycle> {
        if sigma.n() != self.n {
            return Err(Error::Domain(format!(
                "relabeling permutation has degree {} but the cycle has degree {}",
                sigma.n(),
                self.n
            )));
        }
        let values = self.values.iter().map(|&v| sigma.apply(v)).collect();
        Ok(Cycle { values, n: self.n })
    }

    /// The same cycle read counter-clockwise.
    pub fn reverse(&self) -> Cycle {
        let mut values = self.values.clone();
        values.reverse();
        Cycle { values, n: self.n }
    }

    /// Two laps of the cycle as a linear string.
    pub fn doubled(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(2 * self.len());
        out.extend_from_slice(&self.values);
        out.extend_from_slice(&self.values);
        out
    }

    /// The one-loop reading starting at 1-based position `j`.
    pub fn linearize(&self, j: usize) -> Result<Vec<u8>> {
        Ok(self.rotate(j)?.values)
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_csv(f, &self.values)
    }
}

/// An ordering of `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct Permutation {
    values: Vec<u8>,
}

impl Permutation {
    pub fn new(values: Vec<u8>) -> Result<Self> {
        let n = values.len();
        check_degree(n)?;
        let mut seen = vec![false; n + 1];
        for &v in &values {
            let v = usize::from(v);
            if v == 0 || v > n || seen[v] {
                return Err(Error::NotAPermutation { values, n });
            }
            seen[v] = true;
        }
        Ok(Self { values })
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_degree(n)?;
        Ok(Self {
            values: (1..=n as u8).collect(),
        })
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Image of `v` under this permutation viewed as the map `i -> values[i-1]`.
    pub fn apply(&self, v: u8) -> u8 {
        self.values[usize::from(v) - 1]
    }

    /// `self ∘ other`: first `other`, then `self`, i.e. `self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.n() != other.n() {
            return Err(Error::Domain("composing permutations of different degree".into()));
        }
        Ok(Permutation {
            values: other.values.iter().map(|&v| self.apply(v)).collect(),
        })
    }

    pub fn reversed(&self) -> Permutation {
        let mut values = self.values.clone();
        values.reverse();
        Permutation { values }
    }

    pub fn as_cycle(&self) -> Cycle {
        Cycle {
            values: self.values.clone(),
            n: self.n(),
        }
    }
}

impl TryFrom<Vec<u8>> for Permutation {
    type Error = Error;

    fn try_from(values: Vec<u8>) -> Result<Self> {
        Permutation::new(values)
    }
}

impl From<Permutation> for Vec<u8> {
    fn from(p: Permutation) -> Self {
        p.values
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_csv(f, &self.values)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeKind {
    Cyclic,
    String,
}

/// Ascent/descent code: bit `i` is `H(a[i+1] - a[i])` with `H(0) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Code {
    bits: Vec<u8>,
    kind: CodeKind,
}

impl Code {
    /// Wraps raw 0/1 bits, e.g. to decompose a hand-written code.
    pub fn from_bits(bits: Vec<u8>, kind: CodeKind) -> Result<Self> {
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::Domain(format!("code bit {b} is not 0 or 1")));
        }
        Ok(Self { bits, kind })
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn zeros(&self) -> usize {
        self.len() - self.ones()
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_csv(f, &self.bits)
    }
}

fn heaviside(from: u8, to: u8) -> u8 {
    u8::from(to >= from)
}

pub fn code_of_cycle(c: &Cycle) -> Result<Code> {
    let r = c.len();
    if r < 2 {
        return Err(Error::Degenerate { len: r });
    }
    let v = c.values();
    let bits = (0..r).map(|i| heaviside(v[i], v[(i + 1) % r])).collect();
    Ok(Code {
        bits,
        kind: CodeKind::Cyclic,
    })
}

pub fn code_of_string(s: &[u8]) -> Result<Code> {
    if s.len() < 2 {
        return Err(Error::Degenerate { len: s.len() });
    }
    let bits = s.windows(2).map(|w| heaviside(w[0], w[1])).collect();
    Ok(Code {
        bits,
        kind: CodeKind::String,
    })
}

/// Counts of ones and zeros of a cyclic code together with the cyclic vector
/// of zero-run lengths between consecutive ones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaDecomposition {
    pub x: usize,
    pub y: usize,
    pub lambdas: Vec<usize>,
    /// 1-based code position of the 1-bit opening `lambdas[0]`.
    pub anchor: usize,
}

impl LambdaDecomposition {
    /// `λ_{i+1} + … + λ_{i+k}` with cyclic indices; `i` is 1-based.
    pub fn window_sum(&self, i: usize, k: usize) -> usize {
        let x = self.x;
        (1..=k).map(|t| self.lambdas[(i - 1 + t) % x]).sum()
    }

    /// `λ_i` for a 1-based, cyclically wrapped index.
    pub fn lambda(&self, i: usize) -> usize {
        self.lambdas[(i - 1) % self.x]
    }

    /// 1-based position (in the source code, hence in the source cycle) of
    /// the 1-bit that opens `λ_i`.
    pub fn one_position(&self, i: usize, code_len: usize) -> usize {
        let offset: usize = (i - 1) + self.lambdas[..i - 1].iter().sum::<usize>();
        (self.anchor - 1 + offset) % code_len + 1
    }

    /// Rebuilds `1 (0)_{λ1} 1 (0)_{λ2} …` and rotates it back to the anchor.
    pub fn to_code(&self) -> Code {
        let len = self.x + self.y;
        let mut canonical = Vec::with_capacity(len);
        for &l in &self.lambdas {
            canonical.push(1);
            canonical.extend(std::iter::repeat_n(0, l));
        }
        let mut bits = vec![0; len];
        for (k, b) in canonical.into_iter().enumerate() {
            bits[(self.anchor - 1 + k) % len] = b;
        }
        Code {
            bits,
            kind: CodeKind::Cyclic,
        }
    }
}

pub fn lambda_decomposition(code: &Code) -> Result<LambdaDecomposition> {
    if code.kind != CodeKind::Cyclic {
        return Err(Error::Domain(
            "lambda decomposition needs a cyclic code".into(),
        ));
    }
    let bits = &code.bits;
    let m = bits.len();
    let first = bits.iter().position(|&b| b == 1).ok_or(Error::NoAscent)?;
    let mut lambdas = Vec::new();
    let mut zeros = 0;
    for k in 1..=m {
        if bits[(first + k) % m] == 1 {
            lambdas.push(zeros);
            zeros = 0;
        } else {
            zeros += 1;
        }
    }
    let x = lambdas.len();
    Ok(LambdaDecomposition {
        x,
        y: m - x,
        lambdas,
        anchor: first + 1,
    })
}

/// A run of cyclically consecutive positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    /// 1-based start position.
    pub start: usize,
    pub len: usize,
}

impl Block {
    /// 1-based position of the last element (wrapped into `1..=r`).
    pub fn end(&self, r: usize) -> usize {
        (self.start - 1 + self.len - 1) % r + 1
    }

    pub fn values(&self, c: &Cycle) -> Vec<u8> {
        (0..self.len).map(|k| c.at(self.start + k)).collect()
    }
}

/// Maximal increasing and decreasing blocks of a cycle.
///
/// Each family partitions the cycle: increasing blocks are cut at descents
/// and decreasing blocks at ascents, so the first element of an increasing
/// block also ends the preceding decreasing block. A cycle whose code has
/// `x` ones and `y` zeros has `y` increasing and `x` decreasing blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockDecomposition {
    pub increasing: Vec<Block>,
    pub decreasing: Vec<Block>,
}

impl BlockDecomposition {
    pub fn increasing_values(&self, c: &Cycle) -> Vec<Vec<u8>> {
        self.increasing.iter().map(|b| b.values(c)).collect()
    }

    pub fn decreasing_values(&self, c: &Cycle) -> Vec<Vec<u8>> {
        self.decreasing.iter().map(|b| b.values(c)).collect()
    }
}

fn blocks_cut_at(bits: &[u8], cut: u8) -> Vec<Block> {
    let r = bits.len();
    // A block starts right after every cut bit.
    let mut starts: Vec<usize> = (0..r)
        .filter(|&i| bits[i] == cut)
        .map(|i| (i + 1) % r + 1)
        .collect();
    if starts.is_empty() {
        return vec![Block { start: 1, len: r }];
    }
    starts.sort_unstable();
    let k = starts.len();
    (0..k)
        .map(|t| {
            let start = starts[t];
            let next = starts[(t + 1) % k];
            let len = if k == 1 { r } else { (next + r - start) % r };
            Block { start, len }
        })
        .collect()
}

pub fn maximal_blocks(c: &Cycle) -> Result<BlockDecomposition> {
    let code = code_of_cycle(c)?;
    Ok(BlockDecomposition {
        increasing: blocks_cut_at(&code.bits, 0),
        decreasing: blocks_cut_at(&code.bits, 1),
    })
}

/// Number of maximal increasing and decreasing runs of a linear string.
pub fn string_block_counts(s: &[u8]) -> Result<(usize, usize)> {
    let code = code_of_string(s)?;
    Ok((code.zeros() + 1, code.ones() + 1))
}
