//! Zero-error block codes over `n` channel uses with product measurements.
//!
//! Codewords are tuples of state indices forming an independent set of the
//! strong power of the confusability graph. Codeword `c` can produce exactly
//! the output words in `A_{c_1} x ... x A_{c_n}`; the code is zero-error iff
//! these sets are pairwise disjoint, and decoding maps each reachable word
//! back to its codeword.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adjacency::{probability_table, support_set, AdjacencyError, ConfusabilityGraph, StateSet, SupportSet};
use crate::graph::{independence_number, power_tuple, strong_power, GraphError, Limits};
use crate::quantum::{DensityMatrix, Povm, QuantumChannel, Tolerances};

/// Largest support enumerated per codeword.
pub const ENUMERATION_CAP: u128 = 1_000_000;

/// Largest `d^n` for which supports are recomputed on the tensor-product state.
pub const TENSOR_DIM_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodeError {
    #[error("block length must be at least 1")]
    ZeroLength,
    #[error("code has no codewords")]
    Empty,
    #[error("codeword {index} is invalid: {reason}")]
    InvalidCodeword { index: usize, reason: String },
    #[error("codeword {codeword} reaches {words} output words, above the cap of {cap}")]
    EnumerationCap { codeword: usize, words: u128, cap: u128 },
    #[error("codewords {first} and {second} can both produce output word {word:?}")]
    AmbiguousSupports {
        first: usize,
        second: usize,
        word: OutputWord,
    },
    #[error("output word {word:?} is out of range for {outcomes} outcomes and length {n}")]
    WordOutOfRange {
        word: OutputWord,
        outcomes: usize,
        n: usize,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Adjacency(#[from] AdjacencyError),
}

pub type Result<T, E = CodeError> = std::result::Result<T, E>;

/// Outcome indices observed over the `n` uses.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OutputWord(pub Vec<usize>);

#[derive(Debug, Clone)]
pub struct QuantumBlockCode {
    n: usize,
    /// Sorted lexicographically; message `k` is codeword `k`.
    codewords: Vec<Vec<usize>>,
    source: StateSet,
    povm: Povm,
    eps: f64,
}

impl QuantumBlockCode {
    /// Code from explicit codewords, which are sorted and must be distinct
    /// tuples of length `n` with entries below `source.len()`. Nothing is
    /// checked about zero error; see [`build_decoder`] and [`verify_zero_error`].
    pub fn new(mut codewords: Vec<Vec<usize>>, source: StateSet, povm: Povm, eps: f64) -> Result<Self> {
        let n = codewords.first().ok_or(CodeError::Empty)?.len();
        if n == 0 {
            return Err(CodeError::ZeroLength);
        }
        for (index, c) in codewords.iter().enumerate() {
            let reason = if c.len() != n {
                format!("length {} differs from {n}", c.len())
            } else if let Some(bad) = c.iter().find(|&&k| k >= source.len()) {
                format!("state index {bad} out of range for {} states", source.len())
            } else {
                continue;
            };
            return Err(CodeError::InvalidCodeword { index, reason });
        }
        codewords.sort();
        if let Some(i) = codewords.windows(2).position(|w| w[0] == w[1]) {
            return Err(CodeError::InvalidCodeword {
                index: i + 1,
                reason: "duplicate codeword".into(),
            });
        }
        Ok(Self {
            n,
            codewords,
            source,
            povm,
            eps,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn codewords(&self) -> &[Vec<usize>] {
        &self.codewords
    }

    /// Number of messages `K`.
    pub fn size(&self) -> usize {
        self.codewords.len()
    }

    pub fn source(&self) -> &StateSet {
        &self.source
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `log2(K) / n` bits per channel use.
    pub fn rate(&self) -> f64 {
        (self.size() as f64).log2() / self.n as f64
    }
}

/// Maximum code of length `n`: a maximum independent set of the `n`-th
/// strong power of `g`, read as tuples of state indices.
pub fn build_code(g: &ConfusabilityGraph, s: &StateSet, p: &Povm, n: usize, limits: &Limits) -> Result<QuantumBlockCode> {
    if n == 0 {
        return Err(CodeError::ZeroLength);
    }
    let power = strong_power(&g.graph, n, limits)?;
    let set = independence_number(&power, limits)?;
    let base = g.vertex_count();
    let codewords = set.vertices.iter().map(|&v| power_tuple(v, base, n)).collect();
    QuantumBlockCode::new(codewords, s.clone(), p.clone(), g.eps)
}

/// Per-state supports recomputed from the channel at the code's threshold.
fn state_supports(code: &QuantumBlockCode, ch: &QuantumChannel) -> Result<(Vec<SupportSet>, Vec<Vec<f64>>)> {
    let table = probability_table(ch, &code.source, &code.povm, &Tolerances::default())?;
    let supports = table
        .iter()
        .enumerate()
        .map(|(k, row)| support_set(k, row, code.eps))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((supports, table.into_iter().map(|r| r.as_slice().to_vec()).collect()))
}

fn support_size(codeword: &[usize], supports: &[SupportSet]) -> u128 {
    codeword
        .iter()
        .map(|&k| supports[k].len() as u128)
        .fold(1u128, |a, b| a.saturating_mul(b))
}

/// All words of `A_{c_1} x ... x A_{c_n}` in lexicographic order.
fn cartesian(codeword: &[usize], supports: &[SupportSet]) -> Vec<OutputWord> {
    let sets: Vec<&[usize]> = codeword.iter().map(|&k| supports[k].outcomes.as_slice()).collect();
    let mut out = Vec::new();
    let mut pos = vec![0; sets.len()];
    loop {
        out.push(OutputWord(pos.iter().zip(&sets).map(|(&i, s)| s[i]).collect()));
        // Odometer increment, last position fastest.
        let mut t = sets.len();
        loop {
            if t == 0 {
                return out;
            }
            t -= 1;
            pos[t] += 1;
            if pos[t] < sets[t].len() {
                break;
            }
            pos[t] = 0;
        }
    }
}

/// Output words each codeword can produce, in codeword order.
pub fn reachable_supports(code: &QuantumBlockCode, ch: &QuantumChannel) -> Result<Vec<Vec<OutputWord>>> {
    let (supports, _) = state_supports(code, ch)?;
    for (i, c) in code.codewords.iter().enumerate() {
        let words = support_size(c, &supports);
        if words > ENUMERATION_CAP {
            return Err(CodeError::EnumerationCap {
                codeword: i,
                words,
                cap: ENUMERATION_CAP,
            });
        }
    }
    Ok(code
        .codewords
        .par_iter()
        .map(|c| cartesian(c, &supports))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decoded {
    Message(usize),
    /// No codeword can produce this word.
    Unreachable,
}

/// Sparse map from reachable output words to messages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoderTable {
    pub n: usize,
    pub outcomes: usize,
    pub messages: usize,
    pub entries: BTreeMap<OutputWord, usize>,
}

impl DecoderTable {
    pub fn decode(&self, word: &OutputWord) -> Result<Decoded> {
        if word.0.len() != self.n || word.0.iter().any(|&j| j >= self.outcomes) {
            return Err(CodeError::WordOutOfRange {
                word: word.clone(),
                outcomes: self.outcomes,
                n: self.n,
            });
        }
        Ok(self
            .entries
            .get(word)
            .map_or(Decoded::Unreachable, |&m| Decoded::Message(m)))
    }

    pub fn reachable_count(&self) -> usize {
        self.entries.len()
    }

    /// `N^n` minus the reachable words.
    pub fn unreachable_count(&self) -> u128 {
        (self.outcomes as u128).pow(self.n as u32) - self.entries.len() as u128
    }
}

/// Decoder mapping every reachable word to its codeword's message; fails if
/// two codewords share a reachable word.
pub fn build_decoder(code: &QuantumBlockCode, ch: &QuantumChannel) -> Result<DecoderTable> {
    let words = reachable_supports(code, ch)?;
    let mut entries = BTreeMap::new();
    for (message, list) in words.into_iter().enumerate() {
        for w in list {
            if let Some(&first) = entries.get(&w) {
                return Err(CodeError::AmbiguousSupports {
                    first,
                    second: message,
                    word: w,
                });
            }
            entries.insert(w, message);
        }
    }
    Ok(DecoderTable {
        n: code.n,
        outcomes: code.povm.len(),
        messages: code.size(),
        entries,
    })
}

/// Supports recomputed on the `d^n`-dimensional product state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorCheck {
    /// Tensor-path support equals the Cartesian product for every codeword.
    pub matches_product: bool,
    /// Codewords whose two supports differ.
    pub mismatched_codewords: Vec<usize>,
    /// Tensor-path supports are pairwise disjoint.
    pub disjoint: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroErrorReport {
    pub passed: bool,
    pub codewords: usize,
    pub pairs_checked: usize,
    /// Codeword pairs `(a, b)`, `a < b`, whose supports intersect.
    pub overlapping_pairs: Vec<(usize, usize)>,
    /// Largest probability, over ordered pairs `(a, b)`, that codeword `a`
    /// produces a word codeword `b` can also produce.
    pub max_overlap_mass: f64,
    /// Absent when `d^n` exceeds the tensor cap.
    pub tensor: Option<TensorCheck>,
}

/// Checks pairwise disjointness of the product-measurement supports and,
/// for small `d^n`, recomputes them on the tensor-product state with the
/// product POVM.
pub fn verify_zero_error(code: &QuantumBlockCode, ch: &QuantumChannel) -> Result<ZeroErrorReport> {
    let (supports, probs) = state_supports(code, ch)?;
    let k = code.size();
    let mut overlapping = Vec::new();
    let mut max_mass = 0.0f64;
    for a in 0..k {
        for b in a + 1..k {
            let (ca, cb) = (&code.codewords[a], &code.codewords[b]);
            // The intersection of two Cartesian products factorizes per position.
            let shared: Vec<Vec<usize>> = ca
                .iter()
                .zip(cb)
                .map(|(&x, &y)| {
                    supports[x]
                        .outcomes
                        .iter()
                        .copied()
                        .filter(|&j| supports[y].contains(j))
                        .collect()
                })
                .collect();
            if shared.iter().all(|s| !s.is_empty()) {
                overlapping.push((a, b));
                for c in [ca, cb] {
                    let mass: f64 = c
                        .iter()
                        .zip(&shared)
                        .map(|(&x, s)| s.iter().map(|&j| probs[x][j]).sum::<f64>())
                        .product();
                    max_mass = max_mass.max(mass);
                }
            }
        }
    }

    let tensor = tensor_check(code, ch, &supports)?;
    let passed = overlapping.is_empty() && tensor.as_ref().is_none_or(|t| t.disjoint);
    Ok(ZeroErrorReport {
        passed,
        codewords: k,
        pairs_checked: k * k.saturating_sub(1) / 2,
        overlapping_pairs: overlapping,
        max_overlap_mass: max_mass,
        tensor,
    })
}

fn tensor_check(code: &QuantumBlockCode, ch: &QuantumChannel, supports: &[SupportSet]) -> Result<Option<TensorCheck>> {
    let d = ch.dim();
    let big = (d as u128).checked_pow(code.n as u32).unwrap_or(u128::MAX);
    if big > TENSOR_DIM_CAP as u128 {
        return Ok(None);
    }
    let mut channel = ch.clone();
    let mut povm = code.povm.clone();
    for _ in 1..code.n {
        channel = channel.tensor(ch);
        povm = povm.tensor(&code.povm);
    }
    let outcomes = code.povm.len();
    let tol = Tolerances::default();
    let mut mismatched = Vec::new();
    let mut tensor_supports = Vec::with_capacity(code.size());
    for (i, c) in code.codewords.iter().enumerate() {
        let rho = c
            .iter()
            .skip(1)
            .fold(code.source.get(c[0]).clone(), |acc: DensityMatrix, &x| acc.tensor(code.source.get(x)));
        let p = channel
            .outcome_probabilities(&rho, &povm, &tol)
            .map_err(AdjacencyError::from)?;
        let support: Vec<usize> = p
            .as_slice()
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > code.eps)
            .map(|(j, _)| j)
            .collect();
        let product: Vec<usize> = cartesian(c, supports)
            .iter()
            .map(|w| crate::graph::power_index(&w.0, outcomes))
            .collect();
        if support != product {
            mismatched.push(i);
        }
        tensor_supports.push(support);
    }
    let disjoint = (0..tensor_supports.len()).all(|a| {
        (a + 1..tensor_supports.len()).all(|b| {
            let sb = &tensor_supports[b];
            tensor_supports[a].iter().all(|j| sb.binary_search(j).is_err())
        })
    });
    Ok(Some(TensorCheck {
        matches_product: mismatched.is_empty(),
        mismatched_codewords: mismatched,
        disjoint,
    }))
}
