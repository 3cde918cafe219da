//! Support sets of outcome distributions and the confusability graph.
//!
//! For a state set `S`, POVM `P` and channel `E`, state `k` has support
//! `A_k = { j : p(j|k) > eps }`. States `a` and `b` are non-adjacent (perfectly
//! distinguishable in one use) iff `A_a` and `A_b` are disjoint. The graph
//! stored here carries the complement relation: an edge joins two states
//! whose supports intersect, i.e. two states that can be confused. Zero-error
//! codes are then independent sets, as in the classical setting.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::quantum::{DensityMatrix, Povm, ProbVector, QuantumChannel, QuantumError, Tolerances};

/// Default probability threshold separating genuine zeros from leakage.
pub const DEFAULT_EPS_SUPPORT: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdjacencyError {
    #[error("state {state_index} has no outcome with probability above {eps:e}")]
    EmptySupport { state_index: usize, eps: f64 },
    #[error("support threshold must be finite and non-negative, got {0}")]
    InvalidEpsilon(f64),
    #[error("{states} states exceed the Hilbert space dimension {dim}")]
    Overcomplete { states: usize, dim: usize },
    #[error("state set is empty")]
    EmptyStateSet,
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

pub type Result<T, E = AdjacencyError> = std::result::Result<T, E>;

/// Outcomes that state `state_index` can produce.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportSet {
    pub state_index: usize,
    /// Sorted outcome indices.
    pub outcomes: Vec<usize>,
}

impl SupportSet {
    pub fn contains(&self, outcome: usize) -> bool {
        self.outcomes.binary_search(&outcome).is_ok()
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }
}

/// `{ j : p_j > eps }`.
pub fn support_set(state_index: usize, p: &ProbVector, eps: f64) -> Result<SupportSet> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(AdjacencyError::InvalidEpsilon(eps));
    }
    let outcomes: Vec<usize> = p
        .as_slice()
        .iter()
        .enumerate()
        .filter(|(_, &pj)| pj > eps)
        .map(|(j, _)| j)
        .collect();
    if outcomes.is_empty() {
        return Err(AdjacencyError::EmptySupport { state_index, eps });
    }
    Ok(SupportSet {
        state_index,
        outcomes,
    })
}

/// True iff the two supports share no outcome.
pub fn non_adjacent(a: &SupportSet, b: &SupportSet) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.outcomes.len() && j < b.outcomes.len() {
        match a.outcomes[i].cmp(&b.outcomes[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return false,
        }
    }
    true
}

/// Ordered input states sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSet {
    dim: usize,
    states: Vec<DensityMatrix>,
}

impl StateSet {
    /// At most `dim` states unless `allow_overcomplete`.
    pub fn new(states: Vec<DensityMatrix>, allow_overcomplete: bool) -> Result<Self> {
        let dim = states.first().ok_or(AdjacencyError::EmptyStateSet)?.dim();
        for s in &states {
            if s.dim() != dim {
                return Err(QuantumError::DimensionMismatch {
                    expected: dim,
                    found: s.dim(),
                }
                .into());
            }
        }
        if states.len() > dim && !allow_overcomplete {
            return Err(AdjacencyError::Overcomplete {
                states: states.len(),
                dim,
            });
        }
        Ok(Self { dim, states })
    }

    /// The first `m` computational basis states.
    pub fn computational(dim: usize, m: usize) -> Result<Self> {
        Self::new((0..m).map(|i| DensityMatrix::basis(dim, i)).collect(), false)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn get(&self, i: usize) -> &DensityMatrix {
        &self.states[i]
    }
}

/// Confusability graph together with the data it was built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusabilityGraph {
    pub graph: Graph,
    pub supports: Vec<SupportSet>,
    /// Row `k` is `p(.|k)`.
    pub probabilities: Vec<Vec<f64>>,
    pub eps: f64,
    /// Probabilities within a factor of ten of `eps`, where the support
    /// decision is numerically fragile.
    pub fragile_entries: usize,
}

impl ConfusabilityGraph {
    /// Builds the graph directly from support sets.
    pub fn from_supports(supports: Vec<SupportSet>, eps: f64) -> Self {
        let m = supports.len();
        let mut graph = Graph::edgeless(m);
        for a in 0..m {
            for b in a + 1..m {
                if !non_adjacent(&supports[a], &supports[b]) {
                    graph.add_edge(a, b).expect("distinct in-range vertices");
                }
            }
        }
        Self {
            graph,
            supports,
            probabilities: Vec::new(),
            eps,
            fragile_entries: 0,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// At least one pair of states with disjoint supports exists.
    pub fn has_positive_zero_error_capacity(&self) -> bool {
        self.non_adjacent_pair_count() >= 1
    }

    /// Number of unordered pairs with disjoint supports.
    pub fn non_adjacent_pair_count(&self) -> usize {
        self.graph.non_edge_count()
    }

    /// Non-adjacent pairs `(a, b)` with `a < b`.
    pub fn non_adjacent_pairs(&self) -> Vec<(usize, usize)> {
        let m = self.vertex_count();
        (0..m)
            .flat_map(|a| (a + 1..m).map(move |b| (a, b)))
            .filter(|&(a, b)| !self.graph.has_edge(a, b))
            .collect()
    }
}

/// Outcome distribution for every state of `s`.
pub fn probability_table(
    ch: &QuantumChannel,
    s: &StateSet,
    p: &Povm,
    tol: &Tolerances,
) -> Result<Vec<ProbVector>> {
    s.states()
        .iter()
        .map(|rho| ch.outcome_probabilities(rho, p, tol).map_err(Into::into))
        .collect()
}

/// Confusability graph of `(S, P)` through `ch` at threshold `eps`.
pub fn confusability_graph(
    ch: &QuantumChannel,
    s: &StateSet,
    p: &Povm,
    eps: f64,
    tol: &Tolerances,
) -> Result<ConfusabilityGraph> {
    let table = probability_table(ch, s, p, tol)?;
    let supports = table
        .iter()
        .enumerate()
        .map(|(k, row)| support_set(k, row, eps))
        .collect::<Result<Vec<_>>>()?;
    let fragile_entries = table
        .iter()
        .flat_map(|row| row.as_slice().iter())
        .filter(|&&pj| pj >= eps / 10.0 && pj <= eps * 10.0)
        .count();
    let mut g = ConfusabilityGraph::from_supports(supports, eps);
    g.probabilities = table.into_iter().map(|row| row.as_slice().to_vec()).collect();
    g.fragile_entries = fragile_entries;
    Ok(g)
}
