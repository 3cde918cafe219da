//! Exact maximum independent set by branch and bound.
//!
//! Independent sets of `G` are cliques of the complement, so the search is a
//! Tomita-style maximum clique expansion on the complement: candidates are
//! greedily partitioned into cliques of `G` (each can contribute at most one
//! vertex), and a branch is cut when the partition count cannot beat the
//! incumbent. Vertices are relabeled by ascending degree first.
//!
//! The witness is the lexicographically smallest maximum independent set,
//! found by fixing vertices in index order and re-running the bounded search
//! as a feasibility oracle. That makes the witness a property of the graph,
//! independent of branching order.

use serde::{Deserialize, Serialize};

use super::bitset::VertexSet;
use super::{check_size, Graph, Limits, Result};

/// Maximum independent set size together with one witness (sorted).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependentSet {
    pub size: usize,
    pub vertices: Vec<usize>,
}

/// True iff `vertices` are distinct, in range and pairwise non-adjacent.
pub fn is_independent(g: &Graph, vertices: &[usize]) -> bool {
    for (i, &a) in vertices.iter().enumerate() {
        if a >= g.vertex_count() {
            return false;
        }
        for &b in &vertices[i + 1..] {
            if a == b || g.has_edge(a, b) {
                return false;
            }
        }
    }
    true
}

struct Solver {
    /// Non-neighbors of each relabeled vertex, itself excluded.
    non_adj: Vec<VertexSet>,
    adj: Vec<VertexSet>,
    /// `relabeled[v]` is the solver index of original vertex `v`.
    relabeled: Vec<usize>,
}

struct Incumbent {
    len: usize,
    set: Option<Vec<usize>>,
    target: usize,
}

impl Solver {
    fn new(g: &Graph) -> Self {
        let n = g.vertex_count();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (g.degree(v), v));
        let mut relabeled = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            relabeled[old] = new;
        }
        let mut adj = vec![VertexSet::empty(n); n];
        for (a, b) in g.edges() {
            adj[relabeled[a]].insert(relabeled[b]);
            adj[relabeled[b]].insert(relabeled[a]);
        }
        let non_adj = (0..n)
            .map(|v| {
                let mut s = VertexSet::full(n);
                s.difference_with(&adj[v]);
                s.remove(v);
                s
            })
            .collect();
        Self {
            non_adj,
            adj,
            relabeled,
        }
    }

    /// Greedy partition of `cand` into cliques of `G`; returns vertices in
    /// partition order with the running partition number as bound.
    fn color(&self, cand: &VertexSet) -> (Vec<usize>, Vec<usize>) {
        let mut order = Vec::with_capacity(cand.len());
        let mut colors = Vec::with_capacity(cand.len());
        let mut uncolored = cand.clone();
        let mut color = 0;
        while !uncolored.is_empty() {
            color += 1;
            let mut open = uncolored.clone();
            while let Some(v) = open.first() {
                uncolored.remove(v);
                open.intersect_with(&self.adj[v]);
                order.push(v);
                colors.push(color);
            }
        }
        (order, colors)
    }

    fn expand(&self, mut cand: VertexSet, current: &mut Vec<usize>, best: &mut Incumbent) -> bool {
        let (order, colors) = self.color(&cand);
        for i in (0..order.len()).rev() {
            if current.len() + colors[i] <= best.len {
                return false;
            }
            let v = order[i];
            current.push(v);
            let next = cand.intersect(&self.non_adj[v]);
            let done = if next.is_empty() {
                if current.len() > best.len {
                    best.len = current.len();
                    best.set = Some(current.clone());
                }
                best.len >= best.target
            } else {
                self.expand(next, current, best)
            };
            current.pop();
            if done {
                return true;
            }
            cand.remove(v);
        }
        false
    }

    fn maximum(&self, cand: &VertexSet) -> usize {
        let mut best = Incumbent {
            len: 0,
            set: None,
            target: usize::MAX,
        };
        self.expand(cand.clone(), &mut Vec::new(), &mut best);
        best.len
    }

    /// Does `cand` contain an independent set of size `k`?
    fn exists(&self, cand: &VertexSet, k: usize) -> bool {
        if k == 0 {
            return true;
        }
        if cand.len() < k {
            return false;
        }
        let mut best = Incumbent {
            len: k - 1,
            set: None,
            target: k,
        };
        self.expand(cand.clone(), &mut Vec::new(), &mut best);
        best.set.is_some()
    }
}

/// Exact independence number with the lexicographically smallest witness.
pub fn independence_number(g: &Graph, limits: &Limits) -> Result<IndependentSet> {
    let n = g.vertex_count();
    check_size(n as u128, limits.max_vertices)?;
    if n == 0 {
        return Ok(IndependentSet {
            size: 0,
            vertices: Vec::new(),
        });
    }
    let solver = Solver::new(g);
    let alpha = solver.maximum(&VertexSet::full(n));

    let mut allowed = VertexSet::full(n);
    let mut chosen = Vec::with_capacity(alpha);
    for v in 0..n {
        if chosen.len() == alpha {
            break;
        }
        let rv = solver.relabeled[v];
        if !allowed.contains(rv) {
            continue;
        }
        allowed.remove(rv);
        let rest = allowed.intersect(&solver.non_adj[rv]);
        if solver.exists(&rest, alpha - chosen.len() - 1) {
            chosen.push(v);
            allowed = rest;
        }
    }
    debug_assert!(is_independent(g, &chosen));
    Ok(IndependentSet {
        size: alpha,
        vertices: chosen,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{strong_power, GraphError};

    /// Every subset, largest first, lexicographic within a size.
    fn brute_force_alpha(g: &Graph) -> (usize, Vec<usize>) {
        let n = g.vertex_count();
        assert!(n <= 20);
        let mut best: Option<Vec<usize>> = None;
        for mask in 0u32..(1 << n) {
            let set: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            if !is_independent(g, &set) {
                continue;
            }
            best = match best {
                Some(b) if b.len() > set.len() || (b.len() == set.len() && b <= set) => Some(b),
                _ => Some(set),
            };
        }
        let b = best.unwrap_or_default();
        (b.len(), b)
    }

    #[test]
    fn complete_and_edgeless() {
        for m in 1..6 {
            let r = independence_number(&Graph::complete(m), &Limits::default()).unwrap();
            assert_eq!(r.size, 1);
            assert_eq!(r.vertices, vec![0]);
            let r = independence_number(&Graph::edgeless(m), &Limits::default()).unwrap();
            assert_eq!(r.size, m);
        }
        let r = independence_number(&Graph::edgeless(0), &Limits::default()).unwrap();
        assert_eq!(r.size, 0);
    }

    #[test]
    fn pentagon_and_its_square() {
        let c5 = Graph::cycle(5);
        let r = independence_number(&c5, &Limits::default()).unwrap();
        assert_eq!(r.size, 2);
        assert_eq!(r.vertices, vec![0, 2]);
        assert_eq!(brute_force_alpha(&c5), (2, vec![0, 2]));

        let sq = strong_power(&c5, 2, &Limits::default()).unwrap();
        let r = independence_number(&sq, &Limits::default()).unwrap();
        assert_eq!(r.size, 5);
        assert!(is_independent(&sq, &r.vertices));
    }

    #[test]
    fn matches_brute_force_on_random_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..300 {
            let n = rng.random_range(1..=12);
            let p: f64 = rng.random_range(0.1..0.9);
            let mut g = Graph::edgeless(n);
            for a in 0..n {
                for b in a + 1..n {
                    if rng.random_bool(p) {
                        g.add_edge(a, b).unwrap();
                    }
                }
            }
            let r = independence_number(&g, &Limits::default()).unwrap();
            let (size, witness) = brute_force_alpha(&g);
            assert_eq!(r.size, size);
            assert_eq!(r.vertices, witness);
        }
    }

    #[test]
    fn size_limit() {
        let g = Graph::edgeless(65);
        assert!(matches!(
            independence_number(&g, &Limits::default()),
            Err(GraphError::SizeLimit { vertices: 65, .. })
        ));
        let big = Limits {
            max_vertices: 200,
            ..Limits::default()
        };
        assert_eq!(independence_number(&g, &big).unwrap().size, 65);
    }
}
