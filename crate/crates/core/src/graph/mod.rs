//! Simple undirected graphs and the graph-capacity machinery built on them.
//!
//! Edges mean *confusable*: two inputs joined by an edge can produce a common
//! output, so zero-error codes are independent sets. Products and powers use
//! the strong product, where tuples are adjacent iff every coordinate pair is
//! equal or adjacent.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub(crate) mod bitset;
mod capacity;
mod independent;
mod theta;

pub use capacity::{capacity_bounds, CapacityBounds, RateEntry};
pub use independent::{independence_number, is_independent, IndependentSet};
pub use theta::{lovasz_theta, lovasz_theta_with, ThetaOptions, ThetaSolution};

use bitset::VertexSet;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("graph with {vertices} vertices exceeds the limit of {limit}")]
    SizeLimit { vertices: u128, limit: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for a graph with {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("theta SDP did not converge after {iterations} iterations (gap {gap:e}, bracket [{lower}, {upper}])")]
    NotConverged {
        iterations: usize,
        gap: f64,
        lower: f64,
        upper: f64,
    },
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("graph power must be at least 1")]
    ZeroPower,
}

pub type Result<T, E = GraphError> = std::result::Result<T, E>;

/// Size caps for the exact and SDP computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Largest graph handled by exact independence number and strong powers.
    pub max_vertices: usize,
    /// Largest graph handed to the theta SDP.
    pub max_sdp_vertices: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_vertices: 64,
            max_sdp_vertices: 100,
        }
    }
}

/// Undirected simple graph on vertices `0..n`.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<VertexSet>,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph")
            .field("vertex_count", &self.n)
            .field("edges", &self.edges())
            .finish()
    }
}

impl Graph {
    /// Graph with `n` vertices and no edges.
    pub fn edgeless(n: usize) -> Self {
        Self {
            n,
            adj: vec![VertexSet::empty(n); n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::edgeless(n);
        for a in 0..n {
            for b in a + 1..n {
                g.connect(a, b);
            }
        }
        g
    }

    /// Cycle `0 - 1 - ... - (n-1) - 0`; `cycle(5)` is the pentagon.
    pub fn cycle(n: usize) -> Self {
        let mut g = Self::edgeless(n);
        if n >= 3 {
            for a in 0..n {
                g.connect(a, (a + 1) % n);
            }
        } else if n == 2 {
            g.connect(0, 1);
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::edgeless(n);
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<()> {
        for v in [a, b] {
            if v >= self.n {
                return Err(GraphError::VertexOutOfRange {
                    vertex: v,
                    count: self.n,
                });
            }
        }
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        self.connect(a, b);
        Ok(())
    }

    fn connect(&mut self, a: usize, b: usize) {
        self.adj[a].insert(b);
        self.adj[b].insert(a);
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(b)
    }

    /// Edges as `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|a| self.adj[a].iter().filter(move |&b| b > a).map(move |b| (a, b)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(VertexSet::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.adj[v].iter().collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn is_complete(&self) -> bool {
        self.edge_count() == self.n * self.n.saturating_sub(1) / 2
    }

    /// Unordered non-adjacent pairs: `C(n, 2) - |E|`.
    pub fn non_edge_count(&self) -> usize {
        self.n * self.n.saturating_sub(1) / 2 - self.edge_count()
    }

    pub fn complement(&self) -> Graph {
        let mut g = Self::edgeless(self.n);
        for a in 0..self.n {
            for b in a + 1..self.n {
                if !self.has_edge(a, b) {
                    g.connect(a, b);
                }
            }
        }
        g
    }

    /// Graph with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n, "permutation length");
        let mut g = Self::edgeless(self.n);
        for (a, b) in self.edges() {
            g.connect(perm[a], perm[b]);
        }
        g
    }

    pub fn adjacency_list(&self) -> Vec<Vec<usize>> {
        (0..self.n).map(|v| self.neighbors(v)).collect()
    }

    /// Graphviz rendering; `labels[v]` is appended to vertex `v` when given.
    pub fn to_dot(&self, name: &str, labels: Option<&[String]>) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph \"{}\" {{", name.replace('"', "\\\""));
        for v in 0..self.n {
            match labels.and_then(|l| l.get(v)) {
                Some(label) => {
                    let _ = writeln!(out, "  {v} [label=\"{v}\\n{}\"];", label.replace('"', "\\\""));
                }
                None => {
                    let _ = writeln!(out, "  {v};");
                }
            }
        }
        for (a, b) in self.edges() {
            let _ = writeln!(out, "  {a} -- {b};");
        }
        out.push_str("}\n");
        out
    }
}

/// JSON form of a graph: one neighbor list per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjacencyList {
    pub vertex_count: usize,
    pub adjacency: Vec<Vec<usize>>,
}

impl From<&Graph> for AdjacencyList {
    fn from(g: &Graph) -> Self {
        Self {
            vertex_count: g.vertex_count(),
            adjacency: g.adjacency_list(),
        }
    }
}

impl TryFrom<&AdjacencyList> for Graph {
    type Error = GraphError;

    /// Neighbor lists are read as undirected: listing an edge on one side suffices.
    fn try_from(list: &AdjacencyList) -> Result<Self> {
        if list.adjacency.len() > list.vertex_count {
            return Err(GraphError::VertexOutOfRange {
                vertex: list.adjacency.len() - 1,
                count: list.vertex_count,
            });
        }
        let mut g = Graph::edgeless(list.vertex_count);
        for (a, nbrs) in list.adjacency.iter().enumerate() {
            for &b in nbrs {
                g.add_edge(a, b)?;
            }
        }
        Ok(g)
    }
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AdjacencyList::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let list = AdjacencyList::deserialize(d)?;
        Graph::try_from(&list).map_err(serde::de::Error::custom)
    }
}

fn check_size(vertices: u128, limit: usize) -> Result<()> {
    if vertices > limit as u128 {
        Err(GraphError::SizeLimit { vertices, limit })
    } else {
        Ok(())
    }
}

/// Strong product `g ⊠ h`; vertex `(u, v)` has index `u * |h| + v`.
pub fn strong_product(g: &Graph, h: &Graph, limits: &Limits) -> Result<Graph> {
    let (ng, nh) = (g.vertex_count(), h.vertex_count());
    check_size(ng as u128 * nh as u128, limits.max_vertices)?;
    let closed = |graph: &Graph, v: usize| {
        let mut c = graph.neighbors(v);
        c.push(v);
        c
    };
    let mut out = Graph::edgeless(ng * nh);
    for u1 in 0..ng {
        let cu = closed(g, u1);
        for v1 in 0..nh {
            let cv = closed(h, v1);
            let a = u1 * nh + v1;
            for &u2 in &cu {
                for &v2 in &cv {
                    let b = u2 * nh + v2;
                    if b != a {
                        out.adj[a].insert(b);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `n`-fold strong power; vertex indices enumerate tuples lexicographically.
pub fn strong_power(g: &Graph, n: usize, limits: &Limits) -> Result<Graph> {
    if n == 0 {
        return Err(GraphError::ZeroPower);
    }
    let size = (g.vertex_count() as u128)
        .checked_pow(n as u32)
        .unwrap_or(u128::MAX);
    check_size(size, limits.max_vertices)?;
    let mut acc = g.clone();
    for _ in 1..n {
        acc = strong_product(&acc, g, limits)?;
    }
    Ok(acc)
}

/// Tuple of base-graph vertices for vertex `index` of a strong power.
pub fn power_tuple(mut index: usize, base: usize, n: usize) -> Vec<usize> {
    let mut t = vec![0; n];
    for slot in t.iter_mut().rev() {
        *slot = index % base;
        index /= base;
    }
    t
}

/// Inverse of [`power_tuple`].
pub fn power_index(tuple: &[usize], base: usize) -> usize {
    tuple.iter().fold(0, |acc, &x| acc * base + x)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Strong-product adjacency straight from the definition.
    fn tuples_adjacent(g: &Graph, a: &[usize], b: &[usize]) -> bool {
        a != b && a.iter().zip(b).all(|(&x, &y)| x == y || g.has_edge(x, y))
    }

    #[test]
    fn product_with_single_vertex_is_identity() {
        let g = Graph::cycle(5);
        let p = strong_product(&Graph::edgeless(1), &g, &Limits::default()).unwrap();
        assert_eq!(p, g);
    }

    #[test]
    fn edgeless_products_stay_edgeless() {
        let e2 = Graph::edgeless(2);
        let p = strong_product(&e2, &e2, &Limits::default()).unwrap();
        assert_eq!(p, Graph::edgeless(4));
        assert_eq!(strong_power(&e2, 3, &Limits::default()).unwrap(), Graph::edgeless(8));
    }

    #[test]
    fn pentagon_square_matches_definition() {
        let c5 = Graph::cycle(5);
        let p = strong_product(&c5, &c5, &Limits::default()).unwrap();
        assert_eq!(p, strong_power(&c5, 2, &Limits::default()).unwrap());
        assert_eq!(p.vertex_count(), 25);
        for v in 0..25 {
            // closed neighborhood 3 x 3 minus the vertex itself
            assert_eq!(p.degree(v), 8);
        }
        for a in 0..25 {
            for b in 0..25 {
                let (ta, tb) = (power_tuple(a, 5, 2), power_tuple(b, 5, 2));
                assert_eq!(p.has_edge(a, b), tuples_adjacent(&c5, &ta, &tb));
            }
        }
    }

    #[test]
    fn power_one_is_identity_and_zero_rejected() {
        let g = Graph::cycle(4);
        assert_eq!(strong_power(&g, 1, &Limits::default()).unwrap(), g);
        assert_eq!(strong_power(&g, 0, &Limits::default()), Err(GraphError::ZeroPower));
    }

    #[test]
    fn size_limit_reported() {
        let c5 = Graph::cycle(5);
        assert!(matches!(
            strong_power(&c5, 3, &Limits::default()),
            Err(GraphError::SizeLimit { vertices: 125, limit: 64 })
        ));
    }

    #[test]
    fn tuple_index_roundtrip() {
        for i in 0..125 {
            assert_eq!(power_index(&power_tuple(i, 5, 3), 5), i);
        }
        assert_eq!(power_tuple(7, 5, 2), vec![1, 2]);
    }

    #[test]
    fn counts_and_complement() {
        let k3 = Graph::complete(3);
        assert!(k3.is_complete());
        assert_eq!(k3.non_edge_count(), 0);
        assert_eq!(Graph::edgeless(4).non_edge_count(), 6);
        assert_eq!(Graph::cycle(5).non_edge_count(), 5);
        assert_eq!(Graph::cycle(5).complement().edge_count(), 5);
        assert_eq!(Graph::from_edges(2, &[(0, 0)]), Err(GraphError::SelfLoop(0)));
    }

    #[test]
    fn adjacency_json_roundtrip_and_one_sided_lists() {
        let g = Graph::cycle(5);
        let json = serde_json::to_string(&g).unwrap();
        let back: Graph = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
        let one_sided: Graph =
            serde_json::from_str(r#"{"vertex_count":3,"adjacency":[[1],[2],[]]}"#).unwrap();
        assert!(one_sided.has_edge(1, 0) && one_sided.has_edge(2, 1));
        assert!(serde_json::from_str::<Graph>(r#"{"vertex_count":2,"adjacency":[[5]]}"#).is_err());
    }

    #[test]
    fn dot_export_lists_edges() {
        let dot = Graph::cycle(3).to_dot("tri", None);
        assert!(dot.starts_with("graph \"tri\" {"));
        assert!(dot.contains("0 -- 1;") && dot.contains("0 -- 2;") && dot.contains("1 -- 2;"));
    }
}
