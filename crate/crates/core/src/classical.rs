//! Embedding of classical discrete memoryless channels.
//!
//! A row-stochastic `W(j|i)` becomes the quantum channel with Kraus operators
//! `sqrt(W(j|i)) |j><i|`, fed with computational basis states and read out
//! with the computational projective measurement, so `p(j|i) = W(j|i)`.

use num_complex::Complex64;
use thiserror::Error;

use crate::adjacency::StateSet;
use crate::graph::Graph;
use crate::quantum::{ComplexMatrix, Povm, QuantumChannel};

/// Allowed deviation of a row sum from one.
pub const STOCHASTIC_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassicalError {
    #[error("classical matrix has no rows")]
    Empty,
    #[error("row {row} has {found} entries, expected {expected}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("row {row} is not a probability distribution: {reason}")]
    NotStochastic { row: usize, reason: String },
}

/// Channel, input states and measurement realizing a classical channel.
#[derive(Debug, Clone)]
pub struct ClassicalEmbedding {
    pub channel: QuantumChannel,
    pub states: StateSet,
    pub povm: Povm,
}

pub fn check_stochastic(w: &[Vec<f64>]) -> Result<(usize, usize), ClassicalError> {
    let inputs = w.len();
    if inputs == 0 {
        return Err(ClassicalError::Empty);
    }
    let outputs = w[0].len();
    for (row, r) in w.iter().enumerate() {
        if r.len() != outputs {
            return Err(ClassicalError::Ragged {
                row,
                expected: outputs,
                found: r.len(),
            });
        }
        if let Some(bad) = r.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(ClassicalError::NotStochastic {
                row,
                reason: format!("entry {bad} is not a non-negative number"),
            });
        }
        let total: f64 = r.iter().sum();
        if (total - 1.0).abs() > STOCHASTIC_TOLERANCE {
            return Err(ClassicalError::NotStochastic {
                row,
                reason: format!("entries sum to {total}"),
            });
        }
    }
    Ok((inputs, outputs))
}

/// Embedding dimension `max(inputs, outputs)`.
pub fn embedding_dim(w: &[Vec<f64>]) -> Result<usize, ClassicalError> {
    let (inputs, outputs) = check_stochastic(w)?;
    Ok(inputs.max(outputs))
}

pub fn embed_classical(w: &[Vec<f64>]) -> Result<ClassicalEmbedding, ClassicalError> {
    let (inputs, _) = check_stochastic(w)?;
    let d = embedding_dim(w)?;
    let mut kraus = Vec::new();
    for (i, row) in w.iter().enumerate() {
        for (j, &wji) in row.iter().enumerate() {
            if wji > 0.0 {
                let mut k = ComplexMatrix::zeros(d, d);
                k[(j, i)] = Complex64::new(wji.sqrt(), 0.0);
                kraus.push(k);
            }
        }
    }
    // Padded inputs (only when there are more outputs than inputs) pass through.
    for i in inputs..d {
        let mut k = ComplexMatrix::zeros(d, d);
        k[(i, i)] = Complex64::new(1.0, 0.0);
        kraus.push(k);
    }
    Ok(ClassicalEmbedding {
        channel: QuantumChannel::from_kraus_unchecked(kraus),
        states: StateSet::computational(d, inputs).expect("inputs <= d"),
        povm: Povm::computational(d),
    })
}

/// Row-stochastic matrix whose confusability graph is `g`.
///
/// Outputs are one private symbol per vertex followed by one shared symbol
/// per edge; each input spreads uniformly over its private symbol and the
/// symbols of its incident edges.
pub fn channel_for_graph(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.vertex_count();
    let edges = g.edges();
    let outputs = n + edges.len();
    (0..n)
        .map(|v| {
            let mut row = vec![0.0; outputs];
            row[v] = 1.0;
            for (e, &(a, b)) in edges.iter().enumerate() {
                if a == v || b == v {
                    row[n + e] = 1.0;
                }
            }
            let k = row.iter().filter(|&&x| x > 0.0).count() as f64;
            row.iter_mut().for_each(|x| *x /= k);
            row
        })
        .collect()
}

/// The pentagon channel: input `i` yields `i` or `i + 1 mod 5` with probability 1/2.
pub fn pentagon_matrix() -> Vec<Vec<f64>> {
    (0..5)
        .map(|i| {
            (0..5)
                .map(|j| if j == i || j == (i + 1) % 5 { 0.5 } else { 0.0 })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adjacency::{confusability_graph, probability_table};
    use crate::quantum::Tolerances;

    fn assert_exact(w: &[Vec<f64>]) {
        let tol = Tolerances::default();
        let emb = embed_classical(w).unwrap();
        assert!(QuantumChannel::new(emb.channel.kraus().to_vec(), &tol).is_ok());
        let table = probability_table(&emb.channel, &emb.states, &emb.povm, &tol).unwrap();
        for (i, row) in w.iter().enumerate() {
            for (j, &wji) in row.iter().enumerate() {
                assert!((table[i].as_slice()[j] - wji).abs() <= 1e-12);
            }
            for j in row.len()..emb.povm.len() {
                assert_eq!(table[i].as_slice()[j], 0.0);
            }
        }
    }

    #[test]
    fn noiseless_bit_is_edgeless() {
        let w = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_exact(&w);
        let emb = embed_classical(&w).unwrap();
        let g = confusability_graph(&emb.channel, &emb.states, &emb.povm, 1e-9, &Tolerances::default())
            .unwrap();
        assert_eq!(g.graph, Graph::edgeless(2));
    }

    #[test]
    fn useless_bit_is_complete() {
        let w = vec![vec![0.5, 0.5], vec![0.5, 0.5]];
        assert_exact(&w);
        let emb = embed_classical(&w).unwrap();
        let g = confusability_graph(&emb.channel, &emb.states, &emb.povm, 1e-9, &Tolerances::default())
            .unwrap();
        assert_eq!(g.graph, Graph::complete(2));
    }

    #[test]
    fn pentagon_probabilities_exact() {
        assert_exact(&pentagon_matrix());
    }

    #[test]
    fn rectangular_matrices_are_padded() {
        // more outputs than inputs
        assert_exact(&[vec![0.25, 0.25, 0.5], vec![0.0, 1.0, 0.0]]);
        // more inputs than outputs
        assert_exact(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.5]]);
        assert_eq!(embedding_dim(&[vec![1.0, 0.0, 0.0]]).unwrap(), 3);
    }

    #[test]
    fn rejects_bad_matrices() {
        assert_eq!(check_stochastic(&[]), Err(ClassicalError::Empty));
        assert!(matches!(
            check_stochastic(&[vec![0.5, 0.4]]),
            Err(ClassicalError::NotStochastic { row: 0, .. })
        ));
        assert!(matches!(
            check_stochastic(&[vec![1.5, -0.5]]),
            Err(ClassicalError::NotStochastic { row: 0, .. })
        ));
        assert!(matches!(
            check_stochastic(&[vec![1.0], vec![0.5, 0.5]]),
            Err(ClassicalError::Ragged { row: 1, .. })
        ));
    }

    #[test]
    fn graph_channels_realize_their_graph() {
        let graphs = [
            Graph::cycle(5),
            Graph::complete(4),
            Graph::edgeless(3),
            Graph::from_edges(4, &[(0, 1), (1, 2)]).unwrap(),
        ];
        for g in graphs {
            let w = channel_for_graph(&g);
            assert_exact(&w);
            let emb = embed_classical(&w).unwrap();
            let cg = confusability_graph(&emb.channel, &emb.states, &emb.povm, 1e-9, &Tolerances::default())
                .unwrap();
            assert_eq!(cg.graph, g);
        }
    }
}
