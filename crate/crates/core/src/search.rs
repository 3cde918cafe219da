//! Heuristic search for the state set and measurement that maximize the
//! number of non-adjacent state pairs.
//!
//! The search space is `M` pure states plus either a rank-one projective
//! measurement (a `d x d` unitary) or a general POVM (an `(N d) x d`
//! isometry whose `d x d` blocks `V_j` give `E_j = V_j^dagger V_j`).
//! Proposals rotate one component by a random near-identity unitary, or
//! project it onto the kernel of the outcomes (or states) it should avoid.
//!
//! Candidates are ranked by the discrete objective first (non-adjacent pair
//! count, optionally refined by the independence number). Because exact
//! disjointness is a measure-zero event, the ranking is completed by a
//! continuous leak score: for every pair, `sum_j min(p(j|a), p(j|b))` on a log
//! scale relative to the support threshold. Annealing runs on the combined
//! score with geometric cooling and per-component step sizes that grow on
//! improvement and shrink otherwise.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adjacency::{confusability_graph, AdjacencyError, ConfusabilityGraph, StateSet, DEFAULT_EPS_SUPPORT};
use crate::graph::{independence_number, Limits};
use crate::quantum::random::{self, near_identity_unitary, random_isometry, rng_from_seed};
use crate::quantum::{ComplexMatrix, ComplexVector, DensityMatrix, Povm, QuantumChannel, Tolerances};

/// Fraction of worsening moves accepted at the initial temperature.
const INITIAL_ACCEPTANCE: f64 = 0.6;
const COOLING: f64 = 0.995;
const CALIBRATION_PROBES: usize = 16;
const TRACE_POINTS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    PairCount,
    PairCountThenAlpha,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum MeasurementFamily {
    /// Rank-one projective measurement with `N = d` outcomes.
    Projective,
    /// General POVM with the given number of outcomes.
    General { outcomes: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Number of input states `M`.
    pub states: usize,
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
    /// Initial proposal magnitude.
    pub step: f64,
    pub eps_support: f64,
    pub objective: Objective,
    pub measurement: MeasurementFamily,
    pub allow_overcomplete: bool,
    /// Start restart 0 from computational basis states and measurement.
    pub basis_start: bool,
}

impl SearchConfig {
    pub fn new(states: usize) -> Self {
        Self {
            states,
            restarts: 32,
            iterations: 2000,
            seed: 7,
            step: 0.3,
            eps_support: DEFAULT_EPS_SUPPORT,
            objective: Objective::PairCountThenAlpha,
            measurement: MeasurementFamily::Projective,
            allow_overcomplete: false,
            basis_start: true,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<(), SearchError> {
        let bad = |msg: String| Err(SearchError::InvalidConfig(msg));
        if self.states < 2 {
            return bad(format!("need at least 2 states, got {}", self.states));
        }
        if self.states > dim && !self.allow_overcomplete {
            return bad(format!("{} states exceed dimension {dim}", self.states));
        }
        if self.restarts == 0 {
            return bad("restarts must be at least 1".into());
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return bad(format!("step must be positive, got {}", self.step));
        }
        if !(self.eps_support >= 0.0 && self.eps_support.is_finite()) {
            return bad(format!("invalid support threshold {}", self.eps_support));
        }
        if let MeasurementFamily::General { outcomes } = self.measurement {
            if outcomes < self.states || outcomes > dim * dim {
                return bad(format!(
                    "general POVM needs between {} and {} outcomes, got {outcomes}",
                    self.states,
                    dim * dim
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Adjacency(#[from] AdjacencyError),
}

/// Ranking of a candidate; compares lexicographically as declared.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub pair_count: usize,
    pub alpha: usize,
    /// In `[0, 1)`: mean over pairs of how far the pair's shared
    /// probability mass is below one, on a log scale down to `eps`.
    pub separation: f64,
    /// Scalar used for annealing; order-consistent with the objective.
    pub value: f64,
}

/// Best-so-far trajectory of one restart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartTrace {
    pub restart: usize,
    pub seed: u64,
    pub initial: f64,
    pub best: f64,
    pub best_pair_count: usize,
    pub iterations_run: usize,
    /// Best value sampled at evenly spaced iterations; non-decreasing.
    pub trace: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub states: StateSet,
    pub povm: Povm,
    pub graph: ConfusabilityGraph,
    pub pair_count: usize,
    pub alpha_1: usize,
    pub score: Score,
    pub best_restart: usize,
    pub history: Vec<RestartTrace>,
}

/// `m` Haar-random pure states in dimension `d`.
pub fn random_pure_state_set(d: usize, m: usize, seed: u64) -> Result<StateSet, AdjacencyError> {
    let mut rng = rng_from_seed(seed);
    StateSet::new(
        (0..m).map(|_| random::random_pure_state(d, &mut rng)).collect(),
        false,
    )
}

/// Rank-one projective measurement from a seeded Haar unitary.
pub fn random_projective_povm(d: usize, seed: u64) -> Povm {
    random::random_projective_povm(d, &mut rng_from_seed(seed))
}

#[derive(Debug, Clone)]
struct Candidate {
    vectors: Vec<ComplexVector>,
    /// Unitary (projective) or isometry (general).
    measurement: ComplexMatrix,
    dim: usize,
    general: bool,
}

impl Candidate {
    fn random<R: Rng>(dim: usize, cfg: &SearchConfig, rng: &mut R) -> Self {
        let vectors = (0..cfg.states)
            .map(|_| random::random_unit_vector(dim, rng))
            .collect();
        let (measurement, general) = match cfg.measurement {
            MeasurementFamily::Projective => (random::haar_unitary(dim, rng), false),
            MeasurementFamily::General { outcomes } => (random_isometry(outcomes * dim, dim, rng), true),
        };
        Self {
            vectors,
            measurement,
            dim,
            general,
        }
    }

    fn basis(dim: usize, cfg: &SearchConfig) -> Self {
        let vectors = (0..cfg.states)
            .map(|i| crate::quantum::basis_vector(dim, i % dim))
            .collect();
        let (measurement, general) = match cfg.measurement {
            MeasurementFamily::Projective => (ComplexMatrix::identity(dim, dim), false),
            MeasurementFamily::General { outcomes } => {
                // Outcome j < d is the projector onto |j>; the rest are zero.
                let mut v = ComplexMatrix::zeros(outcomes * dim, dim);
                for j in 0..dim {
                    v[(j * dim, j)] = num_complex::Complex64::new(1.0, 0.0);
                }
                (v, true)
            }
        };
        Self {
            vectors,
            measurement,
            dim,
            general,
        }
    }

    fn state_set(&self, allow_overcomplete: bool) -> StateSet {
        StateSet::new(self.vectors.iter().map(DensityMatrix::pure).collect(), allow_overcomplete)
            .expect("validated state count")
    }

    fn povm(&self) -> Povm {
        if self.general {
            let d = self.dim;
            let n = self.measurement.nrows() / d;
            let elements = (0..n)
                .map(|j| {
                    let block = self.measurement.rows(j * d, d);
                    block.adjoint() * block
                })
                .collect();
            Povm::from_elements_unchecked(elements)
        } else {
            Povm::from_unitary_columns(&self.measurement)
        }
    }

    /// Components that proposals act on: each state, then the measurement.
    fn slots(&self) -> usize {
        self.vectors.len() + 1
    }

    /// Rotates one component, either by a full near-identity unitary or
    /// within a single coordinate plane (of the measurement frame for
    /// states, of the output index for the measurement). Planar moves leave
    /// every other outcome untouched, so separated pairs stay separated.
    fn rotate<R: Rng>(&self, slot: usize, step: f64, planar: bool, rng: &mut R) -> Self {
        let mut next = self.clone();
        if slot < self.vectors.len() {
            let v = if planar {
                let frame = if self.general {
                    ComplexMatrix::identity(self.dim, self.dim)
                } else {
                    self.measurement.clone()
                };
                let g = plane_rotation(self.dim, step, rng);
                &frame * (g * (frame.adjoint() * &self.vectors[slot]))
            } else {
                near_identity_unitary(self.dim, step, rng) * &self.vectors[slot]
            };
            next.vectors[slot] = normalized(v);
        } else {
            let rows = self.measurement.nrows();
            let w = if planar {
                plane_rotation(rows, step, rng)
            } else {
                near_identity_unitary(rows, step, rng)
            };
            next.measurement = if self.general {
                w * &self.measurement
            } else {
                // Mixes two columns, i.e. two outcome projectors.
                &self.measurement * w
            };
        }
        next
    }

    /// Projects a state onto the kernel of the outcomes it should avoid:
    /// either its own outcomes below `cutoff`, or (`claimed`) every outcome
    /// another state reaches with probability at least `cutoff`. For a
    /// projective outcome, projects its vector away from the outputs of the
    /// states that reach it with probability below `cutoff`. Returns `None`
    /// when there is nothing to avoid.
    fn snap<R: Rng>(
        &self,
        slot: usize,
        cutoff: f64,
        claimed: bool,
        channel: &QuantumChannel,
        probs: &[Vec<f64>],
        rng: &mut R,
    ) -> Option<Self> {
        let mut next = self.clone();
        if slot < self.vectors.len() {
            let povm = self.povm();
            let mut avoid = ComplexMatrix::zeros(self.dim, self.dim);
            let mut any = false;
            for (j, e) in povm.elements().iter().enumerate() {
                let avoided = if claimed {
                    probs.iter().enumerate().any(|(b, row)| b != slot && row[j] >= cutoff)
                } else {
                    probs[slot][j] < cutoff
                };
                if avoided {
                    // Heisenberg picture: p(j|psi) = <psi| sum_k K^dag E_j K |psi>.
                    for k in channel.kraus() {
                        avoid += k.adjoint() * e * k;
                    }
                    any = true;
                }
            }
            if !any {
                return None;
            }
            next.vectors[slot] = project_to_kernel(&avoid, &self.vectors[slot])?;
        } else if !self.general {
            let j = rng.random_range(0..self.dim);
            let mut avoid = ComplexMatrix::zeros(self.dim, self.dim);
            let mut any = false;
            for (b, v) in self.vectors.iter().enumerate() {
                if probs[b][j] < cutoff {
                    let out = channel.apply(&DensityMatrix::pure(v)).ok()?;
                    avoid += out.matrix();
                    any = true;
                }
            }
            if !any {
                return None;
            }
            let column = project_to_kernel(&avoid, &self.measurement.column(j).into_owned())?;
            next.measurement = orthonormalize_with(&self.measurement, j, column);
        } else {
            let n = self.measurement.nrows() / self.dim;
            let j = rng.random_range(0..n);
            let mut avoid = ComplexMatrix::zeros(self.dim, self.dim);
            for (b, v) in self.vectors.iter().enumerate() {
                if probs[b][j] < cutoff {
                    avoid += channel.apply(&DensityMatrix::pure(v)).ok()?.matrix();
                }
            }
            next.measurement = clear_block(&self.measurement, self.dim, j, &range_basis(&avoid))?;
        }
        Some(next)
    }
}

fn normalized(v: ComplexVector) -> ComplexVector {
    let n = v.norm();
    v.unscale(n)
}

/// Projection of `v` onto the (numerical) kernel of the PSD matrix `m`, or
/// onto its lowest eigenvector when `v` has no weight there.
fn project_to_kernel(m: &ComplexMatrix, v: &ComplexVector) -> Option<ComplexVector> {
    let eig = ((m + m.adjoint()).scale(0.5)).symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(1.0f64, |a, &l| a.max(l.abs()));
    let mut out = ComplexVector::zeros(v.len());
    let mut lowest = 0;
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l < eig.eigenvalues[lowest] {
            lowest = i;
        }
        if l <= 1e-12 * scale {
            let u = eig.eigenvectors.column(i);
            out += u * u.dotc(v);
        }
    }
    if out.norm() < 1e-6 {
        out = eig.eigenvectors.column(lowest).into_owned();
    }
    let n = out.norm();
    (n.is_finite() && n > 0.0).then(|| out.unscale(n))
}

/// Orthonormal eigenvectors of the PSD matrix `m` with non-negligible eigenvalue.
fn range_basis(m: &ComplexMatrix) -> Vec<ComplexVector> {
    let eig = ((m + m.adjoint()).scale(0.5)).symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(0.0f64, |a, &l| a.max(l.abs()));
    eig.eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| scale > 0.0 && l > 1e-12 * scale)
        .map(|(i, _)| eig.eigenvectors.column(i).into_owned())
        .collect()
}

/// Rotates the isometry `v` so that POVM element `block` annihilates every
/// vector of `span`. Each image `v x` is reflected out of the rows of
/// `block`, one at a time; later reflections fix the earlier targets.
fn clear_block(v: &ComplexMatrix, d: usize, block: usize, span: &[ComplexVector]) -> Option<ComplexMatrix> {
    if span.is_empty() {
        return None;
    }
    let rows = v.nrows();
    let mut out = v.clone();
    let mut targets: Vec<ComplexVector> = Vec::new();
    for x in span {
        // Already orthogonal to the earlier targets, which are images of
        // orthonormal span vectors under the same isometry.
        let mut y = &out * x;
        for q in &targets {
            y -= q * q.dotc(&y);
        }
        let ny = y.norm();
        if ny < 1e-10 {
            continue;
        }
        y.unscale_mut(ny);

        let mut z = y.clone();
        for r in block * d..(block + 1) * d {
            z[r] = num_complex::Complex64::new(0.0, 0.0);
        }
        for q in &targets {
            z -= q * q.dotc(&z);
        }
        let nz = z.norm();
        if nz < 1e-10 || rows <= d {
            return None;
        }
        z.unscale_mut(nz);
        let overlap = z.dotc(&y);
        let w = if overlap.norm() > 0.0 {
            &z * (overlap / overlap.norm())
        } else {
            z.clone()
        };
        let u = &y - &w;
        let nu = u.norm();
        if nu > 1e-14 {
            let u = u.unscale(nu);
            // Householder reflection I - 2 u u^dagger maps y to w.
            let uh = u.adjoint() * &out;
            out -= (&u * uh).scale(2.0);
        }
        targets.push(w);
    }
    Some(out)
}

/// Unitary whose column `j` is `column`; the other columns are the old ones
/// made orthogonal to it, in their original order.
fn orthonormalize_with(u: &ComplexMatrix, j: usize, column: ComplexVector) -> ComplexMatrix {
    let d = u.nrows();
    let mut cols: Vec<ComplexVector> = vec![column];
    for i in (0..d).filter(|&i| i != j) {
        let mut c = u.column(i).into_owned();
        for q in &cols {
            c -= q * q.dotc(&c);
        }
        // Re-orthogonalize once for stability.
        for q in &cols {
            c -= q * q.dotc(&c);
        }
        let n = c.norm();
        if n < 1e-8 {
            return u.clone();
        }
        cols.push(c.unscale(n));
    }
    let mut out = ComplexMatrix::zeros(d, d);
    out.set_column(j, &cols[0]);
    for (k, i) in (0..d).filter(|&i| i != j).enumerate() {
        out.set_column(i, &cols[k + 1]);
    }
    out
}

/// Near-identity unitary acting on a random pair of coordinates only.
fn plane_rotation<R: Rng>(d: usize, step: f64, rng: &mut R) -> ComplexMatrix {
    let mut w = ComplexMatrix::identity(d, d);
    if d < 2 {
        return w;
    }
    let a = rng.random_range(0..d);
    let b = (a + rng.random_range(1..d)) % d;
    let g = near_identity_unitary(2, step, rng);
    for (i, x) in [a, b].into_iter().enumerate() {
        for (j, y) in [a, b].into_iter().enumerate() {
            w[(x, y)] = g[(i, j)];
        }
    }
    w
}

struct Evaluator<'a> {
    channel: &'a QuantumChannel,
    cfg: &'a SearchConfig,
    tol: Tolerances,
    limits: Limits,
}

impl Evaluator<'_> {
    fn evaluate(&self, c: &Candidate) -> Result<(Score, ConfusabilityGraph), AdjacencyError> {
        let states = c.state_set(self.cfg.allow_overcomplete);
        let povm = c.povm();
        let g = confusability_graph(self.channel, &states, &povm, self.cfg.eps_support, &self.tol)?;
        Ok((self.score(&g), g))
    }

    fn score(&self, g: &ConfusabilityGraph) -> Score {
        let m = g.vertex_count();
        let pair_count = g.non_adjacent_pair_count();
        let alpha = independence_number(&g.graph, &self.limits)
            .map(|s| s.size)
            .unwrap_or(1);
        let floor = self.cfg.eps_support.max(1e-15);
        let scale = (1.0 / floor).ln();
        let mut total = 0.0;
        let mut pairs = 0usize;
        for a in 0..m {
            for b in a + 1..m {
                let leak: f64 = g.probabilities[a]
                    .iter()
                    .zip(&g.probabilities[b])
                    .map(|(x, y)| x.min(*y))
                    .sum();
                total += ((1.0 / leak.max(floor)).ln() / scale).clamp(0.0, 1.0);
                pairs += 1;
            }
        }
        let separation = 0.999 * total / pairs.max(1) as f64;
        let value = match self.cfg.objective {
            Objective::PairCount => pair_count as f64 + separation,
            Objective::PairCountThenAlpha => {
                pair_count as f64 + ((alpha.max(1) - 1) as f64 + separation) / m as f64
            }
        };
        Score {
            pair_count,
            alpha,
            separation,
            value,
        }
    }

    fn is_optimal(&self, s: &Score) -> bool {
        let m = self.cfg.states;
        s.pair_count == m * (m - 1) / 2
    }
}

struct RestartOutcome {
    candidate: Candidate,
    score: Score,
    graph: ConfusabilityGraph,
    trace: RestartTrace,
}

fn run_restart(ev: &Evaluator<'_>, restart: usize) -> Result<RestartOutcome, AdjacencyError> {
    let cfg = ev.cfg;
    let dim = ev.channel.dim();
    let seed = cfg.seed.wrapping_add(restart as u64);
    let mut rng = rng_from_seed(seed);
    let mut current = if restart == 0 && cfg.basis_start {
        Candidate::basis(dim, cfg)
    } else {
        Candidate::random(dim, cfg, &mut rng)
    };
    let (mut current_score, mut current_graph) = ev.evaluate(&current)?;
    let initial = current_score.value;

    let mut best = (current.clone(), current_score, current_graph.clone());

    // Temperature from the mean size of worsening probe moves.
    let mut worse = Vec::new();
    for _ in 0..CALIBRATION_PROBES.min(cfg.iterations) {
        let slot = rng.random_range(0..current.slots());
        if let Ok((s, _)) = ev.evaluate(&current.rotate(slot, cfg.step, false, &mut rng)) {
            if s.value < current_score.value {
                worse.push(current_score.value - s.value);
            }
        }
    }
    let mean_worse = if worse.is_empty() {
        1e-3
    } else {
        worse.iter().sum::<f64>() / worse.len() as f64
    };
    let t0 = mean_worse / (1.0 / INITIAL_ACCEPTANCE).ln();

    let stride = (cfg.iterations / TRACE_POINTS).max(1);
    let mut trace = vec![best.1.value];
    // Separate step sizes per slot, so components already in place do not
    // drag down the step of those still moving.
    let mut steps = vec![cfg.step; current.slots()];
    let mut temperature = t0;
    let mut iterations_run = 0;

    for k in 0..cfg.iterations {
        if ev.is_optimal(&best.1) {
            break;
        }
        iterations_run = k + 1;
        let slot = rng.random_range(0..current.slots());
        let kind = rng.random_range(0..3);
        let proposal = match kind {
            0 => current.rotate(slot, steps[slot], false, &mut rng),
            1 => current.rotate(slot, steps[slot], true, &mut rng),
            _ => {
                // Log-uniform cutoff between eps and 1/2.
                let lo = cfg.eps_support.max(1e-15).ln();
                let cutoff = rng.random_range(lo..0.5f64.ln()).exp();
                let claimed = rng.random_bool(0.5);
                match current.snap(slot, cutoff, claimed, ev.channel, &current_graph.probabilities, &mut rng) {
                    Some(c) => c,
                    None => current.rotate(slot, steps[slot], true, &mut rng),
                }
            }
        };
        let u: f64 = rng.random();
        if let Ok((score, graph)) = ev.evaluate(&proposal) {
            let delta = score.value - current_score.value;
            if kind < 2 {
                if delta > 0.0 {
                    steps[slot] = (steps[slot] * 1.5).min(std::f64::consts::PI);
                } else {
                    steps[slot] = (steps[slot] / 1.5f64.powf(0.25)).max(1e-9);
                }
            }
            if delta >= 0.0 || u < (delta / temperature).exp() {
                current = proposal;
                current_score = score;
                current_graph = graph;
                if current_score.value > best.1.value {
                    best = (current.clone(), current_score, current_graph.clone());
                }
            }
        }
        temperature *= COOLING;
        if (k + 1) % stride == 0 {
            trace.push(best.1.value);
        }
    }
    if trace.last() != Some(&best.1.value) {
        trace.push(best.1.value);
    }

    Ok(RestartOutcome {
        trace: RestartTrace {
            restart,
            seed,
            initial,
            best: best.1.value,
            best_pair_count: best.1.pair_count,
            iterations_run,
            trace,
        },
        candidate: best.0,
        score: best.1,
        graph: best.2,
    })
}

/// Searches `(S, P)` for `ch`; restarts use seeds `seed + restart` and run in
/// parallel, and the winner is the best score with ties going to the lowest
/// restart index.
pub fn optimize_pair(ch: &QuantumChannel, cfg: &SearchConfig) -> Result<SearchResult, SearchError> {
    cfg.validate(ch.dim())?;
    let ev = Evaluator {
        channel: ch,
        cfg,
        tol: Tolerances::default(),
        limits: Limits::default(),
    };
    let outcomes: Vec<RestartOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| run_restart(&ev, r))
        .collect::<Result<_, _>>()?;

    let mut winner = 0;
    for (i, o) in outcomes.iter().enumerate() {
        if o.score.value > outcomes[winner].score.value {
            winner = i;
        }
    }
    let history = outcomes.iter().map(|o| o.trace.clone()).collect();
    let best = outcomes.into_iter().nth(winner).expect("at least one restart");
    Ok(SearchResult {
        states: best.candidate.state_set(cfg.allow_overcomplete),
        povm: best.candidate.povm(),
        pair_count: best.score.pair_count,
        alpha_1: best.score.alpha,
        score: best.score,
        graph: best.graph,
        best_restart: winner,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{embed_classical, pentagon_matrix};
    use crate::quantum::{pauli_x, pauli_y, pauli_z};

    fn depolarizing_full() -> QuantumChannel {
        QuantumChannel::new(
            vec![
                ComplexMatrix::identity(2, 2).scale(0.5),
                pauli_x().scale(0.5),
                pauli_y().scale(0.5),
                pauli_z().scale(0.5),
            ],
            &Tolerances::default(),
        )
        .unwrap()
    }

    fn quick(m: usize) -> SearchConfig {
        SearchConfig {
            restarts: 4,
            iterations: 400,
            ..SearchConfig::new(m)
        }
    }

    #[test]
    fn random_generators_are_seeded() {
        let a = random_pure_state_set(2, 2, 5).unwrap();
        assert_eq!(a, random_pure_state_set(2, 2, 5).unwrap());
        for s in a.states() {
            assert!((s.matrix().trace().re - 1.0).abs() < 1e-12);
            // rank one: tr(rho^2) = 1
            assert!(((s.matrix() * s.matrix()).trace().re - 1.0).abs() < 1e-12);
        }
        let one = random_pure_state_set(1, 1, 0).unwrap();
        assert!((one.get(0).matrix()[(0, 0)].re - 1.0).abs() < 1e-15);

        let p = random_projective_povm(4, 3);
        assert_eq!(p, random_projective_povm(4, 3));
        assert!(p.completeness_deviation() < 1e-12);
        assert!(random_pure_state_set(2, 3, 0).is_err());
    }

    #[test]
    fn identity_qubit_reaches_one_pair_from_random_starts() {
        let cfg = SearchConfig {
            basis_start: false,
            ..quick(2)
        };
        let r = optimize_pair(&QuantumChannel::identity(2), &cfg).unwrap();
        assert_eq!(r.pair_count, 1);
        assert_eq!(r.graph.graph.edge_count(), 0);
        assert_eq!(r.alpha_1, 2);
    }

    #[test]
    fn depolarized_qubit_never_separates() {
        let r = optimize_pair(&depolarizing_full(), &quick(2)).unwrap();
        assert_eq!(r.pair_count, 0);
        assert_eq!(r.alpha_1, 1);
    }

    /// Largest non-adjacent pair count for `m` states of the pentagon
    /// channel. No three states can be pairwise disjoint (that would be an
    /// independent 3-set of the pentagon), so the disjointness graph is
    /// triangle-free and Turan's bound `floor(m^2 / 4)` applies; repeating
    /// inputs 0 and 2 attains it.
    fn pentagon_pair_optimum(m: usize) -> usize {
        m * m / 4
    }

    #[test]
    fn pentagon_search_reaches_the_triangle_free_bound() {
        let emb = embed_classical(&pentagon_matrix()).unwrap();
        for m in [2, 3, 5] {
            let cfg = SearchConfig {
                objective: Objective::PairCount,
                basis_start: false,
                iterations: 2000,
                ..quick(m)
            };
            let r = optimize_pair(&emb.channel, &cfg).unwrap();
            assert_eq!(r.pair_count, pentagon_pair_optimum(m));
            assert_eq!(r.alpha_1, 2);
        }
    }

    #[test]
    fn pentagon_basis_start_has_five_pairs() {
        let emb = embed_classical(&pentagon_matrix()).unwrap();
        let cfg = SearchConfig {
            objective: Objective::PairCount,
            restarts: 1,
            iterations: 0,
            ..SearchConfig::new(5)
        };
        let r = optimize_pair(&emb.channel, &cfg).unwrap();
        assert_eq!(r.pair_count, 5);
        assert_eq!(r.graph.graph, crate::graph::Graph::cycle(5));
    }

    #[test]
    fn identity_optimum_found_without_basis_start() {
        for d in [3, 5] {
            let cfg = SearchConfig {
                basis_start: false,
                ..quick(d)
            };
            let r = optimize_pair(&QuantumChannel::identity(d), &cfg).unwrap();
            assert_eq!(r.pair_count, d * (d - 1) / 2);
            assert_eq!(r.alpha_1, d);
        }
    }

    #[test]
    fn result_is_reproducible_and_sound() {
        let emb = embed_classical(&pentagon_matrix()).unwrap();
        let cfg = SearchConfig {
            basis_start: false,
            restarts: 3,
            iterations: 150,
            ..SearchConfig::new(3)
        };
        let a = optimize_pair(&emb.channel, &cfg).unwrap();
        let b = optimize_pair(&emb.channel, &cfg).unwrap();
        assert_eq!(a.states, b.states);
        assert_eq!(a.povm, b.povm);
        assert_eq!(a.history, b.history);
        let again = confusability_graph(&emb.channel, &a.states, &a.povm, cfg.eps_support, &Tolerances::default())
            .unwrap();
        assert_eq!(again.non_adjacent_pair_count(), a.pair_count);
        assert_eq!(again.graph, a.graph.graph);
        for h in &a.history {
            assert!(h.trace.windows(2).all(|w| w[0] <= w[1]));
            assert!(h.best >= h.initial);
        }
    }

    #[test]
    fn general_povm_mode_runs() {
        let cfg = SearchConfig {
            measurement: MeasurementFamily::General { outcomes: 3 },
            ..quick(2)
        };
        let r = optimize_pair(&QuantumChannel::identity(2), &cfg).unwrap();
        assert_eq!(r.povm.len(), 3);
        assert!(r.povm.completeness_deviation() < 1e-9);
        assert_eq!(r.pair_count, 1);
    }

    #[test]
    fn invalid_configs_rejected() {
        let ch = QuantumChannel::identity(2);
        for cfg in [
            SearchConfig::new(1),
            SearchConfig::new(3),
            SearchConfig {
                restarts: 0,
                ..SearchConfig::new(2)
            },
            SearchConfig {
                step: 0.0,
                ..SearchConfig::new(2)
            },
            SearchConfig {
                measurement: MeasurementFamily::General { outcomes: 5 },
                ..SearchConfig::new(2)
            },
        ] {
            assert!(matches!(optimize_pair(&ch, &cfg), Err(SearchError::InvalidConfig(_))));
        }
    }
}
