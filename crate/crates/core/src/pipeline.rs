//! End-to-end analysis: validate a spec, obtain `(S, P)` (given or
//! searched), build the confusability graph, bound the capacity and
//! construct a code at the best block length.
//!
//! Reports carry no timestamps and embed the input and options, so equal
//! inputs give byte-identical JSON.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adjacency::{confusability_graph, AdjacencyError, ConfusabilityGraph, StateSet, DEFAULT_EPS_SUPPORT};
use crate::code::{build_code, build_decoder, reachable_supports, verify_zero_error, OutputWord, QuantumBlockCode, ZeroErrorReport};
use crate::graph::{capacity_bounds, AdjacencyList, CapacityBounds, Limits, ThetaOptions};
use crate::quantum::{DensityMatrix, Povm, QuantumChannel, Tolerances};
use crate::search::{optimize_pair, MeasurementFamily, RestartTrace, Score, SearchConfig, SearchError, SearchResult};
use crate::spec::{povm_to_json, states_to_json, ChannelSource, ChannelSpec, JsonMatrix, Problem, SpecError};

pub const TOOL: &str = "zecap";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default seed when neither a flag nor the environment gives one.
pub const DEFAULT_SEED: u64 = 7;

/// Support listings in code reports are omitted above this many words.
pub const SUPPORT_LISTING_LIMIT: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Adjacency(#[from] AdjacencyError),
    #[error("invalid options: {0}")]
    Options(String),
}

pub type Result<T, E = PipelineError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeOptions {
    pub eps_support: f64,
    pub n_max: usize,
    pub theta_tol: f64,
    /// Number of states to search for; defaults to the dimension.
    pub states: Option<usize>,
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
    pub general_povm: bool,
    /// Outcome count in general-POVM mode; defaults to `d^2`.
    pub outcomes: Option<usize>,
    pub allow_overcomplete: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            eps_support: DEFAULT_EPS_SUPPORT,
            n_max: 2,
            theta_tol: 1e-12,
            states: None,
            restarts: 32,
            iterations: 2000,
            seed: DEFAULT_SEED,
            general_povm: false,
            outcomes: None,
            allow_overcomplete: false,
        }
    }
}

impl AnalyzeOptions {
    /// Search configuration for a channel of dimension `dim`.
    pub fn search_config(&self, dim: usize) -> SearchConfig {
        SearchConfig {
            restarts: self.restarts,
            iterations: self.iterations,
            seed: self.seed,
            eps_support: self.eps_support,
            measurement: if self.general_povm {
                MeasurementFamily::General {
                    outcomes: self.outcomes.unwrap_or(dim * dim),
                }
            } else {
                MeasurementFamily::Projective
            },
            allow_overcomplete: self.allow_overcomplete,
            ..SearchConfig::new(self.states.unwrap_or(dim))
        }
    }
}

/// Where the analyzed `(S, P)` came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Given in the spec or fixed by a classical embedding.
    Given,
    Searched,
    /// Dimension 1: the only state and the only measurement.
    Trivial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSummary {
    pub name: String,
    pub dim: usize,
    pub kraus_count: usize,
    pub source: ChannelSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub config: SearchConfig,
    pub pair_count: usize,
    pub alpha_1: usize,
    pub score: Score,
    pub best_restart: usize,
    pub history: Vec<RestartTrace>,
}

impl From<&SearchResult> for SearchSummary {
    fn from(r: &SearchResult) -> Self {
        Self {
            config: SearchConfig::new(0),
            pair_count: r.pair_count,
            alpha_1: r.alpha_1,
            score: r.score,
            best_restart: r.best_restart,
            history: r.history.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeSummary {
    pub n: usize,
    pub messages: usize,
    pub rate: f64,
    /// Message `k` is codeword `k`.
    pub codewords: Vec<Vec<usize>>,
    pub reachable_words: usize,
    pub unreachable_words: u128,
    /// Reachable words per codeword; omitted when large.
    pub supports: Option<Vec<Vec<OutputWord>>>,
    pub verification: ZeroErrorReport,
}

/// The analyzed state set and measurement.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub states: StateSet,
    pub povm: Povm,
    pub provenance: Provenance,
    pub search: Option<SearchSummary>,
}

/// Uses the given `(S, P)`, or searches for one.
pub fn resolve_pair(problem: &Problem, opts: &AnalyzeOptions) -> Result<Resolved> {
    if let Some((s, p)) = &problem.fixed {
        return Ok(Resolved {
            states: s.clone(),
            povm: p.clone(),
            provenance: Provenance::Given,
            search: None,
        });
    }
    let dim = problem.channel.dim();
    if dim == 1 && opts.states.is_none() {
        let one = DensityMatrix::basis(1, 0);
        return Ok(Resolved {
            states: StateSet::new(vec![one], false)?,
            povm: Povm::computational(1),
            provenance: Provenance::Trivial,
            search: None,
        });
    }
    let cfg = opts.search_config(dim);
    let result = optimize_pair(&problem.channel, &cfg)?;
    let mut summary = SearchSummary::from(&result);
    summary.config = cfg;
    Ok(Resolved {
        states: result.states,
        povm: result.povm,
        provenance: Provenance::Searched,
        search: Some(summary),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub options: AnalyzeOptions,
    pub input: ChannelSpec,
    pub channel: ChannelSummary,
    pub provenance: Provenance,
    pub search: Option<SearchSummary>,
    pub states: Vec<JsonMatrix>,
    pub povm: Vec<JsonMatrix>,
    pub eps_support: f64,
    /// Row `k` is `p(.|k)`.
    pub probabilities: Vec<Vec<f64>>,
    pub supports: Vec<Vec<usize>>,
    pub fragile_entries: usize,
    /// Edges join confusable states.
    pub graph: AdjacencyList,
    pub non_adjacent_pair_count: usize,
    pub positive_zero_error_capacity: bool,
    pub capacity: Option<CapacityBounds>,
    pub code: Option<CodeSummary>,
    pub summary: String,
    /// Steps that failed without stopping the analysis.
    pub failures: Vec<String>,
}

fn check_options(opts: &AnalyzeOptions) -> Result<()> {
    if !(opts.eps_support.is_finite() && opts.eps_support >= 0.0) {
        return Err(PipelineError::Options(format!("eps must be non-negative, got {}", opts.eps_support)));
    }
    if opts.n_max == 0 {
        return Err(PipelineError::Options("n-max must be at least 1".into()));
    }
    if !(opts.theta_tol.is_finite() && opts.theta_tol > 0.0) {
        return Err(PipelineError::Options(format!("theta tolerance must be positive, got {}", opts.theta_tol)));
    }
    Ok(())
}

fn channel_summary(problem: &Problem) -> ChannelSummary {
    ChannelSummary {
        name: problem.name.clone(),
        dim: problem.channel.dim(),
        kraus_count: problem.channel.kraus().len(),
        source: problem.source,
    }
}

/// Code at block length `n` with its decoder statistics and certificate.
pub fn summarize_code(
    g: &ConfusabilityGraph,
    resolved: &Resolved,
    channel: &QuantumChannel,
    n: usize,
) -> std::result::Result<CodeSummary, String> {
    let code = build_code(g, &resolved.states, &resolved.povm, n, &Limits::default()).map_err(|e| e.to_string())?;
    code_summary(&code, channel)
}

fn code_summary(code: &QuantumBlockCode, channel: &QuantumChannel) -> std::result::Result<CodeSummary, String> {
    let verification = verify_zero_error(code, channel).map_err(|e| e.to_string())?;
    let words = reachable_supports(code, channel).map_err(|e| e.to_string())?;
    let (reachable, unreachable) = match build_decoder(code, channel) {
        Ok(t) => (t.reachable_count(), t.unreachable_count()),
        Err(e) => return Err(e.to_string()),
    };
    let total: usize = words.iter().map(Vec::len).sum();
    Ok(CodeSummary {
        n: code.n(),
        messages: code.size(),
        rate: code.rate(),
        codewords: code.codewords().to_vec(),
        reachable_words: reachable,
        unreachable_words: unreachable,
        supports: (total <= SUPPORT_LISTING_LIMIT).then_some(words),
        verification,
    })
}

/// Full analysis of a spec.
pub fn analyze(spec: &ChannelSpec, opts: &AnalyzeOptions) -> Result<Report> {
    check_options(opts)?;
    let problem = spec.validate(opts.allow_overcomplete)?;
    let resolved = resolve_pair(&problem, opts)?;
    let g = confusability_graph(
        &problem.channel,
        &resolved.states,
        &resolved.povm,
        opts.eps_support,
        &Tolerances::default(),
    )?;

    let mut failures = Vec::new();
    let theta = ThetaOptions {
        tol: opts.theta_tol,
        ..ThetaOptions::default()
    };
    let capacity = match capacity_bounds(&g.graph, opts.n_max, &theta, &Limits::default()) {
        Ok(b) => {
            failures.extend(b.per_n.iter().filter_map(|e| e.error.as_ref().map(|m| format!("alpha at n = {}: {m}", e.n))));
            failures.extend(b.theta_error.iter().map(|m| format!("theta: {m}")));
            Some(b)
        }
        Err(e) => {
            failures.push(format!("capacity bounds: {e}"));
            None
        }
    };

    let code = capacity.as_ref().and_then(|b| b.best_n).and_then(|n| {
        summarize_code(&g, &resolved, &problem.channel, n)
            .map_err(|e| failures.push(format!("code at n = {n}: {e}")))
            .ok()
    });

    let pairs = g.non_adjacent_pair_count();
    let origin = match resolved.provenance {
        Provenance::Given => "given",
        Provenance::Searched => "searched",
        Provenance::Trivial => "trivial",
    };
    let summary = match capacity.as_ref() {
        _ if pairs == 0 => format!("zero-error capacity = 0 for {origin} (S,P)"),
        Some(CapacityBounds {
            best_lower: Some(lo),
            best_n: Some(n),
            theta_upper,
            ..
        }) => match theta_upper {
            Some(up) => format!("zero-error capacity >= {lo:.6} bits/use (n = {n}), <= {up:.6} for {origin} (S,P)"),
            None => format!("zero-error capacity >= {lo:.6} bits/use (n = {n}) for {origin} (S,P)"),
        },
        _ => format!("zero-error capacity > 0 for {origin} (S,P)"),
    };

    Ok(Report {
        tool: TOOL.into(),
        version: VERSION.into(),
        seed: opts.seed,
        options: opts.clone(),
        input: spec.clone(),
        channel: channel_summary(&problem),
        provenance: resolved.provenance,
        search: resolved.search.clone(),
        states: states_to_json(&resolved.states),
        povm: povm_to_json(&resolved.povm),
        eps_support: opts.eps_support,
        probabilities: g.probabilities.clone(),
        supports: g.supports.iter().map(|s| s.outcomes.clone()).collect(),
        fragile_entries: g.fragile_entries,
        graph: AdjacencyList::from(&g.graph),
        non_adjacent_pair_count: pairs,
        positive_zero_error_capacity: pairs > 0,
        capacity,
        code,
        summary,
        failures,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub tool: String,
    pub version: String,
    pub input: ChannelSpec,
    pub search: SearchSummary,
    pub states: Vec<JsonMatrix>,
    pub povm: Vec<JsonMatrix>,
    pub supports: Vec<Vec<usize>>,
    pub graph: AdjacencyList,
}

/// Runs the search alone, ignoring any `(S, P)` in the spec.
pub fn search(spec: &ChannelSpec, opts: &AnalyzeOptions) -> Result<SearchReport> {
    check_options(opts)?;
    let problem = spec.validate(opts.allow_overcomplete)?;
    let cfg = opts.search_config(problem.channel.dim());
    let result = optimize_pair(&problem.channel, &cfg)?;
    let mut summary = SearchSummary::from(&result);
    summary.config = cfg;
    Ok(SearchReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        input: spec.clone(),
        search: summary,
        states: states_to_json(&result.states),
        povm: povm_to_json(&result.povm),
        supports: result.graph.supports.iter().map(|s| s.outcomes.clone()).collect(),
        graph: AdjacencyList::from(&result.graph.graph),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeReport {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub input: ChannelSpec,
    pub provenance: Provenance,
    pub states: Vec<JsonMatrix>,
    pub povm: Vec<JsonMatrix>,
    pub code: CodeSummary,
}

/// Code of block length `n` for the spec's `(S, P)`, searching if none is given.
pub fn code(spec: &ChannelSpec, n: usize, opts: &AnalyzeOptions) -> Result<CodeReport> {
    check_options(opts)?;
    if n == 0 {
        return Err(PipelineError::Options("n must be at least 1".into()));
    }
    let problem = spec.validate(opts.allow_overcomplete)?;
    let resolved = resolve_pair(&problem, opts)?;
    let g = confusability_graph(
        &problem.channel,
        &resolved.states,
        &resolved.povm,
        opts.eps_support,
        &Tolerances::default(),
    )?;
    let code = summarize_code(&g, &resolved, &problem.channel, n).map_err(PipelineError::Options)?;
    Ok(CodeReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        seed: opts.seed,
        input: spec.clone(),
        provenance: resolved.provenance,
        states: states_to_json(&resolved.states),
        povm: povm_to_json(&resolved.povm),
        code,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::spec::builtin;

    fn quick() -> AnalyzeOptions {
        AnalyzeOptions {
            restarts: 4,
            iterations: 300,
            ..AnalyzeOptions::default()
        }
    }

    #[test]
    fn pentagon_report() {
        let r = analyze(&builtin("pentagon").unwrap(), &quick()).unwrap();
        assert_eq!(r.provenance, Provenance::Given);
        assert_eq!(Graph::try_from(&r.graph).unwrap(), Graph::cycle(5));
        let cap = r.capacity.as_ref().unwrap();
        let r2 = cap.per_n[1].rate.unwrap();
        assert!((r2 - 1.1609).abs() < 1e-4);
        assert!((cap.theta_upper.unwrap() - r2).abs() < 1e-8);
        let code = r.code.as_ref().unwrap();
        assert_eq!((code.n, code.messages), (2, 5));
        assert!(code.verification.passed);
        assert!(r.failures.is_empty(), "{:?}", r.failures);
    }

    #[test]
    fn fully_depolarizing_report_has_zero_capacity() {
        let r = analyze(&builtin("depolarizing-p1").unwrap(), &quick()).unwrap();
        assert_eq!(r.provenance, Provenance::Searched);
        assert_eq!(r.non_adjacent_pair_count, 0);
        assert_eq!(r.summary, "zero-error capacity = 0 for searched (S,P)");
    }

    #[test]
    fn identity_qutrit_rate() {
        let r = analyze(&builtin("identity-d3").unwrap(), &quick()).unwrap();
        let rate = r.capacity.unwrap().per_n[0].rate.unwrap();
        assert_eq!(rate, 3f64.log2());
    }

    #[test]
    fn dimension_one_is_trivial() {
        let r = analyze(&builtin("identity-d1").unwrap(), &quick()).unwrap();
        assert_eq!(r.provenance, Provenance::Trivial);
        assert_eq!(r.capacity.unwrap().best_lower, Some(0.0));
    }

    #[test]
    fn reports_are_deterministic() {
        let spec = builtin("dephasing-p0.5").unwrap();
        let a = serde_json::to_string(&analyze(&spec, &quick()).unwrap()).unwrap();
        let b = serde_json::to_string(&analyze(&spec, &quick()).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn report_reproduces_from_embedded_inputs() {
        let r = analyze(&builtin("bitflip-p0.2").unwrap(), &quick()).unwrap();
        let again = analyze(&r.input, &r.options).unwrap();
        assert_eq!(again, r);
    }

    #[test]
    fn oversized_powers_become_failures() {
        let opts = AnalyzeOptions { n_max: 3, ..quick() };
        let r = analyze(&builtin("pentagon").unwrap(), &opts).unwrap();
        assert_eq!(r.failures.len(), 1);
        assert!(r.failures[0].starts_with("alpha at n = 3"));
        assert!(r.code.is_some());
    }

    #[test]
    fn bad_options_rejected() {
        let spec = builtin("pentagon").unwrap();
        for opts in [
            AnalyzeOptions { n_max: 0, ..quick() },
            AnalyzeOptions { eps_support: -1.0, ..quick() },
            AnalyzeOptions { theta_tol: 0.0, ..quick() },
        ] {
            assert!(matches!(analyze(&spec, &opts), Err(PipelineError::Options(_))));
        }
        assert!(matches!(code(&spec, 0, &quick()), Err(PipelineError::Options(_))));
    }

    #[test]
    fn search_and_code_reports() {
        let s = search(&builtin("identity-d2").unwrap(), &quick()).unwrap();
        assert_eq!(s.search.pair_count, 1);
        let c = code(&builtin("pentagon").unwrap(), 2, &quick()).unwrap();
        assert_eq!(c.code.messages, 5);
        assert_eq!(c.code.supports.as_ref().unwrap().len(), 5);
    }
}
