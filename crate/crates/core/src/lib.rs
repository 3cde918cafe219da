//! Zero-error capacity bounds for noisy quantum channels.
//!
//! A channel, a set of input states and a POVM give each state a support of
//! possible outcomes. States with disjoint supports are never confused; the
//! resulting confusability graph turns the zero-error capacity under product
//! measurements into the Shannon capacity of a graph, bounded below by
//! independence numbers of strong powers and above by the Lovász theta
//! function.

pub mod adjacency;
pub mod classical;
pub mod code;
pub mod graph;
pub mod pipeline;
pub mod quantum;
pub mod search;
pub mod spec;

pub use adjacency::{confusability_graph, ConfusabilityGraph, StateSet, SupportSet, DEFAULT_EPS_SUPPORT};
pub use code::{build_code, build_decoder, verify_zero_error, DecoderTable, OutputWord, QuantumBlockCode};
pub use graph::{capacity_bounds, independence_number, lovasz_theta, strong_power, CapacityBounds, Graph, Limits};
pub use pipeline::{analyze, AnalyzeOptions, Report};
pub use quantum::{DensityMatrix, Povm, ProbVector, QuantumChannel, Tolerances};
pub use search::{optimize_pair, SearchConfig, SearchResult};
pub use spec::{builtin, ChannelSpec};
