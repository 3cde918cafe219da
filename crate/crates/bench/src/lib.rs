//! Criterion benchmarks for the zecap core; see `benches/capacity.rs`.
