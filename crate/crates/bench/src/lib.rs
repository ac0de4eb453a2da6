//! Criterion benchmarks for `leafspace-core`; see `benches/`.
