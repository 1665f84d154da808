//! Criterion benchmarks for `sfn-core` live under `benches/`.
