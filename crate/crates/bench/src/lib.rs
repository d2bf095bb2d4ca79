//! Criterion benchmarks for `relreg-core` live under `benches/`.
