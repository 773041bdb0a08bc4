//! Criterion benchmarks for the iteration and render kernels; see `benches/`.
