//! Benchmarks for the `fracbound` kernels live in `benches/`.
