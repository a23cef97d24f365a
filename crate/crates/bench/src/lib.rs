//! Criterion benchmarks for the exact engine and the numerical layer; see
//! `benches/`.
