//! Criterion benchmarks for `polymix`; see `benches/`.
