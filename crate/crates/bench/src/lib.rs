//! Criterion benchmarks for the valuation, polytope and degeneration
//! pipelines. The benches live in `benches/`; this library is empty.
