//! Benchmark-only crate: timing benches live in `benches/`, the
//! detector parameter sensitivity sweep in `examples/sweep.rs`.
