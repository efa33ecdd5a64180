//! Criterion benchmarks for the disassembly pipeline live in `benches/`.
