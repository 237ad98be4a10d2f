//! Benchmark-only crate; see benches/walks.rs.
