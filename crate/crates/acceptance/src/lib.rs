//! Carrier package for the `acceptance` test target; see `crates/core/tests/acceptance.rs`.
