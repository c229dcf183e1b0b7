//! Rule-based compliance benchmarking.
//!
//! * [`semlogic`] – terms, patterns, weighted rules, working memory and the
//!   derivation lattice.
//! * [`dsl`] – the `.karb` text format.
//! * [`inference`] – forward-chaining saturation with contradiction
//!   detection and explanations.
//! * [`quma`] – user-opinion survey records and their analytics.
//! * [`fit`] – the weighted scoring model and its fitting procedures.
//! * [`bench`] – the four-method benchmark and its reports.
//! * [`cli`] – the `karb` command line.
//! * [`kv`] – the `key = value` format of the configuration files.

pub mod bench;
pub mod cli;
pub mod dsl;
pub mod fit;
pub mod inference;
pub mod kv;
pub mod quma;
pub mod semlogic;
