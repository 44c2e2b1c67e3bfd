//! Number-theory kernels for building and certifying long runs of composite
//! integers.
//!
//! The crate is `no_std` and needs only `alloc`. Anything touching files,
//! threads or the command line lives in the `gapforge` companion crate.
//!
//! Stochastic routines take an [`exec::Executor`]: work is split into
//! fixed-size chunks, each chunk draws from its own ChaCha stream, and the
//! results are merged in chunk order. Output therefore depends only on the
//! seed, never on how many workers ran the chunks.
#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod arith;
pub mod covering;
pub mod crt;
pub mod exec;
pub mod hypercover;
pub mod kpower;
pub mod primes;
pub mod special;
pub mod tuples;

pub use covering::{CongruenceClass, CoveringSystem, StagePlan};
pub use crt::GapCertificate;
pub use exec::{Executor, Sequential};
pub use primes::{GapRecord, Primality};
