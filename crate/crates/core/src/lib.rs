//! Exact leaf-space dynamics for slithered and non-uniform foliations.
//!
//! Numbers live in a real quadratic field `Q(sqrt d)` and homeomorphisms of
//! the leaf space are periodic piecewise-linear maps, so the group
//! computations behind the non-uniformity certificate are exact.

// Errors carry the offending exact values, which makes them large.
#![allow(clippy::result_large_err, clippy::large_enum_variant)]

pub mod conemodel;
pub mod float17;
pub mod leafaction;
pub mod plhomeo;
pub mod qfield;
pub mod sample;
pub mod selftest;
pub mod shearlab;

pub use float17::Float17;
pub use conemodel::{MetricChain, ProgressLedger};
pub use leafaction::{ActionSpec, Certificate, Word, WordMap};
pub use plhomeo::{Breakpoint, PlMap, TranslationNumber};
pub use qfield::QNum;
pub use shearlab::ShearModel;
