//! File formats, comparison tables, parallel Monte Carlo, verification
//! suites and the command-line interface on top of [`swor_core`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod compare;
pub mod dist;
pub mod format;
pub mod mc;
pub mod verify;

pub use swor_core;
