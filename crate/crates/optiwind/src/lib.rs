//! File formats, random corpora, table reproduction and the command-line
//! front end for `optiwind-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod corpus;
pub mod error;
pub mod format;
pub mod tables;

pub use error::{CliError, FormatError};
