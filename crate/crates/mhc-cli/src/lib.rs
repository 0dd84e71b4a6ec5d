//! Command-line workbench around `mhc-core`: file formats for certificates,
//! algebras and Kripke models, the CLI verbs, and the acceptance suite.

pub mod acceptance;
pub mod commands;
pub mod formats;
