//! Core library for working with the modalized Heyting calculus E and its
//! neighbour systems (Int, Int□, Kuz, Kuz*, mHC, KM, K4.Grz): formula
//! syntax, Hilbert-style derivation checking, finite algebraic and Kripke
//! semantics, the Gödel–McKinsey–Tarski translations, and the assertoric
//! equipollence transformation.
//!
//! The crate is `no_std` + `alloc`; everything here is pure computation.
//! File formats, IO and the command-line front end live in the companion
//! `mhc-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod algebra;
pub mod calculi;
pub mod certs;
pub mod equipollence;
pub mod kernel;
pub mod kripke;
pub mod search;
pub mod syntax;
pub mod translate;

pub use syntax::{parse, Connective, Formula, Language, ParseError, Substitution, Variable};
