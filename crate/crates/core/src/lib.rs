//! Rosaries: cyclic sequences over `1..=n` that contain every permutation of
//! `1..=n` as a subsequence of some one-loop reading.
//!
//! The crate builds the known constructions, verifies the property exactly by
//! enumerating all `n!` permutations, evaluates the window-sum predicates on
//! ascent/descent codes, and searches for short rosaries.

pub mod cli;
pub mod constructions;
pub mod containment;
pub mod error;
pub mod lemmas;
pub mod perms;
pub mod search;
pub mod seqcore;
pub mod text;

pub use constructions::{catalog, naive_rosary, theorem1_rosary, theorem2_rosary, theorem_rosary};
pub use containment::{
    cycle_contains_permutation, cyclic_contains, is_rosary, string_contains,
    string_contains_all_permutations, ContainmentVerdict, Engine, RosaryReport, VerifyConfig,
};
pub use error::{Error, Result};
pub use seqcore::{code_of_cycle, code_of_string, lambda_decomposition, maximal_blocks, Cycle, Permutation};
