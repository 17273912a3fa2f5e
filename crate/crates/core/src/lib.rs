//! Construction and verification of P-sequences: cyclic strings of any
//! length `L` over `[K]` in which every string of length `m` occurs
//! `floor(L/K^m)` or `ceil(L/K^m)` times.
//!
//! * [`generate_pkl`] builds one in `O(K L)` time by repeated lift-and-join.
//! * [`is_pkl`] and [`classify`] check membership in the balanced class and
//!   its two weaker relatives.
//! * [`census`] counts them up to rotation by exhaustive search.

pub mod census;
pub mod error;
pub mod generator;
pub mod join;
pub mod lift;
pub mod necklace;
pub mod verifier;

/// Storage for one character. Alphabets are limited to [`MAX_ALPHABET`].
pub type Symbol = u16;

/// Largest supported alphabet size.
pub const MAX_ALPHABET: u32 = 1 << 16;

pub use census::{census, census_with, CensusOptions, CensusResult};
pub use error::{PklError, Result};
pub use generator::{digits_base_k, generate_p2l, generate_pkl, generate_pkl_with, GenerateOptions, Generation};
pub use join::{build_join_graph, lift_and_join, lift_and_join_with, JoinCase, JoinGraph, JoinOptions, JoinTrace};
pub use lift::{discrete_derivative, lempel_lift, lifted_strings, LiftFamily, LiftParams};
pub use necklace::{
    add_mod, canonical_rotation, count_occurrences, extend_longest_run, join, least_rotation, maximal_runs,
    occurrence_profile, JoinChoice, LinearString, Necklace, OccurrenceProfile,
};
pub use verifier::{classify, count_histogram, is_pkl, load_balance, Classification, LoadBalance, Tier, Verdict, Witness};
