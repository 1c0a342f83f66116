//! Threshold secret sharing where the secret is a group presentation's
//! relator set.
//!
//! A dealer picks a platform group whose word problem the toolkit can decide
//! (Coxeter or polycyclic), splits the `m = C(n, t-1)` relators into `n`
//! shares so that any `t` participants recover all of them and any fewer
//! always miss at least one, and encodes messages bit by bit as words that
//! equal the identity exactly when the bit is 1. Decoding is solving the
//! word problem in the reconstructed group.

pub mod access;
pub mod analysis;
pub mod bits;
pub mod combiner;
pub mod coxeter;
pub mod dealer;
pub mod engine;
pub mod files;
pub mod polycyclic;
pub mod presentation;
pub mod word;

pub use access::{
    build_access_structure, check_threshold_property, enumerate_subsets, make_shares,
    reconstruct, AccessError, AccessStructure, Reconstruction, SchemeId, SchemeParams, Share,
};
pub use bits::Bits;
pub use presentation::{Family, GroupPresentation, PresentationError, PublicFacts, Relator};
pub use word::{commutator, conjugate, random_word, Generators, Letter, Sign, Word, WordError};
