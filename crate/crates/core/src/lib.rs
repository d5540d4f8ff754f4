//! Symmetric-key constructions over arbitrary finite groups.
//!
//! The crate provides finite groups with canonical indexing ([`group`]),
//! reproducible randomness and lazily sampled random oracles ([`rng`],
//! [`oracle`]), the group Even-Mansour and Feistel ciphers ([`em`],
//! [`feistel`]), the Swap-or-Not and Scoot-or-Not shuffles with their exact
//! mixing analysis ([`shuffle`]), concrete attacks and game runners
//! ([`attack`]), and executable versions of the indistinguishability games
//! used to bound those attacks ([`games`]).

pub mod attack;
pub mod em;
pub mod error;
pub mod exact;
pub mod feistel;
pub mod games;
pub mod group;
pub mod oracle;
pub mod rng;
pub mod shuffle;

pub use error::{Error, Result};
pub use group::{Element, Group, GroupKind, Payload};
pub use oracle::{
    BitFn, BitFunction, ConstantBit, IdentityPermutation, LazyBitFunction, LazyFunction,
    LazyPermutation, Permutation, RoundFunction, TablePermutation,
};
pub use rng::{RandomStream, Sampler};
