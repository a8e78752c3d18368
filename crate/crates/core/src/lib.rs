//! Association schemes from finite groups and Paige's Moufang loops:
//! finite fields, Zorn vector matrices, permutation groups, loop inner
//! orbits, intersection numbers and character tables.
//!
//! `no_std` with `alloc`; IO and the command line live in the companion
//! `schemeforge` crate.

#![no_std]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod chartab;
pub mod eigen;
pub mod gf;
pub mod loopcore;
pub mod permgroup;
pub mod pipeline;
pub mod scheme;
pub mod unionfind;
pub mod zorn;

pub use chartab::{CharacterTable, GroupCharacterTable};
pub use gf::{FieldElement, FieldSpec, GaloisField};
pub use loopcore::DEFAULT_SEED;
pub use permgroup::{Permutation, PermutationGroup};
pub use scheme::{AssociationScheme, IntersectionNumbers};
pub use zorn::{PaigeLoop, ZornMatrix};
