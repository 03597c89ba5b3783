//! Learning equivalence structures in the limit.
//!
//! Characters describe isomorphism types of countable equivalence
//! structures; learners read texts or informants and conjecture characters;
//! adversaries build presentations that defeat learners; the bridge maps
//! structure families to language families.

pub mod error;
pub mod extnat;
pub mod character;
pub mod structure;
pub mod presentation;
pub mod separability;
pub mod learners;
pub mod adversaries;
pub mod bridge;
pub mod corpus;
pub mod par;
pub mod cli;

pub use character::{Character, Component};
pub use error::{Error, Result};
pub use extnat::{ExtNat, Fin, Omega};
pub use presentation::{Item, Prefix};
pub use structure::{FiniteStructure, PrefixState};
