//! Exact computations on finite sites: categories, Grothendieck topologies,
//! fibrations and their Giraud topologies, sheafification, and deciders for
//! comorphisms, continuous functors and morphisms of sites.

pub mod bundle;
pub mod corpus;
pub mod error;
pub mod fibration;
pub mod fincat;
pub mod sheaf;
pub mod sieve;
pub mod suite;
pub mod verify;

pub use error::{Error, Result};
