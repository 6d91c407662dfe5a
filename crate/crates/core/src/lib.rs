//! Finite computational-algebra workbench for inverse semigroups,
//! semilattices of groups, twisted modules over inverse semigroups,
//! twisted partial group actions, their crossed products, and the
//! correspondence between the two twisted structures, machine-verified
//! on concrete finite instances.

pub mod battery;
pub mod caps;
pub mod clifford;
pub mod correspond;
pub mod error;
pub mod instances;
pub mod io;
pub mod iso;
pub mod semigroup;
pub mod suite;
pub mod paction;
pub mod tmodule;

pub use caps::Caps;
pub use error::{Error, Result};
