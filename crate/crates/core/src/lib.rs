//! Computing with finite ordered universal algebras.
//!
//! The crate covers signatures with ordered constants, terms and the ordered term
//! algebra, finite ordered algebras with their quotients, closure of relations into
//! compatible quasiorders with explicit witnesses, amalgams and their pushouts,
//! dominions, and the normalization of zigzag schemes.

pub mod amalgam;
pub mod closure;
pub mod enumerate;
pub mod error;
pub mod exec;
pub mod oalg;
pub mod oracle;
pub mod otalg;
pub mod random;
pub mod relation;
pub mod scheme;
pub mod selftest;
pub mod signature;
pub mod term;

pub use error::{Error, Result};
pub use exec::Exec;
