//! Derivated words of fixed points of Sturmian morphisms.
//!
//! Morphisms are named by words over the generators `a`, `b`, `α`, `β`
//! (written `a`, `b`, `A`, `B` in ASCII) with an optional `.E` suffix for the
//! letter exchange. [`derset::der_set`] lists the derivated words of a fixed
//! point as morphism names; [`verify`] checks such lists against return-word
//! codings computed directly from the fixed point.

pub mod derset;
pub mod error;
pub mod mechanical;
pub mod morphism;
pub mod name;
pub mod stream;
pub mod verify;
pub mod words;

pub use error::{Error, ErrorKind};
