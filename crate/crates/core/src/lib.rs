//! Certification and exhaustive search for arithmetic progressions of
//! primitive elements, one of them normal, in finite fields.

pub mod arith;
pub mod ffield;
pub mod polyfact;
pub mod sieve;
pub mod search;
pub mod fixtures;
pub mod reproduce;
pub mod cli;
