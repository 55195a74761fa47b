//! Two-level tower `F_p ⊂ F_q ⊂ F_{q^n}`: arithmetic, Frobenius, orders,
//! and the e-free / g-free / normal tests.

mod ext;
mod fq;
mod poly;

pub use ext::{build_ctx, FieldCtx, FieldElem, DEFAULT_FIELD_CAP_BITS};
pub use fq::{first_irreducible, Code, Fq};
pub use poly::PolyFq;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field exceeds the element-count cap")]
    TooLarge,
    #[error("extension degree must be at least 2")]
    DegreeTooSmall,
    #[error("{0} does not divide q^n - 1")]
    NotADivisor(u64),
    #[error("polynomial does not divide x^n - 1")]
    NotAFactor,
    #[error("zero has no multiplicative order")]
    ZeroElement,
    #[error("malformed element: {0}")]
    Parse(String),
    #[error("internal consistency failure: {0}")]
    Internal(&'static str),
}
