//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by residue arithmetic, group computations, curve handling,
/// classification and verification.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A residue that must be a unit is not coprime to the modulus.
    #[error("{value} is not a unit modulo {modulus}")]
    NonUnit { value: i128, modulus: u64 },

    /// Two operands live in different rings.
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },

    /// A nonzero integer was required.
    #[error("zero input where a nonzero integer is required")]
    ZeroInput,

    /// The modulus is zero, one where forbidden, or too large for packed matrix keys.
    #[error("unsupported modulus {0}")]
    BadModulus(u64),

    /// A matrix with non-invertible determinant was passed where GL2 is required.
    #[error("matrix is singular modulo {modulus}")]
    Singular { modulus: u64 },

    /// The group being built exceeds the configured element cap.
    #[error("group size exceeds the cap of {cap} elements")]
    SizeLimitExceeded { cap: usize },

    /// A reduction target does not divide the source modulus.
    #[error("target modulus {target} does not divide {modulus}")]
    BadTarget { target: u64, modulus: u64 },

    /// A purported subgroup is not contained in the ambient group.
    #[error("not a subgroup of the ambient group")]
    NotSubgroup,

    /// A Cartan parameter choice gives a non-unit determinant.
    #[error("Cartan element has non-unit determinant modulo {modulus}")]
    NonUnitDet { modulus: u64 },

    /// The nonsplit parameter is a square (or zero) modulo the prime.
    #[error("delta = {num}/{den} is a square or zero modulo {p}")]
    BadDelta { num: i64, den: i64, p: u64 },

    /// The imaginary quadratic order is not one of the thirteen class number one orders.
    #[error("unknown order: deltaK = {delta_k}, f = {f}")]
    UnknownOrder { delta_k: i64, f: i64 },

    /// The curve does not have complex multiplication by an order of class number one.
    #[error("not a CM curve")]
    NotCM,

    /// The Weierstrass coefficients define a singular curve.
    #[error("singular curve (discriminant zero)")]
    SingularCurve,

    /// Input outside the supported range.
    #[error("unsupported input: {0}")]
    UnsupportedInput(String),

    /// A certificate matrix is not an element of the group.
    #[error("matrix is not an element of the group")]
    NotInGroup,

    /// The kappa of a bound step is not a kernel matrix.
    #[error("kappa is not a kernel matrix of the reduction")]
    BadKappa,

    /// A verification check failed.
    #[error("assertion failure in {check}: {detail}")]
    AssertionFailure { check: String, detail: String },
}

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
