//! Quantities built from the jets of a solution, and the identities relating them.

pub mod bounds;
pub mod catalog;
pub mod coeffs;
pub mod identities;
pub mod psi;

pub use catalog::{Catalog, Quantity, QUANTITY_NAMES};
pub use coeffs::{coefficients_f64, Coefficients, TwistSign};
pub use psi::{psi_m0_specialization, psi_squares_numeric, psi_squares_symbolic};
pub use bounds::{coefficient_bounds_check, tensor_identity_tests};
pub use identities::{
    decide, identity_checks, verify_all, verify_identity, verify_identity_with, verify_in, Check, CheckOutcome, IdentityId,
    WeightedTerm, Mutation, ParamMode, ResidualStatus, VerificationReport, VerifyOptions,
};

use crate::jets::JetError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuantityError {
    #[error("unknown quantity `{0}`")]
    UnknownName(String),
    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),
    #[error("malformed mutation `{0}` (expected c<k>+1 or drop:<term>)")]
    BadMutation(String),
    #[error("mutations only apply to the weighted identity `lemma1`, not `{0}`")]
    MutationUnsupported(String),
    #[error("`{0}` is checked on free symbols, not on jets")]
    NotAJetIdentity(String),
    #[error(transparent)]
    Jet(#[from] JetError),
}
