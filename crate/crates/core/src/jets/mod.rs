//! Symbolic jets along the Heisenberg vector fields `Z_α = ∂_{z_α} + i z̄_α ∂_t`,
//! `Z_ᾱ = ∂_{z̄_α} − i z_α ∂_t` and `∂_t`.

pub mod canon;
pub mod context;
pub mod letter;

pub use canon::canonicalize_letters;
pub use context::{CRContext, Field};
pub use letter::{canonical_words, is_canonical, word_to_string, IndexLetter, Word};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum JetError {
    #[error("jet order overflow at {0}")]
    JetOrderOverflow(String),
    #[error("index letter {0} out of range for n = {1}")]
    InvalidLetter(String, usize),
    #[error("unsupported dimension n = {0}")]
    UnsupportedDimension(usize),
    #[error("the value of f only enters through e^f")]
    BareValue,
    #[error("unknown atom `{0}`")]
    Unknown(String),
}
