//! Exact arithmetic over the Gaussian rationals and canonical sparse polynomials.

pub mod exponent;
pub mod expr;
pub mod frac;
pub mod param;
pub mod rational;
pub mod raw;
pub mod symbol;

pub use exponent::{exponent_add, AffineExponent};
pub use expr::{display_term, Derivation, EvalEnv, Expr, Monomial, TermKey, Weights};
pub use frac::{rational_is_zero, FactorId, FactorTable, Frac};
pub use param::{Param, ParamPoly};
pub use rational::{rat, rat_int, scalar_arith, GaussianRational, ScalarOp};
pub use raw::{poly_normalize, to_raw, RawExpr};
pub use symbol::{AtomKind, SymId, SymbolTable};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("unregistered symbol `{0}`")]
    UnknownSymbol(String),
    #[error("expression is not a plain number (free parameter or non-integer exponent)")]
    NotNumeric,
}
