//! Text formats: expressions, configuration files, solution records and points.

pub mod config;
pub mod expr;

pub use config::{parse_config, parse_point, parse_rational, parse_solution, solution_to_config, Config, ConfigError};
pub use expr::{parse_expression, Func, Node, ParseError, ParseErrorKind, Var};
