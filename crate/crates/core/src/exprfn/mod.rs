//! Arithmetic expressions in one variable `s`, used to define nonlinearity
//! components in problem files.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr      := term (('+' | '-') term)*
//! term      := factor (('*' | '/') factor)*
//! factor    := '-' factor | base ('^' factor)?
//! base      := number | 's' | func '(' expr (',' expr)* ')' | '(' expr ')' | piecewise
//! piecewise := 'piece' '{' (cmp '=>' expr ',')* 'else' '=>' expr ','? '}'
//! cmp       := expr ('<' | '<=' | '>' | '>=' | '==' | '!=') expr
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus. Functions:
//! `log exp sqrt atan abs sign` (one argument) and `min max` (two). There
//! is no implicit multiplication.
//!
//! ```
//! use varalg_core::exprfn;
//! let f = exprfn::compile(&exprfn::parse("piece{ s > 0 => log(1 + s^2), else => 0 }").unwrap());
//! assert_eq!(f.eval(-1.0), 0.0);
//! ```

mod ast;
mod compile;
mod parser;

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use thiserror::Error;

pub use ast::{BinOp, CmpOp, Condition, ExprAst, Func};
pub use compile::Program;

use crate::nonlin::ScalarFunction;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at offset {position}: expected one of {expected:?}")]
    Syntax { position: usize, expected: Vec<&'static str> },
    #[error("unknown function `{name}` at offset {position}")]
    UnknownFunction { name: String, position: usize },
    #[error("unknown variable `{name}` at offset {position} (only `s` is allowed)")]
    UnknownVariable { name: String, position: usize },
    #[error("`{name}` takes {expected} argument(s), got {found} at offset {position}")]
    Arity { name: &'static str, expected: usize, found: usize, position: usize },
}

impl ExprError {
    pub fn position(&self) -> usize {
        match self {
            ExprError::Syntax { position, .. }
            | ExprError::UnknownFunction { position, .. }
            | ExprError::UnknownVariable { position, .. }
            | ExprError::Arity { position, .. } => *position,
        }
    }
}

pub fn parse(src: &str) -> Result<ExprAst, ExprError> {
    parser::parse(src)
}

/// Compiles to a [`ScalarFunction`] labelled with the canonical printout.
/// No primitive or derivative is attached; downstream code falls back to
/// quadrature and finite differences. Domain violations (`log` of a
/// non-positive number, `sqrt` of a negative one, division by zero) yield
/// non-finite values rather than errors.
pub fn compile(ast: &ExprAst) -> ScalarFunction {
    let program = Arc::new(Program::compile(ast));
    ScalarFunction::new(ast.to_string(), move |s| program.eval(s))
}
