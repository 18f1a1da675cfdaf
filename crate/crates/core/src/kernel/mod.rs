//! Exact scalar arithmetic over rational functions of chart coordinates
//! extended by exponentials of rational linear forms.
//!
//! Every [`ScalarExpr`] is stored as a reduced fraction `num / den` where both
//! parts are polynomials in the coordinates and in exponential monomials
//! `exp(a·x)`. Exponentials of distinct linear forms are independent
//! indeterminates, which makes zero testing decidable: an expression is zero
//! exactly when its canonical numerator is the empty polynomial.

mod approx;
mod expr;
mod parse;
pub(crate) mod poly;

use std::collections::HashMap;

use num_rational::{BigRational, Rational64};
use num_traits::Zero;
use thiserror::Error;

pub use expr::{rational_to_f64, DisplayExpr, EvalMode, ScalarExpr};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("unknown identifier `{name}` at column {column}")]
    UnknownIdentifier { name: String, column: usize },
    #[error("argument of exp at column {column} is not a linear form in the coordinates")]
    NonlinearExponent { column: usize },
    #[error("division by zero at column {column}")]
    SyntacticDivisionByZero { column: usize },
    #[error("division by the zero expression")]
    DivisionByZero,
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("missing value for coordinate `{0}`")]
    MissingCoordinate(String),
    #[error("point has {got} values, expected {expected}")]
    InvalidPoint { expected: usize, got: usize },
    #[error("expression has a pole at the evaluation point")]
    Pole,
    #[error("exp({0}) has no exact rational value")]
    InexactExponential(String),
    #[error("invalid context: {0}")]
    InvalidContext(String),
}

/// Coordinate names of a chart plus declared exponential generators.
///
/// Generators are linear forms `Σ aᵢxᵢ`; the parser accepts `exp` of any
/// rational linear form, so declaring them is optional. Declared generators
/// must be nonzero and pairwise non-proportional.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExprContext {
    coordinates: Vec<String>,
    exp_generators: Vec<Vec<Rational64>>,
}

impl ExprContext {
    pub fn new<S: AsRef<str>>(coordinates: &[S]) -> Result<Self, ExprError> {
        Self::with_generators(coordinates, Vec::new())
    }

    pub fn with_generators<S: AsRef<str>>(
        coordinates: &[S],
        exp_generators: Vec<Vec<Rational64>>,
    ) -> Result<Self, ExprError> {
        let coordinates: Vec<String> = coordinates.iter().map(|s| s.as_ref().to_string()).collect();
        if coordinates.is_empty() {
            return Err(ExprError::InvalidContext("no coordinates".into()));
        }
        for (i, c) in coordinates.iter().enumerate() {
            let valid = c.chars().next().is_some_and(|ch| ch.is_ascii_alphabetic() || ch == '_')
                && c.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_');
            if !valid || c == "exp" {
                return Err(ExprError::InvalidContext(format!("invalid coordinate name `{c}`")));
            }
            if coordinates[..i].contains(c) {
                return Err(ExprError::InvalidContext(format!("duplicate coordinate `{c}`")));
            }
        }
        let n = coordinates.len();
        let mut primitive: Vec<Vec<Rational64>> = Vec::new();
        for g in &exp_generators {
            if g.len() != n || g.iter().all(|a| a.is_zero()) {
                return Err(ExprError::InvalidContext("degenerate exponential generator".into()));
            }
            let pivot = *g.iter().find(|a| !a.is_zero()).unwrap();
            let scaled: Vec<Rational64> = g.iter().map(|a| a / pivot).collect();
            if primitive.contains(&scaled) {
                return Err(ExprError::InvalidContext("duplicate exponential generator".into()));
            }
            primitive.push(scaled);
        }
        Ok(ExprContext { coordinates, exp_generators })
    }

    pub fn coordinates(&self) -> &[String] {
        &self.coordinates
    }

    pub fn exp_generators(&self) -> &[Vec<Rational64>] {
        &self.exp_generators
    }

    pub fn dimension(&self) -> usize {
        self.coordinates.len()
    }

    pub fn index_of(&self, name: &str) -> Result<usize, ExprError> {
        self.coordinates
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| ExprError::UnknownCoordinate(name.to_string()))
    }

    pub fn parse(&self, text: &str) -> Result<ScalarExpr, ExprError> {
        parse::parse(text, self)
    }

    pub fn zero(&self) -> ScalarExpr {
        ScalarExpr::zero(self.dimension())
    }

    pub fn one(&self) -> ScalarExpr {
        ScalarExpr::one(self.dimension())
    }

    pub fn integer(&self, c: i64) -> ScalarExpr {
        ScalarExpr::integer(self.dimension(), c)
    }

    pub fn coordinate(&self, name: &str) -> Result<ScalarExpr, ExprError> {
        Ok(ScalarExpr::coordinate(self.dimension(), self.index_of(name)?))
    }

    /// Formats a linear form such as `2*t` in this context's names.
    pub fn format_linear_form(&self, form: &[Rational64]) -> String {
        let e = ScalarExpr::exponential(form);
        let s = e.display(self).to_string();
        s.trim_start_matches("exp(").trim_end_matches(')').to_string()
    }
}

/// Parses `text` into canonical form over `ctx`.
pub fn parse_expr(text: &str, ctx: &ExprContext) -> Result<ScalarExpr, ExprError> {
    ctx.parse(text)
}

/// Partial derivative with respect to a named coordinate.
pub fn differentiate(e: &ScalarExpr, ctx: &ExprContext, coord: &str) -> Result<ScalarExpr, ExprError> {
    Ok(e.derivative(ctx.index_of(coord)?))
}

/// Evaluates at a point given by coordinate name.
pub fn evaluate(
    e: &ScalarExpr,
    ctx: &ExprContext,
    point: &HashMap<String, BigRational>,
    mode: EvalMode,
) -> Result<BigRational, ExprError> {
    let values = ctx
        .coordinates()
        .iter()
        .map(|c| point.get(c).cloned().ok_or_else(|| ExprError::MissingCoordinate(c.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    e.evaluate(&values, mode)
}

/// `BigRational` from a small fraction.
pub fn q(numer: i64, denom: i64) -> BigRational {
    BigRational::new(numer.into(), denom.into())
}
