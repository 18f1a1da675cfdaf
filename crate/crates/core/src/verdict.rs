//! Pass/fail reports for tensor identities.

use std::fmt;

use num_traits::Signed;

use crate::kernel::{ExprContext, ScalarExpr};
use crate::tensor::TensorField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        }
    }
}

/// Sign trichotomy of a soliton's `λ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    Shrinking,
    Steady,
    Expanding,
    Indefinite,
}

impl Classification {
    /// Negative `λ` shrinks, zero is steady, positive expands; a nonconstant
    /// `λ` has no sign claim.
    pub fn of_lambda(lambda: &ScalarExpr) -> Classification {
        match lambda.as_constant() {
            Some(c) if c.is_negative() => Classification::Shrinking,
            Some(c) if c.is_positive() => Classification::Expanding,
            Some(_) => Classification::Steady,
            None => Classification::Indefinite,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Shrinking => "shrinking",
            Classification::Steady => "steady",
            Classification::Expanding => "expanding",
            Classification::Indefinite => "indefinite",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// First nonzero residual component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub index: Vec<usize>,
    /// Component label in coordinate names, e.g. `^x_x` or `_v,v`.
    pub label: String,
    pub value: ScalarExpr,
    pub expression: String,
}

impl Witness {
    pub fn of(t: &TensorField) -> Option<Witness> {
        let (index, value) = t.first_nonzero()?;
        let ctx = t.chart().context();
        Some(Witness {
            label: component_label(ctx, t.upper_rank(), &index),
            expression: value.display(ctx).to_string(),
            value: value.clone(),
            index,
        })
    }
}

pub fn component_label(ctx: &ExprContext, upper: usize, index: &[usize]) -> String {
    let names: Vec<&str> = index.iter().map(|&i| ctx.coordinates()[i].as_str()).collect();
    let mut s = String::new();
    if upper > 0 {
        s.push('^');
        s.push_str(&names[..upper].join(","));
    }
    if index.len() > upper {
        s.push('_');
        s.push_str(&names[upper..].join(","));
    }
    s
}

#[derive(Clone, Debug)]
pub struct VerdictReport {
    pub identity: String,
    pub status: Status,
    pub residual: Option<TensorField>,
    pub witness: Option<Witness>,
    pub solved_constants: Option<(ScalarExpr, ScalarExpr)>,
    pub classification: Option<Classification>,
    /// Named scalars reported alongside the verdict (`rho`, `alpha`, `H`, ...).
    pub values: Vec<(String, ScalarExpr)>,
    pub notes: Vec<String>,
}

impl VerdictReport {
    /// Passes iff every component of `residual` is the zero expression.
    pub fn from_residual(identity: impl Into<String>, residual: TensorField) -> VerdictReport {
        let witness = Witness::of(&residual);
        VerdictReport {
            identity: identity.into(),
            status: if witness.is_none() { Status::Pass } else { Status::Fail },
            residual: Some(residual),
            witness,
            solved_constants: None,
            classification: None,
            values: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn verdict(identity: impl Into<String>, pass: bool) -> VerdictReport {
        VerdictReport {
            identity: identity.into(),
            status: if pass { Status::Pass } else { Status::Fail },
            residual: None,
            witness: None,
            solved_constants: None,
            classification: None,
            values: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn with_value(mut self, name: impl Into<String>, value: ScalarExpr) -> Self {
        self.values.push((name.into(), value));
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn value(&self, name: &str) -> Option<&ScalarExpr> {
        self.values.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    /// Marks the report failed without changing the residual.
    pub fn fail(mut self, note: impl Into<String>) -> Self {
        self.status = Status::Fail;
        self.notes.push(note.into());
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Chart;

    #[test]
    fn witness_is_first_nonzero_component() {
        let c = Chart::from_coordinates(&["x", "y", "z"]).unwrap();
        let mut t = TensorField::zeros(&c, 1, 1);
        t.set(&[1, 2], c.parse("x/2").unwrap());
        t.set(&[2, 0], c.constant(3));
        let r = VerdictReport::from_residual("demo", t);
        assert!(!r.passed());
        let w = r.witness.unwrap();
        assert_eq!(w.index, vec![1, 2]);
        assert_eq!(w.label, "^y_z");
        assert_eq!(w.expression, "1/2*x");
        assert!(VerdictReport::from_residual("zero", TensorField::zeros(&c, 0, 2)).passed());
    }

    #[test]
    fn classification_follows_sign() {
        let c = Chart::from_coordinates(&["x"]).unwrap();
        assert_eq!(Classification::of_lambda(&c.constant(3)), Classification::Expanding);
        assert_eq!(Classification::of_lambda(&c.constant(-1)), Classification::Shrinking);
        assert_eq!(Classification::of_lambda(&c.zero()), Classification::Steady);
        assert_eq!(Classification::of_lambda(&c.parse("x").unwrap()), Classification::Indefinite);
    }
}
