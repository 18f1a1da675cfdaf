//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr   := ('+'|'-')? term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | base ('^' '-'? int)?
//! base   := int | ident | 'exp' '(' expr ')' | '(' expr ')'
//! ```
//! The argument of `exp` must reduce to a homogeneous rational linear form.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{ExprContext, ExprError, ScalarExpr};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
}

struct Lexed {
    tok: Tok,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Lexed>, ExprError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Lexed { tok: Tok::Int(s.parse().unwrap()), column });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Lexed { tok: Tok::Ident(chars[start..i].iter().collect()), column });
        } else if "+-*/^()".contains(c) {
            out.push(Lexed { tok: Tok::Op(c), column });
            i += 1;
        } else {
            return Err(ExprError::Syntax { column, message: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Lexed>,
    pos: usize,
    ctx: &'a ExprContext,
    end_column: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|l| &l.tok)
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_column, |l| l.column)
    }

    fn eat_op(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_op(&mut self, op: char) -> Result<(), ExprError> {
        if self.eat_op(op) {
            Ok(())
        } else {
            Err(ExprError::Syntax { column: self.column(), message: format!("expected `{op}`") })
        }
    }

    fn expr(&mut self) -> Result<ScalarExpr, ExprError> {
        let negate = if self.eat_op('-') {
            true
        } else {
            self.eat_op('+');
            false
        };
        let mut acc = self.term()?;
        if negate {
            acc = -acc;
        }
        loop {
            if self.eat_op('+') {
                acc = &acc + &self.term()?;
            } else if self.eat_op('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<ScalarExpr, ExprError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat_op('*') {
                acc = &acc * &self.factor()?;
            } else if self.peek() == Some(&Tok::Op('/')) {
                self.pos += 1;
                let column = self.column();
                let d = self.factor()?;
                if d.is_zero() {
                    return Err(ExprError::SyntacticDivisionByZero { column });
                }
                acc = acc.checked_div(&d)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<ScalarExpr, ExprError> {
        if self.eat_op('-') {
            return Ok(-self.factor()?);
        }
        let base = self.base()?;
        if !self.eat_op('^') {
            return Ok(base);
        }
        let column = self.column();
        let negative = self.eat_op('-');
        let Some(Tok::Int(k)) = self.peek().cloned() else {
            return Err(ExprError::Syntax { column: self.column(), message: "expected integer exponent".into() });
        };
        self.pos += 1;
        let k: i32 = k
            .try_into()
            .map_err(|_| ExprError::Syntax { column, message: "exponent too large".into() })?;
        let k = if negative { -k } else { k };
        if k < 0 && base.is_zero() {
            return Err(ExprError::SyntacticDivisionByZero { column });
        }
        base.pow(k)
    }

    fn base(&mut self) -> Result<ScalarExpr, ExprError> {
        let column = self.column();
        let n = self.ctx.dimension();
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(ScalarExpr::constant(n, BigRational::from_integer(v)))
            }
            Some(Tok::Ident(name)) if name == "exp" => {
                self.pos += 1;
                self.expect_op('(')?;
                let inner_column = self.column();
                let arg = self.expr()?;
                self.expect_op(')')?;
                let form = arg
                    .as_linear_form()
                    .ok_or(ExprError::NonlinearExponent { column: inner_column })?;
                Ok(ScalarExpr::exponential(&form))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let i = self
                    .ctx
                    .index_of(&name)
                    .map_err(|_| ExprError::UnknownIdentifier { name: name.clone(), column })?;
                Ok(ScalarExpr::coordinate(n, i))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_op(')')?;
                Ok(e)
            }
            Some(Tok::Op(c)) => Err(ExprError::Syntax { column, message: format!("unexpected `{c}`") }),
            None => Err(ExprError::Syntax { column, message: "unexpected end of input".into() }),
        }
    }
}

pub(super) fn parse(text: &str, ctx: &ExprContext) -> Result<ScalarExpr, ExprError> {
    let toks = lex(text)?;
    let end_column = text.chars().count() + 1;
    let mut p = Parser { toks, pos: 0, ctx, end_column };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(ExprError::Syntax { column: p.column(), message: "trailing input".into() });
    }
    Ok(e)
}
