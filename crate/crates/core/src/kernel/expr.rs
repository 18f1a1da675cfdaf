use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::approx::exp_rational;
use super::poly::{self, Poly};
use super::{ExprContext, ExprError};

/// Monomial key: coordinate powers, then the linear form of the exponential
/// factor. Derived `Ord` gives the lexicographic order used for printing.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Key {
    pub pows: Vec<u32>,
    pub exps: Vec<Rational64>,
}

impl Key {
    fn unit(n: usize) -> Key {
        Key { pows: vec![0; n], exps: vec![Rational64::zero(); n] }
    }

    fn mul(&self, other: &Key) -> Key {
        Key {
            pows: self.pows.iter().zip(&other.pows).map(|(a, b)| a + b).collect(),
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
        }
    }

    fn has_exp(&self) -> bool {
        self.exps.iter().any(|e| !e.is_zero())
    }
}

/// Polynomial in coordinates with exponential factors `exp(L)`, `L` a rational
/// linear form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct ExpPoly {
    n: usize,
    terms: BTreeMap<Key, BigRational>,
}

impl ExpPoly {
    fn zero(n: usize) -> Self {
        ExpPoly { n, terms: BTreeMap::new() }
    }

    fn constant(n: usize, c: BigRational) -> Self {
        let mut p = ExpPoly::zero(n);
        p.add_term(Key::unit(n), c);
        p
    }

    fn add_term(&mut self, k: Key, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(k) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (k, c) = self.terms.iter().next().unwrap();
                (k.pows.iter().all(|&p| p == 0) && !k.has_exp()).then(|| c.clone())
            }
            _ => None,
        }
    }

    fn add(&self, o: &ExpPoly) -> ExpPoly {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    fn sub(&self, o: &ExpPoly) -> ExpPoly {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(k.clone(), -c.clone());
        }
        out
    }

    fn mul(&self, o: &ExpPoly) -> ExpPoly {
        let mut out = ExpPoly::zero(self.n);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &o.terms {
                out.add_term(ka.mul(kb), ca * cb);
            }
        }
        out
    }

    fn scale(&self, c: &BigRational) -> ExpPoly {
        if c.is_zero() {
            return ExpPoly::zero(self.n);
        }
        ExpPoly { n: self.n, terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect() }
    }

    fn mul_key(&self, key: &Key) -> ExpPoly {
        ExpPoly { n: self.n, terms: self.terms.iter().map(|(k, v)| (k.mul(key), v.clone())).collect() }
    }

    fn derivative(&self, i: usize) -> ExpPoly {
        let mut out = ExpPoly::zero(self.n);
        for (k, c) in &self.terms {
            let a = k.exps[i];
            if !a.is_zero() {
                let factor = BigRational::new(BigInt::from(*a.numer()), BigInt::from(*a.denom()));
                out.add_term(k.clone(), c * factor);
            }
            let p = k.pows[i];
            if p > 0 {
                let mut k2 = k.clone();
                k2.pows[i] -= 1;
                out.add_term(k2, c * BigRational::from_integer(BigInt::from(p)));
            }
        }
        out
    }

    fn min_exps(&self) -> Vec<Rational64> {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return vec![Rational64::zero(); self.n];
        };
        let mut m = first.exps.clone();
        for k in it {
            for (a, b) in m.iter_mut().zip(&k.exps) {
                if b < a {
                    *a = *b;
                }
            }
        }
        m
    }

    fn min_pows(&self) -> Vec<u32> {
        let mut m: Option<Vec<u32>> = None;
        for k in self.terms.keys() {
            m = Some(match m {
                None => k.pows.clone(),
                Some(v) => v.iter().zip(&k.pows).map(|(a, b)| *a.min(b)).collect(),
            });
        }
        m.unwrap_or_else(|| vec![0; self.n])
    }

    fn shift_exps(&self, by: &[Rational64]) -> ExpPoly {
        if by.iter().all(|e| e.is_zero()) {
            return self.clone();
        }
        let key = Key { pows: vec![0; self.n], exps: by.to_vec() };
        self.mul_key(&key)
    }

    fn div_pows(&self, by: &[u32]) -> ExpPoly {
        ExpPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| {
                    let mut k2 = k.clone();
                    for (a, b) in k2.pows.iter_mut().zip(by) {
                        *a -= b;
                    }
                    (k2, v.clone())
                })
                .collect(),
        }
    }

    fn exp_denominators(&self, acc: &mut [i64]) {
        for k in self.terms.keys() {
            for (d, e) in acc.iter_mut().zip(&k.exps) {
                *d = d.lcm(e.denom());
            }
        }
    }

    /// Maps onto a plain polynomial in `2n` variables: coordinates first, then
    /// `W_i = exp(x_i / D_i)`, after dividing out `exp(shift)`.
    fn to_poly(&self, scale: &[i64], shift: &[Rational64]) -> Poly {
        let n = self.n;
        Poly::from_terms(
            2 * n,
            self.terms.iter().map(|(k, c)| {
                let mut e = k.pows.clone();
                for i in 0..n {
                    let v = (k.exps[i] - shift[i]) * Rational64::from_integer(scale[i]);
                    debug_assert!(v.is_integer() && !v.is_negative());
                    e.push(v.to_integer() as u32);
                }
                (e, c.clone())
            }),
        )
    }

    fn from_poly(p: &Poly, n: usize, scale: &[i64], shift: &[Rational64]) -> ExpPoly {
        let mut out = ExpPoly::zero(n);
        for (e, c) in p.terms() {
            let pows = e[..n].to_vec();
            let exps = (0..n)
                .map(|i| Rational64::new(e[n + i] as i64, scale[i]) + shift[i])
                .collect();
            out.add_term(Key { pows, exps }, c.clone());
        }
        out
    }

    fn leading_coefficient(&self) -> Option<&BigRational> {
        self.terms.values().next_back()
    }
}

/// Exact scalar: a rational function of the coordinates whose numerator may
/// carry exponential factors. Always held in canonical form, so structural
/// equality is mathematical equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScalarExpr {
    num: ExpPoly,
    den: ExpPoly,
}

/// How `evaluate` treats exponential factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMode {
    /// Exponentials must have argument zero at the point.
    Exact,
    /// Exponentials are approximated to the given number of decimal digits.
    Approximate { digits: u32 },
}

impl ScalarExpr {
    pub fn zero(n: usize) -> Self {
        ScalarExpr { num: ExpPoly::zero(n), den: ExpPoly::constant(n, BigRational::one()) }
    }

    pub fn one(n: usize) -> Self {
        ScalarExpr::constant(n, BigRational::one())
    }

    pub fn constant(n: usize, c: BigRational) -> Self {
        ScalarExpr { num: ExpPoly::constant(n, c), den: ExpPoly::constant(n, BigRational::one()) }
    }

    pub fn integer(n: usize, c: i64) -> Self {
        ScalarExpr::constant(n, BigRational::from_integer(BigInt::from(c)))
    }

    pub fn rational(n: usize, numer: i64, denom: i64) -> Self {
        ScalarExpr::constant(n, BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    /// The `i`-th coordinate function.
    pub fn coordinate(n: usize, i: usize) -> Self {
        let mut key = Key::unit(n);
        key.pows[i] = 1;
        let mut num = ExpPoly::zero(n);
        num.add_term(key, BigRational::one());
        ScalarExpr { num, den: ExpPoly::constant(n, BigRational::one()) }
    }

    /// `exp(Σ form[i]·x_i)`.
    pub fn exponential(form: &[Rational64]) -> Self {
        let n = form.len();
        let mut num = ExpPoly::zero(n);
        num.add_term(Key { pows: vec![0; n], exps: form.to_vec() }, BigRational::one());
        ScalarExpr { num, den: ExpPoly::constant(n, BigRational::one()) }
    }

    /// Number of coordinates this expression ranges over.
    pub fn nvars(&self) -> usize {
        self.num.n
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// The value, when the expression is a rational constant.
    pub fn as_constant(&self) -> Option<BigRational> {
        if !self.den.as_constant().is_some_and(|c| c.is_one()) {
            return None;
        }
        self.num.as_constant()
    }

    /// True when every coordinate partial derivative vanishes.
    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    /// True when the expression involves coordinate `i` (polynomially or
    /// through an exponential).
    pub fn depends_on(&self, i: usize) -> bool {
        [&self.num, &self.den]
            .iter()
            .any(|p| p.terms.keys().any(|k| k.pows[i] > 0 || !k.exps[i].is_zero()))
    }

    pub fn has_exponentials(&self) -> bool {
        [&self.num, &self.den].iter().any(|p| p.terms.keys().any(Key::has_exp))
    }

    fn from_parts(num: ExpPoly, den: ExpPoly) -> ScalarExpr {
        canonicalize(num, den)
    }

    pub fn checked_div(&self, other: &ScalarExpr) -> Result<ScalarExpr, ExprError> {
        if other.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        if let Some(c) = other.as_constant() {
            return Ok(self.scale(&c.recip()));
        }
        Ok(ScalarExpr::from_parts(self.num.mul(&other.den), self.den.mul(&other.num)))
    }

    pub fn recip(&self) -> Result<ScalarExpr, ExprError> {
        ScalarExpr::one(self.nvars()).checked_div(self)
    }

    pub fn scale(&self, c: &BigRational) -> ScalarExpr {
        if c.is_zero() {
            return ScalarExpr::zero(self.nvars());
        }
        ScalarExpr { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn pow(&self, k: i32) -> Result<ScalarExpr, ExprError> {
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let mut acc = ScalarExpr::one(self.nvars());
        for _ in 0..k.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// Partial derivative with respect to coordinate `i`.
    pub fn derivative(&self, i: usize) -> ScalarExpr {
        let dn = self.num.derivative(i);
        if self.den.as_constant().is_some() {
            return ScalarExpr::from_parts(dn, self.den.clone());
        }
        let dd = self.den.derivative(i);
        if dd.is_zero() {
            return ScalarExpr::from_parts(dn, self.den.clone());
        }
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        ScalarExpr::from_parts(num, self.den.mul(&self.den))
    }

    /// Evaluates at a point given in coordinate order.
    pub fn evaluate(&self, point: &[BigRational], mode: EvalMode) -> Result<BigRational, ExprError> {
        let n = self.nvars();
        if point.len() != n {
            return Err(ExprError::InvalidPoint { expected: n, got: point.len() });
        }
        let d = eval_exp_poly(&self.den, point, mode)?;
        let tiny = match mode {
            EvalMode::Exact => d.is_zero(),
            EvalMode::Approximate { digits } => {
                d.abs() < BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), digits as usize))
            }
        };
        if tiny {
            return Err(ExprError::Pole);
        }
        Ok(eval_exp_poly(&self.num, point, mode)? / d)
    }

    /// Approximate value as `f64` (exponentials evaluated to 40 digits).
    pub fn evaluate_f64(&self, point: &[BigRational]) -> Result<f64, ExprError> {
        let v = self.evaluate(point, EvalMode::Approximate { digits: 40 })?;
        Ok(rational_to_f64(&v))
    }

    /// Replaces `t` by `t + ln c` for coordinate `t`, which is only expressible
    /// when `t` enters through exponentials with integer coefficients.
    pub fn shift_by_log(&self, t: usize, c: &BigRational) -> Result<ScalarExpr, ExprError> {
        if c.is_zero() || c.is_negative() {
            return Err(ExprError::InvalidContext(format!("ln of non-positive {c}")));
        }
        let subst = |p: &ExpPoly| -> Result<ExpPoly, ExprError> {
            let mut out = ExpPoly::zero(p.n);
            for (k, v) in &p.terms {
                if k.pows[t] > 0 || !k.exps[t].is_integer() {
                    return Err(ExprError::InvalidContext(
                        "coordinate enters non-exponentially or with fractional rate".into(),
                    ));
                }
                let a = k.exps[t].to_integer();
                let f = if a >= 0 {
                    num_traits::pow(c.clone(), a as usize)
                } else {
                    num_traits::pow(c.recip(), (-a) as usize)
                };
                out.add_term(k.clone(), v * f);
            }
            Ok(out)
        };
        Ok(ScalarExpr::from_parts(subst(&self.num)?, subst(&self.den)?))
    }

    /// Re-expresses over a larger coordinate list; `map[i]` is the new index of
    /// old coordinate `i`.
    pub fn embed(&self, map: &[usize], new_n: usize) -> ScalarExpr {
        let re = |p: &ExpPoly| {
            let mut out = ExpPoly::zero(new_n);
            for (k, v) in &p.terms {
                let mut key = Key::unit(new_n);
                for (i, &j) in map.iter().enumerate() {
                    key.pows[j] = k.pows[i];
                    key.exps[j] = k.exps[i];
                }
                out.add_term(key, v.clone());
            }
            out
        };
        ScalarExpr { num: re(&self.num), den: re(&self.den) }
    }

    /// The coefficients `a` when the expression equals `Σ aᵢxᵢ` exactly.
    pub(crate) fn as_linear_form(&self) -> Option<Vec<Rational64>> {
        if self.den.as_constant().is_none() {
            return None;
        }
        let n = self.nvars();
        let mut form = vec![Rational64::zero(); n];
        for (k, c) in &self.num.terms {
            if k.has_exp() || k.pows.iter().sum::<u32>() != 1 {
                return None;
            }
            let i = k.pows.iter().position(|&p| p == 1)?;
            form[i] = Rational64::new(c.numer().to_i64()?, c.denom().to_i64()?);
        }
        Some(form)
    }

    pub fn display<'a>(&'a self, ctx: &'a ExprContext) -> DisplayExpr<'a> {
        DisplayExpr { expr: self, ctx }
    }

    /// Number of terms in numerator plus denominator; a crude size measure.
    pub fn term_count(&self) -> usize {
        self.num.terms.len() + self.den.terms.len()
    }
}

fn pos_rational(r: Rational64) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

fn eval_exp_poly(p: &ExpPoly, point: &[BigRational], mode: EvalMode) -> Result<BigRational, ExprError> {
    let mut total = BigRational::zero();
    for (k, c) in &p.terms {
        let mut v = c.clone();
        for (i, &e) in k.pows.iter().enumerate() {
            if e > 0 {
                v *= num_traits::pow(point[i].clone(), e as usize);
            }
        }
        if k.has_exp() {
            let arg: BigRational =
                k.exps.iter().zip(point).map(|(a, x)| pos_rational(*a) * x).sum();
            if !arg.is_zero() {
                match mode {
                    EvalMode::Exact => return Err(ExprError::InexactExponential(arg.to_string())),
                    EvalMode::Approximate { digits } => v *= exp_rational(&arg, digits + 5),
                }
            }
        }
        total += v;
    }
    Ok(total)
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() && b != 0.0 => a / b,
        _ => {
            // rescale huge numerators and denominators
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(960);
            let a = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let b = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            a / b
        }
    }
}

fn canonicalize(mut num: ExpPoly, mut den: ExpPoly) -> ScalarExpr {
    let n = num.n;
    debug_assert!(!den.is_zero());
    if num.is_zero() {
        return ScalarExpr::zero(n);
    }
    if let Some(c) = den.as_constant() {
        return ScalarExpr { num: num.scale(&c.recip()), den: ExpPoly::constant(n, BigRational::one()) };
    }
    // exponential unit out of the denominator
    let s_den = den.min_exps();
    if s_den.iter().any(|e| !e.is_zero()) {
        let neg: Vec<Rational64> = s_den.iter().map(|e| -e).collect();
        den = den.shift_exps(&neg);
        num = num.shift_exps(&neg);
    }
    if den.terms.len() == 1 {
        let (k, c) = den.terms.iter().next().unwrap();
        let c = c.clone();
        let dp = k.pows.clone();
        let common: Vec<u32> = dp.iter().zip(num.min_pows()).map(|(a, b)| *a.min(&b)).collect();
        let mut den2 = den.div_pows(&common);
        num = num.div_pows(&common).scale(&c.recip());
        den2 = den2.scale(&c.recip());
        if den2.as_constant().is_some() {
            return ScalarExpr { num, den: ExpPoly::constant(n, BigRational::one()) };
        }
        return ScalarExpr { num, den: den2 };
    }
    let mut scale = vec![1i64; n];
    num.exp_denominators(&mut scale);
    den.exp_denominators(&mut scale);
    let s_num = num.min_exps();
    let zero_shift = vec![Rational64::zero(); n];
    let pn = num.to_poly(&scale, &s_num);
    let pd = den.to_poly(&scale, &zero_shift);
    let g = poly::gcd(&pn, &pd);
    if !g.is_one() {
        let qn = pn.div_exact(&g).expect("gcd divides numerator");
        let qd = pd.div_exact(&g).expect("gcd divides denominator");
        num = ExpPoly::from_poly(&qn, n, &scale, &s_num);
        den = ExpPoly::from_poly(&qd, n, &scale, &zero_shift);
    }
    let lc = den.leading_coefficient().cloned().expect("nonzero denominator");
    if !lc.is_one() {
        let inv = lc.recip();
        num = num.scale(&inv);
        den = den.scale(&inv);
    }
    if den.as_constant().is_some() {
        den = ExpPoly::constant(n, BigRational::one());
    }
    ScalarExpr { num, den }
}

impl Add for &ScalarExpr {
    type Output = ScalarExpr;
    fn add(self, o: &ScalarExpr) -> ScalarExpr {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return ScalarExpr::from_parts(self.num.add(&o.num), self.den.clone());
        }
        ScalarExpr::from_parts(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }
}

impl Sub for &ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, o: &ScalarExpr) -> ScalarExpr {
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return ScalarExpr::from_parts(self.num.sub(&o.num), self.den.clone());
        }
        ScalarExpr::from_parts(
            self.num.mul(&o.den).sub(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }
}

impl Mul for &ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, o: &ScalarExpr) -> ScalarExpr {
        if self.is_zero() || o.is_zero() {
            return ScalarExpr::zero(self.nvars());
        }
        if let Some(c) = self.as_constant() {
            return o.scale(&c);
        }
        if let Some(c) = o.as_constant() {
            return self.scale(&c);
        }
        ScalarExpr::from_parts(self.num.mul(&o.num), self.den.mul(&o.den))
    }
}

impl Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr { num: self.num.scale(&-BigRational::one()), den: self.den.clone() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, o: ScalarExpr) -> ScalarExpr {
                (&self).$m(&o)
            }
        }
        impl $tr<&ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, o: &ScalarExpr) -> ScalarExpr {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        -&self
    }
}

/// Printer in the expression grammar; output reparses to the same value.
pub struct DisplayExpr<'a> {
    expr: &'a ScalarExpr,
    ctx: &'a ExprContext,
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_linform(form: &[Rational64], names: &[String]) -> String {
    let mut s = String::new();
    for (a, name) in form.iter().zip(names) {
        if a.is_zero() {
            continue;
        }
        let neg = a.is_negative();
        let abs = a.abs();
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if abs.is_one() {
            s.push_str(name);
        } else if abs.is_integer() {
            s.push_str(&format!("{}*{}", abs.numer(), name));
        } else {
            s.push_str(&format!("{}/{}*{}", abs.numer(), abs.denom(), name));
        }
    }
    s
}

fn fmt_key(k: &Key, names: &[String]) -> Vec<String> {
    let mut factors = Vec::new();
    for (p, name) in k.pows.iter().zip(names) {
        match p {
            0 => {}
            1 => factors.push(name.clone()),
            _ => factors.push(format!("{name}^{p}")),
        }
    }
    if k.has_exp() {
        factors.push(format!("exp({})", fmt_linform(&k.exps, names)));
    }
    factors
}

fn fmt_exp_poly(p: &ExpPoly, names: &[String]) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, c) in p.terms.iter().rev() {
        let neg = c.is_negative();
        let abs = c.abs();
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        let factors = fmt_key(k, names);
        if factors.is_empty() {
            s.push_str(&fmt_rational(&abs));
        } else {
            if !abs.is_one() {
                s.push_str(&fmt_rational(&abs));
                s.push('*');
            }
            s.push_str(&factors.join("*"));
        }
    }
    s
}

impl fmt::Display for DisplayExpr<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.ctx.coordinates();
        let e = self.expr;
        let num = fmt_exp_poly(&e.num, names);
        if e.den.as_constant().is_some() {
            return f.write_str(&num);
        }
        let num = if e.num.terms.len() == 1 && !num.contains('/') { num } else { format!("({num})") };
        let den = fmt_exp_poly(&e.den, names);
        let bare = e.den.terms.len() == 1 && {
            let (k, c) = e.den.terms.iter().next().unwrap();
            c.is_one() && fmt_key(k, names).len() == 1
        };
        if bare {
            write!(f, "{num}/{den}")
        } else {
            write!(f, "{num}/({den})")
        }
    }
}
