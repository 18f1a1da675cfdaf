//! Sparse multivariate polynomials over the rationals.
//!
//! This is the gcd engine behind canonical rational forms. Terms are kept in a
//! `BTreeMap` keyed by exponent vectors, so iteration order is lexicographic
//! and the leading term is the last entry.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub(crate) type Exps = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Poly {
    nvars: usize,
    terms: BTreeMap<Exps, BigRational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, BigRational::one())
    }

    pub fn monomial(exps: Exps, c: BigRational) -> Self {
        let nvars = exps.len();
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exps, BigRational)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exps, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        match self.terms.len() {
            0 => true,
            1 => self.terms.keys().next().unwrap().iter().all(|&e| e == 0),
            _ => false,
        }
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.terms.values().next().is_some_and(|c| c.is_one())
    }

    fn add_term(&mut self, e: Exps, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
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

    pub fn leading(&self) -> Option<(&Exps, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exps = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    fn mul_monomial(&self, exps: &[u32], c: &BigRational) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, k)| (e.iter().zip(exps).map(|(a, b)| a + b).collect(), k * c))
                .collect(),
        }
    }

    /// Divides every coefficient by the leading one.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some((_, lc)) if lc.is_one() => self.clone(),
            Some((_, lc)) => self.scale(&lc.recip()),
        }
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    /// Componentwise minimum exponent over all terms.
    pub fn min_exps(&self) -> Exps {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return vec![0; self.nvars];
        };
        let mut m = first.clone();
        for e in it {
            for (a, b) in m.iter_mut().zip(e) {
                *a = (*a).min(*b);
            }
        }
        m
    }

    fn div_monomial(&self, exps: &[u32]) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, k)| (e.iter().zip(exps).map(|(a, b)| a - b).collect(), k.clone()))
                .collect(),
        }
    }

    /// Splits into coefficients of powers of `var`.
    fn coefficients_in(&self, var: usize) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let d = e2[var];
            e2[var] = 0;
            out.entry(d).or_insert_with(|| Poly::zero(self.nvars)).add_term(e2, c.clone());
        }
        out
    }

    fn leading_coefficient_in(&self, var: usize) -> Poly {
        let d = self.degree_in(var);
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] == d {
                let mut e2 = e.clone();
                e2[var] = 0;
                out.add_term(e2, c.clone());
            }
        }
        out
    }

    /// Exact division; `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (lead_e, lead_c) = divisor.leading()?;
        if divisor.len() == 1 {
            if self.terms.keys().any(|e| e.iter().zip(lead_e).any(|(a, b)| a < b)) {
                return None;
            }
            return Some(self.div_monomial(lead_e).scale(&lead_c.recip()));
        }
        let lead_e = lead_e.clone();
        let inv = lead_c.recip();
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        while let Some((re, rc)) = rem.leading() {
            if re.iter().zip(&lead_e).any(|(a, b)| a < b) {
                return None;
            }
            let te: Exps = re.iter().zip(&lead_e).map(|(a, b)| a - b).collect();
            let tc = rc * &inv;
            rem = rem.sub(&divisor.mul_monomial(&te, &tc));
            quot.add_term(te, tc);
        }
        Some(quot)
    }

    /// Pseudo-remainder of `self` by `b`, viewed as univariate in `var`.
    fn pseudo_remainder(&self, b: &Poly, var: usize) -> Poly {
        let db = b.degree_in(var);
        let lcb = b.leading_coefficient_in(var);
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in(var) >= db {
            let dr = r.degree_in(var);
            let lcr = r.leading_coefficient_in(var);
            let mut shift = vec![0; self.nvars];
            shift[var] = dr - db;
            let t = lcr.mul_monomial(&shift, &BigRational::one());
            r = lcb.mul(&r).sub(&t.mul(b));
            r = r.monic();
        }
        r
    }

    /// Gcd of the coefficients with respect to `var`.
    fn content_in(&self, var: usize) -> Poly {
        let mut acc: Option<Poly> = None;
        for c in self.coefficients_in(var).into_values() {
            acc = Some(match acc {
                None => c.monic(),
                Some(a) => gcd(&a, &c),
            });
            if acc.as_ref().is_some_and(|a| a.is_one()) {
                break;
            }
        }
        acc.unwrap_or_else(|| Poly::zero(self.nvars))
    }

    fn primitive_part_in(&self, var: usize) -> Poly {
        let c = self.content_in(var);
        self.div_exact(&c).expect("content divides").monic()
    }
}

/// Monic greatest common divisor over Q.
pub(crate) fn gcd(a: &Poly, b: &Poly) -> Poly {
    gcd_with(a, b, true)
}

fn gcd_with(a: &Poly, b: &Poly, heuristic: bool) -> Poly {
    let n = a.nvars;
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one(n);
    }
    let ma = a.min_exps();
    let mb = b.min_exps();
    let mg: Exps = ma.iter().zip(&mb).map(|(x, y)| *x.min(y)).collect();
    if a.len() == 1 || b.len() == 1 {
        return Poly::monomial(mg, BigRational::one());
    }
    let a = a.div_monomial(&ma);
    let b = b.div_monomial(&mb);
    let vars: Vec<usize> = (0..n).collect();
    if heuristic {
        if let Some(h) = heuristic_gcd(&integer_form(&a), &integer_form(&b), &vars) {
            return h.mul_monomial(&mg, &BigRational::one()).monic();
        }
    }
    let var = (0..n)
        .find(|&v| a.degree_in(v) > 0 || b.degree_in(v) > 0)
        .expect("nonconstant after monomial removal");
    let da = a.degree_in(var);
    let db = b.degree_in(var);
    let g = if db == 0 {
        gcd(&a.content_in(var), &b)
    } else if da == 0 {
        gcd(&a, &b.content_in(var))
    } else {
        let c = gcd(&a.content_in(var), &b.content_in(var));
        let pa = a.primitive_part_in(var);
        let pb = b.primitive_part_in(var);
        c.mul(&primitive_prs(pa, pb, var))
    };
    g.mul_monomial(&mg, &BigRational::one()).monic()
}

fn primitive_prs(a: Poly, b: Poly, var: usize) -> Poly {
    let (mut a, mut b) = if a.degree_in(var) >= b.degree_in(var) { (a, b) } else { (b, a) };
    loop {
        let r = a.pseudo_remainder(&b, var);
        if r.is_zero() {
            return b.primitive_part_in(var);
        }
        if r.degree_in(var) == 0 {
            return Poly::one(a.nvars);
        }
        a = b;
        b = r.primitive_part_in(var);
    }
}

/// The polynomial scaled to coprime integer coefficients.
fn integer_form(p: &Poly) -> Poly {
    let lcm = p.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let scale = BigRational::from_integer(lcm);
    let scaled = p.scale(&scale);
    let content = integer_content(&scaled);
    scaled.scale(&BigRational::from_integer(content).recip())
}

fn integer_content(p: &Poly) -> BigInt {
    p.terms.values().fold(BigInt::zero(), |acc, c| acc.gcd(c.numer()))
}

fn max_norm(p: &Poly) -> BigInt {
    p.terms.values().map(|c| c.numer().abs()).max().unwrap_or_else(BigInt::zero)
}

/// Substitutes the integer `xi` for `var`.
fn evaluate_at(p: &Poly, var: usize, xi: &BigInt) -> Poly {
    let mut powers = vec![BigInt::one()];
    let mut out = Poly::zero(p.nvars);
    for (e, c) in &p.terms {
        let d = e[var] as usize;
        while powers.len() <= d {
            let next = powers.last().expect("nonempty") * xi;
            powers.push(next);
        }
        let mut e2 = e.clone();
        e2[var] = 0;
        out.add_term(e2, c * BigRational::from_integer(powers[d].clone()));
    }
    out
}

/// Reads integer coefficients as balanced base-`xi` digits in `var`.
fn xi_adic(h: &Poly, var: usize, xi: &BigInt) -> Poly {
    let half = xi / 2;
    let step = BigRational::from_integer(xi.clone()).recip();
    let mut rest = h.clone();
    let mut out = Poly::zero(h.nvars);
    let mut k = 0;
    while !rest.is_zero() {
        let mut digit = Poly::zero(h.nvars);
        for (e, c) in &rest.terms {
            let mut r = c.numer().mod_floor(xi);
            if r > half {
                r -= xi;
            }
            if !r.is_zero() {
                digit.add_term(e.clone(), BigRational::from_integer(r));
            }
        }
        rest = rest.sub(&digit).scale(&step);
        for (e, c) in digit.terms {
            let mut e2 = e;
            e2[var] += k;
            out.add_term(e2, c);
        }
        k += 1;
    }
    out
}

/// Gcd over Z by evaluation at a large integer and balanced digit
/// reconstruction, recursing over `vars`. A candidate is accepted only when
/// it divides both inputs and the evaluation point is above
/// `2 min(|a|, |b|) + 2`, which makes it the gcd. `None` means fall back.
fn heuristic_gcd(a: &Poly, b: &Poly, vars: &[usize]) -> Option<Poly> {
    let n = a.nvars;
    let (ca, cb) = (integer_content(a), integer_content(b));
    let content = ca.gcd(&cb);
    let as_rational = |c: &BigInt| BigRational::from_integer(c.clone());
    let (a, b) = (a.scale(&as_rational(&ca).recip()), b.scale(&as_rational(&cb).recip()));
    let Some(pos) = vars.iter().position(|&v| a.degree_in(v) > 0 || b.degree_in(v) > 0) else {
        return Some(Poly::constant(n, as_rational(&content)));
    };
    let var = vars[pos];
    let rest = &vars[pos + 1..];
    let mut xi = max_norm(&a).min(max_norm(&b)) * 2 + 2;
    for _ in 0..6 {
        let (fa, fb) = (evaluate_at(&a, var, &xi), evaluate_at(&b, var, &xi));
        if !fa.is_zero() && !fb.is_zero() {
            if let Some(g) = heuristic_gcd(&fa, &fb, rest) {
                let h = xi_adic(&g, var, &xi);
                if !h.is_zero() {
                    let h = integer_form(&h);
                    if a.div_exact(&h).is_some() && b.div_exact(&h).is_some() {
                        return Some(h.scale(&as_rational(&content)));
                    }
                }
            }
        }
        xi = &xi * 73794 * xi.sqrt().sqrt() / 27011 + 1;
    }
    None
}

#[allow(dead_code)]
pub(crate) fn max_abs_coefficient(p: &Poly) -> BigRational {
    p.terms.values().map(|c| c.abs()).max().unwrap_or_else(BigRational::zero)
}
