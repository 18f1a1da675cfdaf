//! Charts, tensor fields in the coordinate basis, and metric bookkeeping.
//!
//! A rank `(p, q)` field stores `dim^(p+q)` components, upper indices first,
//! row-major. Component `[a₁..a_p, b₁..b_q]` is the coefficient of
//! `∂_{a₁}⊗…⊗dx^{b₁}⊗…`.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::kernel::{EvalMode, ExprContext, ScalarExpr};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    context: ExprContext,
}

impl Chart {
    pub fn new(context: ExprContext) -> Arc<Chart> {
        Arc::new(Chart { context })
    }

    pub fn from_coordinates<S: AsRef<str>>(coordinates: &[S]) -> Result<Arc<Chart>> {
        Ok(Chart::new(ExprContext::new(coordinates)?))
    }

    pub fn context(&self) -> &ExprContext {
        &self.context
    }

    pub fn dimension(&self) -> usize {
        self.context.dimension()
    }

    pub fn coordinates(&self) -> &[String] {
        self.context.coordinates()
    }

    pub fn parse(&self, text: &str) -> Result<ScalarExpr> {
        Ok(self.context.parse(text)?)
    }

    pub fn zero(&self) -> ScalarExpr {
        self.context.zero()
    }

    pub fn constant(&self, c: i64) -> ScalarExpr {
        self.context.integer(c)
    }
}

pub(crate) fn same_chart(a: &Arc<Chart>, b: &Arc<Chart>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::ChartMismatch)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TensorField {
    chart: Arc<Chart>,
    upper: usize,
    lower: usize,
    components: Vec<ScalarExpr>,
}

/// All index tuples of length `rank` over `0..dim`, in storage order.
pub fn index_tuples(dim: usize, rank: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = dim.pow(rank as u32);
    (0..total).map(move |mut flat| {
        let mut idx = vec![0; rank];
        for slot in (0..rank).rev() {
            idx[slot] = flat % dim;
            flat /= dim;
        }
        idx
    })
}

impl TensorField {
    pub fn new(chart: &Arc<Chart>, upper: usize, lower: usize, components: Vec<ScalarExpr>) -> Result<Self> {
        let want = chart.dimension().pow((upper + lower) as u32);
        if components.len() != want {
            return Err(Error::ComponentCount { want, got: components.len() });
        }
        Ok(TensorField { chart: chart.clone(), upper, lower, components })
    }

    pub fn zeros(chart: &Arc<Chart>, upper: usize, lower: usize) -> Self {
        let n = chart.dimension().pow((upper + lower) as u32);
        TensorField { chart: chart.clone(), upper, lower, components: vec![chart.zero(); n] }
    }

    pub fn from_fn(
        chart: &Arc<Chart>,
        upper: usize,
        lower: usize,
        f: impl Fn(&[usize]) -> ScalarExpr,
    ) -> Self {
        let components = index_tuples(chart.dimension(), upper + lower).map(|idx| f(&idx)).collect();
        TensorField { chart: chart.clone(), upper, lower, components }
    }

    pub fn scalar(chart: &Arc<Chart>, value: ScalarExpr) -> Self {
        TensorField { chart: chart.clone(), upper: 0, lower: 0, components: vec![value] }
    }

    pub fn vector(chart: &Arc<Chart>, components: Vec<ScalarExpr>) -> Result<Self> {
        TensorField::new(chart, 1, 0, components)
    }

    pub fn covector(chart: &Arc<Chart>, components: Vec<ScalarExpr>) -> Result<Self> {
        TensorField::new(chart, 0, 1, components)
    }

    /// The coordinate field `∂_i`.
    pub fn coordinate_vector(chart: &Arc<Chart>, i: usize) -> Self {
        TensorField::from_fn(chart, 1, 0, |idx| if idx[0] == i { chart.constant(1) } else { chart.zero() })
    }

    /// The differential `dx^i`.
    pub fn coordinate_covector(chart: &Arc<Chart>, i: usize) -> Self {
        TensorField::from_fn(chart, 0, 1, |idx| if idx[0] == i { chart.constant(1) } else { chart.zero() })
    }

    /// The identity endomorphism `δ^i_j`.
    pub fn identity(chart: &Arc<Chart>) -> Self {
        TensorField::from_fn(chart, 1, 1, |idx| if idx[0] == idx[1] { chart.constant(1) } else { chart.zero() })
    }

    /// The flat metric `δ_ij`.
    pub fn identity_form(chart: &Arc<Chart>) -> Self {
        TensorField::from_fn(chart, 0, 2, |idx| if idx[0] == idx[1] { chart.constant(1) } else { chart.zero() })
    }

    /// Rank-2 tensor from a row-major matrix of components.
    pub fn from_matrix(chart: &Arc<Chart>, upper: usize, lower: usize, rows: Vec<Vec<ScalarExpr>>) -> Result<Self> {
        if upper + lower != 2 {
            return Err(Error::Invalid("from_matrix needs total rank 2".into()));
        }
        let n = chart.dimension();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::ComponentCount { want: n * n, got: rows.iter().map(Vec::len).sum() });
        }
        TensorField::new(chart, upper, lower, rows.into_iter().flatten().collect())
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dimension(&self) -> usize {
        self.chart.dimension()
    }

    pub fn upper_rank(&self) -> usize {
        self.upper
    }

    pub fn lower_rank(&self) -> usize {
        self.lower
    }

    pub fn rank(&self) -> usize {
        self.upper + self.lower
    }

    pub fn components(&self) -> &[ScalarExpr] {
        &self.components
    }

    fn flat(&self, idx: &[usize]) -> usize {
        let n = self.dimension();
        debug_assert_eq!(idx.len(), self.rank());
        idx.iter().fold(0, |acc, &i| acc * n + i)
    }

    pub fn get(&self, idx: &[usize]) -> &ScalarExpr {
        &self.components[self.flat(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: ScalarExpr) {
        let f = self.flat(idx);
        self.components[f] = value;
    }

    pub fn expect_rank(&self, upper: usize, lower: usize) -> Result<()> {
        if self.upper == upper && self.lower == lower {
            Ok(())
        } else {
            Err(Error::RankMismatch { want_upper: upper, want_lower: lower, upper: self.upper, lower: self.lower })
        }
    }

    /// Value of a rank-0 field.
    pub fn as_scalar(&self) -> Option<&ScalarExpr> {
        (self.rank() == 0).then(|| &self.components[0])
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(ScalarExpr::is_zero)
    }

    /// First nonzero component in storage order.
    pub fn first_nonzero(&self) -> Option<(Vec<usize>, &ScalarExpr)> {
        let n = self.dimension();
        self.components.iter().enumerate().find(|(_, c)| !c.is_zero()).map(|(flat, c)| {
            let mut idx = vec![0; self.rank()];
            let mut f = flat;
            for slot in (0..self.rank()).rev() {
                idx[slot] = f % n;
                f /= n;
            }
            (idx, c)
        })
    }

    fn check_same_shape(&self, other: &TensorField) -> Result<()> {
        same_chart(&self.chart, &other.chart)?;
        other.expect_rank(self.upper, self.lower)
    }

    pub fn add(&self, other: &TensorField) -> Result<TensorField> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &TensorField) -> Result<TensorField> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &TensorField, f: impl Fn(&ScalarExpr, &ScalarExpr) -> ScalarExpr) -> TensorField {
        TensorField {
            chart: self.chart.clone(),
            upper: self.upper,
            lower: self.lower,
            components: self.components.iter().zip(&other.components).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&ScalarExpr) -> ScalarExpr) -> TensorField {
        TensorField {
            chart: self.chart.clone(),
            upper: self.upper,
            lower: self.lower,
            components: self.components.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, s: &ScalarExpr) -> TensorField {
        self.map(|c| c * s)
    }

    pub fn neg(&self) -> TensorField {
        self.map(|c| -c)
    }

    /// Outer product; upper indices of `self` then `other`, likewise lower.
    pub fn tensor_product(&self, other: &TensorField) -> Result<TensorField> {
        same_chart(&self.chart, &other.chart)?;
        let (pu, pl) = (self.upper, self.lower);
        let (qu, ql) = (other.upper, other.lower);
        Ok(TensorField::from_fn(&self.chart, pu + qu, pl + ql, |idx| {
            let mut a = idx[..pu].to_vec();
            a.extend_from_slice(&idx[pu + qu..pu + qu + pl]);
            let mut b = idx[pu..pu + qu].to_vec();
            b.extend_from_slice(&idx[pu + qu + pl..]);
            let x = self.get(&a);
            if x.is_zero() {
                return self.chart.zero();
            }
            x * other.get(&b)
        }))
    }

    /// Trace over an upper and a lower slot.
    pub fn contract(&self, upper_slot: usize, lower_slot: usize) -> Result<TensorField> {
        if upper_slot >= self.upper {
            return Err(Error::InvalidSlot { slot: upper_slot, upper: self.upper, lower: self.lower });
        }
        if lower_slot >= self.lower {
            return Err(Error::InvalidSlot { slot: lower_slot, upper: self.upper, lower: self.lower });
        }
        let n = self.dimension();
        Ok(TensorField::from_fn(&self.chart, self.upper - 1, self.lower - 1, |idx| {
            let mut acc = self.chart.zero();
            for m in 0..n {
                let full = splice(idx, self.upper - 1, upper_slot, lower_slot, m);
                acc = &acc + self.get(&full);
            }
            acc
        }))
    }

    /// Contracts lower slot `slot` with a vector field.
    pub fn feed_vector(&self, slot: usize, v: &TensorField) -> Result<TensorField> {
        v.expect_rank(1, 0)?;
        same_chart(&self.chart, &v.chart)?;
        if slot >= self.lower {
            return Err(Error::InvalidSlot { slot, upper: self.upper, lower: self.lower });
        }
        let n = self.dimension();
        let pos = self.upper + slot;
        Ok(TensorField::from_fn(&self.chart, self.upper, self.lower - 1, |idx| {
            let mut full = idx.to_vec();
            full.insert(pos, 0);
            let mut acc = self.chart.zero();
            for m in 0..n {
                let vm = v.get(&[m]);
                if vm.is_zero() {
                    continue;
                }
                full[pos] = m;
                acc = &acc + &(self.get(&full) * vm);
            }
            acc
        }))
    }

    /// Contracts upper slot `slot` with a one-form.
    pub fn feed_covector(&self, slot: usize, w: &TensorField) -> Result<TensorField> {
        w.expect_rank(0, 1)?;
        same_chart(&self.chart, &w.chart)?;
        if slot >= self.upper {
            return Err(Error::InvalidSlot { slot, upper: self.upper, lower: self.lower });
        }
        let n = self.dimension();
        Ok(TensorField::from_fn(&self.chart, self.upper - 1, self.lower, |idx| {
            let mut full = idx.to_vec();
            full.insert(slot, 0);
            let mut acc = self.chart.zero();
            for m in 0..n {
                let wm = w.get(&[m]);
                if wm.is_zero() {
                    continue;
                }
                full[slot] = m;
                acc = &acc + &(self.get(&full) * wm);
            }
            acc
        }))
    }

    /// Feeds vectors into the lower slots in order; remaining slots stay open.
    pub fn apply(&self, vectors: &[&TensorField]) -> Result<TensorField> {
        let mut t = self.clone();
        for v in vectors {
            t = t.feed_vector(0, v)?;
        }
        Ok(t)
    }

    /// Swaps two lower slots.
    pub fn swap_lower(&self, a: usize, b: usize) -> Result<TensorField> {
        if a >= self.lower || b >= self.lower {
            return Err(Error::InvalidSlot { slot: a.max(b), upper: self.upper, lower: self.lower });
        }
        let (pa, pb) = (self.upper + a, self.upper + b);
        Ok(TensorField::from_fn(&self.chart, self.upper, self.lower, |idx| {
            let mut j = idx.to_vec();
            j.swap(pa, pb);
            self.get(&j).clone()
        }))
    }

    /// Partial derivative of every component; the new index is prepended to
    /// the lower slots.
    pub fn partial_derivative(&self) -> TensorField {
        let u = self.upper;
        TensorField::from_fn(&self.chart, self.upper, self.lower + 1, |idx| {
            let c = idx[u];
            let mut rest = idx[..u].to_vec();
            rest.extend_from_slice(&idx[u + 1..]);
            self.get(&rest).derivative(c)
        })
    }

    /// Components evaluated at a point.
    pub fn evaluate(&self, point: &[BigRational], mode: EvalMode) -> Result<Vec<BigRational>> {
        self.components.iter().map(|c| Ok(c.evaluate(point, mode)?)).collect()
    }

    /// Matrix view of a rank-2 tensor.
    pub fn as_matrix(&self) -> Result<Vec<Vec<ScalarExpr>>> {
        if self.rank() != 2 {
            return Err(Error::Invalid("matrix view needs total rank 2".into()));
        }
        let n = self.dimension();
        Ok((0..n).map(|i| (0..n).map(|j| self.get(&[i, j]).clone()).collect()).collect())
    }
}

/// Inserts `m` at both contracted positions of a reduced index tuple.
fn splice(idx: &[usize], reduced_upper: usize, upper_slot: usize, lower_slot: usize, m: usize) -> Vec<usize> {
    let mut full = Vec::with_capacity(idx.len() + 2);
    full.extend_from_slice(&idx[..upper_slot]);
    full.push(m);
    full.extend_from_slice(&idx[upper_slot..reduced_upper]);
    let lower = &idx[reduced_upper..];
    full.extend_from_slice(&lower[..lower_slot]);
    full.push(m);
    full.extend_from_slice(&lower[lower_slot..]);
    full
}

/// `[X, Y]^k = Xⁱ∂ᵢY^k − Yⁱ∂ᵢX^k`.
pub fn lie_bracket(x: &TensorField, y: &TensorField) -> Result<TensorField> {
    x.expect_rank(1, 0)?;
    y.expect_rank(1, 0)?;
    same_chart(&x.chart, &y.chart)?;
    let n = x.dimension();
    Ok(TensorField::from_fn(&x.chart, 1, 0, |k| {
        let mut acc = x.chart.zero();
        for i in 0..n {
            let xi = x.get(&[i]);
            if !xi.is_zero() {
                acc = &acc + &(xi * &y.get(k).derivative(i));
            }
            let yi = y.get(&[i]);
            if !yi.is_zero() {
                acc = &acc - &(yi * &x.get(k).derivative(i));
            }
        }
        acc
    }))
}

/// Lie derivative of any tensor field along `v`.
pub fn lie_derivative(t: &TensorField, v: &TensorField) -> Result<TensorField> {
    v.expect_rank(1, 0)?;
    same_chart(&t.chart, &v.chart)?;
    let n = t.dimension();
    let (p, q) = (t.upper, t.lower);
    // dv[m][a] = ∂_m V^a
    let dv: Vec<Vec<ScalarExpr>> = (0..n).map(|m| (0..n).map(|a| v.get(&[a]).derivative(m)).collect()).collect();
    Ok(TensorField::from_fn(&t.chart, p, q, |idx| {
        let mut acc = t.chart.zero();
        let comp = t.get(idx);
        for m in 0..n {
            let vm = v.get(&[m]);
            if !vm.is_zero() && !comp.is_zero() {
                acc = &acc + &(vm * &comp.derivative(m));
            }
        }
        let mut j = idx.to_vec();
        for k in 0..p {
            let a = idx[k];
            for m in 0..n {
                let d = &dv[m][a];
                if d.is_zero() {
                    continue;
                }
                j[k] = m;
                acc = &acc - &(t.get(&j) * d);
            }
            j[k] = idx[k];
        }
        for k in 0..q {
            let b = idx[p + k];
            for m in 0..n {
                let d = &dv[b][m];
                if d.is_zero() {
                    continue;
                }
                j[p + k] = m;
                acc = &acc + &(t.get(&j) * d);
            }
            j[p + k] = idx[p + k];
        }
        acc
    }))
}

/// Directional derivative `V(f)`.
pub fn directional_derivative(f: &ScalarExpr, v: &TensorField) -> Result<ScalarExpr> {
    v.expect_rank(1, 0)?;
    let mut acc = v.chart.zero();
    for m in 0..v.dimension() {
        let vm = v.get(&[m]);
        if !vm.is_zero() {
            acc = &acc + &(vm * &f.derivative(m));
        }
    }
    Ok(acc)
}

/// Gradient covector `df`.
pub fn differential(chart: &Arc<Chart>, f: &ScalarExpr) -> TensorField {
    TensorField::from_fn(chart, 0, 1, |i| f.derivative(i[0]))
}

/// A nonsingular symmetric `(0,2)` field with its inverse and determinant.
#[derive(Clone, Debug)]
pub struct MetricField {
    g: TensorField,
    g_inv: TensorField,
    determinant: ScalarExpr,
}

impl MetricField {
    pub fn new(g: TensorField) -> Result<MetricField> {
        g.expect_rank(0, 2)?;
        let n = g.dimension();
        for i in 0..n {
            for j in i + 1..n {
                if g.get(&[i, j]) != g.get(&[j, i]) {
                    return Err(Error::AsymmetricMetric(i, j));
                }
            }
        }
        let (determinant, inv) = determinant_and_inverse(&g.as_matrix()?)?;
        let g_inv = TensorField::from_matrix(g.chart(), 2, 0, inv)?;
        Ok(MetricField { g, g_inv, determinant })
    }

    /// Builds a metric from upper-triangle rows: `entries[i][k]` is `g[i][i+k]`.
    pub fn from_upper_triangle(chart: &Arc<Chart>, entries: &[Vec<ScalarExpr>]) -> Result<MetricField> {
        let n = chart.dimension();
        if entries.len() != n || entries.iter().enumerate().any(|(i, row)| row.len() != n - i) {
            return Err(Error::ComponentCount { want: n * (n + 1) / 2, got: entries.iter().map(Vec::len).sum() });
        }
        let mut g = TensorField::zeros(chart, 0, 2);
        for (i, row) in entries.iter().enumerate() {
            for (off, e) in row.iter().enumerate() {
                let j = i + off;
                g.set(&[i, j], e.clone());
                g.set(&[j, i], e.clone());
            }
        }
        MetricField::new(g)
    }

    pub fn tensor(&self) -> &TensorField {
        &self.g
    }

    pub fn inverse(&self) -> &TensorField {
        &self.g_inv
    }

    pub fn determinant(&self) -> &ScalarExpr {
        &self.determinant
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.g.chart()
    }

    pub fn component(&self, i: usize, j: usize) -> &ScalarExpr {
        self.g.get(&[i, j])
    }

    pub fn inverse_component(&self, i: usize, j: usize) -> &ScalarExpr {
        self.g_inv.get(&[i, j])
    }

    /// `g(X, Y)` for two vector fields.
    pub fn inner(&self, x: &TensorField, y: &TensorField) -> Result<ScalarExpr> {
        let t = self.g.apply(&[x, y])?;
        Ok(t.as_scalar().cloned().expect("rank 0"))
    }

    /// Sylvester's criterion at each point; `Ok(false)` when some leading
    /// minor is non-positive.
    pub fn is_positive_definite_at(&self, points: &[Vec<BigRational>]) -> Result<bool> {
        let n = self.g.dimension();
        for p in points {
            let vals = self.g.evaluate(p, EvalMode::Approximate { digits: 30 })?;
            for k in 1..=n {
                let minor: Vec<Vec<BigRational>> =
                    (0..k).map(|i| (0..k).map(|j| vals[i * n + j].clone()).collect()).collect();
                if !rational_determinant(minor).is_positive() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// `metric_inverse`: contravariant inverse of a symmetric `(0,2)` field.
pub fn metric_inverse(g: &TensorField) -> Result<TensorField> {
    Ok(MetricField::new(g.clone())?.g_inv)
}

/// Raises lower slot `slot`; the new upper index is appended after the
/// existing upper indices.
pub fn raise_index(t: &TensorField, slot: usize, g: &MetricField) -> Result<TensorField> {
    same_chart(t.chart(), g.chart())?;
    if slot >= t.lower {
        return Err(Error::InvalidSlot { slot, upper: t.upper, lower: t.lower });
    }
    let n = t.dimension();
    let (p, q) = (t.upper, t.lower);
    Ok(TensorField::from_fn(t.chart(), p + 1, q - 1, |idx| {
        let a = idx[p];
        let mut src: Vec<usize> = idx[..p].to_vec();
        let rest = &idx[p + 1..];
        src.extend_from_slice(&rest[..slot]);
        src.push(0);
        src.extend_from_slice(&rest[slot..]);
        let pos = p + slot;
        let mut acc = t.chart().zero();
        for m in 0..n {
            let gi = g.inverse_component(a, m);
            if gi.is_zero() {
                continue;
            }
            src[pos] = m;
            acc = &acc + &(gi * t.get(&src));
        }
        acc
    }))
}

/// Lowers upper slot `slot`; the new lower index is placed before the
/// existing lower indices.
pub fn lower_index(t: &TensorField, slot: usize, g: &MetricField) -> Result<TensorField> {
    same_chart(t.chart(), g.chart())?;
    if slot >= t.upper {
        return Err(Error::InvalidSlot { slot, upper: t.upper, lower: t.lower });
    }
    let n = t.dimension();
    let (p, q) = (t.upper, t.lower);
    Ok(TensorField::from_fn(t.chart(), p - 1, q + 1, |idx| {
        let a = idx[p - 1];
        let mut src: Vec<usize> = idx[..slot].to_vec();
        src.push(0);
        src.extend_from_slice(&idx[slot..p - 1]);
        src.extend_from_slice(&idx[p..]);
        let mut acc = t.chart().zero();
        for m in 0..n {
            let gm = g.component(a, m);
            if gm.is_zero() {
                continue;
            }
            src[slot] = m;
            acc = &acc + &(gm * t.get(&src));
        }
        acc
    }))
}

/// Determinant and inverse by fraction-exact Gauss–Jordan elimination.
pub fn determinant_and_inverse(m: &[Vec<ScalarExpr>]) -> Result<(ScalarExpr, Vec<Vec<ScalarExpr>>)> {
    let n = m.len();
    let nv = m[0][0].nvars();
    let off_diagonal_zero = (0..n).all(|i| (0..n).all(|j| i == j || m[i][j].is_zero()));
    if off_diagonal_zero {
        let mut det = ScalarExpr::one(nv);
        let mut inv = vec![vec![ScalarExpr::zero(nv); n]; n];
        for i in 0..n {
            if m[i][i].is_zero() {
                return Err(Error::SingularMetric);
            }
            det = &det * &m[i][i];
            inv[i][i] = m[i][i].recip()?;
        }
        return Ok((det, inv));
    }
    let mut a: Vec<Vec<ScalarExpr>> = m.to_vec();
    let mut inv: Vec<Vec<ScalarExpr>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { ScalarExpr::one(nv) } else { ScalarExpr::zero(nv) }).collect()).collect();
    let mut det = ScalarExpr::one(nv);
    for col in 0..n {
        // prefer constant pivots, then the smallest expression
        let pivot = (col..n)
            .filter(|&r| !a[r][col].is_zero())
            .min_by_key(|&r| (!a[r][col].is_constant(), a[r][col].term_count()))
            .ok_or(Error::SingularMetric)?;
        if pivot != col {
            a.swap(pivot, col);
            inv.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det = &det * &p;
        let pinv = p.recip()?;
        for j in 0..n {
            a[col][j] = &a[col][j] * &pinv;
            inv[col][j] = &inv[col][j] * &pinv;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let t = &a[col][j] * &f;
                a[r][j] = &a[r][j] - &t;
                let t = &inv[col][j] * &f;
                inv[r][j] = &inv[r][j] - &t;
            }
        }
    }
    Ok((det, inv))
}

/// Solves `M x = b` exactly.
pub fn solve_linear(m: &[Vec<ScalarExpr>], b: &[ScalarExpr]) -> Result<Vec<ScalarExpr>> {
    let (_, inv) = determinant_and_inverse(m)?;
    let nv = b[0].nvars();
    Ok(inv
        .iter()
        .map(|row| row.iter().zip(b).fold(ScalarExpr::zero(nv), |acc, (x, y)| &acc + &(x * y)))
        .collect())
}

pub(crate) fn rational_determinant(mut a: Vec<Vec<BigRational>>) -> BigRational {
    let n = a.len();
    let mut det = BigRational::from_integer(1.into());
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let pv = a[col][col].clone();
        det *= &pv;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &pv;
            for j in col..n {
                let t = &a[col][j] * &f;
                a[r][j] -= t;
            }
        }
    }
    det
}

/// Rank of a rational matrix; entries below `tolerance` in magnitude count as
/// zero (use zero for exact input).
pub(crate) fn rational_rank(mut a: Vec<Vec<BigRational>>, tolerance: &BigRational) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let best = (rank..rows).max_by(|&x, &y| a[x][col].abs().cmp(&a[y][col].abs()));
        let Some(p) = best else { break };
        if a[p][col].abs() <= *tolerance {
            continue;
        }
        a.swap(p, rank);
        let pv = a[rank][col].clone();
        for r in rank + 1..rows {
            let f = &a[r][col] / &pv;
            if f.is_zero() {
                continue;
            }
            for j in col..cols {
                let t = &a[rank][j] * &f;
                a[r][j] -= t;
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::q;

    fn chart5() -> Arc<Chart> {
        Chart::from_coordinates(&["x", "y", "z", "u", "v"]).unwrap()
    }

    fn vector(chart: &Arc<Chart>, comps: &[&str]) -> TensorField {
        TensorField::vector(chart, comps.iter().map(|s| chart.parse(s).unwrap()).collect()).unwrap()
    }

    fn hyperbolic_metric(chart: &Arc<Chart>) -> MetricField {
        let w = chart.parse("1/v^2").unwrap();
        let g = TensorField::from_fn(chart, 0, 2, |i| if i[0] == i[1] { w.clone() } else { chart.zero() });
        MetricField::new(g).unwrap()
    }

    #[test]
    fn inverse_examples() {
        let c3 = Chart::from_coordinates(&["a", "b", "c"]).unwrap();
        let id = TensorField::from_fn(&c3, 0, 2, |i| if i[0] == i[1] { c3.constant(1) } else { c3.zero() });
        let inv = metric_inverse(&id).unwrap();
        assert_eq!(inv.components(), TensorField::from_fn(&c3, 2, 0, |i| id.get(i).clone()).components());

        let c = chart5();
        let g = hyperbolic_metric(&c);
        assert_eq!(g.inverse_component(4, 4), &c.parse("v^2").unwrap());
        assert!(g.inverse_component(0, 1).is_zero());

        let ct = Chart::from_coordinates(&["t", "x", "y"]).unwrap();
        let e = ct.parse("exp(2*t)").unwrap();
        let gw = TensorField::from_fn(&ct, 0, 2, |i| match (i[0], i[1]) {
            (0, 0) => ct.constant(1),
            (a, b) if a == b => e.clone(),
            _ => ct.zero(),
        });
        let m = MetricField::new(gw).unwrap();
        assert_eq!(m.inverse_component(1, 1), &ct.parse("exp(-2*t)").unwrap());
    }

    #[test]
    fn dense_inverse_contracts_to_identity() {
        let c = Chart::from_coordinates(&["x", "y"]).unwrap();
        let rows = vec![
            vec![c.parse("1 + x^2").unwrap(), c.parse("x*y").unwrap()],
            vec![c.parse("x*y").unwrap(), c.parse("1 + y^2").unwrap()],
        ];
        let g = MetricField::new(TensorField::from_matrix(&c, 0, 2, rows).unwrap()).unwrap();
        assert_eq!(g.determinant(), &c.parse("1 + x^2 + y^2").unwrap());
        let prod = g.inverse().tensor_product(g.tensor()).unwrap().contract(1, 0).unwrap();
        assert_eq!(prod, TensorField::identity(&c));
    }

    #[test]
    fn singular_and_asymmetric_metrics_rejected() {
        let c = Chart::from_coordinates(&["x", "y"]).unwrap();
        let x = c.parse("x").unwrap();
        let rows = vec![vec![x.clone(), x.clone()], vec![x.clone(), x.clone()]];
        assert_eq!(MetricField::new(TensorField::from_matrix(&c, 0, 2, rows).unwrap()).unwrap_err(), Error::SingularMetric);
        let rows = vec![vec![c.constant(1), x.clone()], vec![c.zero(), c.constant(1)]];
        assert_eq!(MetricField::new(TensorField::from_matrix(&c, 0, 2, rows).unwrap()).unwrap_err(), Error::AsymmetricMetric(0, 1));
    }

    #[test]
    fn bracket_examples() {
        let c = chart5();
        let dx = TensorField::coordinate_vector(&c, 0);
        let dy = TensorField::coordinate_vector(&c, 1);
        assert!(lie_bracket(&dx, &dy).unwrap().is_zero());
        let e1 = vector(&c, &["v", "0", "0", "0", "0"]);
        let e5 = vector(&c, &["0", "0", "0", "0", "-v"]);
        assert_eq!(lie_bracket(&e1, &e5).unwrap(), e1);
        assert!(lie_bracket(&e1, &e1).unwrap().is_zero());
    }

    #[test]
    fn lie_derivative_of_hyperbolic_metric() {
        let c = chart5();
        let g = hyperbolic_metric(&c);
        let v = vector(&c, &["2*x", "2*y", "2*z", "2*u", "v"]);
        let lvg = lie_derivative(g.tensor(), &v).unwrap();
        let eta = TensorField::covector(&c, vec![c.zero(), c.zero(), c.zero(), c.zero(), c.parse("-1/v").unwrap()]).unwrap();
        let expected = g
            .tensor()
            .scale(&c.constant(2))
            .sub(&eta.tensor_product(&eta).unwrap().scale(&c.constant(2)))
            .unwrap();
        assert_eq!(lvg, expected);

        let flat = TensorField::from_fn(&c, 0, 2, |i| if i[0] == i[1] { c.constant(1) } else { c.zero() });
        assert!(lie_derivative(&flat, &TensorField::coordinate_vector(&c, 0)).unwrap().is_zero());
    }

    #[test]
    fn lie_derivative_matches_bracket_and_directional_derivative() {
        let c = chart5();
        let x = vector(&c, &["x*y", "v^2", "0", "u", "1/v"]);
        let y = vector(&c, &["z", "x", "y*v", "0", "x^2"]);
        assert_eq!(lie_derivative(&y, &x).unwrap(), lie_bracket(&x, &y).unwrap());
        let f = c.parse("x^2*v - y/v").unwrap();
        let lf = lie_derivative(&TensorField::scalar(&c, f.clone()), &x).unwrap();
        assert_eq!(lf.as_scalar().unwrap(), &directional_derivative(&f, &x).unwrap());
    }

    #[test]
    fn raise_lower_examples() {
        let c = chart5();
        let g = hyperbolic_metric(&c);
        let eta = TensorField::covector(&c, vec![c.zero(), c.zero(), c.zero(), c.zero(), c.parse("-1/v").unwrap()]).unwrap();
        let xi = raise_index(&eta, 0, &g).unwrap();
        assert_eq!(xi, vector(&c, &["0", "0", "0", "0", "-v"]));

        let q4 = TensorField::identity(&c).scale(&c.constant(-4));
        let ric = lower_index(&q4, 0, &g).unwrap();
        assert_eq!(ric, g.tensor().scale(&c.constant(-4)));

        let t = TensorField::from_fn(&c, 1, 2, |i| c.parse(&format!("x^{}*v - {}", i[0], i[1] + 2 * i[2])).unwrap());
        let back = lower_index(&raise_index(&t, 0, &g).unwrap(), 1, &g).unwrap();
        // raising lower slot 0 then lowering the new (last) upper slot restores it
        assert_eq!(back, t);
        assert!(matches!(raise_index(&t, 2, &g), Err(Error::InvalidSlot { .. })));
    }

    #[test]
    fn contraction_examples() {
        let c = chart5();
        let id = TensorField::identity(&c);
        assert_eq!(id.contract(0, 0).unwrap().as_scalar().unwrap(), &c.constant(5));
        let q4 = id.scale(&c.constant(-4));
        assert_eq!(q4.contract(0, 0).unwrap().as_scalar().unwrap(), &c.constant(-20));
        let eta = TensorField::covector(&c, vec![c.zero(), c.zero(), c.zero(), c.zero(), c.parse("-1/v").unwrap()]).unwrap();
        let xi = vector(&c, &["0", "0", "0", "0", "-v"]);
        let ex = xi.tensor_product(&eta).unwrap();
        assert!(ex.contract(0, 0).unwrap().as_scalar().unwrap().is_one());
        assert!(matches!(ex.contract(1, 0), Err(Error::InvalidSlot { .. })));
    }

    #[test]
    fn sylvester_check() {
        let c = chart5();
        let g = hyperbolic_metric(&c);
        let p = vec![q(1, 1), q(0, 1), q(2, 1), q(1, 3), q(3, 2)];
        assert!(g.is_positive_definite_at(&[p]).unwrap());
        let cl = Chart::from_coordinates(&["t", "x"]).unwrap();
        let rows = vec![vec![cl.constant(-1), cl.zero()], vec![cl.zero(), cl.constant(1)]];
        let lor = MetricField::new(TensorField::from_matrix(&cl, 0, 2, rows).unwrap()).unwrap();
        assert!(!lor.is_positive_definite_at(&[vec![q(0, 1), q(0, 1)]]).unwrap());
    }

    #[test]
    fn rank_of_rational_matrices() {
        let m = vec![vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(4, 1)]];
        assert_eq!(rational_rank(m, &BigRational::zero()), 1);
        let m = vec![vec![q(0, 1), q(-1, 1)], vec![q(1, 1), q(0, 1)]];
        assert_eq!(rational_rank(m, &BigRational::zero()), 2);
    }
}
