//! Levi-Civita connection, covariant derivatives and curvature.
//!
//! Index layout, used everywhere in the crate:
//!
//! * `Γ^k_{ij}` is stored as a `(1,2)` field `[k, i, j]` with
//!   `∇_{∂ᵢ}∂ⱼ = Γ^k_{ij}∂_k`.
//! * `R^l_{ijk}` is stored as `[l, i, j, k]`, the `∂_l` component of
//!   `R(∂ᵢ,∂ⱼ)∂ₖ`, with `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]}Z`.
//! * `Ric(Y,Z) = tr(X ↦ R(X,Y)Z)`, i.e. `Ric_{jk} = R^i_{ijk}`.
//! * A covariant derivative adds its differentiation index as the first lower
//!   slot: `(∇T)[a.., c, b..] = (∇_c T)[a.., b..]`.
//!
//! With these conventions a space form of curvature `K` has
//! `R(X,Y)Z = K(g(Y,Z)X − g(X,Z)Y)` and `Ric = K(dim − 1)g`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::ScalarExpr;
use crate::tensor::{differential, lie_bracket, lower_index, raise_index, same_chart, Chart, MetricField, TensorField};

#[derive(Clone, Debug)]
pub struct Connection {
    christoffel: TensorField,
    metric: Arc<MetricField>,
}

impl Connection {
    pub fn chart(&self) -> &Arc<Chart> {
        self.christoffel.chart()
    }

    pub fn christoffel(&self) -> &TensorField {
        &self.christoffel
    }

    pub fn symbol(&self, k: usize, i: usize, j: usize) -> &ScalarExpr {
        self.christoffel.get(&[k, i, j])
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    /// `∇_X Y` for vector fields.
    pub fn along(&self, x: &TensorField, y: &TensorField) -> Result<TensorField> {
        let dy = covariant_derivative(y, self)?;
        dy.feed_vector(0, x)
    }
}

/// Christoffel symbols of the second kind from the Koszul formula
/// `Γ^k_{ij} = ½ g^{kl}(∂ᵢg_{jl} + ∂ⱼg_{il} − ∂_l g_{ij})`.
pub fn christoffel(g: &MetricField) -> Result<Connection> {
    let chart = g.chart().clone();
    let n = chart.dimension();
    // dg[l][i][j] = ∂_l g_ij
    let dg: Vec<Vec<Vec<ScalarExpr>>> = (0..n)
        .map(|l| (0..n).map(|i| (0..n).map(|j| g.component(i, j).derivative(l)).collect()).collect())
        .collect();
    let half = ScalarExpr::rational(n, 1, 2);
    // first kind: [ij, l]
    let first: Vec<Vec<Vec<ScalarExpr>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|l| &(&(&dg[i][j][l] + &dg[j][i][l]) - &dg[l][i][j]) * &half).collect())
                .collect()
        })
        .collect();
    let christoffel = TensorField::from_fn(&chart, 1, 2, |idx| {
        let (k, i, j) = (idx[0], idx[1], idx[2]);
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let mut acc = chart.zero();
        for l in 0..n {
            let gi = g.inverse_component(k, l);
            if gi.is_zero() || first[i][j][l].is_zero() {
                continue;
            }
            acc = &acc + &(gi * &first[i][j][l]);
        }
        acc
    });
    Ok(Connection { christoffel, metric: Arc::new(g.clone()) })
}

/// `∇T`, with the differentiation index as the first lower slot.
pub fn covariant_derivative(t: &TensorField, conn: &Connection) -> Result<TensorField> {
    same_chart(t.chart(), conn.chart())?;
    let n = t.dimension();
    let (p, q) = (t.upper_rank(), t.lower_rank());
    Ok(TensorField::from_fn(t.chart(), p, q + 1, |idx| {
        let c = idx[p];
        let mut base: Vec<usize> = idx[..p].to_vec();
        base.extend_from_slice(&idx[p + 1..]);
        let mut acc = t.get(&base).derivative(c);
        let mut j = base.clone();
        for k in 0..p {
            let a = base[k];
            for m in 0..n {
                let gamma = conn.symbol(a, c, m);
                if gamma.is_zero() {
                    continue;
                }
                j[k] = m;
                acc = &acc + &(gamma * t.get(&j));
            }
            j[k] = base[k];
        }
        for k in 0..q {
            let b = base[p + k];
            for m in 0..n {
                let gamma = conn.symbol(m, c, b);
                if gamma.is_zero() {
                    continue;
                }
                j[p + k] = m;
                acc = &acc - &(gamma * t.get(&j));
            }
            j[p + k] = base[p + k];
        }
        acc
    }))
}

/// Riemann, Ricci, Ricci operator and scalar curvature of a connection.
#[derive(Clone, Debug)]
pub struct CurvatureBundle {
    pub riemann: TensorField,
    pub ricci: TensorField,
    pub ricci_operator: TensorField,
    pub scalar: ScalarExpr,
}

impl CurvatureBundle {
    /// `R(X,Y)Z` as a vector field.
    pub fn apply(&self, x: &TensorField, y: &TensorField, z: &TensorField) -> Result<TensorField> {
        self.riemann.apply(&[x, y, z])
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.riemann.chart()
    }
}

pub fn riemann(conn: &Connection) -> Result<CurvatureBundle> {
    let chart = conn.chart().clone();
    let n = chart.dimension();
    // dgamma[i][l][j][k] = ∂_i Γ^l_{jk}
    let dgamma: Vec<TensorField> = (0..n).map(|i| conn.christoffel.map(|c| c.derivative(i))).collect();
    let riemann = TensorField::from_fn(&chart, 1, 3, |idx| {
        let (l, i, j, k) = (idx[0], idx[1], idx[2], idx[3]);
        if i == j {
            return chart.zero();
        }
        let mut acc = dgamma[i].get(&[l, j, k]) - dgamma[j].get(&[l, i, k]);
        for m in 0..n {
            let a = conn.symbol(l, i, m);
            if !a.is_zero() {
                let b = conn.symbol(m, j, k);
                if !b.is_zero() {
                    acc = &acc + &(a * b);
                }
            }
            let a = conn.symbol(l, j, m);
            if !a.is_zero() {
                let b = conn.symbol(m, i, k);
                if !b.is_zero() {
                    acc = &acc - &(a * b);
                }
            }
        }
        acc
    });
    let ricci = riemann.contract(0, 0)?;
    let ricci_operator = raise_index(&ricci, 0, conn.metric())?;
    let scalar = ricci_operator.contract(0, 0)?.as_scalar().cloned().expect("rank 0");
    Ok(CurvatureBundle { riemann, ricci, ricci_operator, scalar })
}

/// `K(X,Y) = g(R(X,Y)Y, X) / (g(X,X)g(Y,Y) − g(X,Y)²)`.
pub fn sectional_curvature(
    x: &TensorField,
    y: &TensorField,
    bundle: &CurvatureBundle,
    g: &MetricField,
) -> Result<ScalarExpr> {
    let gxx = g.inner(x, x)?;
    let gyy = g.inner(y, y)?;
    let gxy = g.inner(x, y)?;
    let area = &(&gxx * &gyy) - &(&gxy * &gxy);
    if area.is_zero() {
        return Err(Error::DegeneratePlane);
    }
    let rxyy = bundle.apply(x, y, y)?;
    let num = g.inner(&rxyy, x)?;
    Ok(num.checked_div(&area)?)
}

/// `Hess f(X,Y) = XY f − (∇_X Y) f`.
pub fn hessian(f: &ScalarExpr, conn: &Connection) -> Result<TensorField> {
    let chart = conn.chart();
    if f.nvars() != chart.dimension() {
        return Err(Error::ChartMismatch);
    }
    let n = chart.dimension();
    let df: Vec<ScalarExpr> = (0..n).map(|k| f.derivative(k)).collect();
    Ok(TensorField::from_fn(chart, 0, 2, |idx| {
        let (i, j) = (idx[0], idx[1]);
        let mut acc = df[j].derivative(i);
        for (k, dk) in df.iter().enumerate() {
            let gamma = conn.symbol(k, i, j);
            if !gamma.is_zero() && !dk.is_zero() {
                acc = &acc - &(gamma * dk);
            }
        }
        acc
    }))
}

/// `(L_V∇)^k_{ij} = ∂ᵢ∂ⱼV^k + V^m∂_mΓ^k_{ij} − Γ^m_{ij}∂_mV^k + Γ^k_{mj}∂ᵢV^m + Γ^k_{im}∂ⱼV^m`,
/// the tensor `(X,Y) ↦ L_V∇_X Y − ∇_X L_V Y − ∇_{[V,X]}Y`.
pub fn lie_derivative_connection(v: &TensorField, conn: &Connection) -> Result<TensorField> {
    v.expect_rank(1, 0)?;
    same_chart(v.chart(), conn.chart())?;
    let chart = conn.chart();
    let n = chart.dimension();
    let dv: Vec<Vec<ScalarExpr>> = (0..n).map(|m| (0..n).map(|a| v.get(&[a]).derivative(m)).collect()).collect();
    Ok(TensorField::from_fn(chart, 1, 2, |idx| {
        let (k, i, j) = (idx[0], idx[1], idx[2]);
        let mut acc = dv[j][k].derivative(i);
        let gamma = conn.symbol(k, i, j);
        for m in 0..n {
            let vm = v.get(&[m]);
            if !vm.is_zero() && !gamma.is_zero() {
                acc = &acc + &(vm * &gamma.derivative(m));
            }
            let g1 = conn.symbol(m, i, j);
            if !g1.is_zero() && !dv[m][k].is_zero() {
                acc = &acc - &(g1 * &dv[m][k]);
            }
            let g2 = conn.symbol(k, m, j);
            if !g2.is_zero() && !dv[i][m].is_zero() {
                acc = &acc + &(g2 * &dv[i][m]);
            }
            let g3 = conn.symbol(k, i, m);
            if !g3.is_zero() && !dv[j][m].is_zero() {
                acc = &acc + &(g3 * &dv[j][m]);
            }
        }
        acc
    }))
}

/// Result of [`lie_derivative_curvature`].
#[derive(Clone, Debug)]
pub struct CurvatureLieDerivative {
    /// `L_V R` in the Riemann index layout.
    pub tensor: TensorField,
    /// `L_V R − [(∇_X L_V∇)(Y,Z) − (∇_Y L_V∇)(X,Z)]`, when requested.
    pub cross_check_residual: Option<TensorField>,
}

pub fn lie_derivative_curvature(
    v: &TensorField,
    bundle: &CurvatureBundle,
    conn: &Connection,
    cross_check: bool,
) -> Result<CurvatureLieDerivative> {
    let tensor = crate::tensor::lie_derivative(&bundle.riemann, v)?;
    let cross_check_residual = if cross_check {
        let lvc = lie_derivative_connection(v, conn)?;
        // d[l, c, i, j] = (∇_c L_V∇)^l_{ij}
        let d = covariant_derivative(&lvc, conn)?;
        let rhs = TensorField::from_fn(conn.chart(), 1, 3, |idx| {
            let (l, i, j, k) = (idx[0], idx[1], idx[2], idx[3]);
            d.get(&[l, i, j, k]) - d.get(&[l, j, i, k])
        });
        Some(tensor.sub(&rhs)?)
    } else {
        None
    };
    Ok(CurvatureLieDerivative { tensor, cross_check_residual })
}

/// `[X, Y]` through the connection: `∇_X Y − ∇_Y X`; equal to the Lie bracket
/// for a torsion-free connection.
pub fn torsion_free_bracket(conn: &Connection, x: &TensorField, y: &TensorField) -> Result<TensorField> {
    conn.along(x, y)?.sub(&conn.along(y, x)?)
}

/// Torsion `T(X,Y) = ∇_X Y − ∇_Y X − [X,Y]` evaluated on coordinate fields.
pub fn torsion(conn: &Connection) -> Result<TensorField> {
    let chart = conn.chart();
    let n = chart.dimension();
    let mut out = TensorField::zeros(chart, 1, 2);
    for i in 0..n {
        for j in 0..n {
            let xi = TensorField::coordinate_vector(chart, i);
            let xj = TensorField::coordinate_vector(chart, j);
            let t = torsion_free_bracket(conn, &xi, &xj)?.sub(&lie_bracket(&xi, &xj)?)?;
            for k in 0..n {
                out.set(&[k, i, j], t.get(&[k]).clone());
            }
        }
    }
    Ok(out)
}

/// `R(X,Y)Z + R(Y,X)Z`.
pub fn antisymmetry_residual(bundle: &CurvatureBundle) -> TensorField {
    let r = &bundle.riemann;
    TensorField::from_fn(r.chart(), 1, 3, |i| r.get(i) + r.get(&[i[0], i[2], i[1], i[3]]))
}

/// `R(X,Y)Z + R(Y,Z)X + R(Z,X)Y`.
pub fn bianchi_residual(bundle: &CurvatureBundle) -> TensorField {
    let r = &bundle.riemann;
    TensorField::from_fn(r.chart(), 1, 3, |i| {
        let (l, a, b, c) = (i[0], i[1], i[2], i[3]);
        &(r.get(&[l, a, b, c]) + r.get(&[l, b, c, a])) + r.get(&[l, c, a, b])
    })
}

/// `Ric(X,Y) − Ric(Y,X)`.
pub fn ricci_symmetry_residual(bundle: &CurvatureBundle) -> TensorField {
    let ric = &bundle.ricci;
    TensorField::from_fn(ric.chart(), 0, 2, |i| ric.get(i) - ric.get(&[i[1], i[0]]))
}

/// `g(QX,Y) − g(X,QY)`.
pub fn ricci_operator_self_adjoint_residual(bundle: &CurvatureBundle, g: &MetricField) -> Result<TensorField> {
    // lowered[m, k] = g_{ma} Q^a_k = g(Q∂k, ∂m)
    let lowered = lower_index(&bundle.ricci_operator, 0, g)?;
    Ok(TensorField::from_fn(lowered.chart(), 0, 2, |i| lowered.get(&[i[1], i[0]]) - lowered.get(i)))
}

/// `trace{X ↦ (∇_X Q)Y} − ½Y(r)` as a one-form in `Y`.
pub fn trace_identity_residual(bundle: &CurvatureBundle, conn: &Connection) -> Result<TensorField> {
    let dq = covariant_derivative(&bundle.ricci_operator, conn)?;
    let trace = dq.contract(0, 0)?;
    let half = ScalarExpr::rational(conn.chart().dimension(), 1, 2);
    let dr = differential(conn.chart(), &bundle.scalar).scale(&half);
    trace.sub(&dr)
}

/// `(∇_Z L_V g)(X,Y) − g((L_V∇)(Z,X),Y) − g((L_V∇)(Z,Y),X)`, indexed `[Z, X, Y]`.
pub fn commutation_residual(v: &TensorField, conn: &Connection) -> Result<TensorField> {
    let g = conn.metric();
    let lvg = crate::tensor::lie_derivative(g.tensor(), v)?;
    let d = covariant_derivative(&lvg, conn)?;
    // low[m, i, j] = g_{mk}(L_V∇)^k_{ij}
    let low = lower_index(&lie_derivative_connection(v, conn)?, 0, g)?;
    Ok(TensorField::from_fn(conn.chart(), 0, 3, |i| {
        let (z, x, y) = (i[0], i[1], i[2]);
        &(d.get(i) - low.get(&[y, z, x])) - low.get(&[x, z, y])
    }))
}
