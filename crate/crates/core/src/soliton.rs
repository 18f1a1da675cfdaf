//! η-Ricci solitons `½L_V g + Ric + λg + μη⊗η = 0`, their gradient form
//! `Hess f + Ric + λg + μη⊗η = 0`, and the auxiliary characterizations.

use crate::contact::{constant_curvature_tensor, AlmostContactStructure};
use crate::curvature::{hessian, lie_derivative_connection, lie_derivative_curvature, Connection, CurvatureBundle};
use crate::error::{Error, Result};
use crate::kernel::ScalarExpr;
use crate::tensor::{differential, directional_derivative, lie_derivative, raise_index, same_chart, MetricField, TensorField};
use crate::verdict::{Classification, VerdictReport};

#[derive(Clone, Debug, PartialEq)]
pub enum Potential {
    Vector(TensorField),
    /// Potential function; the vector field is its metric gradient.
    Function(ScalarExpr),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolitonMode {
    /// Constant `λ`, `μ`.
    EtaSoliton,
    /// Potential function with `Hess f` in place of `½L_V g`.
    Gradient,
    /// `λ`, `μ` may be functions.
    Almost,
}

impl SolitonMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SolitonMode::EtaSoliton => "eta_soliton",
            SolitonMode::Gradient => "gradient",
            SolitonMode::Almost => "almost",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolitonSpec {
    pub potential: Potential,
    pub lambda: ScalarExpr,
    pub mu: ScalarExpr,
    pub mode: SolitonMode,
}

impl SolitonSpec {
    pub fn vector(v: TensorField, lambda: ScalarExpr, mu: ScalarExpr) -> SolitonSpec {
        SolitonSpec { potential: Potential::Vector(v), lambda, mu, mode: SolitonMode::EtaSoliton }
    }

    pub fn gradient(f: ScalarExpr, lambda: ScalarExpr, mu: ScalarExpr) -> SolitonSpec {
        SolitonSpec { potential: Potential::Function(f), lambda, mu, mode: SolitonMode::Gradient }
    }

    /// The potential vector field, `grad f` for a potential function.
    pub fn vector_field(&self, g: &MetricField) -> Result<TensorField> {
        match &self.potential {
            Potential::Vector(v) => {
                v.expect_rank(1, 0)?;
                same_chart(v.chart(), g.chart())?;
                Ok(v.clone())
            }
            Potential::Function(f) => gradient(f, g),
        }
    }
}

/// `grad f`, the g-dual of `df`.
pub fn gradient(f: &ScalarExpr, g: &MetricField) -> Result<TensorField> {
    if f.nvars() != g.chart().dimension() {
        return Err(Error::ChartMismatch);
    }
    raise_index(&differential(g.chart(), f), 0, g)
}

fn coefficient_terms(g: &MetricField, eta: &TensorField, lambda: &ScalarExpr, mu: &ScalarExpr) -> Result<TensorField> {
    g.tensor().scale(lambda).add(&eta.tensor_product(eta)?.scale(mu))
}

/// `½L_V g + Ric + λg + μη⊗η` for an explicit metric and one-form, so that
/// inputs without an almost contact structure (e.g. `η = 0`) can be checked.
pub fn soliton_residual_with(
    g: &MetricField,
    eta: &TensorField,
    bundle: &CurvatureBundle,
    spec: &SolitonSpec,
) -> Result<TensorField> {
    same_chart(g.chart(), bundle.chart())?;
    match spec.mode {
        SolitonMode::Gradient => {
            return Err(Error::Invalid("gradient specs are checked with gradient_residual".into()));
        }
        SolitonMode::EtaSoliton => {
            if !spec.lambda.is_constant() {
                return Err(Error::NonconstantCoefficient("lambda"));
            }
            if !spec.mu.is_constant() {
                return Err(Error::NonconstantCoefficient("mu"));
            }
        }
        SolitonMode::Almost => {}
    }
    let v = spec.vector_field(g)?;
    let half = ScalarExpr::rational(g.chart().dimension(), 1, 2);
    lie_derivative(g.tensor(), &v)?
        .scale(&half)
        .add(&bundle.ricci)?
        .add(&coefficient_terms(g, eta, &spec.lambda, &spec.mu)?)
}

pub fn soliton_residual(s: &AlmostContactStructure, bundle: &CurvatureBundle, spec: &SolitonSpec) -> Result<TensorField> {
    soliton_residual_with(s.metric(), s.eta(), bundle, spec)
}

/// `Hess f + Ric + λg + μη⊗η`.
pub fn gradient_residual_with(
    g: &MetricField,
    eta: &TensorField,
    bundle: &CurvatureBundle,
    conn: &Connection,
    spec: &SolitonSpec,
) -> Result<TensorField> {
    let Potential::Function(f) = &spec.potential else {
        return Err(Error::Invalid("gradient residual needs a potential function".into()));
    };
    if spec.mode != SolitonMode::Gradient {
        return Err(Error::Invalid("gradient residual needs a gradient spec".into()));
    }
    hessian(f, conn)?.add(&bundle.ricci)?.add(&coefficient_terms(g, eta, &spec.lambda, &spec.mu)?)
}

pub fn gradient_residual(
    s: &AlmostContactStructure,
    bundle: &CurvatureBundle,
    conn: &Connection,
    spec: &SolitonSpec,
) -> Result<TensorField> {
    gradient_residual_with(s.metric(), s.eta(), bundle, conn, spec)
}

/// Residual of the spec in whichever form its mode asks for, as a verdict.
pub fn verify_soliton(
    s: &AlmostContactStructure,
    bundle: &CurvatureBundle,
    conn: &Connection,
    spec: &SolitonSpec,
) -> Result<VerdictReport> {
    let (name, residual) = match spec.mode {
        SolitonMode::Gradient => ("gradient_eta_ricci_soliton", gradient_residual(s, bundle, conn, spec)?),
        SolitonMode::EtaSoliton => ("eta_ricci_soliton", soliton_residual(s, bundle, spec)?),
        SolitonMode::Almost => ("almost_eta_ricci_soliton", soliton_residual(s, bundle, spec)?),
    };
    let mut r = VerdictReport::from_residual(name, residual);
    if r.passed() {
        r.solved_constants = Some((spec.lambda.clone(), spec.mu.clone()));
        r.classification = Some(Classification::of_lambda(&spec.lambda));
    }
    Ok(r)
}

/// Solves constant `λ`, `μ` for a potential field `V`.
///
/// `λ` comes from the first horizontal diagonal component, `μ` from the
/// `(ξ,ξ)` component; the pair is then checked against every component.
pub fn solve_constants(s: &AlmostContactStructure, bundle: &CurvatureBundle, v: &TensorField) -> Result<VerdictReport> {
    let g = s.metric();
    let chart = s.chart();
    let zero = chart.zero();
    let base = SolitonSpec { potential: Potential::Vector(v.clone()), lambda: zero.clone(), mu: zero, mode: SolitonMode::Almost };
    let a = soliton_residual(s, bundle, &base)?;
    let h = s.first_horizontal()?;
    let scalar = |t: TensorField| t.as_scalar().cloned().expect("rank 0");
    let a_hh = scalar(a.apply(&[&h, &h])?);
    let lambda = -(a_hh.checked_div(&g.inner(&h, &h)?)?);
    let xi = s.xi();
    let a_xx = scalar(a.apply(&[xi, xi])?);
    let eta_xi = scalar(s.eta().feed_vector(0, xi)?);
    let mu = -(&(&a_xx + &(&lambda * &g.inner(xi, xi)?)).checked_div(&(&eta_xi * &eta_xi))?);

    let residual = a.add(&coefficient_terms(g, s.eta(), &lambda, &mu)?)?;
    let mut r = VerdictReport::from_residual("eta_ricci_soliton", residual)
        .with_value("lambda", lambda.clone())
        .with_value("mu", mu.clone());
    if !lambda.is_constant() || !mu.is_constant() {
        r = r.fail("extracted coefficients are not constant");
        return Ok(r);
    }
    if r.passed() {
        r.classification = Some(Classification::of_lambda(&lambda));
        r.solved_constants = Some((lambda, mu));
    } else {
        r.notes.push("not an eta-Ricci soliton".into());
    }
    Ok(r)
}

/// The consequences `(L_V R)(X,ξ)ξ = 0`, `λ + μ = 2n` and
/// `(L_V∇)(X,ξ) = 2QX + 4nX` of being a soliton on a Kenmotsu manifold.
pub fn check_soliton_consequences(
    s: &AlmostContactStructure,
    bundle: &CurvatureBundle,
    conn: &Connection,
    spec: &SolitonSpec,
) -> Result<Vec<VerdictReport>> {
    let chart = s.chart();
    let soliton = verify_soliton(s, bundle, conn, spec)?;
    let v = spec.vector_field(s.metric())?;
    let xi = s.xi();
    let n = s.n() as i64;

    let lvr = lie_derivative_curvature(&v, bundle, conn, false)?.tensor;
    let curvature = lvr.feed_vector(2, xi)?.feed_vector(1, xi)?;
    let mut out = vec![VerdictReport::from_residual("lie_curvature_xi_xi", curvature)];

    let sum = &(&spec.lambda + &spec.mu) - &chart.constant(2 * n);
    out.push(
        VerdictReport::from_residual("lambda_plus_mu", TensorField::scalar(chart, sum))
            .with_value("lambda_plus_mu", &spec.lambda + &spec.mu),
    );

    let lvc = lie_derivative_connection(&v, conn)?.feed_vector(1, xi)?;
    let model = bundle.ricci_operator.scale(&chart.constant(2)).add(&TensorField::identity(chart).scale(&chart.constant(4 * n)))?;
    out.push(VerdictReport::from_residual("lie_connection_xi", lvc.sub(&model)?));

    if !soliton.passed() {
        for r in &mut out {
            r.notes.push("precondition unmet: spec is not a verified soliton".into());
        }
    }
    Ok(out)
}

/// `L_V η = ρη`; reports `ρ` and whether `V` is strict (`ρ = 0`).
pub fn check_contact_transformation(s: &AlmostContactStructure, v: &TensorField) -> Result<VerdictReport> {
    let eta = s.eta();
    let lve = lie_derivative(eta, v)?;
    let Some((idx, pivot)) = eta.first_nonzero() else {
        return Err(Error::Invalid("eta vanishes identically".into()));
    };
    let rho = lve.get(&idx).checked_div(pivot)?;
    let residual = lve.sub(&eta.scale(&rho))?;
    let mut r = VerdictReport::from_residual("contact_transformation", residual);
    if r.passed() {
        r = r.with_value("rho", rho.clone());
        if rho.is_zero() {
            r.notes.push("strict".into());
        }
    } else {
        r.notes.push("not a contact transformation".into());
    }
    Ok(r)
}

/// `V = hξ` for a single function `h`; reports `h` and whether it is constant.
pub fn check_collinear(s: &AlmostContactStructure, v: &TensorField) -> Result<VerdictReport> {
    let xi = s.xi();
    // η(ξ) = 1 on valid structures, so the only candidate is h = η(V)/η(ξ).
    let h = s.eta().feed_vector(0, v)?.as_scalar().cloned().expect("rank 0");
    let eta_xi = s.eta().feed_vector(0, xi)?.as_scalar().cloned().expect("rank 0");
    let h = h.checked_div(&eta_xi)?;
    let mut r = VerdictReport::from_residual("collinear", v.sub(&xi.scale(&h))?);
    if r.passed() {
        let note = if h.is_constant() { "constant factor" } else { "nonconstant factor" };
        r = r.with_value("factor", h).with_note(note);
    } else {
        r.notes.push("not collinear".into());
    }
    Ok(r)
}

/// Einstein condition, the value `r = −2n(2n+1)`, and in dimension 3 the
/// curvature reconstruction from `Q` and constant curvature `−1`.
pub fn check_einstein(bundle: &CurvatureBundle, s: &AlmostContactStructure) -> Result<Vec<VerdictReport>> {
    let chart = s.chart();
    let g = s.metric();
    let dim = chart.dimension();
    let r = &bundle.scalar;
    let ratio = r.checked_div(&chart.constant(dim as i64))?;
    let mut einstein =
        VerdictReport::from_residual("einstein", bundle.ricci.sub(&g.tensor().scale(&ratio))?).with_value("r", r.clone());
    if !r.is_constant() {
        einstein = einstein.fail("scalar curvature is not constant");
    }
    let n = s.n() as i64;
    let target = -2 * n * (2 * n + 1);
    let mut out = vec![
        einstein,
        VerdictReport::from_residual("scalar_curvature_value", TensorField::scalar(chart, r - &chart.constant(target)))
            .with_value("r", r.clone()),
    ];
    if dim == 3 {
        let t1 = constant_curvature_tensor(g);
        let q = &bundle.ricci_operator;
        let ric = &bundle.ricci;
        let half_r = r * &ScalarExpr::rational(dim, 1, 2);
        // g(Y,Z)QX − g(X,Z)QY + g(QY,Z)X − g(QX,Z)Y − r/2 (g(Y,Z)X − g(X,Z)Y)
        let model = TensorField::from_fn(chart, 1, 3, |idx| {
            let (l, i, j, k) = (idx[0], idx[1], idx[2], idx[3]);
            let mut e = &(g.component(j, k) * q.get(&[l, i])) - &(g.component(i, k) * q.get(&[l, j]));
            if l == i {
                e = &e + ric.get(&[j, k]);
            }
            if l == j {
                e = &e - ric.get(&[i, k]);
            }
            &e - &(&half_r * t1.get(idx))
        });
        out.push(VerdictReport::from_residual("three_dimensional_decomposition", bundle.riemann.sub(&model)?));
        out.push(VerdictReport::from_residual("constant_curvature_minus_one", model.add(&t1)?));
    }
    Ok(out)
}

/// `ξ(r) = 0`.
pub fn check_xi_invariant_scalar(bundle: &CurvatureBundle, s: &AlmostContactStructure) -> Result<VerdictReport> {
    let xr = directional_derivative(&bundle.scalar, s.xi())?;
    Ok(VerdictReport::from_residual("xi_scalar_invariance", TensorField::scalar(s.chart(), xr)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::{build_warped_kenmotsu, builtin_example_m5, Geometry, KahlerFactor};
    use crate::curvature::{christoffel, riemann};
    use crate::kernel::q;
    use crate::tensor::Chart;

    fn vector(chart: &std::sync::Arc<Chart>, comps: &[&str]) -> TensorField {
        TensorField::vector(chart, comps.iter().map(|s| chart.parse(s).unwrap()).collect()).unwrap()
    }

    fn m5() -> Geometry {
        Geometry::new(builtin_example_m5().1).unwrap()
    }

    const EXAMPLE_V: [&str; 5] = ["2*x", "2*y", "2*z", "2*u", "v"];

    #[test]
    fn example_vector_field_solves_to_three_and_one() {
        let geo = m5();
        let c = geo.chart().clone();
        let r = solve_constants(&geo.structure, &geo.curvature, &vector(&c, &EXAMPLE_V)).unwrap();
        assert!(r.passed());
        assert_eq!(r.solved_constants, Some((c.constant(3), c.constant(1))));
        assert_eq!(r.classification, Some(Classification::Expanding));
    }

    #[test]
    fn collinear_family_and_zero_field() {
        let geo = m5();
        let c = geo.chart().clone();
        for sigma in [1, 2, 7] {
            let v = geo.structure.xi().scale(&c.constant(sigma));
            let r = solve_constants(&geo.structure, &geo.curvature, &v).unwrap();
            assert_eq!(r.solved_constants, Some((c.constant(4 - sigma), c.constant(sigma))));
        }
        let r = solve_constants(&geo.structure, &geo.curvature, &TensorField::zeros(&c, 1, 0)).unwrap();
        assert_eq!(r.solved_constants, Some((c.constant(4), c.constant(0))));
    }

    #[test]
    fn non_soliton_field_fails_to_solve() {
        let geo = m5();
        let c = geo.chart().clone();
        let r = solve_constants(&geo.structure, &geo.curvature, &vector(&c, &["y", "0", "0", "0", "0"])).unwrap();
        assert!(!r.passed());
        assert!(r.witness.is_some());
    }

    #[test]
    fn nonconstant_coefficients_are_rejected_in_soliton_mode() {
        let geo = m5();
        let c = geo.chart().clone();
        let spec = SolitonSpec::vector(TensorField::zeros(&c, 1, 0), c.parse("v").unwrap(), c.zero());
        assert_eq!(
            soliton_residual(&geo.structure, &geo.curvature, &spec).err(),
            Some(Error::NonconstantCoefficient("lambda"))
        );
        let almost = SolitonSpec { mode: SolitonMode::Almost, ..spec };
        assert!(soliton_residual(&geo.structure, &geo.curvature, &almost).is_ok());
    }

    #[test]
    fn gaussian_soliton_on_the_plane() {
        let c = Chart::from_coordinates(&["x", "y"]).unwrap();
        let g = MetricField::new(TensorField::identity_form(&c)).unwrap();
        let conn = christoffel(&g).unwrap();
        let b = riemann(&conn).unwrap();
        let eta = TensorField::zeros(&c, 0, 1);
        let spec = SolitonSpec::vector(vector(&c, &["-x", "-y"]), c.constant(1), c.zero());
        assert!(soliton_residual_with(&g, &eta, &b, &spec).unwrap().is_zero());
        let grad = SolitonSpec::gradient(c.parse("1/2*x^2 + 1/2*y^2").unwrap(), c.constant(-1), c.zero());
        assert!(gradient_residual_with(&g, &eta, &b, &conn, &grad).unwrap().is_zero());
    }

    #[test]
    fn constant_potential_reduces_to_ricci() {
        let geo = m5();
        let c = geo.chart().clone();
        let spec = SolitonSpec::gradient(c.constant(5), c.constant(4), c.zero());
        assert!(gradient_residual(&geo.structure, &geo.curvature, &geo.connection, &spec).unwrap().is_zero());
    }

    #[test]
    fn gradient_and_flow_forms_agree() {
        let geo = m5();
        let c = geo.chart().clone();
        let f = c.parse("x^2 + y^2 + z^2 + u^2 + 1/2*v^2").unwrap();
        let spec = SolitonSpec::gradient(f.clone(), c.constant(3), c.constant(1));
        let by_hessian = gradient_residual(&geo.structure, &geo.curvature, &geo.connection, &spec).unwrap();
        let grad = gradient(&f, geo.structure.metric()).unwrap();
        let flow = SolitonSpec::vector(grad, c.constant(3), c.constant(1));
        assert_eq!(by_hessian, soliton_residual(&geo.structure, &geo.curvature, &flow).unwrap());
    }

    #[test]
    fn consequences_hold_for_genuine_solitons() {
        let geo = m5();
        let c = geo.chart().clone();
        let spec = SolitonSpec::vector(vector(&c, &EXAMPLE_V), c.constant(3), c.constant(1));
        for r in check_soliton_consequences(&geo.structure, &geo.curvature, &geo.connection, &spec).unwrap() {
            assert!(r.passed() && r.notes.is_empty(), "{}", r.identity);
        }
        let bogus = SolitonSpec::vector(TensorField::zeros(&c, 1, 0), c.zero(), c.zero());
        let out = check_soliton_consequences(&geo.structure, &geo.curvature, &geo.connection, &bogus).unwrap();
        let sum = out.iter().find(|r| r.identity == "lambda_plus_mu").unwrap();
        assert_eq!(sum.witness.as_ref().unwrap().value, c.constant(-4));
        assert!(sum.notes[0].starts_with("precondition unmet"));
    }

    #[test]
    fn contact_transformations() {
        let geo = m5();
        let c = geo.chart().clone();
        let s = &geo.structure;
        let r = check_contact_transformation(s, s.xi()).unwrap();
        assert!(r.passed());
        assert_eq!(r.value("rho"), Some(&c.zero()));
        assert_eq!(r.notes, vec!["strict".to_string()]);
        assert!(check_contact_transformation(s, &TensorField::coordinate_vector(&c, 0)).unwrap().passed());
        let v = vector(&c, &["0", "0", "0", "0", "-v*x"]);
        let r = check_contact_transformation(s, &v).unwrap();
        assert!(!r.passed());
        assert_eq!(r.witness.unwrap().label, "_x");
    }

    #[test]
    fn collinearity() {
        let geo = m5();
        let c = geo.chart().clone();
        let s = &geo.structure;
        let r = check_collinear(s, &s.xi().scale(&c.constant(7))).unwrap();
        assert_eq!((r.value("factor"), r.notes.as_slice()), (Some(&c.constant(7)), &["constant factor".to_string()][..]));
        let r = check_collinear(s, &s.xi().scale(&c.parse("v").unwrap())).unwrap();
        assert_eq!(r.notes, vec!["nonconstant factor".to_string()]);
        let r = check_collinear(s, &TensorField::coordinate_vector(&c, 0).add(s.xi()).unwrap()).unwrap();
        assert!(!r.passed());
        assert_eq!(r.witness.unwrap().label, "^x");
    }

    #[test]
    fn einstein_checks() {
        let geo = m5();
        let out = check_einstein(&geo.curvature, &geo.structure).unwrap();
        assert!(out.iter().all(VerdictReport::passed));
        assert_eq!(out[0].value("r"), Some(&geo.chart().constant(-20)));

        let (_, s) = build_warped_kenmotsu(&KahlerFactor::flat(1), &q(1, 1)).unwrap();
        let w = Geometry::new(s).unwrap();
        let out = check_einstein(&w.curvature, &w.structure).unwrap();
        assert_eq!(out.len(), 4);
        assert!(out.iter().all(VerdictReport::passed));
        assert!(check_xi_invariant_scalar(&w.curvature, &w.structure).unwrap().passed());

        let c = Chart::from_coordinates(&["a", "b", "x", "y", "z"]).unwrap();
        let g = MetricField::new(TensorField::identity_form(&c)).unwrap();
        let mut phi = TensorField::zeros(&c, 1, 1);
        phi.set(&[1, 0], c.constant(1));
        phi.set(&[0, 1], c.constant(-1));
        phi.set(&[3, 2], c.constant(1));
        phi.set(&[2, 3], c.constant(-1));
        let flat = AlmostContactStructure::new(g, phi, TensorField::coordinate_vector(&c, 4), None).unwrap();
        let f = Geometry::new(flat).unwrap();
        let out = check_einstein(&f.curvature, &f.structure).unwrap();
        assert!(out[0].passed());
        assert!(!out[1].passed());
    }
}
