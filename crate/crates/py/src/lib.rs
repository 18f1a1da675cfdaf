//! Python bindings: charts and expressions, curvature of a manifest's
//! structure, soliton solving, and the workbench commands with JSON reports.

use std::sync::Arc;

use num_rational::BigRational;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use kenmotsu::contact::{check_kenmotsu, eta_einstein_decompose, Geometry as CoreGeometry};
use kenmotsu::kernel::{rational_to_f64, EvalMode, ScalarExpr};
use kenmotsu::soliton::{gradient_residual, soliton_residual, solve_constants, SolitonSpec};
use kenmotsu::tensor::{Chart as CoreChart, TensorField};
use kenmotsu::workbench::commands::{self, Model, Outcome, RunError, SolitonAction};
use kenmotsu::workbench::fixtures::{fixture_manifest as core_fixture, FIXTURES};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(frozen, skip_from_py_object, module = "kenmotsu")]
#[derive(Clone)]
struct Chart {
    inner: Arc<CoreChart>,
}

#[pymethods]
impl Chart {
    #[new]
    fn new(coordinates: Vec<String>) -> PyResult<Self> {
        Ok(Chart { inner: CoreChart::from_coordinates(&coordinates).map_err(value_error)? })
    }

    #[getter]
    fn coordinates(&self) -> Vec<String> {
        self.inner.coordinates().to_vec()
    }

    fn parse(&self, text: &str) -> PyResult<Expr> {
        Ok(Expr { chart: self.inner.clone(), inner: self.inner.parse(text).map_err(value_error)? })
    }
}

/// An exact expression in a chart's coordinates.
#[pyclass(frozen, skip_from_py_object, module = "kenmotsu")]
#[derive(Clone)]
struct Expr {
    chart: Arc<CoreChart>,
    inner: ScalarExpr,
}

impl Expr {
    fn wrap(&self, inner: ScalarExpr) -> Expr {
        Expr { chart: self.chart.clone(), inner }
    }

    fn same_chart(&self, other: &Expr) -> PyResult<()> {
        if Arc::ptr_eq(&self.chart, &other.chart) || self.chart.coordinates() == other.chart.coordinates() {
            Ok(())
        } else {
            Err(PyValueError::new_err("expressions live on different charts"))
        }
    }

    fn point(&self, point: &[String]) -> PyResult<Vec<BigRational>> {
        point
            .iter()
            .map(|s| {
                self.chart
                    .parse(s)
                    .map_err(value_error)?
                    .as_constant()
                    .ok_or_else(|| PyValueError::new_err(format!("`{s}` is not a constant")))
            })
            .collect()
    }
}

#[pymethods]
impl Expr {
    fn __str__(&self) -> String {
        self.inner.display(self.chart.context()).to_string()
    }

    fn __repr__(&self) -> String {
        format!("Expr('{}')", self.__str__())
    }

    fn __eq__(&self, other: &Expr) -> bool {
        self.chart.coordinates() == other.chart.coordinates() && self.inner == other.inner
    }

    fn __add__(&self, other: &Expr) -> PyResult<Expr> {
        self.same_chart(other)?;
        Ok(self.wrap(&self.inner + &other.inner))
    }

    fn __sub__(&self, other: &Expr) -> PyResult<Expr> {
        self.same_chart(other)?;
        Ok(self.wrap(&self.inner - &other.inner))
    }

    fn __mul__(&self, other: &Expr) -> PyResult<Expr> {
        self.same_chart(other)?;
        Ok(self.wrap(&self.inner * &other.inner))
    }

    fn __truediv__(&self, other: &Expr) -> PyResult<Expr> {
        self.same_chart(other)?;
        Ok(self.wrap(self.inner.checked_div(&other.inner).map_err(value_error)?))
    }

    fn __neg__(&self) -> Expr {
        self.wrap(-&self.inner)
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn derivative(&self, coordinate: &str) -> PyResult<Expr> {
        let i = self.chart.context().index_of(coordinate).map_err(value_error)?;
        Ok(self.wrap(self.inner.derivative(i)))
    }

    /// Exact value as a rational string, or a float when `digits` is given.
    #[pyo3(signature = (point, digits=None))]
    fn evaluate(&self, py: Python<'_>, point: Vec<String>, digits: Option<u32>) -> PyResult<Py<PyAny>> {
        let p = self.point(&point)?;
        match digits {
            None => {
                let v = self.inner.evaluate(&p, EvalMode::Exact).map_err(value_error)?;
                Ok(v.to_string().into_pyobject(py)?.into_any().unbind())
            }
            Some(d) => {
                let v = self.inner.evaluate(&p, EvalMode::Approximate { digits: d }).map_err(value_error)?;
                Ok(rational_to_f64(&v).into_pyobject(py)?.into_any().unbind())
            }
        }
    }
}

fn matrix(chart: &Arc<CoreChart>, t: &TensorField) -> Vec<Vec<Expr>> {
    let n = chart.dimension();
    (0..n)
        .map(|i| (0..n).map(|j| Expr { chart: chart.clone(), inner: t.get(&[i, j]).clone() }).collect())
        .collect()
}

/// Metric, structure and curvature of a manifest with a `[structure]` section.
#[pyclass(frozen, module = "kenmotsu")]
struct Geometry {
    inner: CoreGeometry,
}

impl Geometry {
    fn chart(&self) -> &Arc<CoreChart> {
        self.inner.chart()
    }

    fn expr(&self, e: &ScalarExpr) -> Expr {
        Expr { chart: self.chart().clone(), inner: e.clone() }
    }

    fn vector(&self, components: &[String]) -> PyResult<TensorField> {
        let c = self.chart();
        let comps = components.iter().map(|s| c.parse(s).map_err(value_error)).collect::<PyResult<Vec<_>>>()?;
        TensorField::vector(c, comps).map_err(value_error)
    }

    fn scalar(&self, text: &str) -> PyResult<ScalarExpr> {
        self.chart().parse(text).map_err(value_error)
    }
}

#[pymethods]
impl Geometry {
    /// `manifest` is a path or `fixture:<name>`.
    #[staticmethod]
    fn load(manifest: &str) -> PyResult<Geometry> {
        let model = Model::load(manifest).map_err(value_error)?;
        let structure = model.structure.ok_or_else(|| PyValueError::new_err("manifest has no [structure] section"))?;
        Ok(Geometry { inner: CoreGeometry::new(structure).map_err(value_error)? })
    }

    #[getter]
    fn coordinates(&self) -> Vec<String> {
        self.chart().coordinates().to_vec()
    }

    fn chart_object(&self) -> Chart {
        Chart { inner: self.chart().clone() }
    }

    fn metric(&self) -> Vec<Vec<Expr>> {
        matrix(self.chart(), self.inner.structure.metric().tensor())
    }

    /// `Γ^k_ij` with `∇_{∂i}∂j = Γ^k_ij ∂k`.
    fn christoffel(&self, k: usize, i: usize, j: usize) -> PyResult<Expr> {
        let n = self.chart().dimension();
        if k >= n || i >= n || j >= n {
            return Err(PyValueError::new_err("index out of range"));
        }
        Ok(self.expr(self.inner.connection.symbol(k, i, j)))
    }

    fn ricci(&self) -> Vec<Vec<Expr>> {
        matrix(self.chart(), &self.inner.curvature.ricci)
    }

    fn scalar_curvature(&self) -> Expr {
        self.expr(&self.inner.curvature.scalar)
    }

    /// `(alpha, beta)` when `Ric = alpha g + beta eta⊗eta`, else `None`.
    fn eta_einstein(&self) -> PyResult<Option<(Expr, Expr)>> {
        let d = eta_einstein_decompose(&self.inner.curvature, &self.inner.structure).map_err(value_error)?;
        Ok(d.exact.then(|| (self.expr(&d.alpha), self.expr(&d.beta))))
    }

    /// `(name, passed)` for each Kenmotsu verdict.
    fn check_kenmotsu(&self) -> PyResult<Vec<(String, bool)>> {
        let v = check_kenmotsu(&self.inner.structure, &self.inner.connection).map_err(value_error)?;
        Ok(v.into_iter().map(|r| (r.identity.clone(), r.passed())).collect())
    }

    /// `(lambda, mu, classification)` for the potential field `v`, or `None`.
    fn solve_soliton(&self, v: Vec<String>) -> PyResult<Option<(Expr, Expr, String)>> {
        let field = self.vector(&v)?;
        let r = solve_constants(&self.inner.structure, &self.inner.curvature, &field).map_err(value_error)?;
        Ok(r.solved_constants.map(|(l, m)| {
            let class = r.classification.map(|c| c.as_str().to_string()).unwrap_or_default();
            (self.expr(&l), self.expr(&m), class)
        }))
    }

    /// `½L_V g + Ric + λg + μη⊗η` as a matrix.
    fn soliton_residual(&self, v: Vec<String>, lam: &str, mu: &str) -> PyResult<Vec<Vec<Expr>>> {
        let spec = SolitonSpec::vector(self.vector(&v)?, self.scalar(lam)?, self.scalar(mu)?);
        let r = soliton_residual(&self.inner.structure, &self.inner.curvature, &spec).map_err(value_error)?;
        Ok(matrix(self.chart(), &r))
    }

    /// `Hess f + Ric + λg + μη⊗η` as a matrix.
    fn gradient_residual(&self, f: &str, lam: &str, mu: &str) -> PyResult<Vec<Vec<Expr>>> {
        let spec = SolitonSpec::gradient(self.scalar(f)?, self.scalar(lam)?, self.scalar(mu)?);
        let r = gradient_residual(&self.inner.structure, &self.inner.curvature, &self.inner.connection, &spec)
            .map_err(value_error)?;
        Ok(matrix(self.chart(), &r))
    }
}

fn finish(result: Result<Outcome, RunError>) -> (i32, String) {
    match result {
        Ok(o) => (o.exit_code, o.report.to_json()),
        Err(e) => (e.exit_code(), serde_error(&e)),
    }
}

fn serde_error(e: &RunError) -> String {
    format!("{{\"error\": {:?}}}", e.to_string())
}

fn with_model(manifest: &str, f: impl FnOnce(&Model) -> Result<Outcome, RunError>) -> (i32, String) {
    finish(Model::load(manifest).and_then(|m| f(&m)))
}

/// `(exit_code, json_report)`.
#[pyfunction]
fn check_structure(manifest: &str) -> (i32, String) {
    with_model(manifest, commands::check_structure)
}

#[pyfunction]
fn curvature(manifest: &str) -> (i32, String) {
    with_model(manifest, commands::curvature)
}

#[pyfunction]
#[pyo3(signature = (manifest, solve=true))]
fn soliton(manifest: &str, solve: bool) -> (i32, String) {
    let action = if solve { SolitonAction::Solve } else { SolitonAction::Verify };
    with_model(manifest, |m| commands::soliton(m, action))
}

#[pyfunction]
#[pyo3(signature = (manifest, points=None, tol=1e-6))]
fn oracle(manifest: &str, points: Option<usize>, tol: f64) -> (i32, String) {
    with_model(manifest, |m| commands::oracle(m, points, tol))
}

#[pyfunction]
fn fixtures() -> Vec<&'static str> {
    FIXTURES.to_vec()
}

#[pyfunction]
fn fixture_manifest(name: &str) -> PyResult<String> {
    core_fixture(name).ok_or_else(|| PyValueError::new_err(format!("unknown fixture `{name}`")))
}

#[pymodule]
#[pyo3(name = "kenmotsu")]
fn init(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Chart>()?;
    m.add_class::<Expr>()?;
    m.add_class::<Geometry>()?;
    m.add_function(wrap_pyfunction!(check_structure, m)?)?;
    m.add_function(wrap_pyfunction!(curvature, m)?)?;
    m.add_function(wrap_pyfunction!(soliton, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(fixtures, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_manifest, m)?)?;
    Ok(())
}
