//! The workbench commands. Each returns a report and an exit code: 0 when
//! every check passes, 1 on a mathematical failure, 2 on usage or manifest
//! errors.

use std::sync::Arc;

use num_rational::BigRational;
use thiserror::Error;

use crate::contact::{
    check_almost_contact, check_kenmotsu, check_phi_holomorphic_curvature, constant_curvature_tensor,
    default_sample_points, eta_einstein_decompose, nijenhuis_normality, AlmostContactStructure,
};
use crate::curvature::{christoffel, riemann, sectional_curvature, Connection, CurvatureBundle};
use crate::error::Error;
use crate::kernel::ScalarExpr;
use crate::soliton::{check_soliton_consequences, solve_constants, verify_soliton, Potential, SolitonMode, SolitonSpec};
use crate::tensor::{determinant_and_inverse, Chart, MetricField, TensorField};
use crate::verdict::{component_label, VerdictReport};
use crate::workbench::fixtures::fixture_manifest;
use crate::workbench::manifest::{Located, Manifest, ManifestError};
use crate::workbench::oracle::{default_step, format_deviation, run_oracle, seeded_points};
use crate::workbench::report::{Entry, RunReport, Section};

pub const FIXTURE_PREFIX: &str = "fixture:";
pub const CHECK_GROUPS: [&str; 3] = ["almost_contact", "normality", "kenmotsu"];

#[derive(Debug, Error)]
pub enum RunError {
    #[error("manifest error: {0}")]
    Manifest(#[from] ManifestError),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Math(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Math(_) => 1,
            _ => 2,
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::SingularMetric
            | Error::AsymmetricMetric(..)
            | Error::DegeneratePlane
            | Error::ZeroWarping
            | Error::NotKahler(_) => RunError::Math(e.to_string()),
            other => RunError::Usage(other.to_string()),
        }
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub report: RunReport,
    pub exit_code: i32,
}

impl Outcome {
    fn settled(mut report: RunReport) -> Outcome {
        report.settle();
        let exit_code = if report.all_passed() { 0 } else { 1 };
        Outcome { report, exit_code }
    }
}

/// Reads a manifest path, or a built-in fixture named `fixture:<name>`.
pub fn load_manifest_text(arg: &str) -> Result<String, RunError> {
    if let Some(name) = arg.strip_prefix(FIXTURE_PREFIX) {
        return fixture_manifest(name).ok_or_else(|| RunError::Usage(format!("unknown fixture `{name}`")));
    }
    std::fs::read_to_string(arg).map_err(|e| RunError::Io { path: arg.to_string(), message: e.to_string() })
}

/// A parsed manifest with its metric, optional structure and frame built.
pub struct Model {
    pub source: String,
    pub text: String,
    pub manifest: Manifest,
    pub chart: Arc<Chart>,
    pub metric: MetricField,
    pub structure: Option<AlmostContactStructure>,
    pub frame: Vec<(String, TensorField)>,
    pub sample_points: Vec<Vec<BigRational>>,
}

fn vector_at(chart: &Arc<Chart>, v: &Located) -> Result<TensorField, RunError> {
    let comps = Manifest::components(v, chart.context())?;
    Ok(TensorField::vector(chart, comps)?)
}

impl Model {
    pub fn load(arg: &str) -> Result<Model, RunError> {
        let text = load_manifest_text(arg)?;
        Model::from_text(arg, text)
    }

    pub fn from_text(source: &str, text: String) -> Result<Model, RunError> {
        let manifest = Manifest::parse(&text)?;
        let ctx = manifest.context()?;
        let rows = manifest.metric_upper_triangle(&ctx)?;
        let chart = Chart::new(ctx);
        let n = chart.dimension();
        let metric = MetricField::from_upper_triangle(&chart, &rows)?;

        let structure = match &manifest.structure {
            None => None,
            Some(sec) => {
                let header = Located { text: String::new(), line: 1, column: 1 };
                let xi_loc = sec.xi.as_ref().ok_or_else(|| ManifestError {
                    message: "missing `xi` in [structure]".into(),
                    ..at(&header)
                })?;
                let xi = vector_at(&chart, xi_loc)?;
                let names = chart.coordinates();
                let mut rows: Vec<Option<Vec<ScalarExpr>>> = vec![None; n];
                for (row, v) in &sec.phi {
                    let i = chart
                        .context()
                        .index_of(row)
                        .map_err(|e| ManifestError { message: format!("phi row: {e}"), ..at(v) })?;
                    rows[i] = Some(Manifest::components(v, chart.context())?);
                }
                let mut phi_rows = Vec::with_capacity(n);
                for (i, r) in rows.into_iter().enumerate() {
                    phi_rows.push(r.ok_or_else(|| ManifestError {
                        message: format!("missing `phi.{}` in [structure]", names[i]),
                        ..at(xi_loc)
                    })?);
                }
                let phi = TensorField::from_matrix(&chart, 1, 1, phi_rows)?;
                let eta = match &sec.eta {
                    Some(v) => {
                        let comps = Manifest::components(v, chart.context())?;
                        Some(TensorField::covector(&chart, comps)?)
                    }
                    None => None,
                };
                let s = AlmostContactStructure::new(metric.clone(), phi, xi, eta).map_err(|e| match e {
                    Error::EvenDimension(_) => RunError::Manifest(ManifestError {
                        message: format!("[structure] needs an odd dimension, got {n}"),
                        ..at(xi_loc)
                    }),
                    other => other.into(),
                })?;
                Some(s)
            }
        };

        let mut frame = Vec::new();
        for (name, v) in &manifest.frame {
            frame.push((name.clone(), vector_at(&chart, v)?));
        }
        if !frame.is_empty() && frame.len() != n {
            let first = &manifest.frame[0].1;
            return Err(ManifestError { message: format!("a frame needs {n} vectors, got {}", frame.len()), ..at(first) }
                .into());
        }
        let mut sample_points = Vec::new();
        for (_, v) in &manifest.sample_points {
            sample_points.push(Manifest::point(v, chart.context())?);
        }
        Ok(Model { source: source.to_string(), text, manifest, chart, metric, structure, frame, sample_points })
    }

    fn report(&self, command: &str) -> RunReport {
        let mut r = RunReport::new(command, &self.source, &self.text);
        if let Some(s) = &self.structure {
            r.warnings.extend(s.warnings().iter().cloned());
        }
        r
    }

    fn structure(&self, command: &str) -> Result<&AlmostContactStructure, RunError> {
        self.structure.as_ref().ok_or_else(|| RunError::Usage(format!("{command} needs a [structure] section")))
    }

    fn geometry(&self) -> Result<(Connection, CurvatureBundle), RunError> {
        let conn = christoffel(&self.metric)?;
        let bundle = riemann(&conn)?;
        Ok((conn, bundle))
    }
}

fn at(v: &Located) -> ManifestError {
    ManifestError { line: v.line, column: v.column, message: String::new() }
}

fn push_all(report: &mut RunReport, verdicts: &[VerdictReport], chart: &Chart) {
    for v in verdicts {
        report.push_check(v, chart.context());
    }
}

pub fn check_structure(model: &Model) -> Result<Outcome, RunError> {
    let s = model.structure("check-structure")?;
    let groups: Vec<String> = match &model.manifest.checks {
        None => CHECK_GROUPS.iter().map(|g| g.to_string()).collect(),
        Some(list) => {
            for item in list {
                if !CHECK_GROUPS.contains(&item.text.as_str()) {
                    return Err(ManifestError { message: format!("unknown check `{}`", item.text), ..at(item) }.into());
                }
            }
            list.iter().map(|l| l.text.clone()).collect()
        }
    };
    let mut report = model.report("check-structure");
    let points =
        if model.sample_points.is_empty() { default_sample_points(model.chart.dimension()) } else { model.sample_points.clone() };
    for group in CHECK_GROUPS.iter().filter(|g| groups.iter().any(|s| s == *g)) {
        let verdicts = match *group {
            "almost_contact" => check_almost_contact(s, &points)?,
            "normality" => vec![nijenhuis_normality(s)?],
            _ => {
                let (conn, _) = model.geometry()?;
                check_kenmotsu(s, &conn)?
            }
        };
        push_all(&mut report, &verdicts, &model.chart);
    }
    Ok(Outcome::settled(report))
}

fn nonzero_entries(t: &TensorField, keep: impl Fn(&[usize]) -> bool) -> Vec<Entry> {
    let ctx = t.chart().context();
    crate::tensor::index_tuples(t.dimension(), t.rank())
        .into_iter()
        .filter(|idx| keep(idx) && !t.get(idx).is_zero())
        .map(|idx| Entry {
            component: component_label(ctx, t.upper_rank(), &idx),
            value: t.get(&idx).display(ctx).to_string(),
        })
        .collect()
}

fn frame_riemann(model: &Model, bundle: &CurvatureBundle) -> Result<Section, RunError> {
    let n = model.chart.dimension();
    // columns are the frame vectors
    let m: Vec<Vec<ScalarExpr>> =
        (0..n).map(|i| (0..n).map(|a| model.frame[a].1.get(&[i]).clone()).collect()).collect();
    let (det, inv) = determinant_and_inverse(&m)?;
    if det.is_zero() {
        let first = &model.manifest.frame[0].1;
        return Err(ManifestError { message: "frame vectors are linearly dependent".into(), ..at(first) }.into());
    }
    let ctx = model.chart.context();
    let mut entries = Vec::new();
    for b in 0..n {
        for c in (b + 1)..n {
            for d in 0..n {
                let w = bundle.apply(&model.frame[b].1, &model.frame[c].1, &model.frame[d].1)?;
                for a in 0..n {
                    let mut val = ScalarExpr::zero(n);
                    for i in 0..n {
                        val = &val + &(&inv[a][i] * w.get(&[i]));
                    }
                    if !val.is_zero() {
                        let name = |k: usize| model.frame[k].0.as_str();
                        entries.push(Entry {
                            component: format!("^{}_{},{},{}", name(a), name(b), name(c), name(d)),
                            value: val.display(ctx).to_string(),
                        });
                    }
                }
            }
        }
    }
    Ok(Section { name: "riemann_frame".into(), entries })
}

pub fn curvature(model: &Model) -> Result<Outcome, RunError> {
    let (conn, bundle) = model.geometry()?;
    let chart = &model.chart;
    let ctx = chart.context();
    let n = chart.dimension();
    let mut report = model.report("curvature");
    report
        .sections
        .push(Section { name: "christoffel".into(), entries: nonzero_entries(conn.christoffel(), |i| i[1] <= i[2]) });
    report.sections.push(Section { name: "riemann".into(), entries: nonzero_entries(&bundle.riemann, |i| i[1] < i[2]) });
    if !model.frame.is_empty() {
        report.sections.push(frame_riemann(model, &bundle)?);
    }
    report.sections.push(Section { name: "ricci".into(), entries: nonzero_entries(&bundle.ricci, |i| i[0] <= i[1]) });
    let show = |e: &ScalarExpr| e.display(ctx).to_string();
    let scalar = bundle.scalar.clone();
    report.push_value("r", show(&scalar));

    let kappa = scalar.scale(&BigRational::new(1.into(), (n as i64).into()));
    let einstein = kappa.is_constant() && bundle.ricci.sub(&model.metric.tensor().scale(&kappa))?.is_zero();
    report.push_value("einstein_constant", if einstein { show(&kappa) } else { "not einstein".into() });

    if n >= 2 {
        let x = TensorField::coordinate_vector(chart, 0);
        let y = TensorField::coordinate_vector(chart, 1);
        let k = sectional_curvature(&x, &y, &bundle, &model.metric)?;
        let constant = k.is_constant()
            && bundle.riemann.sub(&constant_curvature_tensor(&model.metric).scale(&k))?.is_zero();
        report.push_value("sectional_curvature", if constant { show(&k) } else { "not constant".into() });
    }
    if let Some(s) = &model.structure {
        if n >= 3 {
            let d = eta_einstein_decompose(&bundle, s)?;
            if d.exact {
                report.push_value("alpha", show(&d.alpha));
                report.push_value("beta", show(&d.beta));
            } else {
                report.push_value("alpha", "not eta-Einstein");
                report.push_value("beta", "not eta-Einstein");
            }
            let h = check_phi_holomorphic_curvature(&bundle, s)?;
            report.push_value("H", h.h.as_ref().map_or_else(|| "not constant".to_string(), show));
        }
    }
    report.settle();
    Ok(Outcome { report, exit_code: 0 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolitonAction {
    Solve,
    Verify,
}

fn parse_mode(loc: Option<&Located>, has_potential: bool) -> Result<SolitonMode, RunError> {
    let Some(loc) = loc else {
        return Ok(if has_potential { SolitonMode::Gradient } else { SolitonMode::EtaSoliton });
    };
    let mode = match loc.text.as_str() {
        "eta_soliton" => SolitonMode::EtaSoliton,
        "gradient" => SolitonMode::Gradient,
        "almost" => SolitonMode::Almost,
        other => return Err(ManifestError { message: format!("unknown soliton mode `{other}`"), ..at(loc) }.into()),
    };
    if (mode == SolitonMode::Gradient) != has_potential {
        let message = if has_potential { "a potential needs mode `gradient`" } else { "mode `gradient` needs a potential" };
        return Err(ManifestError { message: message.into(), ..at(loc) }.into());
    }
    Ok(mode)
}

pub fn soliton(model: &Model, action: SolitonAction) -> Result<Outcome, RunError> {
    let s = model.structure("soliton")?;
    let sec = model.manifest.soliton.as_ref().ok_or_else(|| RunError::Usage("soliton needs a [soliton] section".into()))?;
    let chart = &model.chart;
    let ctx = chart.context();
    let potential = match (&sec.vector, &sec.potential) {
        (Some(_), Some(p)) => {
            return Err(ManifestError { message: "give at most one of `V` and `potential`".into(), ..at(p) }.into())
        }
        (None, None) => return Err(RunError::Usage("[soliton] needs `V` or `potential`".into())),
        (Some(v), None) => Potential::Vector(vector_at(chart, v)?),
        (None, Some(p)) => Potential::Function(p.expr(ctx)?),
    };
    let mode = parse_mode(sec.mode.as_ref(), matches!(potential, Potential::Function(_)))?;
    let (conn, bundle) = model.geometry()?;
    let mut report = model.report(match action {
        SolitonAction::Solve => "soliton --solve",
        SolitonAction::Verify => "soliton --verify",
    });
    let spec = match action {
        SolitonAction::Solve => {
            if sec.lambda.is_some() || sec.mu.is_some() {
                return Err(RunError::Usage("--solve forbids `lambda` and `mu` in [soliton]".into()));
            }
            let probe = SolitonSpec { potential, lambda: chart.zero(), mu: chart.zero(), mode };
            let v = probe.vector_field(s.metric())?;
            let mut solved = solve_constants(s, &bundle, &v)?;
            if mode == SolitonMode::Gradient {
                solved.identity = "gradient_eta_ricci_soliton".into();
            }
            report.push_check(&solved, ctx);
            match solved.solved_constants.clone() {
                Some((lambda, mu)) => SolitonSpec { lambda, mu, ..probe },
                None => return Ok(Outcome::settled(report)),
            }
        }
        SolitonAction::Verify => {
            let (Some(l), Some(m)) = (&sec.lambda, &sec.mu) else {
                return Err(RunError::Usage("--verify needs `lambda` and `mu` in [soliton]".into()));
            };
            let spec = SolitonSpec { potential, lambda: l.expr(ctx)?, mu: m.expr(ctx)?, mode };
            report.push_check(&verify_soliton(s, &bundle, &conn, &spec)?, ctx);
            spec
        }
    };
    push_all(&mut report, &check_soliton_consequences(s, &bundle, &conn, &spec)?, chart);
    Ok(Outcome::settled(report))
}

/// `points` is ignored when the manifest lists sample points.
pub fn oracle(model: &Model, points: Option<usize>, tolerance: f64) -> Result<Outcome, RunError> {
    if !(tolerance > 0.0) || !tolerance.is_finite() {
        return Err(RunError::Usage(format!("tolerance must be a positive number, got {tolerance}")));
    }
    if points == Some(0) {
        return Err(RunError::Usage("--points must be at least 1".into()));
    }
    let mut report = model.report("oracle");
    let sample = if model.sample_points.is_empty() {
        seeded_points(model.chart.dimension(), points.unwrap_or(super::oracle::DEFAULT_POINTS))
    } else {
        if points.is_some() {
            report.warnings.push("--points ignored: the manifest lists sample points".into());
        }
        model.sample_points.clone()
    };
    let (conn, bundle) = model.geometry()?;
    let out = run_oracle(&model.metric, &conn, &bundle, &sample, &default_step());
    report.warnings.extend(out.skipped.iter().cloned());
    if out.evaluated == 0 {
        return Err(RunError::Usage(format!("every sample point was skipped: {}", out.skipped.join("; "))));
    }
    report.push_value("points_evaluated", out.evaluated.to_string());
    report.push_value("christoffel_deviation", format_deviation(&out.christoffel));
    report.push_value("riemann_deviation", format_deviation(&out.riemann));
    report.push_value("ricci_deviation", format_deviation(&out.ricci));
    report.push_value("max_deviation", format_deviation(out.max_deviation()));
    report.push_value("tolerance", format!("{tolerance:e}"));
    let verdict = VerdictReport::verdict("oracle", out.passed(tolerance));
    report.push_check(&verdict, model.chart.context());
    Ok(Outcome::settled(report))
}
