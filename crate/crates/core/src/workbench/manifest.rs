//! Sectioned `key = value` manifests.
//!
//! See `docs/manifest.md` for the grammar. Values are kept with their source
//! position so expression errors can point at a line and column.

use std::fmt;

use num_rational::{BigRational, Rational64};
use thiserror::Error;

use crate::kernel::{ExprContext, ExprError, ScalarExpr};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ManifestError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ManifestError {
    fn at(v: &Located, message: impl Into<String>) -> ManifestError {
        ManifestError { line: v.line, column: v.column, message: message.into() }
    }

    fn header(line: usize, message: impl Into<String>) -> ManifestError {
        ManifestError { line, column: 1, message: message.into() }
    }
}

/// Text with the 1-based position of its first character.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Located {
    pub text: String,
    pub line: usize,
    pub column: usize,
}

impl Located {
    /// Splits a comma list, keeping each item's position.
    pub fn split_list(&self) -> Vec<Located> {
        let mut out = Vec::new();
        let mut start = 0;
        let bytes: Vec<(usize, char)> = self.text.char_indices().collect();
        let mut pieces: Vec<(usize, usize)> = Vec::new();
        for &(i, ch) in &bytes {
            if ch == ',' {
                pieces.push((start, i));
                start = i + 1;
            }
        }
        pieces.push((start, self.text.len()));
        for (a, b) in pieces {
            let raw = &self.text[a..b];
            let lead = raw.len() - raw.trim_start().len();
            out.push(Located {
                text: raw.trim().to_string(),
                line: self.line,
                column: self.column + self.text[..a + lead].chars().count(),
            });
        }
        out
    }

    /// Parses as an expression; syntax positions are shifted to the manifest.
    pub fn expr(&self, ctx: &ExprContext) -> Result<ScalarExpr, ManifestError> {
        if self.text.is_empty() {
            return Err(ManifestError::at(self, "empty expression"));
        }
        ctx.parse(&self.text).map_err(|e| {
            let (col, msg) = match &e {
                ExprError::Syntax { column, .. }
                | ExprError::UnknownIdentifier { column, .. }
                | ExprError::NonlinearExponent { column }
                | ExprError::SyntacticDivisionByZero { column } => (Some(*column), e.to_string()),
                _ => (None, e.to_string()),
            };
            ManifestError {
                line: self.line,
                column: col.map_or(self.column, |c| self.column + c - 1),
                message: msg,
            }
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StructureSection {
    pub xi: Option<Located>,
    pub eta: Option<Located>,
    /// `(upper coordinate, row)` pairs in file order.
    pub phi: Vec<(String, Located)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolitonSection {
    pub vector: Option<Located>,
    pub potential: Option<Located>,
    pub lambda: Option<Located>,
    pub mu: Option<Located>,
    pub mode: Option<Located>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Manifest {
    pub coordinates: Vec<Located>,
    pub exp_generators: Vec<Located>,
    /// `(row, column, value)` keyed by coordinate names.
    pub metric: Vec<(String, String, Located)>,
    pub structure: Option<StructureSection>,
    pub soliton: Option<SolitonSection>,
    pub frame: Vec<(String, Located)>,
    pub checks: Option<Vec<Located>>,
    pub sample_points: Vec<(String, Located)>,
}

const SECTIONS: [&str; 7] = ["manifold", "metric", "structure", "soliton", "frame", "checks", "sample_points"];

impl Manifest {
    pub fn parse(text: &str) -> Result<Manifest, ManifestError> {
        let mut m = Manifest::default();
        let mut section: Option<String> = None;
        let mut seen_sections: Vec<String> = Vec::new();
        let mut seen_keys: Vec<(String, String)> = Vec::new();
        let mut coords_line = None;
        for (ln, raw) in text.lines().enumerate() {
            let line = ln + 1;
            let content = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            };
            let trimmed = content.trim();
            if trimmed.is_empty() {
                continue;
            }
            if trimmed.starts_with('[') {
                if !trimmed.ends_with(']') {
                    return Err(ManifestError::header(line, "unterminated section header"));
                }
                let name = trimmed[1..trimmed.len() - 1].trim().to_string();
                if !SECTIONS.contains(&name.as_str()) {
                    return Err(ManifestError::header(line, format!("unknown section [{name}]")));
                }
                if seen_sections.contains(&name) {
                    return Err(ManifestError::header(line, format!("duplicate section [{name}]")));
                }
                seen_sections.push(name.clone());
                match name.as_str() {
                    "structure" => m.structure = Some(StructureSection::default()),
                    "soliton" => m.soliton = Some(SolitonSection::default()),
                    "checks" => m.checks = Some(Vec::new()),
                    _ => {}
                }
                section = Some(name);
                continue;
            }
            let Some(eq) = content.find('=') else {
                let col = raw.len() - raw.trim_start().len() + 1;
                return Err(ManifestError { line, column: col, message: "expected `key = value`".into() });
            };
            let key_raw = &content[..eq];
            let key = key_raw.trim().to_string();
            let key_col = key_raw.len() - key_raw.trim_start().len() + 1;
            let value_raw = &content[eq + 1..];
            let lead = value_raw.len() - value_raw.trim_start().len();
            let value = Located {
                text: value_raw.trim().to_string(),
                line,
                column: content[..eq + 1 + lead].chars().count() + 1,
            };
            let key_loc = Located { text: key.clone(), line, column: key_col };
            let Some(sec) = section.clone() else {
                return Err(ManifestError::at(&key_loc, "key outside of any section"));
            };
            if seen_keys.contains(&(sec.clone(), key.clone())) {
                return Err(ManifestError::at(&key_loc, format!("duplicate key `{key}`")));
            }
            seen_keys.push((sec.clone(), key.clone()));
            match sec.as_str() {
                "manifold" => match key.as_str() {
                    "coordinates" => {
                        m.coordinates = value.split_list();
                        coords_line = Some(line);
                    }
                    "exp_generators" => m.exp_generators = value.split_list(),
                    _ => return Err(ManifestError::at(&key_loc, format!("unknown key `{key}` in [manifold]"))),
                },
                "metric" => {
                    let Some((a, b)) = key.split_once('.') else {
                        return Err(ManifestError::at(&key_loc, "metric keys have the form `row.column`"));
                    };
                    m.metric.push((a.trim().to_string(), b.trim().to_string(), value));
                }
                "structure" => {
                    let s = m.structure.as_mut().expect("section opened");
                    match key.as_str() {
                        "xi" => s.xi = Some(value),
                        "eta" => s.eta = Some(value),
                        _ => match key.strip_prefix("phi.") {
                            Some(row) => s.phi.push((row.trim().to_string(), value)),
                            None => {
                                return Err(ManifestError::at(&key_loc, format!("unknown key `{key}` in [structure]")))
                            }
                        },
                    }
                }
                "soliton" => {
                    let s = m.soliton.as_mut().expect("section opened");
                    let slot = match key.as_str() {
                        "V" => &mut s.vector,
                        "potential" => &mut s.potential,
                        "lambda" => &mut s.lambda,
                        "mu" => &mut s.mu,
                        "mode" => &mut s.mode,
                        _ => return Err(ManifestError::at(&key_loc, format!("unknown key `{key}` in [soliton]"))),
                    };
                    *slot = Some(value);
                }
                "frame" => m.frame.push((key, value)),
                "checks" => {
                    if key != "select" {
                        return Err(ManifestError::at(&key_loc, format!("unknown key `{key}` in [checks]")));
                    }
                    m.checks = Some(value.split_list());
                }
                "sample_points" => m.sample_points.push((key, value)),
                _ => unreachable!("section names are validated"),
            }
        }
        if coords_line.is_none() {
            return Err(ManifestError::header(1, "missing `coordinates` in [manifold]"));
        }
        Ok(m)
    }

    /// Expression context from the `[manifold]` section.
    pub fn context(&self) -> Result<ExprContext, ManifestError> {
        let names: Vec<&str> = self.coordinates.iter().map(|c| c.text.as_str()).collect();
        let first = &self.coordinates[0];
        let plain = ExprContext::new(&names).map_err(|e| ManifestError::at(first, e.to_string()))?;
        let mut forms = Vec::new();
        for g in &self.exp_generators {
            let e = g.expr(&plain)?;
            let form = e.as_linear_form().ok_or_else(|| ManifestError::at(g, "exp generator is not a linear form"))?;
            forms.push(form);
        }
        ExprContext::with_generators(&names, forms).map_err(|e| {
            let at = self.exp_generators.first().unwrap_or(first);
            ManifestError::at(at, e.to_string())
        })
    }

    /// Upper triangle rows `g[i][i..]`; every entry must be present exactly once.
    pub fn metric_upper_triangle(&self, ctx: &ExprContext) -> Result<Vec<Vec<ScalarExpr>>, ManifestError> {
        let n = ctx.dimension();
        let mut slots: Vec<Vec<Option<ScalarExpr>>> = (0..n).map(|i| vec![None; n - i]).collect();
        for (a, b, v) in &self.metric {
            let key = Located { text: format!("{a}.{b}"), line: v.line, column: 1 };
            let i = ctx.index_of(a).map_err(|e| ManifestError::at(&key, e.to_string()))?;
            let j = ctx.index_of(b).map_err(|e| ManifestError::at(&key, e.to_string()))?;
            let (i, j) = if i <= j { (i, j) } else { (j, i) };
            if slots[i][j - i].is_some() {
                return Err(ManifestError::at(&key, format!("metric component {a}.{b} given twice")));
            }
            slots[i][j - i] = Some(v.expr(ctx)?);
        }
        let mut rows = Vec::with_capacity(n);
        for (i, row) in slots.into_iter().enumerate() {
            let mut r = Vec::with_capacity(row.len());
            for (k, e) in row.into_iter().enumerate() {
                match e {
                    Some(e) => r.push(e),
                    None => {
                        let names = ctx.coordinates();
                        return Err(ManifestError::header(
                            self.metric.last().map_or(1, |m| m.2.line),
                            format!("missing metric component {}.{}", names[i], names[i + k]),
                        ));
                    }
                }
            }
            rows.push(r);
        }
        Ok(rows)
    }

    /// Parses a comma list of exactly `dimension` expressions.
    pub fn components(v: &Located, ctx: &ExprContext) -> Result<Vec<ScalarExpr>, ManifestError> {
        let items = v.split_list();
        if items.len() != ctx.dimension() {
            return Err(ManifestError::at(v, format!("expected {} components, got {}", ctx.dimension(), items.len())));
        }
        items.iter().map(|i| i.expr(ctx)).collect()
    }

    /// Parses a comma list of rational constants.
    pub fn point(v: &Located, ctx: &ExprContext) -> Result<Vec<BigRational>, ManifestError> {
        let items = v.split_list();
        if items.len() != ctx.dimension() {
            return Err(ManifestError::at(v, format!("expected {} coordinates, got {}", ctx.dimension(), items.len())));
        }
        items
            .iter()
            .map(|i| i.expr(ctx)?.as_constant().ok_or_else(|| ManifestError::at(i, "sample point entries must be constants")))
            .collect()
    }
}

/// Writes manifests in the canonical layout read by [`Manifest::parse`].
#[derive(Default)]
pub struct ManifestWriter {
    out: String,
}

impl ManifestWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn comment(&mut self, text: &str) -> &mut Self {
        self.out.push_str("# ");
        self.out.push_str(text);
        self.out.push('\n');
        self
    }

    pub fn section(&mut self, name: &str) -> &mut Self {
        if !self.out.is_empty() {
            self.out.push('\n');
        }
        self.out.push('[');
        self.out.push_str(name);
        self.out.push_str("]\n");
        self
    }

    pub fn entry(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.out.push_str(&format!("{key} = {value}\n"));
        self
    }

    pub fn list<I: IntoIterator<Item = String>>(&mut self, key: &str, items: I) -> &mut Self {
        let v: Vec<String> = items.into_iter().collect();
        self.entry(key, v.join(", "))
    }

    pub fn finish(&mut self) -> String {
        std::mem::take(&mut self.out)
    }
}

/// Formats a linear form for the `exp_generators` key.
pub fn format_generator(ctx: &ExprContext, form: &[Rational64]) -> String {
    ctx.format_linear_form(form)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
[manifold]
coordinates = x, y, z   # chart

[metric]
x.x = 1
x.y = 0
x.z = 0
y.y = 1
y.z = 0
z.z = 1

[structure]
xi = 0, 0, 1
phi.x = 0, -1, 0
phi.y = 1, 0, 0
phi.z = 0, 0, 0
";

    #[test]
    fn parses_sections_and_positions() {
        let m = Manifest::parse(SMALL).unwrap();
        assert_eq!(m.coordinates.iter().map(|c| c.text.as_str()).collect::<Vec<_>>(), ["x", "y", "z"]);
        assert_eq!((m.coordinates[1].line, m.coordinates[1].column), (2, 18));
        let ctx = m.context().unwrap();
        assert_eq!(m.metric_upper_triangle(&ctx).unwrap().len(), 3);
        let s = m.structure.unwrap();
        assert_eq!(s.phi.len(), 3);
        assert_eq!(s.xi.unwrap().column, 6);
    }

    #[test]
    fn missing_metric_component_is_reported() {
        let text = SMALL.replace("y.z = 0\n", "");
        let m = Manifest::parse(&text).unwrap();
        let err = m.metric_upper_triangle(&m.context().unwrap()).unwrap_err();
        assert!(err.message.contains("missing metric component y.z"), "{err}");
    }

    #[test]
    fn expression_errors_point_into_the_file() {
        let text = SMALL.replace("x.z = 0", "x.z = 1 + w");
        let m = Manifest::parse(&text).unwrap();
        let err = m.metric_upper_triangle(&m.context().unwrap()).unwrap_err();
        assert_eq!((err.line, err.column), (7, 11));
    }

    #[test]
    fn structural_errors() {
        assert_eq!(Manifest::parse("[manifold]\ncoordinates x\n").unwrap_err().line, 2);
        assert!(Manifest::parse("[bogus]\n").unwrap_err().message.contains("unknown section"));
        assert!(Manifest::parse("x = 1\n").unwrap_err().message.contains("outside"));
        assert!(Manifest::parse("[metric]\nx.x = 1\n").unwrap_err().message.contains("coordinates"));
        let dup = "[manifold]\ncoordinates = x\ncoordinates = y\n";
        assert_eq!(Manifest::parse(dup).unwrap_err().line, 3);
    }

    #[test]
    fn writer_output_reparses() {
        let text = ManifestWriter::new()
            .section("manifold")
            .list("coordinates", ["t".to_string(), "x".to_string()])
            .list("exp_generators", ["2*t".to_string()])
            .section("metric")
            .entry("t.t", "1")
            .entry("t.x", "0")
            .entry("x.x", "exp(2*t)")
            .finish();
        let m = Manifest::parse(&text).unwrap();
        let ctx = m.context().unwrap();
        assert_eq!(ctx.exp_generators().len(), 1);
        let rows = m.metric_upper_triangle(&ctx).unwrap();
        assert_eq!(rows[1][0], ctx.parse("exp(2*t)").unwrap());
    }
}
