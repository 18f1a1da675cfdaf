//! Run reports and their JSON and text renderings.

use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::kernel::ExprContext;
use crate::verdict::VerdictReport;

pub const TOOL: &str = "kenmotsu";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Named {
    pub name: String,
    pub value: String,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct WitnessEntry {
    pub index: Vec<usize>,
    pub component: String,
    pub value: String,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Solved {
    pub lambda: String,
    pub mu: String,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CheckEntry {
    pub name: String,
    pub status: String,
    pub witness: Option<WitnessEntry>,
    pub solved: Option<Solved>,
    pub classification: Option<String>,
    pub values: Vec<Named>,
    pub notes: Vec<String>,
}

impl CheckEntry {
    pub fn from_verdict(v: &VerdictReport, ctx: &ExprContext) -> CheckEntry {
        CheckEntry {
            name: v.identity.clone(),
            status: v.status.as_str().to_string(),
            witness: v.witness.as_ref().map(|w| WitnessEntry {
                index: w.index.clone(),
                component: w.label.clone(),
                value: w.expression.clone(),
            }),
            solved: v.solved_constants.as_ref().map(|(l, m)| Solved {
                lambda: l.display(ctx).to_string(),
                mu: m.display(ctx).to_string(),
            }),
            classification: v.classification.map(|c| c.as_str().to_string()),
            values: v.values.iter().map(|(n, e)| Named { name: n.clone(), value: e.display(ctx).to_string() }).collect(),
            notes: v.notes.clone(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Entry {
    pub component: String,
    pub value: String,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Section {
    pub name: String,
    pub entries: Vec<Entry>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ManifestInfo {
    pub source: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub manifest: ManifestInfo,
    pub status: String,
    pub checks: Vec<CheckEntry>,
    pub sections: Vec<Section>,
    pub values: Vec<Named>,
    pub warnings: Vec<String>,
    pub timing_ms: u64,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunReport {
    pub fn new(command: &str, source: &str, manifest_text: &str) -> RunReport {
        RunReport {
            tool: TOOL.to_string(),
            version: VERSION.to_string(),
            command: command.to_string(),
            manifest: ManifestInfo { source: source.to_string(), sha256: digest(manifest_text.as_bytes()) },
            status: "pass".to_string(),
            checks: Vec::new(),
            sections: Vec::new(),
            values: Vec::new(),
            warnings: Vec::new(),
            timing_ms: 0,
        }
    }

    pub fn push_check(&mut self, v: &VerdictReport, ctx: &ExprContext) {
        self.checks.push(CheckEntry::from_verdict(v, ctx));
    }

    pub fn push_value(&mut self, name: &str, value: impl Into<String>) {
        self.values.push(Named { name: name.to_string(), value: value.into() });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckEntry::passed)
    }

    /// Sets `status` from the checks.
    pub fn settle(&mut self) {
        self.status = if self.all_passed() { "pass" } else { "fail" }.to_string();
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self, color: bool) -> String {
        let paint = |s: &str, code: &str| if color { format!("\x1b[{code}m{s}\x1b[0m") } else { s.to_string() };
        let mut out = String::new();
        let _ = writeln!(out, "{} {} {}  manifest {} ({})", self.tool, self.version, self.command,
            self.manifest.source, &self.manifest.sha256[..12]);
        for w in &self.warnings {
            let _ = writeln!(out, "{} {w}", paint("warning:", "33"));
        }
        for s in &self.sections {
            let _ = writeln!(out, "\n{}:", s.name);
            if s.entries.is_empty() {
                let _ = writeln!(out, "  (all zero)");
            }
            for e in &s.entries {
                let _ = writeln!(out, "  {} = {}", e.component, e.value);
            }
        }
        if !self.values.is_empty() {
            let _ = writeln!(out);
            for v in &self.values {
                let _ = writeln!(out, "{} = {}", v.name, v.value);
            }
        }
        if !self.checks.is_empty() {
            let _ = writeln!(out);
        }
        for c in &self.checks {
            let tag = if c.passed() { paint("PASS", "32") } else { paint("FAIL", "31") };
            let _ = write!(out, "{tag} {}", c.name);
            if let Some(s) = &c.solved {
                let _ = write!(out, "  lambda = {}, mu = {}", s.lambda, s.mu);
            }
            if let Some(k) = &c.classification {
                let _ = write!(out, "  ({k})");
            }
            for v in &c.values {
                if c.solved.is_none() || (v.name != "lambda" && v.name != "mu") {
                    let _ = write!(out, "  {} = {}", v.name, v.value);
                }
            }
            if let Some(w) = &c.witness {
                if w.component.is_empty() {
                    let _ = write!(out, "  witness {}", w.value);
                } else {
                    let _ = write!(out, "  witness {} = {}", w.component, w.value);
                }
            }
            for n in &c.notes {
                let _ = write!(out, "  [{n}]");
            }
            out.push('\n');
        }
        let _ = writeln!(out, "\nresult: {}", self.status);
        out
    }
}
