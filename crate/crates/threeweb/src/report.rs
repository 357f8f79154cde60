//! Versioned JSON and plain-text renderings of a classification run.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::classify::{ClassificationReport, IdentityVerdict, SamplerConfig};
use crate::corpus::{CorpusEntry, GoldenCheck, GoldenOutcome};
use crate::expr::{Bindings, WebDefinition};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WebInfo {
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub label: String,
    pub source: String,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub params: Bindings,
    /// Corpus index when the web is one of the reference examples.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub example: Option<usize>,
}

/// The document emitted by `classify --format json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema: u32,
    pub web: WebInfo,
    pub config: SamplerConfig,
    pub labels: Vec<String>,
    pub predicates: BTreeMap<String, IdentityVerdict>,
    pub classes: crate::classify::Classes,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t: Option<f64>,
    pub inconclusive: bool,
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub parameter_dependent: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub bindings: Vec<crate::classify::BindingReport>,
    pub samples: crate::classify::SampleStats,
    /// F/G labels carried from the reference table; never computed.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub reference_asserted: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub golden: Option<Vec<GoldenCheck>>,
}

impl ReportDocument {
    pub fn new(web: &WebDefinition, config: &SamplerConfig, report: ClassificationReport) -> Self {
        ReportDocument {
            schema: SCHEMA,
            web: WebInfo { label: web.label.clone(), source: web.to_source(), params: web.params.clone(), example: None },
            config: config.clone(),
            labels: report.labels(),
            predicates: report.predicates,
            classes: report.classes,
            t: report.t,
            inconclusive: report.inconclusive,
            parameter_dependent: report.parameter_dependent,
            bindings: report.bindings,
            samples: report.samples,
            reference_asserted: Vec::new(),
            golden: None,
        }
    }

    /// Attaches corpus metadata: F/G labels and golden-value checks.
    pub fn with_corpus(mut self, entry: &CorpusEntry, golden: Vec<GoldenCheck>) -> Self {
        self.web.example = Some(entry.index);
        self.reference_asserted = entry.table.fg().into_iter().map(str::to_string).collect();
        self.golden = Some(golden);
        self
    }

    pub fn holds(&self, name: &str) -> bool {
        self.predicates.get(name).is_some_and(|v| v.holds)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let name = if self.web.label.is_empty() { "(unnamed web)" } else { &self.web.label };
        let _ = writeln!(out, "web: {name}");
        for line in self.web.source.lines() {
            let _ = writeln!(out, "  {line}");
        }
        let _ = writeln!(
            out,
            "sampling: {} points in [{}, {}]^4, seed {}, tol {:e}",
            self.samples.points, self.config.lo, self.config.hi, self.config.seed, self.config.tol
        );
        let _ = writeln!(out, "labels: {}", self.labels.join(" "));
        if !self.reference_asserted.is_empty() {
            let _ = writeln!(out, "reference-asserted: {}", self.reference_asserted.join(" "));
        }
        if let Some(t) = self.t {
            let _ = writeln!(out, "t = a2/a1 = {t}");
        }
        let _ = writeln!(out, "classes:");
        for label in &self.labels {
            let _ = writeln!(out, "  {} ({label})", describe(label));
        }
        if self.parameter_dependent {
            let _ = writeln!(out, "parameter-dependent: bindings disagree");
        }
        for b in &self.bindings {
            let params: Vec<String> = b.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(out, "  binding {}: {}", params.join(", "), b.labels.join(" "));
        }
        if self.inconclusive {
            let _ = writeln!(out, "inconclusive: some residual lies within 10x of the tolerance");
        }
        let _ = writeln!(out, "predicates:");
        let width = self.predicates.keys().map(String::len).max().unwrap_or(0);
        for (k, v) in &self.predicates {
            let mark = match (v.holds, v.ambiguous) {
                (_, true) => "ambiguous",
                (true, _) => "holds",
                (false, _) => "fails",
            };
            let _ = write!(out, "  {k:<width$}  {mark:<9}  max residual {:.3e}", v.max_residual);
            if let Some(w) = v.witness {
                let _ = write!(out, "  at {w:?}");
            }
            out.push('\n');
        }
        if let Some(golden) = &self.golden {
            let count = |f: fn(&GoldenOutcome) -> bool| golden.iter().filter(|g| f(&g.outcome)).count();
            let _ = writeln!(
                out,
                "golden: {} pass, {} fail, {} logged discrepancies, {} unavailable",
                count(|o| *o == GoldenOutcome::Pass),
                count(|o| *o == GoldenOutcome::Fail),
                count(|o| *o == GoldenOutcome::LoggedDiscrepancy),
                count(|o| matches!(o, GoldenOutcome::Unavailable(_))),
            );
        }
        out
    }
}

/// Human-readable name of a class label.
pub fn describe(label: &str) -> &'static str {
    match label {
        "A1" => "integrable transversal distribution",
        "A2" => "non-integrable transversal distribution",
        "A11" => "a1, a2 both nonzero",
        "A111" => "hexagonal planar, constant t",
        "A112" => "a1 = a2, integrable diagonal",
        "A1121" => "a1 = a2, hexagonal planar diagonal",
        "A12" => "a2 = 0",
        "A121" => "a2 = 0, hexagonal planar",
        "A13" => "a1 = 0",
        "A131" => "a1 = 0, hexagonal planar",
        "B" => "isoclinicly geodesic",
        "C" | "C2" => "not transversally geodesic",
        "C1" => "almost algebraizable",
        "C11" => "almost Bol",
        "C12" => "almost parallelizable",
        "D" | "D1" => "transversally geodesic",
        "D22" => "hexagonal",
        "D21" => "Bol",
        "D231" => "group",
        "D232" => "parallelizable",
        l if l.starts_with('E') => "Pfaffian derivative pattern",
        _ => "unknown class",
    }
}
