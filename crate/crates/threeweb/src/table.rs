//! The fifteen-row classification table: computed A to E cells, carried F/G
//! cells, and a diff against the reference table.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::classify::{classify, Classes, SamplerConfig};
use crate::corpus::{self, CorpusEntry, TableRow};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diff {
    pub example: usize,
    pub column: String,
    pub expected: String,
    pub computed: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComputedRow {
    pub example: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub classes: Option<Classes>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    pub inconclusive: bool,
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub parameter_dependent: bool,
    pub expected: TableRow,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub schema: u32,
    pub config: SamplerConfig,
    pub rows: Vec<ComputedRow>,
    pub diffs: Vec<Diff>,
}

/// Compares computed classes with a printed row. A printed cell is matched by any
/// computed label that extends it (`C` accepts `C2`). Blank A, B and E cells claim
/// that the label is absent; a row with both C and D blank makes no C/D claim.
pub fn row_diffs(example: usize, expected: &TableRow, computed: Option<&Classes>) -> Vec<Diff> {
    let mut out = Vec::new();
    let mut push = |column: &str, want: &str, got: &str| {
        out.push(Diff { example, column: column.into(), expected: want.into(), computed: got.into() });
    };
    let Some(c) = computed else {
        for (col, want) in [("A", &expected.a), ("B", &expected.b), ("C/D", &expected.c), ("C/D", &expected.d), ("E", &expected.e)] {
            if !want.is_empty() {
                push(col, want, "error");
            }
        }
        return out;
    };
    let matches = |want: &str, got: &str| if want.is_empty() { got.is_empty() } else { got.starts_with(want) };
    let a = c.a.as_deref().unwrap_or("");
    if !matches(&expected.a, a) {
        push("A", &expected.a, a);
    }
    if (expected.b == "B") != c.b {
        push("B", &expected.b, if c.b { "B" } else { "" });
    }
    let cd = if expected.c.is_empty() { &expected.d } else { &expected.c };
    if !cd.is_empty() && !c.cd.starts_with(cd.as_str()) {
        push("C/D", cd, &c.cd);
    }
    let e = c.e.as_deref().unwrap_or("");
    if !matches(&expected.e, e) {
        push("E", &expected.e, e);
    }
    out
}

fn compute_row(entry: &CorpusEntry, cfg: &SamplerConfig) -> ComputedRow {
    let (classes, error, inconclusive, parameter_dependent) = match classify(&entry.web, cfg, false) {
        Ok(r) => (Some(r.classes), None, r.inconclusive, r.parameter_dependent),
        Err(e) => (None, Some(e.to_string()), false, false),
    };
    ComputedRow { example: entry.index, classes, error, inconclusive, parameter_dependent, expected: entry.table.clone() }
}

/// Classifies every corpus web, one thread per row.
pub fn compute(cfg: &SamplerConfig) -> Table {
    let entries = corpus::all();
    let rows: Vec<ComputedRow> = std::thread::scope(|s| {
        let handles: Vec<_> = entries.iter().map(|e| s.spawn(move || compute_row(e, cfg))).collect();
        handles.into_iter().map(|h| h.join().expect("classification thread panicked")).collect()
    });
    let diffs = rows.iter().flat_map(|r| row_diffs(r.example, &r.expected, r.classes.as_ref())).collect();
    Table { schema: crate::report::SCHEMA, config: cfg.clone(), rows, diffs }
}

impl Table {
    pub fn inconclusive(&self) -> bool {
        self.rows.iter().any(|r| r.inconclusive || r.parameter_dependent)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<3} {:<6} {:<2} {:<5} {:<5} {:<4}  F/G (reference-asserted)", "Ex", "A", "B", "C", "D", "E");
        for r in &self.rows {
            let (a, b, c, d, e) = match &r.classes {
                Some(k) => {
                    let (c, d) = if k.cd.starts_with('C') { (k.cd.as_str(), "") } else { ("", k.cd.as_str()) };
                    (k.a.as_deref().unwrap_or("-"), if k.b { "B" } else { "" }, c, d, k.e.as_deref().unwrap_or("-"))
                }
                None => ("error", "", "", "", ""),
            };
            let fg = r.expected.fg().join(" ");
            let mut flags = String::new();
            if r.inconclusive {
                flags.push_str(" inconclusive");
            }
            if r.parameter_dependent {
                flags.push_str(" parameter-dependent");
            }
            let line = format!("{:<3} {a:<6} {b:<2} {c:<5} {d:<5} {e:<4}  {fg:<21}{flags}", r.example);
            let _ = writeln!(out, "{}", line.trim_end());
        }
        for r in self.rows.iter().filter(|r| r.error.is_some()) {
            let _ = writeln!(out, "example {}: {}", r.example, r.error.as_deref().unwrap_or_default());
        }
        let _ = writeln!(out, "diffs against the reference table: {}", self.diffs.len());
        for d in &self.diffs {
            let _ = writeln!(
                out,
                "  example {} column {}: expected {}, computed {}",
                d.example,
                d.column,
                if d.expected.is_empty() { "(blank)" } else { &d.expected },
                if d.computed.is_empty() { "(blank)" } else { &d.computed }
            );
        }
        out
    }
}
