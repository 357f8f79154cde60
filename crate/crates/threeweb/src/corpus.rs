//! The fifteen reference webs: definitions, stored sample points, printed
//! closed forms of their invariants and the expected classification row.
//!
//! Each example is a DSL file `corpus/exampleNN.web` with a JSON sidecar
//! `corpus/exampleNN.json`; both are compiled into the library.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{eval_expr, parse_expr, parse_web, Bindings, Expr, ParseError, WebDefinition};
use crate::tensor::PipelineError;
use crate::Snapshot;

pub const COUNT: usize = 15;

/// Relative tolerance for golden comparisons, on `max(1, |expected|)`.
pub const GOLDEN_TOL: f64 = 1e-7;

const SOURCES: [(&str, &str); COUNT] = [
    (include_str!("../../../corpus/example01.web"), include_str!("../../../corpus/example01.json")),
    (include_str!("../../../corpus/example02.web"), include_str!("../../../corpus/example02.json")),
    (include_str!("../../../corpus/example03.web"), include_str!("../../../corpus/example03.json")),
    (include_str!("../../../corpus/example04.web"), include_str!("../../../corpus/example04.json")),
    (include_str!("../../../corpus/example05.web"), include_str!("../../../corpus/example05.json")),
    (include_str!("../../../corpus/example06.web"), include_str!("../../../corpus/example06.json")),
    (include_str!("../../../corpus/example07.web"), include_str!("../../../corpus/example07.json")),
    (include_str!("../../../corpus/example08.web"), include_str!("../../../corpus/example08.json")),
    (include_str!("../../../corpus/example09.web"), include_str!("../../../corpus/example09.json")),
    (include_str!("../../../corpus/example10.web"), include_str!("../../../corpus/example10.json")),
    (include_str!("../../../corpus/example11.web"), include_str!("../../../corpus/example11.json")),
    (include_str!("../../../corpus/example12.web"), include_str!("../../../corpus/example12.json")),
    (include_str!("../../../corpus/example13.web"), include_str!("../../../corpus/example13.json")),
    (include_str!("../../../corpus/example14.web"), include_str!("../../../corpus/example14.json")),
    (include_str!("../../../corpus/example15.web"), include_str!("../../../corpus/example15.json")),
];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("no example {0}; the corpus has examples 1 to {COUNT}")]
    NoSuchExample(usize),
    #[error("example {index}: {source}")]
    Parse { index: usize, source: ParseError },
    #[error("example {index}: malformed sidecar: {source}")]
    Sidecar { index: usize, source: serde_json::Error },
    #[error("example {index}: golden record `{path}`: {message}")]
    Golden { index: usize, path: String, message: String },
}

/// Addresses one component of a snapshot, e.g. `gamma^2_11`, `a_1`, `b^2_111`, `p_12`, `a4^1_122`.
/// Indices are 1-based as written.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TensorPath {
    Gamma([usize; 3]),
    Torsion([usize; 3]),
    Covector(usize),
    Curvature([usize; 4]),
    ATensor([usize; 4]),
    P([usize; 2]),
    Q([usize; 2]),
    F([usize; 2]),
    G([usize; 2]),
    H([usize; 2]),
}

impl TensorPath {
    pub fn get(&self, s: &Snapshot) -> f64 {
        match *self {
            TensorPath::Gamma([i, j, k]) => s.gamma[i][j][k],
            TensorPath::Torsion([i, j, k]) => s.torsion[i][j][k],
            TensorPath::Covector(i) => s.a[i],
            TensorPath::Curvature([i, j, k, l]) => s.b[i][j][k][l],
            TensorPath::ATensor([i, j, k, l]) => s.a4[i][j][k][l],
            TensorPath::P([i, j]) => s.p[i][j],
            TensorPath::Q([i, j]) => s.q[i][j],
            TensorPath::F([i, j]) => s.f[i][j],
            TensorPath::G([i, j]) => s.g[i][j],
            TensorPath::H([i, j]) => s.h[i][j],
        }
    }
}

fn digits<const N: usize>(s: &str) -> Option<[usize; N]> {
    let v: Vec<usize> = s
        .chars()
        .map(|c| match c {
            '1' => Some(0),
            '2' => Some(1),
            _ => None,
        })
        .collect::<Option<_>>()?;
    v.try_into().ok()
}

impl FromStr for TensorPath {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("bad tensor path `{s}`");
        let (head, lower) = s.split_once('_').ok_or_else(bad)?;
        let (name, upper) = match head.split_once('^') {
            Some((n, u)) => (n, Some(u)),
            None => (head, None),
        };
        let path = match (name, upper) {
            ("a", None) => TensorPath::Covector(digits::<1>(lower).ok_or_else(bad)?[0]),
            ("p", None) => TensorPath::P(digits(lower).ok_or_else(bad)?),
            ("q", None) => TensorPath::Q(digits(lower).ok_or_else(bad)?),
            ("f", None) => TensorPath::F(digits(lower).ok_or_else(bad)?),
            ("g", None) => TensorPath::G(digits(lower).ok_or_else(bad)?),
            ("h", None) => TensorPath::H(digits(lower).ok_or_else(bad)?),
            (n, Some(u)) => {
                let [i] = digits::<1>(u).ok_or_else(bad)?;
                match n {
                    "gamma" => {
                        let [j, k] = digits(lower).ok_or_else(bad)?;
                        TensorPath::Gamma([i, j, k])
                    }
                    "torsion" => {
                        let [j, k] = digits(lower).ok_or_else(bad)?;
                        TensorPath::Torsion([i, j, k])
                    }
                    "b" => {
                        let [j, k, l] = digits(lower).ok_or_else(bad)?;
                        TensorPath::Curvature([i, j, k, l])
                    }
                    "a4" => {
                        let [j, k, l] = digits(lower).ok_or_else(bad)?;
                        TensorPath::ATensor([i, j, k, l])
                    }
                    _ => return Err(bad()),
                }
            }
            _ => return Err(bad()),
        };
        Ok(path)
    }
}

impl fmt::Display for TensorPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx = |v: &[usize]| v.iter().map(|i| char::from(b'1' + *i as u8)).collect::<String>();
        match self {
            TensorPath::Gamma(v) => write!(f, "gamma^{}_{}", idx(&v[..1]), idx(&v[1..])),
            TensorPath::Torsion(v) => write!(f, "torsion^{}_{}", idx(&v[..1]), idx(&v[1..])),
            TensorPath::Covector(i) => write!(f, "a_{}", idx(&[*i])),
            TensorPath::Curvature(v) => write!(f, "b^{}_{}", idx(&v[..1]), idx(&v[1..])),
            TensorPath::ATensor(v) => write!(f, "a4^{}_{}", idx(&v[..1]), idx(&v[1..])),
            TensorPath::P(v) => write!(f, "p_{}", idx(v)),
            TensorPath::Q(v) => write!(f, "q_{}", idx(v)),
            TensorPath::F(v) => write!(f, "f_{}", idx(v)),
            TensorPath::G(v) => write!(f, "g_{}", idx(v)),
            TensorPath::H(v) => write!(f, "h_{}", idx(v)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reliability {
    /// Agrees with the finite-difference oracle; must match the pipeline.
    Verified,
    /// Disagrees with recomputation; mismatches are logged, not failed.
    PrintedOnly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoldenRecord {
    pub path: TensorPath,
    pub expr: Expr,
    pub source: String,
    pub reliability: Reliability,
    pub note: Option<String>,
}

/// One row of the printed classification table; blank cells are empty strings.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub a: String,
    pub b: String,
    pub c: String,
    pub d: String,
    pub e: String,
    pub f: String,
    pub g: String,
}

impl TableRow {
    /// Non-blank A to E cells.
    pub fn expected_labels(&self) -> Vec<&str> {
        [&self.a, &self.b, &self.c, &self.d, &self.e].into_iter().map(String::as_str).filter(|s| !s.is_empty()).collect()
    }

    /// The F/G cells, carried as metadata only.
    pub fn fg(&self) -> Vec<&str> {
        [&self.f, &self.g].into_iter().map(String::as_str).filter(|s| !s.is_empty()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub index: usize,
    pub web: WebDefinition,
    pub source: &'static str,
    pub table: TableRow,
    pub points: Vec<[f64; 4]>,
    pub golden: Vec<GoldenRecord>,
    pub notes: Vec<String>,
}

#[derive(Deserialize)]
struct RawRecord {
    path: String,
    expr: String,
    reliability: Reliability,
    #[serde(default)]
    note: Option<String>,
}

#[derive(Deserialize)]
struct Sidecar {
    index: usize,
    table: TableRow,
    points: Vec<[f64; 4]>,
    golden: Vec<RawRecord>,
    #[serde(default)]
    notes: Vec<String>,
}

/// Loads example `n` (1 to 15).
pub fn load_example(n: usize) -> Result<CorpusEntry, CorpusError> {
    let (src, json) = *SOURCES.get(n.wrapping_sub(1)).ok_or(CorpusError::NoSuchExample(n))?;
    let web = parse_web(src).map_err(|source| CorpusError::Parse { index: n, source })?;
    let side: Sidecar = serde_json::from_str(json).map_err(|source| CorpusError::Sidecar { index: n, source })?;
    debug_assert_eq!(side.index, n);
    let golden = side
        .golden
        .into_iter()
        .map(|r| {
            let err = |message: String| CorpusError::Golden { index: n, path: r.path.clone(), message };
            let path = r.path.parse().map_err(err)?;
            let expr = parse_expr(&r.expr, &[]).map_err(|e| err(e.to_string()))?;
            Ok(GoldenRecord { path, expr, source: r.expr, reliability: r.reliability, note: r.note })
        })
        .collect::<Result<_, CorpusError>>()?;
    Ok(CorpusEntry { index: n, web, source: src, table: side.table, points: side.points, golden, notes: side.notes })
}

/// All fifteen examples in order.
pub fn all() -> Vec<CorpusEntry> {
    (1..=COUNT).map(|n| load_example(n).expect("built-in corpus is well formed")).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GoldenOutcome {
    Pass,
    Fail,
    LoggedDiscrepancy,
    /// The pipeline could not produce a snapshot at the point.
    Unavailable(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldenCheck {
    pub path: String,
    pub point: [f64; 4],
    pub expected: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub actual: Option<f64>,
    pub reliability: Reliability,
    pub outcome: GoldenOutcome,
}

/// True when `actual` matches `expected` to [`GOLDEN_TOL`].
pub fn golden_agrees(expected: f64, actual: f64) -> bool {
    (expected - actual).abs() <= GOLDEN_TOL * expected.abs().max(1.0)
}

/// Compares every golden record at every stored point against `produce`.
pub fn golden_check(
    entry: &CorpusEntry,
    produce: impl Fn(&WebDefinition, [f64; 4]) -> Result<Snapshot, PipelineError>,
) -> Vec<GoldenCheck> {
    let mut out = Vec::new();
    for &point in &entry.points {
        let snap = produce(&entry.web, point);
        for rec in &entry.golden {
            let expected = eval_expr(&rec.expr, point, &Bindings::new()).unwrap_or(f64::NAN);
            let (actual, outcome) = match &snap {
                Err(e) => (None, GoldenOutcome::Unavailable(e.to_string())),
                Ok(s) => {
                    let actual = rec.path.get(s);
                    let outcome = if golden_agrees(expected, actual) {
                        GoldenOutcome::Pass
                    } else if rec.reliability == Reliability::Verified {
                        GoldenOutcome::Fail
                    } else {
                        GoldenOutcome::LoggedDiscrepancy
                    };
                    (Some(actual), outcome)
                }
            };
            out.push(GoldenCheck {
                path: rec.path.to_string(),
                point,
                expected,
                actual,
                reliability: rec.reliability,
                outcome,
            });
        }
    }
    out
}
