//! Class membership by randomized identity testing.
//!
//! Every "holds identically" claim is a field on the sample set that must
//! vanish at all sampled points relative to its natural scale. Scales are
//! built from the magnitudes of the terms that enter the field, so that
//! cancellation near singular loci is measured against the right size:
//! `s1 = max(1, |Γ|, |a|)` for first-order quantities and
//! `s2 = max(1, s1², |∂Γ|, |∂a|, |b|, |p|, |q|)` for second-order ones.

mod sample;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{Bindings, WebDefinition};
use crate::tensor::{M2, T4};
use crate::Snapshot;

pub use sample::{
    sample, test_identity, test_identity_on, IdentityVerdict, Residual, SampleError, SampleSet, SampleStats,
    SamplerConfig,
};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error("parameter binding {binding:?}: {source}")]
    Binding { binding: Bindings, source: SampleError },
    #[error("invalid configuration: {0}")]
    Config(String),
}

fn max_abs<'a>(vals: impl IntoIterator<Item = &'a f64>) -> f64 {
    vals.into_iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn m2_iter(m: &M2<f64>) -> impl Iterator<Item = &f64> {
    m.iter().flatten()
}

fn t4_iter(t: &T4<f64>) -> impl Iterator<Item = &f64> {
    t.iter().flatten().flatten().flatten()
}

/// First-order scale: connection and torsion covector.
pub fn scale1(s: &Snapshot) -> f64 {
    1f64.max(max_abs(s.gamma.iter().flatten().flatten())).max(max_abs(&s.a))
}

/// Second-order scale: curvature-level quantities and the terms they are assembled from.
pub fn scale2(s: &Snapshot) -> f64 {
    let s1 = scale1(s);
    [
        s1 * s1,
        max_abs(t4_iter(&s.dgamma_x)),
        max_abs(t4_iter(&s.dgamma_y)),
        max_abs(m2_iter(&s.da_x)),
        max_abs(m2_iter(&s.da_y)),
        max_abs(t4_iter(&s.b)),
        max_abs(m2_iter(&s.p)),
        max_abs(m2_iter(&s.q)),
    ]
    .into_iter()
    .fold(1.0, f64::max)
}

fn sym(m: &M2<f64>) -> f64 {
    (m[0][1] + m[1][0]) / 2.0
}

/// Left-hand sides of the two integrability conditions of the transversal a-distribution.
pub fn integrability_forms(s: &Snapshot) -> [f64; 2] {
    let [a1, a2] = s.a;
    let form = |m: &M2<f64>| a2 * a2 * m[0][0] - 2.0 * a1 * a2 * sym(m) + a1 * a1 * m[1][1];
    [form(&s.p), form(&s.q)]
}

/// The quartic and the two cubic planar-hexagonality polynomials at `t`.
pub fn hexagonality_polynomials(s: &Snapshot, t: f64) -> (f64, f64, f64) {
    hexagonality_from_sym(&s.b_sym(), t)
}

fn hexagonality_from_sym(bs: &T4<f64>, t: f64) -> (f64, f64, f64) {
    let c = |i: usize| {
        let b = &bs[i];
        -b[0][0][0] * t.powi(3) + 3.0 * b[0][0][1] * t * t - 3.0 * b[0][1][1] * t + b[1][1][1]
    };
    let b1 = &bs[0];
    let b2 = &bs[1];
    let v16 = b2[0][0][0] * t.powi(4) - (3.0 * b2[0][0][1] - b1[0][0][0]) * t.powi(3)
        + 3.0 * (b2[0][1][1] - b1[0][0][1]) * t * t
        - (b2[1][1][1] - 3.0 * b1[0][1][1]) * t
        - b1[1][1][1];
    (v16, c(0), c(1))
}

/// Names of the predicates, in report order.
pub mod names {
    pub const ISOCLINIC: &str = "isoclinic";
    pub const ISOCLINICLY_GEODESIC: &str = "isoclinicly_geodesic";
    pub const TRANSVERSALLY_GEODESIC: &str = "transversally_geodesic";
    pub const ALMOST_ALGEBRAIZABLE: &str = "almost_algebraizable";
    pub const ALMOST_BOL: &str = "almost_bol";
    pub const ALMOST_PARALLELIZABLE: &str = "almost_parallelizable";
    pub const HEXAGONAL: &str = "hexagonal";
    pub const BOL: &str = "bol";
    pub const GROUP: &str = "group";
    pub const PARALLELIZABLE: &str = "parallelizable";
    pub const CURVATURE_ZERO: &str = "curvature_zero";
    pub const INTEGRABLE: &str = "integrable_distribution";
    pub const A1_ZERO: &str = "a1_zero";
    pub const A2_ZERO: &str = "a2_zero";
    pub const A1_EQ_A2: &str = "a1_eq_a2";
    pub const T_CONSTANT: &str = "t_constant";
    pub const P22_Q22_ZERO: &str = "p22_q22_zero";
    pub const P11_Q11_ZERO: &str = "p11_q11_zero";
    pub const DIAGONAL_INTEGRABLE: &str = "diagonal_integrable";
    pub const OMEGA21_ZERO: &str = "omega21_zero";
    pub const OMEGA12_ZERO: &str = "omega12_zero";
    pub const OMEGA_DIAGONAL: &str = "omega_diagonal";
    pub const B222_ZERO: &str = "b222_zero";
    pub const B111_ZERO: &str = "b111_zero";
    pub const PLANAR_HEXAGONAL_DIAGONAL: &str = "planar_hexagonal_diagonal";
    pub const PLANAR_HEXAGONAL_T: &str = "planar_hexagonal_t";
    pub const GEODESIC_T: &str = "geodesic_t";
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classes {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub a: Option<String>,
    pub b: bool,
    pub cd: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub e: Option<String>,
}

impl Classes {
    /// Labels in column order A, B, C/D, E.
    pub fn labels(&self) -> Vec<String> {
        let mut out = Vec::new();
        out.extend(self.a.clone());
        if self.b {
            out.push("B".into());
        }
        out.push(self.cd.clone());
        out.extend(self.e.clone());
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BindingReport {
    pub params: Bindings,
    pub labels: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub classes: Classes,
    pub predicates: BTreeMap<String, IdentityVerdict>,
    /// Mean of `a₂/a₁` when it is constant.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t: Option<f64>,
    /// Some predicate residual fell in the ambiguity band.
    pub inconclusive: bool,
    /// Parameter bindings disagreed on some label.
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub parameter_dependent: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub bindings: Vec<BindingReport>,
    pub samples: SampleStats,
}

impl ClassificationReport {
    pub fn labels(&self) -> Vec<String> {
        self.classes.labels()
    }

    pub fn holds(&self, name: &str) -> bool {
        self.predicates.get(name).is_some_and(|v| v.holds)
    }

    /// Violations of the implications between class conditions; empty for a sound report.
    pub fn consistency_violations(&self) -> Vec<String> {
        use names::*;
        let mut out = Vec::new();
        let implies = |a: &str, b: &str, out: &mut Vec<String>| {
            if self.holds(a) && !self.holds(b) {
                out.push(format!("{a} holds but {b} does not"));
            }
        };
        implies(PARALLELIZABLE, GROUP, &mut out);
        implies(PARALLELIZABLE, ISOCLINICLY_GEODESIC, &mut out);
        implies(GROUP, BOL, &mut out);
        implies(GROUP, ALMOST_PARALLELIZABLE, &mut out);
        implies(GROUP, ALMOST_BOL, &mut out);
        implies(GROUP, ALMOST_ALGEBRAIZABLE, &mut out);
        implies(BOL, HEXAGONAL, &mut out);
        implies(BOL, ALMOST_BOL, &mut out);
        implies(BOL, TRANSVERSALLY_GEODESIC, &mut out);
        implies(HEXAGONAL, TRANSVERSALLY_GEODESIC, &mut out);
        implies(HEXAGONAL, ALMOST_ALGEBRAIZABLE, &mut out);
        implies(ALMOST_PARALLELIZABLE, ALMOST_BOL, &mut out);
        implies(ALMOST_BOL, ALMOST_ALGEBRAIZABLE, &mut out);
        let b = self.classes.b;
        if b != self.holds(ISOCLINICLY_GEODESIC) {
            out.push("class B disagrees with the isoclinicly geodesic verdict".into());
        }
        if b && self.classes.a.as_deref().is_some_and(|a| a != "A1") {
            out.push("isoclinicly geodesic web carries a refined A label".into());
        }
        if self.classes.cd.starts_with('D') != self.holds(TRANSVERSALLY_GEODESIC) {
            out.push("C/D label disagrees with the transversally geodesic verdict".into());
        }
        out
    }
}

struct Evaluator<'a> {
    samples: &'a [Snapshot],
    tol: f64,
    verdicts: BTreeMap<String, IdentityVerdict>,
}

impl<'a> Evaluator<'a> {
    fn test(&mut self, name: &str, field: impl Fn(&Snapshot) -> Residual) -> bool {
        let v = test_identity(self.samples, self.tol, field);
        let holds = v.holds;
        self.verdicts.insert(name.to_string(), v);
        holds
    }

    /// Records the conjunction of already-tested predicates.
    fn conjunction(&mut self, name: &str, parts: &[&str]) -> bool {
        let vs: Vec<&IdentityVerdict> = parts.iter().map(|p| &self.verdicts[*p]).collect();
        let holds = vs.iter().all(|v| v.holds);
        let worst = vs.iter().copied().max_by(|a, b| a.max_residual.total_cmp(&b.max_residual)).unwrap();
        let v = IdentityVerdict {
            holds,
            max_residual: worst.max_residual,
            points_tested: self.samples.len(),
            witness: if holds { None } else { vs.iter().find(|v| !v.holds).and_then(|v| v.witness) },
            ambiguous: !holds && vs.iter().filter(|v| !v.holds).all(|v| v.ambiguous),
        };
        self.verdicts.insert(name.to_string(), v);
        holds
    }
}

/// Decides whether `t = a₂/a₁` is constant; returns the verdict and the mean.
pub fn test_t_constant(samples: &[Snapshot], tol: f64) -> (IdentityVerdict, Option<f64>) {
    let usable: Vec<(&Snapshot, f64)> = samples
        .iter()
        .filter(|s| s.a[0].abs() >= 1e-6 * scale1(s))
        .filter_map(|s| s.t_ratio.map(|t| (s, t)))
        .collect();
    if usable.len() < 2 {
        let v = IdentityVerdict {
            holds: false,
            max_residual: f64::MAX,
            points_tested: usable.len(),
            witness: None,
            ambiguous: false,
        };
        return (v, None);
    }
    let mean = usable.iter().map(|(_, t)| t).sum::<f64>() / usable.len() as f64;
    let mut worst = 0.0f64;
    let mut witness = None;
    for (s, t) in &usable {
        let r = (t - mean).abs() / (1.0 + mean.abs());
        if r > worst {
            worst = r;
            witness = Some(s.point);
        }
    }
    let holds = worst < tol;
    let v = IdentityVerdict {
        holds,
        max_residual: worst,
        points_tested: usable.len(),
        witness: if holds { None } else { witness },
        ambiguous: !holds && worst < SamplerConfig::AMBIGUITY * tol,
    };
    (v, holds.then_some(mean))
}

/// Most specific E pattern of the Pfaffian derivatives, if any.
pub fn e_pattern(zero: &dyn Fn(&str) -> bool) -> Option<&'static str> {
    let p1 = zero("p11") && zero("p12");
    let p2 = zero("p12") && zero("p22");
    let q1 = zero("q11") && zero("q12");
    let q2 = zero("q12") && zero("q22");
    let p = p1 && zero("p22");
    let q = q1 && zero("q22");
    let patterns: [(&str, bool); 10] = [
        ("E1", p && q),
        ("E2", p1 && q && !zero("p22")),
        ("E3", p && q1 && !zero("q22")),
        ("E41", p1 && q1 && !zero("p22") && !zero("q22") && zero("p22+q22")),
        ("E4", p1 && q1 && !zero("p22") && !zero("q22")),
        ("E5", p2 && q && !zero("p11")),
        ("E6", p && q2 && !zero("q11")),
        ("E71", p2 && q2 && !zero("p11") && !zero("q11") && zero("p11+q11")),
        ("E7", p2 && q2 && !zero("p11") && !zero("q11")),
        ("E8", zero("p+q")),
    ];
    patterns.into_iter().find(|(_, m)| *m).map(|(l, _)| l)
}

/// Classifies a web with its parameters fixed at their current values.
pub fn classify_fixed(web: &WebDefinition, cfg: &SamplerConfig) -> Result<ClassificationReport, SampleError> {
    let set = sample(web, cfg)?;
    Ok(classify_samples(&set.snapshots, set.stats, cfg.tol))
}

/// Classifies from an already drawn sample set.
pub fn classify_samples(samples: &[Snapshot], stats: SampleStats, tol: f64) -> ClassificationReport {
    use names::*;
    let mut ev = Evaluator { samples, tol, verdicts: BTreeMap::new() };

    let isoclinic = ev.test(ISOCLINIC, |s| {
        Residual::of(&[s.p[0][1] - s.p[1][0], s.q[0][1] - s.q[1][0]], scale2(s))
    });
    let _ = isoclinic;
    let a_zero = ev.test(ISOCLINICLY_GEODESIC, |s| Residual::of(&s.a, scale1(s)));
    let tg = ev.test(TRANSVERSALLY_GEODESIC, |s| {
        Residual::of(&t4_iter(&s.a4).copied().collect::<Vec<_>>(), scale2(s))
    });
    let sum = |s: &Snapshot| -> Vec<f64> {
        (0..4).map(|k| s.f[k / 2][k % 2] + s.g[k / 2][k % 2] + s.h[k / 2][k % 2]).collect()
    };
    let c34 = ev.test(ALMOST_ALGEBRAIZABLE, |s| Residual::of(&sum(s), scale2(s)));
    let c35 = ev.test(ALMOST_BOL, |s| {
        let mut v: Vec<f64> = (0..4).map(|k| s.f[k / 2][k % 2] + s.g[k / 2][k % 2]).collect();
        v.extend(m2_iter(&s.h));
        Residual::of(&v, scale2(s))
    });
    let c36 = ev.test(ALMOST_PARALLELIZABLE, |s| {
        let v: Vec<f64> = m2_iter(&s.f).chain(m2_iter(&s.g)).chain(m2_iter(&s.h)).copied().collect();
        Residual::of(&v, scale2(s))
    });
    ev.conjunction(HEXAGONAL, &[TRANSVERSALLY_GEODESIC, ALMOST_ALGEBRAIZABLE]);
    ev.conjunction(BOL, &[TRANSVERSALLY_GEODESIC, ALMOST_BOL]);
    let group = ev.conjunction(GROUP, &[TRANSVERSALLY_GEODESIC, ALMOST_PARALLELIZABLE]);
    ev.conjunction(PARALLELIZABLE, &[GROUP, ISOCLINICLY_GEODESIC]);
    ev.test(CURVATURE_ZERO, |s| Residual::of(&t4_iter(&s.b).copied().collect::<Vec<_>>(), scale2(s)));

    let cd = if tg {
        if group {
            if a_zero { "D232" } else { "D231" }
        } else if c35 {
            "D21"
        } else if c34 {
            "D22"
        } else {
            "D1"
        }
    } else if c36 {
        "C12"
    } else if c35 {
        "C11"
    } else if c34 {
        "C1"
    } else {
        "C2"
    };

    // Pfaffian-derivative patterns
    let comp = |name: &str, s: &Snapshot| -> Vec<f64> {
        let (p, q) = (&s.p, &s.q);
        match name {
            "p11" => vec![p[0][0]],
            "p12" => vec![p[0][1], p[1][0]],
            "p22" => vec![p[1][1]],
            "q11" => vec![q[0][0]],
            "q12" => vec![q[0][1], q[1][0]],
            "q22" => vec![q[1][1]],
            "p22+q22" => vec![p[1][1] + q[1][1]],
            "p11+q11" => vec![p[0][0] + q[0][0]],
            _ => (0..4).map(|k| p[k / 2][k % 2] + q[k / 2][k % 2]).collect(),
        }
    };
    let mut zeros = BTreeMap::new();
    for name in ["p11", "p12", "p22", "q11", "q12", "q22", "p22+q22", "p11+q11", "p+q"] {
        let v = test_identity(samples, tol, |s| Residual::of(&comp(name, s), scale2(s)));
        zeros.insert(name, v.holds);
        ev.verdicts.insert(format!("zero[{name}]"), v);
    }
    let e = e_pattern(&|n| zeros[n]).map(str::to_string);

    let mut t = None;
    let a = if a_zero {
        // the transversal distribution is undefined; A1 is kept for transversally geodesic webs
        tg.then(|| "A1".to_string())
    } else {
        Some(a_label(&mut ev, &mut t))
    };

    let inconclusive = ev.verdicts.values().any(|v| v.ambiguous);
    ClassificationReport {
        classes: Classes { a, b: a_zero, cd: cd.to_string(), e },
        predicates: ev.verdicts,
        t,
        inconclusive,
        parameter_dependent: false,
        bindings: Vec::new(),
        samples: stats,
    }
}

fn a_label(ev: &mut Evaluator<'_>, t_out: &mut Option<f64>) -> String {
    use names::*;
    let integrable = ev.test(INTEGRABLE, |s| {
        let s1 = scale1(s);
        Residual::of(&integrability_forms(s), s1 * s1 * scale2(s))
    });
    let a1_zero = ev.test(A1_ZERO, |s| Residual::of(&[s.a[0]], scale1(s)));
    let a2_zero = ev.test(A2_ZERO, |s| Residual::of(&[s.a[1]], scale1(s)));
    if !integrable {
        return "A2".into();
    }
    if a2_zero {
        let c12 = ev.test(P22_Q22_ZERO, |s| Residual::of(&[s.p[1][1], s.q[1][1]], scale2(s)));
        if !c12 {
            return "A1".into();
        }
        let c19 = ev.test(OMEGA21_ZERO, |s| {
            Residual::of(&[s.omega1[0][1][0], s.omega1[0][1][1], s.omega2[0][1][0], s.omega2[0][1][1]], scale1(s))
        });
        let c22 = ev.test(B222_ZERO, |s| Residual::of(&[s.b[0][1][1][1], s.b[1][1][1][1]], scale2(s)));
        return if c19 && c22 { "A121" } else { "A12" }.into();
    }
    if a1_zero {
        let c13 = ev.test(P11_Q11_ZERO, |s| Residual::of(&[s.p[0][0], s.q[0][0]], scale2(s)));
        if !c13 {
            return "A1".into();
        }
        let c20 = ev.test(OMEGA12_ZERO, |s| {
            Residual::of(&[s.omega1[1][0][0], s.omega1[1][0][1], s.omega2[1][0][0], s.omega2[1][0][1]], scale1(s))
        });
        let c23 = ev.test(B111_ZERO, |s| Residual::of(&[s.b[0][0][0][0], s.b[1][0][0][0]], scale2(s)));
        return if c20 && c23 { "A131" } else { "A13" }.into();
    }
    let (tv, t) = test_t_constant(ev.samples, ev.tol);
    ev.verdicts.insert(T_CONSTANT.into(), tv);
    let Some(t) = t else {
        return "A1".into();
    };
    *t_out = Some(t);
    let t_scale = 1f64.max(t.abs()).powi(3);
    let planar_t = ev.test(PLANAR_HEXAGONAL_T, |s| {
        let (_, v17, v18) = hexagonality_polynomials(s, t);
        Residual::of(&[v17, v18], scale2(s) * t_scale)
    });
    // informational: ω₂¹ = t²ω₁² + t(ω₁¹ − ω₂²) as coefficient identities
    ev.test(GEODESIC_T, |s| {
        let c: Vec<f64> = (0..2)
            .flat_map(|k| {
                let o1 = |i: usize, j: usize| s.omega1[i][j][k];
                let o2 = |i: usize, j: usize| s.omega2[i][j][k];
                [
                    o1(0, 1) - t * t * o1(1, 0) - t * (o1(0, 0) - o1(1, 1)),
                    o2(0, 1) - t * t * o2(1, 0) - t * (o2(0, 0) - o2(1, 1)),
                ]
            })
            .collect();
        Residual::of(&c, scale1(s) * 1f64.max(t * t))
    });
    let eq = ev.test(A1_EQ_A2, |s| Residual::of(&[s.a[0] - s.a[1]], scale1(s)));
    let mut a112 = false;
    let mut a1121 = false;
    if eq {
        a112 = ev.test(DIAGONAL_INTEGRABLE, |s| {
            let r = |m: &M2<f64>| m[0][0] - 2.0 * sym(m) + m[1][1];
            Residual::of(&[r(&s.p), r(&s.q)], scale2(s))
        });
        if a112 {
            let c21 = ev.test(OMEGA_DIAGONAL, |s| {
                let c: Vec<f64> = (0..2)
                    .flat_map(|k| {
                        let o1 = |i: usize, j: usize| s.omega1[i][j][k];
                        let o2 = |i: usize, j: usize| s.omega2[i][j][k];
                        [
                            o1(0, 0) + o1(1, 0) - o1(0, 1) - o1(1, 1),
                            o2(0, 0) + o2(1, 0) - o2(0, 1) - o2(1, 1),
                        ]
                    })
                    .collect();
                Residual::of(&c, scale1(s))
            });
            let c24 = ev.test(PLANAR_HEXAGONAL_DIAGONAL, |s| {
                let (_, v17, v18) = hexagonality_polynomials(s, 1.0);
                Residual::of(&[v17, v18], scale2(s))
            });
            a1121 = c21 && c24;
        }
    }
    if a1121 {
        "A1121"
    } else if planar_t {
        "A111"
    } else if a112 {
        "A112"
    } else {
        "A11"
    }
    .into()
}

/// Classifies a web. Webs with parameters are classified under `cfg.bindings`
/// random bindings unless `fixed_params` is set; the reported labels are those
/// all bindings agree on.
pub fn classify(
    web: &WebDefinition,
    cfg: &SamplerConfig,
    fixed_params: bool,
) -> Result<ClassificationReport, ClassifyError> {
    cfg.validate().map_err(ClassifyError::Config)?;
    if web.params.is_empty() || fixed_params {
        return Ok(classify_fixed(web, cfg)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    let mut reports = Vec::new();
    for _ in 0..cfg.bindings.max(1) {
        let binding: Bindings = web.params.keys().map(|k| (k.clone(), rng.random_range(-2.0..2.0))).collect();
        let bound = web.with_params(&binding).expect("keys come from the web");
        let r = classify_fixed(&bound, cfg).map_err(|source| ClassifyError::Binding { binding: binding.clone(), source })?;
        reports.push((binding, r));
    }
    Ok(merge(reports))
}

fn merge(reports: Vec<(Bindings, ClassificationReport)>) -> ClassificationReport {
    let first = &reports[0].1;
    let agree = |f: &dyn Fn(&ClassificationReport) -> Option<String>| {
        let v = f(first);
        reports.iter().all(|(_, r)| f(r) == v).then_some(v).flatten()
    };
    let a = agree(&|r| r.classes.a.clone());
    let e = agree(&|r| r.classes.e.clone());
    let cd = agree(&|r| Some(r.classes.cd.clone())).unwrap_or_else(|| common_prefix(&reports));
    let b_all = reports.iter().all(|(_, r)| r.classes.b);
    let dependent = reports.iter().any(|(_, r)| r.labels() != first.labels());
    let mut predicates: BTreeMap<String, IdentityVerdict> = BTreeMap::new();
    for (_, r) in &reports {
        for (k, v) in &r.predicates {
            predicates
                .entry(k.clone())
                .and_modify(|acc| {
                    if !v.holds && acc.holds {
                        acc.witness = v.witness;
                    }
                    acc.holds &= v.holds;
                    acc.ambiguous |= v.ambiguous;
                    acc.max_residual = acc.max_residual.max(v.max_residual);
                    acc.points_tested += v.points_tested;
                })
                .or_insert_with(|| v.clone());
        }
    }
    let mut samples = SampleStats::default();
    for (_, r) in &reports {
        samples.points += r.samples.points;
        samples.attempts += r.samples.attempts;
        samples.rejected_domain += r.samples.rejected_domain;
        samples.rejected_degenerate += r.samples.rejected_degenerate;
    }
    let t = agree(&|r| r.t.map(|t| format!("{t:e}"))).and(first.t);
    ClassificationReport {
        classes: Classes { a, b: b_all, cd, e },
        predicates,
        t,
        inconclusive: reports.iter().any(|(_, r)| r.inconclusive),
        parameter_dependent: dependent,
        bindings: reports.into_iter().map(|(params, r)| BindingReport { params, labels: r.labels() }).collect(),
        samples,
    }
}

fn common_prefix(reports: &[(Bindings, ClassificationReport)]) -> String {
    let labels: Vec<&str> = reports.iter().map(|(_, r)| r.classes.cd.as_str()).collect();
    let mut prefix = labels[0].to_string();
    for l in &labels[1..] {
        while !l.starts_with(&prefix) {
            prefix.pop();
        }
    }
    prefix
}
