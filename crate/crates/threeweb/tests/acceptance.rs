//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! The process exits 0 after printing every line so that a workspace test run
//! continues; set `ACCEPTANCE_STRICT=1` to exit 1 when any criterion fails.

mod support;

use std::time::Instant;

use support::criteria::*;
use threeweb::classify::names::{ALMOST_BOL, BOL, CURVATURE_ZERO, GROUP, INTEGRABLE, PARALLELIZABLE, TRANSVERSALLY_GEODESIC};
use threeweb::corpus::{all, golden_check, GoldenOutcome, Reliability};
use threeweb::report::ReportDocument;
use threeweb::{classify, load_example, parse_web, snapshot, ClassificationReport, SamplerConfig};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn golden() -> Outcome {
    let start = Instant::now();
    let mut problems = Vec::new();
    let mut passes = 0;
    for e in all() {
        let checks = golden_check(&e, snapshot);
        for rec in e.golden.iter().filter(|r| r.reliability == Reliability::Verified) {
            let path = rec.path.to_string();
            let mine: Vec<_> = checks.iter().filter(|c| c.path == path && c.reliability == Reliability::Verified).collect();
            let ok = mine.iter().filter(|c| c.outcome == GoldenOutcome::Pass).count();
            passes += ok;
            if ok < 2 || mine.iter().any(|c| c.outcome != GoldenOutcome::Pass) {
                problems.push(format!("example {} {path}", e.index));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if problems.is_empty() {
        outcome(true, format!("{passes} verified comparisons within 1e-7 in {secs:.2} s"))
    } else {
        outcome(false, format!("mismatches: {}", problems.join(", ")))
    }
}

fn table() -> Outcome {
    let t = threeweb::table::compute(&SamplerConfig::default());
    if t.diffs.is_empty() {
        return outcome(true, "15 rows, zero diffs");
    }
    let diffs: Vec<String> =
        t.diffs.iter().map(|d| format!("ex{} {} {}->{}", d.example, d.column, d.expected, d.computed)).collect();
    outcome(false, format!("{} diffs: {}", diffs.len(), diffs.join("; ")))
}

fn structural() -> Outcome {
    let mut worst = Invariants::default();
    let mut skipped = Vec::new();
    for e in all() {
        match snapshots(&e.web, 16, 2024) {
            Some(s) => worst = s.iter().map(invariants).fold(worst, Invariants::worst),
            None => skipped.push(e.index),
        }
    }
    outcome(
        worst.within_tolerance(),
        format!(
            "eq6 {:.1e}, trace {:.1e}, alternation {:.1e}, fgh {:.1e}, jacobian {:.1e}; no admissible points for {skipped:?}",
            worst.eq6, worst.trace, worst.alternation, worst.fgh, worst.jacobian
        ),
    )
}

fn jets() -> Outcome {
    let worst = all().iter().map(|e| jet_vs_fd(&e.web, &jet_points(&e.web, 8, e.index as u64))).fold(0.0, f64::max);
    outcome(worst < JET_TOL, format!("worst relative error {worst:.1e} over 15 webs x 8 points x 70 partials"))
}

fn polynomial() -> Outcome {
    let ts = random_ts(20, 7);
    let mut worst = 0.0f64;
    let mut count = 0;
    for e in all() {
        let mut snaps = snapshots(&e.web, 16, 2024).unwrap_or_default();
        snaps.extend(e.points.iter().filter_map(|&p| snapshot(&e.web, p).ok()));
        count += snaps.len();
        worst = worst.max(polynomial_identity(&snaps, &ts));
    }
    outcome(worst < POLY_TOL, format!("worst relative residual {worst:.1e} over {count} snapshots x 20 t"))
}

fn report(index: usize, cfg: &SamplerConfig) -> ClassificationReport {
    classify(&load_example(index).unwrap().web, cfg, false).expect("corpus web classifies")
}

fn spot_checks() -> Outcome {
    let cfg = SamplerConfig::default();
    let ex9 = report(9, &cfg);
    let ex7 = report(7, &cfg);
    let ex1 = report(1, &cfg);
    let checks = [
        ("ex9 parallelizable", ex9.holds(PARALLELIZABLE) && ex9.holds(CURVATURE_ZERO)),
        ("ex7 Bol", ex7.holds(BOL)),
        ("ex7 not group", !ex7.holds(GROUP) && !ex7.holds(CURVATURE_ZERO)),
        ("ex7 A2", !ex7.holds(INTEGRABLE) && ex7.classes.a.as_deref() == Some("A2")),
        ("ex1 almost Bol", ex1.holds(ALMOST_BOL)),
        ("ex1 not transversally geodesic", !ex1.holds(TRANSVERSALLY_GEODESIC)),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    if failed.is_empty() {
        outcome(true, format!("{} checks", checks.len()))
    } else {
        outcome(false, format!("failed: {}", failed.join(", ")))
    }
}

fn determinism() -> Outcome {
    let mut unstable = Vec::new();
    for e in all().into_iter().filter(|e| classify(&e.web, &SamplerConfig::default(), false).is_ok()) {
        let labels: Vec<Vec<String>> =
            (1..=10).map(|seed| report(e.index, &SamplerConfig { seed, ..SamplerConfig::default() }).labels()).collect();
        if labels.iter().any(|l| *l != labels[0]) {
            unstable.push(e.index);
        }
        let cfg = SamplerConfig::default();
        let json = || ReportDocument::new(&e.web, &cfg, report(e.index, &cfg)).to_json();
        if json() != json() {
            unstable.push(e.index);
        }
    }
    if unstable.is_empty() {
        outcome(true, "labels stable over seeds 1..=10; JSON byte-identical for seed 42")
    } else {
        outcome(false, format!("unstable examples {unstable:?}"))
    }
}

fn negative_control() -> Outcome {
    let cfg = SamplerConfig::default();
    let run = |src: &str| classify(&parse_web(src).unwrap(), &cfg, false).unwrap();
    let perturbed = run("u1 = x1*y1 + x2*y2 + 0.1*x1*y1; u2 = x1*y2 + x2*y1");
    let curvature = perturbed.predicates[CURVATURE_ZERO].max_residual;
    // a non-bilinear perturbation, reported for comparison
    let quadratic = run("u1 = x1*y1 + x2*y2 + 0.1*x1^2*y1; u2 = x1*y2 + x2*y1");
    let detail = format!(
        "+0.1*x1*y1: parallelizable={} (curvature residual {curvature:.1e}, labels {}); +0.1*x1^2*y1: parallelizable={} (labels {})",
        perturbed.holds(PARALLELIZABLE),
        perturbed.labels().join(" "),
        quadratic.holds(PARALLELIZABLE),
        quadratic.labels().join(" "),
    );
    outcome(!perturbed.holds(PARALLELIZABLE), detail)
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("golden tensor suite", golden),
        ("table reproduction", table),
        ("structural invariants", structural),
        ("derivative oracle", jets),
        ("hexagonality polynomial identity", polynomial),
        ("known-class spot checks", spot_checks),
        ("determinism", determinism),
        ("negative control", negative_control),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        failed += usize::from(!o.pass);
        println!("{} {} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, n + 1, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
