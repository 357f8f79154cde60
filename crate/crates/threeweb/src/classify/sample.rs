//! Seeded rejection sampling of admissible points and randomized identity tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{check_domain, WebDefinition};
use crate::tensor::{snapshot, PipelineError};
use crate::Snapshot;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub points: usize,
    pub tol: f64,
    pub seed: u64,
    pub lo: f64,
    pub hi: f64,
    pub margin: f64,
    /// Attempts allowed per requested point.
    pub attempts_per_point: usize,
    /// Random parameter bindings used for webs with parameters.
    pub bindings: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            points: 64,
            tol: 1e-7,
            seed: 42,
            lo: -3.0,
            hi: 3.0,
            margin: 1e-3,
            attempts_per_point: 200,
            bindings: 5,
        }
    }
}

impl SamplerConfig {
    /// Residuals in `[tol, AMBIGUITY * tol)` are reported as ambiguous.
    pub const AMBIGUITY: f64 = 10.0;

    pub fn validate(&self) -> Result<(), String> {
        if self.points < 8 {
            return Err(format!("need at least 8 sample points, got {}", self.points));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(format!("tolerance must lie in (0, 1), got {}", self.tol));
        }
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(format!("box bounds must be finite with lo < hi, got [{}, {}]", self.lo, self.hi));
        }
        if !(self.margin >= 0.0) {
            return Err(format!("margin must be non-negative, got {}", self.margin));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SampleError {
    #[error("found only {found} of {wanted} admissible points in {attempts} attempts")]
    SamplerExhausted { found: usize, wanted: usize, attempts: usize },
    #[error("the defining functions do not define a web at any sampled point ({last})")]
    DegenerateWeb { last: PipelineError },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleStats {
    pub points: usize,
    pub attempts: usize,
    pub rejected_domain: usize,
    pub rejected_degenerate: usize,
}

#[derive(Clone, Debug)]
pub struct SampleSet {
    pub snapshots: Vec<Snapshot>,
    pub stats: SampleStats,
}

/// Draws `cfg.points` admissible, nondegenerate points and their snapshots.
pub fn sample(web: &WebDefinition, cfg: &SamplerConfig) -> Result<SampleSet, SampleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let budget = cfg.points * cfg.attempts_per_point;
    let mut stats = SampleStats::default();
    let mut snapshots = Vec::with_capacity(cfg.points);
    let mut last_degenerate = None;
    while snapshots.len() < cfg.points && stats.attempts < budget {
        stats.attempts += 1;
        let p: [f64; 4] = std::array::from_fn(|_| rng.random_range(cfg.lo..cfg.hi));
        if !check_domain(web, p, cfg.margin) {
            stats.rejected_domain += 1;
            continue;
        }
        match snapshot(web, p) {
            Ok(s) => snapshots.push(s),
            Err(e) => {
                stats.rejected_degenerate += 1;
                last_degenerate = Some(e);
            }
        }
    }
    stats.points = snapshots.len();
    if snapshots.len() < cfg.points {
        if snapshots.is_empty() {
            if let Some(last) = last_degenerate {
                return Err(SampleError::DegenerateWeb { last });
            }
        }
        return Err(SampleError::SamplerExhausted { found: snapshots.len(), wanted: cfg.points, attempts: stats.attempts });
    }
    Ok(SampleSet { snapshots, stats })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityVerdict {
    pub holds: bool,
    pub max_residual: f64,
    pub points_tested: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<[f64; 4]>,
    /// The residual fell in the band just above the tolerance.
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub ambiguous: bool,
}

/// Residual of a field at one point: largest component magnitude and its natural scale.
#[derive(Clone, Copy, Debug)]
pub struct Residual {
    pub size: f64,
    pub scale: f64,
}

impl Residual {
    pub fn of(components: &[f64], scale: f64) -> Residual {
        Residual { size: components.iter().fold(0.0, |m, v| m.max(v.abs())), scale }
    }
}

/// Decides whether a field vanishes identically on the sample set.
pub fn test_identity(samples: &[Snapshot], tol: f64, field: impl Fn(&Snapshot) -> Residual) -> IdentityVerdict {
    let mut max_residual = 0.0f64;
    let mut witness = None;
    for s in samples {
        let r = field(s);
        let rel = r.size / r.scale.max(1.0);
        let rel = if rel.is_nan() { f64::INFINITY } else { rel };
        if rel > max_residual {
            max_residual = rel;
            if rel >= tol {
                witness = Some(s.point);
            }
        }
    }
    let holds = max_residual < tol;
    IdentityVerdict {
        holds,
        max_residual: if max_residual.is_finite() { max_residual } else { f64::MAX },
        points_tested: samples.len(),
        witness: if holds { None } else { witness },
        ambiguous: !holds && max_residual < SamplerConfig::AMBIGUITY * tol,
    }
}

/// Samples the web and tests one field.
pub fn test_identity_on(
    web: &WebDefinition,
    cfg: &SamplerConfig,
    field: impl Fn(&Snapshot) -> Residual,
) -> Result<IdentityVerdict, SampleError> {
    let set = sample(web, cfg)?;
    Ok(test_identity(&set.snapshots, cfg.tol, field))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_web;

    fn bol() -> WebDefinition {
        parse_web("u1 = x1 + y1; u2 = (x2 + y2)*(y1 - x1); domain x1 - y1 != 0").unwrap()
    }

    #[test]
    fn vanishing_component() {
        let v = test_identity_on(&bol(), &SamplerConfig::default(), |s| Residual::of(&[s.a[1]], 1.0)).unwrap();
        assert!(v.holds);
        assert_eq!(v.max_residual, 0.0);
        assert_eq!(v.points_tested, 64);
        assert!(v.witness.is_none());
    }

    #[test]
    fn nonvanishing_component_has_witness() {
        let v = test_identity_on(&bol(), &SamplerConfig::default(), |s| Residual::of(&[s.a[0]], 1.0)).unwrap();
        assert!(!v.holds);
        assert!(v.witness.is_some());
        assert!(!v.ambiguous);
    }

    #[test]
    fn zero_field() {
        let v = test_identity_on(&bol(), &SamplerConfig::default(), |_| Residual::of(&[0.0], 1.0)).unwrap();
        assert!(v.holds && v.max_residual == 0.0);
    }

    #[test]
    fn ambiguous_band() {
        let set = sample(&bol(), &SamplerConfig::default()).unwrap();
        let v = test_identity(&set.snapshots, 1e-7, |_| Residual::of(&[3e-7], 1.0));
        assert!(!v.holds && v.ambiguous);
    }

    #[test]
    fn sampling_is_deterministic_and_admissible() {
        let cfg = SamplerConfig::default();
        let a = sample(&bol(), &cfg).unwrap();
        let b = sample(&bol(), &cfg).unwrap();
        let pa: Vec<_> = a.snapshots.iter().map(|s| s.point).collect();
        let pb: Vec<_> = b.snapshots.iter().map(|s| s.point).collect();
        assert_eq!(pa, pb);
        assert!(pa.iter().all(|p| (p[0] - p[2]).abs() >= 1e-3 && p.iter().all(|v| (-3.0..3.0).contains(v))));
    }

    #[test]
    fn degenerate_and_exhausted() {
        let w = parse_web("u1 = x1 + x2; u2 = x1 - x2").unwrap();
        assert!(matches!(sample(&w, &SamplerConfig::default()), Err(SampleError::DegenerateWeb { .. })));
        let w = parse_web("u1 = x1 + y1; u2 = x2 + y2; domain x1 - 10 > 0").unwrap();
        assert!(matches!(sample(&w, &SamplerConfig::default()), Err(SampleError::SamplerExhausted { .. })));
    }

    #[test]
    fn config_validation() {
        assert!(SamplerConfig::default().validate().is_ok());
        assert!(SamplerConfig { points: 4, ..Default::default() }.validate().is_err());
        assert!(SamplerConfig { tol: 1e-2, ..Default::default() }.validate().is_ok());
        assert!(SamplerConfig { tol: 1.0, ..Default::default() }.validate().is_err());
        assert!(SamplerConfig { lo: 1.0, hi: 1.0, ..Default::default() }.validate().is_err());
    }
}
