//! Numeric acceptance checks shared by the integration tests and the acceptance harness.
//! Each returns the worst relative residual found; callers compare it with a tolerance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use threeweb::classify::{hexagonality_polynomials, sample, scale1, scale2};
use threeweb::expr::{check_domain, eval_in, Bindings, WebDefinition};
use threeweb::jet::{multi_indices, Jet3};
use threeweb::{SamplerConfig, Snapshot};

use super::{fd_partial, mul, naive_eval, split};

pub const EQ6_TOL: f64 = 1e-9;
pub const TRACE_TOL: f64 = 1e-8;
pub const ALTERNATION_TOL: f64 = 1e-7;
pub const FGH_TOL: f64 = 1e-9;
pub const JACOBIAN_TOL: f64 = 1e-10;
pub const JET_TOL: f64 = 1e-5;
pub const POLY_TOL: f64 = 1e-9;

fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

fn max_abs<'a>(v: impl IntoIterator<Item = &'a f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Admissible snapshots at `n` random points, `None` for a web that has none.
pub fn snapshots(web: &WebDefinition, n: usize, seed: u64) -> Option<Vec<Snapshot>> {
    let cfg = SamplerConfig { points: n, seed, ..SamplerConfig::default() };
    sample(web, &cfg).ok().map(|s| s.snapshots)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Invariants {
    pub eq6: f64,
    pub trace: f64,
    pub alternation: f64,
    pub fgh: f64,
    pub jacobian: f64,
}

impl Invariants {
    pub fn worst(self, o: Invariants) -> Invariants {
        Invariants {
            eq6: self.eq6.max(o.eq6),
            trace: self.trace.max(o.trace),
            alternation: self.alternation.max(o.alternation),
            fgh: self.fgh.max(o.fgh),
            jacobian: self.jacobian.max(o.jacobian),
        }
    }

    pub fn within_tolerance(&self) -> bool {
        self.eq6 < EQ6_TOL
            && self.trace < TRACE_TOL
            && self.alternation < ALTERNATION_TOL
            && self.fgh < FGH_TOL
            && self.jacobian < JACOBIAN_TOL
    }
}

/// Structural residuals at one snapshot, each relative to its natural scale.
pub fn invariants(s: &Snapshot) -> Invariants {
    let (s1, s2) = (scale1(s), scale2(s));
    let mut r = Invariants::default();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                // torsion rebuilt from the connection, then from the covector alone
                let tor = (s.gamma[i][j][k] - s.gamma[i][k][j]) / 2.0;
                let rebuilt = (s.a[j] * delta(i, k) - s.a[k] * delta(i, j)) / 2.0;
                r.eq6 = r.eq6.max((tor - rebuilt).abs() / s1);
                for l in 0..2 {
                    let b = &s.b;
                    let alt1 = (b[i][j][l][k] - b[i][k][l][j]) / 2.0 - (delta(i, k) * s.p[j][l] - delta(i, j) * s.p[k][l]) / 2.0;
                    let alt2 = (b[i][j][k][l] - b[i][k][j][l]) / 2.0 - (delta(i, k) * s.q[j][l] - delta(i, j) * s.q[k][l]) / 2.0;
                    r.alternation = r.alternation.max(alt1.abs().max(alt2.abs()) / s2);
                }
            }
        }
    }
    for k in 0..2 {
        for l in 0..2 {
            let tr: f64 = (0..2).map(|i| s.a4[i][i][k][l]).sum();
            r.trace = r.trace.max(tr.abs() / s2);
        }
    }
    let (f, g, h, a4) = split(&s.b, &s.p, &s.q);
    for j in 0..2 {
        for k in 0..2 {
            let res = [
                s.f[j][k] - s.p[j][k] - s.h[j][k],
                s.g[j][k] - s.q[j][k] - s.h[j][k],
                s.f[j][k] - f[j][k],
                s.g[j][k] - g[j][k],
                s.h[j][k] - h[j][k],
            ];
            r.fgh = r.fgh.max(max_abs(&res) / s2);
        }
    }
    let a4_err = (0..16).map(|n| (s.a4[n >> 3][(n >> 2) & 1][(n >> 1) & 1][n & 1] - a4[n >> 3][(n >> 2) & 1][(n >> 1) & 1][n & 1]).abs());
    r.fgh = r.fgh.max(a4_err.fold(0.0, f64::max) / s2);
    for (m, mi) in [(&s.fbar, &s.gbar), (&s.ftilde, &s.gtilde)] {
        let scale = 1f64.max(max_abs(m.iter().flatten()) * max_abs(mi.iter().flatten()));
        for prod in [mul(m, mi), mul(mi, m)] {
            for i in 0..2 {
                for j in 0..2 {
                    r.jacobian = r.jacobian.max((prod[i][j] - delta(i, j)).abs() / scale);
                }
            }
        }
    }
    r
}

/// Points in `[-2, 2]^4` where every constraint expression has magnitude at least 0.5,
/// keeping the difference stencils well away from poles; drawn deterministically.
pub fn jet_points(web: &WebDefinition, n: usize, seed: u64) -> Vec<[f64; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < n {
        let p: [f64; 4] = std::array::from_fn(|_| rng.random_range(-2.0..2.0));
        let finite = web.functions().iter().all(|f| naive_eval(f, p, &web.params).is_some());
        if check_domain(web, p, 0.5) && finite {
            out.push(p);
        }
    }
    out
}

/// Worst relative disagreement between every jet partial (orders 0 to 3) of both
/// defining functions and the finite-difference oracle.
pub fn jet_vs_fd(web: &WebDefinition, points: &[[f64; 4]]) -> f64 {
    let params: &Bindings = &web.params;
    let mut worst = 0.0f64;
    for &x in points {
        let vars = [0, 1, 2, 3].map(|i| Jet3::variable(i, x[i]));
        for f in web.functions() {
            let jet = eval_in(f, &vars, params).expect("jet evaluates at an admissible point");
            let plain = |p: [f64; 4]| naive_eval(f, p, params).unwrap_or(f64::NAN);
            for alpha in multi_indices() {
                let a = alpha.map(|k| k as usize);
                let reference = fd_partial(&plain, x, a);
                let err = (jet.partial(*alpha) - reference).abs() / reference.abs().max(1.0);
                worst = worst.max(if err.is_nan() { f64::INFINITY } else { err });
            }
        }
    }
    worst
}

/// Worst relative residual of `v16 + t·v18 + v17` over the snapshots and `t` values.
pub fn polynomial_identity(snaps: &[Snapshot], ts: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for s in snaps {
        let bs = s.b_sym();
        let size = max_abs(bs.iter().flatten().flatten().flatten());
        for &t in ts {
            let (v16, v17, v18) = hexagonality_polynomials(s, t);
            let scale = (size * 1f64.max(t.abs()).powi(4)).max(f64::MIN_POSITIVE);
            worst = worst.max((v16 + t * v18 + v17).abs() / scale);
        }
    }
    worst
}

pub fn random_ts(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(-3.0..3.0)).collect()
}
