//! Independent oracles shared by the integration tests: a plain recursive
//! evaluator, finite-difference partials, and a tensor pipeline built from
//! them by hand-written chain rules (no jets).

#![allow(dead_code)]

pub mod criteria;

use threeweb::expr::{Bindings, Expr, WebDefinition};

/// Straightforward f64 evaluation; `None` on any non-finite intermediate.
pub fn naive_eval(e: &Expr, x: [f64; 4], params: &Bindings) -> Option<f64> {
    let v = match e {
        Expr::Const(c) => *c,
        Expr::Var(v) => x[v.index()],
        Expr::Param(name) => *params.get(name)?,
        Expr::Neg(a) => -naive_eval(a, x, params)?,
        Expr::Exp(a) => naive_eval(a, x, params)?.exp(),
        Expr::Ln(a) => {
            let a = naive_eval(a, x, params)?;
            if a <= 0.0 {
                return None;
            }
            a.ln()
        }
        Expr::Add(a, b) => naive_eval(a, x, params)? + naive_eval(b, x, params)?,
        Expr::Sub(a, b) => naive_eval(a, x, params)? - naive_eval(b, x, params)?,
        Expr::Mul(a, b) => naive_eval(a, x, params)? * naive_eval(b, x, params)?,
        Expr::Div(a, b) => {
            let d = naive_eval(b, x, params)?;
            if d == 0.0 {
                return None;
            }
            naive_eval(a, x, params)? / d
        }
        Expr::Pow(a, k) => naive_eval(a, x, params)?.powi(*k),
    };
    v.is_finite().then_some(v)
}

fn stencil(order: usize) -> &'static [(f64, f64)] {
    // (offset in steps, weight); divide by h^order afterwards
    match order {
        0 => &[(0.0, 1.0)],
        1 => &[(1.0, 0.5), (-1.0, -0.5)],
        2 => &[(1.0, 1.0), (0.0, -2.0), (-1.0, 1.0)],
        3 => &[(2.0, 0.5), (1.0, -1.0), (-1.0, 1.0), (-2.0, -0.5)],
        _ => panic!("order {order} not supported"),
    }
}

fn central(f: &dyn Fn([f64; 4]) -> f64, x: [f64; 4], alpha: [usize; 4], h: f64) -> f64 {
    let mut total = 0.0;
    let s: Vec<&[(f64, f64)]> = alpha.iter().map(|&k| stencil(k)).collect();
    for a in s[0] {
        for b in s[1] {
            for c in s[2] {
                for d in s[3] {
                    let p = [x[0] + a.0 * h, x[1] + b.0 * h, x[2] + c.0 * h, x[3] + d.0 * h];
                    total += a.1 * b.1 * c.1 * d.1 * f(p);
                }
            }
        }
    }
    total / h.powi(alpha.iter().sum::<usize>() as i32)
}

/// Step used for a partial of the given total order.
pub fn step_for(order: usize, x: [f64; 4]) -> f64 {
    let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let base = match order {
        1 => 4e-3,
        2 => 1e-2,
        _ => 2e-2,
    };
    base * scale
}

/// Twice Richardson-refined central difference for the mixed partial `∂^alpha f`.
pub fn fd_partial(f: &dyn Fn([f64; 4]) -> f64, x: [f64; 4], alpha: [usize; 4]) -> f64 {
    let order: usize = alpha.iter().sum();
    if order == 0 {
        return f(x);
    }
    let h = step_for(order, x);
    let d = [h, h / 2.0, h / 4.0].map(|s| central(f, x, alpha, s));
    let r1 = (4.0 * d[1] - d[0]) / 3.0;
    let r2 = (4.0 * d[2] - d[1]) / 3.0;
    (16.0 * r2 - r1) / 15.0
}

fn unit(v: usize) -> [usize; 4] {
    let mut a = [0; 4];
    a[v] = 1;
    a
}

fn add(a: [usize; 4], b: [usize; 4]) -> [usize; 4] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

pub type M2 = [[f64; 2]; 2];
pub type T3 = [[[f64; 2]; 2]; 2];
pub type T4 = [[[[f64; 2]; 2]; 2]; 2];

pub fn inv(m: &M2) -> M2 {
    let d = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]
}

pub fn mul(a: &M2, b: &M2) -> M2 {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// Tensors recomputed from finite differences of the defining functions.
#[derive(Clone, Debug)]
pub struct FdTensors {
    pub fbar: M2,
    pub ftilde: M2,
    pub gamma: T3,
    pub a: [f64; 2],
    pub b: T4,
    pub p: M2,
    pub q: M2,
    pub f: M2,
    pub g: M2,
    pub h: M2,
    pub a4: T4,
}

fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

pub fn fd_tensors(web: &WebDefinition) -> impl Fn([f64; 4]) -> FdTensors + '_ {
    move |x| {
        let fns: [Box<dyn Fn([f64; 4]) -> f64>; 2] = [
            Box::new(move |p| naive_eval(&web.u1, p, &web.params).unwrap_or(f64::NAN)),
            Box::new(move |p| naive_eval(&web.u2, p, &web.params).unwrap_or(f64::NAN)),
        ];
        let d = |i: usize, alpha: [usize; 4]| fd_partial(&*fns[i], x, alpha);
        let xv = |j: usize| unit(j);
        let yv = |j: usize| unit(j + 2);
        let mut fbar = [[0.0; 2]; 2];
        let mut ftilde = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                fbar[i][j] = d(i, xv(j));
                ftilde[i][j] = d(i, yv(j));
            }
        }
        let gb = inv(&fbar);
        let gt = inv(&ftilde);
        // hess[i][l][m] = ∂²f^i/∂x^l∂y^m, dhess[v][i][l][m] its derivative along variable v
        let mut hess = [[[0.0; 2]; 2]; 2];
        let mut dhess = [[[[0.0; 2]; 2]; 2]; 4];
        for i in 0..2 {
            for l in 0..2 {
                for m in 0..2 {
                    hess[i][l][m] = d(i, add(xv(l), yv(m)));
                    for v in 0..4 {
                        dhess[v][i][l][m] = d(i, add(add(xv(l), yv(m)), unit(v)));
                    }
                }
            }
        }
        // derivatives of the inverse Jacobians: ∂G = −G (∂F) G
        let mut dgb = [[[0.0; 2]; 2]; 4];
        let mut dgt = [[[0.0; 2]; 2]; 4];
        for v in 0..4 {
            let mut dfb = [[0.0; 2]; 2];
            let mut dft = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    dfb[i][j] = d(i, add(xv(j), unit(v)));
                    dft[i][j] = d(i, add(yv(j), unit(v)));
                }
            }
            let a = mul(&mul(&gb, &dfb), &gb);
            let b = mul(&mul(&gt, &dft), &gt);
            for i in 0..2 {
                for j in 0..2 {
                    dgb[v][i][j] = -a[i][j];
                    dgt[v][i][j] = -b[i][j];
                }
            }
        }
        let mut gamma = [[[0.0; 2]; 2]; 2];
        // dg[v][i][j][k] = ∂Γ^i_jk/∂(variable v)
        let mut dg = [[[[0.0; 2]; 2]; 2]; 4];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        for m in 0..2 {
                            gamma[i][j][k] -= hess[i][l][m] * gb[l][j] * gt[m][k];
                            for v in 0..4 {
                                dg[v][i][j][k] -= dhess[v][i][l][m] * gb[l][j] * gt[m][k]
                                    + hess[i][l][m] * dgb[v][l][j] * gt[m][k]
                                    + hess[i][l][m] * gb[l][j] * dgt[v][m][k];
                            }
                        }
                    }
                }
            }
        }
        // frame derivatives ∂Γ^i_jk along the dual frames of the x and y leaves
        let mut gx = [[[[0.0; 2]; 2]; 2]; 2];
        let mut gy = [[[[0.0; 2]; 2]; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for m in 0..2 {
                        for n in 0..2 {
                            gx[i][j][k][m] += dg[n][i][j][k] * gb[n][m];
                            gy[i][j][k][m] += dg[n + 2][i][j][k] * gt[n][m];
                        }
                    }
                }
            }
        }
        let mut tor = [[[0.0; 2]; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    tor[i][j][k] = (gamma[i][j][k] - gamma[i][k][j]) / 2.0;
                }
            }
        }
        let a = [0, 1].map(|j| 2.0 * (tor[0][j][0] + tor[1][j][1]));
        let mut dax = [[0.0; 2]; 2];
        let mut day = [[0.0; 2]; 2];
        for j in 0..2 {
            for m in 0..2 {
                for s in 0..2 {
                    dax[j][m] += gx[s][j][s][m] - gx[s][s][j][m];
                    day[j][m] += gy[s][j][s][m] - gy[s][s][j][m];
                }
            }
        }
        let mut b = [[[[0.0; 2]; 2]; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let mut s = gx[i][k][l][j] + gx[i][j][l][k] - gy[i][k][j][l] - gy[i][k][l][j];
                        for m in 0..2 {
                            s += gamma[m][j][l] * gamma[i][k][m] - gamma[m][k][j] * gamma[i][m][l]
                                + 2.0 * gamma[m][k][l] * tor[i][m][j];
                        }
                        b[i][j][k][l] = s / 2.0;
                    }
                }
            }
        }
        let mut p = [[0.0; 2]; 2];
        let mut q = [[0.0; 2]; 2];
        for i in 0..2 {
            for k in 0..2 {
                p[i][k] = dax[i][k] - (a[0] * gamma[0][k][i] + a[1] * gamma[1][k][i]);
                q[i][k] = day[i][k] - (a[0] * gamma[0][i][k] + a[1] * gamma[1][i][k]);
            }
        }
        let (f, g, h, a4) = split(&b, &p, &q);
        FdTensors { fbar, ftilde, gamma, a, b, p, q, f, g, h, a4 }
    }
}

/// Fully symmetric part of the lower indices.
pub fn sym_lower(b: &T4) -> T4 {
    let mut out = [[[[0.0; 2]; 2]; 2]; 2];
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let idx = [j, k, l];
                    out[i][j][k][l] = perms.iter().map(|p| b[i][idx[p[0]]][idx[p[1]]][idx[p[2]]]).sum::<f64>() / 6.0;
                }
            }
        }
    }
    out
}

/// (f, g, h, a4) from b, p, q.
pub fn split(b: &T4, p: &M2, q: &M2) -> (M2, M2, M2, T4) {
    let bs = sym_lower(b);
    let mut f = [[0.0; 2]; 2];
    let mut g = [[0.0; 2]; 2];
    let mut h = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            h[i][j] = (bs[0][0][i][j] + bs[1][1][i][j]) / 4.0 - (p[i][j] + q[i][j]) / 3.0;
            f[i][j] = p[i][j] + h[i][j];
            g[i][j] = q[i][j] + h[i][j];
        }
    }
    let s = |j: usize, k: usize| f[j][k] + g[j][k] + h[j][k];
    let mut a4 = [[[[0.0; 2]; 2]; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    a4[i][j][k][l] = bs[i][j][k][l]
                        - (s(j, k) * delta(i, l) + s(k, l) * delta(i, j) + s(l, j) * delta(i, k)) / 3.0;
                }
            }
        }
    }
    (f, g, h, a4)
}

/// Looks up a golden path in the oracle tensors.
pub fn fd_get(t: &FdTensors, path: &threeweb::corpus::TensorPath) -> f64 {
    use threeweb::corpus::TensorPath::*;
    match *path {
        Gamma([i, j, k]) => t.gamma[i][j][k],
        Torsion([i, j, k]) => (t.gamma[i][j][k] - t.gamma[i][k][j]) / 2.0,
        Covector(i) => t.a[i],
        Curvature([i, j, k, l]) => t.b[i][j][k][l],
        ATensor([i, j, k, l]) => t.a4[i][j][k][l],
        P([i, j]) => t.p[i][j],
        Q([i, j]) => t.q[i][j],
        F([i, j]) => t.f[i][j],
        G([i, j]) => t.g[i][j],
        H([i, j]) => t.h[i][j],
    }
}

/// Relative agreement on `max(1, |reference|)`.
pub fn close(reference: f64, value: f64, rel: f64) -> bool {
    (reference - value).abs() <= rel * reference.abs().max(1.0)
}
