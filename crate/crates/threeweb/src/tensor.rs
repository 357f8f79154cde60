//! Pointwise invariants of a web: Jacobians, connection, torsion, curvature,
//! Pfaffian derivatives of the torsion covector and the f/g/h/a-tensor decomposition.
//!
//! Index conventions: `fbar[i][j] = ∂f^i/∂x^j`, `ftilde[i][j] = ∂f^i/∂y^j`,
//! `gbar = fbar⁻¹` with `gbar[l][j] = ḡ^l_j`; `gamma[i][j][k] = Γ^i_jk` where `j`
//! pairs with `ḡ` and `k` with `g̃`. Tensors are indexed upper index first.
//! Round brackets in the formulas below mean symmetrization divided by the
//! number of permutations, square brackets alternation divided by it.

use serde::Serialize;
use thiserror::Error;

use crate::expr::{eval_in, EvalError, WebDefinition};
use crate::jet::Jet3;
use crate::Scalar;

pub type M2<T> = [[T; 2]; 2];
pub type T3<T> = [[[T; 2]; 2]; 2];
pub type T4<T> = [[[[T; 2]; 2]; 2]; 2];

#[derive(Clone, Debug, PartialEq, Error)]
pub enum PipelineError {
    #[error("point violates domain constraint #{index} ({constraint})")]
    Inadmissible { index: usize, constraint: String },
    #[error("cannot evaluate the defining functions: {0}")]
    Eval(#[from] EvalError),
    #[error("degenerate web: det(∂f/∂{wrt}) = {det:e} at {point:?}")]
    Degenerate { wrt: &'static str, det: f64, point: [f64; 4] },
    #[error("torsion does not have the rank-one covector form (residual {residual:e})")]
    StructureViolation { residual: f64 },
    #[error("non-finite tensor component at {point:?}")]
    NonFinite { point: [f64; 4] },
}

/// Every tensor of the pipeline evaluated at one point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TensorSnapshot<T> {
    pub point: [T; 4],
    pub fbar: M2<T>,
    pub ftilde: M2<T>,
    pub gbar: M2<T>,
    pub gtilde: M2<T>,
    pub gamma: T3<T>,
    /// `omega1[i][j][k]`: coefficient of ω₁^k in ω_j^i, equal to Γ^i_kj.
    pub omega1: T3<T>,
    /// `omega2[i][j][k]`: coefficient of ω₂^k in ω_j^i, equal to Γ^i_jk.
    pub omega2: T3<T>,
    pub torsion: T3<T>,
    pub a: [T; 2],
    /// `dgamma_x[i][j][k][m] = ∂Γ^i_jk/∂x^l · ḡ^l_m`.
    pub dgamma_x: T4<T>,
    /// `dgamma_y[i][j][k][m] = ∂Γ^i_jk/∂y^l · g̃^l_m`.
    pub dgamma_y: T4<T>,
    pub da_x: M2<T>,
    pub da_y: M2<T>,
    pub b: T4<T>,
    pub p: M2<T>,
    pub q: M2<T>,
    pub f: M2<T>,
    pub g: M2<T>,
    pub h: M2<T>,
    pub a4: T4<T>,
    /// `a₂/a₁`, absent when `a₁ = 0`.
    pub t_ratio: Option<T>,
    /// Set when p or q is not symmetric; f, g, h, a4 are then formal.
    pub non_isoclinic: bool,
}

fn zero2<T: Scalar>() -> M2<T> {
    [[T::zero(); 2]; 2]
}

fn zero3<T: Scalar>() -> T3<T> {
    [[[T::zero(); 2]; 2]; 2]
}

fn zero4<T: Scalar>() -> T4<T> {
    [[[[T::zero(); 2]; 2]; 2]; 2]
}

fn delta<T: Scalar>(i: usize, j: usize) -> T {
    if i == j {
        T::one()
    } else {
        T::zero()
    }
}

pub fn det2<T: Scalar>(m: &M2<T>) -> T {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Closed-form 2×2 inverse; the caller guards the determinant.
pub fn inv2<T: Scalar>(m: &M2<T>) -> M2<T> {
    let d = det2(m);
    [[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]
}

fn inv2_jet<T: Scalar>(m: &[[Jet3<T>; 2]; 2]) -> [[Jet3<T>; 2]; 2] {
    let r = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).recip();
    [[m[1][1] * r, -(m[0][1] * r)], [-(m[1][0] * r), m[0][0] * r]]
}

fn values<T: Scalar>(m: &[[Jet3<T>; 2]; 2]) -> M2<T> {
    [[m[0][0].value(), m[0][1].value()], [m[1][0].value(), m[1][1].value()]]
}

fn to_f64<T: Scalar>(p: [T; 4]) -> [f64; 4] {
    p.map(|v| v.to_f64().unwrap_or(f64::NAN))
}

/// Rejects a Jacobian whose determinant is tiny relative to its entries.
fn guard<T: Scalar>(m: &M2<T>, wrt: &'static str, point: [T; 4]) -> Result<(), PipelineError> {
    let d = det2(m);
    let big = m.iter().flatten().fold(T::zero(), |acc, v| acc.max(v.abs()));
    if !(d.abs() > T::lit(1e-10) * big * big) {
        return Err(PipelineError::Degenerate {
            wrt,
            det: d.to_f64().unwrap_or(f64::NAN),
            point: to_f64(point),
        });
    }
    Ok(())
}

/// Jacobians of the defining functions and their inverses at `point`.
pub fn jacobians<T: Scalar>(
    web: &WebDefinition,
    point: [T; 4],
) -> Result<(M2<T>, M2<T>, M2<T>, M2<T>), PipelineError> {
    let f = lift(web, point)?;
    let fbar = [[f[0].d1(0), f[0].d1(1)], [f[1].d1(0), f[1].d1(1)]];
    let ftilde = [[f[0].d1(2), f[0].d1(3)], [f[1].d1(2), f[1].d1(3)]];
    guard(&fbar, "x", point)?;
    guard(&ftilde, "y", point)?;
    Ok((fbar, ftilde, inv2(&fbar), inv2(&ftilde)))
}

fn lift<T: Scalar>(web: &WebDefinition, point: [T; 4]) -> Result<[Jet3<T>; 2], PipelineError> {
    let vars = [0, 1, 2, 3].map(|v| Jet3::variable(v, point[v]));
    Ok([eval_in(&web.u1, &vars, &web.params)?, eval_in(&web.u2, &vars, &web.params)?])
}

/// Torsion `a^i_jk = (Γ^i_jk − Γ^i_kj)/2` and covector `a_j = 2 a^m_jm`.
pub fn torsion_and_covector<T: Scalar>(gamma: &T3<T>) -> Result<(T3<T>, [T; 2]), PipelineError> {
    let half = T::lit(0.5);
    let mut tor = zero3();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                tor[i][j][k] = (gamma[i][j][k] - gamma[i][k][j]) * half;
            }
        }
    }
    let mut a = [T::zero(); 2];
    for (j, aj) in a.iter_mut().enumerate() {
        *aj = (tor[0][j][0] + tor[1][j][1]) * T::lit(2.0);
    }
    let mut resid = T::zero();
    let mut scale = T::one();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                let rebuilt = (a[j] * delta(i, k) - a[k] * delta(i, j)) * half;
                resid = resid.max((tor[i][j][k] - rebuilt).abs());
                scale = scale.max(tor[i][j][k].abs());
            }
        }
    }
    if resid > T::lit(1e-8) * scale {
        return Err(PipelineError::StructureViolation { residual: (resid / scale).to_f64().unwrap_or(f64::NAN) });
    }
    Ok((tor, a))
}

fn sym3<T: Scalar>(t: &T4<T>, i: usize, j: usize, k: usize, l: usize) -> T {
    let s = t[i][j][k][l] + t[i][j][l][k] + t[i][k][j][l] + t[i][k][l][j] + t[i][l][j][k] + t[i][l][k][j];
    s / T::lit(6.0)
}

/// Fully symmetric part `b^i_(jkl)`.
pub fn symmetrized<T: Scalar>(b: &T4<T>) -> T4<T> {
    let mut out = zero4();
    for (i, oi) in out.iter_mut().enumerate() {
        for (j, oj) in oi.iter_mut().enumerate() {
            for (k, ok) in oj.iter_mut().enumerate() {
                for (l, o) in ok.iter_mut().enumerate() {
                    *o = sym3(b, i, j, k, l);
                }
            }
        }
    }
    out
}

/// `h = ¼ b^k_(kij) − ⅓(p + q)`, `f = p + h`, `g = q + h` and the a-tensor
/// `a^i_jkl = b^i_(jkl) − (S_(jk δ^i_l))` with `S = f + g + h`.
pub fn decomposition<T: Scalar>(b: &T4<T>, p: &M2<T>, q: &M2<T>) -> (M2<T>, M2<T>, M2<T>, T4<T>) {
    let bs = symmetrized(b);
    let mut h = zero2();
    let mut f = zero2();
    let mut g = zero2();
    let three = T::lit(3.0);
    for i in 0..2 {
        for j in 0..2 {
            let trace = bs[0][0][i][j] + bs[1][1][i][j];
            h[i][j] = trace / T::lit(4.0) - (p[i][j] + q[i][j]) / three;
            f[i][j] = p[i][j] + h[i][j];
            g[i][j] = q[i][j] + h[i][j];
        }
    }
    let mut s = zero2();
    for i in 0..2 {
        for j in 0..2 {
            s[i][j] = f[i][j] + g[i][j] + h[i][j];
        }
    }
    let mut a4 = zero4();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let corr = s[j][k] * delta(i, l) + s[k][l] * delta(i, j) + s[l][j] * delta(i, k);
                    a4[i][j][k][l] = bs[i][j][k][l] - corr / three;
                }
            }
        }
    }
    (h, f, g, a4)
}

/// Full tensor snapshot at `point`. Constraints are checked strictly (no margin).
pub fn snapshot<T: Scalar>(web: &WebDefinition, point: [T; 4]) -> Result<TensorSnapshot<T>, PipelineError> {
    if let Some(index) = web.first_violation(to_f64(point), 0.0) {
        return Err(PipelineError::Inadmissible { index, constraint: web.constraints[index].to_string() });
    }
    let f = lift(web, point)?;
    let fx: [[Jet3<T>; 2]; 2] = [[f[0].d(0), f[0].d(1)], [f[1].d(0), f[1].d(1)]];
    let fy: [[Jet3<T>; 2]; 2] = [[f[0].d(2), f[0].d(3)], [f[1].d(2), f[1].d(3)]];
    let fbar = values(&fx);
    let ftilde = values(&fy);
    guard(&fbar, "x", point)?;
    guard(&ftilde, "y", point)?;
    let gx = inv2_jet(&fx);
    let gy = inv2_jet(&fy);
    let gbar = values(&gx);
    let gtilde = values(&gy);

    // Γ^i_jk = −∂²f^i/∂x^l∂y^m ḡ^l_j g̃^m_k, as jets exact to first order
    let zero = Jet3::constant(T::zero());
    let mut gj = [[[zero; 2]; 2]; 2];
    for (i, fi) in fx.iter().enumerate() {
        let hess = [[fi[0].d(2), fi[0].d(3)], [fi[1].d(2), fi[1].d(3)]];
        for j in 0..2 {
            for k in 0..2 {
                let mut s = zero;
                for l in 0..2 {
                    for m in 0..2 {
                        s = s + hess[l][m] * gx[l][j] * gy[m][k];
                    }
                }
                gj[i][j][k] = -s;
            }
        }
    }
    let mut gamma = zero3();
    let mut dgamma_x = zero4();
    let mut dgamma_y = zero4();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                let jet = &gj[i][j][k];
                gamma[i][j][k] = jet.value();
                for m in 0..2 {
                    dgamma_x[i][j][k][m] = jet.d1(0) * gbar[0][m] + jet.d1(1) * gbar[1][m];
                    dgamma_y[i][j][k][m] = jet.d1(2) * gtilde[0][m] + jet.d1(3) * gtilde[1][m];
                }
            }
        }
    }
    let mut omega1 = zero3();
    let mut omega2 = zero3();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                omega1[i][j][k] = gamma[i][k][j];
                omega2[i][j][k] = gamma[i][j][k];
            }
        }
    }
    let (torsion, a) = torsion_and_covector(&gamma)?;

    // a_j = Σ_m (Γ^m_jm − Γ^m_mj); its first derivatives come from the Γ jets
    let mut da_x = zero2();
    let mut da_y = zero2();
    for j in 0..2 {
        let aj = (gj[0][j][0] - gj[0][0][j]) + (gj[1][j][1] - gj[1][1][j]);
        for m in 0..2 {
            da_x[j][m] = aj.d1(0) * gbar[0][m] + aj.d1(1) * gbar[1][m];
            da_y[j][m] = aj.d1(2) * gtilde[0][m] + aj.d1(3) * gtilde[1][m];
        }
    }

    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let mut b = zero4();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let mut s = dgamma_x[i][k][l][j] + dgamma_x[i][j][l][k]
                        - dgamma_y[i][k][j][l]
                        - dgamma_y[i][k][l][j];
                    for m in 0..2 {
                        s = s + gamma[m][j][l] * gamma[i][k][m] - gamma[m][k][j] * gamma[i][m][l]
                            + two * gamma[m][k][l] * torsion[i][m][j];
                    }
                    b[i][j][k][l] = s * half;
                }
            }
        }
    }

    let mut p = zero2();
    let mut q = zero2();
    for i in 0..2 {
        for k in 0..2 {
            p[i][k] = da_x[i][k] - (a[0] * gamma[0][k][i] + a[1] * gamma[1][k][i]);
            q[i][k] = da_y[i][k] - (a[0] * gamma[0][i][k] + a[1] * gamma[1][i][k]);
        }
    }
    let (h, fd, gd, a4) = decomposition(&b, &p, &q);

    let pq_scale = p.iter().chain(q.iter()).flatten().fold(T::one(), |acc, v| acc.max(v.abs()));
    let asym = (p[0][1] - p[1][0]).abs().max((q[0][1] - q[1][0]).abs());
    let non_isoclinic = asym > T::lit(1e-8) * pq_scale;

    let t_ratio = (a[0] != T::zero()).then(|| a[1] / a[0]);

    let snap = TensorSnapshot {
        point,
        fbar,
        ftilde,
        gbar,
        gtilde,
        gamma,
        omega1,
        omega2,
        torsion,
        a,
        dgamma_x,
        dgamma_y,
        da_x,
        da_y,
        b,
        p,
        q,
        f: fd,
        g: gd,
        h,
        a4,
        t_ratio,
        non_isoclinic,
    };
    if !snap.is_finite() {
        return Err(PipelineError::NonFinite { point: to_f64(point) });
    }
    Ok(snap)
}

impl<T: Scalar> TensorSnapshot<T> {
    fn is_finite(&self) -> bool {
        let m2 = |m: &M2<T>| m.iter().flatten().all(|v| v.is_finite());
        let t3 = |t: &T3<T>| t.iter().flatten().flatten().all(|v| v.is_finite());
        let t4 = |t: &T4<T>| t.iter().flatten().flatten().flatten().all(|v| v.is_finite());
        m2(&self.gbar)
            && m2(&self.gtilde)
            && t3(&self.gamma)
            && t4(&self.dgamma_x)
            && t4(&self.dgamma_y)
            && m2(&self.da_x)
            && m2(&self.da_y)
            && t4(&self.b)
            && t4(&self.a4)
            && m2(&self.f)
            && m2(&self.g)
            && m2(&self.h)
    }

    /// `b^i_(jkl)`.
    pub fn b_sym(&self) -> T4<T> {
        symmetrized(&self.b)
    }
}
