//! The two-component reaction-diffusion model in both variable sets.
//!
//! Original form:  U_t = (U^k U_x)_x + F(U, V),  V_t = (V^l V_x)_x + G(U, V).
//! Transformed form (through u = U^{k+1}, v = V^{l+1}):
//! u_xx = u^m u_t + C1(u, v),  v_xx = v^n v_t + C2(u, v) with
//! m = -k/(k+1), n = -l/(l+1).
//!
//! Residuals are evaluated in the expanded (non-divergence) form; the
//! finite-difference simulator independently uses the conservative form,
//! which keeps the two code paths honest about each other.

use crate::error::{Error, Result};
use crate::eval::{pow_term, real_pow, Fn2};

/// Original system: powers k, l and reaction terms F, G.
#[derive(Clone)]
pub struct RDSystemOriginal {
    pub k: f64,
    pub l: f64,
    pub f: Fn2,
    pub g: Fn2,
    /// Whether the simulator must keep U (resp. V) strictly positive.
    /// Derived from the exponents by default; constructors of systems whose
    /// reaction terms contain negative powers set it explicitly.
    pub require_positive: (bool, bool),
}

fn is_nonneg_integer(x: f64) -> bool {
    x >= -1e-9 && (x - x.round()).abs() < 1e-9
}

impl RDSystemOriginal {
    pub fn new(k: f64, l: f64, f: Fn2, g: Fn2) -> Self {
        RDSystemOriginal {
            k,
            l,
            f,
            g,
            require_positive: (!is_nonneg_integer(k), !is_nonneg_integer(l)),
        }
    }

    pub fn with_positivity(mut self, u: bool, v: bool) -> Self {
        self.require_positive = (u, v);
        self
    }

    pub fn is_analytic(&self) -> bool {
        self.f.is_analytic() && self.g.is_analytic()
    }
}

/// Transformed system: powers m, n and reaction terms C1, C2.
#[derive(Clone)]
pub struct RDSystemTransformed {
    pub m: f64,
    pub n: f64,
    pub c1: Fn2,
    pub c2: Fn2,
}

impl RDSystemTransformed {
    pub fn new(m: f64, n: f64, c1: Fn2, c2: Fn2) -> Result<Self> {
        if (m + 1.0).abs() < 1e-12 {
            return Err(Error::BadExponent {
                name: "m",
                value: m,
                why: "m = -1 is outside the power-substitution range",
            });
        }
        if (n + 1.0).abs() < 1e-12 {
            return Err(Error::BadExponent {
                name: "n",
                value: n,
                why: "n = -1 is outside the power-substitution range",
            });
        }
        Ok(RDSystemTransformed { m, n, c1, c2 })
    }

    pub fn is_analytic(&self) -> bool {
        self.c1.is_analytic() && self.c2.is_analytic()
    }
}

/// A point of the jet space: coordinates, field values and derivative slots.
/// Operations state which slots they need; a missing slot is a domain error.
#[derive(Clone, Copy, Debug, Default)]
pub struct JetPoint {
    pub t: f64,
    pub x: f64,
    pub u: f64,
    pub v: f64,
    pub u_t: Option<f64>,
    pub v_t: Option<f64>,
    pub u_x: Option<f64>,
    pub v_x: Option<f64>,
    pub u_xx: Option<f64>,
    pub v_xx: Option<f64>,
}

impl JetPoint {
    pub fn new(t: f64, x: f64, u: f64, v: f64) -> Self {
        JetPoint {
            t,
            x,
            u,
            v,
            ..Default::default()
        }
    }

    pub fn slot(&self, name: &'static str) -> Result<f64> {
        let v = match name {
            "u_t" => self.u_t,
            "v_t" => self.v_t,
            "u_x" => self.u_x,
            "v_x" => self.v_x,
            "u_xx" => self.u_xx,
            "v_xx" => self.v_xx,
            _ => None,
        };
        v.ok_or(Error::MissingSlot(name))
    }
}

/// Transformed exponent m = -k/(k+1) (and n likewise for l).
pub fn transformed_exponent(k: f64) -> f64 {
    -k / (k + 1.0)
}

/// Map the original system to the transformed one through u = U^{k+1},
/// v = V^{l+1}. Reaction partials come from the chain rule, so an analytic
/// system stays analytic.
pub fn transform_to_uv(sys: &RDSystemOriginal) -> Result<RDSystemTransformed> {
    for (name, value) in [("k", sys.k), ("l", sys.l)] {
        if (value + 1.0).abs() < 1e-12 {
            return Err(Error::BadExponent {
                name,
                value,
                why: "the power substitution requires k != -1 and l != -1",
            });
        }
    }
    let (k, l) = (sys.k, sys.l);
    let m = transformed_exponent(k);
    let n = transformed_exponent(l);
    let ak = 1.0 / (k + 1.0);
    let al = 1.0 / (l + 1.0);

    let f = sys.f.clone();
    let c1 = {
        let fv = f.clone();
        let fu = f.clone();
        let fw = f;
        Fn2::from_fns(
            move |u, v| {
                let uu = real_pow(u, ak)?;
                let vv = real_pow(v, al)?;
                Ok(-(k + 1.0) * fv.eval(uu, vv)?)
            },
            // dC1/du = -F_U * u^m
            move |u, v| {
                let uu = real_pow(u, ak)?;
                let vv = real_pow(v, al)?;
                Ok(-fu.du(uu, vv)? * real_pow(u, m)?)
            },
            // dC1/dv = -((k+1)/(l+1)) * F_V * v^n
            move |u, v| {
                let uu = real_pow(u, ak)?;
                let vv = real_pow(v, al)?;
                Ok(-(k + 1.0) * al * fw.dv(uu, vv)? * real_pow(v, n)?)
            },
        )
    };
    let g = sys.g.clone();
    let c2 = {
        let gv = g.clone();
        let gu = g.clone();
        let gw = g;
        Fn2::from_fns(
            move |u, v| {
                let uu = real_pow(u, ak)?;
                let vv = real_pow(v, al)?;
                Ok(-(l + 1.0) * gv.eval(uu, vv)?)
            },
            // dC2/du = -((l+1)/(k+1)) * G_U * u^m
            move |u, v| {
                let uu = real_pow(u, ak)?;
                let vv = real_pow(v, al)?;
                Ok(-(l + 1.0) * ak * gu.du(uu, vv)? * real_pow(u, m)?)
            },
            // dC2/dv = -G_V * v^n
            move |u, v| {
                let uu = real_pow(u, ak)?;
                let vv = real_pow(v, al)?;
                Ok(-gw.dv(uu, vv)? * real_pow(v, n)?)
            },
        )
    };
    RDSystemTransformed::new(m, n, c1, c2)
}

/// Inverse map: from (m, n, C1, C2) back to (k, l, F, G). The exponent map
/// is an involution, k = -m/(m+1).
pub fn transform_to_original(sys: &RDSystemTransformed) -> Result<RDSystemOriginal> {
    let (m, n) = (sys.m, sys.n);
    let k = -m / (m + 1.0);
    let l = -n / (n + 1.0);

    let c1 = sys.c1.clone();
    let f = {
        let ca = c1.clone();
        let cb = c1.clone();
        let cc = c1;
        Fn2::from_fns(
            move |uu, vv| {
                let u = real_pow(uu, k + 1.0)?;
                let v = real_pow(vv, l + 1.0)?;
                Ok(-ca.eval(u, v)? / (k + 1.0))
            },
            move |uu, vv| {
                let u = real_pow(uu, k + 1.0)?;
                let v = real_pow(vv, l + 1.0)?;
                Ok(-cb.du(u, v)? * real_pow(uu, k)?)
            },
            move |uu, vv| {
                let u = real_pow(uu, k + 1.0)?;
                let v = real_pow(vv, l + 1.0)?;
                Ok(-cc.dv(u, v)? * (l + 1.0) / (k + 1.0) * real_pow(vv, l)?)
            },
        )
    };
    let c2 = sys.c2.clone();
    let g = {
        let ca = c2.clone();
        let cb = c2.clone();
        let cc = c2;
        Fn2::from_fns(
            move |uu, vv| {
                let u = real_pow(uu, k + 1.0)?;
                let v = real_pow(vv, l + 1.0)?;
                Ok(-ca.eval(u, v)? / (l + 1.0))
            },
            move |uu, vv| {
                let u = real_pow(uu, k + 1.0)?;
                let v = real_pow(vv, l + 1.0)?;
                Ok(-cb.du(u, v)? * (k + 1.0) / (l + 1.0) * real_pow(uu, k)?)
            },
            move |uu, vv| {
                let u = real_pow(uu, k + 1.0)?;
                let v = real_pow(vv, l + 1.0)?;
                Ok(-cc.dv(u, v)? * real_pow(vv, l)?)
            },
        )
    };
    Ok(RDSystemOriginal::new(k, l, f, g).with_positivity(true, true))
}

/// Residual of the original system in expanded form:
/// r1 = U_t - k U^{k-1} U_x^2 - U^k U_xx - F(U, V), r2 analogous.
pub fn original_residual(sys: &RDSystemOriginal, p: &JetPoint) -> Result<(f64, f64)> {
    let (u, v) = (p.u, p.v);
    let r1 = p.slot("u_t")?
        - pow_term(sys.k * p.slot("u_x")?.powi(2), u, sys.k - 1.0)?
        - real_pow(u, sys.k)? * p.slot("u_xx")?
        - sys.f.eval(u, v)?;
    let r2 = p.slot("v_t")?
        - pow_term(sys.l * p.slot("v_x")?.powi(2), v, sys.l - 1.0)?
        - real_pow(v, sys.l)? * p.slot("v_xx")?
        - sys.g.eval(u, v)?;
    Ok((r1, r2))
}

/// Residual of the transformed system:
/// r1 = u_xx - u^m u_t - C1(u, v), r2 analogous.
pub fn transformed_residual(sys: &RDSystemTransformed, p: &JetPoint) -> Result<(f64, f64)> {
    let (u, v) = (p.u, p.v);
    let r1 = p.slot("u_xx")? - real_pow(u, sys.m)? * p.slot("u_t")? - sys.c1.eval(u, v)?;
    let r2 = p.slot("v_xx")? - real_pow(v, sys.n)? * p.slot("v_t")? - sys.c2.eval(u, v)?;
    Ok((r1, r2))
}

/// Map a jet point of the original variables to the transformed ones:
/// u = U^{k+1} with all derivatives by the chain rule.
pub fn map_jet_to_uv(sys: &RDSystemOriginal, p: &JetPoint) -> Result<JetPoint> {
    let (k, l) = (sys.k, sys.l);
    let map_one = |w: f64, wt: f64, wx: f64, wxx: f64, e: f64| -> Result<(f64, f64, f64, f64)> {
        let b = real_pow(w, e + 1.0)?;
        let s = real_pow(w, e)?; // w^e
        let bt = (e + 1.0) * s * wt;
        let bx = (e + 1.0) * s * wx;
        let bxx = pow_term((e + 1.0) * e * wx * wx, w, e - 1.0)? + (e + 1.0) * s * wxx;
        Ok((b, bt, bx, bxx))
    };
    let (u, ut, ux, uxx) = map_one(
        p.u,
        p.slot("u_t")?,
        p.slot("u_x")?,
        p.slot("u_xx")?,
        k,
    )?;
    let (v, vt, vx, vxx) = map_one(
        p.v,
        p.slot("v_t")?,
        p.slot("v_x")?,
        p.slot("v_xx")?,
        l,
    )?;
    Ok(JetPoint {
        t: p.t,
        x: p.x,
        u,
        v,
        u_t: Some(ut),
        v_t: Some(vt),
        u_x: Some(ux),
        v_x: Some(vx),
        u_xx: Some(uxx),
        v_xx: Some(vxx),
    })
}
