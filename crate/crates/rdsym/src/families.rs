//! The five conditional-symmetry families: system/operator pairs, the
//! corresponding ansatz profiles, and the reduced ODE residuals.
//!
//! Family one and three carry a coefficient function p(x) solving
//! p'' = p^2 + lambda p. Families four and five couple the components
//! through a similarity variable evaluated in log form to avoid overflow.
//! The restriction set of each family guards against collapse to a plain
//! Lie symmetry; violations are rejected by name.

use std::sync::Arc;

use rand::Rng;

use crate::detcheck::QOperator;
use crate::error::{Error, Result};
use crate::eval::{pow_term, real_pow, Coef, Fn1, Fn2, Point4, Profile};
use crate::model::{transform_to_uv, JetPoint, RDSystemOriginal, RDSystemTransformed};
use crate::reduction::PFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyId {
    F1,
    F2,
    F3,
    F4,
    F5,
}

impl FamilyId {
    pub fn number(self) -> u8 {
        match self {
            FamilyId::F1 => 1,
            FamilyId::F2 => 2,
            FamilyId::F3 => 3,
            FamilyId::F4 => 4,
            FamilyId::F5 => 5,
        }
    }

    pub fn from_number(n: u8) -> Option<FamilyId> {
        match n {
            1 => Some(FamilyId::F1),
            2 => Some(FamilyId::F2),
            3 => Some(FamilyId::F3),
            4 => Some(FamilyId::F4),
            5 => Some(FamilyId::F5),
            _ => None,
        }
    }
}

/// Parameters of one family. A plain data carrier: the restriction set is
/// enforced by [`FamilyParams::validate`] / [`build_family`], not at
/// construction, so partially admissible parameter objects can be assembled
/// and inspected.
#[derive(Clone)]
pub struct FamilyParams {
    pub id: FamilyId,
    pub k: f64,
    pub l: f64,
    /// constant of the p-equation (families 1 and 3)
    pub lambda: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub lambda4: f64,
    pub f: Fn1,
    pub g: Fn1,
    /// p(x) coefficient function (families 1 and 3)
    pub p: Option<Arc<PFunction>>,
}

impl FamilyParams {
    pub fn family1(k: f64, lambda: f64, p: Arc<PFunction>, f: Fn1, g: Fn1) -> Self {
        FamilyParams {
            id: FamilyId::F1,
            k,
            l: -0.5,
            lambda,
            lambda1: 0.0,
            lambda2: 0.0,
            lambda3: 0.0,
            lambda4: 0.0,
            f,
            g,
            p: Some(p),
        }
    }

    pub fn family2(k: f64, l: f64, lambda1: f64, lambda2: f64, f: Fn1, g: Fn1) -> Self {
        FamilyParams {
            id: FamilyId::F2,
            k,
            l,
            lambda: 0.0,
            lambda1,
            lambda2,
            lambda3: 0.0,
            lambda4: 0.0,
            f,
            g,
            p: None,
        }
    }

    pub fn family3(lambda: f64, p: Arc<PFunction>, f: Fn1, g: Fn1) -> Self {
        FamilyParams {
            id: FamilyId::F3,
            k: -0.5,
            l: -0.5,
            lambda,
            lambda1: 0.0,
            lambda2: 0.0,
            lambda3: 0.0,
            lambda4: 0.0,
            f,
            g,
            p: Some(p),
        }
    }

    pub fn family4(
        k: f64,
        l: f64,
        lambda1: f64,
        lambda2: f64,
        lambda3: f64,
        f: Fn1,
        g: Fn1,
    ) -> Self {
        FamilyParams {
            id: FamilyId::F4,
            k,
            l,
            lambda: 0.0,
            lambda1,
            lambda2,
            lambda3,
            lambda4: 0.0,
            f,
            g,
            p: None,
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn family5(
        k: f64,
        l: f64,
        lambda1: f64,
        lambda2: f64,
        lambda3: f64,
        lambda4: f64,
        f: Fn1,
        g: Fn1,
    ) -> Self {
        FamilyParams {
            id: FamilyId::F5,
            k,
            l,
            lambda: 0.0,
            lambda1,
            lambda2,
            lambda3,
            lambda4,
            f,
            g,
            p: None,
        }
    }

    /// Coupling constant of family two: alpha = lambda1 (k+1) / (lambda2 (l+1)).
    pub fn alpha(&self) -> f64 {
        self.lambda1 * (self.k + 1.0) / (self.lambda2 * (self.l + 1.0))
    }

    /// Exponent of the similarity variable for families four and five.
    pub fn omega_exponent(&self) -> f64 {
        match self.id {
            FamilyId::F4 => self.lambda1 * (self.k + 1.0) / (self.lambda2 * (self.l + 1.0)),
            FamilyId::F5 => self.lambda2 * (self.k + 1.0) / (self.lambda4 * (self.l + 1.0)),
            _ => 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fam = self.id.number();
        if ((self.k + 1.0) * (self.l + 1.0)).abs() < 1e-12 {
            return Err(Error::Restriction {
                family: fam,
                restriction: "(k+1)(l+1) != 0",
            });
        }
        if self.k * self.k + self.l * self.l < 1e-24 {
            return Err(Error::Restriction {
                family: fam,
                restriction: "k^2 + l^2 != 0",
            });
        }
        let need_p = |p: &Option<Arc<PFunction>>| -> Result<()> {
            match p {
                None => Err(Error::Restriction {
                    family: fam,
                    restriction: "p != 0",
                }),
                Some(p) if p.is_identically_zero() => Err(Error::Restriction {
                    family: fam,
                    restriction: "p != 0",
                }),
                Some(p) if (p.lambda() - self.lambda).abs() > 1e-12 => {
                    Err(Error::Domain(format!(
                        "p was solved with lambda = {}, family uses lambda = {}",
                        p.lambda(),
                        self.lambda
                    )))
                }
                Some(_) => Ok(()),
            }
        };
        let trichotomy = || -> Result<()> {
            let a = self.lambda1 * self.lambda1 + self.lambda3 * self.lambda3 > 0.0;
            let b = self.lambda3 * self.lambda3 + self.k * self.k > 0.0;
            let c = self.lambda1 * self.lambda1 + self.l * self.l > 0.0;
            if a || b || c {
                Ok(())
            } else {
                Err(Error::Restriction {
                    family: fam,
                    restriction:
                        "lambda1^2+lambda3^2 != 0 or lambda3^2+k^2 != 0 or lambda1^2+l^2 != 0",
                })
            }
        };
        match self.id {
            FamilyId::F1 => need_p(&self.p),
            FamilyId::F2 => {
                if self.lambda2 == 0.0 {
                    return Err(Error::Restriction {
                        family: fam,
                        restriction: "lambda2 != 0",
                    });
                }
                if self.lambda1 * self.lambda1 + self.l * self.l < 1e-24 {
                    return Err(Error::Restriction {
                        family: fam,
                        restriction: "lambda1^2 + l^2 != 0",
                    });
                }
                Ok(())
            }
            FamilyId::F3 => need_p(&self.p),
            FamilyId::F4 => {
                if self.lambda2 == 0.0 {
                    return Err(Error::Restriction {
                        family: fam,
                        restriction: "lambda2 != 0",
                    });
                }
                trichotomy()
            }
            FamilyId::F5 => {
                if self.lambda2 * self.lambda4 == 0.0 {
                    return Err(Error::Restriction {
                        family: fam,
                        restriction: "lambda2 * lambda4 != 0",
                    });
                }
                trichotomy()
            }
        }
    }
}

/// Similarity variable of family four in log form:
/// omega = exp(u - beta ln(v - lambda3)) with u = U^{k+1}, v = V^{l+1}.
fn omega4(u_pow: f64, v_pow: f64, lambda3: f64, beta: f64) -> Result<f64> {
    if beta == 0.0 {
        return Ok(u_pow.exp());
    }
    let w = v_pow - lambda3;
    if w <= 0.0 {
        return Err(Error::Domain(format!(
            "similarity variable needs V^(l+1) > lambda3 (got {v_pow} vs {lambda3})"
        )));
    }
    Ok((u_pow - beta * w.ln()).exp())
}

/// Similarity variable of family five: (u - lambda1) (v - lambda3)^{-beta}.
fn omega5(u_pow: f64, v_pow: f64, lambda1: f64, lambda3: f64, beta: f64) -> Result<f64> {
    Ok((u_pow - lambda1) * real_pow(v_pow - lambda3, -beta)?)
}

/// A built family: the nonlinear system together with the symmetry operator
/// in the transformed variables.
#[derive(Clone)]
pub struct Family {
    pub params: FamilyParams,
    pub original: RDSystemOriginal,
    pub operator: QOperator,
}

impl Family {
    /// The transformed system the determining equations act on.
    pub fn transformed(&self) -> Result<RDSystemTransformed> {
        transform_to_uv(&self.original)
    }
}

/// Assemble the family's system and operator, rejecting violated
/// restrictions by name.
pub fn build_family(params: FamilyParams) -> Result<Family> {
    params.validate()?;
    let (k, l) = (params.k, params.l);
    let original = match params.id {
        FamilyId::F1 => {
            let (f1, f2) = (params.f.clone(), params.f.clone());
            let lam = params.lambda;
            let (g1, g2) = (params.g.clone(), params.g.clone());
            RDSystemOriginal::new(
                k,
                l,
                Fn2::from_fns(
                    move |uu, _| f1.eval(real_pow(uu, k + 1.0)?),
                    move |uu, _| Ok(f2.deriv(real_pow(uu, k + 1.0)?)? * (k + 1.0) * real_pow(uu, k)?),
                    |_, _| Ok(0.0),
                ),
                Fn2::from_fns(
                    move |uu, vv| {
                        Ok(-2.0 * lam * real_pow(vv, 0.5)? + g1.eval(real_pow(uu, k + 1.0)?)?)
                    },
                    move |uu, _| Ok(g2.deriv(real_pow(uu, k + 1.0)?)? * (k + 1.0) * real_pow(uu, k)?),
                    move |_, vv| Ok(-lam * real_pow(vv, -0.5)?),
                ),
            )
            .with_positivity(true, true)
        }
        FamilyId::F2 => {
            let alpha = params.alpha();
            let (l1, l2) = (params.lambda1, params.lambda2);
            let (f1, f2, f3) = (params.f.clone(), params.f.clone(), params.f.clone());
            let (g1, g2, g3) = (params.g.clone(), params.g.clone(), params.g.clone());
            let arg = move |uu: f64, vv: f64| -> Result<f64> {
                Ok(real_pow(uu, k + 1.0)? - alpha * real_pow(vv, l + 1.0)?)
            };
            RDSystemOriginal::new(
                k,
                l,
                Fn2::from_fns(
                    move |uu, vv| Ok(pow_term(l1, uu, -k)? + f1.eval(arg(uu, vv)?)?),
                    move |uu, vv| {
                        Ok(pow_term(-k * l1, uu, -k - 1.0)?
                            + f2.deriv(arg(uu, vv)?)? * (k + 1.0) * real_pow(uu, k)?)
                    },
                    move |uu, vv| {
                        Ok(-f3.deriv(arg(uu, vv)?)? * alpha * (l + 1.0) * real_pow(vv, l)?)
                    },
                ),
                Fn2::from_fns(
                    move |uu, vv| Ok(pow_term(l2, vv, -l)? + g1.eval(arg(uu, vv)?)?),
                    move |uu, vv| {
                        Ok(g2.deriv(arg(uu, vv)?)? * (k + 1.0) * real_pow(uu, k)?)
                    },
                    move |uu, vv| {
                        Ok(pow_term(-l * l2, vv, -l - 1.0)?
                            - g3.deriv(arg(uu, vv)?)? * alpha * (l + 1.0) * real_pow(vv, l)?)
                    },
                ),
            )
            .with_positivity(true, true)
        }
        FamilyId::F3 => {
            let lam = params.lambda;
            let (f1, f2, f3) = (params.f.clone(), params.f.clone(), params.f.clone());
            let (g1, g2, g3) = (params.g.clone(), params.g.clone(), params.g.clone());
            let arg =
                move |uu: f64, vv: f64| -> Result<f64> { Ok(real_pow(uu, 0.5)? - real_pow(vv, 0.5)?) };
            RDSystemOriginal::new(
                -0.5,
                -0.5,
                Fn2::from_fns(
                    move |uu, vv| Ok(-2.0 * lam * real_pow(uu, 0.5)? + f1.eval(arg(uu, vv)?)?),
                    move |uu, vv| {
                        Ok(-lam * real_pow(uu, -0.5)?
                            + f2.deriv(arg(uu, vv)?)? * 0.5 * real_pow(uu, -0.5)?)
                    },
                    move |uu, vv| Ok(-f3.deriv(arg(uu, vv)?)? * 0.5 * real_pow(vv, -0.5)?),
                ),
                Fn2::from_fns(
                    move |uu, vv| Ok(-2.0 * lam * real_pow(vv, 0.5)? + g1.eval(arg(uu, vv)?)?),
                    move |uu, vv| Ok(g2.deriv(arg(uu, vv)?)? * 0.5 * real_pow(uu, -0.5)?),
                    move |uu, vv| {
                        Ok(-lam * real_pow(vv, -0.5)?
                            - g3.deriv(arg(uu, vv)?)? * 0.5 * real_pow(vv, -0.5)?)
                    },
                ),
            )
            .with_positivity(true, true)
        }
        FamilyId::F4 => {
            let beta = params.omega_exponent();
            let (l1, l2, l3) = (params.lambda1, params.lambda2, params.lambda3);
            let (f1, f2, f3) = (params.f.clone(), params.f.clone(), params.f.clone());
            let (g1, g2, g3, g4) = (
                params.g.clone(),
                params.g.clone(),
                params.g.clone(),
                params.g.clone(),
            );
            let om = move |uu: f64, vv: f64| -> Result<f64> {
                omega4(real_pow(uu, k + 1.0)?, real_pow(vv, l + 1.0)?, l3, beta)
            };
            RDSystemOriginal::new(
                k,
                l,
                Fn2::from_fns(
                    move |uu, vv| Ok(pow_term(l1, uu, -k)? + f1.eval(om(uu, vv)?)?),
                    move |uu, vv| {
                        let w = om(uu, vv)?;
                        Ok(pow_term(-k * l1, uu, -k - 1.0)?
                            + f2.deriv(w)? * w * (k + 1.0) * real_pow(uu, k)?)
                    },
                    move |uu, vv| {
                        let w = om(uu, vv)?;
                        let denom = real_pow(vv, l + 1.0)? - l3;
                        Ok(-f3.deriv(w)? * w * beta * (l + 1.0) * real_pow(vv, l)? / denom)
                    },
                ),
                Fn2::from_fns(
                    move |uu, vv| {
                        let vp = real_pow(vv, l + 1.0)?;
                        Ok((vp - l3) * (g1.eval(om(uu, vv)?)? + pow_term(l2, vv, -l)?))
                    },
                    move |uu, vv| {
                        let vp = real_pow(vv, l + 1.0)?;
                        let w = om(uu, vv)?;
                        Ok((vp - l3) * g2.deriv(w)? * w * (k + 1.0) * real_pow(uu, k)?)
                    },
                    move |uu, vv| {
                        let vp = real_pow(vv, l + 1.0)?;
                        let w = om(uu, vv)?;
                        let vl = real_pow(vv, l)?;
                        Ok((l + 1.0) * vl * (g4.eval(w)? + pow_term(l2, vv, -l)?)
                            + (vp - l3)
                                * (-g3.deriv(w)? * w * beta * (l + 1.0) * vl / (vp - l3)
                                    + pow_term(-l * l2, vv, -l - 1.0)?))
                    },
                ),
            )
            .with_positivity(true, true)
        }
        FamilyId::F5 => {
            let beta = params.omega_exponent();
            let (l1, l2, l3, l4) = (
                params.lambda1,
                params.lambda2,
                params.lambda3,
                params.lambda4,
            );
            let (f1, f2, f3, f4) = (
                params.f.clone(),
                params.f.clone(),
                params.f.clone(),
                params.f.clone(),
            );
            let (g1, g2, g3, g4) = (
                params.g.clone(),
                params.g.clone(),
                params.g.clone(),
                params.g.clone(),
            );
            let om = move |uu: f64, vv: f64| -> Result<f64> {
                omega5(real_pow(uu, k + 1.0)?, real_pow(vv, l + 1.0)?, l1, l3, beta)
            };
            RDSystemOriginal::new(
                k,
                l,
                Fn2::from_fns(
                    move |uu, vv| {
                        let up = real_pow(uu, k + 1.0)?;
                        Ok((up - l1) * (f1.eval(om(uu, vv)?)? + pow_term(l2, uu, -k)?))
                    },
                    move |uu, vv| {
                        let up = real_pow(uu, k + 1.0)?;
                        let w = om(uu, vv)?;
                        let uk = real_pow(uu, k)?;
                        let domega_du = (k + 1.0) * uk * real_pow(real_pow(vv, l + 1.0)? - l3, -beta)?;
                        Ok((k + 1.0) * uk * (f4.eval(w)? + pow_term(l2, uu, -k)?)
                            + (up - l1)
                                * (f2.deriv(w)? * domega_du + pow_term(-k * l2, uu, -k - 1.0)?))
                    },
                    move |uu, vv| {
                        let up = real_pow(uu, k + 1.0)?;
                        let w = om(uu, vv)?;
                        let denom = real_pow(vv, l + 1.0)? - l3;
                        Ok((up - l1) * f3.deriv(w)?
                            * (-beta * w / denom * (l + 1.0) * real_pow(vv, l)?))
                    },
                ),
                Fn2::from_fns(
                    move |uu, vv| {
                        let vp = real_pow(vv, l + 1.0)?;
                        Ok((vp - l3) * (g1.eval(om(uu, vv)?)? + pow_term(l4, vv, -l)?))
                    },
                    move |uu, vv| {
                        let vp = real_pow(vv, l + 1.0)?;
                        let w = om(uu, vv)?;
                        let domega_du = (k + 1.0) * real_pow(uu, k)? * real_pow(vp - l3, -beta)?;
                        Ok((vp - l3) * g2.deriv(w)? * domega_du)
                    },
                    move |uu, vv| {
                        let vp = real_pow(vv, l + 1.0)?;
                        let w = om(uu, vv)?;
                        let vl = real_pow(vv, l)?;
                        Ok((l + 1.0) * vl * (g4.eval(w)? + pow_term(l4, vv, -l)?)
                            + (vp - l3)
                                * (-g3.deriv(w)? * w * beta * (l + 1.0) * vl / (vp - l3)
                                    + pow_term(-l * l4, vv, -l - 1.0)?))
                    },
                ),
            )
            .with_positivity(true, true)
        }
    };

    let operator = family_operator(&params);
    Ok(Family {
        params,
        original,
        operator,
    })
}

/// The family operator mapped through the power substitution into the
/// transformed variables (all five sit inside the structured coefficient
/// form).
fn family_operator(params: &FamilyParams) -> QOperator {
    let (k, l) = (params.k, params.l);
    match params.id {
        FamilyId::F1 => {
            let p = params.p.as_ref().expect("validated").clone();
            QOperator::new(
                Coef::zero(),
                Coef::zero(),
                Coef::of_x_profile(p as Arc<dyn Profile>),
            )
        }
        FamilyId::F2 => QOperator::new(
            Coef::zero(),
            Coef::constant(params.lambda1 * (k + 1.0)),
            Coef::constant(params.lambda2 * (l + 1.0)),
        ),
        FamilyId::F3 => {
            let p = params.p.as_ref().expect("validated").clone();
            let c1 = Coef::of_x_profile(p.clone() as Arc<dyn Profile>);
            let c2 = Coef::of_x_profile(p as Arc<dyn Profile>);
            QOperator::new(Coef::zero(), c1, c2)
        }
        FamilyId::F4 => QOperator::new(
            Coef::zero(),
            Coef::constant(params.lambda1 * (k + 1.0)),
            Coef::poly(vec![
                (params.lambda2 * (l + 1.0), [0, 0, 0, 1]),
                (-params.lambda2 * (l + 1.0) * params.lambda3, [0, 0, 0, 0]),
            ]),
        ),
        FamilyId::F5 => QOperator::new(
            Coef::zero(),
            Coef::poly(vec![
                (params.lambda2 * (k + 1.0), [0, 0, 1, 0]),
                (-params.lambda2 * (k + 1.0) * params.lambda1, [0, 0, 0, 0]),
            ]),
            Coef::poly(vec![
                (params.lambda4 * (l + 1.0), [0, 0, 0, 1]),
                (-params.lambda4 * (l + 1.0) * params.lambda3, [0, 0, 0, 0]),
            ]),
        ),
    }
}

/// Ansatz profiles (phi, psi) attached to a family.
#[derive(Clone)]
pub struct AnsatzProfile {
    pub params: FamilyParams,
    pub phi: Arc<dyn Profile>,
    pub psi: Arc<dyn Profile>,
}

/// Value and derivatives of W = base^expnt given the jet of the base.
fn power_jet(
    what: &'static str,
    t: f64,
    x: f64,
    b: f64,
    bt: f64,
    bx: f64,
    bxx: f64,
    e: f64,
) -> Result<(f64, f64, f64, f64)> {
    let err = |_| Error::NonPositiveBase { what, base: b, t, x };
    let w = real_pow(b, e).map_err(err)?;
    let s1 = real_pow(b, e - 1.0).map_err(err)?;
    let wt = e * s1 * bt;
    let wx = e * s1 * bx;
    let wxx = pow_term(e * (e - 1.0) * bx * bx, b, e - 2.0).map_err(err)? + e * s1 * bxx;
    Ok((w, wt, wx, wxx))
}

impl AnsatzProfile {
    pub fn new(params: FamilyParams, phi: Arc<dyn Profile>, psi: Arc<dyn Profile>) -> Self {
        AnsatzProfile { params, phi, psi }
    }

    /// Jet of the transformed fields (u, v) = (U^{k+1}, V^{l+1}): the ansatz
    /// bases themselves.
    pub fn transformed_jet(&self, t: f64, x: f64) -> Result<JetPoint> {
        let p = &self.params;
        let phi = (self.phi.eval(x), self.phi.d1(x), self.phi.d2(x));
        let psi = (self.psi.eval(x), self.psi.d1(x), self.psi.d2(x));
        // (value, d/dt, d/dx, d2/dx2) per component
        let (ub, vb): ([f64; 4], [f64; 4]) = match p.id {
            FamilyId::F1 => {
                let pf = p.p.as_ref().ok_or(Error::Restriction {
                    family: 1,
                    restriction: "p != 0",
                })?;
                let (pv, pd, pdd) = (pf.eval(x), pf.d1(x), pf.d2(x));
                (
                    [phi.0, 0.0, phi.1, phi.2],
                    [
                        pv * t + psi.0,
                        pv,
                        pd * t + psi.1,
                        pdd * t + psi.2,
                    ],
                )
            }
            FamilyId::F2 => (
                [
                    p.lambda1 * (p.k + 1.0) * t + phi.0,
                    p.lambda1 * (p.k + 1.0),
                    phi.1,
                    phi.2,
                ],
                [
                    p.lambda2 * (p.l + 1.0) * t + psi.0,
                    p.lambda2 * (p.l + 1.0),
                    psi.1,
                    psi.2,
                ],
            ),
            FamilyId::F3 => {
                let pf = p.p.as_ref().ok_or(Error::Restriction {
                    family: 3,
                    restriction: "p != 0",
                })?;
                let (pv, pd, pdd) = (pf.eval(x), pf.d1(x), pf.d2(x));
                (
                    [pv * t + phi.0, pv, pd * t + phi.1, pdd * t + phi.2],
                    [pv * t + psi.0, pv, pd * t + psi.1, pdd * t + psi.2],
                )
            }
            FamilyId::F4 => {
                let e = (p.lambda2 * (p.l + 1.0) * t + psi.0).exp();
                (
                    [
                        p.lambda1 * (p.k + 1.0) * t + phi.0,
                        p.lambda1 * (p.k + 1.0),
                        phi.1,
                        phi.2,
                    ],
                    [
                        e + p.lambda3,
                        p.lambda2 * (p.l + 1.0) * e,
                        psi.1 * e,
                        (psi.2 + psi.1 * psi.1) * e,
                    ],
                )
            }
            FamilyId::F5 => {
                let ek = (p.lambda2 * (p.k + 1.0) * t).exp();
                let el = (p.lambda4 * (p.l + 1.0) * t).exp();
                (
                    [
                        phi.0 * ek + p.lambda1,
                        p.lambda2 * (p.k + 1.0) * phi.0 * ek,
                        phi.1 * ek,
                        phi.2 * ek,
                    ],
                    [
                        psi.0 * el + p.lambda3,
                        p.lambda4 * (p.l + 1.0) * psi.0 * el,
                        psi.1 * el,
                        psi.2 * el,
                    ],
                )
            }
        };
        Ok(JetPoint {
            t,
            x,
            u: ub[0],
            v: vb[0],
            u_t: Some(ub[1]),
            v_t: Some(vb[1]),
            u_x: Some(ub[2]),
            v_x: Some(vb[2]),
            u_xx: Some(ub[3]),
            v_xx: Some(vb[3]),
        })
    }

    /// Jet of the original fields (U, V) with analytic derivatives; errors
    /// carry the offending (t, x) when a fractional-power base is not
    /// positive.
    pub fn eval(&self, t: f64, x: f64) -> Result<JetPoint> {
        let p = &self.params;
        let base = self.transformed_jet(t, x)?;
        let (u, ut, ux, uxx) = power_jet(
            "U",
            t,
            x,
            base.u,
            base.u_t.unwrap(),
            base.u_x.unwrap(),
            base.u_xx.unwrap(),
            1.0 / (p.k + 1.0),
        )?;
        let (v, vt, vx, vxx) = power_jet(
            "V",
            t,
            x,
            base.v,
            base.v_t.unwrap(),
            base.v_x.unwrap(),
            base.v_xx.unwrap(),
            1.0 / (p.l + 1.0),
        )?;
        Ok(JetPoint {
            t,
            x,
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

    /// Residuals of the family's reduced ODE system at x.
    pub fn reduced_residual(&self, x: f64) -> Result<(f64, f64)> {
        let p = &self.params;
        let (k, l) = (p.k, p.l);
        let phi = (self.phi.eval(x), self.phi.d1(x), self.phi.d2(x));
        let psi = (self.psi.eval(x), self.psi.d1(x), self.psi.d2(x));
        match p.id {
            FamilyId::F1 => {
                let pf = p.p.as_ref().ok_or(Error::Restriction {
                    family: 1,
                    restriction: "p != 0",
                })?;
                let pv = pf.eval(x);
                let r1 = phi.2 + (k + 1.0) * p.f.eval(phi.0)?;
                let r2 = psi.2 + 0.5 * p.g.eval(phi.0)? - (p.lambda + pv) * psi.0;
                Ok((r1, r2))
            }
            FamilyId::F2 => {
                let arg = phi.0 - p.alpha() * psi.0;
                Ok((
                    phi.2 + (k + 1.0) * p.f.eval(arg)?,
                    psi.2 + (l + 1.0) * p.g.eval(arg)?,
                ))
            }
            FamilyId::F3 => {
                let pf = p.p.as_ref().ok_or(Error::Restriction {
                    family: 3,
                    restriction: "p != 0",
                })?;
                let pv = pf.eval(x);
                let arg = phi.0 - psi.0;
                Ok((
                    phi.2 - (pv + p.lambda) * phi.0 + 0.5 * p.f.eval(arg)?,
                    psi.2 - (pv + p.lambda) * psi.0 + 0.5 * p.g.eval(arg)?,
                ))
            }
            FamilyId::F4 => {
                let w = (phi.0 - p.omega_exponent() * psi.0).exp();
                Ok((
                    phi.2 + (k + 1.0) * p.f.eval(w)?,
                    psi.2 + psi.1 * psi.1 + (l + 1.0) * p.g.eval(w)?,
                ))
            }
            FamilyId::F5 => {
                let w = phi.0 * real_pow(psi.0, -p.omega_exponent())?;
                Ok((
                    phi.2 + (k + 1.0) * phi.0 * p.f.eval(w)?,
                    psi.2 + (l + 1.0) * psi.0 * p.g.eval(w)?,
                ))
            }
        }
    }

    /// Componentwise factor linking the reduced residual to the transformed
    /// PDE residual at (t, x): transformed = factor * reduced.
    pub fn transformed_factor(&self, t: f64, x: f64) -> (f64, f64) {
        let p = &self.params;
        match p.id {
            FamilyId::F1 | FamilyId::F2 | FamilyId::F3 => (1.0, 1.0),
            FamilyId::F4 => (
                1.0,
                (p.lambda2 * (p.l + 1.0) * t + self.psi.eval(x)).exp(),
            ),
            FamilyId::F5 => (
                (p.lambda2 * (p.k + 1.0) * t).exp(),
                (p.lambda4 * (p.l + 1.0) * t).exp(),
            ),
        }
    }
}

/// Random admissible parameters and evaluation points for the verification
/// suites and the command-line checker.
pub mod sampling {
    use super::*;

    pub fn sample_params(id: FamilyId, rng: &mut impl Rng) -> Result<FamilyParams> {
        let mut k = rng.gen_range(0.3..2.0);
        let l = rng.gen_range(0.3..2.0);
        if rng.gen_bool(0.3) {
            k = rng.gen_range(-0.6..-0.2);
        }
        let f = Fn1::linear(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let g = Fn1::linear(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let nonzero = |rng: &mut dyn rand::RngCore, lo: f64, hi: f64| {
            let mag = lo + (hi - lo) * rand::Rng::gen::<f64>(&mut *rng);
            if rand::Rng::gen::<bool>(&mut *rng) {
                mag
            } else {
                -mag
            }
        };
        Ok(match id {
            FamilyId::F1 => {
                let lambda = rng.gen_range(0.3..1.2);
                let p = solve_sample_p(lambda, rng)?;
                FamilyParams::family1(k, lambda, Arc::new(p), f, g)
            }
            FamilyId::F2 => FamilyParams::family2(
                k,
                l,
                nonzero(rng, 0.3, 1.2),
                nonzero(rng, 0.3, 1.2),
                f,
                g,
            ),
            FamilyId::F3 => {
                let lambda = rng.gen_range(0.3..1.2);
                let p = solve_sample_p(lambda, rng)?;
                FamilyParams::family3(lambda, Arc::new(p), f, g)
            }
            FamilyId::F4 => FamilyParams::family4(
                k,
                l,
                nonzero(rng, 0.3, 1.0),
                nonzero(rng, 0.3, 1.0),
                rng.gen_range(0.1..0.8),
                f,
                g,
            ),
            FamilyId::F5 => FamilyParams::family5(
                k,
                l,
                rng.gen_range(0.1..0.8),
                nonzero(rng, 0.3, 1.0),
                rng.gen_range(0.1..0.8),
                nonzero(rng, 0.3, 1.0),
                f,
                g,
            ),
        })
    }

    fn solve_sample_p(lambda: f64, rng: &mut impl Rng) -> Result<PFunction> {
        // the interpolated second derivative carries the O(step^4) error that
        // bounds the determining residual of families one and three; the fine
        // step keeps it well under the 1e-9 verification tolerance
        crate::reduction::solve_p_ode(
            lambda,
            rng.gen_range(0.3..1.0),
            rng.gen_range(-0.4..0.4),
            (0.0, 1.0),
            2.5e-4,
        )
    }

    /// A random point inside the family's admissible (t, x, u, v) region.
    pub fn admissible_point(params: &FamilyParams, rng: &mut impl Rng) -> Point4 {
        let t = rng.gen_range(0.0..1.0);
        let x = match params.id {
            // keep x inside the p(x) sample span
            FamilyId::F1 | FamilyId::F3 => rng.gen_range(0.05..0.95),
            _ => rng.gen_range(-1.5..1.5),
        };
        let (u, v) = match params.id {
            FamilyId::F4 => (
                rng.gen_range(0.4..2.0),
                params.lambda3 + rng.gen_range(0.4..2.0),
            ),
            FamilyId::F5 => (
                params.lambda1 + rng.gen_range(0.4..2.0),
                params.lambda3 + rng.gen_range(0.4..2.0),
            ),
            _ => (rng.gen_range(0.4..2.0), rng.gen_range(0.4..2.0)),
        };
        Point4::new(t, x, u, v)
    }
}

/// Largest determining residual of the family over `n` random admissible
/// points.
pub fn verify_determining(family: &Family, rng: &mut impl Rng, n: usize) -> Result<f64> {
    let tsys = family.transformed()?;
    let mut worst = 0.0f64;
    for _ in 0..n {
        let pt = sampling::admissible_point(&family.params, rng);
        let rep = crate::detcheck::determining_residuals(&family.operator, &tsys, pt)?;
        worst = worst.max(rep.max_abs);
    }
    Ok(worst)
}

/// Largest full invariance residual of the family over `n` random admissible
/// points with random gradients.
pub fn verify_invariance(family: &Family, rng: &mut impl Rng, n: usize) -> Result<f64> {
    let tsys = family.transformed()?;
    let mut worst = 0.0f64;
    for _ in 0..n {
        let pt = sampling::admissible_point(&family.params, rng);
        let jet = JetPoint {
            u_x: Some(rng.gen_range(-1.5..1.5)),
            v_x: Some(rng.gen_range(-1.5..1.5)),
            ..JetPoint::new(pt.t, pt.x, pt.u, pt.v)
        };
        let (r1, r2) = crate::detcheck::invariance_residual(&family.operator, &tsys, &jet)?;
        worst = worst.max(r1.abs()).max(r2.abs());
    }
    Ok(worst)
}
