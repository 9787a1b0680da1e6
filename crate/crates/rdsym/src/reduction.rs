//! Linear specialization of the fifth symmetry family and its spectrum, plus
//! the nonlinear p(x) coefficient equation used by families 1 and 3.
//!
//! The fifth-family reduced ODE system becomes linear,
//!   phi_xx = alpha1 phi + beta1 psi,
//!   psi_xx = alpha2 phi + beta2 psi,
//! when f and g are the rational selectors. Eliminating psi (beta1 != 0)
//! leaves a fourth-order constant-coefficient ODE whose characteristic
//! quartic is s^4 - (alpha1+beta2) s^2 + (alpha1 beta2 - alpha2 beta1) = 0.
//! Only the branch with four distinct purely imaginary roots is assembled
//! into closed-form profiles; all other branches are classified and left to
//! the companion-matrix fallback.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::eval::{real_pow, Fn1, Fn2, HermiteCurve, Profile, TrigSum, TrigTerm};
use crate::families::{FamilyId, FamilyParams};
use crate::model::RDSystemOriginal;

/// Parameters of the linear reduction. The operator rates lambda2, lambda4
/// are derived from r and never stored independently:
/// lambda2 = -r/(k+1), lambda4 = -r/(l+1).
#[derive(Clone, Copy, Debug)]
pub struct LinearReductionParams {
    pub alpha1: f64,
    pub beta1: f64,
    pub alpha2: f64,
    pub beta2: f64,
    pub r: f64,
    pub k: f64,
    pub l: f64,
    pub lambda1: f64,
    pub lambda3: f64,
}

impl LinearReductionParams {
    pub fn lambda2(&self) -> f64 {
        -self.r / (self.k + 1.0)
    }

    pub fn lambda4(&self) -> f64 {
        -self.r / (self.l + 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.beta1 == 0.0 {
            return Err(Error::Beta1Zero);
        }
        for (name, value) in [("k", self.k), ("l", self.l)] {
            if (value + 1.0).abs() < 1e-12 {
                return Err(Error::BadExponent {
                    name,
                    value,
                    why: "the power substitution requires k != -1 and l != -1",
                });
            }
        }
        Ok(())
    }
}

/// Relative root-gap threshold below which the quartic counts as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-8;

/// Roots of the characteristic quartic with their classification.
#[derive(Clone, Debug)]
pub struct SpectralData {
    /// Root ordering in the purely imaginary case follows the closed form:
    /// [i s1, -i s1, i s3, -i s3] with |s1| <= |s3|.
    pub roots: [Complex64; 4],
    pub s1_mod: f64,
    pub s3_mod: f64,
    pub purely_imaginary: bool,
    pub degenerate: bool,
}

fn root_gap_degenerate(roots: &[Complex64; 4]) -> bool {
    let scale = roots.iter().map(|r| r.norm()).fold(0.0f64, f64::max);
    if scale < 1e-300 {
        return true;
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            if (roots[i] - roots[j]).norm() / scale < DEGENERACY_GAP {
                return true;
            }
        }
    }
    false
}

/// Closed-form quartic roots via the biquadratic substitution; valid in every
/// coefficient region. The + inner sign pair comes first.
pub fn closed_form_roots(alpha1: f64, beta1: f64, alpha2: f64, beta2: f64) -> [Complex64; 4] {
    let trace = alpha1 + beta2;
    let delta = (alpha1 - beta2).powi(2) + 4.0 * alpha2 * beta1;
    let sqrt_delta = Complex64::new(delta, 0.0).sqrt();
    let s2_plus = (Complex64::new(trace, 0.0) + sqrt_delta) / 2.0;
    let s2_minus = (Complex64::new(trace, 0.0) - sqrt_delta) / 2.0;
    let r1 = s2_plus.sqrt();
    let r3 = s2_minus.sqrt();
    [r1, -r1, r3, -r3]
}

/// The same roots from a 4x4 companion-matrix eigenvalue solve; the
/// independent oracle for the closed form. The Schur iteration can stall on
/// an exactly repeated spectrum, so it runs with a bounded iteration count
/// and the (out-of-scope) degenerate inputs fall back to the closed form.
pub fn companion_roots(alpha1: f64, beta1: f64, alpha2: f64, beta2: f64) -> [Complex64; 4] {
    let c2 = -(alpha1 + beta2);
    let c0 = alpha1 * beta2 - alpha2 * beta1;
    // companion of s^4 + c2 s^2 + c0
    let m = nalgebra::Matrix4::new(
        0.0, 0.0, 0.0, -c0, //
        1.0, 0.0, 0.0, 0.0, //
        0.0, 1.0, 0.0, -c2, //
        0.0, 0.0, 1.0, 0.0,
    );
    let schur = nalgebra::linalg::Schur::try_new(m, 1e-14, 10_000);
    let mut roots = match schur {
        Some(s) => {
            let ev = s.complex_eigenvalues();
            [
                Complex64::new(ev[0].re, ev[0].im),
                Complex64::new(ev[1].re, ev[1].im),
                Complex64::new(ev[2].re, ev[2].im),
                Complex64::new(ev[3].re, ev[3].im),
            ]
        }
        None => closed_form_roots(alpha1, beta1, alpha2, beta2),
    };
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    roots
}

/// Whether the quartic has four distinct purely imaginary roots:
/// (alpha1 - beta2)^2 > -4 alpha2 beta1 and
/// alpha1 + beta2 < -sqrt((alpha1 - beta2)^2 + 4 alpha2 beta1).
pub fn purely_imaginary_condition(alpha1: f64, beta1: f64, alpha2: f64, beta2: f64) -> bool {
    let delta = (alpha1 - beta2).powi(2) + 4.0 * alpha2 * beta1;
    delta > 0.0 && alpha1 + beta2 < -delta.sqrt()
}

/// Solve the characteristic quartic. Closed form when the purely imaginary
/// branch applies, companion-matrix eigenvalues otherwise.
pub fn quartic_spectrum(alpha1: f64, beta1: f64, alpha2: f64, beta2: f64) -> SpectralData {
    let closed = closed_form_roots(alpha1, beta1, alpha2, beta2);
    let degenerate = root_gap_degenerate(&closed);
    let purely_imaginary = purely_imaginary_condition(alpha1, beta1, alpha2, beta2);
    // a repeated spectrum is classified straight from the closed form: the
    // eigenvalue iteration is unreliable exactly there
    let roots = if purely_imaginary || degenerate {
        closed
    } else {
        companion_roots(alpha1, beta1, alpha2, beta2)
    };
    SpectralData {
        roots,
        s1_mod: closed[0].norm(),
        s3_mod: closed[2].norm(),
        purely_imaginary,
        degenerate,
    }
}

/// General solution of the linear profile system for a purely imaginary
/// spectrum: phi is a four-amplitude two-mode cosine/sine sum and psi is the
/// eliminated partner -(1/beta1)((alpha1+|s1|^2) mode1 + (alpha1+|s3|^2) mode2).
pub fn general_solution(
    spec: &SpectralData,
    alpha1: f64,
    beta1: f64,
    amps: [f64; 4],
) -> Result<(TrigSum, TrigSum)> {
    if !spec.purely_imaginary {
        return Err(Error::NotPurelyImaginary);
    }
    if spec.degenerate {
        return Err(Error::DegenerateSpectrum);
    }
    if beta1 == 0.0 {
        return Err(Error::Beta1Zero);
    }
    let (w1, w3) = (spec.s1_mod, spec.s3_mod);
    let phi = TrigSum::new(vec![
        TrigTerm {
            a_cos: amps[0],
            a_sin: amps[1],
            w: w1,
        },
        TrigTerm {
            a_cos: amps[2],
            a_sin: amps[3],
            w: w3,
        },
    ]);
    let c1 = -(alpha1 + w1 * w1) / beta1;
    let c3 = -(alpha1 + w3 * w3) / beta1;
    let psi = TrigSum::new(vec![
        TrigTerm {
            a_cos: c1 * amps[0],
            a_sin: c1 * amps[1],
            w: w1,
        },
        TrigTerm {
            a_cos: c3 * amps[2],
            a_sin: c3 * amps[3],
            w: w3,
        },
    ]);
    Ok((phi, psi))
}

/// Coefficients of one reaction term of the specialized system, collected on
/// the basis {W, U^{k+1}, V^{l+1}, 1, W^{-e}} with W the own field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearReactionCoeffs {
    /// multiplies the field itself
    pub linear: f64,
    /// multiplies U^{k+1}
    pub u_power: f64,
    /// multiplies V^{l+1}
    pub v_power: f64,
    pub constant: f64,
    /// multiplies U^{-k} (first component) or V^{-l} (second)
    pub inverse_power: f64,
}

/// The reaction coefficients of the specialized system, for coefficient-wise
/// identification against a printed right-hand side.
pub fn reaction_coefficients(
    p: &LinearReductionParams,
) -> (LinearReactionCoeffs, LinearReactionCoeffs) {
    let ak = 1.0 / (p.k + 1.0);
    let al = 1.0 / (p.l + 1.0);
    (
        LinearReactionCoeffs {
            linear: -p.r * ak,
            u_power: -p.alpha1 * ak,
            v_power: -p.beta1 * ak,
            constant: (p.alpha1 * p.lambda1 + p.beta1 * p.lambda3) * ak,
            inverse_power: p.lambda1 * p.r * ak,
        },
        LinearReactionCoeffs {
            linear: -p.r * al,
            u_power: -p.alpha2 * al,
            v_power: -p.beta2 * al,
            constant: (p.alpha2 * p.lambda1 + p.beta2 * p.lambda3) * al,
            inverse_power: p.lambda3 * p.r * al,
        },
    )
}

/// Build the specialized nonlinear system together with the fifth-family
/// parameter object whose f, g are the rational selectors
/// f(w) = -(alpha1 + beta1/w)/(k+1), g(w) = -(alpha2 w + beta2)/(l+1).
///
/// The orientation eliminates psi from the first profile equation, which
/// requires beta1 != 0; with beta1 = 0 one would start from the second
/// equation instead (swap the roles of the components before calling).
pub fn specialize_linear(
    p: &LinearReductionParams,
) -> Result<(RDSystemOriginal, FamilyParams)> {
    p.validate()?;
    let (cf, cg) = reaction_coefficients(p);
    let (k, l) = (p.k, p.l);

    let f = Fn2::from_fns(
        move |u, v| {
            Ok(cf.linear * u
                + cf.u_power * real_pow(u, k + 1.0)?
                + cf.v_power * real_pow(v, l + 1.0)?
                + cf.constant
                + crate::eval::pow_term(cf.inverse_power, u, -k)?)
        },
        move |u, _| {
            Ok(cf.linear
                + cf.u_power * (k + 1.0) * real_pow(u, k)?
                + crate::eval::pow_term(cf.inverse_power * -k, u, -k - 1.0)?)
        },
        move |_, v| Ok(cf.v_power * (l + 1.0) * real_pow(v, l)?),
    );
    let g = Fn2::from_fns(
        move |u, v| {
            Ok(cg.linear * v
                + cg.u_power * real_pow(u, k + 1.0)?
                + cg.v_power * real_pow(v, l + 1.0)?
                + cg.constant
                + crate::eval::pow_term(cg.inverse_power, v, -l)?)
        },
        move |u, _| Ok(cg.u_power * (k + 1.0) * real_pow(u, k)?),
        move |_, v| {
            Ok(cg.linear
                + cg.v_power * (l + 1.0) * real_pow(v, l)?
                + crate::eval::pow_term(cg.inverse_power * -l, v, -l - 1.0)?)
        },
    );
    // the inverse-power terms keep the fields away from zero whenever they
    // are present
    let needs_pos_u = p.lambda1 * p.r != 0.0 || !(k.fract().abs() < 1e-12 && k >= 0.0);
    let needs_pos_v = p.lambda3 * p.r != 0.0 || !(l.fract().abs() < 1e-12 && l >= 0.0);
    let sys = RDSystemOriginal::new(k, l, f, g).with_positivity(needs_pos_u, needs_pos_v);

    let (a1, b1) = (p.alpha1, p.beta1);
    let (a2, b2) = (p.alpha2, p.beta2);
    let fam_f = Fn1::from_fns(
        move |w| Ok(-(a1 + b1 / w) / (k + 1.0)),
        move |w| Ok(b1 / (w * w * (k + 1.0))),
    );
    let fam_g = Fn1::from_fns(
        move |w| Ok(-(a2 * w + b2) / (l + 1.0)),
        move |_| Ok(-a2 / (l + 1.0)),
    );
    let params = FamilyParams {
        id: FamilyId::F5,
        k,
        l,
        lambda: 0.0,
        lambda1: p.lambda1,
        lambda2: p.lambda2(),
        lambda3: p.lambda3,
        lambda4: p.lambda4(),
        f: fam_f,
        g: fam_g,
        p: None,
    };
    Ok((sys, params))
}

/// Numerical solution of p'' = p^2 + lambda p, sampled on a uniform grid
/// with the classical fourth-order one-step method. The second derivative is
/// reported through the equation itself, so it is exact on the samples;
/// between samples a quintic Hermite interpolant keeps the full order.
#[derive(Clone, Debug)]
pub struct PFunction {
    curve: HermiteCurve,
    lambda: f64,
}

/// Abort threshold: the equation has finite-time blow-up solutions.
pub const P_BLOWUP_LIMIT: f64 = 1e12;

const MAX_ODE_STEPS: usize = 10_000_000;

pub fn solve_p_ode(
    lambda: f64,
    p0: f64,
    dp0: f64,
    span: (f64, f64),
    step: f64,
) -> Result<PFunction> {
    if !(step > 0.0) || !span.0.is_finite() || !span.1.is_finite() || span.1 <= span.0 {
        return Err(Error::Numerics(
            "p-equation solve needs a finite forward span and a positive step".into(),
        ));
    }
    let n = ((span.1 - span.0) / step).ceil() as usize;
    if n > MAX_ODE_STEPS {
        return Err(Error::TooManySteps {
            steps: n,
            limit: MAX_ODE_STEPS,
        });
    }
    let h = (span.1 - span.0) / n as f64;
    let rhs = |p: f64, q: f64| (q, p * p + lambda * p);

    let mut p = p0;
    let mut q = dp0;
    let mut ps = Vec::with_capacity(n + 1);
    let mut qs = Vec::with_capacity(n + 1);
    ps.push(p);
    qs.push(q);
    for i in 0..n {
        let (k1p, k1q) = rhs(p, q);
        let (k2p, k2q) = rhs(p + 0.5 * h * k1p, q + 0.5 * h * k1q);
        let (k3p, k3q) = rhs(p + 0.5 * h * k2p, q + 0.5 * h * k2q);
        let (k4p, k4q) = rhs(p + h * k3p, q + h * k3q);
        p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
        if !p.is_finite() || p.abs() > P_BLOWUP_LIMIT {
            return Err(Error::BlowUp {
                x: span.0 + (i + 1) as f64 * h,
                limit: P_BLOWUP_LIMIT,
            });
        }
        ps.push(p);
        qs.push(q);
    }
    let dds = ps.iter().map(|&p| p * p + lambda * p).collect();
    Ok(PFunction {
        curve: HermiteCurve::new(span.0, h, ps, qs, dds)?,
        lambda,
    })
}

impl PFunction {
    /// A constant solution p = -lambda (the equation's fixed point).
    pub fn constant(lambda: f64, span: (f64, f64)) -> Result<PFunction> {
        let n = 8;
        let h = (span.1 - span.0) / n as f64;
        Ok(PFunction {
            curve: HermiteCurve::new(
                span.0,
                h,
                vec![-lambda; n + 1],
                vec![0.0; n + 1],
                vec![0.0; n + 1],
            )?,
            lambda,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn span(&self) -> (f64, f64) {
        (self.curve.x_min(), self.curve.x_max())
    }

    pub fn curve(&self) -> &HermiteCurve {
        &self.curve
    }

    /// Whether the sampled solution is identically zero.
    pub fn is_identically_zero(&self) -> bool {
        self.curve.samples().0.iter().all(|&p| p.abs() < 1e-12)
    }

    /// Independent defect estimate: a five-point fourth-order second
    /// difference of the samples against p^2 + lambda p, maximized over the
    /// interior. Roundoff limits it near eps/h^2, so it is meaningful for
    /// steps coarser than ~1e-4.
    pub fn defect_second_difference(&self) -> f64 {
        let (ps, _, _) = self.curve.samples();
        let h = self.curve.step();
        let mut worst = 0.0f64;
        for i in 2..ps.len().saturating_sub(2) {
            let d2 = (-ps[i - 2] + 16.0 * ps[i - 1] - 30.0 * ps[i] + 16.0 * ps[i + 1]
                - ps[i + 2])
                / (12.0 * h * h);
            worst = worst.max((d2 - (ps[i] * ps[i] + self.lambda * ps[i])).abs());
        }
        worst
    }
}

impl Profile for PFunction {
    fn eval(&self, x: f64) -> f64 {
        self.curve.eval(x)
    }
    fn d1(&self, x: f64) -> f64 {
        self.curve.d1(x)
    }
    /// Through the equation itself, p'' = p^2 + lambda p: exact on samples
    /// and free of the eps/h^2 cancellation a differentiated interpolant
    /// would carry. The independent second-derivative route lives in
    /// [`PFunction::defect_second_difference`].
    fn d2(&self, x: f64) -> f64 {
        let p = self.curve.eval(x);
        p * p + self.lambda * p
    }
}
