//! Closed-form periodic solutions of the specialized system, their zero-flux
//! admissibility, and the countable sets of admissible interval lengths.
//!
//! Three cases: a single mode at the smaller frequency, a single mode at the
//! larger one, and a two-mode combination whose coupling constant alpha2 is
//! pinned by the interval. Each solution is valid while every fractional
//! power base stays strictly positive: forever when the decay rate r is
//! positive, up to t_max = ln(lambda/amplitude)/(-r) when r is negative.

use crate::error::{Error, Result};
use crate::eval::{real_pow, Profile, TrigSum, TrigTerm};
use crate::model::{JetPoint, RDSystemOriginal};
use crate::reduction::{
    quartic_spectrum, specialize_linear, LinearReductionParams, SpectralData,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolutionCase {
    I,
    II,
    III,
}

impl SolutionCase {
    pub fn label(self) -> &'static str {
        match self {
            SolutionCase::I => "i",
            SolutionCase::II => "ii",
            SolutionCase::III => "iii",
        }
    }

    pub fn parse(s: &str) -> Option<SolutionCase> {
        match s {
            "i" | "I" | "1" => Some(SolutionCase::I),
            "ii" | "II" | "2" => Some(SolutionCase::II),
            "iii" | "III" | "3" => Some(SolutionCase::III),
            _ => None,
        }
    }
}

/// One admissible zero-flux interval length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntervalLength {
    pub a: f64,
    pub j1: u32,
    /// present only for the two-mode case
    pub j2: Option<u32>,
}

/// The coupling constant the two-mode case forces:
/// alpha2 = (alpha1 j2^2 - beta2 j1^2)(beta2 j2^2 - alpha1 j1^2)
///          / ((j1^2 + j2^2)^2 beta1).
pub fn alpha2_constraint(alpha1: f64, beta2: f64, beta1: f64, j1: u32, j2: u32) -> Result<f64> {
    if beta1 == 0.0 {
        return Err(Error::Beta1Zero);
    }
    let (j1s, j2s) = ((j1 * j1) as f64, (j2 * j2) as f64);
    Ok((alpha1 * j2s - beta2 * j1s) * (beta2 * j2s - alpha1 * j1s)
        / ((j1s + j2s) * (j1s + j2s) * beta1))
}

/// Steady state the decaying solutions approach:
/// (lambda1^{1/(k+1)}, lambda3^{1/(l+1)}).
pub fn steady_state(lambda1: f64, lambda3: f64, k: f64, l: f64) -> Result<(f64, f64)> {
    Ok((
        real_pow(lambda1, 1.0 / (k + 1.0))?,
        real_pow(lambda3, 1.0 / (l + 1.0))?,
    ))
}

/// First `count` admissible interval lengths of the requested countable set,
/// ascending. The two-mode set is enumerated over pairs by increasing
/// j1^2 + j2^2, ties by j1; equal lengths from mirrored pairs are kept.
pub fn admissible_intervals(
    case: SolutionCase,
    spec: &SpectralData,
    alpha1_plus_beta2: f64,
    count: usize,
) -> Result<Vec<IntervalLength>> {
    let pi = std::f64::consts::PI;
    match case {
        SolutionCase::I | SolutionCase::II => {
            if !spec.purely_imaginary {
                return Err(Error::NotPurelyImaginary);
            }
            let w = match case {
                SolutionCase::I => spec.s1_mod,
                _ => spec.s3_mod,
            };
            Ok((1..=count as u32)
                .map(|j| IntervalLength {
                    a: pi * j as f64 / w,
                    j1: j,
                    j2: None,
                })
                .collect())
        }
        SolutionCase::III => {
            if alpha1_plus_beta2 >= 0.0 {
                return Err(Error::Domain(
                    "two-mode intervals need alpha1 + beta2 < 0".into(),
                ));
            }
            let scale = pi / (-alpha1_plus_beta2).sqrt();
            let bound = count as u32 + 2;
            let mut pairs: Vec<(u32, u32)> = (1..=bound)
                .flat_map(|j1| (1..=bound).map(move |j2| (j1, j2)))
                .collect();
            pairs.sort_by_key(|&(j1, j2)| (j1 * j1 + j2 * j2, j1));
            Ok(pairs
                .into_iter()
                .take(count)
                .map(|(j1, j2)| IntervalLength {
                    a: scale * ((j1 * j1 + j2 * j2) as f64).sqrt(),
                    j1,
                    j2: Some(j2),
                })
                .collect())
        }
    }
}

/// A closed-form solution case with evaluators for both fields and all first
/// and second derivatives.
#[derive(Clone, Debug)]
pub struct ExactSolution {
    pub case: SolutionCase,
    pub k: f64,
    pub l: f64,
    pub r: f64,
    pub lambda1: f64,
    pub lambda3: f64,
    pub alpha1: f64,
    pub beta1: f64,
    pub alpha2: f64,
    pub beta2: f64,
    /// frequency labels as the solution case uses them; for the two-mode
    /// case s1 is the j2 mode of the pinned spectrum
    pub s1_mod: f64,
    pub s3_mod: f64,
    pub j1: u32,
    pub j2: Option<u32>,
    pub x_lo: f64,
    pub x_hi: f64,
    /// amplitude bound of the u-base profile (exact for single-mode cases,
    /// an envelope for the two-mode case)
    pub amp_u: f64,
    pub amp_v: f64,
    /// two-mode case with alpha2 = 0 (coupling degenerates to one mode)
    pub coupling_degenerate: bool,
    pub(crate) phi: TrigSum,
    pub(crate) psi: TrigSum,
    shift: f64,
}

/// Location of the profile minimum used in positivity diagnostics: the first
/// extremum of the dominant cosine mode with the right sign.
fn min_location(amp: f64, w: f64, x_lo: f64, x_hi: f64, shift: f64) -> f64 {
    if w == 0.0 {
        return x_lo;
    }
    let pi = std::f64::consts::PI;
    // cos extrema at w (x + shift) = n pi; odd n for positive amplitude
    let mut n = if amp > 0.0 { 1.0 } else { 0.0 };
    loop {
        let x = n * pi / w - shift;
        if x >= x_lo - 1e-12 {
            return x.min(x_hi);
        }
        n += 2.0;
    }
}

impl ExactSolution {
    fn assemble(
        case: SolutionCase,
        lin: &LinearReductionParams,
        alpha2: f64,
        modes: Vec<(f64, f64)>, // (amplitude, frequency) cosine modes of phi
        a: f64,
        j1: u32,
        j2: Option<u32>,
        labels: (f64, f64),
    ) -> Result<ExactSolution> {
        let phi = TrigSum::new(
            modes
                .iter()
                .map(|&(amp, w)| TrigTerm {
                    a_cos: amp,
                    a_sin: 0.0,
                    w,
                })
                .collect(),
        );
        let psi = TrigSum::new(
            modes
                .iter()
                .map(|&(amp, w)| TrigTerm {
                    a_cos: -amp * (lin.alpha1 + w * w) / lin.beta1,
                    a_sin: 0.0,
                    w,
                })
                .collect(),
        );
        let amp_u = phi.amplitude_bound();
        let amp_v = psi.amplitude_bound();
        let sol = ExactSolution {
            case,
            k: lin.k,
            l: lin.l,
            r: lin.r,
            lambda1: lin.lambda1,
            lambda3: lin.lambda3,
            alpha1: lin.alpha1,
            beta1: lin.beta1,
            alpha2,
            beta2: lin.beta2,
            s1_mod: labels.0,
            s3_mod: labels.1,
            j1,
            j2,
            x_lo: 0.0,
            x_hi: a,
            amp_u,
            amp_v,
            coupling_degenerate: alpha2 == 0.0,
            phi,
            psi,
            shift: 0.0,
        };
        // strict positivity at the start of the window
        if sol.lambda1 <= amp_u {
            let (amp, w) = modes
                .iter()
                .copied()
                .max_by(|x, y| x.0.abs().total_cmp(&y.0.abs()))
                .unwrap_or((0.0, 0.0));
            return Err(Error::NonPositiveBase {
                what: "U",
                base: sol.lambda1 - amp_u,
                t: 0.0,
                x: min_location(amp, w, sol.x_lo, sol.x_hi, 0.0),
            });
        }
        if sol.lambda3 <= amp_v {
            let worst = sol
                .psi
                .terms
                .iter()
                .max_by(|x, y| x.a_cos.abs().total_cmp(&y.a_cos.abs()))
                .map(|t| (t.a_cos, t.w))
                .unwrap_or((0.0, 0.0));
            return Err(Error::NonPositiveBase {
                what: "V",
                base: sol.lambda3 - amp_v,
                t: 0.0,
                x: min_location(worst.0, worst.1, sol.x_lo, sol.x_hi, 0.0),
            });
        }
        Ok(sol)
    }

    pub fn a(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    /// Validity bound of the U component: None means unbounded.
    pub fn t_max_u(&self) -> Option<f64> {
        bound_for(self.r, self.lambda1, self.amp_u)
    }

    pub fn t_max_v(&self) -> Option<f64> {
        bound_for(self.r, self.lambda3, self.amp_v)
    }

    /// Overall validity window [0, t_max); None means unbounded.
    pub fn t_max(&self) -> Option<f64> {
        match (self.t_max_u(), self.t_max_v()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (Some(a), None) | (None, Some(a)) => Some(a),
            (None, None) => None,
        }
    }

    /// The steady state the r > 0 solutions decay to.
    pub fn steady_state(&self) -> Result<(f64, f64)> {
        steady_state(self.lambda1, self.lambda3, self.k, self.l)
    }

    /// The specialized system this solution solves.
    pub fn system(&self) -> Result<RDSystemOriginal> {
        let lin = LinearReductionParams {
            alpha1: self.alpha1,
            beta1: self.beta1,
            alpha2: self.alpha2,
            beta2: self.beta2,
            r: self.r,
            k: self.k,
            l: self.l,
            lambda1: self.lambda1,
            lambda3: self.lambda3,
        };
        Ok(specialize_linear(&lin)?.0)
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if t < 0.0 {
            return Err(Error::OutsideValidity { t, t_max: 0.0 });
        }
        if let Some(tm) = self.t_max() {
            if t > tm {
                return Err(Error::OutsideValidity { t, t_max: tm });
            }
        }
        Ok(())
    }

    /// Full jet of (U, V) at (t, x); analytic derivatives.
    pub fn evaluate(&self, t: f64, x: f64) -> Result<JetPoint> {
        self.check_time(t)?;
        let s = x + self.shift;
        let decay = (-self.r * t).exp();
        let jet_of = |prof: &TrigSum,
                      lambda: f64,
                      e: f64,
                      what: &'static str|
         -> Result<(f64, f64, f64, f64)> {
            let b = prof.eval(s) * decay + lambda;
            let bt = -self.r * prof.eval(s) * decay;
            let bx = prof.d1(s) * decay;
            let bxx = prof.d2(s) * decay;
            let err = |_| Error::NonPositiveBase { what, base: b, t, x };
            let w = real_pow(b, e).map_err(err)?;
            let s1 = real_pow(b, e - 1.0).map_err(err)?;
            let s2 = real_pow(b, e - 2.0).map_err(err)?;
            Ok((
                w,
                e * s1 * bt,
                e * s1 * bx,
                e * (e - 1.0) * s2 * bx * bx + e * s1 * bxx,
            ))
        };
        let (u, ut, ux, uxx) = jet_of(&self.phi, self.lambda1, 1.0 / (self.k + 1.0), "U")?;
        let (v, vt, vx, vxx) = jet_of(&self.psi, self.lambda3, 1.0 / (self.l + 1.0), "V")?;
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

    /// Boundary fluxes (U_x, V_x) at both interval endpoints.
    pub fn neumann_residual(&self, t: f64) -> Result<[f64; 4]> {
        let lo = self.evaluate(t, self.x_lo)?;
        let hi = self.evaluate(t, self.x_hi)?;
        Ok([
            lo.u_x.unwrap(),
            lo.v_x.unwrap(),
            hi.u_x.unwrap(),
            hi.v_x.unwrap(),
        ])
    }

    /// Spatial translation x -> x - x0: the same solution on
    /// [x_lo - x0, x_hi - x0].
    pub fn translate(&self, x0: f64) -> ExactSolution {
        let mut out = self.clone();
        out.shift += x0;
        out.x_lo -= x0;
        out.x_hi -= x0;
        out
    }

    /// Spatial period of the slowest mode.
    pub fn period(&self) -> f64 {
        let w = self
            .phi
            .terms
            .iter()
            .map(|t| t.w)
            .fold(f64::INFINITY, f64::min);
        2.0 * std::f64::consts::PI / w
    }
}

fn bound_for(r: f64, lambda: f64, amp: f64) -> Option<f64> {
    if amp == 0.0 || r >= 0.0 {
        None
    } else {
        // amplitude e^{-r t} reaches lambda at t = ln(lambda/amp)/(-r)
        Some((lambda / amp).ln() / (-r))
    }
}

/// Single mode at the smaller frequency on [0, pi j1 / |s1|].
pub fn build_case_i(lin: &LinearReductionParams, a1: f64, j1: u32) -> Result<ExactSolution> {
    lin.validate()?;
    let spec = quartic_spectrum(lin.alpha1, lin.beta1, lin.alpha2, lin.beta2);
    if !spec.purely_imaginary {
        return Err(Error::NotPurelyImaginary);
    }
    if spec.degenerate {
        return Err(Error::DegenerateSpectrum);
    }
    if j1 == 0 {
        return Err(Error::Domain("mode index j1 must be positive".into()));
    }
    let w = spec.s1_mod;
    ExactSolution::assemble(
        SolutionCase::I,
        lin,
        lin.alpha2,
        vec![(a1, w)],
        std::f64::consts::PI * j1 as f64 / w,
        j1,
        None,
        (spec.s1_mod, spec.s3_mod),
    )
}

/// Single mode at the larger frequency on [0, pi j1 / |s3|].
pub fn build_case_ii(lin: &LinearReductionParams, a3: f64, j1: u32) -> Result<ExactSolution> {
    lin.validate()?;
    let spec = quartic_spectrum(lin.alpha1, lin.beta1, lin.alpha2, lin.beta2);
    if !spec.purely_imaginary {
        return Err(Error::NotPurelyImaginary);
    }
    if spec.degenerate {
        return Err(Error::DegenerateSpectrum);
    }
    if j1 == 0 {
        return Err(Error::Domain("mode index j1 must be positive".into()));
    }
    let w = spec.s3_mod;
    ExactSolution::assemble(
        SolutionCase::II,
        lin,
        lin.alpha2,
        vec![(a3, w)],
        std::f64::consts::PI * j1 as f64 / w,
        j1,
        None,
        (spec.s1_mod, spec.s3_mod),
    )
}

/// Parameters of the two-mode case: alpha2 is derived, not supplied.
#[derive(Clone, Copy, Debug)]
pub struct CaseIiiParams {
    pub alpha1: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub r: f64,
    pub k: f64,
    pub l: f64,
    pub lambda1: f64,
    pub lambda3: f64,
    pub a1: f64,
    pub a3: f64,
    pub j1: u32,
    pub j2: u32,
}

/// Two cosine modes on [0, pi sqrt(j1^2+j2^2) / sqrt(-(alpha1+beta2))]; the
/// coupling alpha2 is pinned by the interval, which also fixes the mode
/// frequencies to s1 = j2 sqrt(-(alpha1+beta2))/sqrt(j1^2+j2^2) and
/// s3 = (j1/j2) s1.
pub fn build_case_iii(p: &CaseIiiParams) -> Result<ExactSolution> {
    if p.j1 == 0 || p.j2 == 0 {
        return Err(Error::Domain("mode indices must be positive".into()));
    }
    let trace = p.alpha1 + p.beta2;
    if trace >= 0.0 {
        return Err(Error::Domain(
            "the two-mode case needs alpha1 + beta2 < 0".into(),
        ));
    }
    let alpha2 = alpha2_constraint(p.alpha1, p.beta2, p.beta1, p.j1, p.j2)?;
    let lin = LinearReductionParams {
        alpha1: p.alpha1,
        beta1: p.beta1,
        alpha2,
        beta2: p.beta2,
        r: p.r,
        k: p.k,
        l: p.l,
        lambda1: p.lambda1,
        lambda3: p.lambda3,
    };
    lin.validate()?;
    let jsum = (p.j1 * p.j1 + p.j2 * p.j2) as f64;
    let w1 = p.j2 as f64 * (-trace).sqrt() / jsum.sqrt();
    let w3 = p.j1 as f64 / p.j2 as f64 * w1;
    let a = std::f64::consts::PI * jsum.sqrt() / (-trace).sqrt();
    ExactSolution::assemble(
        SolutionCase::III,
        &lin,
        alpha2,
        vec![(p.a1, w1), (p.a3, w3)],
        a,
        p.j1,
        Some(p.j2),
        (w1, w3),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::original_residual;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn fig1() -> LinearReductionParams {
        LinearReductionParams {
            alpha1: -2.0,
            beta1: -1.0,
            alpha2: -2.0,
            beta2: -2.0,
            r: 2.0,
            k: 1.0,
            l: 1.0,
            lambda1: 1.0,
            lambda3: 2.0,
        }
    }

    fn fig2() -> LinearReductionParams {
        LinearReductionParams { r: -2.0, ..fig1() }
    }

    #[test]
    fn reference_point_values() {
        let sol = build_case_i(&fig1(), 0.95, 1).unwrap();
        let jet = sol.evaluate(0.0, 0.0).unwrap();
        assert!((jet.u - 1.95f64.sqrt()).abs() < 1e-14, "U(0,0) = {}", jet.u);
        // psi(0) = -A1 (alpha1 + s1^2)/beta1 = -0.95 sqrt(2); V base = 2 - 0.95 sqrt(2)
        let expect_v = (2.0 - 0.95 * 2f64.sqrt()).sqrt();
        assert!(
            (jet.v - expect_v).abs() < 1e-14,
            "V(0,0) = {} vs {expect_v}",
            jet.v
        );
        // and the full jet satisfies the system it claims to solve
        let sys = sol.system().unwrap();
        let (r1, r2) = original_residual(&sys, &jet).unwrap();
        assert!(r1.abs() < 1e-12 && r2.abs() < 1e-12, "residual ({r1}, {r2})");
    }

    #[test]
    fn zero_amplitude_is_steady_state() {
        let sol = build_case_i(&fig1(), 0.0, 1).unwrap();
        let (us, vs) = sol.steady_state().unwrap();
        assert_eq!((us, vs), (1.0, 2f64.sqrt()));
        for i in 0..5 {
            let jet = sol.evaluate(0.3 * i as f64, 0.7).unwrap();
            assert_eq!(jet.u, us);
            assert_eq!(jet.v, vs);
        }
        assert_eq!(sol.t_max(), None);
    }

    #[test]
    fn growth_validity_window() {
        // r = -2, A1 = 0.1: U positivity breaks at t = ln(10)/2
        let sol = build_case_i(&fig2(), 0.1, 1).unwrap();
        let tmax_u = sol.t_max_u().unwrap();
        assert!(
            (tmax_u - 10f64.ln() / 2.0).abs() < 1e-12,
            "t_max_u = {tmax_u}"
        );
        // V window is longer, so U decides
        assert!((sol.t_max().unwrap() - tmax_u).abs() < 1e-12);
        assert!(sol.t_max_v().unwrap() > tmax_u);
        // beyond the window: rejected
        assert!(matches!(
            sol.evaluate(tmax_u + 0.01, 0.0),
            Err(Error::OutsideValidity { .. })
        ));
    }

    #[test]
    fn validity_window_matches_positivity_bisection() {
        // bisection on min_x (base positivity) as an independent oracle
        for (amps, lin) in [(0.1, fig2()), (0.35, fig2())] {
            let sol = build_case_i(&lin, amps, 2).unwrap();
            let t_formula = sol.t_max().unwrap();
            let min_base = |t: f64| -> f64 {
                let decay = (-lin.r * t).exp();
                let mut m = f64::INFINITY;
                for i in 0..=4000 {
                    let x = sol.x_lo + sol.a() * i as f64 / 4000.0;
                    let b1 = sol.phi.eval(x) * decay + lin.lambda1;
                    let b2 = sol.psi.eval(x) * decay + lin.lambda3;
                    m = m.min(b1).min(b2);
                }
                m
            };
            let (mut lo, mut hi) = (0.0f64, 10.0f64);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if min_base(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            assert!(
                (t_formula - lo).abs() < 1e-8,
                "formula {t_formula} vs bisection {lo}"
            );
        }
    }

    #[test]
    fn rejects_amplitude_overflow_with_location() {
        let err = build_case_i(&fig1(), 1.2, 1).unwrap_err();
        match err {
            Error::NonPositiveBase { what, t, x, .. } => {
                assert_eq!(what, "U");
                assert_eq!(t, 0.0);
                // A1 > 0: the first minimum of cos sits at x = pi / s1
                let expect = std::f64::consts::PI / (2.0 - 2f64.sqrt()).sqrt();
                assert!((x - expect).abs() < 1e-12, "x = {x} vs {expect}");
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn neumann_zero_at_admissible_lengths() {
        for j in 1..=3 {
            let sol = build_case_i(&fig1(), 0.95, j).unwrap();
            let fl = sol.neumann_residual(0.4).unwrap();
            for f in fl {
                assert!(f.abs() < 1e-12, "boundary flux {f}");
            }
        }
    }

    #[test]
    fn stretched_interval_leaks_flux() {
        let sol = build_case_i(&fig1(), 0.95, 1).unwrap();
        let stretched = ExactSolution {
            x_hi: sol.x_hi * 1.1,
            ..sol
        };
        let fl = stretched.neumann_residual(0.0).unwrap();
        assert!(fl[2].abs() > 1e-3, "flux at stretched endpoint: {}", fl[2]);
    }

    #[test]
    fn sine_contamination_leaks_flux_at_origin() {
        // adding a sine term makes phi_x(0) = A2 |s1| != 0
        let mut sol = build_case_i(&fig1(), 0.5, 1).unwrap();
        let w = sol.s1_mod;
        sol.phi.terms.push(TrigTerm {
            a_cos: 0.0,
            a_sin: 0.2,
            w,
        });
        let fl = sol.neumann_residual(0.0).unwrap();
        // U_x(0) = phi_x(0)/( (k+1) U^k ) with phi_x(0) = 0.2 w
        assert!(
            fl[0].abs() > 1e-2,
            "contaminated flux should be visible: {}",
            fl[0]
        );
    }

    #[test]
    fn interval_sets_reference_values() {
        // frozen from pi j / sqrt(2 -+ sqrt(2)) evaluated independently
        let spec = quartic_spectrum(-2.0, -1.0, -2.0, -2.0);
        let one = admissible_intervals(SolutionCase::I, &spec, -4.0, 3).unwrap();
        let expect = [4.104688611908124, 8.209377223816247, 12.31406583572437];
        for (iv, e) in one.iter().zip(expect) {
            assert!((iv.a - e).abs() < 1e-12, "case i: {} vs {e}", iv.a);
        }
        let two = admissible_intervals(SolutionCase::II, &spec, -4.0, 1).unwrap();
        assert!(
            (two[0].a - 1.7002176923707384).abs() < 1e-12,
            "case ii: {}",
            two[0].a
        );
        let three = admissible_intervals(SolutionCase::III, &spec, -4.0, 1).unwrap();
        assert!(
            (three[0].a - std::f64::consts::PI * 2f64.sqrt() / 2.0).abs() < 1e-12,
            "case iii first length {}",
            three[0].a
        );
        assert_eq!((three[0].j1, three[0].j2), (1, Some(1)));
    }

    #[test]
    fn interval_enumeration_order() {
        let spec = quartic_spectrum(-2.0, -1.0, -2.0, -2.0);
        let list = admissible_intervals(SolutionCase::III, &spec, -4.0, 6).unwrap();
        let sums: Vec<u32> = list
            .iter()
            .map(|iv| iv.j1 * iv.j1 + iv.j2.unwrap() * iv.j2.unwrap())
            .collect();
        let mut sorted = sums.clone();
        sorted.sort_unstable();
        assert_eq!(sums, sorted, "enumeration by increasing j1^2 + j2^2");
        assert_eq!((list[1].j1, list[1].j2), (1, Some(2)));
        assert_eq!((list[2].j1, list[2].j2), (2, Some(1)));
        assert!((list[1].a - list[2].a).abs() < 1e-15);
    }

    #[test]
    fn alpha2_constraint_values() {
        // equal couplings and j1 = j2 collapse both factors
        assert_eq!(alpha2_constraint(-1.7, -1.7, -2.0, 3, 3).unwrap(), 0.0);
        let a2 = alpha2_constraint(-2.0, -2.0, -1.0, 1, 2).unwrap();
        assert!((a2 + 1.44).abs() < 1e-14, "alpha2 = {a2}");
        assert!(matches!(
            alpha2_constraint(-2.0, -2.0, 0.0, 1, 2),
            Err(Error::Beta1Zero)
        ));
    }

    #[test]
    fn case_iii_frequencies_match_pinned_spectrum() {
        let p = CaseIiiParams {
            alpha1: -2.0,
            beta1: -1.0,
            beta2: -2.0,
            r: 2.0,
            k: 1.0,
            l: 1.0,
            lambda1: 1.0,
            lambda3: 2.0,
            a1: 0.2,
            a3: 0.2,
            j1: 1,
            j2: 2,
        };
        let sol = build_case_iii(&p).unwrap();
        assert!((sol.alpha2 + 1.44).abs() < 1e-14);
        let w1 = 4.0 / 5f64.sqrt();
        let w3 = 2.0 / 5f64.sqrt();
        assert!((sol.s1_mod - w1).abs() < 1e-14, "s1 = {}", sol.s1_mod);
        assert!((sol.s3_mod - w3).abs() < 1e-14, "s3 = {}", sol.s3_mod);
        // the pinned spectrum contains the same two moduli (its own labels
        // order them the other way around)
        let spec = quartic_spectrum(p.alpha1, p.beta1, sol.alpha2, p.beta2);
        assert!(spec.purely_imaginary);
        let mut got = [spec.s1_mod, spec.s3_mod];
        got.sort_by(f64::total_cmp);
        assert!((got[0] - w3).abs() < 1e-12 && (got[1] - w1).abs() < 1e-12);
    }

    #[test]
    fn case_solutions_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(211);
        let sols = [
            build_case_i(&fig1(), 0.95, 1).unwrap(),
            build_case_ii(&fig1(), 0.6, 1).unwrap(),
            build_case_iii(&CaseIiiParams {
                alpha1: -2.0,
                beta1: -1.0,
                beta2: -2.0,
                r: 2.0,
                k: 1.0,
                l: 1.0,
                lambda1: 1.0,
                lambda3: 2.0,
                a1: 0.2,
                a3: 0.2,
                j1: 1,
                j2: 2,
            })
            .unwrap(),
        ];
        for sol in &sols {
            let sys = sol.system().unwrap();
            for _ in 0..200 {
                let t = rng.gen_range(0.0..2.0);
                let x = rng.gen_range(sol.x_lo..sol.x_hi);
                let jet = sol.evaluate(t, x).unwrap();
                let (r1, r2) = original_residual(&sys, &jet).unwrap();
                assert!(
                    r1.abs() < 1e-9 && r2.abs() < 1e-9,
                    "case {:?} residual ({r1}, {r2}) at ({t}, {x})",
                    sol.case
                );
            }
        }
    }

    #[test]
    fn spatial_periodicity() {
        let sol = build_case_i(&fig1(), 0.95, 3).unwrap();
        let period = sol.period();
        assert!((period - 2.0 * std::f64::consts::PI / sol.s1_mod).abs() < 1e-14);
        for i in 0..10 {
            let x = 0.09 * i as f64;
            let a = sol.evaluate(0.3, x).unwrap();
            let b = sol.evaluate(0.3, x + period).unwrap();
            assert!((a.u - b.u).abs() < 1e-12 && (a.v - b.v).abs() < 1e-12);
        }
    }

    #[test]
    fn decay_envelope() {
        let sol = build_case_i(&fig1(), 0.95, 1).unwrap();
        let (us, _) = sol.steady_state().unwrap();
        let mut prev = f64::INFINITY;
        for step in 0..=10 {
            let t = 0.5 * step as f64;
            let mut sup = 0.0f64;
            for i in 0..=400 {
                let x = sol.x_lo + sol.a() * i as f64 / 400.0;
                sup = sup.max((sol.evaluate(t, x).unwrap().u - us).abs());
            }
            // two-sided amplitude envelope: the root deviates further on the
            // lower side of the base
            let amp_t = sol.amp_u * (-sol.r * t).exp();
            let envelope = ((sol.lambda1 + amp_t).sqrt() - sol.lambda1.sqrt())
                .max(sol.lambda1.sqrt() - (sol.lambda1 - amp_t).sqrt());
            assert!(sup <= envelope + 1e-12, "sup {sup} envelope {envelope}");
            assert!(sup <= prev + 1e-12, "sup must not increase");
            prev = sup;
        }
        // at t = 5 the state is numerically steady
        assert!(prev < 1e-4, "sup at t = 5: {prev}");
    }

    #[test]
    fn translation_preserves_residuals() {
        let sol = build_case_i(&fig1(), 0.95, 1).unwrap();
        let same = sol.translate(0.0);
        assert_eq!(same.x_lo, sol.x_lo);
        let shifted = sol.translate(sol.a());
        assert!((shifted.x_lo + sol.a()).abs() < 1e-15);
        assert!(shifted.x_hi.abs() < 1e-15);
        // zero flux survives the translation (cosine parity)
        for f in shifted.neumann_residual(0.2).unwrap() {
            assert!(f.abs() < 1e-12);
        }
        let sys = sol.system().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(223);
        for _ in 0..20 {
            let t = rng.gen_range(0.0..1.0);
            let x = rng.gen_range(shifted.x_lo..shifted.x_hi);
            let jet = shifted.evaluate(t, x).unwrap();
            let (r1, r2) = original_residual(&sys, &jet).unwrap();
            assert!(r1.abs() < 1e-10 && r2.abs() < 1e-10);
            // matches the untranslated solution at the shifted argument
            let orig = sol.evaluate(t, x + sol.a()).unwrap();
            assert!((jet.u - orig.u).abs() < 1e-14);
        }
    }
}
