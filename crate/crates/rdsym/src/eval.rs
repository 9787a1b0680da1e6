//! Scalar-function evaluators used throughout the crate.
//!
//! Reaction terms, operator coefficients and profile functions are all
//! represented as value evaluators bundled with the partial derivatives the
//! rest of the crate needs. Analytic partials are the norm; user-supplied
//! functions without them fall back to central finite differences with step
//! h = 1e-6 * max(1, |arg|), which costs roughly half the significant digits.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Finite-difference step for the fallback partials.
fn fd_step(arg: f64) -> f64 {
    1e-6 * arg.abs().max(1.0)
}

/// Real power with hard domain errors.
///
/// Integer exponents (within 1e-9) go through `powi` and accept any base;
/// fractional exponents require a strictly positive base. A negative base
/// never produces a complex branch value.
pub fn real_pow(base: f64, exponent: f64) -> Result<f64> {
    let rounded = exponent.round();
    if (exponent - rounded).abs() < 1e-9 && rounded.abs() < 2_147_483_647.0 {
        let n = rounded as i32;
        if base == 0.0 && n <= 0 {
            if n == 0 {
                return Ok(1.0);
            }
            return Err(Error::ZeroToNonPositive { exponent });
        }
        return Ok(base.powi(n));
    }
    if base > 0.0 {
        Ok(base.powf(exponent))
    } else if base == 0.0 {
        if exponent > 0.0 {
            Ok(0.0)
        } else {
            Err(Error::ZeroToNonPositive { exponent })
        }
    } else {
        Err(Error::FractionalPower {
            base,
            exponent,
        })
    }
}

/// `c * base^exponent`, skipping the power entirely when the factor is zero.
///
/// Keeps expressions like `k * U^(k-1)` well-defined at k = 0 without
/// demanding positivity the formula does not actually need.
pub fn pow_term(c: f64, base: f64, exponent: f64) -> Result<f64> {
    if c == 0.0 {
        Ok(0.0)
    } else {
        Ok(c * real_pow(base, exponent)?)
    }
}

type Scalar1 = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;
type Scalar2 = Arc<dyn Fn(f64, f64) -> Result<f64> + Send + Sync>;

/// One-argument scalar function with a first derivative.
#[derive(Clone)]
pub struct Fn1 {
    value: Scalar1,
    deriv: Option<Scalar1>,
}

impl Fn1 {
    pub fn from_fns(
        value: impl Fn(f64) -> Result<f64> + Send + Sync + 'static,
        deriv: impl Fn(f64) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        Fn1 {
            value: Arc::new(value),
            deriv: Some(Arc::new(deriv)),
        }
    }

    /// Derivative by central differences.
    pub fn from_fn(value: impl Fn(f64) -> Result<f64> + Send + Sync + 'static) -> Self {
        Fn1 {
            value: Arc::new(value),
            deriv: None,
        }
    }

    pub fn zero() -> Self {
        Fn1::from_fns(|_| Ok(0.0), |_| Ok(0.0))
    }

    pub fn constant(c: f64) -> Self {
        Fn1::from_fns(move |_| Ok(c), |_| Ok(0.0))
    }

    /// a*z + b
    pub fn linear(a: f64, b: f64) -> Self {
        Fn1::from_fns(move |z| Ok(a * z + b), move |_| Ok(a))
    }

    pub fn eval(&self, z: f64) -> Result<f64> {
        (self.value)(z)
    }

    pub fn deriv(&self, z: f64) -> Result<f64> {
        match &self.deriv {
            Some(d) => d(z),
            None => {
                let h = fd_step(z);
                Ok(((self.value)(z + h)? - (self.value)(z - h)?) / (2.0 * h))
            }
        }
    }

    pub fn is_analytic(&self) -> bool {
        self.deriv.is_some()
    }
}

/// Two-argument scalar function with first partials. Used for the reaction
/// terms of both the original and the transformed system.
#[derive(Clone)]
pub struct Fn2 {
    value: Scalar2,
    du: Option<Scalar2>,
    dv: Option<Scalar2>,
}

impl Fn2 {
    pub fn from_fns(
        value: impl Fn(f64, f64) -> Result<f64> + Send + Sync + 'static,
        du: impl Fn(f64, f64) -> Result<f64> + Send + Sync + 'static,
        dv: impl Fn(f64, f64) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        Fn2 {
            value: Arc::new(value),
            du: Some(Arc::new(du)),
            dv: Some(Arc::new(dv)),
        }
    }

    /// Partials by central differences.
    pub fn from_fn(value: impl Fn(f64, f64) -> Result<f64> + Send + Sync + 'static) -> Self {
        Fn2 {
            value: Arc::new(value),
            du: None,
            dv: None,
        }
    }

    pub fn zero() -> Self {
        Fn2::from_fns(|_, _| Ok(0.0), |_, _| Ok(0.0), |_, _| Ok(0.0))
    }

    pub fn eval(&self, u: f64, v: f64) -> Result<f64> {
        (self.value)(u, v)
    }

    pub fn du(&self, u: f64, v: f64) -> Result<f64> {
        match &self.du {
            Some(d) => d(u, v),
            None => {
                let h = fd_step(u);
                Ok(((self.value)(u + h, v)? - (self.value)(u - h, v)?) / (2.0 * h))
            }
        }
    }

    pub fn dv(&self, u: f64, v: f64) -> Result<f64> {
        match &self.dv {
            Some(d) => d(u, v),
            None => {
                let h = fd_step(v);
                Ok(((self.value)(u, v + h)? - (self.value)(u, v - h)?) / (2.0 * h))
            }
        }
    }

    pub fn is_analytic(&self) -> bool {
        self.du.is_some() && self.dv.is_some()
    }

    /// Same function shifted by a constant; partials unchanged.
    pub fn shifted(&self, c: f64) -> Fn2 {
        let f = self.clone();
        Fn2 {
            value: Arc::new(move |u, v| Ok((f.value)(u, v)? + c)),
            du: self.du.clone(),
            dv: self.dv.clone(),
        }
    }
}

/// One-variable profile with two derivatives: the phi/psi ansatz functions
/// and the p(x) coefficient live behind this trait.
pub trait Profile: Send + Sync {
    fn eval(&self, x: f64) -> f64;
    fn d1(&self, x: f64) -> f64;
    fn d2(&self, x: f64) -> f64;
}

/// A cos(w x) + B sin(w x) summand.
#[derive(Clone, Copy, Debug)]
pub struct TrigTerm {
    pub a_cos: f64,
    pub a_sin: f64,
    pub w: f64,
}

/// Finite sum of cosine/sine modes. Closed under differentiation, which the
/// fourth-derivative checks rely on.
#[derive(Clone, Debug, Default)]
pub struct TrigSum {
    pub terms: Vec<TrigTerm>,
}

impl TrigSum {
    pub fn new(terms: Vec<TrigTerm>) -> Self {
        TrigSum { terms }
    }

    /// The sum with every mode differentiated twice (amplitudes scaled by -w^2).
    pub fn second_derivative(&self) -> TrigSum {
        TrigSum {
            terms: self
                .terms
                .iter()
                .map(|t| TrigTerm {
                    a_cos: -t.w * t.w * t.a_cos,
                    a_sin: -t.w * t.w * t.a_sin,
                    w: t.w,
                })
                .collect(),
        }
    }

    /// Largest possible |value|: the sum of the mode amplitudes.
    pub fn amplitude_bound(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| (t.a_cos * t.a_cos + t.a_sin * t.a_sin).sqrt())
            .sum()
    }
}

impl Profile for TrigSum {
    fn eval(&self, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.a_cos * (t.w * x).cos() + t.a_sin * (t.w * x).sin())
            .sum()
    }

    fn d1(&self, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.w * (-t.a_cos * (t.w * x).sin() + t.a_sin * (t.w * x).cos()))
            .sum()
    }

    fn d2(&self, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| -t.w * t.w * (t.a_cos * (t.w * x).cos() + t.a_sin * (t.w * x).sin()))
            .sum()
    }
}

/// Polynomial profile, coefficients in ascending powers of x.
#[derive(Clone, Debug)]
pub struct PolyProfile {
    pub coeffs: Vec<f64>,
}

impl PolyProfile {
    pub fn new(coeffs: Vec<f64>) -> Self {
        PolyProfile { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        PolyProfile { coeffs: vec![c] }
    }
}

impl Profile for PolyProfile {
    fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    fn d1(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (i, &c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * x + i as f64 * c;
        }
        acc
    }

    fn d2(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (i, &c) in self.coeffs.iter().enumerate().skip(2).rev() {
            acc = acc * x + (i * (i - 1)) as f64 * c;
        }
        acc
    }
}

/// Profile backed by explicit closures.
pub struct ClosureProfile {
    pub f: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub df: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub ddf: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl ClosureProfile {
    pub fn new(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
        ddf: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ClosureProfile {
            f: Box::new(f),
            df: Box::new(df),
            ddf: Box::new(ddf),
        }
    }
}

impl Profile for ClosureProfile {
    fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }
    fn d1(&self, x: f64) -> f64 {
        (self.df)(x)
    }
    fn d2(&self, x: f64) -> f64 {
        (self.ddf)(x)
    }
}

/// Piecewise quintic Hermite interpolant through samples (x_i, f_i, f'_i, f''_i)
/// on a uniform grid. Interpolation error is O(h^6) for the value, O(h^5) and
/// O(h^4) for the derivatives, so an RK4-sampled ODE solution keeps its order.
#[derive(Clone, Debug)]
pub struct HermiteCurve {
    x0: f64,
    h: f64,
    f: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

impl HermiteCurve {
    pub fn new(x0: f64, h: f64, f: Vec<f64>, d1: Vec<f64>, d2: Vec<f64>) -> Result<Self> {
        if f.len() < 2 || f.len() != d1.len() || f.len() != d2.len() || h <= 0.0 {
            return Err(Error::Numerics(
                "Hermite curve needs at least two consistent samples".into(),
            ));
        }
        Ok(HermiteCurve { x0, h, f, d1, d2 })
    }

    pub fn x_min(&self) -> f64 {
        self.x0
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + self.h * (self.f.len() - 1) as f64
    }

    pub fn samples(&self) -> (&[f64], &[f64], &[f64]) {
        (&self.f, &self.d1, &self.d2)
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn node(&self, i: usize) -> f64 {
        self.x0 + self.h * i as f64
    }

    /// Segment index and local coordinate s in [0, 1]. Clamps to the span so
    /// roundoff at the endpoints stays harmless; genuine extrapolation is the
    /// caller's responsibility.
    fn locate(&self, x: f64) -> (usize, f64) {
        let n_seg = self.f.len() - 1;
        let raw = (x - self.x0) / self.h;
        let i = (raw.floor() as isize).clamp(0, n_seg as isize - 1) as usize;
        (i, raw - i as f64)
    }

    fn combine(&self, x: f64, basis: fn(f64) -> [f64; 6], scale: f64) -> f64 {
        let (i, s) = self.locate(x);
        let b = basis(s);
        let h = self.h;
        (self.f[i] * b[0]
            + h * self.d1[i] * b[1]
            + h * h * self.d2[i] * b[2]
            + self.f[i + 1] * b[3]
            + h * self.d1[i + 1] * b[4]
            + h * h * self.d2[i + 1] * b[5])
            * scale
    }
}

fn quintic_h(s: f64) -> [f64; 6] {
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let s5 = s4 * s;
    [
        1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5,
        s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5,
        0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5,
        10.0 * s3 - 15.0 * s4 + 6.0 * s5,
        -4.0 * s3 + 7.0 * s4 - 3.0 * s5,
        0.5 * s3 - s4 + 0.5 * s5,
    ]
}

fn quintic_dh(s: f64) -> [f64; 6] {
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    [
        -30.0 * s2 + 60.0 * s3 - 30.0 * s4,
        1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4,
        s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4,
        30.0 * s2 - 60.0 * s3 + 30.0 * s4,
        -12.0 * s2 + 28.0 * s3 - 15.0 * s4,
        1.5 * s2 - 4.0 * s3 + 2.5 * s4,
    ]
}

fn quintic_ddh(s: f64) -> [f64; 6] {
    let s2 = s * s;
    let s3 = s2 * s;
    [
        -60.0 * s + 180.0 * s2 - 120.0 * s3,
        -36.0 * s + 96.0 * s2 - 60.0 * s3,
        1.0 - 9.0 * s + 18.0 * s2 - 10.0 * s3,
        60.0 * s - 180.0 * s2 + 120.0 * s3,
        -24.0 * s + 84.0 * s2 - 60.0 * s3,
        3.0 * s - 12.0 * s2 + 10.0 * s3,
    ]
}

impl Profile for HermiteCurve {
    fn eval(&self, x: f64) -> f64 {
        self.combine(x, quintic_h, 1.0)
    }

    fn d1(&self, x: f64) -> f64 {
        self.combine(x, quintic_dh, 1.0 / self.h)
    }

    fn d2(&self, x: f64) -> f64 {
        self.combine(x, quintic_ddh, 1.0 / (self.h * self.h))
    }
}

/// Evaluation point (t, x, u, v) for operator coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point4 {
    pub t: f64,
    pub x: f64,
    pub u: f64,
    pub v: f64,
}

impl Point4 {
    pub fn new(t: f64, x: f64, u: f64, v: f64) -> Self {
        Point4 { t, x, u, v }
    }
}

type CoefFn = Arc<dyn Fn(Point4) -> f64 + Send + Sync>;

/// The partial derivatives a symmetry-operator coefficient must expose.
pub struct CoefPartials {
    pub dt: CoefFn,
    pub dx: CoefFn,
    pub du: CoefFn,
    pub dv: CoefFn,
    pub dxx: CoefFn,
    pub dxu: CoefFn,
    pub dxv: CoefFn,
    pub duu: CoefFn,
    pub dvv: CoefFn,
    pub duv: CoefFn,
}

/// A scalar coefficient of (t, x, u, v) bundled with its partials.
#[derive(Clone)]
pub struct Coef {
    value: CoefFn,
    partials: Option<Arc<CoefPartials>>,
}

macro_rules! coef_partial {
    ($name:ident, $fd:ident) => {
        pub fn $name(&self, p: Point4) -> f64 {
            match &self.partials {
                Some(ps) => (ps.$name)(p),
                None => self.$fd(p),
            }
        }
    };
}

impl Coef {
    pub fn new(value: impl Fn(Point4) -> f64 + Send + Sync + 'static, partials: CoefPartials) -> Self {
        Coef {
            value: Arc::new(value),
            partials: Some(Arc::new(partials)),
        }
    }

    /// All partials by finite differences of the value evaluator.
    pub fn from_value(value: impl Fn(Point4) -> f64 + Send + Sync + 'static) -> Self {
        Coef {
            value: Arc::new(value),
            partials: None,
        }
    }

    pub fn zero() -> Self {
        Coef::poly(vec![])
    }

    pub fn constant(c: f64) -> Self {
        Coef::poly(vec![(c, [0, 0, 0, 0])])
    }

    /// Polynomial in (t, x, u, v): sum of c * t^a x^b u^c v^d terms with
    /// exact partials. The workhorse for tests and structured operators.
    pub fn poly(terms: Vec<(f64, [u32; 4])>) -> Self {
        fn eval_terms(terms: &[(f64, [u32; 4])], p: Point4) -> f64 {
            terms
                .iter()
                .map(|&(c, e)| {
                    c * p.t.powi(e[0] as i32)
                        * p.x.powi(e[1] as i32)
                        * p.u.powi(e[2] as i32)
                        * p.v.powi(e[3] as i32)
                })
                .sum()
        }
        fn diff(terms: &[(f64, [u32; 4])], axis: usize) -> Vec<(f64, [u32; 4])> {
            terms
                .iter()
                .filter(|&&(_, e)| e[axis] > 0)
                .map(|&(c, e)| {
                    let mut e2 = e;
                    e2[axis] -= 1;
                    (c * e[axis] as f64, e2)
                })
                .collect()
        }
        let d: Vec<Vec<(f64, [u32; 4])>> = (0..4).map(|a| diff(&terms, a)).collect();
        let dxx = diff(&d[1], 1);
        let dxu = diff(&d[1], 2);
        let dxv = diff(&d[1], 3);
        let duu = diff(&d[2], 2);
        let dvv = diff(&d[3], 3);
        let duv = diff(&d[2], 3);
        let mk = |ts: Vec<(f64, [u32; 4])>| -> CoefFn { Arc::new(move |p| eval_terms(&ts, p)) };
        let value_terms = terms.clone();
        Coef {
            value: Arc::new(move |p| eval_terms(&value_terms, p)),
            partials: Some(Arc::new(CoefPartials {
                dt: mk(d[0].clone()),
                dx: mk(d[1].clone()),
                du: mk(d[2].clone()),
                dv: mk(d[3].clone()),
                dxx: mk(dxx),
                dxu: mk(dxu),
                dxv: mk(dxv),
                duu: mk(duu),
                dvv: mk(dvv),
                duv: mk(duv),
            })),
        }
    }

    /// Coefficient depending on x only, backed by a profile.
    pub fn of_x_profile(p: Arc<dyn Profile>) -> Self {
        let p1 = p.clone();
        let p2 = p.clone();
        let p3 = p.clone();
        let zero: CoefFn = Arc::new(|_| 0.0);
        Coef {
            value: Arc::new(move |q: Point4| p1.eval(q.x)),
            partials: Some(Arc::new(CoefPartials {
                dt: zero.clone(),
                dx: Arc::new(move |q: Point4| p2.d1(q.x)),
                du: zero.clone(),
                dv: zero.clone(),
                dxx: Arc::new(move |q: Point4| p3.d2(q.x)),
                dxu: zero.clone(),
                dxv: zero.clone(),
                duu: zero.clone(),
                dvv: zero.clone(),
                duv: zero,
            })),
        }
    }

    pub fn value(&self, p: Point4) -> f64 {
        (self.value)(p)
    }

    pub fn is_analytic(&self) -> bool {
        self.partials.is_some()
    }

    coef_partial!(dt, fd_dt);
    coef_partial!(dx, fd_dx);
    coef_partial!(du, fd_du);
    coef_partial!(dv, fd_dv);
    coef_partial!(dxx, fd_dxx);
    coef_partial!(dxu, fd_dxu);
    coef_partial!(dxv, fd_dxv);
    coef_partial!(duu, fd_duu);
    coef_partial!(dvv, fd_dvv);
    coef_partial!(duv, fd_duv);

    fn fd_dt(&self, p: Point4) -> f64 {
        let h = fd_step(p.t);
        ((self.value)(Point4 { t: p.t + h, ..p }) - (self.value)(Point4 { t: p.t - h, ..p }))
            / (2.0 * h)
    }

    fn fd_dx(&self, p: Point4) -> f64 {
        let h = fd_step(p.x);
        ((self.value)(Point4 { x: p.x + h, ..p }) - (self.value)(Point4 { x: p.x - h, ..p }))
            / (2.0 * h)
    }

    fn fd_du(&self, p: Point4) -> f64 {
        let h = fd_step(p.u);
        ((self.value)(Point4 { u: p.u + h, ..p }) - (self.value)(Point4 { u: p.u - h, ..p }))
            / (2.0 * h)
    }

    fn fd_dv(&self, p: Point4) -> f64 {
        let h = fd_step(p.v);
        ((self.value)(Point4 { v: p.v + h, ..p }) - (self.value)(Point4 { v: p.v - h, ..p }))
            / (2.0 * h)
    }

    fn fd_dxx(&self, p: Point4) -> f64 {
        // second differences lose more digits; a larger step balances that
        let h = 1e-4 * p.x.abs().max(1.0);
        ((self.value)(Point4 { x: p.x + h, ..p }) - 2.0 * (self.value)(p)
            + (self.value)(Point4 { x: p.x - h, ..p }))
            / (h * h)
    }

    fn fd_mixed(&self, p: Point4, axis1: usize, axis2: usize) -> f64 {
        let coords = [p.t, p.x, p.u, p.v];
        let h1 = 1e-4 * coords[axis1].abs().max(1.0);
        let h2 = 1e-4 * coords[axis2].abs().max(1.0);
        let shift = |s1: f64, s2: f64| {
            let mut c = coords;
            c[axis1] += s1;
            c[axis2] += s2;
            (self.value)(Point4 {
                t: c[0],
                x: c[1],
                u: c[2],
                v: c[3],
            })
        };
        (shift(h1, h2) - shift(h1, -h2) - shift(-h1, h2) + shift(-h1, -h2)) / (4.0 * h1 * h2)
    }

    fn fd_dxu(&self, p: Point4) -> f64 {
        self.fd_mixed(p, 1, 2)
    }

    fn fd_dxv(&self, p: Point4) -> f64 {
        self.fd_mixed(p, 1, 3)
    }

    fn fd_duu(&self, p: Point4) -> f64 {
        let h = 1e-4 * p.u.abs().max(1.0);
        ((self.value)(Point4 { u: p.u + h, ..p }) - 2.0 * (self.value)(p)
            + (self.value)(Point4 { u: p.u - h, ..p }))
            / (h * h)
    }

    fn fd_dvv(&self, p: Point4) -> f64 {
        let h = 1e-4 * p.v.abs().max(1.0);
        ((self.value)(Point4 { v: p.v + h, ..p }) - 2.0 * (self.value)(p)
            + (self.value)(Point4 { v: p.v - h, ..p }))
            / (h * h)
    }

    fn fd_duv(&self, p: Point4) -> f64 {
        self.fd_mixed(p, 2, 3)
    }

    /// Largest discrepancy between the declared partials and a finite-difference
    /// estimate of them at the given points. Self-test hook for hand-written
    /// analytic partials.
    pub fn partial_consistency(&self, points: &[Point4]) -> f64 {
        let mut worst: f64 = 0.0;
        for &p in points {
            let checks = [
                (self.dt(p), self.fd_dt(p)),
                (self.dx(p), self.fd_dx(p)),
                (self.du(p), self.fd_du(p)),
                (self.dv(p), self.fd_dv(p)),
                (self.dxx(p), self.fd_dxx(p)),
                (self.dxu(p), self.fd_dxu(p)),
                (self.dxv(p), self.fd_dxv(p)),
                (self.duu(p), self.fd_duu(p)),
                (self.dvv(p), self.fd_dvv(p)),
                (self.duv(p), self.fd_duv(p)),
            ];
            for (a, b) in checks {
                worst = worst.max((a - b).abs() / (1.0 + a.abs().max(b.abs())));
            }
        }
        worst
    }
}

/// Function of (t, x) with the t/x/xx partials the structured operator form
/// needs.
#[derive(Clone)]
pub struct TxFn {
    pub f: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    pub ft: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    pub fx: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    pub fxx: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
}

impl TxFn {
    pub fn zero() -> Self {
        TxFn::constant(0.0)
    }

    pub fn constant(c: f64) -> Self {
        TxFn {
            f: Arc::new(move |_, _| c),
            ft: Arc::new(|_, _| 0.0),
            fx: Arc::new(|_, _| 0.0),
            fxx: Arc::new(|_, _| 0.0),
        }
    }

    /// Polynomial sum of c * t^a x^b terms.
    pub fn poly(terms: Vec<(f64, [u32; 2])>) -> Self {
        fn eval(terms: &[(f64, [u32; 2])], t: f64, x: f64) -> f64 {
            terms
                .iter()
                .map(|&(c, e)| c * t.powi(e[0] as i32) * x.powi(e[1] as i32))
                .sum()
        }
        fn diff(terms: &[(f64, [u32; 2])], axis: usize) -> Vec<(f64, [u32; 2])> {
            terms
                .iter()
                .filter(|&&(_, e)| e[axis] > 0)
                .map(|&(c, e)| {
                    let mut e2 = e;
                    e2[axis] -= 1;
                    (c * e[axis] as f64, e2)
                })
                .collect()
        }
        let dt = diff(&terms, 0);
        let dx = diff(&terms, 1);
        let dxx = diff(&dx, 1);
        let t0 = terms.clone();
        TxFn {
            f: Arc::new(move |t, x| eval(&t0, t, x)),
            ft: Arc::new(move |t, x| eval(&dt, t, x)),
            fx: Arc::new(move |t, x| eval(&dx, t, x)),
            fxx: Arc::new(move |t, x| eval(&dxx, t, x)),
        }
    }

    pub fn from_profile(p: Arc<dyn Profile>) -> Self {
        let p1 = p.clone();
        let p2 = p.clone();
        let p3 = p;
        TxFn {
            f: Arc::new(move |_, x| p1.eval(x)),
            ft: Arc::new(|_, _| 0.0),
            fx: Arc::new(move |_, x| p2.d1(x)),
            fxx: Arc::new(move |_, x| p3.d2(x)),
        }
    }
}

/// Function of t alone with its derivative.
#[derive(Clone)]
pub struct TFn {
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub ft: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl TFn {
    pub fn zero() -> Self {
        TFn::constant(0.0)
    }

    pub fn constant(c: f64) -> Self {
        TFn {
            f: Arc::new(move |_| c),
            ft: Arc::new(|_| 0.0),
        }
    }

    /// a + b t
    pub fn affine(a: f64, b: f64) -> Self {
        TFn {
            f: Arc::new(move |t| a + b * t),
            ft: Arc::new(move |_| b),
        }
    }
}
