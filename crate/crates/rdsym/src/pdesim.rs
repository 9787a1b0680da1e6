//! Conservative explicit finite-difference simulator with zero-flux
//! boundaries: the independent numerical oracle for the closed-form
//! solutions.
//!
//! The spatial operator is the standard conservative three-point stencil
//! with arithmetic-mean interface diffusivities and ghost-node reflection,
//! second order in h and exact for constant states. Time stepping is
//! explicit with the step clamped to 0.4 h^2 / max(U^k, V^l), re-evaluated
//! every step. A positivity breach is an error, not a clamp: it signals
//! leaving the validity window of the solution being tracked.

use crate::error::{Error, Result};
use crate::eval::real_pow;
use crate::exact::ExactSolution;
use crate::model::RDSystemOriginal;

/// Uniform node grid on [x_lo, x_lo + a] with n cells (n + 1 nodes).
#[derive(Clone, Copy, Debug)]
pub struct Grid1D {
    a: f64,
    n: usize,
    x_lo: f64,
}

impl Grid1D {
    pub fn new(a: f64, n: usize) -> Result<Grid1D> {
        if !(a > 0.0) {
            return Err(Error::Domain(format!("domain length must be positive: {a}")));
        }
        if n < 8 {
            return Err(Error::Domain(format!("cell count must be at least 8: {n}")));
        }
        Ok(Grid1D { a, n, x_lo: 0.0 })
    }

    pub fn with_origin(mut self, x_lo: f64) -> Grid1D {
        self.x_lo = x_lo;
        self
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn cells(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.a / self.n as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.x_lo + self.a * i as f64 / self.n as f64
    }

    pub fn node_count(&self) -> usize {
        self.n + 1
    }
}

/// Both field arrays at one time level.
#[derive(Clone, Debug)]
pub struct FieldPair {
    pub t: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl FieldPair {
    pub fn constant(grid: &Grid1D, u0: f64, v0: f64) -> FieldPair {
        FieldPair {
            t: 0.0,
            u: vec![u0; grid.node_count()],
            v: vec![v0; grid.node_count()],
        }
    }
}

/// Initial data sampled from an exact solution at t = 0.
pub fn init_from_exact(sol: &ExactSolution, grid: &Grid1D) -> Result<FieldPair> {
    let mut u = Vec::with_capacity(grid.node_count());
    let mut v = Vec::with_capacity(grid.node_count());
    for i in 0..grid.node_count() {
        let jet = sol.evaluate(0.0, grid.node(i))?;
        u.push(jet.u);
        v.push(jet.v);
    }
    Ok(FieldPair { t: 0.0, u, v })
}

/// Safety factor applied to the diffusive stability limit h^2 / (2 max D).
pub const STABILITY_FACTOR: f64 = 0.4;

/// Current stability bound 0.4 h^2 / max_i(max(U_i^k, V_i^l)).
pub fn stability_dt(sys: &RDSystemOriginal, f: &FieldPair, grid: &Grid1D) -> Result<f64> {
    let mut dmax = 0.0f64;
    for i in 0..f.u.len() {
        dmax = dmax.max(real_pow(f.u[i], sys.k)?).max(real_pow(f.v[i], sys.l)?);
    }
    if dmax <= 0.0 {
        return Err(Error::Numerics("non-positive diffusivity bound".into()));
    }
    let h = grid.h();
    Ok(STABILITY_FACTOR * h * h / dmax)
}

fn check_positive(sys: &RDSystemOriginal, f: &FieldPair, grid: &Grid1D) -> Result<()> {
    if sys.require_positive.0 {
        for (i, &u) in f.u.iter().enumerate() {
            if !(u > 0.0) {
                return Err(Error::PositivityBreach {
                    field: "U",
                    node: i,
                    x: grid.node(i),
                    t: f.t,
                });
            }
        }
    }
    if sys.require_positive.1 {
        for (i, &v) in f.v.iter().enumerate() {
            if !(v > 0.0) {
                return Err(Error::PositivityBreach {
                    field: "V",
                    node: i,
                    x: grid.node(i),
                    t: f.t,
                });
            }
        }
    }
    Ok(())
}

/// Conservative update of one field with ghost-node reflection,
/// returning the new node values.
fn diffuse_react(
    w: &[f64],
    d: &[f64],
    react: &[f64],
    dt: f64,
    h: f64,
) -> Vec<f64> {
    let n = w.len() - 1;
    let lam = dt / (h * h);
    let mut out = Vec::with_capacity(w.len());
    for i in 0..=n {
        // ghost reflection: w[-1] = w[1], w[n+1] = w[n-1] (and likewise for
        // the diffusivity samples)
        let (wm, dm) = if i == 0 { (w[1], d[1]) } else { (w[i - 1], d[i - 1]) };
        let (wp, dp) = if i == n { (w[n - 1], d[n - 1]) } else { (w[i + 1], d[i + 1]) };
        let d_plus = 0.5 * (d[i] + dp);
        let d_minus = 0.5 * (d[i] + dm);
        out.push(w[i] + lam * (d_plus * (wp - w[i]) - d_minus * (w[i] - wm)) + dt * react[i]);
    }
    out
}

/// One explicit step of size dt. The caller must respect the stability
/// bound; the automatic clamp lives in [`simulate`].
pub fn step(sys: &RDSystemOriginal, f: &FieldPair, grid: &Grid1D, dt: f64) -> Result<FieldPair> {
    if !(dt > 0.0) {
        return Err(Error::Numerics(format!("step size must be positive: {dt}")));
    }
    let bound = stability_dt(sys, f, grid)?;
    if dt > bound * (1.0 + 1e-9) {
        return Err(Error::UnstableStep { dt, bound });
    }
    check_positive(sys, f, grid)?;
    let n_nodes = f.u.len();
    let mut du = Vec::with_capacity(n_nodes);
    let mut dv = Vec::with_capacity(n_nodes);
    let mut fu = Vec::with_capacity(n_nodes);
    let mut gv = Vec::with_capacity(n_nodes);
    for i in 0..n_nodes {
        du.push(real_pow(f.u[i], sys.k)?);
        dv.push(real_pow(f.v[i], sys.l)?);
        fu.push(sys.f.eval(f.u[i], f.v[i])?);
        gv.push(sys.g.eval(f.u[i], f.v[i])?);
    }
    let h = grid.h();
    let out = FieldPair {
        t: f.t + dt,
        u: diffuse_react(&f.u, &du, &fu, dt, h),
        v: diffuse_react(&f.v, &dv, &gv, dt, h),
    };
    for (name, field) in [("U", &out.u), ("V", &out.v)] {
        for (i, &w) in field.iter().enumerate() {
            if !w.is_finite() || w.abs() > 1e12 {
                return Err(Error::Numerics(format!(
                    "{name} diverged at node {i} (x = {}), t = {}",
                    grid.node(i),
                    out.t
                )));
            }
        }
    }
    check_positive(sys, &out, grid)?;
    Ok(out)
}

/// Sampled simulation output.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub samples: Vec<FieldPair>,
    pub warnings: Vec<String>,
    pub steps_taken: usize,
}

impl Trajectory {
    pub fn sample_times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }
}

const MAX_SIM_STEPS: usize = 50_000_000;

/// Integrate to t_end, recording `n_samples` evenly spaced snapshots
/// (including the initial state). A requested step larger than the
/// stability bound is clamped with a warning record.
pub fn simulate(
    sys: &RDSystemOriginal,
    init: FieldPair,
    grid: &Grid1D,
    dt_request: Option<f64>,
    t_end: f64,
    n_samples: usize,
) -> Result<Trajectory> {
    if t_end < 0.0 {
        return Err(Error::Domain(format!("end time must be non-negative: {t_end}")));
    }
    let t0 = init.t;
    let mut samples = Vec::new();
    let mut warnings = Vec::new();
    samples.push(init.clone());
    if t_end == 0.0 {
        return Ok(Trajectory {
            samples,
            warnings,
            steps_taken: 0,
        });
    }
    let n_marks = n_samples.max(2);
    let sample_times: Vec<f64> = (1..n_marks)
        .map(|i| t0 + (t_end - t0) * i as f64 / (n_marks - 1) as f64)
        .collect();

    let mut state = init;
    let mut clamped = false;
    let mut steps = 0usize;
    for &mark in &sample_times {
        while state.t < mark - 1e-13 {
            let bound = stability_dt(sys, &state, grid)?;
            let mut dt = match dt_request {
                Some(req) => {
                    if req > bound && !clamped {
                        clamped = true;
                        warnings.push(format!(
                            "requested step {req:.3e} exceeds the stability bound \
                             {bound:.3e} at t = {:.6}; clamped",
                            state.t
                        ));
                    }
                    req.min(bound)
                }
                None => bound,
            };
            if state.t + dt > mark {
                dt = mark - state.t;
            }
            state = step(sys, &state, grid, dt)?;
            steps += 1;
            if steps > MAX_SIM_STEPS {
                return Err(Error::TooManySteps {
                    steps,
                    limit: MAX_SIM_STEPS,
                });
            }
        }
        state.t = mark; // suppress roundoff drift in the recorded stamp
        samples.push(state.clone());
    }
    Ok(Trajectory {
        samples,
        warnings,
        steps_taken: steps,
    })
}

/// L-infinity defect of the exact solution inserted into the discrete
/// conservative operator: second order in h for a true solution, bounded
/// away from zero for anything else.
pub fn residual_on_grid(
    sol: &ExactSolution,
    sys: &RDSystemOriginal,
    grid: &Grid1D,
    t: f64,
) -> Result<f64> {
    let n = grid.cells();
    let mut u = Vec::with_capacity(n + 1);
    let mut v = Vec::with_capacity(n + 1);
    let mut ut = Vec::with_capacity(n + 1);
    let mut vt = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let jet = sol.evaluate(t, grid.node(i))?;
        u.push(jet.u);
        v.push(jet.v);
        ut.push(jet.u_t.unwrap());
        vt.push(jet.v_t.unwrap());
    }
    let mut du = Vec::with_capacity(n + 1);
    let mut dv = Vec::with_capacity(n + 1);
    let mut fu = Vec::with_capacity(n + 1);
    let mut gv = Vec::with_capacity(n + 1);
    for i in 0..=n {
        du.push(real_pow(u[i], sys.k)?);
        dv.push(real_pow(v[i], sys.l)?);
        fu.push(sys.f.eval(u[i], v[i])?);
        gv.push(sys.g.eval(u[i], v[i])?);
    }
    let h = grid.h();
    let mut worst = 0.0f64;
    let defect = |w: &[f64], d: &[f64], react: &[f64], wt: &[f64], i: usize| -> f64 {
        let (wm, dm) = if i == 0 { (w[1], d[1]) } else { (w[i - 1], d[i - 1]) };
        let (wp, dp) = if i == n { (w[n - 1], d[n - 1]) } else { (w[i + 1], d[i + 1]) };
        let d_plus = 0.5 * (d[i] + dp);
        let d_minus = 0.5 * (d[i] + dm);
        (d_plus * (wp - w[i]) - d_minus * (w[i] - wm)) / (h * h) + react[i] - wt[i]
    };
    for i in 0..=n {
        worst = worst.max(defect(&u, &du, &fu, &ut, i).abs());
        worst = worst.max(defect(&v, &dv, &gv, &vt, i).abs());
    }
    Ok(worst)
}

/// Discrete error norms of a trajectory against the exact solution at time
/// t. A time between recorded samples is handled by linear interpolation and
/// flagged.
#[derive(Clone, Copy, Debug)]
pub struct ErrorNorms {
    pub l2: f64,
    pub linf: f64,
    pub interpolated: bool,
}

pub fn error_norms(
    traj: &Trajectory,
    sol: &ExactSolution,
    grid: &Grid1D,
    t: f64,
) -> Result<ErrorNorms> {
    let samples = &traj.samples;
    if samples.is_empty() {
        return Err(Error::Numerics("empty trajectory".into()));
    }
    // locate the bracketing samples
    let mut fields: Option<(Vec<f64>, Vec<f64>, bool)> = None;
    for s in samples {
        if (s.t - t).abs() < 1e-12 {
            fields = Some((s.u.clone(), s.v.clone(), false));
            break;
        }
    }
    if fields.is_none() {
        for w in samples.windows(2) {
            if w[0].t < t && t < w[1].t {
                let a = (w[1].t - t) / (w[1].t - w[0].t);
                let b = 1.0 - a;
                let u = w[0]
                    .u
                    .iter()
                    .zip(&w[1].u)
                    .map(|(x, y)| a * x + b * y)
                    .collect();
                let v = w[0]
                    .v
                    .iter()
                    .zip(&w[1].v)
                    .map(|(x, y)| a * x + b * y)
                    .collect();
                fields = Some((u, v, true));
                break;
            }
        }
    }
    let (u, v, interpolated) = fields.ok_or_else(|| {
        Error::Numerics(format!("time {t} is outside the sampled trajectory"))
    })?;
    let h = grid.h();
    let mut linf = 0.0f64;
    let mut l2 = 0.0f64;
    for i in 0..u.len() {
        let jet = sol.evaluate(t, grid.node(i))?;
        let (eu, ev) = ((u[i] - jet.u).abs(), (v[i] - jet.v).abs());
        linf = linf.max(eu).max(ev);
        // trapezoid weights
        let w = if i == 0 || i == u.len() - 1 { 0.5 } else { 1.0 };
        l2 += w * h * (eu * eu + ev * ev);
    }
    Ok(ErrorNorms {
        l2: l2.sqrt(),
        linf,
        interpolated,
    })
}

/// Spatial inhomogeneity measure (max - min)/mean of a field.
pub fn inhomogeneity_ratio(field: &[f64]) -> f64 {
    let max = field.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = field.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = field.iter().sum::<f64>() / field.len() as f64;
    if mean == 0.0 {
        f64::INFINITY
    } else {
        (max - min) / mean
    }
}
