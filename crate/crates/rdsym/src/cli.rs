//! Command dispatch: ties the verification engine, the reduction machinery,
//! the exact solutions and the simulator to the line-oriented run
//! configuration.

use std::path::PathBuf;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{Command, FnSpec, RunConfig};
use crate::detcheck;
use crate::error::{Error, Result};
use crate::eval::Fn1;
use crate::exact::{
    admissible_intervals, build_case_i, build_case_ii, build_case_iii, CaseIiiParams,
    ExactSolution, SolutionCase,
};
use crate::families::{build_family, FamilyId, FamilyParams};
use crate::pdesim;
use crate::reduction::{
    general_solution, quartic_spectrum, reaction_coefficients, solve_p_ode,
    LinearReductionParams,
};
use crate::report::{CsvWriter, Report};

/// Flags that override the configuration file.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub quiet: bool,
}

/// What a run produced, for callers that want to inspect it.
pub struct RunOutput {
    pub report: Report,
    pub artifacts: Vec<PathBuf>,
}

fn req<T: Copy>(v: Option<T>, key: &'static str) -> Result<T> {
    v.ok_or(Error::MissingKey(key))
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    opts: &'a RunOptions,
    artifacts: Vec<PathBuf>,
}

impl<'a> Ctx<'a> {
    fn seed(&self) -> u64 {
        self.opts.seed.or(self.cfg.seed).unwrap_or(0)
    }

    fn tol(&self, default: f64) -> f64 {
        self.opts.tol.or(self.cfg.tol).unwrap_or(default)
    }

    fn out_dir(&self) -> Option<PathBuf> {
        self.opts
            .out
            .clone()
            .or_else(|| self.cfg.out.as_ref().map(PathBuf::from))
    }

    fn csv(&mut self, name: &str, header: &[&str]) -> Result<Option<CsvWriter>> {
        match self.out_dir() {
            Some(dir) => {
                let w = CsvWriter::create(dir.join(name), header)?;
                self.artifacts.push(w.path().to_path_buf());
                Ok(Some(w))
            }
            None => Ok(None),
        }
    }

    fn finish(&mut self, report: Report) -> Result<RunOutput> {
        if let Some(dir) = self.out_dir() {
            let path = dir.join("report.txt");
            report.write_to(&path)?;
            self.artifacts.push(path);
        }
        if !self.opts.quiet {
            report.print();
        }
        Ok(RunOutput {
            report,
            artifacts: std::mem::take(&mut self.artifacts),
        })
    }
}

fn fn1_from(spec: Option<FnSpec>, role_g: bool, cfg: &RunConfig) -> Result<Fn1> {
    Ok(match spec.unwrap_or(FnSpec::Zero) {
        FnSpec::Zero => Fn1::zero(),
        FnSpec::Linear(a, b) => Fn1::linear(a, b),
        FnSpec::Reduction => {
            if role_g {
                let a2 = req(cfg.alpha2, "alpha2")?;
                let b2 = req(cfg.beta2, "beta2")?;
                let l = req(cfg.l, "l")?;
                Fn1::from_fns(
                    move |w| Ok(-(a2 * w + b2) / (l + 1.0)),
                    move |_| Ok(-a2 / (l + 1.0)),
                )
            } else {
                let a1 = req(cfg.alpha1, "alpha1")?;
                let b1 = req(cfg.beta1, "beta1")?;
                let k = req(cfg.k, "k")?;
                Fn1::from_fns(
                    move |w| Ok(-(a1 + b1 / w) / (k + 1.0)),
                    move |w| Ok(b1 / (w * w * (k + 1.0))),
                )
            }
        }
    })
}

fn solve_p_from(cfg: &RunConfig) -> Result<crate::reduction::PFunction> {
    let lambda = req(cfg.lambda, "lambda")?;
    let p0 = cfg.p0.unwrap_or(0.8);
    let dp0 = cfg.p0_prime.unwrap_or(0.1);
    let x_min = cfg.x_min.unwrap_or(0.0);
    let x_max = cfg.x_max.unwrap_or(1.0);
    let step = cfg.step.unwrap_or(1e-3);
    solve_p_ode(lambda, p0, dp0, (x_min, x_max), step)
}

fn family_params_from(cfg: &RunConfig) -> Result<FamilyParams> {
    let fam = FamilyId::from_number(req(cfg.family, "family")?)
        .ok_or(Error::Config("family must be 1..5".into()))?;
    let f = fn1_from(cfg.f, false, cfg)?;
    let g = fn1_from(cfg.g, true, cfg)?;
    Ok(match fam {
        FamilyId::F1 => FamilyParams::family1(
            req(cfg.k, "k")?,
            req(cfg.lambda, "lambda")?,
            Arc::new(solve_p_from(cfg)?),
            f,
            g,
        ),
        FamilyId::F2 => FamilyParams::family2(
            req(cfg.k, "k")?,
            req(cfg.l, "l")?,
            req(cfg.lambda1, "lambda1")?,
            req(cfg.lambda2, "lambda2")?,
            f,
            g,
        ),
        FamilyId::F3 => FamilyParams::family3(
            req(cfg.lambda, "lambda")?,
            Arc::new(solve_p_from(cfg)?),
            f,
            g,
        ),
        FamilyId::F4 => FamilyParams::family4(
            req(cfg.k, "k")?,
            req(cfg.l, "l")?,
            req(cfg.lambda1, "lambda1")?,
            req(cfg.lambda2, "lambda2")?,
            req(cfg.lambda3, "lambda3")?,
            f,
            g,
        ),
        FamilyId::F5 => FamilyParams::family5(
            req(cfg.k, "k")?,
            req(cfg.l, "l")?,
            req(cfg.lambda1, "lambda1")?,
            req(cfg.lambda2, "lambda2")?,
            req(cfg.lambda3, "lambda3")?,
            req(cfg.lambda4, "lambda4")?,
            f,
            g,
        ),
    })
}

fn lin_params_from(cfg: &RunConfig) -> Result<LinearReductionParams> {
    Ok(LinearReductionParams {
        alpha1: req(cfg.alpha1, "alpha1")?,
        beta1: req(cfg.beta1, "beta1")?,
        alpha2: req(cfg.alpha2, "alpha2")?,
        beta2: req(cfg.beta2, "beta2")?,
        r: req(cfg.r, "r")?,
        k: req(cfg.k, "k")?,
        l: req(cfg.l, "l")?,
        lambda1: req(cfg.lambda1, "lambda1")?,
        lambda3: req(cfg.lambda3, "lambda3")?,
    })
}

fn exact_from(cfg: &RunConfig) -> Result<ExactSolution> {
    let case = req(cfg.case, "case")?;
    match case {
        SolutionCase::I => build_case_i(
            &lin_params_from(cfg)?,
            req(cfg.a1, "a1")?,
            cfg.j1.unwrap_or(1),
        ),
        SolutionCase::II => build_case_ii(
            &lin_params_from(cfg)?,
            req(cfg.a3, "a3")?,
            cfg.j1.unwrap_or(1),
        ),
        SolutionCase::III => build_case_iii(&CaseIiiParams {
            alpha1: req(cfg.alpha1, "alpha1")?,
            beta1: req(cfg.beta1, "beta1")?,
            beta2: req(cfg.beta2, "beta2")?,
            r: req(cfg.r, "r")?,
            k: req(cfg.k, "k")?,
            l: req(cfg.l, "l")?,
            lambda1: req(cfg.lambda1, "lambda1")?,
            lambda3: req(cfg.lambda3, "lambda3")?,
            a1: cfg.a1.unwrap_or(0.0),
            a3: cfg.a3.unwrap_or(0.0),
            j1: req(cfg.j1, "j1")?,
            j2: req(cfg.j2, "j2")?,
        }),
    }
}

/// Execute one configured command, writing artifacts under the output
/// directory when one was given.
pub fn run(cfg: &RunConfig, opts: &RunOptions) -> Result<RunOutput> {
    let mut ctx = Ctx {
        cfg,
        opts,
        artifacts: Vec::new(),
    };
    match cfg.command {
        Command::Spectrum => cmd_spectrum(&mut ctx),
        Command::VerifySymmetry => cmd_verify(&mut ctx),
        Command::Reduce => cmd_reduce(&mut ctx),
        Command::Exact => cmd_exact(&mut ctx),
        Command::Intervals => cmd_intervals(&mut ctx),
        Command::Simulate => cmd_simulate(&mut ctx),
        Command::Residual => cmd_residual(&mut ctx),
        Command::Convergence => cmd_convergence(&mut ctx),
    }
}

fn cmd_spectrum(ctx: &mut Ctx) -> Result<RunOutput> {
    let cfg = ctx.cfg;
    let (a1, b1) = (req(cfg.alpha1, "alpha1")?, req(cfg.beta1, "beta1")?);
    let (a2, b2) = (req(cfg.alpha2, "alpha2")?, req(cfg.beta2, "beta2")?);
    let spec = quartic_spectrum(a1, b1, a2, b2);
    let mut rep = Report::new();
    rep.line("command = spectrum");
    rep.line("characteristic quartic of the linear profile elimination");
    rep.kv("alpha1", a1);
    rep.kv("beta1", b1);
    rep.kv("alpha2", a2);
    rep.kv("beta2", b2);
    rep.kv("s1_mod", spec.s1_mod);
    rep.kv("s3_mod", spec.s3_mod);
    rep.kv_str("purely_imaginary", spec.purely_imaginary);
    rep.kv_str("degenerate", spec.degenerate);
    for (i, root) in spec.roots.iter().enumerate() {
        rep.kv_str(
            &format!("root{}", i + 1),
            format!(
                "({}, {})",
                crate::report::fmt_sig(root.re),
                crate::report::fmt_sig(root.im)
            ),
        );
    }
    ctx.finish(rep)
}

fn cmd_verify(ctx: &mut Ctx) -> Result<RunOutput> {
    let params = family_params_from(ctx.cfg)?;
    let family_no = params.id.number();
    let fam = build_family(params)?;
    let tsys = fam.transformed()?;
    let points = ctx.cfg.points.unwrap_or(100);
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed());
    let det = crate::families::verify_determining(&fam, &mut rng, points)?;
    let inv = crate::families::verify_invariance(&fam, &mut rng, points)?;
    let tol = ctx.tol(detcheck::default_tolerance(&fam.operator, &tsys));
    let pass = det <= tol && inv <= tol;
    let mut rep = Report::new();
    rep.line("command = verify-symmetry");
    rep.kv_str("family", family_no);
    rep.kv_str("points", points);
    rep.kv_str("seed", ctx.seed());
    rep.kv("max determining residual", det);
    rep.kv("max invariance residual", inv);
    rep.kv("tolerance", tol);
    rep.kv_str("result", if pass { "PASS" } else { "FAIL" });
    let out = ctx.finish(rep)?;
    if !pass {
        return Err(Error::ToleranceExceeded {
            what: "max symmetry residual".into(),
            value: det.max(inv),
            tol,
        });
    }
    Ok(out)
}

fn cmd_reduce(ctx: &mut Ctx) -> Result<RunOutput> {
    let cfg = ctx.cfg;
    let fam = req(cfg.family, "family")?;
    match fam {
        1 | 3 => {
            let p = solve_p_from(cfg)?;
            let mut rep = Report::new();
            rep.line("command = reduce");
            rep.kv_str("family", fam);
            rep.line("coefficient function p(x) solving p'' = p^2 + lambda p");
            rep.kv("lambda", p.lambda());
            rep.kv("x_min", p.span().0);
            rep.kv("x_max", p.span().1);
            rep.kv("defect (independent second difference)", p.defect_second_difference());
            if let Some(mut csv) = ctx.csv("p_function.csv", &["x", "p", "p_x", "p_xx"])? {
                let (ps, dps, dds) = p.curve().samples();
                for i in 0..ps.len() {
                    csv.row(&[p.curve().node(i), ps[i], dps[i], dds[i]])?;
                }
            }
            ctx.finish(rep)
        }
        5 => {
            let lin = lin_params_from(cfg)?;
            let (sys, fam_params) = crate::reduction::specialize_linear(&lin)?;
            let _ = &sys;
            let spec = quartic_spectrum(lin.alpha1, lin.beta1, lin.alpha2, lin.beta2);
            let (cf, cg) = reaction_coefficients(&lin);
            let mut rep = Report::new();
            rep.line("command = reduce");
            rep.line("family 5 linear specialization");
            rep.kv_str("omega exponent", crate::report::fmt_sig(fam_params.omega_exponent()));
            rep.line("first reaction term on {U, U^(k+1), V^(l+1), 1, U^(-k)}:");
            rep.kv("  coeff U", cf.linear);
            rep.kv("  coeff U^(k+1)", cf.u_power);
            rep.kv("  coeff V^(l+1)", cf.v_power);
            rep.kv("  coeff 1", cf.constant);
            rep.kv("  coeff U^(-k)", cf.inverse_power);
            rep.line("second reaction term on {V, U^(k+1), V^(l+1), 1, V^(-l)}:");
            rep.kv("  coeff V", cg.linear);
            rep.kv("  coeff U^(k+1)", cg.u_power);
            rep.kv("  coeff V^(l+1)", cg.v_power);
            rep.kv("  coeff 1", cg.constant);
            rep.kv("  coeff V^(-l)", cg.inverse_power);
            rep.kv("s1_mod", spec.s1_mod);
            rep.kv("s3_mod", spec.s3_mod);
            rep.kv_str("purely_imaginary", spec.purely_imaginary);
            if spec.purely_imaginary && !spec.degenerate {
                let amps = [
                    cfg.a1.unwrap_or(1.0),
                    cfg.a2.unwrap_or(0.0),
                    cfg.a3.unwrap_or(0.0),
                    cfg.a4.unwrap_or(0.0),
                ];
                let (phi, psi) = general_solution(&spec, lin.alpha1, lin.beta1, amps)?;
                let span = std::f64::consts::PI / spec.s1_mod;
                let n = cfg.n.unwrap_or(200);
                let mut worst = 0.0f64;
                let mut csv =
                    ctx.csv("profiles.csv", &["x", "phi", "psi", "res1", "res2"])?;
                use crate::eval::Profile;
                for i in 0..=n {
                    let x = span * i as f64 / n as f64;
                    let r1 =
                        phi.d2(x) - lin.alpha1 * phi.eval(x) - lin.beta1 * psi.eval(x);
                    let r2 =
                        psi.d2(x) - lin.alpha2 * phi.eval(x) - lin.beta2 * psi.eval(x);
                    worst = worst.max(r1.abs()).max(r2.abs());
                    if let Some(csv) = csv.as_mut() {
                        csv.row(&[x, phi.eval(x), psi.eval(x), r1, r2])?;
                    }
                }
                rep.kv("max profile residual", worst);
            } else {
                rep.line("closed-form profiles skipped: spectrum branch out of scope");
            }
            ctx.finish(rep)
        }
        _ => Err(Error::Config(
            "reduce supports families 1, 3 (coefficient equation) and 5 (linear specialization)"
                .into(),
        )),
    }
}

fn cmd_exact(ctx: &mut Ctx) -> Result<RunOutput> {
    let cfg = ctx.cfg;
    let sol = exact_from(cfg)?;
    let mut rep = Report::new();
    rep.line("command = exact");
    rep.kv_str("case", sol.case.label());
    rep.kv("interval x_lo", sol.x_lo);
    rep.kv("interval x_hi", sol.x_hi);
    rep.kv("interval length", sol.a());
    rep.kv("alpha2", sol.alpha2);
    rep.kv("s1_mod", sol.s1_mod);
    rep.kv("s3_mod", sol.s3_mod);
    if sol.case == SolutionCase::III {
        rep.kv_str("coupling_degenerate", sol.coupling_degenerate);
    }
    match sol.t_max() {
        Some(tm) => rep.kv("t_max", tm),
        None => rep.kv_str("t_max", "infinite"),
    }
    match sol.t_max_u() {
        Some(tm) => rep.kv("t_max_u", tm),
        None => rep.kv_str("t_max_u", "infinite"),
    }
    match sol.t_max_v() {
        Some(tm) => rep.kv("t_max_v", tm),
        None => rep.kv_str("t_max_v", "infinite"),
    }
    let (us, vs) = sol.steady_state()?;
    rep.kv("steady_state_u", us);
    rep.kv("steady_state_v", vs);
    let start = sol.evaluate(0.0, sol.x_lo)?;
    rep.kv("u_at_origin", start.u);
    rep.kv("v_at_origin", start.v);
    let fluxes = sol.neumann_residual(0.0)?;
    rep.kv("flux_u_left", fluxes[0]);
    rep.kv("flux_v_left", fluxes[1]);
    rep.kv("flux_u_right", fluxes[2]);
    rep.kv("flux_v_right", fluxes[3]);

    let mut t_end = cfg.t_end.unwrap_or(1.0);
    if let Some(tm) = sol.t_max() {
        t_end = t_end.min(0.95 * tm);
    }
    let times = cfg.samples.unwrap_or(3).max(1);
    let n = cfg.n.unwrap_or(200);
    if let Some(mut csv) = ctx.csv("exact.csv", &["t", "x", "U", "V"])? {
        for ti in 0..times {
            let t = if times == 1 {
                0.0
            } else {
                t_end * ti as f64 / (times - 1) as f64
            };
            for i in 0..=n {
                let x = sol.x_lo + sol.a() * i as f64 / n as f64;
                let jet = sol.evaluate(t, x)?;
                csv.row(&[t, x, jet.u, jet.v])?;
            }
        }
    }
    ctx.finish(rep)
}

fn cmd_intervals(ctx: &mut Ctx) -> Result<RunOutput> {
    let cfg = ctx.cfg;
    let case = req(cfg.case, "case")?;
    let count = cfg.count.unwrap_or(5);
    let (a1, b2) = (req(cfg.alpha1, "alpha1")?, req(cfg.beta2, "beta2")?);
    let spec = match case {
        SolutionCase::III => quartic_spectrum(a1, -1.0, 0.0, b2), // unused for case iii
        _ => quartic_spectrum(
            a1,
            req(cfg.beta1, "beta1")?,
            req(cfg.alpha2, "alpha2")?,
            b2,
        ),
    };
    let list = admissible_intervals(case, &spec, a1 + b2, count)?;
    let mut rep = Report::new();
    rep.line("command = intervals");
    rep.kv_str("case", case.label());
    rep.kv_str("count", count);
    for (idx, iv) in list.iter().enumerate() {
        match iv.j2 {
            Some(j2) => rep.kv_str(
                &format!("a[{}]", idx + 1),
                format!(
                    "{} (j1 = {}, j2 = {})",
                    crate::report::fmt_sig(iv.a),
                    iv.j1,
                    j2
                ),
            ),
            None => rep.kv_str(
                &format!("a[{}]", idx + 1),
                format!("{} (j1 = {})", crate::report::fmt_sig(iv.a), iv.j1),
            ),
        }
    }
    if let Some(mut csv) = ctx.csv("intervals.csv", &["index", "j1", "j2", "a"])? {
        for (idx, iv) in list.iter().enumerate() {
            csv.row(&[
                (idx + 1) as f64,
                iv.j1 as f64,
                iv.j2.map(|j| j as f64).unwrap_or(0.0),
                iv.a,
            ])?;
        }
    }
    ctx.finish(rep)
}

fn cmd_simulate(ctx: &mut Ctx) -> Result<RunOutput> {
    let cfg = ctx.cfg;
    let sol = exact_from(cfg)?;
    let sys = sol.system()?;
    let n = cfg.n.unwrap_or(200);
    let grid = pdesim::Grid1D::new(sol.a(), n)?.with_origin(sol.x_lo);
    let init = pdesim::init_from_exact(&sol, &grid)?;
    let t_end = req(cfg.t_end, "t_end")?;
    let samples = cfg.samples.unwrap_or(11);
    let traj = pdesim::simulate(&sys, init, &grid, cfg.dt, t_end, samples)?;

    let mut rep = Report::new();
    rep.line("command = simulate");
    rep.kv_str("case", sol.case.label());
    rep.kv_str("cells", n);
    rep.kv("interval length", sol.a());
    rep.kv_str("steps", traj.steps_taken);
    for w in &traj.warnings {
        rep.kv_str("warning", w);
    }
    let (us, vs) = sol.steady_state()?;
    for s in &traj.samples {
        let norms = pdesim::error_norms(&traj, &sol, &grid, s.t)?;
        let sup_u = s
            .u
            .iter()
            .map(|&u| (u - us).abs())
            .fold(0.0f64, f64::max);
        let sup_v = s
            .v
            .iter()
            .map(|&v| (v - vs).abs())
            .fold(0.0f64, f64::max);
        rep.kv_str(
            &format!("t = {}", crate::report::fmt_sig(s.t)),
            format!(
                "linf_error = {}, l2_error = {}, sup|U-U*| = {}, sup|V-V*| = {}, \
                 inhomogeneity_U = {}",
                crate::report::fmt_sig(norms.linf),
                crate::report::fmt_sig(norms.l2),
                crate::report::fmt_sig(sup_u),
                crate::report::fmt_sig(sup_v),
                crate::report::fmt_sig(pdesim::inhomogeneity_ratio(&s.u)),
            ),
        );
    }
    if let Some(mut csv) =
        ctx.csv("trajectory.csv", &["t", "x", "U", "V", "U_exact", "V_exact"])?
    {
        for s in &traj.samples {
            for i in 0..grid.node_count() {
                let x = grid.node(i);
                let jet = sol.evaluate(s.t, x)?;
                csv.row(&[s.t, x, s.u[i], s.v[i], jet.u, jet.v])?;
            }
        }
    }
    ctx.finish(rep)
}

fn cmd_residual(ctx: &mut Ctx) -> Result<RunOutput> {
    let cfg = ctx.cfg;
    let sol = exact_from(cfg)?;
    let sys = sol.system()?;
    let n = cfg.n.unwrap_or(100);
    let t = cfg.t_eval.unwrap_or(0.0);
    let coarse = pdesim::residual_on_grid(&sol, &sys, &pdesim::Grid1D::new(sol.a(), n)?.with_origin(sol.x_lo), t)?;
    let fine = pdesim::residual_on_grid(
        &sol,
        &sys,
        &pdesim::Grid1D::new(sol.a(), 2 * n)?.with_origin(sol.x_lo),
        t,
    )?;
    let order = (coarse / fine).log2();
    let mut rep = Report::new();
    rep.line("command = residual");
    rep.kv_str("case", sol.case.label());
    rep.kv("t", t);
    rep.kv_str("cells_coarse", n);
    rep.kv("defect_coarse", coarse);
    rep.kv_str("cells_fine", 2 * n);
    rep.kv("defect_fine", fine);
    rep.kv("observed_order", order);
    let out = ctx.finish(rep)?;
    if let Some(tol) = ctx.opts.tol.or(cfg.tol) {
        if fine > tol {
            return Err(Error::ToleranceExceeded {
                what: "grid defect".into(),
                value: fine,
                tol,
            });
        }
    }
    Ok(out)
}

fn cmd_convergence(ctx: &mut Ctx) -> Result<RunOutput> {
    let cfg = ctx.cfg;
    let sol = exact_from(cfg)?;
    let sys = sol.system()?;
    let base = cfg.n.unwrap_or(100);
    let t_eval = cfg.t_eval.unwrap_or(0.5);
    let levels = cfg.refinements.unwrap_or(2).clamp(2, 4);
    let mut rep = Report::new();
    rep.line("command = convergence");
    rep.kv_str("case", sol.case.label());
    rep.kv("t", t_eval);
    let mut errors = Vec::new();
    for lev in 0..levels {
        let n = base << lev;
        let grid = pdesim::Grid1D::new(sol.a(), n)?.with_origin(sol.x_lo);
        let init = pdesim::init_from_exact(&sol, &grid)?;
        let traj = pdesim::simulate(&sys, init, &grid, cfg.dt.map(|d| d / (1 << (2 * lev)) as f64), t_eval, 2)?;
        let norms = pdesim::error_norms(&traj, &sol, &grid, t_eval)?;
        rep.kv_str(
            &format!("n = {n}"),
            format!(
                "linf_error = {}, l2_error = {}",
                crate::report::fmt_sig(norms.linf),
                crate::report::fmt_sig(norms.l2)
            ),
        );
        errors.push(norms.linf);
    }
    for w in errors.windows(2) {
        rep.kv("observed_order", (w[0] / w[1]).log2());
    }
    ctx.finish(rep)
}
