//! Line-oriented `key = value` run configuration.
//!
//! UTF-8 lines, `#` starts a comment, no sections. Unknown keys and
//! duplicate keys are errors; every parameter constraint the modules impose
//! is re-validated here with the source line in the diagnostic.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::exact::SolutionCase;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    VerifySymmetry,
    Reduce,
    Spectrum,
    Exact,
    Intervals,
    Simulate,
    Residual,
    Convergence,
}

impl Command {
    pub fn parse(s: &str) -> Option<Command> {
        Some(match s {
            "verify-symmetry" => Command::VerifySymmetry,
            "reduce" => Command::Reduce,
            "spectrum" => Command::Spectrum,
            "exact" => Command::Exact,
            "intervals" => Command::Intervals,
            "simulate" => Command::Simulate,
            "residual" => Command::Residual,
            "convergence" => Command::Convergence,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Command::VerifySymmetry => "verify-symmetry",
            Command::Reduce => "reduce",
            Command::Spectrum => "spectrum",
            Command::Exact => "exact",
            Command::Intervals => "intervals",
            Command::Simulate => "simulate",
            Command::Residual => "residual",
            Command::Convergence => "convergence",
        }
    }
}

/// Reaction-function selector for the pluggable f, g slots.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FnSpec {
    Zero,
    /// a z + b
    Linear(f64, f64),
    /// the rational selector of the linear reduction; the coefficients come
    /// from alpha1/beta1 (for f) or alpha2/beta2 (for g)
    Reduction,
}

/// Fully validated run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub family: Option<u8>,
    pub case: Option<SolutionCase>,
    pub k: Option<f64>,
    pub l: Option<f64>,
    pub lambda: Option<f64>,
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub lambda3: Option<f64>,
    pub lambda4: Option<f64>,
    pub alpha1: Option<f64>,
    pub alpha2: Option<f64>,
    pub beta1: Option<f64>,
    pub beta2: Option<f64>,
    pub r: Option<f64>,
    pub a1: Option<f64>,
    pub a2: Option<f64>,
    pub a3: Option<f64>,
    pub a4: Option<f64>,
    pub j1: Option<u32>,
    pub j2: Option<u32>,
    pub count: Option<usize>,
    pub n: Option<usize>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub t_eval: Option<f64>,
    pub samples: Option<usize>,
    pub refinements: Option<usize>,
    pub p0: Option<f64>,
    pub p0_prime: Option<f64>,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub step: Option<f64>,
    pub points: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub out: Option<String>,
    pub f: Option<FnSpec>,
    pub g: Option<FnSpec>,
}

const KNOWN_KEYS: &[&str] = &[
    "command",
    "family",
    "case",
    "k",
    "l",
    "lambda",
    "lambda1",
    "lambda2",
    "lambda3",
    "lambda4",
    "alpha1",
    "alpha2",
    "beta1",
    "beta2",
    "r",
    "a1",
    "a2",
    "a3",
    "a4",
    "j1",
    "j2",
    "count",
    "n",
    "dt",
    "t_end",
    "t_eval",
    "samples",
    "refinements",
    "p0",
    "p0_prime",
    "x_min",
    "x_max",
    "step",
    "points",
    "seed",
    "tol",
    "out",
    "f",
    "g",
];

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64> {
    let x: f64 = value.parse().map_err(|_| Error::ConfigSyntax {
        line,
        msg: format!("key `{key}`: `{value}` is not a number"),
    })?;
    if !x.is_finite() {
        return Err(Error::ConfigSyntax {
            line,
            msg: format!("key `{key}`: value must be finite"),
        });
    }
    Ok(x)
}

fn parse_usize(line: usize, key: &str, value: &str) -> Result<usize> {
    value.parse().map_err(|_| Error::ConfigSyntax {
        line,
        msg: format!("key `{key}`: `{value}` is not a non-negative integer"),
    })
}

fn parse_u32(line: usize, key: &str, value: &str) -> Result<u32> {
    value.parse().map_err(|_| Error::ConfigSyntax {
        line,
        msg: format!("key `{key}`: `{value}` is not a non-negative integer"),
    })
}

fn parse_fnspec(line: usize, key: &str, value: &str) -> Result<FnSpec> {
    let mut parts = value.split_whitespace();
    match parts.next() {
        Some("zero") => Ok(FnSpec::Zero),
        Some("linear") => {
            let a = parts.next().ok_or_else(|| Error::ConfigSyntax {
                line,
                msg: format!("key `{key}`: `linear` needs two coefficients"),
            })?;
            let b = parts.next().ok_or_else(|| Error::ConfigSyntax {
                line,
                msg: format!("key `{key}`: `linear` needs two coefficients"),
            })?;
            Ok(FnSpec::Linear(
                parse_f64(line, key, a)?,
                parse_f64(line, key, b)?,
            ))
        }
        Some("reduction") => Ok(FnSpec::Reduction),
        _ => Err(Error::ConfigSyntax {
            line,
            msg: format!(
                "key `{key}`: expected `zero`, `linear <a> <b>` or `reduction`, got `{value}`"
            ),
        }),
    }
}

/// Parse and validate a configuration text.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut entries: HashMap<String, (usize, String)> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let eq = line.find('=').ok_or_else(|| Error::ConfigSyntax {
            line: line_no,
            msg: format!("expected `key = value`, got `{line}`"),
        })?;
        let key = line[..eq].trim().to_string();
        let value = line[eq + 1..].trim().to_string();
        if key.is_empty() {
            return Err(Error::ConfigSyntax {
                line: line_no,
                msg: "empty key".into(),
            });
        }
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(Error::UnknownKey { line: line_no, key });
        }
        if value.is_empty() {
            return Err(Error::ConfigSyntax {
                line: line_no,
                msg: format!("key `{key}` has an empty value"),
            });
        }
        if entries.contains_key(&key) {
            return Err(Error::DuplicateKey { line: line_no, key });
        }
        entries.insert(key, (line_no, value));
    }

    let take = |key: &str| entries.get(key).cloned();

    let (cmd_line, cmd_value) = take("command").ok_or(Error::MissingKey("command"))?;
    let command = Command::parse(&cmd_value).ok_or_else(|| Error::ConfigSyntax {
        line: cmd_line,
        msg: format!("unknown command `{cmd_value}`"),
    })?;

    let mut cfg = RunConfig {
        command,
        family: None,
        case: None,
        k: None,
        l: None,
        lambda: None,
        lambda1: None,
        lambda2: None,
        lambda3: None,
        lambda4: None,
        alpha1: None,
        alpha2: None,
        beta1: None,
        beta2: None,
        r: None,
        a1: None,
        a2: None,
        a3: None,
        a4: None,
        j1: None,
        j2: None,
        count: None,
        n: None,
        dt: None,
        t_end: None,
        t_eval: None,
        samples: None,
        refinements: None,
        p0: None,
        p0_prime: None,
        x_min: None,
        x_max: None,
        step: None,
        points: None,
        seed: None,
        tol: None,
        out: None,
        f: None,
        g: None,
    };

    for (key, (line, value)) in &entries {
        let line = *line;
        match key.as_str() {
            "command" => {}
            "family" => {
                let fam = parse_u32(line, key, value)? as u8;
                if !(1..=5).contains(&fam) {
                    return Err(Error::ConfigSyntax {
                        line,
                        msg: format!("family must be 1..5, got {fam}"),
                    });
                }
                cfg.family = Some(fam);
            }
            "case" => {
                cfg.case = Some(SolutionCase::parse(value).ok_or_else(|| Error::ConfigSyntax {
                    line,
                    msg: format!("case must be i, ii or iii, got `{value}`"),
                })?);
            }
            "k" => cfg.k = Some(parse_f64(line, key, value)?),
            "l" => cfg.l = Some(parse_f64(line, key, value)?),
            "lambda" => cfg.lambda = Some(parse_f64(line, key, value)?),
            "lambda1" => cfg.lambda1 = Some(parse_f64(line, key, value)?),
            "lambda2" => cfg.lambda2 = Some(parse_f64(line, key, value)?),
            "lambda3" => cfg.lambda3 = Some(parse_f64(line, key, value)?),
            "lambda4" => cfg.lambda4 = Some(parse_f64(line, key, value)?),
            "alpha1" => cfg.alpha1 = Some(parse_f64(line, key, value)?),
            "alpha2" => cfg.alpha2 = Some(parse_f64(line, key, value)?),
            "beta1" => cfg.beta1 = Some(parse_f64(line, key, value)?),
            "beta2" => cfg.beta2 = Some(parse_f64(line, key, value)?),
            "r" => cfg.r = Some(parse_f64(line, key, value)?),
            "a1" => cfg.a1 = Some(parse_f64(line, key, value)?),
            "a2" => cfg.a2 = Some(parse_f64(line, key, value)?),
            "a3" => cfg.a3 = Some(parse_f64(line, key, value)?),
            "a4" => cfg.a4 = Some(parse_f64(line, key, value)?),
            "j1" => cfg.j1 = Some(parse_u32(line, key, value)?),
            "j2" => cfg.j2 = Some(parse_u32(line, key, value)?),
            "count" => cfg.count = Some(parse_usize(line, key, value)?),
            "n" => cfg.n = Some(parse_usize(line, key, value)?),
            "dt" => cfg.dt = Some(parse_f64(line, key, value)?),
            "t_end" => cfg.t_end = Some(parse_f64(line, key, value)?),
            "t_eval" => cfg.t_eval = Some(parse_f64(line, key, value)?),
            "samples" => cfg.samples = Some(parse_usize(line, key, value)?),
            "refinements" => cfg.refinements = Some(parse_usize(line, key, value)?),
            "p0" => cfg.p0 = Some(parse_f64(line, key, value)?),
            "p0_prime" => cfg.p0_prime = Some(parse_f64(line, key, value)?),
            "x_min" => cfg.x_min = Some(parse_f64(line, key, value)?),
            "x_max" => cfg.x_max = Some(parse_f64(line, key, value)?),
            "step" => cfg.step = Some(parse_f64(line, key, value)?),
            "points" => cfg.points = Some(parse_usize(line, key, value)?),
            "seed" => {
                cfg.seed = Some(value.parse().map_err(|_| Error::ConfigSyntax {
                    line,
                    msg: format!("key `seed`: `{value}` is not an unsigned integer"),
                })?)
            }
            "tol" => {
                let t = parse_f64(line, key, value)?;
                if !(t > 0.0) {
                    return Err(Error::ConfigSyntax {
                        line,
                        msg: "tolerance must be positive".into(),
                    });
                }
                cfg.tol = Some(t);
            }
            "out" => cfg.out = Some(value.clone()),
            "f" => cfg.f = Some(parse_fnspec(line, key, value)?),
            "g" => cfg.g = Some(parse_fnspec(line, key, value)?),
            _ => unreachable!("key list is exhaustive"),
        }
    }

    validate(&cfg, &entries)?;
    Ok(cfg)
}

fn line_of(entries: &HashMap<String, (usize, String)>, key: &str) -> usize {
    entries.get(key).map(|(l, _)| *l).unwrap_or(0)
}

/// Cross-field constraint validation with source locations.
fn validate(cfg: &RunConfig, entries: &HashMap<String, (usize, String)>) -> Result<()> {
    if let Some(fam) = cfg.family {
        match fam {
            1 | 3 => {
                // p == 0 (identically) iff both initial values vanish
                if cfg.p0 == Some(0.0) && cfg.p0_prime == Some(0.0) {
                    return Err(Error::ConfigSyntax {
                        line: line_of(entries, "p0"),
                        msg: format!("family {fam} restriction violated: p != 0"),
                    });
                }
            }
            2 => {
                if cfg.lambda2 == Some(0.0) {
                    return Err(Error::ConfigSyntax {
                        line: line_of(entries, "lambda2"),
                        msg: "family 2 restriction violated: lambda2 != 0".into(),
                    });
                }
                if cfg.lambda1 == Some(0.0) && cfg.l == Some(0.0) {
                    return Err(Error::ConfigSyntax {
                        line: line_of(entries, "lambda1"),
                        msg: "family 2 restriction violated: lambda1^2 + l^2 != 0".into(),
                    });
                }
            }
            4 => {
                if cfg.lambda2 == Some(0.0) {
                    return Err(Error::ConfigSyntax {
                        line: line_of(entries, "lambda2"),
                        msg: "family 4 restriction violated: lambda2 != 0".into(),
                    });
                }
            }
            5 => {
                if cfg.lambda2 == Some(0.0) || cfg.lambda4 == Some(0.0) {
                    let key = if cfg.lambda2 == Some(0.0) {
                        "lambda2"
                    } else {
                        "lambda4"
                    };
                    return Err(Error::ConfigSyntax {
                        line: line_of(entries, key),
                        msg: "family 5 restriction violated: lambda2 * lambda4 != 0".into(),
                    });
                }
            }
            _ => {}
        }
    }
    for (key, value) in [("k", cfg.k), ("l", cfg.l)] {
        if let Some(v) = value {
            if (v + 1.0).abs() < 1e-12 {
                return Err(Error::ConfigSyntax {
                    line: line_of(entries, key),
                    msg: format!("restriction violated: {key} != -1 (power substitution)"),
                });
            }
        }
    }
    if cfg.beta1 == Some(0.0) {
        return Err(Error::ConfigSyntax {
            line: line_of(entries, "beta1"),
            msg: "elimination restriction violated: beta1 != 0".into(),
        });
    }
    if let Some(n) = cfg.n {
        if n < 8 {
            return Err(Error::ConfigSyntax {
                line: line_of(entries, "n"),
                msg: format!("cell count must be at least 8, got {n}"),
            });
        }
    }
    for (key, value) in [("dt", cfg.dt), ("step", cfg.step)] {
        if let Some(v) = value {
            if !(v > 0.0) {
                return Err(Error::ConfigSyntax {
                    line: line_of(entries, key),
                    msg: format!("{key} must be positive"),
                });
            }
        }
    }
    if let Some(t) = cfg.t_end {
        if t < 0.0 {
            return Err(Error::ConfigSyntax {
                line: line_of(entries, "t_end"),
                msg: "t_end must be non-negative".into(),
            });
        }
    }
    for (key, value) in [("j1", cfg.j1), ("j2", cfg.j2)] {
        if value == Some(0) {
            return Err(Error::ConfigSyntax {
                line: line_of(entries, key),
                msg: format!("{key} must be a positive mode index"),
            });
        }
    }
    if cfg.count == Some(0) {
        return Err(Error::ConfigSyntax {
            line: line_of(entries, "count"),
            msg: "count must be positive".into(),
        });
    }
    Ok(())
}
