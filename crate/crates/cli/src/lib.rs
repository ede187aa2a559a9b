//! Command-line front end. Every run is a [`JobConfig`]; subcommand flags are
//! layered over an optional `--job` file and the merged job is validated
//! before anything executes.
//!
//! Exit status: 0 success, 1 verification failure, 2 usage or I/O error.

pub mod figures;
pub mod job;

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use fraclie::calculus::{
    fractal_derivative, fractal_integral, solve_linear_fractal_ode, FractalFn,
};
use fraclie::cantor::{estimate_dimension, FractalSet, Interval, Normalization, Staircase};
use fraclie::expr::{is_zero, JetPoint, Poly};
use fraclie::io::{trajectory_table, Table};
use fraclie::symmetry::{
    closure_report, determining_residual, first_order_determining, noether_current, prolong,
    verify_candidate, worked, FractalOde, Generator, Lagrangian, ResidualOptions, SymmetryError,
};
use fraclie::Atom;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde_json::{json, Map, Value};
use thiserror::Error;

pub use job::{CommandKind, Format, GeneratorSpec, JobConfig, NormalizationArg};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn usage(e: impl std::fmt::Display) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "fraclie",
    version,
    about = "Fractal calculus on Cantor sets and Lie symmetries of fractal ODEs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,
    /// JSON job file; explicit flags override its fields.
    #[arg(long, global = true)]
    pub job: Option<PathBuf>,
    #[arg(long, global = true)]
    pub copies: Option<u32>,
    #[arg(long, global = true)]
    pub ratio: Option<f64>,
    #[arg(long, global = true)]
    pub depth: Option<u32>,
    #[arg(long, global = true, num_args = 2, value_names = ["C", "D"], allow_negative_numbers = true)]
    pub bounds: Option<Vec<f64>>,
    /// Staircase order; defaults to the similarity dimension of the set.
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub normalization: Option<NormalizationArg>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Intervals of the depth-n set.
    Set,
    /// `x, S(x)` at every interval endpoint.
    Staircase,
    /// ν-dimension estimate by measure-slope bisection.
    Dim,
    /// Numeric F^α-derivative of an expression in S(x) at left endpoints.
    Deriv {
        #[arg(long)]
        expr: Option<String>,
        #[arg(long)]
        window: Option<u32>,
        /// Random subset of this many left endpoints, drawn with `--seed`.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// F^α-integral of an expression in S(x).
    Integ {
        #[arg(long)]
        expr: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        from: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        to: Option<f64>,
    },
    /// Constant-coefficient linear fractal ODE `a_0 y + … + a_n y^(nα) = 0`.
    Ode {
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        coeffs: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        initial: Option<Vec<f64>>,
    },
    /// Determining-equation residuals of generators, or first-order candidates.
    Symcheck {
        /// Built-in scenario: oscillator, oscillator-v2 or first-order.
        #[arg(long)]
        example: Option<String>,
        #[arg(long)]
        ode: Option<String>,
        /// `xi;phi`, repeatable.
        #[arg(long = "generator", value_parser = parse_generator)]
        generators: Vec<GeneratorSpec>,
        #[arg(long)]
        off_shell: bool,
        #[arg(long)]
        chi: Option<f64>,
        /// Also report Lie-bracket closure of the generators.
        #[arg(long)]
        closure: bool,
    },
    /// Prolongation coefficients of `xi ∂x + phi ∂y`.
    Prolong {
        #[arg(long)]
        xi: Option<String>,
        #[arg(long)]
        phi: Option<String>,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Noether current along a solver trajectory.
    Noether {
        #[arg(long)]
        lagrangian: Option<String>,
        #[arg(long)]
        eta: Option<String>,
        #[arg(long)]
        gauge: Option<String>,
        /// Time translation in S(t): `J = p q^(α) - L`.
        #[arg(long)]
        energy: bool,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        coeffs: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        initial: Option<Vec<f64>>,
    },
    /// Figure data: 1, 2, 3 or 5.
    Figure {
        which: Option<u32>,
        /// Figure 1 with `sin(x) cos(y)` instead of the caption's `sin(2πx) cos(2πy)`.
        #[arg(long)]
        bodytext: bool,
    },
}

fn parse_generator(s: &str) -> Result<GeneratorSpec, String> {
    let (xi, phi) = s
        .split_once(';')
        .ok_or_else(|| format!("expected `xi;phi`, got `{s}`"))?;
    Ok(GeneratorSpec {
        name: None,
        xi: xi.trim().to_string(),
        phi: phi.trim().to_string(),
    })
}

impl Cli {
    /// Flags as a job layer; switches only count when set.
    fn to_job(&self) -> JobConfig {
        let mut j = JobConfig {
            copies: self.copies,
            ratio: self.ratio,
            depth: self.depth,
            bounds: self.bounds.as_ref().map(|b| [b[0], b[1]]),
            gamma: self.gamma,
            normalization: self.normalization,
            tol: self.tol,
            format: self.format,
            out: self.out.clone(),
            seed: self.seed,
            ..JobConfig::default()
        };
        let Some(cmd) = &self.command else { return j };
        j.command = Some(match cmd {
            Command::Set => CommandKind::Set,
            Command::Staircase => CommandKind::Staircase,
            Command::Dim => CommandKind::Dim,
            Command::Deriv {
                expr,
                window,
                samples,
            } => {
                (j.expr, j.window, j.samples) = (expr.clone(), *window, *samples);
                CommandKind::Deriv
            }
            Command::Integ { expr, from, to } => {
                (j.expr, j.from, j.to) = (expr.clone(), *from, *to);
                CommandKind::Integ
            }
            Command::Ode { coeffs, initial } => {
                (j.coeffs, j.initial) = (coeffs.clone(), initial.clone());
                CommandKind::Ode
            }
            Command::Symcheck {
                example,
                ode,
                generators,
                off_shell,
                chi,
                closure,
            } => {
                j.example = example.clone();
                j.ode = ode.clone();
                j.generators = (!generators.is_empty()).then(|| generators.clone());
                if *off_shell || chi.is_some() || *closure {
                    j.options = Some(job::SymcheckOptions {
                        on_shell: off_shell.then_some(false),
                        chi: *chi,
                        closure: closure.then_some(true),
                    });
                }
                CommandKind::Symcheck
            }
            Command::Prolong { xi, phi, order } => {
                (j.xi, j.phi, j.order) = (xi.clone(), phi.clone(), *order);
                CommandKind::Prolong
            }
            Command::Noether {
                lagrangian,
                eta,
                gauge,
                energy,
                coeffs,
                initial,
            } => {
                (j.lagrangian, j.eta, j.gauge) = (lagrangian.clone(), eta.clone(), gauge.clone());
                j.energy = energy.then_some(true);
                (j.coeffs, j.initial) = (coeffs.clone(), initial.clone());
                CommandKind::Noether
            }
            Command::Figure { which, bodytext } => {
                j.figure = *which;
                j.bodytext = bodytext.then_some(true);
                CommandKind::Figure
            }
        });
        j
    }

    /// Reads the job file, if any, and merges the flags over it.
    pub fn resolve(&self) -> Result<JobConfig, CliError> {
        let base = match &self.job {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                    path: path.clone(),
                    source,
                })?;
                JobConfig::from_json(&text).map_err(|e| match e {
                    CliError::Usage(m) => CliError::Usage(format!("{}: {m}", path.display())),
                    other => other,
                })?
            }
            None => JobConfig::default(),
        };
        base.overlay(self.to_job())
    }
}

/// Result of a job: the artifact text plus whether its checks passed.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub body: Option<String>,
    pub verified: bool,
    /// One-line summary for stderr.
    pub summary: String,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.verified {
            0
        } else {
            1
        }
    }
}

struct Env {
    set: FractalSet,
    staircase: Staircase,
    format: Format,
    seed: u64,
    metadata: Vec<(String, String)>,
}

const DEFAULT_DEPTH: u32 = 8;

fn env(job: &JobConfig, cmd: CommandKind) -> Result<Env, CliError> {
    let copies = job.copies.unwrap_or(2);
    let ratio = job.ratio.unwrap_or(1.0 / 3.0);
    let depth = job.depth.unwrap_or(DEFAULT_DEPTH);
    let [c, d] = job.bounds.unwrap_or([0.0, 1.0]);
    let set =
        FractalSet::build(copies, ratio, depth, Interval::new(c, d)).map_err(CliError::usage)?;
    let gamma = job
        .gamma
        .unwrap_or_else(|| set.similarity_dimension().min(1.0));
    let norm = job.normalization.unwrap_or(NormalizationArg::GammaFactor);
    let staircase =
        Staircase::new(&set, gamma, c, Normalization::from(norm)).map_err(CliError::usage)?;
    let symbolic = matches!(cmd, CommandKind::Symcheck | CommandKind::Prolong);
    let format = job
        .format
        .unwrap_or(if symbolic { Format::Json } else { Format::Csv });
    if symbolic && format == Format::Csv {
        return Err(CliError::Usage(format!(
            "{} produces a symbolic report; use --format json",
            cmd.name()
        )));
    }
    let seed = job.seed.unwrap_or(0);
    let norm_name = match norm {
        NormalizationArg::GammaFactor => "gamma-factor",
        NormalizationArg::Unit => "unit",
    };
    let metadata = vec![
        ("command".to_string(), cmd.name().to_string()),
        ("copies".into(), copies.to_string()),
        ("ratio".into(), ratio.to_string()),
        ("depth".into(), depth.to_string()),
        ("bounds".into(), format!("[{c}, {d}]")),
        ("gamma".into(), gamma.to_string()),
        (
            "normalization".into(),
            format!("{norm_name} ({})", staircase.normalization()),
        ),
        ("seed".into(), seed.to_string()),
    ];
    Ok(Env {
        set,
        staircase,
        format,
        seed,
        metadata,
    })
}

impl Env {
    fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    fn emit_table(&self, mut t: Table) -> String {
        let mut meta = self.metadata.clone();
        meta.append(&mut t.metadata);
        match self.format {
            Format::Csv => {
                t.metadata = meta;
                t.to_csv_string()
            }
            Format::Json => {
                let doc = json!({
                    "metadata": meta_object(&meta),
                    "columns": t.header,
                    "rows": t.rows,
                });
                serde_json::to_string_pretty(&doc).expect("finite table") + "\n"
            }
        }
    }

    fn emit_json(&self, mut doc: Map<String, Value>) -> String {
        doc.insert("metadata".into(), meta_object(&self.metadata));
        serde_json::to_string_pretty(&Value::Object(doc)).expect("report serializes") + "\n"
    }
}

fn meta_object(meta: &[(String, String)]) -> Value {
    Value::Object(
        meta.iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect(),
    )
}

fn parse_poly(text: &str, params: &[String], what: &str) -> Result<Poly, CliError> {
    let names: Vec<&str> = params.iter().map(String::as_str).collect();
    fraclie::expr::parse_with(text, &names, &[])
        .map(|e| e.to_poly())
        .map_err(|e| CliError::Usage(format!("{what}: {e}")))
}

/// A function of `S(x)` only, evaluated through the staircase.
fn staircase_fn(p: Poly, s: &Staircase, label: &str) -> Result<FractalFn, CliError> {
    if let Some(a) = p.atoms().into_iter().find(|a| *a != Atom::Sx) {
        return Err(CliError::Usage(format!(
            "expr may only depend on S(x), found {a}"
        )));
    }
    let s = s.clone();
    Ok(FractalFn::new(label, move |x| {
        p.eval(&JetPoint::new().with(Atom::Sx, s.value(x)))
            .unwrap_or(f64::NAN)
    }))
}

/// Validates and runs a merged job.
pub fn execute(job: &JobConfig) -> Result<Outcome, CliError> {
    let cmd = job.validate()?;
    let mut env = env(job, cmd)?;
    match cmd {
        CommandKind::Set => {
            let t = fraclie::io::set_table(&env.set);
            Ok(done(
                env.emit_table(Table {
                    metadata: Vec::new(),
                    ..t
                }),
                "set written",
            ))
        }
        CommandKind::Staircase => {
            let xs = env.set.endpoints();
            let t = fraclie::io::staircase_table(&env.staircase, &xs);
            Ok(done(
                env.emit_table(Table {
                    metadata: Vec::new(),
                    ..t
                }),
                "staircase written",
            ))
        }
        CommandKind::Dim => run_dim(&mut env, job),
        CommandKind::Deriv => run_deriv(&mut env, job),
        CommandKind::Integ => run_integ(&mut env, job),
        CommandKind::Ode => run_ode(&mut env, job),
        CommandKind::Symcheck => run_symcheck(&mut env, job),
        CommandKind::Prolong => run_prolong(&mut env, job),
        CommandKind::Noether => run_noether(&mut env, job),
        CommandKind::Figure => {
            let which = job.figure.expect("validated");
            let bodytext = job.bodytext.unwrap_or(false);
            env.meta("figure", which);
            env.meta("sampling", "left endpoints");
            if which == 1 {
                env.meta("bodytext", bodytext);
            }
            let t = figures::figure(which, &env.set, &env.staircase, bodytext)?;
            Ok(done(env.emit_table(t), &format!("figure {which} written")))
        }
    }
}

fn done(body: String, summary: &str) -> Outcome {
    Outcome {
        body: Some(body),
        verified: true,
        summary: summary.to_string(),
    }
}

fn run_dim(env: &mut Env, job: &JobConfig) -> Result<Outcome, CliError> {
    let tol = job.tol.unwrap_or(0.01);
    let b = env.set.bounds();
    let est = estimate_dimension(&env.set, b.lo, b.hi, tol).map_err(CliError::usage)?;
    env.meta("tol", format!("{tol:e}"));
    let mut t = Table::new(
        [
            "depth",
            "gamma_hat",
            "lower",
            "upper",
            "similarity_dimension",
        ]
        .map(String::from)
        .to_vec(),
    );
    t.rows.push(vec![
        env.set.depth() as f64,
        est.gamma,
        est.lower,
        est.upper,
        env.set.similarity_dimension(),
    ]);
    Ok(done(
        env.emit_table(t),
        &format!("gamma_hat = {:.6}", est.gamma),
    ))
}

fn run_deriv(env: &mut Env, job: &JobConfig) -> Result<Outcome, CliError> {
    let text = job.expr.as_deref().expect("validated");
    let f = staircase_fn(parse_poly(text, &[], "expr")?, &env.staircase, text)?;
    let window = job.window.unwrap_or(env.set.depth().max(12));
    let mut xs = env.set.left_endpoints();
    if let Some(n) = job.samples {
        let mut rng = StdRng::seed_from_u64(env.seed);
        xs = xs
            .choose_multiple(&mut rng, n.min(xs.len()))
            .copied()
            .collect();
        xs.sort_by(f64::total_cmp);
    }
    env.meta("expr", text);
    env.meta("window", window);
    env.meta("off_set", "derivative is 0 off the set and flagged");
    let mut t = Table::new(
        ["x", "S(x)", "f", "derivative", "error", "off_set"]
            .map(String::from)
            .to_vec(),
    );
    for x in xs {
        let d = fractal_derivative(&f, &env.staircase, x, window).map_err(CliError::usage)?;
        let err = if d.error.is_finite() { d.error } else { 0.0 };
        t.rows.push(vec![
            x,
            env.staircase.value(x),
            f.eval(x),
            d.value,
            err,
            f64::from(u8::from(d.off_set)),
        ]);
    }
    Ok(done(env.emit_table(t), "derivative samples written"))
}

fn run_integ(env: &mut Env, job: &JobConfig) -> Result<Outcome, CliError> {
    let text = job.expr.as_deref().expect("validated");
    let f = staircase_fn(parse_poly(text, &[], "expr")?, &env.staircase, text)?;
    let b = env.set.bounds();
    let (c, d) = (job.from.unwrap_or(b.lo), job.to.unwrap_or(b.hi));
    let est = fractal_integral(&f, &env.staircase, c, d).map_err(CliError::usage)?;
    env.meta("expr", text);
    env.meta("level", est.level);
    let mut t = Table::new(
        ["c", "d", "value", "lower", "upper"]
            .map(String::from)
            .to_vec(),
    );
    t.rows.push(vec![c, d, est.value, est.lower, est.upper]);
    Ok(done(
        env.emit_table(t),
        &format!("integral = {}", est.value),
    ))
}

fn trajectory(env: &Env, job: &JobConfig) -> Result<fraclie::Trajectory, CliError> {
    let coeffs = job.coeffs.as_deref().expect("validated");
    let initial = job.initial.as_deref().expect("validated");
    solve_linear_fractal_ode(coeffs, &env.staircase, initial, &env.set.endpoints())
        .map_err(CliError::usage)
}

fn run_ode(env: &mut Env, job: &JobConfig) -> Result<Outcome, CliError> {
    let traj = trajectory(env, job)?;
    env.meta(
        "initial",
        format!("{:?}", job.initial.as_deref().unwrap_or_default()),
    );
    Ok(done(
        env.emit_table(trajectory_table(&traj)),
        &format!("{} samples written", traj.len()),
    ))
}

const CONVENTION: &str = "eta1 = D phi - y^(α) D xi, etak = D eta(k-1) - y^(kα) D xi";

fn generator_from(spec: &GeneratorSpec, params: &[String]) -> Result<Generator, CliError> {
    let xi = parse_poly(&spec.xi, params, "xi")?;
    let phi = parse_poly(&spec.phi, params, "phi")?;
    Generator::new(xi, phi).map_err(CliError::usage)
}

fn run_symcheck(env: &mut Env, job: &JobConfig) -> Result<Outcome, CliError> {
    let params = job.params.clone().unwrap_or_default();
    let opts = job.options.clone().unwrap_or_default();
    let ro = ResidualOptions {
        on_shell: opts.on_shell.unwrap_or(true),
        chi: opts.chi.unwrap_or(1.0),
    };
    env.meta("prolongation", CONVENTION);
    env.meta("on_shell", ro.on_shell);
    env.meta("chi", ro.chi);

    let (ode, gens): (FractalOde, Vec<(String, Generator)>) =
        match (job.example.as_deref(), &job.ode) {
            (Some("first-order"), _) => return run_first_order_example(env),
            (Some(name @ ("oscillator" | "oscillator-v2")), _) => {
                let gens = if name == "oscillator" {
                    worked::oscillator_generators()
                } else {
                    worked::oscillator_v2_variants()
                };
                env.meta("example", name);
                (
                    worked::oscillator(),
                    gens.into_iter().map(|(n, g)| (n.to_string(), g)).collect(),
                )
            }
            (Some(other), _) => {
                return Err(CliError::Usage(format!(
                    "unknown example `{other}`; expected oscillator, oscillator-v2 or first-order"
                )))
            }
            (None, Some(text)) => {
                let mut ode = FractalOde::new(parse_poly(text, &params, "ode")?);
                if let Some(s) = &job.solved {
                    ode = ode
                        .with_solved_form(parse_poly(s, &params, "solved")?)
                        .map_err(CliError::usage)?;
                }
                let specs = job.generators.as_deref().unwrap_or_default();
                let gens = specs
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        Ok((
                            s.name.clone().unwrap_or_else(|| format!("V{}", i + 1)),
                            generator_from(s, &params)?,
                        ))
                    })
                    .collect::<Result<_, CliError>>()?;
                (ode, gens)
            }
            (None, None) => return run_first_order(env, job, &params),
        };

    let mut rows = Vec::new();
    let mut zero = 0;
    for (name, g) in &gens {
        let g = prolong(g, ode.order() as usize).map_err(CliError::usage)?;
        let r = match determining_residual(&ode, &g, ro) {
            Ok(r) => r,
            Err(SymmetryError::MissingSolvedForm) => {
                return Err(CliError::Usage(
                    "ode is not linear in its top derivative; give `solved`".into(),
                ))
            }
            Err(e) => return Err(CliError::usage(e)),
        };
        let ok = is_zero(&r);
        zero += usize::from(ok);
        rows.push(json!({
            "name": name,
            "xi": g.xi().to_string(),
            "phi": g.phi().to_string(),
            "etas": g.etas().iter().map(ToString::to_string).collect::<Vec<_>>(),
            "zero": ok,
            "residual": r.to_string(),
        }));
    }
    let total = gens.len();
    let summary = format!("{zero}/{total} residuals zero");
    let mut doc = Map::new();
    doc.insert("ode".into(), json!(ode.expr().to_string()));
    doc.insert(
        "solved_form".into(),
        json!(ode.solved_form().map(ToString::to_string)),
    );
    doc.insert("generators".into(), Value::Array(rows));
    doc.insert("summary".into(), json!(summary));
    if opts.closure.unwrap_or(false) {
        let gs: Vec<Generator> = gens.into_iter().map(|(_, g)| g).collect();
        doc.insert(
            "closure".into(),
            serde_json::to_value(closure_report(&gs)).expect("serializes"),
        );
    }
    Ok(Outcome {
        body: Some(env.emit_json(doc)),
        verified: zero == total,
        summary,
    })
}

fn run_first_order_example(env: &mut Env) -> Result<Outcome, CliError> {
    env.meta("example", "first-order");
    let f = worked::first_order_rhs();
    let xi = worked::first_order_xi();
    let cands = vec![
        (
            "printed".to_string(),
            xi.clone(),
            worked::first_order_h_printed(),
        ),
        (
            "sign-corrected".to_string(),
            xi,
            worked::first_order_h_corrected(),
        ),
    ];
    first_order_report(env, &f, cands)
}

fn run_first_order(env: &mut Env, job: &JobConfig, params: &[String]) -> Result<Outcome, CliError> {
    let spec = job.first_order.as_ref().expect("validated");
    let f = parse_poly(&spec.f, params, "f")?;
    let cands = spec
        .candidates
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let name = c
                .name
                .clone()
                .unwrap_or_else(|| format!("candidate{}", i + 1));
            Ok((
                name,
                parse_poly(&c.xi, params, "xi")?,
                parse_poly(&c.h, params, "h")?,
            ))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    first_order_report(env, &f, cands)
}

fn first_order_report(
    env: &mut Env,
    f: &Poly,
    cands: Vec<(String, Poly, Poly)>,
) -> Result<Outcome, CliError> {
    let sys = first_order_determining(f).map_err(CliError::usage)?;
    env.meta("ansatz", "xi = xi(x), phi = S(y) D xi + h(x)");
    let mut reports = Vec::new();
    let mut pass = 0;
    for (name, xi, h) in &cands {
        let r = verify_candidate(&sys, xi, h).map_err(CliError::usage)?;
        pass += usize::from(r.all_zero());
        let mut v = serde_json::to_value(&r).expect("serializes");
        v["name"] = json!(name);
        v["zero"] = json!(r.all_zero());
        reports.push(v);
    }
    let summary = format!("{pass}/{} candidates zero", cands.len());
    let mut doc = Map::new();
    doc.insert("f".into(), json!(f.to_string()));
    doc.insert(
        "determining".into(),
        json!([sys.first.to_string(), sys.second.to_string()]),
    );
    doc.insert("candidates".into(), Value::Array(reports));
    doc.insert("summary".into(), json!(summary));
    Ok(Outcome {
        body: Some(env.emit_json(doc)),
        verified: pass == cands.len(),
        summary,
    })
}

fn run_prolong(env: &mut Env, job: &JobConfig) -> Result<Outcome, CliError> {
    let params = job.params.clone().unwrap_or_default();
    let spec = GeneratorSpec {
        name: None,
        xi: job.xi.clone().expect("validated"),
        phi: job.phi.clone().expect("validated"),
    };
    let order = job.order.unwrap_or(2);
    if order == 0 {
        return Err(CliError::Usage("`order` must be at least 1".into()));
    }
    let g = prolong(&generator_from(&spec, &params)?, order).map_err(CliError::usage)?;
    env.meta("prolongation", CONVENTION);
    let mut doc = Map::new();
    doc.insert("xi".into(), json!(g.xi().to_string()));
    doc.insert("phi".into(), json!(g.phi().to_string()));
    doc.insert("order".into(), json!(order));
    doc.insert(
        "etas".into(),
        json!(g.etas().iter().map(ToString::to_string).collect::<Vec<_>>()),
    );
    doc.insert(
        "characteristic".into(),
        json!(g.characteristic().to_string()),
    );
    Ok(done(
        env.emit_json(doc),
        &format!("prolonged to order {order}"),
    ))
}

fn run_noether(env: &mut Env, job: &JobConfig) -> Result<Outcome, CliError> {
    let l = parse_poly(
        job.lagrangian.as_deref().expect("validated"),
        &[],
        "lagrangian",
    )?;
    let lag = if job.energy.unwrap_or(false) {
        if job.eta.is_some() || job.gauge.is_some() {
            return Err(CliError::Usage(
                "`energy` fixes eta and gauge; drop them".into(),
            ));
        }
        Lagrangian::energy(l)
    } else {
        let eta = parse_poly(job.eta.as_deref().unwrap_or("1"), &[], "eta")?;
        let gauge = parse_poly(job.gauge.as_deref().unwrap_or("0"), &[], "gauge")?;
        Lagrangian::with_gauge(l, eta, gauge)
    }
    .map_err(CliError::usage)?;
    let tol = job.tol.unwrap_or(1e-6);
    let traj = trajectory(env, job)?;
    env.meta("tol", format!("{tol:e}"));
    match noether_current(&lag, &traj, tol) {
        Ok(report) => {
            env.meta("current", &report.current_expr);
            env.meta("drift", format!("{:e}", report.drift));
            env.meta("spread", format!("{:e}", report.spread));
            env.meta(
                "euler_lagrange_residual",
                format!("{:e}", report.euler_lagrange_residual),
            );
            let verified = report.drift <= tol;
            let mut t = Table::new(["x", "S(x)", "J"].map(String::from).to_vec());
            t.rows = (0..traj.len())
                .map(|i| vec![traj.xs[i], traj.staircase[i], report.current.y()[i]])
                .collect();
            let summary = format!("J = {}, drift {:e}", report.current_expr, report.drift);
            Ok(Outcome {
                body: Some(env.emit_table(t)),
                verified,
                summary,
            })
        }
        Err(e @ SymmetryError::NonSolution { .. }) => Ok(Outcome {
            body: None,
            verified: false,
            summary: e.to_string(),
        }),
        Err(e) => Err(CliError::usage(e)),
    }
}

/// A closed pipe downstream is not an error.
fn write_stdout(body: &str) -> Result<(), CliError> {
    use std::io::Write;
    match std::io::stdout().lock().write_all(body.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io {
            path: "<stdout>".into(),
            source: e,
        }),
        _ => Ok(()),
    }
}

/// Parses arguments, runs, writes the artifact and returns the exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = cli.resolve().and_then(|job| {
        let outcome = execute(&job)?;
        if let Some(body) = &outcome.body {
            match &job.out {
                Some(path) => fs::write(path, body).map_err(|source| CliError::Io {
                    path: path.clone(),
                    source,
                })?,
                None => write_stdout(body)?,
            }
        }
        Ok(outcome)
    });
    match result {
        Ok(outcome) => {
            eprintln!("{}", outcome.summary);
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
