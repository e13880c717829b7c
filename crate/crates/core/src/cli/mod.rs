//! The `chemdyn` command line.
//!
//! Exit codes: 0 success (or "chemical"), 1 a semantic negative (non-chemical
//! system, infeasible plan, diverged run), 2 usage or parse errors.

pub mod reproduce;

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::catalog;
use crate::crn::{canonical_crn, crn_complexity, crn_to_cds, fuse, Crn};
use crate::error::{Error, Result};
use crate::lce::{default_tau, lce_qr, LceOptions};
use crate::polysys::PolySystem;
use crate::qcm::{normalize_leading, quadratic_case_plan, ConstraintStatus, PlanFile, QcmPlan};
use crate::rational::{format_rational, parse_rational, qi, to_f64, Q};
use crate::sim::{find_equilibria, integrate, IntegratorOptions, NewtonOptions};

/// Environment variable bounding the worker threads of `reproduce`.
pub const THREADS_ENV: &str = "CHEMDYN_THREADS";

#[derive(Parser, Debug)]
#[command(name = "chemdyn", version, about = "Polynomial ODEs, quasi-chemical maps, reaction networks and Lyapunov exponents")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the catalog.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Print a system file, plus both reaction networks for chemical systems.
    Show {
        #[command(flatten)]
        input: Input,
        /// Write system.json (and canonical.crn, fused.crn) here instead.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Chemicality verdict and complexity label; exit 0 iff chemical.
    Check {
        #[command(flatten)]
        input: Input,
    },
    /// Run a quasi-chemical map.
    Transform(TransformArgs),
    /// Compile a chemical system to its canonical (or fused) network, or
    /// read a network back into a system.
    Crn(CrnArgs),
    /// Integrate and write a `t,x1,...,xN` CSV.
    Simulate {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        run: RunOpts,
        #[arg(long, default_value_t = 1000.0)]
        t_end: f64,
        #[arg(long, default_value_t = 10001)]
        samples: usize,
    },
    /// Finite-time Lyapunov exponents; CSV `t,lambda1,...` plus a summary line.
    Lce {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        run: RunOpts,
        #[arg(long, default_value_t = 1e4)]
        t_end: f64,
        /// Re-orthonormalization interval; defaults to 0.5/(1 + ρ(∇f(x0))/10).
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        transient: f64,
        /// `|λ|` below this counts as zero in the summary.
        #[arg(long, default_value_t = 0.01)]
        zero_tol: f64,
    },
    /// Regenerate the data behind a figure (fig1..fig5, or all).
    Reproduce {
        figure: String,
        #[arg(long)]
        out: PathBuf,
        /// Short runs, for smoke tests.
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        lce_t_end: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
}

/// A system from the catalog or from a file.
#[derive(Args, Debug, Clone)]
pub struct Input {
    #[arg(long, required_unless_present = "file", conflicts_with = "file")]
    pub id: Option<String>,
    /// System file (JSON).
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// ε for parametric catalog entries (decimal or p/q).
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long)]
    pub mu: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct RunOpts {
    /// Initial condition, comma separated; defaults to the figure's.
    #[arg(long, allow_hyphen_values = true)]
    pub ic: Option<String>,
    /// Defaults to min(1e-9, 1e-3/max(1, ‖x0‖∞)).
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long, default_value_t = 1e-12)]
    pub atol: f64,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    /// Stored construction of a catalog entry, or the base for --universal/--quadratic.
    #[arg(long, conflicts_with = "plan")]
    pub id: Option<String>,
    #[arg(long, conflicts_with_all = ["plan", "id"])]
    pub file: Option<PathBuf>,
    /// Plan file (JSON).
    #[arg(long)]
    pub plan: Option<PathBuf>,
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long)]
    pub mu: Option<String>,
    /// Universal construction with translation numerators --a.
    #[arg(long, conflicts_with = "quadratic")]
    pub universal: bool,
    /// Quadratic-case construction after normalizing the leading monomial.
    #[arg(long)]
    pub quadratic: bool,
    /// Translation numerators, comma separated.
    #[arg(long)]
    pub a: Option<String>,
    /// Write perturbed/translated/rescaled system files, the plan and the
    /// constraint table here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the plan as JSON and stop.
    #[arg(long)]
    pub emit_plan: bool,
    /// Also search equilibria of the perturbed system in [-R, R]^N.
    #[arg(long, value_name = "R")]
    pub equilibria: Option<f64>,
}

#[derive(Args, Debug)]
pub struct CrnArgs {
    #[arg(long, conflicts_with_all = ["file", "reactions"])]
    pub id: Option<String>,
    #[arg(long, conflicts_with = "reactions")]
    pub file: Option<PathBuf>,
    /// Reaction file to read back into a system (needs --species).
    #[arg(long, requires = "species")]
    pub reactions: Option<PathBuf>,
    /// Species names, comma separated.
    #[arg(long)]
    pub species: Option<String>,
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long)]
    pub mu: Option<String>,
    #[arg(long)]
    pub fused: bool,
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct Exit {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Exit {
    fn from(e: Error) -> Self {
        Exit { code: exit_code(&e), message: e.to_string() }
    }
}

impl From<std::io::Error> for Exit {
    fn from(e: std::io::Error) -> Self {
        // a closed pipe downstream (`| head`) is not worth reporting
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return Exit { code: 0, message: String::new() };
        }
        Exit::from(Error::from(e))
    }
}

fn negative(message: impl Into<String>) -> Exit {
    Exit { code: 1, message: message.into() }
}

fn usage(message: impl Into<String>) -> Exit {
    Exit { code: 2, message: message.into() }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotChemical { .. } | Error::RankCollapse { .. } => 1,
        _ => 2,
    }
}

/// Worker threads: `CHEMDYN_THREADS` if set to a positive integer, else the
/// available parallelism.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            if !e.message.is_empty() {
                let _ = writeln!(err, "error: {}", e.message);
            }
            e.code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Exit> {
    match cmd {
        Command::List { json } => cmd_list(json, out),
        Command::Show { input, out: dir } => cmd_show(&input, dir.as_deref(), out),
        Command::Check { input } => cmd_check(&input, out),
        Command::Transform(args) => cmd_transform(&args, out),
        Command::Crn(args) => cmd_crn(&args, out),
        Command::Simulate { input, run, t_end, samples } => cmd_simulate(&input, &run, t_end, samples, out, err),
        Command::Lce { input, run, t_end, tau, transient, zero_tol } => {
            cmd_lce(&input, &run, t_end, tau, transient, zero_tol, out, err)
        }
        Command::Reproduce { figure, out: dir, quick, t_end, lce_t_end, samples } => {
            let mut cfg = if quick { reproduce::Settings::quick() } else { reproduce::Settings::default() };
            cfg.t_end = t_end.unwrap_or(cfg.t_end);
            cfg.lce_t_end = lce_t_end.unwrap_or(cfg.lce_t_end);
            cfg.samples = samples.unwrap_or(cfg.samples);
            let figs = reproduce::figures(&figure)?;
            for fig in figs {
                let m = reproduce::reproduce(fig, &cfg, &dir, thread_count())?;
                writeln!(out, "{}: {} files in {}", fig, m.files.len(), dir.join(fig).display())?;
                for f in m.files.iter().filter(|f| f.divergence.is_some()) {
                    writeln!(err, "warning: {} stopped early", f.file)?;
                }
            }
            Ok(0)
        }
    }
}

/// A loaded system and where it came from.
pub struct Loaded {
    pub name: String,
    pub id: Option<String>,
    pub system: PolySystem,
    pub params: Option<(Q, Q)>,
}

fn parse_opt_q(s: &Option<String>) -> Result<Option<Q>> {
    s.as_deref().map(parse_rational).transpose()
}

/// `(ε, μ)` for a catalog id: the given values, falling back to the defaults.
pub fn resolve_params(id: &str, eps: &Option<String>, mu: &Option<String>) -> Result<Option<(Q, Q)>> {
    let (e, m) = (parse_opt_q(eps)?, parse_opt_q(mu)?);
    match catalog::default_params(id)? {
        Some((de, dm)) => Ok(Some((e.unwrap_or(de), m.unwrap_or(dm)))),
        None if e.is_some() || m.is_some() => Err(Error::Argument(format!("`{id}` takes no parameters"))),
        None => Ok(None),
    }
}

fn load_id(id: &str, eps: &Option<String>, mu: &Option<String>) -> Result<Loaded> {
    let params = resolve_params(id, eps, mu)?;
    let system = match &params {
        Some((e, m)) => catalog::instantiate(id, e, m)?,
        None => catalog::instantiate_default(id)?,
    };
    Ok(Loaded { name: id.to_string(), id: Some(id.to_string()), system, params })
}

fn load_file(path: &Path) -> Result<Loaded> {
    Ok(Loaded { name: path.display().to_string(), id: None, system: PolySystem::read(path)?, params: None })
}

pub fn load(input: &Input) -> Result<Loaded> {
    match (&input.id, &input.file) {
        (Some(id), _) => load_id(id, &input.eps, &input.mu),
        (None, Some(path)) => {
            if input.eps.is_some() || input.mu.is_some() {
                return Err(Error::Argument("--eps/--mu only apply to catalog ids".into()));
            }
            load_file(path)
        }
        (None, None) => Err(Error::Argument("need --id or --file".into())),
    }
}

fn parse_list(s: &str) -> Result<Vec<Q>> {
    s.split(',').map(parse_rational).collect()
}

fn initial_condition(l: &Loaded, ic: &Option<String>) -> Result<Vec<f64>> {
    let x0 = match (ic, &l.id) {
        (Some(s), _) => parse_list(s)?.iter().map(to_f64).collect(),
        (None, Some(id)) => {
            let (e, m) = l.params.clone().unwrap_or((qi(1), qi(1)));
            catalog::figure_ic_f64(id, &e, &m)?
                .ok_or_else(|| Error::Argument(format!("`{id}` has no stored initial condition; pass --ic")))?
        }
        (None, None) => return Err(Error::Argument("pass --ic".into())),
    };
    if x0.len() != l.system.dim() {
        return Err(Error::Dimension { expected: l.system.dim(), got: x0.len() });
    }
    Ok(x0)
}

fn integrator_options(run: &RunOpts, x0: &[f64]) -> Result<IntegratorOptions> {
    let mut o = IntegratorOptions::scaled_for(x0);
    if let Some(r) = run.rtol {
        o.rtol = r;
    }
    o.atol = run.atol;
    if !(o.rtol > 0.0 && o.atol > 0.0) {
        return Err(Error::Argument("tolerances must be positive".into()));
    }
    Ok(o)
}

fn emit(path: &Option<PathBuf>, text: &str, out: &mut dyn Write) -> Result<(), Exit> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_list(json: bool, out: &mut dyn Write) -> Result<i32, Exit> {
    let entries = catalog::ids().into_iter().map(catalog::get).collect::<Result<Vec<_>>>()?;
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&entries).map_err(Error::from)?)?;
        return Ok(0);
    }
    for e in entries {
        let chem = if e.expected.chemical { "chemical" } else { "non-chemical" };
        writeln!(out, "{:<20} {:<10} {:<13} {}", e.id, e.expected.label, chem, e.summary)?;
    }
    Ok(0)
}

fn crn_pair(s: &PolySystem) -> Result<(Crn, Crn)> {
    let c = canonical_crn(s)?;
    let f = fuse(&c)?;
    Ok((c, f))
}

fn cmd_show(input: &Input, dir: Option<&Path>, out: &mut dyn Write) -> Result<i32, Exit> {
    let l = load(input)?;
    let crns = if l.system.is_chemical().0 { Some(crn_pair(&l.system)?) } else { None };
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir)?;
        l.system.write(&dir.join("system.json"))?;
        writeln!(out, "{}", dir.join("system.json").display())?;
        if let Some((c, f)) = &crns {
            for (name, n) in [("canonical.crn", c), ("fused.crn", f)] {
                std::fs::write(dir.join(name), n.render())?;
                writeln!(out, "{}", dir.join(name).display())?;
            }
        }
        return Ok(0);
    }
    writeln!(out, "{}", l.system.to_json())?;
    if let Some((c, f)) = &crns {
        writeln!(out, "# canonical CRN {}", crn_complexity(c).label())?;
        write!(out, "{}", c.render())?;
        writeln!(out, "# fused CRN {}", crn_complexity(f).label())?;
        write!(out, "{}", f.render())?;
    }
    Ok(0)
}

fn cmd_check(input: &Input, out: &mut dyn Write) -> Result<i32, Exit> {
    let l = load(input)?;
    let (chem, violations) = l.system.is_chemical();
    writeln!(out, "system: {}", l.name)?;
    writeln!(out, "complexity: {}", l.system.complexity().label())?;
    writeln!(out, "chemical: {}", if chem { "yes" } else { "no" })?;
    for v in &violations {
        writeln!(out, "violation: equation {}: {}", v.equation + 1, v.monomial.text(l.system.vars()))?;
    }
    Ok(if chem { 0 } else { 1 })
}

fn build_plan(args: &TransformArgs) -> Result<(QcmPlan, Option<String>)> {
    if let Some(path) = &args.plan {
        let text = std::fs::read_to_string(path)?;
        let plan = PlanFile::from_json(&text)?.into_plan(catalog::instantiate)?;
        return Ok((plan, None));
    }
    let loaded = match (&args.id, &args.file) {
        (Some(id), _) if !args.universal && !args.quadratic => {
            let (e, m) = resolve_params(id, &args.eps, &args.mu)?
                .ok_or_else(|| Error::Argument(format!("`{id}` has no stored construction")))?;
            let plan = catalog::plan(id, &e, &m)?
                .ok_or_else(|| Error::Argument(format!("`{id}` has no stored construction")))?;
            let base = catalog::get(id)?.base.map(str::to_string);
            return Ok((plan, base));
        }
        (Some(id), _) => load_id(id, &None, &None)?,
        (None, Some(path)) => load_file(path)?,
        (None, None) => return Err(Error::Argument("need --plan, --id or --file".into())),
    };
    let a = args.a.as_deref().map(parse_list).transpose()?;
    let mu = parse_opt_q(&args.mu)?.ok_or_else(|| Error::Argument("--mu is required".into()))?;
    if args.universal {
        let a = a.ok_or_else(|| Error::Argument("--a is required".into()))?;
        return Ok((QcmPlan::universal(loaded.system, a, mu)?, None));
    }
    let eps = parse_opt_q(&args.eps)?.ok_or_else(|| Error::Argument("--eps is required".into()))?;
    let (normalized, _, _) = normalize_leading(&loaded.system)?;
    let a = a.unwrap_or_else(|| vec![qi(1); normalized.dim()]);
    Ok((quadratic_case_plan(&normalized, eps, mu, a)?, None))
}

fn constraints_csv(report: &crate::qcm::QcmReport, vars: &[String]) -> String {
    let mut s = String::from("equation,piece,constraint,index,strict,lhs,rhs,margin,status\n");
    for c in &report.constraints {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{:?}",
            c.equation + 1,
            c.piece + 1,
            c.name,
            c.index.map_or(String::new(), |j| vars[j].clone()),
            c.strict,
            format_rational(&c.lhs),
            format_rational(&c.rhs),
            format_rational(&c.margin),
            c.status
        )
        .unwrap();
    }
    s
}

fn cmd_transform(args: &TransformArgs, out: &mut dyn Write) -> Result<i32, Exit> {
    let (plan, base_id) = build_plan(args)?;
    let file = PlanFile::from_plan(&plan, base_id.as_deref());
    if args.emit_plan {
        writeln!(out, "{}", file.to_json())?;
        return Ok(0);
    }
    let report = plan.execute()?;
    let vars = plan.base.vars().to_vec();
    let label = |s: &PolySystem| s.complexity().label();
    writeln!(out, "base: {}", label(&plan.base))?;
    writeln!(out, "perturbed: {}", label(&report.perturbed))?;
    writeln!(out, "translated: {}", label(&report.translated))?;
    writeln!(out, "result: {} {}", label(&report.rescaled), if report.chemical { "chemical" } else { "non-chemical" })?;
    for c in &report.constraints {
        let status = match c.status {
            ConstraintStatus::Satisfied => "satisfied",
            ConstraintStatus::Tight => "tight",
            ConstraintStatus::Violated => "violated",
        };
        writeln!(out, "constraint {} [{}, margin {}]", c.describe(&vars), status, format_rational(&c.margin))?;
    }
    for p in &report.piece_constants {
        writeln!(out, "piece constant: equation {} piece {}: {}", p.equation + 1, p.piece + 1, format_rational(&p.value))?;
    }
    for a in &report.adjustments {
        writeln!(out, "adjustment: {a}")?;
    }
    for n in &report.notes {
        writeln!(out, "note: {n}")?;
    }
    if let Some(r) = args.equilibria {
        if !(r > 0.0 && r.is_finite()) {
            return Err(usage("--equilibria needs a positive radius"));
        }
        let eq = find_equilibria(&report.perturbed, &vec![(-r, r); plan.base.dim()], &NewtonOptions::default());
        for e in &eq {
            writeln!(out, "perturbed equilibrium: {:?} {}", e.point, if e.stable { "stable" } else { "unstable" })?;
        }
        if eq.len() == 1 && eq[0].stable {
            writeln!(out, "note: the perturbed system has a unique equilibrium in the box, and it is stable")?;
        }
    }
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir)?;
        report.perturbed.write(&dir.join("perturbed.json"))?;
        report.translated.write(&dir.join("translated.json"))?;
        report.rescaled.write(&dir.join("rescaled.json"))?;
        std::fs::write(dir.join("plan.json"), file.to_json())?;
        std::fs::write(dir.join("constraints.csv"), constraints_csv(&report, &vars))?;
    }
    if !report.feasible() {
        let mut msg = String::from("infeasible plan");
        for c in report.failing_constraints() {
            write!(msg, "; {}", c.describe(&vars)).unwrap();
        }
        for v in &report.violations {
            write!(msg, "; equation {} keeps non-chemical {}", v.equation + 1, v.monomial.text(report.rescaled.vars()))
                .unwrap();
        }
        return Err(negative(msg));
    }
    Ok(0)
}

fn cmd_crn(args: &CrnArgs, out: &mut dyn Write) -> Result<i32, Exit> {
    if let Some(path) = &args.reactions {
        let species: Vec<String> = args.species.as_deref().unwrap_or("").split(',').map(|s| s.trim().to_string()).collect();
        let refs: Vec<&str> = species.iter().map(String::as_str).collect();
        let crn = Crn::parse(&std::fs::read_to_string(path)?, &refs)?;
        writeln!(out, "{}", crn_to_cds(&crn)?.to_json())?;
        return Ok(0);
    }
    let input = Input { id: args.id.clone(), file: args.file.clone(), eps: args.eps.clone(), mu: args.mu.clone() };
    let l = load(&input)?;
    let c = canonical_crn(&l.system)?;
    let c = if args.fused { fuse(&c)? } else { c };
    writeln!(out, "# {} CRN {}", if args.fused { "fused" } else { "canonical" }, crn_complexity(&c).label())?;
    write!(out, "{}", c.render())?;
    Ok(0)
}

fn cmd_simulate(
    input: &Input,
    run: &RunOpts,
    t_end: f64,
    samples: usize,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Exit> {
    let l = load(input)?;
    let x0 = initial_condition(&l, &run.ic)?;
    let opts = integrator_options(run, &x0)?;
    let traj = integrate(&l.system, &x0, t_end, samples, &opts)?;
    emit(&run.out, &traj.to_csv(), out)?;
    writeln!(
        err,
        "{} samples, {} steps, min component {:e}",
        traj.times.len(),
        traj.meta.stats.accepted,
        traj.meta.min_component
    )?;
    if let Some(d) = &traj.divergence {
        return Err(negative(format!("integration stopped at t = {} ({:?})", d.t, d.reason)));
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_lce(
    input: &Input,
    run: &RunOpts,
    t_end: f64,
    tau: Option<f64>,
    transient: f64,
    zero_tol: f64,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Exit> {
    let l = load(input)?;
    let x0 = initial_condition(&l, &run.ic)?;
    let opts = LceOptions { integrator: integrator_options(run, &x0)?, transient, ..Default::default() };
    let tau = match tau {
        Some(t) => t,
        None => default_tau(&l.system, &x0)?,
    };
    let series = lce_qr(&l.system, &x0, t_end, tau, &opts)?;
    emit(&run.out, &series.to_csv(), out)?;
    // the summary goes wherever the CSV does not
    let summary_to: &mut dyn Write = if run.out.is_some() { out } else { err };
    match series.summary(zero_tol) {
        Some(s) => writeln!(
            summary_to,
            "t={} tau={} lambdas={:?} sum={:e} positive={} zero={} negative={}",
            s.t, series.tau, s.lambdas, s.sum, s.positive, s.near_zero, s.negative
        )?,
        None => writeln!(summary_to, "no complete window")?,
    }
    if let Some(d) = &series.divergence {
        return Err(negative(format!("trajectory stopped at t = {} ({:?})", d.t, d.reason)));
    }
    Ok(0)
}
