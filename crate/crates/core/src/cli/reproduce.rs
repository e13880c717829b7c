//! Figure datasets: trajectories, finite-time exponents and equilibria for
//! every panel, plus a `manifest.json` describing each file.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;

use crate::catalog;
use crate::error::{Error, Result};
use crate::lce::{default_tau, lce_qr, LceOptions};
use crate::polysys::PolySystem;
use crate::rational::{format_rational, qi, to_f64, Q};
use crate::sim::{find_equilibria, integrate, Divergence, Equilibrium, IntegratorOptions, NewtonOptions};

pub const FIGURES: [&str; 5] = ["fig1", "fig2", "fig3", "fig4", "fig5"];

#[derive(Clone, Debug, Serialize)]
pub struct Settings {
    pub t_end: f64,
    pub samples: usize,
    pub lce_t_end: f64,
    /// Half-width of the equilibrium search box around the base attractor.
    pub search_radius: f64,
    pub quick: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { t_end: 1000.0, samples: 20001, lce_t_end: 1e4, search_radius: 20.0, quick: false }
    }
}

impl Settings {
    pub fn quick() -> Self {
        Settings { t_end: 20.0, samples: 201, lce_t_end: 20.0, search_radius: 20.0, quick: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Trajectory,
    Lce,
    Equilibria,
}

#[derive(Clone, Debug)]
struct Job {
    file: &'static str,
    panels: &'static str,
    kind: Kind,
    id: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct FileEntry {
    pub file: String,
    pub panels: String,
    pub kind: Kind,
    pub system: String,
    pub epsilon: Option<String>,
    pub mu: Option<String>,
    pub initial_condition: Option<Vec<f64>>,
    pub t_end: Option<f64>,
    pub tau: Option<f64>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub rows: usize,
    /// Endpoint exponents, for LCE files.
    pub final_lambdas: Option<Vec<f64>>,
    pub divergence: Option<Divergence>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub figure: String,
    pub settings: Settings,
    pub files: Vec<FileEntry>,
}

/// `fig1`..`fig5`, or all of them for `all`.
pub fn figures(name: &str) -> Result<Vec<&'static str>> {
    if name == "all" {
        return Ok(FIGURES.to_vec());
    }
    FIGURES
        .iter()
        .find(|f| **f == name)
        .map(|f| vec![*f])
        .ok_or_else(|| Error::UnknownId(name.to_string()))
}

fn jobs(fig: &str) -> Vec<Job> {
    use Kind::*;
    let j = |file, panels, kind, id| Job { file, panels, kind, id };
    match fig {
        "fig1" => vec![
            j("one_wing_trajectory.csv", "(a)", Trajectory, "cds-one-wing"),
            j("two_wing_trajectory.csv", "(b)", Trajectory, "cds-two-wing"),
            j("hidden_trajectory.csv", "(c)", Trajectory, "cds-hidden"),
        ],
        "fig2" => vec![
            j("ds_trajectory.csv", "(a)-(b)", Trajectory, "rossler-reflected"),
            j("ds_lce.csv", "(c)", Lce, "rossler-reflected"),
            j("perturbed_trajectory.csv", "(d)-(e)", Trajectory, "rossler-perturbed"),
            j("perturbed_lce.csv", "(f)", Lce, "rossler-perturbed"),
            j("cds_trajectory.csv", "(g)-(h)", Trajectory, "chemical-rossler"),
            j("cds_lce.csv", "(i)", Lce, "chemical-rossler"),
        ],
        _ => {
            let (ds, cds, perturbed) = match fig {
                "fig3" => ("sprott-p-perm", "cds-one-wing", "one-wing-perturbed"),
                "fig4" => ("sprott-c-variant", "cds-two-wing", "two-wing-perturbed"),
                _ => ("se17-variant", "cds-hidden", "hidden-perturbed"),
            };
            let mut v = vec![
                j("ds_trajectory.csv", "(a)-(b)", Trajectory, ds),
                j("ds_equilibria.csv", "(a)", Equilibria, ds),
                j("ds_lce.csv", "(c)", Lce, ds),
                j("cds_trajectory.csv", "(d)-(e)", Trajectory, cds),
                j("cds_lce.csv", "(f)", Lce, cds),
                j("perturbed_lce.csv", "(f)", Lce, perturbed),
            ];
            if fig == "fig5" {
                v.insert(4, j("cds_equilibria.csv", "(d)", Equilibria, cds));
            }
            v
        }
    }
}

/// Header `x1..xN,residual,scaled_residual,stable,re1,im1,...`.
pub fn equilibria_csv(eqs: &[Equilibrium], n: usize) -> String {
    let mut s = String::new();
    for i in 1..=n {
        write!(s, "x{i},").unwrap();
    }
    s.push_str("residual,scaled_residual,stable");
    for i in 1..=n {
        write!(s, ",re{i},im{i}").unwrap();
    }
    s.push('\n');
    for e in eqs {
        for v in &e.point {
            write!(s, "{v:.16e},").unwrap();
        }
        write!(s, "{:.16e},{:.16e},{}", e.residual, e.scaled_residual, e.stable).unwrap();
        for [re, im] in &e.jacobian_eigenvalues {
            write!(s, ",{re:.16e},{im:.16e}").unwrap();
        }
        s.push('\n');
    }
    s
}

/// Search box for the equilibria of `id`: a cube around the origin of the
/// base coordinates, carried through the construction's affine map for
/// constructed entries.
pub fn search_box(id: &str, eps: &Q, mu: &Q, radius: f64) -> Result<Vec<(f64, f64)>> {
    let s = catalog::instantiate(id, eps, mu)?;
    let cube = vec![(-radius, radius); s.dim()];
    let Some(plan) = catalog::plan(id, eps, mu)? else { return Ok(cube) };
    if catalog::get(id)?.base.is_none() {
        return Ok(cube);
    }
    let map = plan.full_map()?;
    let lo = map.apply_point(&vec![-radius; s.dim()])?;
    let hi = map.apply_point(&vec![radius; s.dim()])?;
    Ok(lo.iter().zip(&hi).map(|(a, b)| (a.min(*b), a.max(*b))).collect())
}

fn params(id: &str) -> Result<(Q, Q, bool)> {
    Ok(match catalog::default_params(id)? {
        Some((e, m)) => (e, m, true),
        None => (qi(1), qi(1), false),
    })
}

fn run_job(job: &Job, cfg: &Settings, dir: &Path) -> Result<FileEntry> {
    let (eps, mu, parametric) = params(job.id)?;
    let s: PolySystem = catalog::instantiate(job.id, &eps, &mu)?;
    let mut entry = FileEntry {
        file: job.file.to_string(),
        panels: job.panels.to_string(),
        kind: job.kind,
        system: job.id.to_string(),
        epsilon: parametric.then(|| format_rational(&eps)),
        mu: parametric.then(|| format_rational(&mu)),
        initial_condition: None,
        t_end: None,
        tau: None,
        rtol: None,
        atol: None,
        rows: 0,
        final_lambdas: None,
        divergence: None,
    };
    let text = match job.kind {
        Kind::Equilibria => {
            let bounds = search_box(job.id, &eps, &mu, cfg.search_radius)?;
            let eqs = find_equilibria(&s, &bounds, &NewtonOptions::default());
            entry.rows = eqs.len();
            equilibria_csv(&eqs, s.dim())
        }
        Kind::Trajectory | Kind::Lce => {
            let x0 = catalog::figure_ic(job.id, &eps, &mu)?
                .ok_or_else(|| Error::Argument(format!("`{}` has no figure initial condition", job.id)))?;
            let x0: Vec<f64> = x0.iter().map(to_f64).collect();
            let opts = IntegratorOptions::scaled_for(&x0);
            entry.rtol = Some(opts.rtol);
            entry.atol = Some(opts.atol);
            entry.initial_condition = Some(x0.clone());
            if job.kind == Kind::Trajectory {
                entry.t_end = Some(cfg.t_end);
                let t = integrate(&s, &x0, cfg.t_end, cfg.samples, &opts)?;
                entry.rows = t.times.len();
                entry.divergence = t.divergence.clone();
                t.to_csv()
            } else {
                let tau = default_tau(&s, &x0)?;
                entry.t_end = Some(cfg.lce_t_end);
                entry.tau = Some(tau);
                let l = lce_qr(&s, &x0, cfg.lce_t_end, tau, &LceOptions { integrator: opts, ..Default::default() })?;
                entry.rows = l.times.len();
                entry.final_lambdas = l.last().map(|v| v.to_vec());
                entry.divergence = l.divergence.clone();
                l.to_csv()
            }
        }
    };
    std::fs::write(dir.join(job.file), text)?;
    Ok(entry)
}

/// Write every file of `fig` into `out/<fig>/` using up to `threads` workers.
pub fn reproduce(fig: &str, cfg: &Settings, out: &Path, threads: usize) -> Result<Manifest> {
    figures(fig)?;
    let dir = out.join(fig);
    std::fs::create_dir_all(&dir)?;
    let jobs = jobs(fig);
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<FileEntry>>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..threads.clamp(1, jobs.len()) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(job) = jobs.get(k) else { break };
                let r = run_job(job, cfg, &dir);
                results.lock().unwrap()[k] = Some(r);
            });
        }
    });
    let files = results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect::<Result<Vec<_>>>()?;
    let manifest = Manifest { figure: fig.to_string(), settings: cfg.clone(), files };
    std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest)
}
