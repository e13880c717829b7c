//! Acceptance suite. Each test prints exactly one `PASS`/`FAIL` line (written
//! straight to stdout so it survives output capture) and then asserts.

use std::io::Write;
use std::time::{Duration, Instant};

use chemdyn::catalog;
use chemdyn::crn::{canonical_crn, crn_complexity, crn_to_cds, fuse};
use chemdyn::lce::{default_tau, endpoint_discrepancy, lce_qr, LceOptions, LceSeries};
use chemdyn::polysys::{Exps, Poly, PolySystem};
use chemdyn::qcm::{normalize_leading, quadratic_case_plan, universal_qcm, Piece, PieceKind, QcmPlan};
use chemdyn::rational::{q, qi, to_f64, Q};
use chemdyn::sim::{find_equilibria, integrate, integrate_at, IntegratorOptions, NewtonOptions};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

// pinned tolerances and budgets
const EQUILIBRIUM_RESIDUAL: f64 = 1e-12;
const EQUILIBRIUM_MATCH: f64 = 1e-9;
const LCE_T_END: f64 = 1e4;
const ROSSLER_LAMBDA1_MIN: f64 = 0.05;
const ROSSLER_ZERO_TOL: f64 = 0.01;
const CDS_ZERO_TOL: f64 = 0.02;
const TRACE_IDENTITY_REL: f64 = 0.01;
const INVARIANCE_TOL: f64 = 0.02;
const POSITIVITY_T_END: f64 = 1000.0;
const POSITIVITY_SLACK: f64 = 1e-9;
const DIAGONAL_LCE_TOL: f64 = 1e-6;
const JACOBIAN_FD_REL: f64 = 1e-6;
const HALVING_MIN_RATIO: f64 = 8.0;
const RANDOM_QUADRATIC_SYSTEMS: usize = 20;

const CDS_IDS: [&str; 4] = ["chemical-rossler", "cds-one-wing", "cds-two-wing", "cds-hidden"];
const PARAM_PAIRS: [((i64, i64), (i64, i64)); 3] = [((1, 1000), (1, 100)), ((1, 50), (1, 30)), ((1, 7), (1, 9))];

fn report(name: &str, failures: &[String], elapsed: Duration, budget: Duration) {
    let mut failures = failures.to_vec();
    if elapsed > budget {
        failures.push(format!("took {elapsed:.2?}, budget {budget:?}"));
    }
    let line = if failures.is_empty() {
        format!("PASS {name} ({elapsed:.2?})\n")
    } else {
        format!("FAIL {name} ({elapsed:.2?}): {}\n", failures.join("; "))
    };
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    assert!(failures.is_empty(), "{}", line.trim_end());
}

fn params(id: &str) -> (Q, Q) {
    catalog::default_params(id).unwrap().unwrap_or((qi(1), qi(1)))
}

#[test]
fn exact_coefficient_reproduction() {
    let start = Instant::now();
    let s = catalog::instantiate("chemical-rossler", &q(1, 1000), &q(1, 100)).unwrap();
    let printed = PolySystem::parse(
        &["x", "y", "z"],
        &[
            "5700.000002 - 100005.7 x + 1000 y + 100 x^2 - x*y",
            "-1000.001 y + 999.8 z + x*y",
            "999.8 z + 1.9996 z^2 - 0.01 y*z",
        ],
    )
    .unwrap();
    let mut failures = Vec::new();
    if s != printed {
        failures.push(format!("instantiated system differs:\n{}", s.pretty()));
    }
    report("exact coefficient reproduction", &failures, start.elapsed(), Duration::from_secs(1));
}

#[test]
fn construction_equivalence() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for id in CDS_IDS {
        for ((en, ed), (mn, md)) in PARAM_PAIRS {
            let (eps, mu) = (q(en, ed), q(mn, md));
            let report = catalog::plan(id, &eps, &mu).unwrap().unwrap().execute().unwrap();
            if report.rescaled != catalog::instantiate(id, &eps, &mu).unwrap() {
                failures.push(format!("{id} at ({eps}, {mu})"));
            }
        }
    }
    report("construction equivalence", &failures, start.elapsed(), Duration::from_secs(5));
}

#[test]
fn complexity_and_network_labels() {
    let start = Instant::now();
    let mut failures = Vec::new();
    // (id, system label, (canonical, fused) network labels)
    type Row<'a> = (&'a str, &'a str, Option<(&'a str, &'a str)>);
    let expected: [Row; 6] = [
        ("rossler", "(7,1)", None),
        ("wr", "(9,6)", Some(("(9,6)", "(7,4)"))),
        ("chemical-rossler", "(11,5)", Some(("(11,5)", "(9,4)"))),
        ("cds-one-wing", "(10,3)", Some(("(10,3)", "(8,3)"))),
        ("cds-two-wing", "(11,5,1)", Some(("(11,5,1)", "(9,4,1)"))),
        ("cds-hidden", "(11,5)", Some(("(11,5)", "(9,4)"))),
    ];
    for (id, label, crns) in expected {
        let s = catalog::instantiate_default(id).unwrap();
        let got = s.complexity().label();
        if got != label {
            failures.push(format!("{id}: system {got}, expected {label}"));
        }
        if let Some((canon, fused)) = crns {
            let c = canonical_crn(&s).unwrap();
            let f = fuse(&c).unwrap();
            let (gc, gf) = (crn_complexity(&c).label(), crn_complexity(&f).label());
            if gc != canon || gf != fused {
                failures.push(format!("{id}: networks {gc}/{gf}, expected {canon}/{fused}"));
            }
        }
    }
    report("complexity and network labels", &failures, start.elapsed(), Duration::from_secs(1));
}

#[test]
fn network_round_trip() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let chemical: Vec<&str> =
        catalog::ids().into_iter().filter(|id| catalog::get(id).unwrap().expected.chemical).collect();
    for id in &chemical {
        let (eps, mu) = params(id);
        let s = catalog::instantiate(id, &eps, &mu).unwrap();
        let c = canonical_crn(&s).unwrap();
        if crn_to_cds(&c).unwrap() != s {
            failures.push(format!("{id}: canonical"));
        }
        if crn_to_cds(&fuse(&c).unwrap()).unwrap() != s {
            failures.push(format!("{id}: fused"));
        }
    }
    if chemical.len() != 5 {
        failures.push(format!("expected 5 chemical entries, found {}", chemical.len()));
    }
    report("network round trip", &failures, start.elapsed(), Duration::from_secs(1));
}

#[test]
fn hidden_attractor_equilibrium() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mu = q(1, 100000);
    let b = qi(2);

    // perturbed system, moderate coordinates
    let p = catalog::instantiate("hidden-perturbed", &mu, &mu).unwrap();
    let expected: Vec<f64> = catalog::hidden_perturbed_equilibrium(&mu, &b).iter().map(to_f64).collect();
    let found = find_equilibria(&p, &[(-10.0, 10.0); 3], &NewtonOptions::default());
    match found.iter().find(|e| e.point.iter().zip(&expected).all(|(a, b)| (a - b).abs() < EQUILIBRIUM_MATCH)) {
        Some(e) if e.residual < EQUILIBRIUM_RESIDUAL => {}
        Some(e) => failures.push(format!("perturbed residual {:e}", e.residual)),
        None => failures.push(format!("perturbed equilibrium {expected:?} not found among {}", found.len())),
    }

    // chemical system: search the positive box around the figure attractor
    let s = catalog::instantiate("cds-hidden", &mu, &mu).unwrap();
    let x0 = catalog::figure_ic_f64("cds-hidden", &mu, &mu).unwrap().unwrap();
    let traj = integrate(&s, &x0, 1000.0, 10001, &IntegratorOptions::scaled_for(&x0)).unwrap();
    let bounds: Vec<(f64, f64)> = traj
        .bounding_box()
        .iter()
        .map(|(lo, hi)| {
            let span = hi - lo;
            ((lo - span).max(lo * 1e-3), hi + span)
        })
        .collect();
    let eqs = find_equilibria(&s, &bounds, &NewtonOptions::default());
    let image: Vec<f64> = catalog::plan("cds-hidden", &mu, &mu)
        .unwrap()
        .unwrap()
        .full_map()
        .unwrap()
        .apply_point_exact(&catalog::hidden_perturbed_equilibrium(&mu, &b))
        .unwrap()
        .iter()
        .map(to_f64)
        .collect();
    let scale = image.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if eqs.len() != 1 {
        failures.push(format!("{} equilibria in the positive box", eqs.len()));
    }
    for e in &eqs {
        if !e.stable {
            failures.push(format!("eigenvalues {:?}", e.jacobian_eigenvalues));
        }
        let d = e.point.iter().zip(&image).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale;
        if d > EQUILIBRIUM_MATCH {
            failures.push(format!("found {:?}, image of the exact equilibrium {image:?}", e.point));
        }
    }
    report("hidden attractor equilibrium", &failures, start.elapsed(), Duration::from_secs(10));
}

fn lce_run(id: &str) -> LceSeries {
    let (eps, mu) = params(id);
    let s = catalog::instantiate(id, &eps, &mu).unwrap();
    let x0 = catalog::figure_ic_f64(id, &eps, &mu).unwrap().unwrap();
    let tau = default_tau(&s, &x0).unwrap();
    let opts = LceOptions {
        integrator: IntegratorOptions::scaled_for(&x0),
        track_divergence: true,
        ..Default::default()
    };
    lce_qr(&s, &x0, LCE_T_END, tau, &opts).unwrap()
}

#[test]
fn lyapunov_exponent_properties() {
    let start = Instant::now();
    let ids = ["rossler", "rossler-reflected", "rossler-perturbed", "chemical-rossler", "cds-one-wing", "cds-two-wing", "cds-hidden"];
    let runs: Vec<(&str, LceSeries)> = std::thread::scope(|scope| {
        let handles: Vec<_> = ids.iter().map(|id| (*id, scope.spawn(move || lce_run(id)))).collect();
        handles.into_iter().map(|(id, h)| (id, h.join().unwrap())).collect()
    });
    let get = |id: &str| &runs.iter().find(|(i, _)| *i == id).unwrap().1;
    let mut failures = Vec::new();
    for (id, r) in &runs {
        if let Some(d) = &r.divergence {
            failures.push(format!("{id} stopped at t = {}", d.t));
        }
    }

    let l = get("rossler").last().unwrap().to_vec();
    let sum: f64 = l.iter().sum();
    if !(l[0] > ROSSLER_LAMBDA1_MIN && l[1].abs() < ROSSLER_ZERO_TOL && sum < 0.0) {
        failures.push(format!("rossler {l:?}"));
    }
    for id in CDS_IDS {
        let l = get(id).last().unwrap().to_vec();
        let min_abs = l.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        if !(l[0] > 0.0 && min_abs < CDS_ZERO_TOL && l.iter().sum::<f64>() < 0.0) {
            failures.push(format!("{id} {l:?}"));
        }
    }
    for (id, r) in &runs {
        let sum: f64 = r.last().unwrap().iter().sum();
        let div = *r.divergence_average.as_ref().unwrap().last().unwrap();
        if (sum - div).abs() > TRACE_IDENTITY_REL * div.abs() {
            failures.push(format!("{id}: sum {sum} vs divergence average {div}"));
        }
    }
    for other in ["rossler-perturbed", "chemical-rossler"] {
        let d = endpoint_discrepancy(get("rossler-reflected"), get(other)).unwrap();
        if d >= INVARIANCE_TOL {
            failures.push(format!("reflected vs {other}: discrepancy {d}"));
        }
    }
    report("Lyapunov exponent properties", &failures, start.elapsed(), Duration::from_secs(600));
}

#[test]
fn positivity_of_chemical_trajectories() {
    let start = Instant::now();
    let failures: Vec<String> = std::thread::scope(|scope| {
        let handles: Vec<_> = CDS_IDS
            .iter()
            .map(|id| {
                scope.spawn(move || {
                    let (eps, mu) = params(id);
                    let s = catalog::instantiate(id, &eps, &mu).unwrap();
                    let x0 = catalog::figure_ic_f64(id, &eps, &mu).unwrap().unwrap();
                    let t = integrate(&s, &x0, POSITIVITY_T_END, 100001, &IntegratorOptions::scaled_for(&x0)).unwrap();
                    let sampled = t.states.iter().flatten().fold(f64::INFINITY, |m, v| m.min(*v));
                    let bad = t.divergence.is_some()
                        || sampled <= -POSITIVITY_SLACK
                        || t.meta.min_component <= -POSITIVITY_SLACK;
                    bad.then(|| format!("{id}: min {sampled:e} (steps {:e})", t.meta.min_component))
                })
            })
            .collect();
        handles.into_iter().filter_map(|h| h.join().unwrap()).collect()
    });
    report("positivity of chemical trajectories", &failures, start.elapsed(), Duration::from_secs(120));
}

fn e3(v: [u32; 3]) -> Exps {
    Exps(v.to_vec())
}

fn random_quadratic(rng: &mut StdRng) -> PolySystem {
    loop {
        let n = rng.random_range(3..=5usize);
        let mut monomials: Vec<Vec<u32>> = vec![vec![0; n]];
        for i in 0..n {
            let mut e = vec![0; n];
            e[i] = 1;
            monomials.push(e);
            for j in i..n {
                let mut e = vec![0; n];
                e[i] += 1;
                e[j] += 1;
                monomials.push(e);
            }
        }
        let mut eqs = Vec::with_capacity(n);
        for _ in 0..n {
            let mut terms = Vec::new();
            for e in &monomials {
                if rng.random_bool(0.35) {
                    // coefficient in [-2, 2] on a 1/1000 grid
                    terms.push((q(rng.random_range(-2000..=2000i64), 1000), e.clone()));
                }
            }
            eqs.push(Poly::from_terms(n, terms).unwrap());
        }
        let s = PolySystem::new(PolySystem::default_vars(n), eqs).unwrap();
        if s.complexity().count(2) > 0 {
            return s;
        }
    }
}

#[test]
fn linear_and_quadratic_monomial_bounds() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let linear = catalog::instantiate_default("rossler-linearpart").unwrap();

    let universal = universal_qcm(&linear, &[qi(1), qi(3), qi(1)], &q(1, 100)).unwrap();
    if !(universal.chemical && universal.rescaled.complexity().count(2) == 5) {
        failures.push(format!("universal gives {}", universal.rescaled.complexity().label()));
    }
    // b strictly above (a + c)/ε
    let eps = q(1, 10);
    let refined = QcmPlan {
        base: linear.clone(),
        pieces: vec![
            vec![Piece::new(PieceKind::LinearDamp, vec![e3([0, 0, 0]), e3([1, 0, 0])])],
            vec![Piece::new(PieceKind::LinearDamp, vec![e3([1, 0, 0]), e3([0, 0, 1])])],
            vec![Piece::new(PieceKind::Universal, vec![e3([0, 1, 0]), e3([0, 0, 1])])],
        ],
        epsilon: eps,
        mu: q(1, 1000),
        a: vec![qi(1), qi(21), qi(1)],
        post_scale: None,
        adjustments: Vec::new(),
    }
    .execute()
    .unwrap();
    if !(refined.feasible() && refined.rescaled.complexity().count(2) == 2) {
        failures.push(format!("refined gives {}", refined.rescaled.complexity().label()));
    }

    let mut rng = StdRng::seed_from_u64(0x5eed);
    for k in 0..RANDOM_QUADRATIC_SYSTEMS {
        let s = random_quadratic(&mut rng);
        let n = s.dim();
        let m2 = s.complexity().count(2);
        let (normalized, _, _) = normalize_leading(&s).unwrap();
        let r = quadratic_case_plan(&normalized, q(1, 10), q(1, 10000), vec![qi(1); n]).unwrap().execute().unwrap();
        let m3 = r.rescaled.complexity().count(3);
        if m3 != m2 - 1 || !r.chemical {
            failures.push(format!("random system {k} (N = {n}): M2 = {m2}, M3 = {m3}, chemical {}", r.chemical));
        }
    }
    report("linear and quadratic monomial bounds", &failures, start.elapsed(), Duration::from_secs(30));
}

fn max_abs_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn integrator_and_variational_correctness() {
    let start = Instant::now();
    let mut failures = Vec::new();

    let diag = PolySystem::parse(&["x", "y", "z"], &["-x", "-2 y", "-3 z"]).unwrap();
    let l = lce_qr(&diag, &[1.0, 1.0, 1.0], 100.0, 0.5, &LceOptions::default()).unwrap();
    let got = l.last().unwrap();
    let err = got.iter().zip([-1.0, -2.0, -3.0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if err > DIAGONAL_LCE_TOL {
        failures.push(format!("diagonal exponents {got:?}"));
    }

    // Jacobian against central differences, 10 points per catalog system
    let mut rng = StdRng::seed_from_u64(10);
    for id in catalog::ids() {
        let (eps, mu) = params(id);
        let s = catalog::instantiate(id, &eps, &mu).unwrap();
        let centre = catalog::figure_ic_f64(id, &eps, &mu).unwrap().unwrap_or(vec![0.0; s.dim()]);
        let mut worst = 0.0f64;
        for _ in 0..10 {
            let x: Vec<f64> = centre
                .iter()
                .map(|c| c + rng.random_range(-1.0..1.0) * c.abs().max(5.0) * if c.abs() > 100.0 { 0.1 } else { 1.0 })
                .collect();
            let j = s.evaluate_jacobian(&x).unwrap();
            let jmax = j.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
            for k in 0..s.dim() {
                let h = 1e-5 * x[k].abs().max(1.0);
                let (mut xp, mut xm) = (x.clone(), x.clone());
                xp[k] += h;
                xm[k] -= h;
                let (fp, fm) = (s.evaluate(&xp).unwrap(), s.evaluate(&xm).unwrap());
                let dx = xp[k] - xm[k];
                for i in 0..s.dim() {
                    worst = worst.max(((fp[i] - fm[i]) / dx - j[i][k]).abs() / jmax);
                }
            }
        }
        if worst > JACOBIAN_FD_REL {
            failures.push(format!("{id}: Jacobian vs differences {worst:e}"));
        }
    }

    // halving rtol and atol should cut the error against a reference run by 8x
    let r = catalog::instantiate_default("rossler").unwrap();
    let x0 = [5.0, -5.0, 5.0];
    let times: Vec<f64> = (0..=500).map(|k| k as f64 * 0.1).collect();
    let reference = integrate_at(&r, &x0, &times, &IntegratorOptions { rtol: 1e-14, atol: 1e-16, ..Default::default() }).unwrap();
    let error = |rtol: f64| {
        let o = IntegratorOptions { rtol, atol: rtol * 1e-3, ..Default::default() };
        max_abs_diff(&integrate_at(&r, &x0, &times, &o).unwrap().states, &reference.states)
    };
    let (e1, e2) = (error(1e-8), error(5e-9));
    if e1 / e2 < HALVING_MIN_RATIO {
        failures.push(format!("tolerance halving reduced the error by {:.2}x ({e1:.3e} -> {e2:.3e})", e1 / e2));
    }
    report("integrator and variational correctness", &failures, start.elapsed(), Duration::from_secs(60));
}
