//! Finite-time Lyapunov exponents by the discrete QR method.
//!
//! The state and the variational matrix are integrated together as one
//! `N + N²` system. Every `τ` the matrix is factored `Φ = QR` (with
//! `R_ii ≥ 0`), `ln R_ii` is accumulated and integration restarts from `Q`.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polysys::{apply_affine, AffineMap, CompiledSystem, PolySystem};
use crate::sim::{Divergence, Dopri5, IntegratorOptions, Rhs, StepStats};

#[derive(Clone, Debug, Serialize)]
pub struct LceOptions {
    pub integrator: IntegratorOptions,
    /// Base-only integration before the exponents start accumulating.
    pub transient: f64,
    /// Tolerances `(rtol, atol)` for the variational components.
    pub variational_tol: (f64, f64),
    /// Also integrate `∫ ∇·f dt` along the same trajectory.
    pub track_divergence: bool,
}

impl Default for LceOptions {
    fn default() -> Self {
        LceOptions {
            integrator: IntegratorOptions::default(),
            transient: 0.0,
            variational_tol: (1e-9, 1e-12),
            track_divergence: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LceSeries {
    /// Window ends `mτ`, measured from the end of the transient.
    pub times: Vec<f64>,
    /// Per time, `N` exponents in descending order.
    pub lambdas: Vec<Vec<f64>>,
    pub tau: f64,
    /// Running `Σ ln R_ii`, ordered like `lambdas`.
    pub accumulated_logs: Vec<Vec<f64>>,
    /// Time average of `∇·f` up to each window end, when tracked.
    pub divergence_average: Option<Vec<f64>>,
    pub stats: StepStats,
    pub divergence: Option<Divergence>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LceSummary {
    pub t: f64,
    pub lambdas: Vec<f64>,
    pub sum: f64,
    pub positive: usize,
    pub near_zero: usize,
    pub negative: usize,
}

impl LceSeries {
    pub fn last(&self) -> Option<&[f64]> {
        self.lambdas.last().map(|l| l.as_slice())
    }

    /// Endpoint classification; `|λ| < zero_tol` counts as zero.
    pub fn summary(&self, zero_tol: f64) -> Option<LceSummary> {
        let l = self.last()?.to_vec();
        Some(LceSummary {
            t: *self.times.last()?,
            sum: l.iter().sum(),
            positive: l.iter().filter(|v| **v >= zero_tol).count(),
            near_zero: l.iter().filter(|v| v.abs() < zero_tol).count(),
            negative: l.iter().filter(|v| **v <= -zero_tol).count(),
            lambdas: l,
        })
    }

    /// CSV with header `t,lambda1,...,lambdaN`.
    pub fn to_csv(&self) -> String {
        let n = self.lambdas.first().map_or(0, |l| l.len());
        let mut out = String::from("t");
        for i in 1..=n {
            write!(out, ",lambda{i}").unwrap();
        }
        out.push('\n');
        for (t, l) in self.times.iter().zip(&self.lambdas) {
            write!(out, "{t:.16e}").unwrap();
            for v in l {
                write!(out, ",{v:.16e}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

struct Variational<'a> {
    c: &'a CompiledSystem,
    n: usize,
    jac: Vec<f64>,
    with_div: bool,
}

impl Rhs for Variational<'_> {
    fn dim(&self) -> usize {
        self.n + self.n * self.n + usize::from(self.with_div)
    }

    fn eval(&mut self, y: &[f64], dy: &mut [f64]) {
        let n = self.n;
        let x = &y[..n];
        self.c.eval_into(x, &mut dy[..n]);
        self.c.jacobian_into(x, &mut self.jac);
        let phi = &y[n..n + n * n];
        let dphi = &mut dy[n..n + n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += self.jac[i * n + k] * phi[k * n + j];
                }
                dphi[i * n + j] = acc;
            }
        }
        if self.with_div {
            dy[n + n * n] = (0..n).map(|i| self.jac[i * n + i]).sum();
        }
    }
}

/// Spectral radius of the Jacobian at `x`.
pub fn jacobian_spectral_radius(s: &PolySystem, x: &[f64]) -> Result<f64> {
    let n = s.dim();
    if x.len() != n {
        return Err(Error::Dimension { expected: n, got: x.len() });
    }
    let j = DMatrix::from_row_slice(n, n, &s.compile().jacobian(x));
    Ok(j.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// `0.5 / (1 + ρ(∇f(x0)) / 10)`.
pub fn default_tau(s: &PolySystem, x0: &[f64]) -> Result<f64> {
    Ok(0.5 / (1.0 + jacobian_spectral_radius(s, x0)? / 10.0))
}

/// Exponents at every `mτ` up to `t_end` (rounded up to a whole window).
pub fn lce_qr(s: &PolySystem, x0: &[f64], t_end: f64, tau: f64, opts: &LceOptions) -> Result<LceSeries> {
    let n = s.dim();
    if x0.len() != n {
        return Err(Error::Dimension { expected: n, got: x0.len() });
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::arg("tau must be positive"));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::arg("t_end must be positive"));
    }
    if !(opts.transient >= 0.0) {
        return Err(Error::arg("transient must be non-negative"));
    }
    let c = s.compile();
    let mut start = x0.to_vec();
    let mut stats = StepStats::default();
    if opts.transient > 0.0 {
        let mut base = Dopri5::new(&c, x0, opts.integrator.clone());
        let res = base.advance(opts.transient, &[], |_, _| {});
        stats = base.stats.clone();
        if let Err(d) = res {
            return Ok(empty_series(tau, opts, stats, d));
        }
        start = base.y().to_vec();
    }
    let windows = ((t_end / tau) - 1e-9).ceil().max(1.0) as usize;
    let rhs = Variational { c: &c, n, jac: vec![0.0; n * n], with_div: opts.track_divergence };
    let mut y0 = start;
    for i in 0..n {
        for j in 0..n {
            y0.push(if i == j { 1.0 } else { 0.0 });
        }
    }
    if opts.track_divergence {
        y0.push(0.0);
    }
    let mut stepper = Dopri5::new(rhs, &y0, opts.integrator.clone());
    stepper.set_tail_tolerances(n, opts.variational_tol.0, opts.variational_tol.1);
    let mut logs = vec![0.0f64; n];
    let mut series = empty_series(tau, opts, StepStats::default(), Divergence {
        t: 0.0,
        reason: crate::sim::StopReason::Blowup,
        last_state: vec![],
    });
    series.divergence = None;
    let mut state = y0.clone();
    for m in 1..=windows {
        let t_w = m as f64 * tau;
        if let Err(d) = stepper.advance(t_w, &[], |_, _| {}) {
            series.divergence = Some(Divergence { last_state: d.last_state[..n].to_vec(), ..d });
            break;
        }
        state.copy_from_slice(stepper.y());
        let phi = DMatrix::from_row_slice(n, n, &state[n..n + n * n]);
        let qr = phi.qr();
        let mut q = qr.q();
        let r = qr.r();
        for i in 0..n {
            let mut rii = r[(i, i)];
            if rii < 0.0 {
                rii = -rii;
                q.column_mut(i).neg_mut();
            }
            if !(rii > 0.0) || !rii.is_finite() {
                return Err(Error::RankCollapse { window: m, t: t_w });
            }
            logs[i] += rii.ln();
        }
        for i in 0..n {
            for j in 0..n {
                state[n + i * n + j] = q[(i, j)];
            }
        }
        stepper.reset_state(&state);
        let mut sorted = logs.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        series.times.push(t_w);
        series.lambdas.push(sorted.iter().map(|l| l / t_w).collect());
        series.accumulated_logs.push(sorted);
        if let Some(avg) = series.divergence_average.as_mut() {
            avg.push(state[n + n * n] / t_w);
        }
    }
    stats.accepted += stepper.stats.accepted;
    stats.rejected += stepper.stats.rejected;
    stats.evaluations += stepper.stats.evaluations;
    series.stats = stats;
    Ok(series)
}

fn empty_series(tau: f64, opts: &LceOptions, stats: StepStats, d: Divergence) -> LceSeries {
    LceSeries {
        times: vec![],
        lambdas: vec![],
        tau,
        accumulated_logs: vec![],
        divergence_average: opts.track_divergence.then(Vec::new),
        stats,
        divergence: Some(d),
    }
}

/// `max_i |λ_i − λ'_i|` at `t_end` between `s` from `x0` and
/// `apply_affine(s, a)` from `a(x0)`.
pub fn lce_invariance_check(
    s: &PolySystem,
    a: &AffineMap,
    x0: &[f64],
    t_end: f64,
    tau: f64,
    opts: &LceOptions,
) -> Result<f64> {
    let image = apply_affine(s, a)?;
    let y0 = a.apply_point(x0)?;
    let l1 = lce_qr(s, x0, t_end, tau, opts)?;
    let l2 = lce_qr(&image, &y0, t_end, tau, opts)?;
    endpoint_discrepancy(&l1, &l2)
}

/// `max_i |λ_i − λ'_i|` between two series' final rows.
pub fn endpoint_discrepancy(a: &LceSeries, b: &LceSeries) -> Result<f64> {
    match (a.last(), b.last(), &a.divergence, &b.divergence) {
        (Some(x), Some(y), None, None) if x.len() == y.len() => {
            Ok(x.iter().zip(y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max))
        }
        _ => Err(Error::arg("LCE runs did not both reach t_end")),
    }
}
