//! Numerical integration, equilibria and positivity monitoring.

mod equilibria;
pub mod integrator;

use std::fmt::Write as _;

use serde::Serialize;

pub use equilibria::{find_equilibria, Equilibrium, NewtonOptions};
pub use integrator::{Divergence, Dopri5, IntegratorOptions, Rhs, StepStats, StopReason};

use crate::error::{Error, Result};
use crate::polysys::{CompiledSystem, PolySystem};

impl Rhs for &CompiledSystem {
    fn dim(&self) -> usize {
        CompiledSystem::dim(self)
    }

    fn eval(&mut self, y: &[f64], dy: &mut [f64]) {
        self.eval_into(y, dy)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryMeta {
    pub options: IntegratorOptions,
    pub stats: StepStats,
    /// Smallest component seen at any accepted step, not only at samples.
    pub min_component: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub meta: TrajectoryMeta,
    /// Set when integration stopped before `t_end`.
    pub divergence: Option<Divergence>,
}

impl Trajectory {
    pub fn last(&self) -> Option<&[f64]> {
        self.states.last().map(|s| s.as_slice())
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, |s| s.len())
    }

    /// CSV with header `t,x1,...,xN` and 17 significant digits.
    pub fn to_csv(&self) -> String {
        let n = self.dim();
        let mut out = String::from("t");
        for i in 1..=n {
            write!(out, ",x{i}").unwrap();
        }
        out.push('\n');
        for (t, x) in self.times.iter().zip(&self.states) {
            write!(out, "{t:.16e}").unwrap();
            for v in x {
                write!(out, ",{v:.16e}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Componentwise bounding box of the samples.
    pub fn bounding_box(&self) -> Vec<(f64, f64)> {
        let mut b = vec![(f64::INFINITY, f64::NEG_INFINITY); self.dim()];
        for x in &self.states {
            for (bi, v) in b.iter_mut().zip(x) {
                bi.0 = bi.0.min(*v);
                bi.1 = bi.1.max(*v);
            }
        }
        b
    }
}

fn check_args(s: &PolySystem, x0: &[f64], opts: &IntegratorOptions) -> Result<()> {
    if x0.len() != s.dim() {
        return Err(Error::Dimension { expected: s.dim(), got: x0.len() });
    }
    if !(opts.rtol > 0.0 && opts.atol > 0.0) {
        return Err(Error::arg("tolerances must be positive"));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::arg("initial condition must be finite"));
    }
    Ok(())
}

/// Integrate from `t = 0` and report the solution at `times` (increasing,
/// non-negative). A sample at `t = 0` is the initial condition itself.
pub fn integrate_at(s: &PolySystem, x0: &[f64], times: &[f64], opts: &IntegratorOptions) -> Result<Trajectory> {
    check_args(s, x0, opts)?;
    if times.windows(2).any(|w| w[1] <= w[0]) || times.first().is_some_and(|t| *t < 0.0) {
        return Err(Error::arg("sample times must be non-negative and strictly increasing"));
    }
    let c = s.compile();
    let mut stepper = Dopri5::new(&c, x0, opts.clone());
    let mut out_t = Vec::with_capacity(times.len());
    let mut out_x = Vec::with_capacity(times.len());
    let mut rest = times;
    if rest.first() == Some(&0.0) {
        out_t.push(0.0);
        out_x.push(x0.to_vec());
        rest = &rest[1..];
    }
    let t_end = rest.last().copied().unwrap_or(0.0);
    let res = stepper.advance(t_end, rest, |t, y| {
        out_t.push(t);
        out_x.push(y.to_vec());
    });
    Ok(Trajectory {
        times: out_t,
        states: out_x,
        meta: TrajectoryMeta {
            options: opts.clone(),
            stats: stepper.stats.clone(),
            min_component: stepper.min_component,
        },
        divergence: res.err(),
    })
}

/// `samples` equally spaced points on `[0, t_end]`, both ends included.
pub fn integrate(
    s: &PolySystem,
    x0: &[f64],
    t_end: f64,
    samples: usize,
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::arg("t_end must be positive"));
    }
    if samples < 2 {
        return Err(Error::arg("need at least two samples"));
    }
    let times: Vec<f64> = (0..samples)
        .map(|k| if k + 1 == samples { t_end } else { t_end * k as f64 / (samples - 1) as f64 })
        .collect();
    integrate_at(s, x0, &times, opts)
}

/// First sample with a component below `-atol`, as `(index, t)`.
pub fn monitor_positivity(t: &Trajectory, atol: f64) -> Option<(usize, f64)> {
    t.states
        .iter()
        .position(|x| x.iter().any(|v| *v < -atol))
        .map(|k| (k, t.times[k]))
}
