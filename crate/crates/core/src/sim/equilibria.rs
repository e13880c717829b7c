//! Multi-start damped Newton for `f(x) = 0`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::polysys::{CompiledSystem, PolySystem};
use crate::rational::{to_f64, Q};

#[derive(Clone, Debug, Serialize)]
pub struct Equilibrium {
    pub point: Vec<f64>,
    /// `[re, im]` pairs, sorted by decreasing real part.
    pub jacobian_eigenvalues: Vec<[f64; 2]>,
    pub stable: bool,
    /// `‖f(point)‖₂`, evaluated exactly at the stored point.
    pub residual: f64,
    /// `max_i |f_i| / max(1, Σ|terms of f_i|)`; meaningful when coordinates are huge.
    pub scaled_residual: f64,
}

#[derive(Clone, Debug)]
pub struct NewtonOptions {
    pub n_starts: usize,
    pub max_iter: usize,
    /// Convergence threshold on the scaled residual.
    pub tol: f64,
    /// Relative distance under which two roots are the same.
    pub dedup: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { n_starts: 64, max_iter: 200, tol: 1e-12, dedup: 1e-8 }
    }
}

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut k: u64, base: u32) -> f64 {
    let b = base as u64;
    let (mut inv, mut f) = (0.0, 1.0 / base as f64);
    while k > 0 {
        inv += (k % b) as f64 * f;
        k /= b;
        f /= base as f64;
    }
    inv
}

/// Halton point `k` (1-based, skipping the origin) mapped into `bounds`.
fn halton(k: usize, bounds: &[(f64, f64)]) -> Vec<f64> {
    bounds
        .iter()
        .enumerate()
        .map(|(d, (lo, hi))| lo + (hi - lo) * radical_inverse(k as u64, PRIMES[d % PRIMES.len()]))
        .collect()
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn scaled_residual(c: &CompiledSystem, x: &[f64], f: &[f64]) -> f64 {
    c.term_magnitudes(x)
        .iter()
        .zip(f)
        .map(|(m, fi)| fi.abs() / m.max(1.0))
        .fold(0.0, f64::max)
}

fn newton(c: &CompiledSystem, mut x: Vec<f64>, opts: &NewtonOptions) -> Option<Vec<f64>> {
    let n = x.len();
    let mut f = c.eval(&x);
    let mut r = norm2(&f);
    for _ in 0..opts.max_iter {
        if scaled_residual(c, &x, &f) <= opts.tol {
            return Some(polish(c, x));
        }
        let j = DMatrix::from_row_slice(n, n, &c.jacobian(&x));
        let rhs = DVector::from_iterator(n, f.iter().map(|v| -v));
        let dx = j.lu().solve(&rhs)?;
        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, d)| a + lambda * d).collect();
            let ft = c.eval(&trial);
            let rt = norm2(&ft);
            if rt.is_finite() && rt < (1.0 - 1e-4 * lambda) * r {
                x = trial;
                f = ft;
                r = rt;
                break;
            }
            lambda *= 0.5;
            if lambda < 1e-10 {
                // stalled: accept only if already at rounding level
                return (scaled_residual(c, &x, &f) <= opts.tol * 1e2).then(|| polish(c, x));
            }
        }
    }
    None
}

/// A few undamped steps, kept only while the residual does not grow.
fn polish(c: &CompiledSystem, mut x: Vec<f64>) -> Vec<f64> {
    let n = x.len();
    let mut r = norm2(&c.eval(&x));
    for _ in 0..3 {
        let j = DMatrix::from_row_slice(n, n, &c.jacobian(&x));
        let rhs = DVector::from_iterator(n, c.eval(&x).iter().map(|v| -v));
        let Some(dx) = j.lu().solve(&rhs) else { break };
        let trial: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, d)| a + d).collect();
        let rt = norm2(&c.eval(&trial));
        if !(rt <= r) {
            break;
        }
        x = trial;
        r = rt;
    }
    x
}

/// `f` at a float point, computed in exact arithmetic and then rounded.
fn exact_eval(s: &PolySystem, x: &[f64]) -> Option<Vec<f64>> {
    let q: Vec<Q> = x.iter().map(|v| Q::from_float(*v)).collect::<Option<_>>()?;
    Some(s.evaluate_exact(&q).ok()?.iter().map(to_f64).collect())
}

/// Newton steps driven by the exact residual at the float iterate. When the
/// terms of `f` are many orders larger than `f` itself, float evaluation only
/// locates a root to within a cloud of points; this resolves it to the
/// spacing of f64 so that roots from different seeds coincide.
fn refine(s: &PolySystem, c: &CompiledSystem, mut x: Vec<f64>) -> Vec<f64> {
    let n = x.len();
    let Some(mut f) = exact_eval(s, &x) else { return x };
    let mut r = norm2(&f);
    for _ in 0..10 {
        if r == 0.0 {
            break;
        }
        let j = DMatrix::from_row_slice(n, n, &c.jacobian(&x));
        let rhs = DVector::from_iterator(n, f.iter().map(|v| -v));
        let Some(dx) = j.lu().solve(&rhs) else { break };
        let trial: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, d)| a + d).collect();
        if trial == x {
            break;
        }
        let Some(ft) = exact_eval(s, &trial) else { break };
        let rt = norm2(&ft);
        if !(rt < r) {
            break;
        }
        x = trial;
        f = ft;
        r = rt;
    }
    x
}

fn classify(s: &PolySystem, c: &CompiledSystem, x: Vec<f64>) -> Equilibrium {
    let n = x.len();
    let f = exact_eval(s, &x).unwrap_or_else(|| c.eval(&x));
    let j = DMatrix::from_row_slice(n, n, &c.jacobian(&x));
    let mut eig: Vec<[f64; 2]> = j.complex_eigenvalues().iter().map(|z| [z.re, z.im]).collect();
    eig.sort_by(|a, b| b[0].total_cmp(&a[0]).then(b[1].total_cmp(&a[1])));
    Equilibrium {
        stable: eig.iter().all(|z| z[0] < 0.0),
        jacobian_eigenvalues: eig,
        residual: norm2(&f),
        scaled_residual: scaled_residual(c, &x, &f),
        point: x,
    }
}

/// Damped Newton from `n_starts` Halton seeds in `bounds`; roots outside the
/// box are dropped, duplicates merged. Deterministic.
pub fn find_equilibria(s: &PolySystem, bounds: &[(f64, f64)], opts: &NewtonOptions) -> Vec<Equilibrium> {
    assert_eq!(bounds.len(), s.dim(), "one interval per variable");
    assert!(bounds.iter().all(|(lo, hi)| lo.is_finite() && hi.is_finite() && lo <= hi), "box must be finite");
    let c = s.compile();
    let mut roots: Vec<Vec<f64>> = Vec::new();
    for k in 1..=opts.n_starts {
        let Some(x) = newton(&c, halton(k, bounds), opts) else { continue };
        let x = refine(s, &c, x);
        let inside = x.iter().zip(bounds).all(|(v, (lo, hi))| {
            let slack = 1e-9 * (hi - lo).abs().max(lo.abs().max(hi.abs()) * 1e-6);
            *v >= lo - slack && *v <= hi + slack
        });
        if !inside {
            continue;
        }
        let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let dup = roots.iter().any(|r| r.iter().zip(&x).all(|(a, b)| (a - b).abs() <= opts.dedup * scale));
        if !dup {
            roots.push(x);
        }
    }
    roots.sort_by(|a, b| a.iter().zip(b).map(|(p, q)| p.total_cmp(q)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
    roots.into_iter().map(|x| classify(s, &c, x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_linear() {
        let s = PolySystem::parse(&["x"], &["1 - x"]).unwrap();
        let e = find_equilibria(&s, &[(-10.0, 10.0)], &NewtonOptions::default());
        assert_eq!(e.len(), 1);
        assert!((e[0].point[0] - 1.0).abs() < 1e-14);
        assert_eq!(e[0].jacobian_eigenvalues, vec![[-1.0, 0.0]]);
        assert!(e[0].stable);
    }

    #[test]
    fn two_roots_and_box_filter() {
        let s = PolySystem::parse(&["x"], &["x^2 - 4"]).unwrap();
        let both = find_equilibria(&s, &[(-5.0, 5.0)], &NewtonOptions::default());
        assert_eq!(both.len(), 2);
        assert!((both[0].point[0] + 2.0).abs() < 1e-12);
        assert!(both[0].stable && !both[1].stable);
        let pos = find_equilibria(&s, &[(0.5, 5.0)], &NewtonOptions::default());
        assert_eq!(pos.len(), 1);
    }

    #[test]
    fn halton_is_in_box() {
        for k in 1..100 {
            let p = halton(k, &[(0.0, 1.0), (-2.0, -1.0), (5.0, 6.0)]);
            assert!(p[0] > 0.0 && p[0] < 1.0 && p[1] > -2.0 && p[1] < -1.0 && p[2] > 5.0 && p[2] < 6.0);
        }
    }

    #[test]
    fn no_roots() {
        let s = PolySystem::parse(&["x"], &["x^2 + 1"]).unwrap();
        assert!(find_equilibria(&s, &[(-3.0, 3.0)], &NewtonOptions::default()).is_empty());
    }
}
