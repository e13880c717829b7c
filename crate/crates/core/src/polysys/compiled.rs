//! Floating-point evaluation of a system and its Jacobian.

use super::{Poly, PolySystem};
use crate::rational::to_f64;

#[derive(Clone, Debug)]
struct Term {
    coeff: f64,
    factors: Vec<(usize, i32)>,
}

impl Term {
    #[inline]
    fn value(&self, x: &[f64]) -> f64 {
        let mut v = self.coeff;
        for &(j, k) in &self.factors {
            v *= if k == 1 { x[j] } else { x[j].powi(k) };
        }
        v
    }
}

#[derive(Clone, Debug)]
struct CompiledPoly(Vec<Term>);

impl CompiledPoly {
    fn new(p: &Poly) -> Self {
        CompiledPoly(
            p.terms()
                .map(|(e, c)| Term {
                    coeff: to_f64(c),
                    factors: e.0.iter().enumerate().filter(|(_, k)| **k > 0).map(|(j, k)| (j, *k as i32)).collect(),
                })
                .collect(),
        )
    }

    #[inline]
    fn value(&self, x: &[f64]) -> f64 {
        self.0.iter().map(|t| t.value(x)).sum()
    }

    fn magnitude(&self, x: &[f64]) -> f64 {
        self.0.iter().map(|t| t.value(x).abs()).sum()
    }
}

/// A system lowered to f64 coefficients. Coefficients are rounded once, here.
#[derive(Clone, Debug)]
pub struct CompiledSystem {
    n: usize,
    eqs: Vec<CompiledPoly>,
    // non-zero Jacobian entries (row, col, polynomial)
    jac: Vec<(usize, usize, CompiledPoly)>,
    div: CompiledPoly,
}

impl CompiledSystem {
    pub fn new(s: &PolySystem) -> Self {
        let mut jac = Vec::new();
        for (i, row) in s.jacobian().iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                if !p.is_zero() {
                    jac.push((i, j, CompiledPoly::new(p)));
                }
            }
        }
        CompiledSystem {
            n: s.dim(),
            eqs: s.eqs().iter().map(CompiledPoly::new).collect(),
            jac,
            div: CompiledPoly::new(&s.divergence()),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, p) in out.iter_mut().zip(&self.eqs) {
            *o = p.value(x);
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.eval_into(x, &mut out);
        out
    }

    /// Row-major `n*n` Jacobian.
    #[inline]
    pub fn jacobian_into(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (i, j, p) in &self.jac {
            out[i * self.n + j] = p.value(x);
        }
    }

    pub fn jacobian(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n * self.n];
        self.jacobian_into(x, &mut out);
        out
    }

    pub fn divergence(&self, x: &[f64]) -> f64 {
        self.div.value(x)
    }

    /// `Σ |term|` per equation, the natural scale for judging `f(x) ≈ 0`.
    pub fn term_magnitudes(&self, x: &[f64]) -> Vec<f64> {
        self.eqs.iter().map(|p| p.magnitude(x)).collect()
    }
}
