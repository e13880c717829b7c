//! Polynomial dynamical systems `dx/dt = f(x)` with exact coefficients.

mod affine;
mod compiled;
mod format;
mod poly;

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, Q};

pub use affine::{apply_affine, AffineMap};
pub use compiled::CompiledSystem;
pub use format::{MonomialFile, SystemFile};
pub use poly::{Exps, Poly};

/// A single term `coeff * x^exps`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Monomial {
    #[serde(with = "crate::rational::serde_q")]
    pub coeff: Q,
    pub exps: Vec<u32>,
}

impl Monomial {
    pub fn new(coeff: Q, exps: Vec<u32>) -> Self {
        Monomial { coeff, exps }
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn text(&self, vars: &[String]) -> String {
        let m = poly::monomial_text(&Exps(self.exps.clone()), vars);
        let c = format_rational(&self.coeff);
        match c.as_str() {
            _ if m.is_empty() => c,
            "1" => m,
            "-1" => format!("-{m}"),
            _ => format!("{c}*{m}"),
        }
    }
}

/// Def 2.1 for one monomial of equation `i` (0-based).
pub fn is_chemical_monomial(m: &Monomial, i: usize) -> Result<bool> {
    if i >= m.exps.len() {
        return Err(Error::Dimension { expected: m.exps.len(), got: i + 1 });
    }
    Ok(m.coeff.is_positive() || m.exps[i] >= 1)
}

/// Monomial counts: `total` and the number `M_d` of monomials of each degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Complexity {
    pub total: usize,
    pub by_degree: BTreeMap<u32, usize>,
}

impl Complexity {
    pub fn from_degrees<I: IntoIterator<Item = u32>>(degrees: I) -> Self {
        let mut by_degree = BTreeMap::new();
        let mut total = 0;
        for d in degrees {
            *by_degree.entry(d).or_insert(0) += 1;
            total += 1;
        }
        Complexity { total, by_degree }
    }

    pub fn max_degree(&self) -> u32 {
        self.by_degree.keys().copied().max().unwrap_or(0)
    }

    pub fn count(&self, degree: u32) -> usize {
        self.by_degree.get(&degree).copied().unwrap_or(0)
    }

    /// `(total,M2,...,Mn)`.
    pub fn label(&self) -> String {
        let mut parts = vec![self.total.to_string()];
        for d in 2..=self.max_degree() {
            parts.push(self.count(d).to_string());
        }
        format!("({})", parts.join(","))
    }
}

/// A violation of Def 2.1: equation index (0-based) and the offending term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub equation: usize,
    pub monomial: Monomial,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolySystem {
    vars: Vec<String>,
    eqs: Vec<Poly>,
}

impl PolySystem {
    pub fn new(vars: Vec<String>, eqs: Vec<Poly>) -> Result<Self> {
        if vars.is_empty() {
            return Err(Error::arg("system needs at least one variable"));
        }
        if eqs.len() != vars.len() {
            return Err(Error::Dimension { expected: vars.len(), got: eqs.len() });
        }
        for p in &eqs {
            if p.nvars() != vars.len() {
                return Err(Error::Dimension { expected: vars.len(), got: p.nvars() });
            }
        }
        Ok(PolySystem { vars, eqs })
    }

    /// Parse one expression per equation, e.g. `["-y - z", "x + 1/5 y", "1/5 + x*z - 57/10 z"]`.
    pub fn parse(vars: &[&str], exprs: &[&str]) -> Result<Self> {
        let eqs = exprs.iter().map(|e| Poly::parse(e, vars)).collect::<Result<Vec<_>>>()?;
        PolySystem::new(vars.iter().map(|s| s.to_string()).collect(), eqs)
    }

    /// Standard names: `x, y, z` up to three dimensions, `x1..xN` beyond.
    pub fn default_vars(n: usize) -> Vec<String> {
        if n <= 3 {
            ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect()
        } else {
            (1..=n).map(|i| format!("x{i}")).collect()
        }
    }

    pub fn zero(vars: Vec<String>) -> Self {
        let n = vars.len();
        PolySystem { vars, eqs: vec![Poly::zero(n); n] }
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn eqs(&self) -> &[Poly] {
        &self.eqs
    }

    pub fn eq(&self, i: usize) -> &Poly {
        &self.eqs[i]
    }

    pub fn with_vars(mut self, vars: Vec<String>) -> Result<Self> {
        if vars.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: vars.len() });
        }
        self.vars = vars;
        Ok(self)
    }

    pub fn map_eqs<F: FnMut(usize, &Poly) -> Poly>(&self, mut f: F) -> PolySystem {
        PolySystem {
            vars: self.vars.clone(),
            eqs: self.eqs.iter().enumerate().map(|(i, p)| f(i, p)).collect(),
        }
    }

    pub fn add(&self, other: &PolySystem) -> Result<PolySystem> {
        if other.dim() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: other.dim() });
        }
        Ok(self.map_eqs(|i, p| p.add(&other.eqs[i])))
    }

    pub fn degree(&self) -> u32 {
        self.eqs.iter().filter_map(Poly::degree).max().unwrap_or(0)
    }

    pub fn monomials(&self) -> impl Iterator<Item = (usize, Monomial)> + '_ {
        self.eqs.iter().enumerate().flat_map(|(i, p)| {
            p.terms().map(move |(e, c)| (i, Monomial::new(c.clone(), e.0.clone())))
        })
    }

    pub fn complexity(&self) -> Complexity {
        Complexity::from_degrees(self.monomials().map(|(_, m)| m.degree()))
    }

    pub fn violations(&self) -> Vec<Violation> {
        self.monomials()
            .filter(|(i, m)| !(m.coeff.is_positive() || m.exps[*i] >= 1))
            .map(|(equation, monomial)| Violation { equation, monomial })
            .collect()
    }

    /// Def 2.1 for the whole system, with every failing monomial.
    pub fn is_chemical(&self) -> (bool, Vec<Violation>) {
        let v = self.violations();
        (v.is_empty(), v)
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len())?;
        Ok(self.eqs.iter().map(|p| p.eval_f64(x)).collect())
    }

    pub fn evaluate_exact(&self, x: &[Q]) -> Result<Vec<Q>> {
        self.check_len(x.len())?;
        Ok(self.eqs.iter().map(|p| p.eval_exact(x)).collect())
    }

    /// Symbolic `∂f_i/∂x_j`, row-major.
    pub fn jacobian(&self) -> Vec<Vec<Poly>> {
        self.eqs
            .iter()
            .map(|p| (0..self.dim()).map(|j| p.derivative(j)).collect())
            .collect()
    }

    pub fn evaluate_jacobian(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.check_len(x.len())?;
        Ok(self
            .jacobian()
            .iter()
            .map(|row| row.iter().map(|p| p.eval_f64(x)).collect())
            .collect())
    }

    /// Divergence `tr ∇f` as a polynomial.
    pub fn divergence(&self) -> Poly {
        let mut out = Poly::zero(self.dim());
        for (i, p) in self.eqs.iter().enumerate() {
            out.add_assign(&p.derivative(i));
        }
        out
    }

    pub fn compile(&self) -> CompiledSystem {
        CompiledSystem::new(self)
    }

    /// Human-readable `dx/dt = ...` lines.
    pub fn pretty(&self) -> String {
        let mut s = String::new();
        for (v, p) in self.vars.iter().zip(&self.eqs) {
            s.push_str(&format!("d{v}/dt = {}\n", p.display(&self.vars)));
        }
        s
    }

    /// Coefficient of a monomial in equation `i` (zero if absent).
    pub fn coeff(&self, i: usize, exps: &[u32]) -> Q {
        self.eqs[i].coeff(&Exps(exps.to_vec())).cloned().unwrap_or_else(Q::zero)
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: n });
        }
        Ok(())
    }
}
