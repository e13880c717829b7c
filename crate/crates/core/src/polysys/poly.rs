//! Sparse multivariate polynomials with exact rational coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Q};

/// Exponent vector, ordered graded-lexicographically: lower total degree
/// first, then larger leading exponents first (`x` before `y`, `x^2` before
/// `x*y`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exps(pub Vec<u32>);

impl Exps {
    pub fn zero(n: usize) -> Self {
        Exps(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Exps(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Exps) -> Exps {
        Exps(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Indices of variables with a non-zero exponent.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, e)| **e > 0).map(|(i, _)| i)
    }
}

impl Ord for Exps {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Exps {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in `nvars` variables. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exps, Q>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(Exps::zero(nvars), c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(Exps::unit(nvars, i), Q::one());
        p
    }

    pub fn monomial(exps: Exps, c: Q) -> Self {
        let mut p = Poly::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    /// Build from `(coeff, exps)` pairs; like terms are merged.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Q, Vec<u32>)>,
    {
        let mut p = Poly::zero(nvars);
        for (c, e) in terms {
            if e.len() != nvars {
                return Err(Error::Dimension { expected: nvars, got: e.len() });
            }
            p.add_term(Exps(e), c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Exps::degree).max()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Exps) -> Option<&Q> {
        self.terms.get(e)
    }

    pub fn contains(&self, e: &Exps) -> bool {
        self.terms.contains_key(e)
    }

    /// Adds `c * x^e`, dropping the entry if it cancels.
    pub fn add_term(&mut self, e: Exps, c: Q) {
        debug_assert_eq!(e.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Poly) {
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c.clone());
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, k: &Q) -> Poly {
        if k.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(e1.mul(e2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::constant(self.nvars, Q::one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            let k = e.0[var];
            if k == 0 {
                continue;
            }
            let mut d = e.clone();
            d.0[var] -= 1;
            out.add_term(d, c * Q::from_integer(k.into()));
        }
        out
    }

    /// Restriction to the monomials of a given total degree.
    pub fn homogeneous_part(&self, degree: u32) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.degree() == degree)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Restriction to a set of exponent vectors.
    pub fn select<'a, I: IntoIterator<Item = &'a Exps>>(&self, keys: I) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for e in keys {
            if let Some(c) = self.terms.get(e) {
                out.add_term(e.clone(), c.clone());
            }
        }
        out
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut v = crate::rational::to_f64(c);
                for (xi, &k) in x.iter().zip(&e.0) {
                    if k > 0 {
                        v *= xi.powi(k as i32);
                    }
                }
                v
            })
            .sum()
    }

    pub fn eval_exact(&self, x: &[Q]) -> Q {
        let mut acc = Q::zero();
        for (e, c) in &self.terms {
            let mut v = c.clone();
            for (xi, &k) in x.iter().zip(&e.0) {
                for _ in 0..k {
                    v *= xi;
                }
            }
            acc += v;
        }
        acc
    }

    /// Substitute `x_j -> subs[j]` for every variable.
    pub fn compose(&self, subs: &[Poly]) -> Poly {
        let n_out = subs.first().map(Poly::nvars).unwrap_or(self.nvars);
        let mut cache: Vec<Vec<Poly>> = subs
            .iter()
            .map(|p| vec![Poly::constant(n_out, Q::one()), p.clone()])
            .collect();
        let mut out = Poly::zero(n_out);
        for (e, c) in &self.terms {
            let mut term = Poly::constant(n_out, c.clone());
            for (j, &k) in e.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let powers = &mut cache[j];
                while powers.len() <= k as usize {
                    let next = powers.last().unwrap().mul(&subs[j]);
                    powers.push(next);
                }
                term = term.mul(&powers[k as usize]);
            }
            out.add_assign(&term);
        }
        out
    }

    /// Parse `1/5 - 57/10 x + x*y^2`. Factors may be separated by `*` or spaces.
    pub fn parse(expr: &str, vars: &[&str]) -> Result<Poly> {
        let n = vars.len();
        let mut out = Poly::zero(n);
        let cleaned = expr.replace('*', " ");
        let mut chunks: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut neg = false;
        for ch in cleaned.chars() {
            if ch == '+' || ch == '-' {
                // `1e-3`: the sign belongs to a numeric exponent
                let in_exponent = !current.ends_with(' ')
                    && current.split_whitespace().last().is_some_and(|tok| {
                        tok.len() > 1
                            && (tok.ends_with('e') || tok.ends_with('E'))
                            && tok[..tok.len() - 1]
                                .chars()
                                .all(|c| c.is_ascii_digit() || c == '.' || c == '/')
                    });
                if in_exponent {
                    current.push(ch);
                } else if current.trim().is_empty() {
                    if ch == '-' {
                        neg = !neg;
                    }
                } else {
                    chunks.push((neg, std::mem::take(&mut current)));
                    neg = ch == '-';
                }
                continue;
            }
            current.push(ch);
        }
        if !current.trim().is_empty() {
            chunks.push((neg, current));
        } else if !chunks.is_empty() || neg {
            return Err(Error::parse(format!("dangling sign in `{expr}`")));
        }
        if chunks.is_empty() {
            return Err(Error::parse(format!("empty expression `{expr}`")));
        }
        for (neg, chunk) in chunks {
            let mut coeff = Q::one();
            let mut exps = vec![0u32; n];
            for tok in chunk.split_whitespace() {
                if tok.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
                    coeff *= parse_rational(tok)?;
                    continue;
                }
                let (name, power) = match tok.split_once('^') {
                    Some((v, k)) => (
                        v,
                        k.parse::<u32>()
                            .map_err(|_| Error::parse(format!("bad power in `{tok}`")))?,
                    ),
                    None => (tok, 1),
                };
                let idx = vars
                    .iter()
                    .position(|v| *v == name)
                    .ok_or_else(|| Error::parse(format!("unknown variable `{name}` in `{expr}`")))?;
                exps[idx] += power;
            }
            if neg {
                coeff = -coeff;
            }
            out.add_term(Exps(exps), coeff);
        }
        Ok(out)
    }

    pub fn display<'a>(&'a self, vars: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, vars }
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    vars: &'a [String],
}

pub(crate) fn monomial_text(e: &Exps, vars: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &k) in e.0.iter().enumerate() {
        match k {
            0 => {}
            1 => parts.push(vars[i].clone()),
            _ => parts.push(format!("{}^{}", vars[i], k)),
        }
    }
    parts.join("*")
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.poly.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mono = monomial_text(e, self.vars);
            if mono.is_empty() {
                write!(f, "{}", format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{}", format_rational(&mag), mono)?;
            }
        }
        Ok(())
    }
}
