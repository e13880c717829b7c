//! Chemical reaction networks under mass-action kinetics.

use std::collections::HashMap;
use std::fmt;

use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polysys::{Complexity, Exps, Poly, PolySystem};
use crate::rational::{format_rational, parse_rational, Q};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Reaction {
    pub reactants: Vec<u32>,
    pub products: Vec<u32>,
    #[serde(with = "crate::rational::serde_q")]
    pub rate: Q,
}

impl Reaction {
    pub fn new(reactants: Vec<u32>, products: Vec<u32>, rate: Q) -> Result<Self> {
        if reactants.len() != products.len() {
            return Err(Error::Dimension { expected: reactants.len(), got: products.len() });
        }
        if !rate.is_positive() {
            return Err(Error::arg("reaction rates must be positive"));
        }
        if reactants == products {
            return Err(Error::arg("reaction does not change any species"));
        }
        Ok(Reaction { reactants, products, rate })
    }

    pub fn degree(&self) -> u32 {
        self.reactants.iter().sum()
    }

    /// Net change `ν' - ν` per species.
    pub fn change(&self) -> Vec<i64> {
        self.products.iter().zip(&self.reactants).map(|(p, r)| *p as i64 - *r as i64).collect()
    }

    /// The single species changed by ±1, if the reaction is canonical.
    fn canonical_species(&self) -> Option<usize> {
        let nz: Vec<(usize, i64)> =
            self.change().into_iter().enumerate().filter(|(_, d)| *d != 0).collect();
        match nz.as_slice() {
            [(k, d)] if d.abs() == 1 => Some(*k),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Crn {
    pub species: Vec<String>,
    pub reactions: Vec<Reaction>,
}

fn species_names(vars: &[String]) -> Vec<String> {
    vars.iter().map(|v| v.to_uppercase()).collect()
}

fn var_names(species: &[String]) -> Vec<String> {
    species.iter().map(|v| v.to_lowercase()).collect()
}

/// One reaction per monomial: `α x^ν` in equation `i` gives
/// `ν -> ν + sign(α) e_i` at rate `|α|`.
pub fn canonical_crn(s: &PolySystem) -> Result<Crn> {
    let (ok, violations) = s.is_chemical();
    if !ok {
        let v = &violations[0];
        return Err(Error::NotChemical {
            equation: v.equation + 1,
            monomial: v.monomial.text(s.vars()),
        });
    }
    let mut reactions = Vec::new();
    for (i, p) in s.eqs().iter().enumerate() {
        for (e, c) in p.terms() {
            let mut products = e.0.clone();
            if c.is_positive() {
                products[i] += 1;
            } else {
                products[i] -= 1;
            }
            reactions.push(Reaction { reactants: e.0.clone(), products, rate: c.abs() });
        }
    }
    Ok(Crn { species: species_names(s.vars()), reactions })
}

/// Merge canonical reactions that share reactant complex and rate. Within
/// such a class, reactions touching a species that another member also
/// touches are left unfused.
pub fn fuse(c: &Crn) -> Result<Crn> {
    let mut touched = Vec::with_capacity(c.reactions.len());
    for r in &c.reactions {
        touched.push(r.canonical_species().ok_or_else(|| Error::arg("fuse needs a canonical network"))?);
    }
    let mut classes: HashMap<(&[u32], &Q), Vec<usize>> = HashMap::new();
    for (k, r) in c.reactions.iter().enumerate() {
        classes.entry((&r.reactants, &r.rate)).or_default().push(k);
    }
    // position -> replacement (None = drop, Some(r) = emit)
    let mut emit: Vec<Option<Reaction>> = c.reactions.iter().cloned().map(Some).collect();
    for members in classes.values() {
        let fusable: Vec<usize> = members
            .iter()
            .copied()
            .filter(|&k| members.iter().filter(|&&m| touched[m] == touched[k]).count() == 1)
            .collect();
        if fusable.len() < 2 {
            continue;
        }
        let first = fusable[0];
        let mut products = c.reactions[first].reactants.clone();
        for &k in &fusable {
            products[touched[k]] = c.reactions[k].products[touched[k]];
        }
        for &k in &fusable[1..] {
            emit[k] = None;
        }
        emit[first] = Some(Reaction {
            reactants: c.reactions[first].reactants.clone(),
            products,
            rate: c.reactions[first].rate.clone(),
        });
    }
    Ok(Crn { species: c.species.clone(), reactions: emit.into_iter().flatten().collect() })
}

/// Mass-action ODEs of a network.
pub fn crn_to_cds(c: &Crn) -> Result<PolySystem> {
    let n = c.species.len();
    let mut eqs = vec![Poly::zero(n); n];
    for r in &c.reactions {
        for (i, d) in r.change().into_iter().enumerate() {
            if d != 0 {
                eqs[i].add_term(Exps(r.reactants.clone()), &r.rate * Q::from_integer(d.into()));
            }
        }
    }
    PolySystem::new(var_names(&c.species), eqs)
}

/// `(R_total, R_2, ..., R_n)` counted by reaction degree.
pub fn crn_complexity(c: &Crn) -> Complexity {
    Complexity::from_degrees(c.reactions.iter().map(Reaction::degree))
}

fn complex_text(v: &[u32], species: &[String]) -> String {
    let parts: Vec<String> = v
        .iter()
        .zip(species)
        .filter(|(k, _)| **k > 0)
        .map(|(k, s)| if *k == 1 { s.clone() } else { format!("{k} {s}") })
        .collect();
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

impl Crn {
    pub fn dim(&self) -> usize {
        self.species.len()
    }

    pub fn render(&self) -> String {
        self.to_string()
    }

    /// Parse one reaction per line (`X + Y --1--> 2 Y`); blank lines and
    /// lines starting with `#` are skipped.
    pub fn parse(text: &str, species: &[&str]) -> Result<Crn> {
        if let Some(bad) = species.iter().find(|s| **s == "0" || s.is_empty()) {
            return Err(Error::parse(format!("`{bad}` is not a valid species name")));
        }
        let n = species.len();
        let complex = |s: &str, line: usize| -> Result<Vec<u32>> {
            let s = s.trim();
            let mut v = vec![0u32; n];
            if s == "0" {
                return Ok(v);
            }
            for term in s.split('+') {
                let toks: Vec<&str> = term.split_whitespace().collect();
                let (k, name) = match toks.as_slice() {
                    [name] => (1, *name),
                    [k, name] => (
                        k.parse::<u32>()
                            .map_err(|_| Error::parse(format!("line {line}: bad coefficient `{k}`")))?,
                        *name,
                    ),
                    _ => return Err(Error::parse(format!("line {line}: cannot read `{}`", term.trim()))),
                };
                let idx = species
                    .iter()
                    .position(|sp| *sp == name)
                    .ok_or_else(|| Error::parse(format!("line {line}: unknown species `{name}`")))?;
                v[idx] += k;
            }
            Ok(v)
        };
        let mut reactions = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (lhs, rest) = line
                .split_once("--")
                .ok_or_else(|| Error::parse(format!("line {}: missing `--rate-->`", ln + 1)))?;
            let (rate, rhs) = rest
                .split_once("-->")
                .ok_or_else(|| Error::parse(format!("line {}: missing `-->`", ln + 1)))?;
            let r = Reaction::new(complex(lhs, ln + 1)?, complex(rhs, ln + 1)?, parse_rational(rate)?)
                .map_err(|e| Error::parse(format!("line {}: {e}", ln + 1)))?;
            reactions.push(r);
        }
        Ok(Crn { species: species.iter().map(|s| s.to_string()).collect(), reactions })
    }
}

impl fmt::Display for Crn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.reactions {
            writeln!(
                f,
                "{} --{}--> {}",
                complex_text(&r.reactants, &self.species),
                format_rational(&r.rate),
                complex_text(&r.products, &self.species)
            )?;
        }
        Ok(())
    }
}
