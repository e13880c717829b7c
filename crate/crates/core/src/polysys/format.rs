//! JSON interchange format for systems.
//!
//! ```json
//! {"dim": 3, "vars": ["x","y","z"],
//!  "eqs": [[{"coeff": "1/5", "exps": [0,0,0]}, ...], ...]}
//! ```
//! Coefficients are strings (`"5700.000002"`, `"10/27"`) or integers.
//! Repeated exponent vectors in one equation are summed.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Monomial, Poly, PolySystem};
use crate::error::{Error, Result};

pub type MonomialFile = Monomial;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub dim: usize,
    pub vars: Vec<String>,
    pub eqs: Vec<Vec<MonomialFile>>,
}

impl SystemFile {
    pub fn into_system(self) -> Result<PolySystem> {
        let n = self.dim;
        if n == 0 {
            return Err(Error::parse("dim must be positive"));
        }
        if self.vars.len() != n || self.eqs.len() != n {
            return Err(Error::parse(format!(
                "dim is {n} but found {} vars and {} equations",
                self.vars.len(),
                self.eqs.len()
            )));
        }
        let mut eqs = Vec::with_capacity(n);
        for (i, terms) in self.eqs.into_iter().enumerate() {
            for m in &terms {
                if m.exps.len() != n {
                    return Err(Error::parse(format!(
                        "equation {}: exponent vector {:?} has length {}, expected {n}",
                        i + 1,
                        m.exps,
                        m.exps.len()
                    )));
                }
            }
            eqs.push(Poly::from_terms(n, terms.into_iter().map(|m| (m.coeff, m.exps)))?);
        }
        PolySystem::new(self.vars, eqs)
    }
}

impl From<&PolySystem> for SystemFile {
    fn from(s: &PolySystem) -> Self {
        SystemFile {
            dim: s.dim(),
            vars: s.vars().to_vec(),
            eqs: s
                .eqs()
                .iter()
                .map(|p| p.terms().map(|(e, c)| Monomial::new(c.clone(), e.0.clone())).collect())
                .collect(),
        }
    }
}

impl PolySystem {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SystemFile::from(self)).expect("serializable")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(SystemFile::from(self)).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<PolySystem> {
        let f: SystemFile = serde_json::from_str(text)?;
        f.into_system()
    }

    pub fn from_json_value(v: serde_json::Value) -> Result<PolySystem> {
        let f: SystemFile = serde_json::from_value(v)?;
        f.into_system()
    }

    pub fn read(path: &Path) -> Result<PolySystem> {
        PolySystem::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}
