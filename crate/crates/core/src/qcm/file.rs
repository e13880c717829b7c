//! JSON form of a plan.
//!
//! ```json
//! {"base": {"catalog": "rossler-reflected"},
//!  "epsilon": "1e-3", "mu": "1e-2", "a": ["1000000", "1000", "1"],
//!  "post_scale": null,
//!  "pieces": [[{"kind": "quadratic_chem", "monomials": [[1,1,0]],
//!               "fill": [{"coeff": "1", "exps": [2,0,0]}]}, ...], ...]}
//! ```

use serde::{Deserialize, Serialize};

use super::{Piece, PieceKind, QcmPlan};
use crate::error::{Error, Result};
use crate::polysys::{Exps, Monomial, Poly, PolySystem, SystemFile};
use crate::rational::Q;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseRef {
    Catalog(String),
    System(SystemFile),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceFile {
    pub kind: String,
    pub monomials: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fill: Option<Vec<Monomial>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanFile {
    pub base: BaseRef,
    #[serde(with = "crate::rational::serde_q")]
    pub epsilon: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub mu: Q,
    #[serde(with = "crate::rational::serde_qvec")]
    pub a: Vec<Q>,
    #[serde(default, with = "crate::rational::serde_qvec_opt")]
    pub post_scale: Option<Vec<Q>>,
    pub pieces: Vec<Vec<PieceFile>>,
}

impl PlanFile {
    pub fn from_json(text: &str) -> Result<PlanFile> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Resolve the base (catalog ids are looked up with the plan's ε, μ) and
    /// build the plan.
    pub fn into_plan<F>(self, resolve: F) -> Result<QcmPlan>
    where
        F: FnOnce(&str, &Q, &Q) -> Result<PolySystem>,
    {
        let base = match self.base {
            BaseRef::Catalog(id) => resolve(&id, &self.epsilon, &self.mu)?,
            BaseRef::System(f) => f.into_system()?,
        };
        let n = base.dim();
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for eq in self.pieces {
            let mut out = Vec::with_capacity(eq.len());
            for p in eq {
                let kind = PieceKind::from_name(&p.kind)?;
                let monomials = p
                    .monomials
                    .into_iter()
                    .map(|e| {
                        if e.len() == n {
                            Ok(Exps(e))
                        } else {
                            Err(Error::parse(format!("exponent vector {e:?} has the wrong length")))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                let mut piece = Piece::new(kind, monomials);
                if let Some(fill) = p.fill {
                    if fill.iter().any(|m| m.exps.len() != n) {
                        return Err(Error::parse("fill monomial has the wrong length"));
                    }
                    piece = piece.with_fill(Poly::from_terms(n, fill.into_iter().map(|m| (m.coeff, m.exps)))?);
                }
                out.push(piece);
            }
            pieces.push(out);
        }
        let plan = QcmPlan {
            base,
            pieces,
            epsilon: self.epsilon,
            mu: self.mu,
            a: self.a,
            post_scale: self.post_scale,
            adjustments: Vec::new(),
        };
        plan.validate()?;
        Ok(plan)
    }

    /// Inline form of an existing plan, or one naming a catalog base.
    pub fn from_plan(plan: &QcmPlan, catalog_id: Option<&str>) -> PlanFile {
        PlanFile {
            base: match catalog_id {
                Some(id) => BaseRef::Catalog(id.to_string()),
                None => BaseRef::System(SystemFile::from(&plan.base)),
            },
            epsilon: plan.epsilon.clone(),
            mu: plan.mu.clone(),
            a: plan.a.clone(),
            post_scale: plan.post_scale.clone(),
            pieces: plan
                .pieces
                .iter()
                .map(|eq| {
                    eq.iter()
                        .map(|p| PieceFile {
                            kind: p.kind.name().to_string(),
                            monomials: p.monomials.iter().map(|e| e.0.clone()).collect(),
                            fill: p.fill.as_ref().map(|f| {
                                f.terms().map(|(e, c)| Monomial::new(c.clone(), e.0.clone())).collect()
                            }),
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    #[test]
    fn roundtrip_inline_plan() {
        let s = PolySystem::parse(&["x", "y", "z"], &["1/5 - 57/10 x", "x + z", "-y + 1/5 z"]).unwrap();
        let plan = QcmPlan::universal(s, vec![qi(1), qi(2), qi(3)], q(1, 100)).unwrap();
        let text = PlanFile::from_plan(&plan, None).to_json();
        let back = PlanFile::from_json(&text)
            .unwrap()
            .into_plan(|_, _, _| unreachable!())
            .unwrap();
        assert_eq!(back, plan);
    }

    #[test]
    fn bad_kind_is_parse_error() {
        let text = r#"{"base":{"catalog":"x"},"epsilon":"1","mu":"1","a":["1"],"pieces":[[{"kind":"magic","monomials":[[1]]}]]}"#;
        let err = PlanFile::from_json(text)
            .unwrap()
            .into_plan(|_, _, _| PolySystem::parse(&["x"], &["x"]))
            .unwrap_err();
        assert!(err.is_parse());
    }
}
