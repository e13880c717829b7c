//! Quasi-chemical maps: perturb a system piece by piece, translate it far into
//! the positive orthant, optionally rescale, and check that the result is
//! chemical.

mod constraints;
mod file;
mod quadratic;

use std::collections::BTreeSet;

use num_traits::{One, Signed};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polysys::{apply_affine, AffineMap, Exps, Poly, PolySystem, Violation};
use crate::rational::Q;

pub use constraints::{ConstraintCheck, ConstraintStatus, PieceConstant};
pub use file::{BaseRef, PieceFile, PlanFile};
pub use quadratic::{normalize_leading, quadratic_case_plan, LeadingCase};

/// How a piece of an equation is perturbed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PieceKind {
    /// Adds `(μ/a_i) x_i r(x)`; works for any polynomial.
    Universal,
    /// Adds `ε x_i²` to a linear piece with non-negative off-diagonal terms.
    LinearQuad,
    /// Adds `-A ε x_i` (`A = 1` iff the piece has no `x_i` term) to a linear
    /// piece with non-positive diagonal and non-negative off-diagonal terms.
    LinearDamp,
    /// Adds `ε · fill`; the quadratic part must have the sign pattern
    /// `x_i²: ≥ 0`, `x_i x_j: ≤ 0`, other quadratics `≥ 0`.
    QuadraticChem,
}

impl PieceKind {
    pub fn name(self) -> &'static str {
        match self {
            PieceKind::Universal => "universal",
            PieceKind::LinearQuad => "linear_quad",
            PieceKind::LinearDamp => "linear_damp",
            PieceKind::QuadraticChem => "quadratic_chem",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        Ok(match s {
            "universal" => PieceKind::Universal,
            "linear_quad" => PieceKind::LinearQuad,
            "linear_damp" => PieceKind::LinearDamp,
            "quadratic_chem" => PieceKind::QuadraticChem,
            other => return Err(Error::parse(format!("unknown piece kind `{other}`"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub kind: PieceKind,
    pub monomials: Vec<Exps>,
    /// Extra polynomial added as `ε · fill` (quadratic pieces only).
    pub fill: Option<Poly>,
}

impl Piece {
    pub fn new(kind: PieceKind, monomials: Vec<Exps>) -> Self {
        Piece { kind, monomials, fill: None }
    }

    pub fn with_fill(mut self, fill: Poly) -> Self {
        self.fill = Some(fill);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QcmPlan {
    pub base: PolySystem,
    /// One list of pieces per equation.
    pub pieces: Vec<Vec<Piece>>,
    pub epsilon: Q,
    pub mu: Q,
    pub a: Vec<Q>,
    pub post_scale: Option<Vec<Q>>,
    /// Human-readable record of automatic parameter changes.
    pub adjustments: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct QcmReport {
    pub perturbed: PolySystem,
    pub translated: PolySystem,
    pub rescaled: PolySystem,
    /// Result of the monomial-by-monomial check on the rescaled system.
    pub chemical: bool,
    pub violations: Vec<Violation>,
    pub constraints: Vec<ConstraintCheck>,
    pub piece_constants: Vec<PieceConstant>,
    pub adjustments: Vec<String>,
    pub notes: Vec<String>,
}

impl QcmReport {
    /// Chemical and no constraint strictly violated.
    pub fn feasible(&self) -> bool {
        self.chemical && !self.constraints.iter().any(|c| c.status == ConstraintStatus::Violated)
    }

    pub fn failing_constraints(&self) -> impl Iterator<Item = &ConstraintCheck> {
        self.constraints.iter().filter(|c| c.status == ConstraintStatus::Violated)
    }
}

impl QcmPlan {
    /// Every equation handled by one universal piece.
    pub fn universal(base: PolySystem, a: Vec<Q>, mu: Q) -> Result<Self> {
        let pieces = base
            .eqs()
            .iter()
            .map(|p| vec![Piece::new(PieceKind::Universal, p.terms().map(|(e, _)| e.clone()).collect())])
            .collect();
        let plan = QcmPlan {
            base,
            pieces,
            epsilon: Q::one(),
            mu,
            a,
            post_scale: None,
            adjustments: Vec::new(),
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn translation(&self) -> Vec<Q> {
        self.a.iter().map(|ai| ai / &self.mu).collect()
    }

    pub fn translation_map(&self) -> AffineMap {
        AffineMap::translation(self.translation())
    }

    /// Translation followed by the optional rescale, as one map.
    pub fn full_map(&self) -> Result<AffineMap> {
        let t = self.translation_map();
        match &self.post_scale {
            Some(s) => t.then(&AffineMap::scaling(s.clone())?),
            None => Ok(t),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.base.dim();
        if !self.epsilon.is_positive() || !self.mu.is_positive() {
            return Err(Error::arg("epsilon and mu must be positive"));
        }
        if self.a.len() != n {
            return Err(Error::Dimension { expected: n, got: self.a.len() });
        }
        if self.a.iter().any(|x| !x.is_positive()) {
            return Err(Error::arg("all a_i must be positive"));
        }
        if let Some(s) = &self.post_scale {
            if s.len() != n {
                return Err(Error::Dimension { expected: n, got: s.len() });
            }
            if s.iter().any(|x| !x.is_positive()) {
                return Err(Error::arg("post_scale entries must be positive"));
            }
        }
        if self.pieces.len() != n {
            return Err(Error::Dimension { expected: n, got: self.pieces.len() });
        }
        for (i, pieces) in self.pieces.iter().enumerate() {
            let mut seen = BTreeSet::new();
            for piece in pieces {
                for e in &piece.monomials {
                    if e.len() != n {
                        return Err(Error::Dimension { expected: n, got: e.len() });
                    }
                    if !self.base.eq(i).contains(e) {
                        return Err(Error::arg(format!(
                            "equation {}: monomial {:?} is not in the system",
                            i + 1,
                            e.0
                        )));
                    }
                    if !seen.insert(e.clone()) {
                        return Err(Error::arg(format!(
                            "equation {}: monomial {:?} appears in two pieces",
                            i + 1,
                            e.0
                        )));
                    }
                }
                if piece.fill.is_some() && piece.kind != PieceKind::QuadraticChem {
                    return Err(Error::arg("only quadratic_chem pieces take a fill"));
                }
                constraints::check_form(self, i, piece)?;
            }
            if seen.len() != self.base.eq(i).len() {
                return Err(Error::arg(format!(
                    "equation {}: pieces do not cover every monomial",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    fn piece_poly(&self, i: usize, piece: &Piece) -> Poly {
        self.base.eq(i).select(piece.monomials.iter())
    }

    /// The perturbation `p_i` of every equation.
    pub fn perturbation(&self) -> PolySystem {
        let n = self.base.dim();
        self.base.map_eqs(|i, _| {
            let xi = Poly::var(n, i);
            let mut p = Poly::zero(n);
            for piece in &self.pieces[i] {
                let f = self.piece_poly(i, piece);
                match piece.kind {
                    PieceKind::Universal => {
                        p.add_assign(&xi.mul(&f).scale(&(&self.mu / &self.a[i])));
                    }
                    PieceKind::LinearQuad => {
                        p.add_assign(&xi.mul(&xi).scale(&self.epsilon));
                    }
                    PieceKind::LinearDamp => {
                        if !f.contains(&Exps::unit(n, i)) {
                            p.add_assign(&xi.scale(&-&self.epsilon));
                        }
                    }
                    PieceKind::QuadraticChem => {
                        if let Some(fill) = &piece.fill {
                            p.add_assign(&fill.scale(&self.epsilon));
                        }
                    }
                }
            }
            p
        })
    }

    pub fn execute(&self) -> Result<QcmReport> {
        self.validate()?;
        let perturbed = self.base.add(&self.perturbation())?;
        let translated = apply_affine(&perturbed, &self.translation_map())?;
        let rescaled = match &self.post_scale {
            Some(s) => apply_affine(&translated, &AffineMap::scaling(s.clone())?)?,
            None => translated.clone(),
        };
        let (chemical, violations) = rescaled.is_chemical();
        let (constraints, piece_constants) = constraints::evaluate(self)?;
        let mut notes = Vec::new();
        if let Some(c) = constraints.iter().find(|c| c.status == ConstraintStatus::Tight) {
            notes.push(format!(
                "equation {}: {} inequality holds with equality",
                c.equation + 1,
                c.name
            ));
        }
        Ok(QcmReport {
            perturbed,
            translated,
            rescaled,
            chemical,
            violations,
            constraints,
            piece_constants,
            adjustments: self.adjustments.clone(),
            notes,
        })
    }
}

/// The universal construction: each equation gains `(μ/a_i) x_i f_i(x)`.
pub fn universal_qcm(s: &PolySystem, a: &[Q], mu: &Q) -> Result<QcmReport> {
    QcmPlan::universal(s.clone(), a.to_vec(), mu.clone())?.execute()
}

/// Chemicality of `s` after the shift `x̄ = x + T`.
pub fn verify_chemical_under_translation(s: &PolySystem, t: &[Q]) -> Result<(bool, Vec<Violation>)> {
    if t.len() != s.dim() {
        return Err(Error::Dimension { expected: s.dim(), got: t.len() });
    }
    Ok(apply_affine(s, &AffineMap::translation(t.to_vec()))?.is_chemical())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn linear_part() -> PolySystem {
        PolySystem::parse(&["x", "y", "z"], &["1/5 - 57/10 x", "x + z", "-y + 1/5 z"]).unwrap()
    }

    fn e(v: [u32; 3]) -> Exps {
        Exps(v.to_vec())
    }

    fn refined_plan(a: Q, b: Q, c: Q, eps: Q, mu: Q) -> QcmPlan {
        QcmPlan {
            base: linear_part(),
            pieces: vec![
                vec![Piece::new(PieceKind::LinearDamp, vec![e([0, 0, 0]), e([1, 0, 0])])],
                vec![Piece::new(PieceKind::LinearDamp, vec![e([1, 0, 0]), e([0, 0, 1])])],
                vec![Piece::new(PieceKind::Universal, vec![e([0, 1, 0]), e([0, 0, 1])])],
            ],
            epsilon: eps,
            mu,
            a: vec![a, b, c],
            post_scale: None,
            adjustments: vec![],
        }
    }

    #[test]
    fn universal_on_linear_part() {
        let r = universal_qcm(&linear_part(), &[qi(1), qi(3), qi(1)], &q(1, 100)).unwrap();
        assert!(r.chemical);
        assert_eq!(r.rescaled.complexity().label(), "(8,5)");
        let zero = PolySystem::zero(PolySystem::default_vars(3));
        let r0 = universal_qcm(&zero, &vec![qi(1); 3], &qi(1)).unwrap();
        assert!(r0.chemical && r0.rescaled.complexity().total == 0);
    }

    #[test]
    fn universal_rejects_bad_parameters() {
        assert!(universal_qcm(&linear_part(), &[qi(1), qi(0), qi(1)], &qi(1)).is_err());
        assert!(universal_qcm(&linear_part(), &vec![qi(1); 3], &qi(-1)).is_err());
    }

    #[test]
    fn refined_linear_plan() {
        let eps = q(1, 10);
        // b strictly above (a + c)/eps keeps the constant term alive
        let r = refined_plan(qi(1), qi(21), qi(1), eps.clone(), q(1, 1000)).execute().unwrap();
        assert!(r.feasible(), "{:?}", r.violations);
        assert_eq!(r.rescaled.complexity().label(), "(9,2)");
        // constant of equation 2 is (eps b - a - c)/mu
        assert_eq!(r.translated.coeff(1, &[0, 0, 0]), (q(21, 10) - qi(2)) * qi(1000));
        assert_eq!(r.translated.coeff(1, &[0, 1, 0]), -eps);
    }

    #[test]
    fn violated_damping_constraint() {
        let eps = q(1, 10);
        let b = q(1, 10) * qi(2) / &eps;
        let r = refined_plan(qi(1), b, qi(1), eps, q(1, 1000)).execute().unwrap();
        assert!(!r.chemical);
        assert!(r.violations.iter().any(|v| v.equation == 1 && v.monomial.degree() == 0));
        assert!(r.failing_constraints().any(|c| c.equation == 1));
    }

    #[test]
    fn universal_rossler_lifts_one_quadratic() {
        let s = PolySystem::parse(
            &["x", "y", "z"],
            &["1/5 - 57/10 x + x*y", "-x - z", "y + 1/5 z"],
        )
        .unwrap();
        let r = universal_qcm(&s, &vec![qi(1); 3], &q(1, 1000)).unwrap();
        assert!(r.chemical);
        assert_eq!(r.rescaled.complexity().count(3), 1);
    }

    #[test]
    fn malformed_splittings_are_rejected() {
        let mut p = refined_plan(qi(1), qi(30), qi(1), q(1, 10), q(1, 1000));
        p.pieces[2][0].monomials.pop();
        assert!(p.execute().is_err());
        let mut p = refined_plan(qi(1), qi(30), qi(1), q(1, 10), q(1, 1000));
        p.pieces[0].push(Piece::new(PieceKind::Universal, vec![e([1, 0, 0])]));
        assert!(p.execute().is_err());
        // positive diagonal term cannot be damped
        let mut p = refined_plan(qi(1), qi(30), qi(1), q(1, 10), q(1, 1000));
        p.pieces[2][0].kind = PieceKind::LinearDamp;
        assert!(p.execute().is_err());
    }

    #[test]
    fn translation_helper() {
        let s = PolySystem::parse(&["x", "y", "z"], &["x^2 - 1", "0", "0"]).unwrap();
        assert!(!verify_chemical_under_translation(&s, &vec![qi(0); 3]).unwrap().0);
        assert!(verify_chemical_under_translation(&s, &[qi(2), qi(0), qi(0)]).unwrap().0);
        assert!(verify_chemical_under_translation(&s, &[qi(2)]).is_err());
    }
}
