//! Per-piece preconditions and the parameter inequalities that make each
//! piece chemical after translation.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::Serialize;

use super::{Piece, PieceKind, QcmPlan};
use crate::error::{Error, Result};
use crate::polysys::{apply_affine, AffineMap, Exps, Poly, PolySystem};
use crate::rational::{qi, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintStatus {
    Satisfied,
    /// Both sides equal: enough for `>=`, not for a strict `>`.
    Tight,
    Violated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstraintCheck {
    pub equation: usize,
    pub piece: usize,
    /// `linear-damping`, `quadratic-diagonal` or `quadratic-cross`.
    pub name: &'static str,
    /// The index `j` of a cross inequality.
    pub index: Option<usize>,
    pub strict: bool,
    #[serde(with = "crate::rational::serde_q")]
    pub lhs: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub rhs: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub margin: Q,
    pub status: ConstraintStatus,
}

impl ConstraintCheck {
    fn new(equation: usize, piece: usize, name: &'static str, index: Option<usize>, strict: bool, lhs: Q, rhs: Q) -> Self {
        let margin = &lhs - &rhs;
        let status = if margin.is_positive() {
            ConstraintStatus::Satisfied
        } else if margin.is_zero() {
            ConstraintStatus::Tight
        } else {
            ConstraintStatus::Violated
        };
        ConstraintCheck { equation, piece, name, index, strict, lhs, rhs, margin, status }
    }

    pub fn describe(&self, vars: &[String]) -> String {
        let rel = if self.strict { ">" } else { ">=" };
        let what = match (self.name, self.index) {
            ("quadratic-cross", Some(j)) => format!("quadratic-cross[{}]", vars[j]),
            (n, _) => n.to_string(),
        };
        format!(
            "equation {} piece {} {}: {} {} {}",
            self.equation + 1,
            self.piece + 1,
            what,
            crate::rational::format_rational(&self.lhs),
            rel,
            crate::rational::format_rational(&self.rhs)
        )
    }
}

/// Constant term of a piece (plus its own perturbation) after translation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PieceConstant {
    pub equation: usize,
    pub piece: usize,
    #[serde(with = "crate::rational::serde_q")]
    pub value: Q,
}

fn linear_coeffs(p: &Poly, i: usize, kind: PieceKind) -> Result<()> {
    let n = p.nvars();
    for (e, c) in p.terms() {
        match e.degree() {
            0 => {}
            1 => {
                let j = e.support().next().unwrap();
                if j != i && !c.is_positive() {
                    return Err(Error::arg(format!(
                        "equation {}: {} piece needs positive off-diagonal linear terms",
                        i + 1,
                        kind.name()
                    )));
                }
                if j == i && kind == PieceKind::LinearDamp && c.is_positive() {
                    return Err(Error::arg(format!(
                        "equation {}: linear_damp piece needs a non-positive diagonal term",
                        i + 1
                    )));
                }
            }
            _ => {
                return Err(Error::arg(format!(
                    "equation {}: {} piece must be linear (dimension {n})",
                    i + 1,
                    kind.name()
                )))
            }
        }
    }
    Ok(())
}

/// `piece + ε fill`, the polynomial a quadratic piece is checked on.
pub(super) fn quadratic_q(plan: &QcmPlan, i: usize, piece: &Piece) -> Poly {
    let mut q = plan.base.eq(i).select(piece.monomials.iter());
    if let Some(fill) = &piece.fill {
        q.add_assign(&fill.scale(&plan.epsilon));
    }
    q
}

fn quadratic_form(q: &Poly, i: usize) -> Result<()> {
    for (e, c) in q.terms() {
        let d = e.degree();
        if d > 2 {
            return Err(Error::arg(format!(
                "equation {}: quadratic_chem piece has a monomial of degree {d}",
                i + 1
            )));
        }
        if d < 2 {
            continue;
        }
        let cross_with_i = e.0[i] == 1;
        let ok = if cross_with_i { !c.is_positive() } else { !c.is_negative() };
        if !ok {
            return Err(Error::arg(format!(
                "equation {}: quadratic_chem piece has a quadratic of the wrong sign ({:?})",
                i + 1,
                e.0
            )));
        }
    }
    Ok(())
}

pub(super) fn check_form(plan: &QcmPlan, i: usize, piece: &Piece) -> Result<()> {
    let base: &PolySystem = &plan.base;
    let p = base.eq(i).select(piece.monomials.iter());
    match piece.kind {
        PieceKind::Universal => Ok(()),
        PieceKind::LinearQuad | PieceKind::LinearDamp => linear_coeffs(&p, i, piece.kind),
        PieceKind::QuadraticChem => quadratic_form(&quadratic_q(plan, i, piece), i),
    }
}

fn coeff(p: &Poly, e: Vec<u32>) -> Q {
    p.coeff(&Exps(e)).cloned().unwrap_or_else(Q::zero)
}

fn pair(n: usize, j: usize, k: usize) -> Vec<u32> {
    let mut e = vec![0; n];
    e[j] += 1;
    e[k] += 1;
    e
}

pub(super) fn quadratic_checks(plan: &QcmPlan, i: usize, k: usize, q: &Poly, out: &mut Vec<ConstraintCheck>) {
    let n = q.nvars();
    let a = &plan.a;
    let mut jset = BTreeSet::new();
    for (e, _) in q.terms().filter(|(e, _)| e.degree() == 2) {
        jset.extend(e.support().filter(|&j| j != i));
    }
    let beta_ii = coeff(q, pair(n, i, i));
    let mut rhs = Q::zero();
    for &j in &jset {
        rhs += -coeff(q, pair(n, i, j)) * &a[j];
    }
    out.push(ConstraintCheck::new(i, k, "quadratic-diagonal", None, false, beta_ii * &a[i], rhs));
    for &j in &jset {
        let lhs = -coeff(q, pair(n, i, j)) * &a[i];
        let mut rhs = qi(2) * coeff(q, pair(n, j, j)) * &a[j];
        for &l in jset.iter().filter(|&&l| l != j) {
            rhs += coeff(q, pair(n, j, l)) * &a[l];
        }
        out.push(ConstraintCheck::new(i, k, "quadratic-cross", Some(j), false, lhs, rhs));
    }
}

pub(super) fn evaluate(plan: &QcmPlan) -> Result<(Vec<ConstraintCheck>, Vec<PieceConstant>)> {
    let n = plan.base.dim();
    let shift = AffineMap::translation(plan.translation());
    let mut checks = Vec::new();
    let mut constants = Vec::new();
    for (i, pieces) in plan.pieces.iter().enumerate() {
        for (k, piece) in pieces.iter().enumerate() {
            let p = plan.base.eq(i).select(piece.monomials.iter());
            let own = match piece.kind {
                PieceKind::Universal => continue,
                PieceKind::LinearDamp => {
                    let diag = coeff(&p, Exps::unit(n, i).0);
                    let damp = if diag.is_zero() { plan.epsilon.clone() } else { Q::zero() };
                    let lhs = (-&diag + &damp) * &plan.a[i];
                    let mut rhs = Q::zero();
                    for j in (0..n).filter(|&j| j != i) {
                        rhs += coeff(&p, Exps::unit(n, j).0) * &plan.a[j];
                    }
                    checks.push(ConstraintCheck::new(i, k, "linear-damping", None, true, lhs, rhs));
                    p.sub(&Poly::var(n, i).scale(&damp))
                }
                PieceKind::LinearQuad => {
                    let xi = Poly::var(n, i);
                    p.add(&xi.mul(&xi).scale(&plan.epsilon))
                }
                PieceKind::QuadraticChem => {
                    let q = quadratic_q(plan, i, piece);
                    quadratic_checks(plan, i, k, &q, &mut checks);
                    q
                }
            };
            // embed the single equation as a system to reuse the substitution
            let mut eqs = vec![Poly::zero(n); n];
            eqs[i] = own;
            let sys = PolySystem::new(plan.base.vars().to_vec(), eqs)?;
            let moved = apply_affine(&sys, &shift)?;
            constants.push(PieceConstant { equation: i, piece: k, value: moved.coeff(i, &vec![0; n]) });
        }
    }
    Ok((checks, constants))
}
