//! The quadratic-case construction: bring a designated quadratic monomial
//! into the first equation, then keep it quadratic while every other
//! quadratic is lifted to a cubic.

use num_traits::{Signed, Zero};
use serde::Serialize;

use super::{constraints, Piece, PieceKind, QcmPlan};
use crate::error::{Error, Result};
use crate::polysys::{apply_affine, AffineMap, Exps, Poly, PolySystem};
use crate::rational::{format_rational, qi, Q};

/// Which of the four target monomials heads the first equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LeadingCase {
    /// `+β x1²`
    OwnSquare,
    /// `-γ x1 x2`
    OwnCross,
    /// `+β x2²`
    OtherSquare,
    /// `+δ x2 x3`
    OtherCross,
}

impl LeadingCase {
    const ORDER: [LeadingCase; 4] =
        [LeadingCase::OwnSquare, LeadingCase::OwnCross, LeadingCase::OtherSquare, LeadingCase::OtherCross];

    fn matches(self, e: &Exps, i: usize) -> bool {
        if e.degree() != 2 {
            return false;
        }
        let own = e.0[i];
        let distinct = e.support().count();
        match self {
            LeadingCase::OwnSquare => own == 2,
            LeadingCase::OwnCross => own == 1,
            LeadingCase::OtherSquare => own == 0 && distinct == 1,
            LeadingCase::OtherCross => own == 0 && distinct == 2,
        }
    }

    /// The normalized first-equation monomial, with its required sign.
    fn target(self, n: usize) -> (Exps, bool) {
        let mut e = vec![0; n];
        let positive = match self {
            LeadingCase::OwnSquare => {
                e[0] = 2;
                true
            }
            LeadingCase::OwnCross => {
                e[0] = 1;
                e[1] = 1;
                false
            }
            LeadingCase::OtherSquare => {
                e[1] = 2;
                true
            }
            LeadingCase::OtherCross => {
                e[1] = 1;
                e[2] = 1;
                true
            }
        };
        (Exps(e), positive)
    }
}

fn find_leading(s: &PolySystem) -> Option<(LeadingCase, usize, Exps)> {
    for case in LeadingCase::ORDER {
        for i in 0..s.dim() {
            if let Some((e, _)) = s.eq(i).terms().find(|(e, _)| case.matches(e, i)) {
                return Some((case, i, e.clone()));
            }
        }
    }
    None
}

/// Permute and reflect so that the first equation carries one of
/// `|β| x1²`, `-|γ| x1 x2`, `|β| x2²`, `|δ| x2 x3`.
///
/// Cases are tried in that order over all equations; within a case the first
/// equation and the first monomial (graded order) win.
pub fn normalize_leading(s: &PolySystem) -> Result<(PolySystem, AffineMap, LeadingCase)> {
    if s.degree() != 2 {
        return Err(Error::arg("normalize_leading needs a quadratic system"));
    }
    let n = s.dim();
    let (case, i, e) = find_leading(s).ok_or_else(|| Error::arg("no quadratic monomial"))?;
    let others: Vec<usize> = e.support().filter(|&j| j != i).collect();
    let mut front = vec![i];
    front.extend(&others);
    let mut perm = front.clone();
    perm.extend((0..n).filter(|j| !front.contains(j)));
    let mut map = AffineMap::permutation(perm)?;
    let permuted = apply_affine(s, &map)?;
    let (target, positive) = case.target(n);
    let c = permuted.coeff(0, &target.0);
    debug_assert!(!c.is_zero());
    if c.is_positive() != positive {
        let flip = match case {
            LeadingCase::OwnSquare | LeadingCase::OtherSquare => 0,
            LeadingCase::OwnCross | LeadingCase::OtherCross => 1,
        };
        map = map.then(&AffineMap::reflection(n, flip))?;
    }
    Ok((apply_affine(s, &map)?, map, case))
}

fn designated(s: &PolySystem) -> Result<(LeadingCase, Exps, Q)> {
    let n = s.dim();
    for case in LeadingCase::ORDER {
        let (e, positive) = case.target(n);
        if let Some(c) = s.eq(0).coeff(&e) {
            if c.is_positive() == positive {
                return Ok((case, e, c.clone()));
            }
        }
    }
    Err(Error::arg("first equation has no normalized quadratic monomial; run normalize_leading first"))
}

fn unit_poly(n: usize, e: &[(usize, u32)], c: i64) -> Poly {
    let mut v = vec![0; n];
    for &(j, k) in e {
        v[j] += k;
    }
    Poly::monomial(Exps(v), qi(c))
}

/// The splitting that keeps the designated monomial quadratic. `a_1` is
/// raised as needed so that the quadratic inequalities hold; each raise is
/// recorded in `adjustments`.
pub fn quadratic_case_plan(s: &PolySystem, epsilon: Q, mu: Q, a: Vec<Q>) -> Result<QcmPlan> {
    let n = s.dim();
    if s.degree() != 2 {
        return Err(Error::arg("quadratic_case_plan needs a quadratic system"));
    }
    if a.len() != n {
        return Err(Error::Dimension { expected: n, got: a.len() });
    }
    if !epsilon.is_positive() {
        return Err(Error::arg("epsilon must be positive"));
    }
    let (case, m, coeff) = designated(s)?;
    let mag = coeff.abs();
    let (fill, printed_bound) = match case {
        LeadingCase::OwnSquare => (None, None),
        LeadingCase::OwnCross => (Some(unit_poly(n, &[(0, 2)], 1)), Some(&mag * &a[1] / &epsilon)),
        LeadingCase::OtherSquare => (
            Some(unit_poly(n, &[(0, 2)], 1).sub(&unit_poly(n, &[(0, 1), (1, 1)], 1))),
            Some(qi(2) * &mag * &a[1] / &epsilon),
        ),
        LeadingCase::OtherCross => {
            let f = unit_poly(n, &[(0, 2)], 1)
                .sub(&unit_poly(n, &[(0, 1), (1, 1)], 1))
                .sub(&unit_poly(n, &[(0, 1), (2, 1)], 1));
            let big = if a[1] > a[2] { &a[1] } else { &a[2] };
            (Some(f), Some(&mag * big / &epsilon))
        }
    };
    let rest: Vec<Exps> = s.eq(0).terms().map(|(e, _)| e.clone()).filter(|e| *e != m).collect();
    let mut head = Piece::new(PieceKind::QuadraticChem, vec![m.clone()]);
    if let Some(f) = fill {
        head = head.with_fill(f);
    }
    let mut first = vec![head];
    if !rest.is_empty() {
        first.push(Piece::new(PieceKind::Universal, rest));
    }
    let mut pieces = vec![first];
    for i in 1..n {
        let all: Vec<Exps> = s.eq(i).terms().map(|(e, _)| e.clone()).collect();
        pieces.push(if all.is_empty() { vec![] } else { vec![Piece::new(PieceKind::Universal, all)] });
    }
    let mut plan = QcmPlan {
        base: s.clone(),
        pieces,
        epsilon,
        mu,
        a,
        post_scale: None,
        adjustments: Vec::new(),
    };
    if let Some(b) = printed_bound {
        if plan.a[0] < b {
            plan.adjustments.push(format!(
                "a1 raised from {} to {} (case bound)",
                format_rational(&plan.a[0]),
                format_rational(&b)
            ));
            plan.a[0] = b;
        }
    }
    raise_for_inequalities(&mut plan);
    plan.validate()?;
    Ok(plan)
}

/// Smallest `a_1` meeting every quadratic inequality of the first equation.
/// Each reads `k * a1 >= rhs` with `rhs` free of `a1`, so evaluating at
/// `a1 = 1` exposes `k` as the left-hand side.
fn raise_for_inequalities(plan: &mut QcmPlan) {
    let head = plan.pieces[0][0].clone();
    let q = constraints::quadratic_q(plan, 0, &head);
    let mut unit = plan.clone();
    unit.a[0] = qi(1);
    let mut rows = Vec::new();
    constraints::quadratic_checks(&unit, 0, 0, &q, &mut rows);
    let mut needed = Q::zero();
    for row in &rows {
        if row.lhs.is_positive() {
            let need = &row.rhs / &row.lhs;
            if need > needed {
                needed = need;
            }
        }
    }
    if plan.a[0] < needed {
        plan.adjustments.push(format!(
            "a1 raised from {} to {} (quadratic inequalities)",
            format_rational(&plan.a[0]),
            format_rational(&needed)
        ));
        plan.a[0] = needed;
    }
}
