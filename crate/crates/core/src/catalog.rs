//! Built-in systems, parameter formulas, initial conditions and the
//! construction plans that produce the chemical systems.
//!
//! Identifiers are frozen. Parametric entries take `(ε, μ)`; the others
//! ignore them.

use num_traits::{One, Signed};
use serde::Serialize;

use crate::crn::{Crn, Reaction};
use crate::error::{Error, Result};
use crate::polysys::{Exps, Poly, PolySystem};
use crate::qcm::{Piece, PieceKind, QcmPlan};
use crate::rational::{q, qi, Q};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Expected {
    /// Structural complexity of the system.
    pub label: &'static str,
    pub chemical: bool,
    /// Canonical and fused CRN labels, for chemical entries.
    pub crn: Option<(&'static str, &'static str)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub summary: &'static str,
    pub parametric: bool,
    /// `(ε, μ)` used by the figures.
    #[serde(with = "crate::rational::serde_qvec_opt")]
    pub default_params: Option<Vec<Q>>,
    pub expected: Expected,
    /// Names of stored initial conditions.
    pub figure_ics: Vec<&'static str>,
    /// Id of the plan's base system, for constructed entries.
    pub base: Option<&'static str>,
}

struct Meta {
    id: &'static str,
    summary: &'static str,
    params: Option<((i64, i64), (i64, i64))>,
    label: &'static str,
    chemical: bool,
    crn: Option<(&'static str, &'static str)>,
    base: Option<&'static str>,
}

const ENTRIES: &[Meta] = &[
    Meta {
        id: "rossler",
        summary: "Rössler system with permuted variables",
        params: None,
        label: "(7,1)",
        chemical: false,
        crn: None,
        base: None,
    },
    Meta {
        id: "rossler-linearpart",
        summary: "linear part of the reflected Rössler system",
        params: None,
        label: "(6)",
        chemical: false,
        crn: None,
        base: None,
    },
    Meta {
        id: "rossler-reflected",
        summary: "Rössler system after the reflection y -> -y",
        params: None,
        label: "(7,1)",
        chemical: false,
        crn: None,
        base: None,
    },
    Meta {
        id: "wr",
        summary: "minimal Willamowski-Rössler system",
        params: None,
        label: "(9,6)",
        chemical: true,
        crn: Some(("(9,6)", "(7,4)")),
        base: None,
    },
    Meta {
        id: "sprott-p-perm",
        summary: "Sprott system P with x and y exchanged",
        params: None,
        label: "(6,1)",
        chemical: false,
        crn: None,
        base: None,
    },
    Meta {
        id: "sprott-c-variant",
        summary: "Sprott system C permuted and reflected",
        params: None,
        label: "(5,2)",
        chemical: false,
        crn: None,
        base: None,
    },
    Meta {
        id: "se17-variant",
        summary: "hidden-attractor system SE17 permuted and reflected",
        params: None,
        label: "(7,2)",
        chemical: false,
        crn: None,
        base: None,
    },
    Meta {
        id: "chemical-rossler",
        summary: "quadratic chemical Rössler system",
        params: Some(((1, 1000), (1, 100))),
        label: "(11,5)",
        chemical: true,
        crn: Some(("(11,5)", "(9,4)")),
        base: Some("rossler-reflected"),
    },
    Meta {
        id: "cds-one-wing",
        summary: "quadratic chemical system with one-wing chaos",
        params: Some(((1, 100), (1, 100))),
        label: "(10,3)",
        chemical: true,
        crn: Some(("(10,3)", "(8,3)")),
        base: Some("sprott-p-perm"),
    },
    Meta {
        id: "cds-two-wing",
        summary: "cubic chemical system with two-wing chaos",
        params: Some(((1, 1000), (1, 100))),
        label: "(11,5,1)",
        chemical: true,
        crn: Some(("(11,5,1)", "(9,4,1)")),
        base: Some("sprott-c-variant"),
    },
    Meta {
        id: "cds-hidden",
        summary: "quadratic chemical system with hidden chaos and a unique stable equilibrium",
        params: Some(((1, 100000), (1, 100000))),
        label: "(11,5)",
        chemical: true,
        crn: Some(("(11,5)", "(9,4)")),
        base: Some("se17-variant"),
    },
    Meta {
        id: "rossler-perturbed",
        summary: "reflected Rössler system after the perturbation step (b = 1/ε, c = 1)",
        params: Some(((1, 1000), (1, 100))),
        label: "(12,5)",
        chemical: false,
        crn: None,
        base: Some("rossler-reflected"),
    },
    Meta {
        id: "one-wing-perturbed",
        summary: "one-wing system after the perturbation step (a = 1, c = 1/ε)",
        params: Some(((1, 100), (1, 100))),
        label: "(10,3)",
        chemical: false,
        crn: None,
        base: Some("sprott-p-perm"),
    },
    Meta {
        id: "two-wing-perturbed",
        summary: "two-wing system after the perturbation step (b = 1)",
        params: Some(((1, 1000), (1, 100))),
        label: "(8,4,1)",
        chemical: false,
        crn: None,
        base: Some("sprott-c-variant"),
    },
    Meta {
        id: "hidden-perturbed",
        summary: "hidden-attractor system after the perturbation step (b = c = 2)",
        params: Some(((1, 100000), (1, 100000))),
        label: "(10,5)",
        chemical: false,
        crn: None,
        base: Some("se17-variant"),
    },
];

fn meta(id: &str) -> Result<&'static Meta> {
    ENTRIES.iter().find(|m| m.id == id).ok_or_else(|| Error::UnknownId(id.to_string()))
}

pub fn ids() -> Vec<&'static str> {
    ENTRIES.iter().map(|m| m.id).collect()
}

pub fn get(id: &str) -> Result<CatalogEntry> {
    let m = meta(id)?;
    let figure_ics = match id {
        "rossler-linearpart" | "wr" => vec![],
        _ => vec!["figure"],
    };
    Ok(CatalogEntry {
        id: m.id,
        summary: m.summary,
        parametric: m.params.is_some(),
        default_params: m.params.map(|((a, b), (c, d))| vec![q(a, b), q(c, d)]),
        expected: Expected { label: m.label, chemical: m.chemical, crn: m.crn },
        figure_ics,
        base: m.base,
    })
}

/// `(ε, μ)` of the figures, or `None` for fixed systems.
pub fn default_params(id: &str) -> Result<Option<(Q, Q)>> {
    Ok(meta(id)?.params.map(|((a, b), (c, d))| (q(a, b), q(c, d))))
}

fn xyz() -> Vec<String> {
    vec!["x".into(), "y".into(), "z".into()]
}

fn sys(eqs: Vec<Vec<(Q, [u32; 3])>>) -> PolySystem {
    let polys = eqs
        .into_iter()
        .map(|terms| Poly::from_terms(3, terms.into_iter().map(|(c, e)| (c, e.to_vec()))).expect("valid terms"))
        .collect();
    PolySystem::new(xyz(), polys).expect("three equations")
}

fn fixed(id: &str) -> Option<PolySystem> {
    let p = |exprs: [&str; 3]| PolySystem::parse(&["x", "y", "z"], &exprs).expect("catalog text");
    Some(match id {
        "rossler" => p(["1/5 - 57/10 x + x*y", "-x - z", "y + 1/5 z"]),
        "rossler-linearpart" => p(["1/5 - 57/10 x", "x + z", "-y + 1/5 z"]),
        "rossler-reflected" => p(["1/5 - 57/10 x - x*y", "x + z", "-y + 1/5 z"]),
        "wr" => p(["30 x - 1/2 x^2 - x*y - x*z", "33/2 y - 1/2 y^2 - x*y", "-10 z + x*z"]),
        "sprott-p-perm" => p(["-y + x^2", "27/10 x + z", "x + y"]),
        "sprott-c-variant" => p(["-1 + y^2", "-x*z", "y - z"]),
        "se17-variant" => p(["57/100 - 31/10 z - 1/5 x*y - 3/10 x*z", "-y - z", "x"]),
        _ => return None,
    })
}

fn check_params(eps: &Q, mu: &Q) -> Result<()> {
    if !eps.is_positive() || !mu.is_positive() {
        return Err(Error::arg("epsilon and mu must be positive"));
    }
    Ok(())
}

/// Coefficients of the chemical Rössler system.
pub fn chemical_rossler_alphas(eps: &Q, mu: &Q) -> Vec<Q> {
    let one = Q::one();
    vec![
        q(57, 10) / eps + eps * mu / qi(5),
        &one / (eps * mu) + q(57, 10),
        &one / eps,
        &one / mu,
        one.clone(),
        &one / eps + eps,
        &one / eps - q(1, 5),
        mu / (qi(5) * eps) - mu / qi(25),
        mu.clone(),
    ]
}

/// Coefficients of the one-wing system; `α2` may be negative.
pub fn one_wing_alphas(eps: &Q, mu: &Q) -> Vec<Q> {
    let one = Q::one();
    let a2 = &one / (eps * eps) + q(27, 10) / eps - qi(2) / mu;
    let abs2 = a2.abs();
    vec![
        &one / (mu * mu * &abs2),
        a2,
        abs2,
        q(27, 10) * mu,
        eps.clone(),
        q(10, 27),
        &one / eps + q(27, 10) + eps,
        q(27, 10) * eps * mu,
    ]
}

pub fn two_wing_alphas(eps: &Q, mu: &Q) -> Vec<Q> {
    let one = Q::one();
    vec![
        qi(4) / (eps * mu * mu) - &one / (mu * mu) - &one,
        qi(4) / mu - eps / mu,
        eps.clone(),
        &one / (eps * eps),
        one.clone(),
        qi(2) / (eps * mu),
        mu / eps,
        mu * mu / qi(2),
        one,
    ]
}

pub fn hidden_alphas(eps: &Q, mu: &Q) -> Vec<Q> {
    let s = qi(620) + qi(57) * mu;
    vec![
        qi(2) / mu,
        Q::one() / mu,
        qi(40) / (qi(620) * eps * mu + qi(57) * eps * mu * mu),
        (qi(3) - qi(31) * eps * mu) / (qi(6) * eps),
        eps * &s / qi(200),
        q(1, 5),
        mu * &s / qi(400),
        mu * mu * &s / qi(240),
        Q::one() / (qi(2) * eps),
    ]
}

/// `31/10 + 57μ/200`, the rescale factor of the hidden-chaos construction.
fn hidden_k(mu: &Q) -> Q {
    q(31, 10) + q(57, 200) * mu
}

fn parametric(id: &str, eps: &Q, mu: &Q) -> Option<PolySystem> {
    let n = |v: &Q| -v;
    Some(match id {
        "chemical-rossler" => {
            let a = chemical_rossler_alphas(eps, mu);
            sys(vec![
                vec![
                    (a[0].clone(), [0, 0, 0]),
                    (n(&a[1]), [1, 0, 0]),
                    (a[2].clone(), [0, 1, 0]),
                    (a[3].clone(), [2, 0, 0]),
                    (n(&a[4]), [1, 1, 0]),
                ],
                vec![(n(&a[5]), [0, 1, 0]), (a[6].clone(), [0, 0, 1]), (a[4].clone(), [1, 1, 0])],
                vec![(a[6].clone(), [0, 0, 1]), (a[7].clone(), [0, 0, 2]), (n(&a[8]), [0, 1, 1])],
            ])
        }
        "cds-one-wing" => {
            let a = one_wing_alphas(eps, mu);
            sys(vec![
                vec![
                    (a[0].clone(), [0, 0, 0]),
                    (a[1].clone(), [1, 0, 0]),
                    (a[2].clone(), [2, 0, 0]),
                    (n(&a[3]), [1, 1, 0]),
                ],
                vec![(a[2].clone(), [1, 0, 0]), (n(&a[4]), [0, 1, 0]), (a[5].clone(), [0, 0, 1])],
                vec![(a[2].clone(), [1, 0, 0]), (n(&a[6]), [0, 0, 1]), (a[7].clone(), [0, 1, 1])],
            ])
        }
        "cds-two-wing" => {
            let a = two_wing_alphas(eps, mu);
            sys(vec![
                vec![
                    (a[0].clone(), [0, 0, 0]),
                    (n(&a[1]), [1, 0, 0]),
                    (a[2].clone(), [2, 0, 0]),
                    (a[3].clone(), [0, 2, 0]),
                    (n(&a[4]), [1, 1, 0]),
                ],
                vec![
                    (n(&a[5]), [0, 1, 0]),
                    (a[4].clone(), [1, 1, 0]),
                    (a[6].clone(), [0, 1, 1]),
                    (n(&a[7]), [1, 1, 1]),
                ],
                vec![(a[5].clone(), [0, 1, 0]), (n(&a[8]), [0, 0, 1])],
            ])
        }
        "cds-hidden" => {
            let a = hidden_alphas(eps, mu);
            sys(vec![
                vec![
                    (a[0].clone(), [0, 0, 0]),
                    (n(&a[1]), [1, 0, 0]),
                    (a[2].clone(), [0, 1, 0]),
                    (a[3].clone(), [0, 0, 1]),
                    (a[4].clone(), [2, 0, 0]),
                    (n(&a[5]), [1, 1, 0]),
                    (n(&a[6]), [1, 0, 1]),
                ],
                vec![(a[0].clone(), [0, 0, 0]), (n(&a[7]), [0, 1, 1])],
                vec![(n(&a[8]), [0, 0, 1]), (a[6].clone(), [1, 0, 1])],
            ])
        }
        _ => return None,
    })
}

fn plan_id(id: &str) -> Option<&'static str> {
    Some(match id {
        "chemical-rossler" | "rossler-perturbed" => "chemical-rossler",
        "cds-one-wing" | "one-wing-perturbed" => "cds-one-wing",
        "cds-two-wing" | "two-wing-perturbed" => "cds-two-wing",
        "cds-hidden" | "hidden-perturbed" => "cds-hidden",
        _ => return None,
    })
}

/// Exact system for `id` at `(ε, μ)`.
pub fn instantiate(id: &str, eps: &Q, mu: &Q) -> Result<PolySystem> {
    meta(id)?;
    if let Some(s) = fixed(id) {
        return Ok(s);
    }
    check_params(eps, mu)?;
    if let Some(s) = parametric(id, eps, mu) {
        return Ok(s);
    }
    let p = plan(plan_id(id).expect("perturbed entries have plans"), eps, mu)?.expect("plan");
    Ok(p.execute()?.perturbed)
}

/// Instantiate at the figure parameters (fixed systems need none).
pub fn instantiate_default(id: &str) -> Result<PolySystem> {
    let (eps, mu) = default_params(id)?.unwrap_or((Q::one(), Q::one()));
    instantiate(id, &eps, &mu)
}

fn e(v: [u32; 3]) -> Exps {
    Exps(v.to_vec())
}

fn piece(kind: PieceKind, monomials: &[[u32; 3]]) -> Piece {
    Piece::new(kind, monomials.iter().map(|m| e(*m)).collect())
}

fn fill(terms: &[(i64, [u32; 3])]) -> Poly {
    Poly::from_terms(3, terms.iter().map(|(c, m)| (qi(*c), m.to_vec()))).expect("valid fill")
}

/// The construction that maps the base system onto a chemical entry.
/// Perturbed entries share the plan of their chemical counterpart.
pub fn plan(id: &str, eps: &Q, mu: &Q) -> Result<Option<QcmPlan>> {
    meta(id)?;
    let Some(pid) = plan_id(id) else { return Ok(None) };
    check_params(eps, mu)?;
    let one = Q::one();
    use PieceKind::*;
    let (base, pieces, a, post) = match pid {
        "chemical-rossler" => (
            "rossler-reflected",
            vec![
                vec![
                    piece(QuadraticChem, &[[1, 1, 0]]).with_fill(fill(&[(1, [2, 0, 0])])),
                    piece(LinearDamp, &[[0, 0, 0], [1, 0, 0]]),
                ],
                vec![piece(LinearDamp, &[[0, 0, 1]]), piece(Universal, &[[1, 0, 0]])],
                vec![piece(Universal, &[[0, 1, 0], [0, 0, 1]])],
            ],
            vec![&one / (eps * eps), &one / eps, one.clone()],
            vec![&one / (eps * mu), one.clone(), &one / eps - q(1, 5)],
        ),
        "cds-one-wing" => (
            "sprott-p-perm",
            vec![
                vec![piece(QuadraticChem, &[[2, 0, 0]]), piece(Universal, &[[0, 1, 0]])],
                vec![piece(LinearDamp, &[[1, 0, 0], [0, 0, 1]])],
                vec![piece(LinearDamp, &[[1, 0, 0]]), piece(Universal, &[[0, 1, 0]])],
            ],
            vec![one.clone(), &one / (eps * eps) + q(27, 10) / eps, &one / eps],
            vec![one_wing_alphas(eps, mu)[2].clone(), q(27, 10), one.clone()],
        ),
        "cds-two-wing" => (
            "sprott-c-variant",
            vec![
                vec![piece(QuadraticChem, &[[0, 0, 0], [0, 2, 0]])
                    .with_fill(fill(&[(1, [2, 0, 0]), (-1, [1, 1, 0])]))],
                vec![piece(Universal, &[[1, 0, 1]])],
                vec![piece(LinearDamp, &[[0, 1, 0], [0, 0, 1]])],
            ],
            vec![qi(2) / eps, one.clone(), one.clone()],
            vec![one.clone(), &one / eps, mu / qi(2)],
        ),
        "cds-hidden" => {
            let k = hidden_k(mu);
            (
                "se17-variant",
                vec![
                    vec![piece(QuadraticChem, &[[0, 0, 0], [0, 0, 1], [1, 1, 0], [1, 0, 1]])
                        .with_fill(fill(&[(1, [2, 0, 0])]))],
                    vec![piece(LinearDamp, &[[0, 1, 0]]), piece(Universal, &[[0, 0, 1]])],
                    vec![piece(Universal, &[[1, 0, 0]])],
                ],
                vec![&one / eps, qi(2), qi(2)],
                vec![k.clone(), one.clone(), q(5, 3) * mu * &k],
            )
        }
        _ => unreachable!(),
    };
    let plan = QcmPlan {
        base: fixed(base).expect("fixed base"),
        pieces,
        epsilon: eps.clone(),
        mu: mu.clone(),
        a,
        post_scale: Some(post),
        adjustments: Vec::new(),
    };
    plan.validate()?;
    Ok(Some(plan))
}

/// Initial condition of the figures, exact. Constructed entries use the
/// translated and rescaled formulas; perturbed entries the base one.
pub fn figure_ic(id: &str, eps: &Q, mu: &Q) -> Result<Option<Vec<Q>>> {
    meta(id)?;
    let one = Q::one();
    let base = |v: [Q; 3]| Ok(Some(v.to_vec()));
    match id {
        "rossler" | "rossler-reflected" | "rossler-perturbed" => base([qi(5), qi(-5), qi(5)]),
        "sprott-p-perm" | "one-wing-perturbed" => base([q(1, 2), qi(0), qi(0)]),
        "sprott-c-variant" | "two-wing-perturbed" => base([qi(0), qi(0), qi(-1)]),
        "se17-variant" | "hidden-perturbed" => base([qi(-5), qi(0), q(15, 2)]),
        "rossler-linearpart" | "wr" => Ok(None),
        _ => {
            check_params(eps, mu)?;
            let em = eps * mu;
            match id {
                "chemical-rossler" => base([
                    &em * (qi(5) + &one / (eps * &em)),
                    qi(-5) + &one / &em,
                    qi(5) * eps / (qi(5) - eps) * (qi(5) + &one / mu),
                ]),
                "cds-one-wing" => {
                    let a2 = &one / (eps * eps) + q(27, 10) / eps - qi(2) / mu;
                    base([
                        (q(1, 2) + &one / mu) / a2.abs(),
                        q(10, 27) * (&one / (eps * &em) + q(27, 10) / &em),
                        &one / &em,
                    ])
                }
                "cds-two-wing" => base([qi(2) / &em, eps / mu, qi(2) / mu * (qi(-1) + &one / mu)]),
                "cds-hidden" => {
                    let k = hidden_k(mu);
                    base([
                        (qi(-5) + &one / &em) / &k,
                        qi(2) / mu,
                        q(3, 5) / mu / &k * (q(15, 2) + qi(2) / mu),
                    ])
                }
                _ => unreachable!(),
            }
        }
    }
}

/// Figure initial condition as floats.
pub fn figure_ic_f64(id: &str, eps: &Q, mu: &Q) -> Result<Option<Vec<f64>>> {
    Ok(figure_ic(id, eps, mu)?.map(|v| v.iter().map(crate::rational::to_f64).collect()))
}

fn rx(reactants: [u32; 3], products: [u32; 3], rate: &Q) -> Reaction {
    Reaction::new(reactants.to_vec(), products.to_vec(), rate.clone()).expect("valid reaction")
}

/// The reaction networks printed alongside each chemical entry: both
/// networks for `wr`, the fused network for the constructed entries.
pub fn reference_crns(id: &str, eps: &Q, mu: &Q) -> Result<Vec<(&'static str, Crn)>> {
    meta(id)?;
    let species = vec!["X".to_string(), "Y".to_string(), "Z".to_string()];
    let crn = |reactions: Vec<Reaction>| Crn { species: species.clone(), reactions };
    let half = q(1, 2);
    let one = qi(1);
    Ok(match id {
        "wr" => vec![
            (
                "canonical",
                crn(vec![
                    rx([1, 0, 0], [2, 0, 0], &qi(30)),
                    rx([2, 0, 0], [1, 0, 0], &half),
                    rx([1, 1, 0], [0, 1, 0], &one),
                    rx([1, 0, 1], [0, 0, 1], &one),
                    rx([0, 1, 0], [0, 2, 0], &q(33, 2)),
                    rx([0, 2, 0], [0, 1, 0], &half),
                    rx([1, 1, 0], [1, 0, 0], &one),
                    rx([0, 0, 1], [0, 0, 0], &qi(10)),
                    rx([1, 0, 1], [1, 0, 2], &one),
                ]),
            ),
            (
                "fused",
                crn(vec![
                    rx([1, 0, 0], [2, 0, 0], &qi(30)),
                    rx([2, 0, 0], [1, 0, 0], &half),
                    rx([1, 1, 0], [0, 0, 0], &one),
                    rx([1, 0, 1], [0, 0, 2], &one),
                    rx([0, 1, 0], [0, 2, 0], &q(33, 2)),
                    rx([0, 2, 0], [0, 1, 0], &half),
                    rx([0, 0, 1], [0, 0, 0], &qi(10)),
                ]),
            ),
        ],
        "chemical-rossler" => {
            check_params(eps, mu)?;
            let a = chemical_rossler_alphas(eps, mu);
            vec![(
                "fused",
                crn(vec![
                    rx([0, 0, 0], [1, 0, 0], &a[0]),
                    rx([1, 0, 0], [0, 0, 0], &a[1]),
                    rx([0, 1, 0], [1, 1, 0], &a[2]),
                    rx([2, 0, 0], [3, 0, 0], &a[3]),
                    rx([1, 1, 0], [0, 2, 0], &a[4]),
                    rx([0, 1, 0], [0, 0, 0], &a[5]),
                    rx([0, 0, 1], [0, 1, 2], &a[6]),
                    rx([0, 0, 2], [0, 0, 3], &a[7]),
                    rx([0, 1, 1], [0, 1, 0], &a[8]),
                ]),
            )]
        }
        "cds-one-wing" => {
            check_params(eps, mu)?;
            let a = one_wing_alphas(eps, mu);
            // X -> X + sign(α2) X + Y + Z
            let x_out = if a[1].is_positive() { 2 } else { 0 };
            vec![(
                "fused",
                crn(vec![
                    rx([0, 0, 0], [1, 0, 0], &a[0]),
                    rx([1, 0, 0], [x_out, 1, 1], &a[2]),
                    rx([2, 0, 0], [3, 0, 0], &a[2]),
                    rx([1, 1, 0], [0, 1, 0], &a[3]),
                    rx([0, 1, 0], [0, 0, 0], &a[4]),
                    rx([0, 0, 1], [0, 1, 1], &a[5]),
                    rx([0, 0, 1], [0, 0, 0], &a[6]),
                    rx([0, 1, 1], [0, 1, 2], &a[7]),
                ]),
            )]
        }
        "cds-two-wing" => {
            check_params(eps, mu)?;
            let a = two_wing_alphas(eps, mu);
            vec![(
                "fused",
                crn(vec![
                    rx([0, 0, 0], [1, 0, 0], &a[0]),
                    rx([1, 0, 0], [0, 0, 0], &a[1]),
                    rx([2, 0, 0], [3, 0, 0], &a[2]),
                    rx([0, 2, 0], [1, 2, 0], &a[3]),
                    rx([1, 1, 0], [0, 2, 0], &a[4]),
                    rx([0, 1, 0], [0, 0, 1], &a[5]),
                    rx([0, 1, 1], [0, 2, 1], &a[6]),
                    rx([1, 1, 1], [1, 0, 1], &a[7]),
                    rx([0, 0, 1], [0, 0, 0], &a[8]),
                ]),
            )]
        }
        "cds-hidden" => {
            check_params(eps, mu)?;
            let a = hidden_alphas(eps, mu);
            vec![(
                "fused",
                crn(vec![
                    rx([0, 0, 0], [1, 1, 0], &a[0]),
                    rx([1, 0, 0], [0, 0, 0], &a[1]),
                    rx([0, 1, 0], [1, 1, 0], &a[2]),
                    rx([0, 0, 1], [1, 0, 1], &a[3]),
                    rx([2, 0, 0], [3, 0, 0], &a[4]),
                    rx([1, 1, 0], [0, 1, 0], &a[5]),
                    rx([1, 0, 1], [0, 0, 2], &a[6]),
                    rx([0, 1, 1], [0, 0, 1], &a[7]),
                    rx([0, 0, 1], [0, 0, 0], &a[8]),
                ]),
            )]
        }
        _ => vec![],
    })
}

/// Exact equilibrium `(0, -57/(310 + 57μ/b), 57/310)` of the perturbed
/// hidden-attractor system with `b = c`.
pub fn hidden_perturbed_equilibrium(mu: &Q, b: &Q) -> Vec<Q> {
    vec![qi(0), qi(-57) / (qi(310) + qi(57) * mu / b), q(57, 310)]
}
