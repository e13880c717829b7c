//! Affine changes of variables built from permutations, reflections,
//! positive rescalings and translations.
//!
//! A map sends old coordinates `x` to new ones by
//! `x̄_i = sign_i * x_{perm_i} / scale_i + shift_i`,
//! so "rescale `x_i -> s x_i`" means `x̄_i = x_i / s`, and a translation by `T`
//! means `x̄ = x + T`.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{Poly, PolySystem};
use crate::error::{Error, Result};
use crate::rational::{to_f64, Q};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AffineMap {
    pub perm: Vec<usize>,
    pub signs: Vec<i8>,
    #[serde(with = "crate::rational::serde_qvec")]
    pub scales: Vec<Q>,
    #[serde(with = "crate::rational::serde_qvec")]
    pub shift: Vec<Q>,
}

impl AffineMap {
    pub fn new(perm: Vec<usize>, signs: Vec<i8>, scales: Vec<Q>, shift: Vec<Q>) -> Result<Self> {
        let n = perm.len();
        for len in [signs.len(), scales.len(), shift.len()] {
            if len != n {
                return Err(Error::Dimension { expected: n, got: len });
            }
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::arg(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        if signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::arg("reflection signs must be +1 or -1"));
        }
        if scales.iter().any(|s| !s.is_positive()) {
            return Err(Error::arg("scales must be strictly positive"));
        }
        Ok(AffineMap { perm, signs, scales, shift })
    }

    pub fn identity(n: usize) -> Self {
        AffineMap {
            perm: (0..n).collect(),
            signs: vec![1; n],
            scales: vec![Q::one(); n],
            shift: vec![Q::zero(); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// New variable `i` is old variable `perm[i]`.
    pub fn permutation(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        AffineMap::new(perm, vec![1; n], vec![Q::one(); n], vec![Q::zero(); n])
    }

    /// Exchange variables `i` and `j`.
    pub fn swap(n: usize, i: usize, j: usize) -> Self {
        let mut m = AffineMap::identity(n);
        m.perm.swap(i, j);
        m
    }

    pub fn reflection(n: usize, i: usize) -> Self {
        let mut m = AffineMap::identity(n);
        m.signs[i] = -1;
        m
    }

    /// `x_i -> s_i x_i`, i.e. `x̄_i = x_i / s_i`.
    pub fn scaling(scales: Vec<Q>) -> Result<Self> {
        let n = scales.len();
        AffineMap::new((0..n).collect(), vec![1; n], scales, vec![Q::zero(); n])
    }

    /// `x̄ = x + T`.
    pub fn translation(shift: Vec<Q>) -> Self {
        let n = shift.len();
        AffineMap { perm: (0..n).collect(), signs: vec![1; n], scales: vec![Q::one(); n], shift }
    }

    pub fn is_identity(&self) -> bool {
        *self == AffineMap::identity(self.dim())
    }

    /// The map "apply `self`, then `then`".
    pub fn then(&self, then: &AffineMap) -> Result<AffineMap> {
        if then.dim() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: then.dim() });
        }
        let n = self.dim();
        let mut out = AffineMap::identity(n);
        for i in 0..n {
            let k = then.perm[i];
            out.perm[i] = self.perm[k];
            out.signs[i] = then.signs[i] * self.signs[k];
            out.scales[i] = &then.scales[i] * &self.scales[k];
            let lin = &self.shift[k] * Q::from_integer(then.signs[i].into()) / &then.scales[i];
            out.shift[i] = lin + &then.shift[i];
        }
        Ok(out)
    }

    pub fn inverse(&self) -> AffineMap {
        let n = self.dim();
        let mut out = AffineMap::identity(n);
        for i in 0..n {
            let j = self.perm[i];
            out.perm[j] = i;
            out.signs[j] = self.signs[i];
            out.scales[j] = Q::one() / &self.scales[i];
            out.shift[j] = -(&self.shift[i] * &self.scales[i] * Q::from_integer(self.signs[i].into()));
        }
        out
    }

    pub fn apply_point_exact(&self, x: &[Q]) -> Result<Vec<Q>> {
        self.check(x.len())?;
        Ok((0..self.dim())
            .map(|i| {
                &x[self.perm[i]] * Q::from_integer(self.signs[i].into()) / &self.scales[i]
                    + &self.shift[i]
            })
            .collect())
    }

    pub fn apply_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x.len())?;
        Ok((0..self.dim())
            .map(|i| {
                f64::from(self.signs[i]) * x[self.perm[i]] / to_f64(&self.scales[i])
                    + to_f64(&self.shift[i])
            })
            .collect())
    }

    /// The linear part as a dense f64 matrix, `x̄ = L x + T`.
    pub fn linear_f64(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut l = vec![vec![0.0; n]; n];
        for i in 0..n {
            l[i][self.perm[i]] = f64::from(self.signs[i]) / to_f64(&self.scales[i]);
        }
        l
    }

    fn check(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: n });
        }
        Ok(())
    }
}

/// The system satisfied by `x̄ = a(x)` when `x` solves `s`.
pub fn apply_affine(s: &PolySystem, a: &AffineMap) -> Result<PolySystem> {
    a.check(s.dim())?;
    if a.scales.iter().any(|k| !k.is_positive()) {
        return Err(Error::arg("scales must be strictly positive"));
    }
    let n = s.dim();
    // old x_{perm[i]} = sign_i * scale_i * (x̄_i - shift_i)
    let mut subs = vec![Poly::zero(n); n];
    for i in 0..n {
        let k = &a.scales[i] * Q::from_integer(a.signs[i].into());
        let lin = Poly::var(n, i).sub(&Poly::constant(n, a.shift[i].clone()));
        subs[a.perm[i]] = lin.scale(&k);
    }
    let eqs = (0..n)
        .map(|i| {
            let factor = Q::from_integer(a.signs[i].into()) / &a.scales[i];
            s.eq(a.perm[i]).compose(&subs).scale(&factor)
        })
        .collect();
    PolySystem::new(s.vars().to_vec(), eqs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use proptest::prelude::*;

    fn vars() -> [&'static str; 3] {
        ["x", "y", "z"]
    }

    #[test]
    fn permutations_map_classic_rossler() {
        let classic =
            PolySystem::parse(&vars(), &["-y - z", "x + 1/5 y", "1/5 + x*z - 57/10 z"]).unwrap();
        let m = AffineMap::swap(3, 0, 2).then(&AffineMap::swap(3, 1, 2)).unwrap();
        let out = apply_affine(&classic, &m).unwrap();
        let eq3 =
            PolySystem::parse(&vars(), &["1/5 - 57/10 x + x*y", "-x - z", "y + 1/5 z"]).unwrap();
        assert_eq!(out, eq3);
    }

    #[test]
    fn translation_expands_square() {
        // dx/dt = -1 + y^2 with T = (a, b, c)/mu at a=2, b=3, c=5, mu=1/7
        let s = PolySystem::parse(&vars(), &["-1 + y^2", "0", "0"]).unwrap();
        let mu = q(1, 7);
        let t = vec![qi(2) / &mu, qi(3) / &mu, qi(5) / &mu];
        let out = apply_affine(&s, &AffineMap::translation(t)).unwrap();
        let b_mu = qi(3) / &mu;
        assert_eq!(out.coeff(0, &[0, 0, 0]), &b_mu * &b_mu - qi(1));
        assert_eq!(out.coeff(0, &[0, 1, 0]), -qi(2) * &b_mu);
        assert_eq!(out.coeff(0, &[0, 2, 0]), qi(1));
        assert_eq!(out.eq(0).len(), 3);
    }

    #[test]
    fn rejects_bad_maps() {
        assert!(AffineMap::scaling(vec![qi(1), qi(0)]).is_err());
        assert!(AffineMap::permutation(vec![0, 0]).is_err());
        assert!(AffineMap::new(vec![0], vec![2], vec![qi(1)], vec![qi(0)]).is_err());
    }

    #[test]
    fn identity_is_noop() {
        let s = PolySystem::parse(&vars(), &["x*y - 3", "z^2", "x + y + z"]).unwrap();
        assert_eq!(apply_affine(&s, &AffineMap::identity(3)).unwrap(), s);
    }

    fn arb_map() -> impl Strategy<Value = AffineMap> {
        (
            Just(vec![0usize, 1, 2]).prop_shuffle(),
            proptest::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], 3),
            proptest::collection::vec(1i64..20, 3),
            proptest::collection::vec(-20i64..20, 3),
        )
            .prop_map(|(p, s, k, t)| {
                AffineMap::new(
                    p,
                    s,
                    k.into_iter().map(|v| q(v, 3)).collect(),
                    t.into_iter().map(|v| q(v, 7)).collect(),
                )
                .unwrap()
            })
    }

    fn arb_system() -> impl Strategy<Value = PolySystem> {
        let term = (-5i64..=5, 0u32..3, 0u32..3, 0u32..2);
        proptest::collection::vec(proptest::collection::vec(term, 0..5), 3).prop_map(|eqs| {
            let polys = eqs
                .into_iter()
                .map(|ts| {
                    Poly::from_terms(3, ts.into_iter().map(|(c, a, b, d)| (qi(c), vec![a, b, d])))
                        .unwrap()
                })
                .collect();
            PolySystem::new(PolySystem::default_vars(3), polys).unwrap()
        })
    }

    proptest! {
        #[test]
        fn inverse_roundtrip(s in arb_system(), m in arb_map()) {
            let there = apply_affine(&s, &m).unwrap();
            prop_assert_eq!(apply_affine(&there, &m.inverse()).unwrap(), s);
        }

        #[test]
        fn composition_matches_sequential(s in arb_system(), a in arb_map(), b in arb_map()) {
            let seq = apply_affine(&apply_affine(&s, &a).unwrap(), &b).unwrap();
            prop_assert_eq!(apply_affine(&s, &a.then(&b).unwrap()).unwrap(), seq);
        }

        #[test]
        fn points_follow_maps(m in arb_map(), x in proptest::collection::vec(-9i64..9, 3)) {
            let xq: Vec<Q> = x.iter().map(|v| qi(*v)).collect();
            let y = m.apply_point_exact(&xq).unwrap();
            prop_assert_eq!(m.inverse().apply_point_exact(&y).unwrap(), xq);
        }

        #[test]
        fn chemicality_kept_without_shift(s in arb_system(), p in Just(vec![0usize, 1, 2]).prop_shuffle(),
                                          k in proptest::collection::vec(1i64..9, 3)) {
            let m = AffineMap::new(p, vec![1; 3], k.into_iter().map(qi).collect(), vec![qi(0); 3]).unwrap();
            let out = apply_affine(&s, &m).unwrap();
            prop_assert_eq!(out.is_chemical().0, s.is_chemical().0);
            prop_assert_eq!(out.complexity(), s.complexity());
        }
    }
}
