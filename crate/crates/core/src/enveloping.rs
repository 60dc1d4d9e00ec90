//! U(g) in the ordered PBW basis x_0^{e_0} x_1^{e_1} ⋯, straightening
//! products, symmetrization S(g) → U(g), invariants of S(g), and the
//! Duflo map.

use std::collections::HashMap;
use std::sync::Mutex;

use num_traits::{One, Zero};

use crate::algebra::MetricLieAlgebra;
use crate::linalg::{rank_kernel_image, SparseMatrix, SparseVec};
use crate::poly::{Mono, Poly};
use crate::rational::Q;

/// Straightening engine. Monomial-times-generator products and symmetrized
/// monomials are memoized behind mutexes, so results never depend on
/// which thread filled the cache.
#[derive(Debug)]
pub struct Enveloping {
    alg: MetricLieAlgebra,
    right_gen: Mutex<HashMap<(Mono, usize), Poly>>,
    sym: Mutex<HashMap<Mono, Poly>>,
}

impl Enveloping {
    pub fn new(alg: &MetricLieAlgebra) -> Self {
        Enveloping { alg: alg.clone(), right_gen: Mutex::new(HashMap::new()), sym: Mutex::new(HashMap::new()) }
    }

    pub fn algebra(&self) -> &MetricLieAlgebra {
        &self.alg
    }

    pub fn generator(&self, i: usize) -> Poly {
        Poly::var(i)
    }

    /// Ordered monomial times x_i, in normal form.
    pub fn mul_monomial_gen(&self, m: &Mono, i: usize) -> Poly {
        if let Some(p) = self.right_gen.lock().unwrap().get(&(*m, i)) {
            return p.clone();
        }
        let n = self.alg.dim();
        let top = (0..n).rev().find(|&k| m.exp(k) > 0);
        let out = match top {
            Some(k) if k > i => {
                // m = m' x_k and x_k x_i = x_i x_k + [x_k, x_i]
                let mp = m.lower(k).unwrap();
                let left = self.mul_monomial_gen(&mp, i);
                let mut acc = self.mul_poly_gen(&left, k);
                for l in 0..n {
                    let c = self.alg.c(k, i, l);
                    if !c.is_zero() {
                        acc = acc.add(&self.mul_monomial_gen(&mp, l).scale(c));
                    }
                }
                acc
            }
            _ => Poly::monomial(m.raise(i), Q::one()),
        };
        self.right_gen.lock().unwrap().insert((*m, i), out.clone());
        out
    }

    pub fn mul_poly_gen(&self, u: &Poly, i: usize) -> Poly {
        let mut acc = Poly::zero();
        for (m, c) in u.terms() {
            acc = acc.add(&self.mul_monomial_gen(m, i).scale(c));
        }
        acc
    }

    /// Product in U(g) of two elements in PBW normal form.
    pub fn mul(&self, u: &Poly, v: &Poly) -> Poly {
        let n = self.alg.dim();
        let mut acc = Poly::zero();
        for (m, c) in v.terms() {
            let mut part = u.scale(c);
            for i in 0..n {
                for _ in 0..m.exp(i) {
                    part = self.mul_poly_gen(&part, i);
                }
            }
            acc = acc.add(&part);
        }
        acc
    }

    pub fn commutator(&self, u: &Poly, v: &Poly) -> Poly {
        self.mul(u, v).sub(&self.mul(v, u))
    }

    /// ad(x_j) u = x_j u - u x_j.
    pub fn ad_generator(&self, j: usize, u: &Poly) -> Poly {
        self.commutator(&Poly::var(j), u)
    }

    /// First generator that does not commute with `u`.
    pub fn non_central_witness(&self, u: &Poly) -> Option<usize> {
        (0..self.alg.dim()).find(|&j| !self.ad_generator(j, u).is_zero())
    }

    /// Symmetrization of a monomial: the average over orderings of its letters.
    pub fn symmetrize_monomial(&self, m: &Mono) -> Poly {
        if let Some(p) = self.sym.lock().unwrap().get(m) {
            return p.clone();
        }
        let k = m.degree();
        let out = if k <= 1 {
            Poly::monomial(*m, Q::one())
        } else {
            // the last letter is x_i with probability e_i / k
            let mut acc = Poly::zero();
            for i in 0..self.alg.dim() {
                if let Some(rest) = m.lower(i) {
                    let w = Q::new(m.exp(i).into(), (k as i64).into());
                    acc = acc.add(&self.mul_poly_gen(&self.symmetrize_monomial(&rest), i).scale(&w));
                }
            }
            acc
        };
        self.sym.lock().unwrap().insert(*m, out.clone());
        out
    }

    pub fn symmetrize(&self, s: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for (m, c) in s.terms() {
            acc = acc.add(&self.symmetrize_monomial(m).scale(c));
        }
        acc
    }

    /// Constant term in the PBW basis.
    pub fn augmentation(&self, u: &Poly) -> Q {
        u.constant_term()
    }
}

/// Basis of the ad-invariants in S^k(g), each degree separately, up to `max_degree`.
pub fn invariants_basis(alg: &MetricLieAlgebra, max_degree: usize) -> Vec<Poly> {
    let n = alg.dim();
    let mut out = Vec::new();
    for k in 0..=max_degree {
        let monos = Mono::of_degree(n, k);
        let index: HashMap<Mono, usize> = monos.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        // stack the action of every generator: rows (a, monomial)
        let mut cols = Vec::with_capacity(monos.len());
        for m in &monos {
            let mut entries = Vec::new();
            for a in 0..n {
                let img = alg.adjoint_on_sym(a, &Poly::monomial(*m, Q::one()));
                for (mm, v) in img.terms() {
                    entries.push((a * monos.len() + index[mm], v.clone()));
                }
            }
            cols.push(SparseVec::from_pairs(entries));
        }
        let mat = SparseMatrix::from_columns(n * monos.len(), cols);
        for kv in rank_kernel_image(&mat).kernel {
            let mut p = Poly::zero();
            for (i, v) in kv.iter() {
                p.add_term(monos[*i], v.clone());
            }
            out.push(p);
        }
    }
    out
}

pub fn is_invariant(alg: &MetricLieAlgebra, s: &Poly) -> bool {
    (0..alg.dim()).all(|a| alg.adjoint_on_sym(a, s).is_zero())
}

/// Lets a series in y act on S(g) as a constant-coefficient differential
/// operator, y^k ↦ ∂/∂x_k (the natural pairing of g^∨ with g).
pub fn apply_series(series: &Poly, s: &Poly) -> Poly {
    let mut acc = Poly::zero();
    for (m, c) in series.terms() {
        let mut d = s.clone();
        for k in 0..crate::poly::MAX_DIM {
            for _ in 0..m.exp(k) {
                d = d.deriv(k);
            }
            if d.is_zero() {
                break;
            }
        }
        acc = acc.add(&d.scale(c));
    }
    acc
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DufloError {
    #[error("input is not ad-invariant")]
    NotInvariant,
    #[error("character order {order} is below the input degree {degree}")]
    OrderTooSmall { order: usize, degree: usize },
}

/// i_PBW(j^{1/2}(∂) s) for invariant `s`.
pub fn duflo_map(u: &Enveloping, character: &Poly, order: usize, s: &Poly) -> Result<Poly, DufloError> {
    let deg = s.degree().unwrap_or(0);
    if order < deg {
        return Err(DufloError::OrderTooSmall { order, degree: deg });
    }
    if !is_invariant(u.algebra(), s) {
        return Err(DufloError::NotInvariant);
    }
    Ok(u.symmetrize(&apply_series(&character.truncate(order), s)))
}

/// First S(g) monomial of degree ≤ `max_degree` on which symmetrization fails
/// to intertwine the adjoint actions.
pub fn equivariance_witness(u: &Enveloping, max_degree: usize) -> Option<(usize, Mono)> {
    let alg = u.algebra();
    for m in Mono::up_to(alg.dim(), max_degree) {
        let s = Poly::monomial(m, Q::one());
        for a in 0..alg.dim() {
            if u.ad_generator(a, &u.symmetrize(&s)) != u.symmetrize(&alg.adjoint_on_sym(a, &s)) {
                return Some((a, m));
            }
        }
    }
    None
}

/// Rank of symmetrization restricted to S^k(g).
pub fn symmetrization_rank(u: &Enveloping, k: usize) -> usize {
    let monos = Mono::of_degree(u.algebra().dim(), k);
    let mut index: HashMap<Mono, usize> = HashMap::new();
    let mut cols = Vec::with_capacity(monos.len());
    for m in &monos {
        let img = u.symmetrize(&Poly::monomial(*m, Q::one()));
        let mut entries = Vec::new();
        for (mm, v) in img.terms() {
            let next = index.len();
            entries.push((*index.entry(*mm).or_insert(next), v.clone()));
        }
        cols.push(SparseVec::from_pairs(entries));
    }
    rank_kernel_image(&SparseMatrix::from_columns(index.len(), cols)).rank
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct PairFailure {
    pub left: usize,
    pub right: usize,
    #[serde(serialize_with = "crate::rational::exact::terms")]
    pub defect: Vec<(String, Q)>,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct DufloIsoReport {
    pub degree: usize,
    pub order: usize,
    #[serde(serialize_with = "crate::rational::exact::terms_vec")]
    pub invariants: Vec<Vec<(String, Q)>>,
    pub pairs_checked: usize,
    pub failures: Vec<PairFailure>,
    pub non_central: Vec<usize>,
    /// Constant term of duflo_map(c) − sym(c) for the Casimir c.
    #[serde(serialize_with = "crate::rational::exact::q")]
    pub casimir_shift: Q,
    pub negative_control: Option<PairFailure>,
}

impl DufloIsoReport {
    /// The control is reported separately: below degree 4 there may be no
    /// product on which plain symmetrization can fail.
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.non_central.is_empty()
    }
}

/// Checks duflo_map(a)·duflo_map(b) = duflo_map(ab) for invariant basis
/// elements with deg a + deg b ≤ `degree`, and centrality of each image.
/// The same check with plain symmetrization is the negative control.
pub fn verify_duflo_isomorphism(alg: &MetricLieAlgebra, degree: usize, order: usize) -> Result<DufloIsoReport, DufloError> {
    if order < degree {
        return Err(DufloError::OrderTooSmall { order, degree });
    }
    let u = Enveloping::new(alg);
    let ch = crate::calculus::duflo_character(alg, order);
    let basis = invariants_basis(alg, degree);
    let names = alg.basis_names();
    let n = alg.dim();
    let images: Vec<Poly> = basis.iter().map(|s| duflo_map(&u, &ch, order, s)).collect::<Result<_, _>>()?;
    let plain: Vec<Poly> = basis.iter().map(|s| u.symmetrize(s)).collect();
    let deg = |p: &Poly| p.degree().unwrap_or(0);
    let mut failures = Vec::new();
    let mut control = None;
    let mut pairs = 0;
    for a in 0..basis.len() {
        for b in a..basis.len() {
            if deg(&basis[a]) + deg(&basis[b]) > degree {
                continue;
            }
            pairs += 1;
            let prod = basis[a].mul(&basis[b]);
            let defect = u.mul(&images[a], &images[b]).sub(&duflo_map(&u, &ch, order, &prod)?);
            if !defect.is_zero() {
                failures.push(PairFailure { left: a, right: b, defect: defect.render(n, names) });
            }
            if control.is_none() {
                let d = u.mul(&plain[a], &plain[b]).sub(&u.symmetrize(&prod));
                if !d.is_zero() {
                    control = Some(PairFailure { left: a, right: b, defect: d.render(n, names) });
                }
            }
        }
    }
    let non_central = images.iter().enumerate().filter(|(_, p)| u.non_central_witness(p).is_some()).map(|(i, _)| i).collect();
    let c = alg.casimir();
    let casimir_shift = if order >= 2 { duflo_map(&u, &ch, order, &c)?.sub(&u.symmetrize(&c)).constant_term() } else { Q::zero() };
    Ok(DufloIsoReport {
        degree,
        order,
        invariants: basis.iter().map(|s| s.render(n, names)).collect(),
        pairs_checked: pairs,
        failures,
        non_central,
        casimir_shift,
        negative_control: control,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{builtin, sl2, so3};
    use crate::rational::{q, qi};

    fn mono(e: &[u8]) -> Poly {
        Poly::monomial(Mono::from_exps(e), Q::one())
    }

    #[test]
    fn sl2_straightening() {
        let u = Enveloping::new(&sl2(qi(1)).unwrap());
        let (h, e, f) = (Poly::var(0), Poly::var(1), Poly::var(2));
        assert_eq!(u.mul(&e, &f), mono(&[0, 1, 1]));
        assert_eq!(u.mul(&f, &e), mono(&[0, 1, 1]).sub(&h));
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let (x, y, z) = (Poly::var(a), Poly::var(b), Poly::var(c));
                    assert_eq!(u.mul(&u.mul(&x, &y), &z), u.mul(&x, &u.mul(&y, &z)));
                }
            }
        }
    }

    #[test]
    fn symmetrize_ef() {
        let u = Enveloping::new(&sl2(qi(1)).unwrap());
        let s = u.symmetrize(&mono(&[0, 1, 1]));
        assert_eq!(s, mono(&[0, 1, 1]).sub(&Poly::var(0).scale(&q(1, 2))));
    }

    #[test]
    fn invariant_dims() {
        assert_eq!(invariants_basis(&sl2(qi(1)).unwrap(), 4).len(), 3);
        assert_eq!(invariants_basis(&so3(qi(1)).unwrap(), 2).len(), 2);
        assert_eq!(invariants_basis(&builtin("abelian:2").unwrap(), 2).len(), 6);
    }

    #[test]
    fn non_invariant_rejected() {
        let a = sl2(qi(1)).unwrap();
        let u = Enveloping::new(&a);
        assert_eq!(duflo_map(&u, &Poly::one(), 2, &Poly::var(1)), Err(DufloError::NotInvariant));
        assert_eq!(duflo_map(&u, &Poly::one(), 1, &a.casimir()), Err(DufloError::OrderTooSmall { order: 1, degree: 2 }));
    }

    #[test]
    fn equivariant_and_injective() {
        let u = Enveloping::new(&sl2(qi(1)).unwrap());
        assert_eq!(equivariance_witness(&u, 3), None);
        assert_eq!(symmetrization_rank(&u, 3), 10);
    }

    #[test]
    fn duflo_isomorphism_sl2() {
        let a = sl2(qi(1)).unwrap();
        let r = verify_duflo_isomorphism(&a, 4, 4).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        assert_eq!(r.casimir_shift, q(1, 8));
        assert!(r.negative_control.is_some());
    }

    #[test]
    fn series_action() {
        // ∂_0 ∂_0 of x0^2 x1 = 2 x1
        let s = mono(&[2, 1]);
        assert_eq!(apply_series(&mono(&[2]), &s), Poly::var(1).scale(&qi(2)));
    }
}
