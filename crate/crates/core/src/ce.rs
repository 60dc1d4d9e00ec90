//! The Chevalley–Eilenberg algebra Ch(g) = Λ(ξ^1..ξ^n), its differential,
//! differential forms Λ(ξ) ⊗ S(y) (the module of jets with coadjoint
//! action), the de Rham differential, and CE cohomology with trivial,
//! jet and enveloping-algebra coefficients.
//!
//! Sign convention: exterior monomials are bitmasks read in ascending
//! index order; a generator moved past `k` odd symbols picks up `(-1)^k`.
//! On generators d ξ^k = -Σ_{i<j} c[i][j][k] ξ^i ξ^j.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::MetricLieAlgebra;
use crate::enveloping::Enveloping;
use crate::linalg::{FiniteChainComplex, HomologyBasis, LinalgError, SparseMatrix, SparseVec};
use crate::poly::{Mono, Poly};
use crate::rational::Q;

pub fn popcount(m: u32) -> usize {
    m.count_ones() as usize
}

/// Masks of the given popcount among `n` generators, ascending.
pub fn masks_of_degree(n: usize, k: usize) -> Vec<u32> {
    (0..(1u32 << n)).filter(|m| popcount(*m) == k).collect()
}

/// `ξ^a ∧ ξ^b = ±ξ^{a|b}`; `None` when they share a generator.
pub fn wedge(a: u32, b: u32) -> Option<(bool, u32)> {
    if a & b != 0 {
        return None;
    }
    // count pairs (i in a, j in b) with i > j
    let mut s = 0;
    let mut bb = b;
    while bb != 0 {
        let j = bb.trailing_zeros();
        s += (a >> (j + 1)).count_ones();
        bb &= bb - 1;
    }
    Some((s % 2 == 1, a | b))
}

/// Left derivative ∂/∂ξ^i: sign `(-1)^{#generators below i}`.
pub fn left_deriv(m: u32, i: usize) -> Option<(bool, u32)> {
    if m >> i & 1 == 0 {
        return None;
    }
    let below = (m & ((1u32 << i) - 1)).count_ones();
    Some((below % 2 == 1, m & !(1u32 << i)))
}

/// Right derivative: sign `(-1)^{#generators above i}`.
pub fn right_deriv(m: u32, i: usize) -> Option<(bool, u32)> {
    if m >> i & 1 == 0 {
        return None;
    }
    let above = (m >> (i + 1)).count_ones();
    Some((above % 2 == 1, m & !(1u32 << i)))
}

pub fn signed(neg: bool, v: Q) -> Q {
    if neg {
        -v
    } else {
        v
    }
}

/// Ch(g) with its differential tabulated on all exterior monomials.
#[derive(Clone, Debug)]
pub struct CeAlgebra {
    alg: MetricLieAlgebra,
    dtab: Vec<Vec<(u32, Q)>>,
}

impl CeAlgebra {
    pub fn new(alg: &MetricLieAlgebra) -> Self {
        let n = alg.dim();
        let dtab = (0..(1u32 << n)).map(|m| ce_differential_raw(alg, m)).collect();
        CeAlgebra { alg: alg.clone(), dtab }
    }

    pub fn algebra(&self) -> &MetricLieAlgebra {
        &self.alg
    }

    pub fn dim(&self) -> usize {
        self.alg.dim()
    }

    pub fn d(&self, m: u32) -> &[(u32, Q)] {
        &self.dtab[m as usize]
    }

    pub fn d_elem(&self, a: &ExtElement) -> ExtElement {
        let mut out = ExtElement::zero();
        for (m, v) in a.terms() {
            for (m2, c) in self.d(*m) {
                out.add_term(*m2, v * c);
            }
        }
        out
    }

    /// Differential of Ch(g) as a complex on degrees 0..=n.
    pub fn complex(&self) -> Result<FiniteChainComplex, LinalgError> {
        ce_module_complex(&self.alg, &CoefficientModule::trivial()).map(|c| c.complex)
    }

    /// D on a form basis element ξ^m y^e of Ch(g, jets).
    pub fn d_form(&self, m: u32, e: &Mono) -> FormElement {
        let alg = &self.alg;
        let n = alg.dim();
        let mut out = FormElement::zero();
        for (m2, c) in self.d(m) {
            out.add_term(*m2, *e, c.clone());
        }
        for k in 0..n {
            let Some(lower) = e.lower(k) else { continue };
            let ek = Q::from_integer(e.exp(k).into());
            for j in 0..n {
                let Some((neg, mj)) = wedge(1 << j, m) else { continue };
                for i in 0..n {
                    let c = alg.c(i, j, k);
                    if !c.is_zero() {
                        out.add_term(mj, lower.raise(i), signed(neg, &ek * c));
                    }
                }
            }
        }
        out
    }

    pub fn d_form_elem(&self, f: &FormElement) -> FormElement {
        let mut out = FormElement::zero();
        for ((m, e), v) in f.terms() {
            out.add_scaled(v, &self.d_form(*m, e));
        }
        out
    }
}

fn ce_differential_raw(alg: &MetricLieAlgebra, m: u32) -> Vec<(u32, Q)> {
    let n = alg.dim();
    let mut acc: BTreeMap<u32, Q> = BTreeMap::new();
    let mut pos = 0;
    for i in 0..n {
        if m >> i & 1 == 0 {
            continue;
        }
        let rest = m & !(1u32 << i);
        for a in 0..n {
            for b in a + 1..n {
                let c = alg.c(a, b, i);
                if c.is_zero() {
                    continue;
                }
                if let Some((neg, mm)) = wedge((1 << a) | (1 << b), rest) {
                    // (-1)^pos dξ^i ∧ ξ^rest with dξ^i = -c ξ^a ξ^b
                    let v = signed(neg ^ (pos % 2 == 1), -c.clone());
                    *acc.entry(mm).or_insert_with(Q::zero) += v;
                }
            }
        }
        pos += 1;
    }
    acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

/// Element of Ch(g).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtElement {
    terms: BTreeMap<u32, Q>,
}

impl ExtElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(m: u32, c: Q) -> Self {
        let mut e = Self::zero();
        e.add_term(m, c);
        e
    }

    pub fn add_term(&mut self, m: u32, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&u32, &Q)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &ExtElement) -> ExtElement {
        let mut out = self.clone();
        for (m, v) in o.terms() {
            out.add_term(*m, v.clone());
        }
        out
    }

    pub fn scale(&self, f: &Q) -> ExtElement {
        let mut out = ExtElement::zero();
        for (m, v) in self.terms() {
            out.add_term(*m, v * f);
        }
        out
    }

    pub fn wedge(&self, o: &ExtElement) -> ExtElement {
        let mut out = ExtElement::zero();
        for (a, x) in self.terms() {
            for (b, y) in o.terms() {
                if let Some((neg, m)) = wedge(*a, *b) {
                    out.add_term(m, signed(neg, x * y));
                }
            }
        }
        out
    }
}

pub type FormKey = (u32, Mono);

/// Element of Λ(ξ) ⊗ S(y): exterior generators in degree 1, jets in degree 0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormElement {
    terms: BTreeMap<FormKey, Q>,
}

impl FormElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(m: u32, e: Mono) -> Self {
        let mut f = Self::zero();
        f.add_term(m, e, Q::one());
        f
    }

    pub fn add_term(&mut self, m: u32, e: Mono, c: Q) {
        if c.is_zero() {
            return;
        }
        let k = (m, e);
        let x = self.terms.entry(k).or_insert_with(Q::zero);
        *x += c;
        if x.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn add_scaled(&mut self, f: &Q, o: &FormElement) {
        if f.is_zero() {
            return;
        }
        for ((m, e), v) in o.terms() {
            self.add_term(*m, *e, f * v);
        }
    }

    pub fn add(&self, o: &FormElement) -> FormElement {
        let mut out = self.clone();
        out.add_scaled(&Q::one(), o);
        out
    }

    pub fn sub(&self, o: &FormElement) -> FormElement {
        let mut out = self.clone();
        out.add_scaled(&-Q::one(), o);
        out
    }

    pub fn scale(&self, f: &Q) -> FormElement {
        let mut out = FormElement::zero();
        out.add_scaled(f, self);
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FormKey, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: u32, e: &Mono) -> Q {
        self.terms.get(&(m, *e)).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn filter<F: Fn(u32, &Mono) -> bool>(&self, keep: F) -> FormElement {
        FormElement { terms: self.terms.iter().filter(|((m, e), _)| keep(*m, e)).map(|(k, v)| (*k, v.clone())).collect() }
    }

    /// Product of forms, dropping jet degrees above `trunc`.
    pub fn mul_trunc(&self, o: &FormElement, trunc: usize) -> FormElement {
        let mut out = FormElement::zero();
        for ((m1, e1), v1) in self.terms() {
            for ((m2, e2), v2) in o.terms() {
                if e1.degree() + e2.degree() > trunc {
                    continue;
                }
                if let Some((neg, m)) = wedge(*m1, *m2) {
                    out.add_term(m, e1.mul(e2), signed(neg, v1 * v2));
                }
            }
        }
        out
    }

    pub fn mul_poly(&self, p: &Poly, trunc: usize) -> FormElement {
        let mut out = FormElement::zero();
        for ((m, e), v) in self.terms() {
            for (pe, pv) in p.terms() {
                if e.degree() + pe.degree() <= trunc {
                    out.add_term(*m, e.mul(pe), v * pv);
                }
            }
        }
        out
    }

    /// Left derivative in ξ^i.
    pub fn d_xi(&self, i: usize) -> FormElement {
        let mut out = FormElement::zero();
        for ((m, e), v) in self.terms() {
            if let Some((neg, m2)) = left_deriv(*m, i) {
                out.add_term(m2, *e, signed(neg, v.clone()));
            }
        }
        out
    }

    pub fn d_y(&self, j: usize) -> FormElement {
        let mut out = FormElement::zero();
        for ((m, e), v) in self.terms() {
            if let Some(l) = e.lower(j) {
                out.add_term(*m, l, v * Q::from_integer(e.exp(j).into()));
            }
        }
        out
    }

    pub fn exterior_degree(&self) -> Option<usize> {
        self.terms.keys().map(|(m, _)| popcount(*m)).max()
    }
}

/// d_dR of an exterior monomial: Σ_p (-1)^p y^{i_p} ξ^{m - i_p}.
pub fn de_rham(m: u32) -> FormElement {
    let mut out = FormElement::zero();
    let mut pos = 0;
    for i in 0..32 {
        if m >> i & 1 == 0 {
            continue;
        }
        out.add_term(m & !(1u32 << i), Mono::var(i), if pos % 2 == 0 { Q::one() } else { -Q::one() });
        pos += 1;
    }
    out
}

pub fn de_rham_elem(a: &ExtElement) -> FormElement {
    let mut out = FormElement::zero();
    for (m, v) in a.terms() {
        out.add_scaled(v, &de_rham(*m));
    }
    out
}

/// d_dR = Σ y^i ∂/∂ξ^i extended to forms.
pub fn de_rham_form(f: &FormElement, n: usize) -> FormElement {
    let mut out = FormElement::zero();
    for i in 0..n {
        let d = f.d_xi(i);
        for ((m, e), v) in d.terms() {
            out.add_term(*m, e.raise(i), v.clone());
        }
    }
    out
}

/// Basis of Λ(ξ) ⊗ S^{≤trunc}(y), optionally cut to weight
/// `#ξ + jet degree ≤ weight_bound`, indexed per exterior degree.
#[derive(Clone, Debug)]
pub struct FormsSpace {
    n: usize,
    trunc: usize,
    weight_bound: Option<usize>,
    basis: Vec<Vec<FormKey>>,
    index: HashMap<FormKey, usize>,
}

impl FormsSpace {
    pub fn new(n: usize, trunc: usize, weight_bound: Option<usize>) -> Self {
        let monos = Mono::up_to(n, trunc);
        let mut basis = vec![Vec::new(); n + 1];
        let mut index = HashMap::new();
        for (k, b) in basis.iter_mut().enumerate() {
            for m in masks_of_degree(n, k) {
                for e in &monos {
                    if weight_bound.map_or(true, |w| k + e.degree() <= w) {
                        index.insert((m, *e), b.len());
                        b.push((m, *e));
                    }
                }
            }
        }
        FormsSpace { n, trunc, weight_bound, basis, index }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn weight_bound(&self) -> Option<usize> {
        self.weight_bound
    }

    pub fn dim(&self, k: usize) -> usize {
        self.basis.get(k).map_or(0, |b| b.len())
    }

    pub fn degree_basis(&self, k: usize) -> &[FormKey] {
        self.basis.get(k).map_or(&[], |b| b.as_slice())
    }

    pub fn contains(&self, m: u32, e: &Mono) -> bool {
        self.index.contains_key(&(m, *e))
    }

    pub fn position(&self, m: u32, e: &Mono) -> Option<usize> {
        self.index.get(&(m, *e)).copied()
    }

    /// Coordinates of the degree-`k` part of `f` inside the space (other terms are dropped).
    pub fn vec(&self, k: usize, f: &FormElement) -> SparseVec {
        SparseVec::from_pairs(
            f.terms().filter(|((m, _), _)| popcount(*m) == k).filter_map(|((m, e), v)| self.position(*m, e).map(|i| (i, v.clone()))),
        )
    }

    pub fn elem(&self, k: usize, v: &SparseVec) -> FormElement {
        let mut f = FormElement::zero();
        for (i, c) in v.iter() {
            let (m, e) = self.basis[k][*i];
            f.add_term(m, e, c.clone());
        }
        f
    }

    /// Matrix of `op` from exterior degree `from` to `to`, projected to the space.
    pub fn operator<F: Fn(u32, &Mono) -> FormElement>(&self, from: usize, to: usize, op: F) -> SparseMatrix {
        let cols = self.degree_basis(from).iter().map(|(m, e)| self.vec(to, &op(*m, e))).collect();
        SparseMatrix::from_columns(self.dim(to), cols)
    }

    /// The forms complex with differential D (quotient by the weight cut, if any).
    pub fn complex(&self, ce: &CeAlgebra) -> Result<FiniteChainComplex, LinalgError> {
        let d = (0..self.n).map(|k| self.operator(k, k + 1, |m, e| ce.d_form(m, e))).collect();
        FiniteChainComplex::new(0, (0..=self.n).map(|k| self.dim(k)).collect(), d)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "order")]
pub enum ModuleTag {
    Trivial,
    Jets(usize),
    Uea(usize),
}

impl ModuleTag {
    pub fn parse(s: &str) -> Option<ModuleTag> {
        match s.split_once(':') {
            None if s == "trivial" => Some(ModuleTag::Trivial),
            Some(("jets", n)) => n.parse().ok().map(ModuleTag::Jets),
            Some(("uea", n)) => n.parse().ok().map(ModuleTag::Uea),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            ModuleTag::Trivial => "trivial".into(),
            ModuleTag::Jets(n) => format!("jets:{n}"),
            ModuleTag::Uea(d) => format!("uea:{d}"),
        }
    }
}

/// A finite-dimensional g-module: basis labels and action matrices ρ(x_j).
#[derive(Clone, Debug)]
pub struct CoefficientModule {
    pub tag: ModuleTag,
    pub basis: Vec<Mono>,
    pub action: Vec<SparseMatrix>,
}

impl CoefficientModule {
    pub fn trivial() -> Self {
        CoefficientModule { tag: ModuleTag::Trivial, basis: vec![Mono::one()], action: Vec::new() }
    }

    /// Polynomial functions on g of degree ≤ N with the coadjoint action.
    pub fn jets(alg: &MetricLieAlgebra, order: usize) -> Self {
        let n = alg.dim();
        let basis = Mono::up_to(n, order);
        let index: HashMap<Mono, usize> = basis.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let action = (0..n)
            .map(|j| {
                let cols = basis
                    .iter()
                    .map(|m| {
                        let img = alg.coadjoint_on_jets(j, &Poly::monomial(*m, Q::one()));
                        SparseVec::from_pairs(img.terms().map(|(mm, v)| (index[mm], v.clone())))
                    })
                    .collect();
                SparseMatrix::from_columns(basis.len(), cols)
            })
            .collect();
        CoefficientModule { tag: ModuleTag::Jets(order), basis, action }
    }

    /// U(g) truncated to PBW degree ≤ D with the adjoint action.
    pub fn uea(alg: &MetricLieAlgebra, degree: usize) -> Self {
        let n = alg.dim();
        let u = Enveloping::new(alg);
        let basis = Mono::up_to(n, degree);
        let index: HashMap<Mono, usize> = basis.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let action = (0..n)
            .map(|j| {
                let cols = basis
                    .iter()
                    .map(|m| {
                        let img = u.ad_generator(j, &Poly::monomial(*m, Q::one()));
                        SparseVec::from_pairs(img.terms().map(|(mm, v)| {
                            let i = *index.get(mm).expect("adjoint action raised the PBW degree");
                            (i, v.clone())
                        }))
                    })
                    .collect();
                SparseMatrix::from_columns(basis.len(), cols)
            })
            .collect();
        CoefficientModule { tag: ModuleTag::Uea(degree), basis, action }
    }

    pub fn for_tag(alg: &MetricLieAlgebra, tag: &ModuleTag) -> Self {
        match tag {
            ModuleTag::Trivial => Self::trivial(),
            ModuleTag::Jets(n) => Self::jets(alg, *n),
            ModuleTag::Uea(d) => Self::uea(alg, *d),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Ch(g, E): degree k is Λ^k ⊗ E, basis ordered mask-major.
#[derive(Clone, Debug)]
pub struct CEModuleComplex {
    pub tag: ModuleTag,
    pub masks: Vec<Vec<u32>>,
    pub fiber: Vec<Mono>,
    pub complex: FiniteChainComplex,
}

impl CEModuleComplex {
    pub fn basis_element(&self, k: usize, i: usize) -> (u32, Mono) {
        let f = self.fiber.len();
        (self.masks[k][i / f], self.fiber[i % f])
    }
}

/// d(ξ^m ⊗ v) = d_CE ξ^m ⊗ v + Σ_j ξ^j ∧ ξ^m ⊗ ρ(x_j) v.
pub fn ce_module_complex(alg: &MetricLieAlgebra, module: &CoefficientModule) -> Result<CEModuleComplex, LinalgError> {
    let n = alg.dim();
    let ce = CeAlgebra::new(alg);
    let f = module.dim();
    let masks: Vec<Vec<u32>> = (0..=n).map(|k| masks_of_degree(n, k)).collect();
    let pos: Vec<HashMap<u32, usize>> = masks.iter().map(|ms| ms.iter().enumerate().map(|(i, m)| (*m, i)).collect()).collect();
    let mut d = Vec::new();
    for k in 0..n {
        let mut cols = Vec::with_capacity(masks[k].len() * f);
        for &m in &masks[k] {
            for v in 0..f {
                let mut out = Vec::new();
                for (m2, c) in ce.d(m) {
                    out.push((pos[k + 1][m2] * f + v, c.clone()));
                }
                for (j, rho) in module.action.iter().enumerate() {
                    let img = rho.column(v);
                    if img.is_zero() {
                        continue;
                    }
                    if let Some((neg, mj)) = wedge(1 << j, m) {
                        for (w, c) in img.iter() {
                            out.push((pos[k + 1][&mj] * f + w, signed(neg, c.clone())));
                        }
                    }
                }
                cols.push(SparseVec::from_pairs(out));
            }
        }
        d.push(SparseMatrix::from_columns(masks[k + 1].len() * f, cols));
    }
    let dims = masks.iter().map(|m| m.len() * f).collect();
    let complex = FiniteChainComplex::new(0, dims, d)?;
    Ok(CEModuleComplex { tag: module.tag.clone(), masks, fiber: module.basis.clone(), complex })
}

#[derive(Clone, Debug)]
pub struct CeCohomology {
    pub dims: Vec<usize>,
    pub classes: Vec<HomologyBasis>,
}

pub fn ce_cohomology(alg: &MetricLieAlgebra, tag: &ModuleTag) -> Result<(CEModuleComplex, CeCohomology), LinalgError> {
    let module = CoefficientModule::for_tag(alg, tag);
    let cx = ce_module_complex(alg, &module)?;
    let classes: Vec<HomologyBasis> = cx.complex.degrees().map(|k| cx.complex.homology(k)).collect();
    let dims = classes.iter().map(|h| h.dimension).collect();
    Ok((cx, CeCohomology { dims, classes }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{builtin, oscillator, sl2, so3};
    use crate::rational::qi;

    #[test]
    fn wedge_signs() {
        assert_eq!(wedge(0b010, 0b001), Some((true, 0b011)));
        assert_eq!(wedge(0b001, 0b010), Some((false, 0b011)));
        assert_eq!(wedge(0b011, 0b010), None);
        assert_eq!(wedge(0b101, 0b010), Some((true, 0b111)));
    }

    #[test]
    fn sl2_differential_on_generators() {
        let ce = CeAlgebra::new(&sl2(qi(1)).unwrap());
        // d ξ^h = -c[e][f][h] ξ^e ξ^f
        assert_eq!(ce.d(0b001), &[(0b110, qi(-1))]);
        // d ξ^e = -c[h][e][e] ξ^h ξ^e
        assert_eq!(ce.d(0b010), &[(0b011, qi(-2))]);
    }

    #[test]
    fn cohomology_dims() {
        for (a, want) in [
            (sl2(qi(1)).unwrap(), vec![1, 0, 0, 1]),
            (so3(qi(1)).unwrap(), vec![1, 0, 0, 1]),
            (builtin("abelian:2").unwrap(), vec![1, 2, 1]),
        ] {
            let (_, h) = ce_cohomology(&a, &ModuleTag::Trivial).unwrap();
            assert_eq!(h.dims, want, "{}", a.name());
        }
    }

    #[test]
    fn jets_and_uea_invariants() {
        let a = sl2(qi(1)).unwrap();
        let (_, h) = ce_cohomology(&a, &ModuleTag::Jets(2)).unwrap();
        assert_eq!(h.dims[0], 2);
        let (_, h) = ce_cohomology(&a, &ModuleTag::Uea(2)).unwrap();
        assert_eq!(h.dims[0], 2);
    }

    #[test]
    fn de_rham_example() {
        let f = de_rham(0b011);
        assert_eq!(f.coeff(0b010, &Mono::var(0)), qi(1));
        assert_eq!(f.coeff(0b001, &Mono::var(1)), qi(-1));
        assert!(de_rham(0).is_zero());
    }

    #[test]
    fn forms_complex_matches_jets_module() {
        let a = oscillator();
        let ce = CeAlgebra::new(&a);
        let space = FormsSpace::new(4, 2, None);
        let c1 = space.complex(&ce).unwrap();
        let (_, h) = ce_cohomology(&a, &ModuleTag::Jets(2)).unwrap();
        let dims: Vec<usize> = c1.degrees().map(|k| c1.homology(k).dimension).collect();
        assert_eq!(dims, h.dims);
    }
}
