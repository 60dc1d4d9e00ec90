//! Operator calculus on truncated forms Λ(ξ) ⊗ S^{≤N}(y): Bernoulli
//! numbers, the Ad tensor, invariant vector field matrices, contraction
//! operators, d_Br, d₀, the homotopies H_{2n-1}, the Duflo character and
//! the homotopy identity relating d₀ to the conjugated Brylinski
//! differential.
//!
//! Index placement: an End(g)-valued matrix `M^k_i` is turned into a
//! bivector with the inverse metric, `T^{kj} = Σ_i M^k_i g^{ij}`, and
//! contraction(M) = Σ T^{kj} ∂/∂ξ^k ∂/∂y^j (coefficients multiply after
//! differentiating).

use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::MetricLieAlgebra;
use crate::ce::{popcount, CeAlgebra, FormElement, FormsSpace};
use crate::linalg::{find_chain_homotopy, FiniteChainComplex, GradedMap, HomotopyResult, SparseMatrix, SparseVec};
use crate::poly::{Mono, Poly, PolyMatrix};
use crate::rational::{factorial, qi, Q};

/// B_0..B_K from z/(e^z - 1) by series division (B_1 = -1/2).
pub fn bernoulli(k: usize) -> Vec<Q> {
    // (e^z - 1)/z = Σ z^m/(m+1)!
    let a: Vec<Q> = (0..=k).map(|m| Q::one() / factorial(m + 1)).collect();
    let mut b: Vec<Q> = Vec::with_capacity(k + 1);
    for m in 0..=k {
        // Σ_{i≤m} a_{m-i} b_i = [m == 0]
        let mut s = if m == 0 { Q::one() } else { Q::zero() };
        for (i, bi) in b.iter().enumerate() {
            s -= &a[m - i] * bi;
        }
        b.push(s / &a[0]);
    }
    b.into_iter().enumerate().map(|(m, x)| x * factorial(m)).collect()
}

/// (Ad)^i_j = Σ_k y^k c[k][j][i].
pub fn ad_tensor(alg: &MetricLieAlgebra) -> PolyMatrix {
    let n = alg.dim();
    let mut m = PolyMatrix::zero(n);
    for i in 0..n {
        for j in 0..n {
            let mut p = Poly::zero();
            for k in 0..n {
                p.add_term(Mono::var(k), alg.c(k, j, i).clone());
            }
            m.entries[i][j] = p;
        }
    }
    m
}

/// Σ_m coeffs[m] Ad^m, truncated at jet degree `trunc`.
pub fn ad_series(alg: &MetricLieAlgebra, coeffs: &[Q], trunc: usize) -> PolyMatrix {
    let n = alg.dim();
    let pw = ad_tensor(alg).powers(coeffs.len().saturating_sub(1).min(trunc), trunc);
    let mut acc = PolyMatrix::zero(n);
    for (m, c) in coeffs.iter().enumerate().take(pw.len()) {
        if !c.is_zero() {
            acc = acc.add(&pw[m].scale(c));
        }
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// id ± ½Ad + Σ B_{2n}/(2n)! Ad^{2n}, "+" for left, "−" for right.
pub fn invariant_field_matrix(side: Side, alg: &MetricLieAlgebra, trunc: usize) -> PolyMatrix {
    let b = bernoulli(trunc);
    let coeffs: Vec<Q> = (0..=trunc)
        .map(|m| match m {
            0 => Q::one(),
            1 => match side {
                Side::Left => Q::new(1.into(), 2.into()),
                Side::Right => Q::new((-1).into(), 2.into()),
            },
            _ if m % 2 == 0 => &b[m] / factorial(m),
            _ => Q::zero(),
        })
        .collect();
    ad_series(alg, &coeffs, trunc)
}

/// (1 - e^{-Ad})/Ad for the left side, (e^{Ad} - 1)/Ad for the right.
pub fn exponential_differential(side: Side, alg: &MetricLieAlgebra, trunc: usize) -> PolyMatrix {
    let coeffs: Vec<Q> = (0..=trunc)
        .map(|m| {
            let c = Q::one() / factorial(m + 1);
            if side == Side::Left && m % 2 == 1 {
                -c
            } else {
                c
            }
        })
        .collect();
    ad_series(alg, &coeffs, trunc)
}

/// Tr(Ad^m) as a polynomial.
pub fn trace_ad_power(alg: &MetricLieAlgebra, m: usize, trunc: usize) -> Poly {
    ad_tensor(alg).powers(m, trunc)[m].trace()
}

/// ln j^{1/2} = Σ_{2n ≤ trunc} B_{2n}/(4n (2n)!) Tr(Ad^{2n}).
pub fn log_character(alg: &MetricLieAlgebra, trunc: usize) -> Poly {
    let b = bernoulli(trunc);
    let pw = ad_tensor(alg).powers(trunc, trunc);
    let mut acc = Poly::zero();
    for n in 1..=trunc / 2 {
        let c = &b[2 * n] / (qi(4 * n as i64) * factorial(2 * n));
        acc = acc.add(&pw[2 * n].trace().scale(&c));
    }
    acc
}

/// The Duflo character j^{1/2} through jet degree `trunc`.
pub fn duflo_character(alg: &MetricLieAlgebra, trunc: usize) -> Poly {
    log_character(alg, trunc).exp_trunc(trunc)
}

/// Determinant series of (1 - e^{-Ad})/Ad through degree `trunc`.
pub fn jacobian_series(alg: &MetricLieAlgebra, trunc: usize) -> Poly {
    exponential_differential(Side::Left, alg, trunc).det_trunc(trunc)
}

/// A linear operator on a forms space, stored per source exterior degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormsOperator {
    /// Change of exterior (cohomological) degree.
    pub degree: i32,
    /// Largest increase of jet degree.
    pub raise: i32,
    /// Dimension of each exterior degree of the underlying space.
    pub dims: Vec<usize>,
    /// `blocks[k]` maps exterior degree `k` to `k + degree`.
    pub blocks: Vec<SparseMatrix>,
}

impl FormsOperator {
    pub fn build<F: Fn(u32, &Mono) -> FormElement>(space: &FormsSpace, degree: i32, raise: i32, op: F) -> Self {
        let n = space.n() as i32;
        let blocks = (0..=n)
            .map(|k| {
                let t = k + degree;
                if t < 0 || t > n {
                    SparseMatrix::zeros(0, space.dim(k as usize))
                } else {
                    space.operator(k as usize, t as usize, &op)
                }
            })
            .collect();
        FormsOperator { degree, raise, dims: (0..=n).map(|k| space.dim(k as usize)).collect(), blocks }
    }

    pub fn zero(space: &FormsSpace, degree: i32) -> Self {
        Self::build(space, degree, 0, |_, _| FormElement::zero())
    }

    pub fn identity(space: &FormsSpace) -> Self {
        Self::build(space, 0, 0, |m, e| FormElement::basis(m, *e))
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.is_zero())
    }

    pub fn add_scaled(&self, f: &Q, o: &FormsOperator) -> FormsOperator {
        assert_eq!(self.degree, o.degree, "operators of different degree");
        FormsOperator {
            degree: self.degree,
            raise: self.raise.max(o.raise),
            dims: self.dims.clone(),
            blocks: self.blocks.iter().zip(&o.blocks).map(|(a, b)| a.add_scaled(f, b)).collect(),
        }
    }

    pub fn add(&self, o: &FormsOperator) -> FormsOperator {
        self.add_scaled(&Q::one(), o)
    }

    pub fn sub(&self, o: &FormsOperator) -> FormsOperator {
        self.add_scaled(&-Q::one(), o)
    }

    pub fn scale(&self, f: &Q) -> FormsOperator {
        FormsOperator {
            degree: self.degree,
            raise: self.raise,
            dims: self.dims.clone(),
            blocks: self.blocks.iter().map(|b| b.scale(f)).collect(),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &FormsOperator) -> FormsOperator {
        let n = self.dims.len() as i32 - 1;
        let degree = self.degree + other.degree;
        let blocks = (0..=n)
            .map(|k| {
                let mid = k + other.degree;
                let inner = &other.blocks[k as usize];
                if (0..=n).contains(&mid) {
                    self.blocks[mid as usize].mul(inner)
                } else {
                    let t = k + degree;
                    let rows = if (0..=n).contains(&t) { self.dims[t as usize] } else { 0 };
                    SparseMatrix::zeros(rows, inner.cols())
                }
            })
            .collect();
        FormsOperator { degree, raise: self.raise + other.raise, dims: self.dims.clone(), blocks }
    }

    /// Graded commutator `[self, other] = self∘other − (−1)^{|self||other|} other∘self`.
    pub fn commutator(&self, other: &FormsOperator) -> FormsOperator {
        let s = if (self.degree * other.degree).rem_euclid(2) == 0 { -Q::one() } else { Q::one() };
        self.compose(other).add_scaled(&s, &other.compose(self))
    }

    pub fn apply(&self, space: &FormsSpace, f: &FormElement) -> FormElement {
        let mut out = FormElement::zero();
        for k in 0..self.blocks.len() {
            let t = k as i32 + self.degree;
            if t < 0 || t as usize >= self.blocks.len() {
                continue;
            }
            let v = space.vec(k, f);
            out = out.add(&space.elem(t as usize, &self.blocks[k].mul_vec(&v)));
        }
        out
    }

    /// Compares with `other` on every matrix entry whose target has jet degree ≤ `max_jet`.
    /// Returns the first (source exterior degree, source basis index) that differs.
    pub fn first_difference_within(&self, other: &FormsOperator, space: &FormsSpace, max_jet: usize) -> Option<(usize, usize)> {
        assert_eq!(self.degree, other.degree);
        for k in 0..self.blocks.len() {
            let t = k as i32 + self.degree;
            if t < 0 || t as usize >= self.blocks.len() {
                continue;
            }
            let rows = space.degree_basis(t as usize);
            let keep = |r: usize| rows[r].1.degree() <= max_jet;
            for c in 0..self.blocks[k].cols() {
                if self.blocks[k].column(c).filter(keep) != other.blocks[k].column(c).filter(keep) {
                    return Some((k, c));
                }
            }
        }
        None
    }
}

/// T^{kj} = Σ_i M^k_i g^{ij}.
pub fn raise_index(m: &PolyMatrix, alg: &MetricLieAlgebra) -> PolyMatrix {
    let n = alg.dim();
    let mut t = PolyMatrix::zero(n);
    for k in 0..n {
        for j in 0..n {
            let mut acc = Poly::zero();
            for i in 0..n {
                let g = alg.gi(i, j);
                if !g.is_zero() && !m.entries[k][i].is_zero() {
                    acc = acc.add(&m.entries[k][i].scale(g));
                }
            }
            t.entries[k][j] = acc;
        }
    }
    t
}

/// Σ T^{kj} ∂/∂ξ^k ∂/∂y^j on a single form, with `t` already index-raised.
pub fn contract_form(t: &PolyMatrix, f: &FormElement, trunc: usize) -> FormElement {
    let mut out = FormElement::zero();
    for k in 0..t.n {
        let dk = f.d_xi(k);
        if dk.is_zero() {
            continue;
        }
        for j in 0..t.n {
            if t.entries[k][j].is_zero() {
                continue;
            }
            out = out.add(&dk.d_y(j).mul_poly(&t.entries[k][j], trunc));
        }
    }
    out
}

/// Σ T^{kj} ∂/∂ξ^k ∂/∂y^j with T = M g^{-1}; degree −1.
pub fn contraction_operator(m: &PolyMatrix, alg: &MetricLieAlgebra, space: &FormsSpace) -> FormsOperator {
    let t = raise_index(m, alg);
    let trunc = space.trunc();
    let raise = m.max_degree().map_or(-1, |d| d as i32 - 1);
    FormsOperator::build(space, -1, raise, |mask, e| contract_form(&t, &FormElement::basis(mask, *e), trunc))
}

/// id + Σ_{2n ≤ max_power} B_{2n}/(2n)! Ad^{2n}, the matrix whose contraction is d₀.
pub fn d0_matrix(alg: &MetricLieAlgebra, max_power: usize, trunc: usize) -> PolyMatrix {
    let mut m = PolyMatrix::identity(alg.dim());
    if max_power >= 2 {
        let pw = ad_tensor(alg).powers(max_power, trunc);
        for (p, w) in even_bernoulli_weights(max_power) {
            m = m.add(&pw[p].scale(&w));
        }
    }
    m
}

/// Σ T^{kj} ∂/∂ξ^k ∂/∂ξ^j with T = M g^{-1}; degree −2.
pub fn double_odd_contraction(m: &PolyMatrix, alg: &MetricLieAlgebra, space: &FormsSpace) -> FormsOperator {
    let t = raise_index(m, alg);
    let n = alg.dim();
    let trunc = space.trunc();
    let raise = m.max_degree().map_or(0, |d| d as i32);
    FormsOperator::build(space, -2, raise, |mask, e| {
        let base = FormElement::basis(mask, *e);
        let mut out = FormElement::zero();
        for k in 0..n {
            for j in 0..n {
                if t.entries[k][j].is_zero() {
                    continue;
                }
                out = out.add(&base.d_xi(j).d_xi(k).mul_poly(&t.entries[k][j], trunc));
            }
        }
        out
    })
}

pub fn brylinski(alg: &MetricLieAlgebra, space: &FormsSpace) -> FormsOperator {
    contraction_operator(&PolyMatrix::identity(alg.dim()), alg, space)
}

pub fn multiplication(p: &Poly, space: &FormsSpace) -> FormsOperator {
    let trunc = space.trunc();
    let raise = p.degree().unwrap_or(0) as i32;
    FormsOperator::build(space, 0, raise, |m, e| FormElement::basis(m, *e).mul_poly(p, trunc))
}

pub fn ce_operator(ce: &CeAlgebra, space: &FormsSpace) -> FormsOperator {
    FormsOperator::build(space, 1, 0, |m, e| ce.d_form(m, e))
}

/// Bernoulli coefficients B_{2n}/(2n)! for 1 ≤ n with 2n ≤ `max_power`.
pub fn even_bernoulli_weights(max_power: usize) -> Vec<(usize, Q)> {
    let b = bernoulli(max_power.max(2));
    (1..=max_power / 2).map(|n| (2 * n, &b[2 * n] / factorial(2 * n))).collect()
}

/// d₀ = contraction(id + Σ B_{2n}/(2n)! Ad^{2n}), powers up to `max_power`.
pub fn d0_operator(alg: &MetricLieAlgebra, space: &FormsSpace, max_power: usize) -> FormsOperator {
    contraction_operator(&d0_matrix(alg, max_power, space.trunc()), alg, space)
}

/// ½(contraction(M₊) + contraction(M₋)).
pub fn d0_operator_half_sum(alg: &MetricLieAlgebra, space: &FormsSpace, max_power: usize) -> FormsOperator {
    let t = max_power.min(space.trunc());
    let l = contraction_operator(&invariant_field_matrix(Side::Left, alg, t), alg, space);
    let r = contraction_operator(&invariant_field_matrix(Side::Right, alg, t), alg, space);
    l.add(&r).scale(&Q::new(1.into(), 2.into()))
}

/// H_{2n-1} = Σ T^{kj} ∂/∂ξ^k ∂/∂ξ^j with T = Ad^{2n-1} g^{-1}.
pub fn homotopy_h(n: usize, alg: &MetricLieAlgebra, space: &FormsSpace) -> FormsOperator {
    assert!(n >= 1);
    let pw = ad_tensor(alg).powers(2 * n - 1, space.trunc());
    double_odd_contraction(&pw[2 * n - 1], alg, space)
}

/// Outcome of the identity [D, H_{2n-1}] = 2·contraction(Ad^{2n}) − (1/2n)[d_Br, Tr Ad^{2n}].
#[derive(Clone, Debug, Serialize)]
pub struct CommutatorCheck {
    pub n: usize,
    pub holds: bool,
    pub window_max_jet: usize,
    pub witness: Option<(usize, usize)>,
}

pub fn check_commutator_identity(alg: &MetricLieAlgebra, order: usize, n: usize) -> CommutatorCheck {
    let space = FormsSpace::new(alg.dim(), order + 1, None);
    let ce = CeAlgebra::new(alg);
    let d = ce_operator(&ce, &space);
    let h = homotopy_h(n, alg, &space);
    let lhs = d.commutator(&h);
    let pw = ad_tensor(alg).powers(2 * n, space.trunc());
    let c2n = contraction_operator(&pw[2 * n], alg, &space);
    let tr = multiplication(&pw[2 * n].trace(), &space);
    let dbr = brylinski(alg, &space);
    let rhs = c2n.scale(&qi(2)).sub(&dbr.commutator(&tr).scale(&Q::new(1.into(), (2 * n as i64).into())));
    let witness = lhs.first_difference_within(&rhs, &space, order);
    CommutatorCheck { n, holds: witness.is_none(), window_max_jet: order, witness }
}

/// Everything needed for the homotopy identity Φ = [D, K].
pub struct CharData {
    pub space: FormsSpace,
    pub order: usize,
    pub d: FormsOperator,
    pub d0: FormsOperator,
    pub conj_dbr: FormsOperator,
    pub phi: FormsOperator,
    pub k: FormsOperator,
}

/// Builds Φ = d₀ − j^{-1/2} d_Br j^{1/2} and K = ½ Σ B_{2n}/(2n)! H_{2n-1} on
/// jets of degree ≤ order + 1; every component landing in degree ≤ order is exact.
pub fn char_data(alg: &MetricLieAlgebra, order: usize) -> CharData {
    let trunc = order + 1;
    let space = FormsSpace::new(alg.dim(), trunc, None);
    let ce = CeAlgebra::new(alg);
    let d = ce_operator(&ce, &space);
    let d0 = d0_operator(alg, &space, trunc + 1);
    let ch = duflo_character(alg, trunc);
    let inv = ch.inverse_trunc(trunc);
    let dbr = brylinski(alg, &space);
    let conj_dbr = multiplication(&inv, &space).compose(&dbr).compose(&multiplication(&ch, &space));
    let phi = d0.sub(&conj_dbr);
    let mut k = FormsOperator::zero(&space, -2);
    for (p, w) in even_bernoulli_weights(trunc + 1) {
        k = k.add(&homotopy_h(p / 2, alg, &space).scale(&(w / qi(2))));
    }
    CharData { space, order, d, d0, conj_dbr, phi, k }
}

#[derive(Clone, Debug, Serialize)]
pub struct CharReport {
    pub order: usize,
    pub window_max_jet: usize,
    pub commutator_identities: Vec<CommutatorCheck>,
    pub exact_identity_holds: bool,
    pub exact_identity_witness: Option<(usize, usize)>,
    pub d0_is_chain_map: bool,
    pub half_sum_matches: bool,
    pub character_inverse: bool,
    pub conjugation_identity: bool,
    pub homotopy_blocks: usize,
    pub homotopy_feasible: bool,
    pub infeasible_block: Option<(usize, i32)>,
}

impl CharReport {
    pub fn passed(&self) -> bool {
        self.commutator_identities.iter().all(|c| c.holds)
            && self.exact_identity_holds
            && self.d0_is_chain_map
            && self.half_sum_matches
            && self.character_inverse
            && self.conjugation_identity
            && self.homotopy_feasible
    }
}

/// Forms with jet degree exactly `p`, as a subcomplex of D.
pub fn jet_degree_block(space: &FormsSpace, d: &FormsOperator, p: usize) -> (FiniteChainComplex, Vec<Vec<usize>>) {
    let n = space.n();
    let keep: Vec<Vec<usize>> =
        (0..=n).map(|k| space.degree_basis(k).iter().enumerate().filter(|(_, (_, e))| e.degree() == p).map(|(i, _)| i).collect()).collect();
    let full = FiniteChainComplex::new(0, (0..=n).map(|k| space.dim(k)).collect(), d.blocks[..n].to_vec())
        .expect("forms differential squares to zero");
    full.subcomplex(&keep).expect("jet degree is preserved by D")
}

/// Component of `op` from jet degree `p` to jet degree `q` as a graded map between blocks.
pub fn operator_component(op: &FormsOperator, src: &[Vec<usize>], dst: &[Vec<usize>]) -> GradedMap {
    let n = src.len() as i32 - 1;
    let maps = (0..=n)
        .map(|k| {
            let t = k + op.degree;
            let rows = if (0..=n).contains(&t) { dst[t as usize].len() } else { 0 };
            let pos: std::collections::HashMap<usize, usize> =
                if rows == 0 { Default::default() } else { dst[t as usize].iter().enumerate().map(|(i, &r)| (r, i)).collect() };
            let cols = src[k as usize]
                .iter()
                .map(|&c| if rows == 0 { SparseVec::new() } else { op.blocks[k as usize].column(c).reindex(|r| pos.get(&r).copied()) })
                .collect();
            SparseMatrix::from_columns(rows, cols)
        })
        .collect();
    GradedMap { source_lo: 0, shift: op.degree, maps }
}

pub fn verify_char(alg: &MetricLieAlgebra, order: usize) -> CharReport {
    let commutator_identities = (1..=2).map(|n| check_commutator_identity(alg, order, n)).collect();
    let data = char_data(alg, order);
    let comm = data.d.commutator(&data.k);
    let witness = comm.first_difference_within(&data.phi, &data.space, order);
    let d0_chain = data.d.commutator(&data.d0).first_difference_within(&FormsOperator::zero(&data.space, 0), &data.space, order);
    let half = d0_operator_half_sum(alg, &data.space, order + 2);
    let half_ok = half.first_difference_within(&data.d0, &data.space, order).is_none();
    let trunc = data.space.trunc();
    let ch = duflo_character(alg, trunc);
    let inv_ok = multiplication(&ch.inverse_trunc(trunc), &data.space)
        .compose(&multiplication(&ch, &data.space))
        .first_difference_within(&FormsOperator::identity(&data.space), &data.space, order)
        .is_none();
    let dbr = brylinski(alg, &data.space);
    let conj = dbr.add(&dbr.commutator(&multiplication(&log_character(alg, trunc), &data.space)));
    let conj_ok = data.conj_dbr.first_difference_within(&conj, &data.space, order).is_none();

    // independent confirmation: solve [D, K'] = Φ block by block
    let mut blocks = 0;
    let mut feasible = true;
    let mut infeasible_block = None;
    let parts: Vec<_> = (0..=order).map(|p| jet_degree_block(&data.space, &data.d, p)).collect();
    'outer: for p in 0..=order {
        for q in 0..=order {
            let phi = operator_component(&data.phi, &parts[p].1, &parts[q].1);
            if phi.maps.iter().all(|m| m.is_zero()) {
                continue;
            }
            blocks += 1;
            match find_chain_homotopy(&phi, &parts[p].0, &parts[q].0) {
                HomotopyResult::Feasible(_) => {}
                _ => {
                    feasible = false;
                    infeasible_block = Some((p, q as i32 - p as i32));
                    break 'outer;
                }
            }
        }
    }
    CharReport {
        order,
        window_max_jet: order,
        commutator_identities,
        exact_identity_holds: witness.is_none(),
        exact_identity_witness: witness,
        d0_is_chain_map: d0_chain.is_none(),
        half_sum_matches: half_ok,
        character_inverse: inv_ok,
        conjugation_identity: conj_ok,
        homotopy_blocks: blocks,
        homotopy_feasible: feasible,
        infeasible_block,
    }
}

/// Exterior degree of a basis key.
pub fn key_degree(m: u32) -> usize {
    popcount(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{builtin, oscillator, sl2};
    use crate::rational::q;

    #[test]
    fn bernoulli_values() {
        let b = bernoulli(8);
        assert_eq!(b[0], qi(1));
        assert_eq!(b[1], q(-1, 2));
        assert_eq!(b[2], q(1, 6));
        assert_eq!(b[3], qi(0));
        assert_eq!(b[4], q(-1, 30));
        assert_eq!(b[5], qi(0));
        assert_eq!(b[6], q(1, 42));
        assert_eq!(b[8], q(-1, 30));
    }

    #[test]
    fn invariant_field_oracle() {
        for a in [sl2(qi(1)).unwrap(), oscillator()] {
            let id = PolyMatrix::identity(a.dim());
            let l = invariant_field_matrix(Side::Left, &a, 6).mul_trunc(&exponential_differential(Side::Left, &a, 6), 6);
            assert_eq!(l, id);
            let r = invariant_field_matrix(Side::Right, &a, 6).mul_trunc(&exponential_differential(Side::Right, &a, 6), 6);
            assert_eq!(r, id);
        }
    }

    #[test]
    fn character_squared_is_jacobian() {
        let a = sl2(qi(1)).unwrap();
        let j = duflo_character(&a, 6);
        assert_eq!(j.mul_trunc(&j, 6), jacobian_series(&a, 6));
        // degree-2 term is Tr(Ad²)/48
        assert_eq!(j.homogeneous_part(2), trace_ad_power(&a, 2, 2).scale(&q(1, 48)));
        assert_eq!(duflo_character(&builtin("abelian:2").unwrap(), 6), Poly::one());
    }

    #[test]
    fn killing_quadratic() {
        let a = sl2(qi(1)).unwrap();
        let t = trace_ad_power(&a, 2, 2);
        assert_eq!(t.coeff(&Mono::from_exps(&[2, 0, 0])), qi(8));
        assert_eq!(t, a.metric_quadratic());
    }

    #[test]
    fn brylinski_squares_to_zero() {
        let a = sl2(qi(1)).unwrap();
        let s = FormsSpace::new(3, 3, None);
        let d = brylinski(&a, &s);
        assert!(d.compose(&d).is_zero());
    }

    #[test]
    fn brylinski_abelian_hand_value() {
        // d_Br(ξ^0 y^0) = g^{00} = 1 and d_Br(ξ^0 y^1) = 0 for abelian(2)
        let a = builtin("abelian:2").unwrap();
        let s = FormsSpace::new(2, 2, None);
        let d = brylinski(&a, &s);
        let out = d.apply(&s, &FormElement::basis(1, Mono::var(0)));
        assert_eq!(out, FormElement::basis(0, Mono::one()));
        assert!(d.apply(&s, &FormElement::basis(1, Mono::var(1))).is_zero());
    }

    #[test]
    fn verify_char_small() {
        let r = verify_char(&sl2(qi(1)).unwrap(), 4);
        assert!(r.passed(), "{r:?}");
        let r = verify_char(&builtin("abelian:2").unwrap(), 4);
        assert!(r.passed());
        assert_eq!(r.homotopy_blocks, 0);
    }

    #[test]
    fn commutator_identity_sl2() {
        let a = sl2(qi(1)).unwrap();
        for n in 1..=2 {
            let c = check_commutator_identity(&a, 4, n);
            assert!(c.holds, "n={n}: {:?}", c.witness);
        }
    }
}
