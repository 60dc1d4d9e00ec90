//! Commutative polynomials in up to `MAX_DIM` variables with exact
//! coefficients, truncated by total degree, and square matrices of them.
//!
//! The same type carries jets on g (variables `y^i`) and elements of the
//! symmetric algebra S(g) (variables `x_i`).

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::rational::{factorial, Q};

pub const MAX_DIM: usize = 12;

/// Exponent vector, ordered by total degree first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mono {
    deg: u16,
    exps: [u8; MAX_DIM],
}

impl Mono {
    pub fn one() -> Self {
        Mono { deg: 0, exps: [0; MAX_DIM] }
    }

    pub fn var(i: usize) -> Self {
        let mut m = Mono::one();
        m.exps[i] = 1;
        m.deg = 1;
        m
    }

    pub fn from_exps(e: &[u8]) -> Self {
        assert!(e.len() <= MAX_DIM, "at most {MAX_DIM} variables");
        let mut m = Mono::one();
        m.exps[..e.len()].copy_from_slice(e);
        m.deg = e.iter().map(|&x| x as u16).sum();
        m
    }

    pub fn degree(&self) -> usize {
        self.deg as usize
    }

    pub fn exp(&self, i: usize) -> u8 {
        self.exps[i]
    }

    pub fn exps(&self, n: usize) -> &[u8] {
        &self.exps[..n]
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut m = *self;
        for i in 0..MAX_DIM {
            m.exps[i] += other.exps[i];
        }
        m.deg += other.deg;
        m
    }

    /// `self / y^i` when `y^i` divides.
    pub fn lower(&self, i: usize) -> Option<Mono> {
        if self.exps[i] == 0 {
            return None;
        }
        let mut m = *self;
        m.exps[i] -= 1;
        m.deg -= 1;
        Some(m)
    }

    pub fn raise(&self, i: usize) -> Mono {
        let mut m = *self;
        m.exps[i] += 1;
        m.deg += 1;
        m
    }

    /// `e! = Π e_i!`.
    pub fn factorial(&self) -> Q {
        self.exps.iter().map(|&e| factorial(e as usize)).fold(Q::one(), |a, b| a * b)
    }

    /// All monomials in `n` variables of total degree exactly `d`, in a fixed order.
    pub fn of_degree(n: usize, d: usize) -> Vec<Mono> {
        fn rec(n: usize, i: usize, left: usize, cur: &mut [u8; MAX_DIM], out: &mut Vec<Mono>) {
            if i + 1 == n {
                cur[i] = left as u8;
                out.push(Mono::from_exps(&cur[..n]));
                cur[i] = 0;
                return;
            }
            for a in (0..=left).rev() {
                cur[i] = a as u8;
                rec(n, i + 1, left - a, cur, out);
            }
            cur[i] = 0;
        }
        if n == 0 {
            return if d == 0 { vec![Mono::one()] } else { Vec::new() };
        }
        let mut out = Vec::new();
        rec(n, 0, d, &mut [0; MAX_DIM], &mut out);
        out
    }

    /// All monomials of total degree at most `d`.
    pub fn up_to(n: usize, d: usize) -> Vec<Mono> {
        (0..=d).flat_map(|k| Mono::of_degree(n, k)).collect()
    }

    pub fn render(&self, n: usize, names: &[String]) -> String {
        if self.deg == 0 {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        for i in 0..n {
            match self.exps[i] {
                0 => {}
                1 => parts.push(names[i].clone()),
                e => parts.push(format!("{}^{}", names[i], e)),
            }
        }
        parts.join("*")
    }
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.exps.iter().rposition(|&e| e != 0).map_or(0, |p| p + 1);
        write!(f, "{:?}", &self.exps[..last])
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly {
    terms: BTreeMap<Mono, Q>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Q) -> Self {
        let mut p = Poly::zero();
        p.add_term(Mono::one(), c);
        p
    }

    pub fn one() -> Self {
        Poly::constant(Q::one())
    }

    pub fn var(i: usize) -> Self {
        Poly::monomial(Mono::var(i), Q::one())
    }

    pub fn monomial(m: Mono, c: Q) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn add_term(&mut self, m: Mono, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Mono) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coeff(&Mono::one())
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.degree()).min()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }

    pub fn scale(&self, f: &Q) -> Poly {
        if f.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (*m, c * f)).collect() }
    }

    /// Product, dropping monomials of degree above `trunc`.
    pub fn mul_trunc(&self, other: &Poly, trunc: usize) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if m1.degree() + m2.degree() <= trunc {
                    out.add_term(m1.mul(m2), c1 * c2);
                }
            }
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.mul_trunc(other, usize::MAX)
    }

    pub fn truncate(&self, trunc: usize) -> Poly {
        Poly { terms: self.terms.iter().filter(|(m, _)| m.degree() <= trunc).map(|(m, c)| (*m, c.clone())).collect() }
    }

    pub fn homogeneous_part(&self, d: usize) -> Poly {
        Poly { terms: self.terms.iter().filter(|(m, _)| m.degree() == d).map(|(m, c)| (*m, c.clone())).collect() }
    }

    pub fn deriv(&self, i: usize) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if let Some(l) = m.lower(i) {
                out.add_term(l, c * Q::from_integer(m.exp(i).into()));
            }
        }
        out
    }

    pub fn pow_trunc(&self, k: usize, trunc: usize) -> Poly {
        let mut acc = Poly::one().truncate(trunc);
        for _ in 0..k {
            acc = acc.mul_trunc(self, trunc);
        }
        acc
    }

    /// `exp(self)` through degree `trunc`; requires zero constant term.
    pub fn exp_trunc(&self, trunc: usize) -> Poly {
        assert!(self.constant_term().is_zero(), "exp needs a series without constant term");
        let mut acc = Poly::one();
        let mut term = Poly::one();
        for k in 1..=trunc {
            term = term.mul_trunc(self, trunc).scale(&(Q::one() / Q::from_integer(k.into())));
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Multiplicative inverse through degree `trunc`; requires an invertible constant term.
    pub fn inverse_trunc(&self, trunc: usize) -> Poly {
        let c0 = self.constant_term();
        assert!(!c0.is_zero(), "series inverse needs a nonzero constant term");
        let u = self.sub(&Poly::constant(c0.clone())).scale(&(Q::one() / &c0));
        // 1/(c0 (1 + u)) = (1/c0) Σ (-u)^k
        let mu = u.scale(&-Q::one());
        let mut acc = Poly::one();
        let mut term = Poly::one();
        for _ in 1..=trunc {
            term = term.mul_trunc(&mu, trunc);
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
        }
        acc.scale(&(Q::one() / c0))
    }

    /// Value at a point.
    pub fn evaluate(&self, point: &[Q]) -> Q {
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, x) in point.iter().enumerate() {
                for _ in 0..m.exp(i) {
                    t *= x;
                }
            }
            acc += t;
        }
        acc
    }

    pub fn render(&self, n: usize, names: &[String]) -> Vec<(String, Q)> {
        self.terms.iter().map(|(m, c)| (m.render(n, names), c.clone())).collect()
    }
}

/// Square matrix with polynomial entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    pub n: usize,
    pub entries: Vec<Vec<Poly>>,
}

impl PolyMatrix {
    pub fn zero(n: usize) -> Self {
        PolyMatrix { n, entries: vec![vec![Poly::zero(); n]; n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = PolyMatrix::zero(n);
        for i in 0..n {
            m.entries[i][i] = Poly::one();
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i][j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|r| r.iter().all(|p| p.is_zero()))
    }

    pub fn add(&self, other: &PolyMatrix) -> PolyMatrix {
        let mut out = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                out.entries[i][j] = self.entries[i][j].add(&other.entries[i][j]);
            }
        }
        out
    }

    pub fn sub(&self, other: &PolyMatrix) -> PolyMatrix {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, f: &Q) -> PolyMatrix {
        PolyMatrix { n: self.n, entries: self.entries.iter().map(|r| r.iter().map(|p| p.scale(f)).collect()).collect() }
    }

    pub fn mul_trunc(&self, other: &PolyMatrix, trunc: usize) -> PolyMatrix {
        let mut out = PolyMatrix::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let mut acc = Poly::zero();
                for l in 0..self.n {
                    if !self.entries[i][l].is_zero() && !other.entries[l][j].is_zero() {
                        acc = acc.add(&self.entries[i][l].mul_trunc(&other.entries[l][j], trunc));
                    }
                }
                out.entries[i][j] = acc;
            }
        }
        out
    }

    /// `[I, A, A^2, …, A^k]` truncated.
    pub fn powers(&self, k: usize, trunc: usize) -> Vec<PolyMatrix> {
        let mut out = vec![PolyMatrix::identity(self.n)];
        for i in 0..k {
            let next = out[i].mul_trunc(self, trunc);
            out.push(next);
        }
        out
    }

    pub fn trace(&self) -> Poly {
        (0..self.n).fold(Poly::zero(), |acc, i| acc.add(&self.entries[i][i]))
    }

    pub fn truncate(&self, trunc: usize) -> PolyMatrix {
        PolyMatrix { n: self.n, entries: self.entries.iter().map(|r| r.iter().map(|p| p.truncate(trunc)).collect()).collect() }
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.entries.iter().flatten().filter_map(|p| p.degree()).max()
    }

    /// Evaluates every entry at a point.
    pub fn evaluate(&self, point: &[Q]) -> Vec<Vec<Q>> {
        self.entries.iter().map(|r| r.iter().map(|p| p.evaluate(point)).collect()).collect()
    }

    /// Determinant through degree `trunc` by elimination; the matrix must
    /// be the identity modulo positive degree so every pivot is a unit.
    pub fn det_trunc(&self, trunc: usize) -> Poly {
        let mut m = self.truncate(trunc);
        let mut det = Poly::one();
        for col in 0..self.n {
            let piv = m.entries[col][col].clone();
            assert!(!piv.constant_term().is_zero(), "pivot without unit constant term");
            det = det.mul_trunc(&piv, trunc);
            let inv = piv.inverse_trunc(trunc);
            for r in col + 1..self.n {
                if m.entries[r][col].is_zero() {
                    continue;
                }
                let f = m.entries[r][col].mul_trunc(&inv, trunc);
                for c in col..self.n {
                    let t = f.mul_trunc(&m.entries[col][c], trunc);
                    m.entries[r][c] = m.entries[r][c].sub(&t);
                }
            }
        }
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    #[test]
    fn monomial_enumeration() {
        assert_eq!(Mono::of_degree(3, 2).len(), 6);
        assert_eq!(Mono::up_to(2, 3).len(), 10);
        assert_eq!(Mono::of_degree(0, 0).len(), 1);
    }

    #[test]
    fn series_inverse_and_exp() {
        let x = Poly::var(0);
        let one_plus_x = Poly::one().add(&x);
        let inv = one_plus_x.inverse_trunc(5);
        assert_eq!(inv.mul_trunc(&one_plus_x, 5), Poly::one());
        let e = x.exp_trunc(4);
        assert_eq!(e.coeff(&Mono::from_exps(&[3])), q(1, 6));
        let e2 = x.scale(&qi(-1)).exp_trunc(4);
        assert_eq!(e.mul_trunc(&e2, 4), Poly::one());
    }

    #[test]
    fn derivative() {
        let p = Poly::var(0).mul(&Poly::var(0)).mul(&Poly::var(1));
        assert_eq!(p.deriv(0), Poly::var(0).mul(&Poly::var(1)).scale(&qi(2)));
    }

    #[test]
    fn determinant_of_unipotent() {
        let mut m = PolyMatrix::identity(2);
        m.entries[0][1] = Poly::var(0);
        m.entries[1][0] = Poly::var(1);
        // det = 1 - y0 y1
        let d = m.det_trunc(4);
        assert_eq!(d, Poly::one().sub(&Poly::var(0).mul(&Poly::var(1))));
    }
}
