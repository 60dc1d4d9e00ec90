//! The unknot Wilson loop: contract an invariant function f against
//! exp(h t), t = Σ g^{ij} x_i x_j, contract with the Duflo character,
//! symmetrize into U(g) and take the augmentation. The power of h counts the
//! t-factors consumed. An independent oracle pairs f·j^{1/2} with exp(h t)
//! by Wick contraction, ⟨y^a y^b, t⟩ = 2 g^{ab}.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::MetricLieAlgebra;
use crate::calculus::duflo_character;
use crate::enveloping::{apply_series, Enveloping};
use crate::poly::{Mono, Poly, MAX_DIM};
use crate::rational::{factorial, qi, Q};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum WilsonError {
    #[error("function is not invariant under the coadjoint action (generator {0})")]
    NotInvariant(usize),
    #[error("jet order {given} is too small, need at least {required}")]
    Budget { given: usize, required: usize },
    #[error("bad function spec: {0}")]
    Spec(String),
}

/// A power series in h truncated after h^K.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HSeries {
    #[serde(serialize_with = "crate::rational::exact::vec")]
    pub coeffs: Vec<Q>,
}

impl HSeries {
    pub fn zero(order: usize) -> Self {
        HSeries { coeffs: vec![Q::zero(); order + 1] }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn add(&self, o: &HSeries) -> HSeries {
        HSeries { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }
}

/// A coadjoint-invariant jet polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantFunction {
    poly: Poly,
}

impl InvariantFunction {
    pub fn new(alg: &MetricLieAlgebra, poly: Poly) -> Result<Self, WilsonError> {
        match (0..alg.dim()).find(|&j| !alg.coadjoint_on_jets(j, &poly).is_zero()) {
            Some(j) => Err(WilsonError::NotInvariant(j)),
            None => Ok(InvariantFunction { poly }),
        }
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.degree().unwrap_or(0)
    }
}

/// Polynomial file: `{"terms": [{"exps": [..], "coeff": [num, den]}, ..]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyFile {
    pub terms: Vec<PolyTerm>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTerm {
    pub exps: Vec<u8>,
    pub coeff: (i64, i64),
}

pub fn poly_from_json(text: &str, dim: usize) -> Result<Poly, WilsonError> {
    let f: PolyFile = serde_json::from_str(text).map_err(|e| WilsonError::Spec(e.to_string()))?;
    let mut p = Poly::zero();
    for t in f.terms {
        if t.exps.len() != dim || dim > MAX_DIM {
            return Err(WilsonError::Spec(format!("exponent vector of length {} for dimension {dim}", t.exps.len())));
        }
        if t.coeff.1 == 0 {
            return Err(WilsonError::Spec("zero denominator".into()));
        }
        p.add_term(Mono::from_exps(&t.exps), Q::new(t.coeff.0.into(), t.coeff.1.into()));
    }
    Ok(p)
}

/// `one`, `casimir^m` (the metric quadratic to the m-th power), or `file:<path>`.
pub fn function_from_spec(alg: &MetricLieAlgebra, spec: &str) -> Result<InvariantFunction, WilsonError> {
    let poly = if spec == "one" {
        Poly::one()
    } else if let Some(m) = spec.strip_prefix("casimir") {
        let m = match m.strip_prefix('^') {
            Some(k) => k.parse::<usize>().map_err(|_| WilsonError::Spec(spec.to_string()))?,
            None if m.is_empty() => 1,
            None => return Err(WilsonError::Spec(spec.to_string())),
        };
        let q = alg.metric_quadratic();
        (0..m).fold(Poly::one(), |acc, _| acc.mul(&q))
    } else if let Some(path) = spec.strip_prefix("file:") {
        let text = std::fs::read_to_string(path).map_err(|e| WilsonError::Spec(format!("{path}: {e}")))?;
        poly_from_json(&text, alg.dim())?
    } else {
        return Err(WilsonError::Spec(spec.to_string()));
    };
    InvariantFunction::new(alg, poly)
}

/// Smallest jet order accepted for a given h-order.
pub fn required_order(f: &InvariantFunction, h_order: usize) -> usize {
    2 * h_order + f.degree()
}

fn check_budget(f: &InvariantFunction, h_order: usize, order: usize) -> Result<(), WilsonError> {
    let required = required_order(f, h_order);
    if order < required {
        return Err(WilsonError::Budget { given: order, required });
    }
    Ok(())
}

/// t^m / m! in S(g).
fn casimir_power(alg: &MetricLieAlgebra, m: usize) -> Poly {
    let t = alg.casimir();
    (0..m).fold(Poly::one(), |acc, _| acc.mul(&t)).scale(&(Q::one() / factorial(m)))
}

/// PBW elements, one per power of h.
pub fn chain_composition(alg: &MetricLieAlgebra, f: &InvariantFunction, h_order: usize, order: usize) -> Result<Vec<Poly>, WilsonError> {
    check_budget(f, h_order, order)?;
    let u = Enveloping::new(alg);
    let ch = duflo_character(alg, order);
    Ok((0..=h_order)
        .map(|m| {
            let s = apply_series(f.poly(), &casimir_power(alg, m));
            u.symmetrize(&apply_series(&ch, &s))
        })
        .collect())
}

/// Σ over perfect matchings of the index list of Π 2 g^{ab}.
fn wick(alg: &MetricLieAlgebra, idx: &[usize]) -> Q {
    if idx.is_empty() {
        return Q::one();
    }
    if idx.len() % 2 == 1 {
        return Q::zero();
    }
    let first = idx[0];
    let mut acc = Q::zero();
    for j in 1..idx.len() {
        let g = alg.gi(first, idx[j]);
        if g.is_zero() {
            continue;
        }
        let rest: Vec<usize> = idx[1..].iter().enumerate().filter(|(k, _)| *k + 1 != j).map(|(_, v)| *v).collect();
        acc += qi(2) * g * wick(alg, &rest);
    }
    acc
}

/// ⟨f·j^{1/2}, exp(h t)⟩ by Wick contraction alone.
pub fn wick_oracle(alg: &MetricLieAlgebra, f: &InvariantFunction, h_order: usize, order: usize) -> Result<HSeries, WilsonError> {
    check_budget(f, h_order, order)?;
    let g = f.poly().mul_trunc(&duflo_character(alg, order), 2 * h_order);
    let mut out = HSeries::zero(h_order);
    for (m, c) in g.terms() {
        let d = m.degree();
        if d % 2 == 1 {
            continue;
        }
        let idx: Vec<usize> = (0..alg.dim()).flat_map(|i| std::iter::repeat(i).take(m.exp(i) as usize)).collect();
        out.coeffs[d / 2] += c * wick(alg, &idx);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct UnknotResult {
    pub h_order: usize,
    pub order: usize,
    pub series: HSeries,
    pub oracle: HSeries,
    pub oracle_match: bool,
}

pub fn unknot_invariant(alg: &MetricLieAlgebra, f: &InvariantFunction, h_order: usize, order: usize) -> Result<UnknotResult, WilsonError> {
    let u = Enveloping::new(alg);
    let comp = chain_composition(alg, f, h_order, order)?;
    let series = HSeries { coeffs: comp.iter().map(|p| u.augmentation(p)).collect() };
    let oracle = wick_oracle(alg, f, h_order, order)?;
    Ok(UnknotResult { h_order, order, oracle_match: series == oracle, series, oracle })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{builtin, sl2};
    use crate::rational::q;

    #[test]
    fn abelian_values() {
        let a = builtin("abelian:3").unwrap();
        let one = function_from_spec(&a, "one").unwrap();
        let r = unknot_invariant(&a, &one, 3, 6).unwrap();
        assert_eq!(r.series.coeffs, vec![qi(1), qi(0), qi(0), qi(0)]);
        assert!(r.oracle_match);
        let c = function_from_spec(&a, "casimir").unwrap();
        let r = unknot_invariant(&a, &c, 2, 6).unwrap();
        assert_eq!(r.series.coeffs[1], qi(6));
        assert!(r.oracle_match);
    }

    #[test]
    fn sl2_first_order() {
        let a = sl2(qi(1)).unwrap();
        let one = function_from_spec(&a, "one").unwrap();
        let r = unknot_invariant(&a, &one, 2, 4).unwrap();
        assert_eq!(r.series.coeffs[0], qi(1));
        assert_eq!(r.series.coeffs[1], q(1, 8));
        assert!(r.oracle_match);
    }

    #[test]
    fn budget_and_invariance() {
        let a = sl2(qi(1)).unwrap();
        let one = function_from_spec(&a, "one").unwrap();
        assert_eq!(unknot_invariant(&a, &one, 3, 4).unwrap_err(), WilsonError::Budget { given: 4, required: 6 });
        assert_eq!(InvariantFunction::new(&a, Poly::var(1)).unwrap_err(), WilsonError::NotInvariant(0));
        assert!(function_from_spec(&a, "cube").is_err());
    }
}
