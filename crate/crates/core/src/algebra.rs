//! Metric Lie algebras: structure constants plus an invariant nondegenerate
//! symmetric pairing, axiom validation, builtins and JSON ingestion.
//!
//! Builtin bases:
//! - `sl2(s)`: (h, e, f) with [h,e] = 2e, [h,f] = -2f, [e,f] = h and metric
//!   s times the Killing form, κ(h,h) = 8, κ(e,f) = 4.
//! - `so3(s)`: (x1, x2, x3) with [x_i, x_j] = ε_ijk x_k and metric s·δ.
//! - `oscillator`: (p, q, e, h) with [p,q] = e, [h,p] = q, [h,q] = -p,
//!   ⟨p,p⟩ = ⟨q,q⟩ = 1, ⟨e,h⟩ = 1.
//! - `abelian(n, metric)`: zero bracket.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{dense_inverse, SparseMatrix};
use crate::poly::{Mono, Poly, MAX_DIM};
use crate::rational::{q, qi, Q};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("malformed algebra: {0}")]
    Malformed(String),
    #[error("degenerate metric")]
    Degenerate,
    #[error("unknown builtin algebra `{0}`")]
    Unknown(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricLieAlgebra {
    name: String,
    dim: usize,
    structure: Vec<Q>,
    metric: Vec<Vec<Q>>,
    metric_inverse: Vec<Vec<Q>>,
    names: Vec<String>,
}

impl MetricLieAlgebra {
    /// `structure[(i*n + j)*n + k] = c[i][j][k]`.
    pub fn new(name: &str, dim: usize, structure: Vec<Q>, metric: Vec<Vec<Q>>) -> Result<Self, AlgebraError> {
        if dim > MAX_DIM {
            return Err(AlgebraError::Malformed(format!("dimension {dim} exceeds the supported {MAX_DIM}")));
        }
        if structure.len() != dim * dim * dim {
            return Err(AlgebraError::Malformed(format!("structure has {} entries, expected {}", structure.len(), dim * dim * dim)));
        }
        if metric.len() != dim || metric.iter().any(|r| r.len() != dim) {
            return Err(AlgebraError::Malformed(format!("metric is not {dim}x{dim}")));
        }
        let metric_inverse = dense_inverse(&metric).ok_or(AlgebraError::Degenerate)?;
        let names = (0..dim).map(|i| format!("x{i}")).collect();
        Ok(MetricLieAlgebra { name: name.to_string(), dim, structure, metric, metric_inverse, names })
    }

    pub fn with_names(mut self, names: &[&str]) -> Self {
        assert_eq!(names.len(), self.dim);
        self.names = names.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis_names(&self) -> &[String] {
        &self.names
    }

    pub fn c(&self, i: usize, j: usize, k: usize) -> &Q {
        &self.structure[(i * self.dim + j) * self.dim + k]
    }

    pub fn g(&self, i: usize, j: usize) -> &Q {
        &self.metric[i][j]
    }

    pub fn gi(&self, i: usize, j: usize) -> &Q {
        &self.metric_inverse[i][j]
    }

    pub fn metric(&self) -> &[Vec<Q>] {
        &self.metric
    }

    pub fn metric_inverse(&self) -> &[Vec<Q>] {
        &self.metric_inverse
    }

    pub fn is_abelian(&self) -> bool {
        self.structure.iter().all(|x| x.is_zero())
    }

    /// Bracket of two coefficient vectors.
    pub fn bracket(&self, a: &[Q], b: &[Q]) -> Vec<Q> {
        let n = self.dim;
        let mut out = vec![Q::zero(); n];
        for i in 0..n {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if b[j].is_zero() {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.c(i, j, k);
                    if !c.is_zero() {
                        *o += &a[i] * &b[j] * c;
                    }
                }
            }
        }
        out
    }

    pub fn pair(&self, a: &[Q], b: &[Q]) -> Q {
        let mut acc = Q::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += &a[i] * &self.metric[i][j] * &b[j];
            }
        }
        acc
    }

    pub fn ad(&self, coeffs: &[Q]) -> AdEndomorphism {
        assert_eq!(coeffs.len(), self.dim, "coefficient vector has wrong length");
        let n = self.dim;
        let mut matrix = vec![vec![Q::zero(); n]; n];
        for (k, row) in matrix.iter_mut().enumerate() {
            for (j, m) in row.iter_mut().enumerate() {
                for (i, l) in coeffs.iter().enumerate() {
                    *m += l * self.c(i, j, k);
                }
            }
        }
        AdEndomorphism { base_vector_coeffs: coeffs.to_vec(), matrix }
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Q> {
        (0..self.dim).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()
    }

    /// Killing form Tr(ad x_i ad x_j).
    pub fn killing_form(&self) -> Vec<Vec<Q>> {
        let n = self.dim;
        let ads: Vec<_> = (0..n).map(|i| self.ad(&self.basis_vector(i)).matrix).collect();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut t = Q::zero();
                        for a in 0..n {
                            for b in 0..n {
                                t += &ads[i][a][b] * &ads[j][b][a];
                            }
                        }
                        t
                    })
                    .collect()
            })
            .collect()
    }

    /// Casimir c = Σ g^{ij} x_i x_j in S²g.
    pub fn casimir(&self) -> Poly {
        let mut p = Poly::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                p.add_term(Mono::var(i).mul(&Mono::var(j)), self.metric_inverse[i][j].clone());
            }
        }
        p
    }

    /// The metric as a quadratic function on g: Σ g_{ij} y^i y^j.
    pub fn metric_quadratic(&self) -> Poly {
        let mut p = Poly::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                p.add_term(Mono::var(i).mul(&Mono::var(j)), self.metric[i][j].clone());
            }
        }
        p
    }

    /// Adjoint action of x_a on S(g), as a derivation: x_a · x_j = Σ_k c[a][j][k] x_k.
    pub fn adjoint_on_sym(&self, a: usize, s: &Poly) -> Poly {
        let mut out = Poly::zero();
        for j in 0..self.dim {
            let dj = s.deriv(j);
            if dj.is_zero() {
                continue;
            }
            for k in 0..self.dim {
                let c = self.c(a, j, k);
                if !c.is_zero() {
                    out = out.add(&dj.mul(&Poly::var(k)).scale(c));
                }
            }
        }
        out
    }

    /// Coadjoint action of x_j on functions on g, as a derivation:
    /// x_j · y^k = Σ_i c[i][j][k] y^i.
    pub fn coadjoint_on_jets(&self, j: usize, f: &Poly) -> Poly {
        let mut out = Poly::zero();
        for k in 0..self.dim {
            let dk = f.deriv(k);
            if dk.is_zero() {
                continue;
            }
            for i in 0..self.dim {
                let c = self.c(i, j, k);
                if !c.is_zero() {
                    out = out.add(&dk.mul(&Poly::var(i)).scale(c));
                }
            }
        }
        out
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.dim;
        let c = |i, j, k| self.c(i, j, k).clone();
        let mut checks = Vec::new();

        let mut anti = AxiomCheck::pass("antisymmetry");
        'a: for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let r = c(i, j, k) + c(j, i, k);
                    if !r.is_zero() {
                        anti = AxiomCheck::fail("antisymmetry", vec![i, j, k], r);
                        break 'a;
                    }
                }
            }
        }
        checks.push(anti);

        let mut jac = AxiomCheck::pass("jacobi");
        'j: for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut r = Q::zero();
                        for m in 0..n {
                            r += c(i, j, m) * c(m, k, l) + c(j, k, m) * c(m, i, l) + c(k, i, m) * c(m, j, l);
                        }
                        if !r.is_zero() {
                            jac = AxiomCheck::fail("jacobi", vec![i, j, k, l], r);
                            break 'j;
                        }
                    }
                }
            }
        }
        checks.push(jac);

        let mut sym = AxiomCheck::pass("metric_symmetry");
        'g: for i in 0..n {
            for j in 0..n {
                let r = &self.metric[i][j] - &self.metric[j][i];
                if !r.is_zero() {
                    sym = AxiomCheck::fail("metric_symmetry", vec![i, j], r);
                    break 'g;
                }
            }
        }
        checks.push(sym);
        // construction already rejects singular metrics
        checks.push(AxiomCheck::pass("metric_nondegenerate"));

        let mut inv = AxiomCheck::pass("invariance");
        'v: for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    // ⟨[x_i,x_j],x_k⟩ - ⟨x_i,[x_j,x_k]⟩
                    let mut r = Q::zero();
                    for m in 0..n {
                        r += c(i, j, m) * &self.metric[m][k] - c(j, k, m) * &self.metric[i][m];
                    }
                    if !r.is_zero() {
                        inv = AxiomCheck::fail("invariance", vec![i, j, k], r);
                        break 'v;
                    }
                }
            }
        }
        checks.push(inv);

        let mut id = AxiomCheck::pass("metric_inverse");
        'm: for i in 0..n {
            for j in 0..n {
                let mut r: Q = (0..n).map(|l| &self.metric[i][l] * &self.metric_inverse[l][j]).sum();
                if i == j {
                    r -= Q::one();
                }
                if !r.is_zero() {
                    id = AxiomCheck::fail("metric_inverse", vec![i, j], r);
                    break 'm;
                }
            }
        }
        checks.push(id);

        ValidationReport { algebra: self.name.clone(), checks }
    }

    pub fn from_json(text: &str) -> Result<Self, AlgebraError> {
        let file: AlgebraFile = serde_json::from_str(text).map_err(|e| AlgebraError::Malformed(e.to_string()))?;
        file.build()
    }

    pub fn to_json(&self) -> AlgebraFile {
        let n = self.dim;
        let mut bracket = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let v = self.c(i, j, k);
                    if !v.is_zero() {
                        bracket.push(BracketEntry(i, j, k, to_json_int(v.numer()), to_json_int(v.denom())));
                    }
                }
            }
        }
        let mut metric = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = &self.metric[i][j];
                if !v.is_zero() {
                    metric.push(MetricEntry(i, j, to_json_int(v.numer()), to_json_int(v.denom())));
                }
            }
        }
        AlgebraFile { name: self.name.clone(), dim: n, bracket, metric }
    }
}

fn to_json_int(x: &num_bigint::BigInt) -> i64 {
    use num_traits::ToPrimitive;
    x.to_i64().expect("structure constant too large for the file format")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketEntry(pub usize, pub usize, pub usize, pub i64, pub i64);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricEntry(pub usize, pub usize, pub i64, pub i64);

/// On-disk algebra description. Indices are 0-based and omitted entries
/// are zero. Only `i < j` bracket entries are needed; the rest follow by
/// antisymmetry. A metric entry with `i != j` sets both `(i,j)` and `(j,i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub name: String,
    pub dim: usize,
    #[serde(default)]
    pub bracket: Vec<BracketEntry>,
    #[serde(default)]
    pub metric: Vec<MetricEntry>,
}

impl AlgebraFile {
    pub fn build(&self) -> Result<MetricLieAlgebra, AlgebraError> {
        let n = self.dim;
        if n == 0 {
            return Err(AlgebraError::Malformed("dim must be positive".into()));
        }
        if n > MAX_DIM {
            return Err(AlgebraError::Malformed(format!("dimension {n} exceeds the supported {MAX_DIM}")));
        }
        let mut structure = vec![Q::zero(); n * n * n];
        let mut seen = std::collections::HashSet::new();
        for BracketEntry(i, j, k, num, den) in &self.bracket {
            let (i, j, k) = (*i, *j, *k);
            if i >= n || j >= n || k >= n {
                return Err(AlgebraError::Malformed(format!("bracket index ({i},{j},{k}) out of range")));
            }
            if *den == 0 {
                return Err(AlgebraError::Malformed(format!("zero denominator in bracket ({i},{j},{k})")));
            }
            if i == j {
                if *num != 0 {
                    return Err(AlgebraError::Malformed(format!("bracket [x{i},x{i}] must vanish")));
                }
                continue;
            }
            let (a, b, v) = if i < j { (i, j, q(*num, *den)) } else { (j, i, -q(*num, *den)) };
            if !seen.insert((a, b, k)) {
                return Err(AlgebraError::Malformed(format!("duplicate bracket entry ({i},{j},{k})")));
            }
            structure[(a * n + b) * n + k] = v.clone();
            structure[(b * n + a) * n + k] = -v;
        }
        let mut metric = vec![vec![Q::zero(); n]; n];
        let mut seen = std::collections::HashSet::new();
        for MetricEntry(i, j, num, den) in &self.metric {
            let (i, j) = (*i, *j);
            if i >= n || j >= n {
                return Err(AlgebraError::Malformed(format!("metric index ({i},{j}) out of range")));
            }
            if *den == 0 {
                return Err(AlgebraError::Malformed(format!("zero denominator in metric ({i},{j})")));
            }
            let v = q(*num, *den);
            let key = (i.min(j), i.max(j));
            if !seen.insert(key) {
                if metric[i][j] != v {
                    return Err(AlgebraError::Malformed(format!("conflicting metric entries at ({i},{j})")));
                }
                continue;
            }
            metric[i][j] = v.clone();
            metric[j][i] = v;
        }
        MetricLieAlgebra::new(&self.name, n, structure, metric)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdEndomorphism {
    pub base_vector_coeffs: Vec<Q>,
    /// `matrix[k][j] = Σ_i λ_i c[i][j][k]`.
    pub matrix: Vec<Vec<Q>>,
}

impl AdEndomorphism {
    pub fn trace(&self) -> Q {
        (0..self.matrix.len()).map(|i| self.matrix[i][i].clone()).sum()
    }

    pub fn to_sparse(&self) -> SparseMatrix {
        SparseMatrix::from_dense(&self.matrix)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub axiom: String,
    pub passed: bool,
    pub witness: Option<Vec<usize>>,
    #[serde(skip)]
    pub residual: Option<Q>,
}

impl AxiomCheck {
    fn pass(name: &str) -> Self {
        AxiomCheck { axiom: name.into(), passed: true, witness: None, residual: None }
    }

    fn fail(name: &str, witness: Vec<usize>, residual: Q) -> Self {
        AxiomCheck { axiom: name.into(), passed: false, witness: Some(witness), residual: Some(residual) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub algebra: String,
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<&AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

fn structure_from(n: usize, entries: &[(usize, usize, usize, Q)]) -> Vec<Q> {
    let mut s = vec![Q::zero(); n * n * n];
    for (i, j, k, v) in entries {
        s[(i * n + j) * n + k] = v.clone();
        s[(j * n + i) * n + k] = -v.clone();
    }
    s
}

pub fn abelian(n: usize, metric: Vec<Vec<Q>>) -> Result<MetricLieAlgebra, AlgebraError> {
    MetricLieAlgebra::new(&format!("abelian:{n}"), n, vec![Q::zero(); n * n * n], metric)
}

pub fn identity_metric(n: usize) -> Vec<Vec<Q>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect()
}

pub fn sl2(scale: Q) -> Result<MetricLieAlgebra, AlgebraError> {
    if scale.is_zero() {
        return Err(AlgebraError::Degenerate);
    }
    let s = structure_from(3, &[(0, 1, 1, qi(2)), (0, 2, 2, qi(-2)), (1, 2, 0, qi(1))]);
    let z = Q::zero();
    let metric =
        vec![vec![qi(8) * &scale, z.clone(), z.clone()], vec![z.clone(), z.clone(), qi(4) * &scale], vec![z.clone(), qi(4) * &scale, z]];
    let name = if scale.is_one() { "sl2".to_string() } else { format!("sl2:{scale}") };
    Ok(MetricLieAlgebra::new(&name, 3, s, metric)?.with_names(&["h", "e", "f"]))
}

pub fn so3(scale: Q) -> Result<MetricLieAlgebra, AlgebraError> {
    if scale.is_zero() {
        return Err(AlgebraError::Degenerate);
    }
    let s = structure_from(3, &[(0, 1, 2, qi(1)), (1, 2, 0, qi(1)), (2, 0, 1, qi(1))]);
    let metric = identity_metric(3).into_iter().map(|r| r.into_iter().map(|x| x * &scale).collect()).collect();
    let name = if scale.is_one() { "so3".to_string() } else { format!("so3:{scale}") };
    Ok(MetricLieAlgebra::new(&name, 3, s, metric)?.with_names(&["x1", "x2", "x3"]))
}

pub fn oscillator() -> MetricLieAlgebra {
    // p, q, e, h
    let s = structure_from(4, &[(0, 1, 2, qi(1)), (3, 0, 1, qi(1)), (3, 1, 0, qi(-1))]);
    let mut metric = vec![vec![Q::zero(); 4]; 4];
    metric[0][0] = qi(1);
    metric[1][1] = qi(1);
    metric[2][3] = qi(1);
    metric[3][2] = qi(1);
    MetricLieAlgebra::new("oscillator", 4, s, metric).expect("oscillator metric is nondegenerate").with_names(&["p", "q", "e", "h"])
}

/// Parses `abelian:N`, `sl2`, `sl2:S`, `so3`, `so3:S`, `oscillator`.
pub fn builtin(spec: &str) -> Result<MetricLieAlgebra, AlgebraError> {
    let (name, param) = match spec.split_once(':') {
        Some((a, b)) => (a, Some(b)),
        None => (spec, None),
    };
    let scale = |p: Option<&str>| -> Result<Q, AlgebraError> {
        match p {
            None => Ok(Q::one()),
            Some(s) => crate::rational::parse(s).ok_or_else(|| AlgebraError::Unknown(spec.to_string())),
        }
    };
    match name {
        "abelian" => {
            let n: usize = param.and_then(|p| p.parse().ok()).ok_or_else(|| AlgebraError::Unknown(spec.to_string()))?;
            if n == 0 || n > MAX_DIM {
                return Err(AlgebraError::Unknown(spec.to_string()));
            }
            abelian(n, identity_metric(n))
        }
        "sl2" => sl2(scale(param)?),
        "so3" => so3(scale(param)?),
        "oscillator" if param.is_none() => Ok(oscillator()),
        _ => Err(AlgebraError::Unknown(spec.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_validate() {
        for a in [builtin("abelian:2").unwrap(), sl2(qi(1)).unwrap(), so3(qi(1)).unwrap(), oscillator()] {
            let r = a.validate();
            assert!(r.passed(), "{}: {:?}", a.name(), r.failed());
        }
    }

    #[test]
    fn sl2_identity_metric_fails_invariance() {
        let base = sl2(qi(1)).unwrap();
        let s = (0..27).map(|x| base.c(x / 9, (x / 3) % 3, x % 3).clone()).collect();
        let bad = MetricLieAlgebra::new("bad", 3, s, identity_metric(3)).unwrap();
        let r = bad.validate();
        let f = r.failed();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].axiom, "invariance");
        assert!(f[0].witness.is_some());
    }

    #[test]
    fn killing_form_of_sl2() {
        let a = sl2(qi(1)).unwrap();
        assert_eq!(a.killing_form(), a.metric().to_vec());
    }

    #[test]
    fn ad_and_casimir() {
        let a = sl2(qi(1)).unwrap();
        let adh = a.ad(&a.basis_vector(0));
        assert_eq!(adh.matrix[1][1], qi(2));
        assert_eq!(adh.matrix[2][2], qi(-2));
        assert_eq!(adh.matrix[0][0], qi(0));
        let c = a.casimir();
        assert_eq!(c.coeff(&Mono::from_exps(&[2, 0, 0])), q(1, 8));
        assert_eq!(c.coeff(&Mono::from_exps(&[0, 1, 1])), q(1, 2));
        for i in 0..3 {
            assert!(a.adjoint_on_sym(i, &c).is_zero());
        }
        let s = so3(qi(1)).unwrap();
        let ad1 = s.ad(&s.basis_vector(0));
        let mut tr = Q::zero();
        for i in 0..3 {
            for j in 0..3 {
                tr += &ad1.matrix[i][j] * &ad1.matrix[j][i];
            }
        }
        assert_eq!(tr, qi(-2));
    }

    #[test]
    fn json_round_trip() {
        let a = oscillator();
        let text = serde_json::to_string(&a.to_json()).unwrap();
        let b = MetricLieAlgebra::from_json(&text).unwrap();
        assert_eq!(a.c(3, 0, 1), b.c(3, 0, 1));
        assert_eq!(a.metric(), b.metric());
        assert!(MetricLieAlgebra::from_json("{\"name\":\"x\",\"dim\":2,\"bracket\":[[0,5,0,1,1]]}").is_err());
        assert_eq!(builtin("sl2:0"), Err(AlgebraError::Degenerate));
        assert!(builtin("e8").is_err());
    }
}
