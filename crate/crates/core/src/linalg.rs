//! Sparse exact linear algebra over the rationals: vectors, column-stored
//! matrices, echelon forms, finite cochain complexes and their cohomology,
//! chain-map checks and homotopy solving.
//!
//! Every complex here is cohomological: the differential raises degree.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::rational::{sign, Q};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, Q)>,
}

impl SparseVec {
    pub fn new() -> Self {
        SparseVec { entries: Vec::new() }
    }

    pub fn unit(i: usize) -> Self {
        SparseVec { entries: vec![(i, Q::one())] }
    }

    /// Builds from unsorted pairs, summing duplicates and dropping zeros.
    pub fn from_pairs<I: IntoIterator<Item = (usize, Q)>>(pairs: I) -> Self {
        let mut m: BTreeMap<usize, Q> = BTreeMap::new();
        for (i, v) in pairs {
            *m.entry(i).or_insert_with(Q::zero) += v;
        }
        SparseVec { entries: m.into_iter().filter(|(_, v)| !v.is_zero()).collect() }
    }

    pub fn from_map(m: BTreeMap<usize, Q>) -> Self {
        SparseVec { entries: m.into_iter().filter(|(_, v)| !v.is_zero()).collect() }
    }

    pub fn from_dense(v: &[Q]) -> Self {
        SparseVec { entries: v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect() }
    }

    pub fn to_dense(&self, len: usize) -> Vec<Q> {
        let mut out = vec![Q::zero(); len];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, Q)> {
        self.entries.iter()
    }

    pub fn entries(&self) -> &[(usize, Q)] {
        &self.entries
    }

    pub fn leading(&self) -> Option<usize> {
        self.entries.first().map(|(i, _)| *i)
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|(i, _)| *i)
    }

    pub fn get(&self, i: usize) -> Q {
        match self.entries.binary_search_by_key(&i, |(j, _)| *j) {
            Ok(p) => self.entries[p].1.clone(),
            Err(_) => Q::zero(),
        }
    }

    pub fn scale(&self, f: &Q) -> SparseVec {
        if f.is_zero() {
            return SparseVec::new();
        }
        SparseVec { entries: self.entries.iter().map(|(i, v)| (*i, v * f)).collect() }
    }

    pub fn neg(&self) -> SparseVec {
        SparseVec { entries: self.entries.iter().map(|(i, v)| (*i, -v)).collect() }
    }

    /// `self + f * other`.
    pub fn add_scaled(&self, f: &Q, other: &SparseVec) -> SparseVec {
        if f.is_zero() || other.is_zero() {
            return self.clone();
        }
        let (a, b) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, f * &b[j].1));
                j += 1;
            } else {
                let s = &a[i].1 + f * &b[j].1;
                if !s.is_zero() {
                    out.push((a[i].0, s));
                }
                i += 1;
                j += 1;
            }
        }
        SparseVec { entries: out }
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        self.add_scaled(&Q::one(), other)
    }

    pub fn sub(&self, other: &SparseVec) -> SparseVec {
        self.add_scaled(&-Q::one(), other)
    }

    pub fn dot(&self, other: &SparseVec) -> Q {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j) = (0, 0);
        let mut acc = Q::zero();
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += &a[i].1 * &b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// Keeps the entries whose index satisfies `keep`.
    pub fn filter<F: Fn(usize) -> bool>(&self, keep: F) -> SparseVec {
        SparseVec { entries: self.entries.iter().filter(|(i, _)| keep(*i)).cloned().collect() }
    }

    /// Reindexes through `map`, dropping indices mapped to `None`.
    pub fn reindex<F: Fn(usize) -> Option<usize>>(&self, map: F) -> SparseVec {
        SparseVec::from_pairs(self.entries.iter().filter_map(|(i, v)| map(*i).map(|j| (j, v.clone()))))
    }
}

/// Column-stored sparse matrix. Column `c` is the image of the `c`-th basis vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    columns: Vec<SparseVec>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("d∘d ≠ 0 from degree {degree}, basis vector {column}")]
    DSquared { degree: i32, column: usize },
    #[error("vector in degree {degree} is not a cycle")]
    NotCycle { degree: i32 },
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, columns: vec![SparseVec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix { rows: n, cols: n, columns: (0..n).map(SparseVec::unit).collect() }
    }

    pub fn from_columns(rows: usize, columns: Vec<SparseVec>) -> Self {
        for c in &columns {
            if let Some(m) = c.max_index() {
                assert!(m < rows, "column entry {m} out of range {rows}");
            }
        }
        SparseMatrix { rows, cols: columns.len(), columns }
    }

    pub fn from_triplets<I: IntoIterator<Item = (usize, usize, Q)>>(rows: usize, cols: usize, t: I) -> Self {
        let mut per: Vec<Vec<(usize, Q)>> = vec![Vec::new(); cols];
        for (r, c, v) in t {
            assert!(r < rows && c < cols, "triplet ({r},{c}) out of range");
            per[c].push((r, v));
        }
        SparseMatrix { rows, cols, columns: per.into_iter().map(SparseVec::from_pairs).collect() }
    }

    pub fn from_dense(rows: &[Vec<Q>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Self::from_triplets(r, c, rows.iter().enumerate().flat_map(|(i, row)| row.iter().enumerate().map(move |(j, v)| (i, j, v.clone()))))
    }

    pub fn to_dense(&self) -> Vec<Vec<Q>> {
        let mut out = vec![vec![Q::zero(); self.cols]; self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            for (r, v) in col.iter() {
                out[*r][c] = v.clone();
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, c: usize) -> &SparseVec {
        &self.columns[c]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.columns
    }

    pub fn get(&self, r: usize, c: usize) -> Q {
        self.columns[c].get(r)
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(|c| c.nnz()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_zero())
    }

    /// Nonzero entries as (row, col, value), column-major.
    pub fn triplets(&self) -> Vec<(usize, usize, Q)> {
        let mut out = Vec::new();
        for (c, col) in self.columns.iter().enumerate() {
            for (r, v) in col.iter() {
                out.push((*r, c, v.clone()));
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &SparseVec) -> SparseVec {
        assert!(v.max_index().map_or(true, |m| m < self.cols), "vector length exceeds column count");
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for (c, x) in v.iter() {
            for (r, y) in self.columns[*c].iter() {
                *acc.entry(*r).or_insert_with(Q::zero) += x * y;
            }
        }
        SparseVec::from_map(acc)
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.rows, "product shape mismatch");
        SparseMatrix { rows: self.rows, cols: other.cols, columns: other.columns.iter().map(|c| self.mul_vec(c)).collect() }
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut per: Vec<Vec<(usize, Q)>> = vec![Vec::new(); self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            for (r, v) in col.iter() {
                per[*r].push((c, v.clone()));
            }
        }
        SparseMatrix { rows: self.cols, cols: self.rows, columns: per.into_iter().map(|e| SparseVec { entries: e }).collect() }
    }

    pub fn add_scaled(&self, f: &Q, other: &SparseMatrix) -> SparseMatrix {
        assert!(self.rows == other.rows && self.cols == other.cols, "sum shape mismatch");
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            columns: self.columns.iter().zip(&other.columns).map(|(a, b)| a.add_scaled(f, b)).collect(),
        }
    }

    pub fn add(&self, other: &SparseMatrix) -> SparseMatrix {
        self.add_scaled(&Q::one(), other)
    }

    pub fn sub(&self, other: &SparseMatrix) -> SparseMatrix {
        self.add_scaled(&-Q::one(), other)
    }

    pub fn scale(&self, f: &Q) -> SparseMatrix {
        SparseMatrix { rows: self.rows, cols: self.cols, columns: self.columns.iter().map(|c| c.scale(f)).collect() }
    }

    /// The rows as sparse vectors (column indices).
    pub fn row_vectors(&self) -> Vec<SparseVec> {
        self.transpose().columns
    }

    /// First column where the two matrices differ.
    pub fn first_difference(&self, other: &SparseMatrix) -> Option<usize> {
        (0..self.cols.min(other.cols)).find(|&c| self.columns[c] != other.columns[c])
    }
}

/// Echelon basis of a subspace. Each stored vector has its leading entry
/// (smallest index) equal to 1 and leading indices are distinct. Every
/// stored vector carries a label combination recording how it was obtained
/// from the pushed inputs.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    pivot_of: HashMap<usize, usize>,
    rows: Vec<(SparseVec, SparseVec)>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis; returns the remainder and the label
    /// combination `c` with `v = remainder + Σ c_l · input_l`.
    pub fn reduce(&self, v: &SparseVec) -> (SparseVec, SparseVec) {
        let mut v = v.clone();
        let mut combo = SparseVec::new();
        let mut pos = 0;
        while pos < v.entries.len() {
            let (c, f) = v.entries[pos].clone();
            match self.pivot_of.get(&c) {
                Some(&r) => {
                    let (row, lab) = &self.rows[r];
                    v = v.add_scaled(&-f.clone(), row);
                    combo = combo.add_scaled(&f, lab);
                }
                None => pos += 1,
            }
        }
        (v, combo)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).0.is_zero()
    }

    /// Pushes `v` carrying `label`. Returns `None` if `v` was independent,
    /// otherwise the dependency `label - Σ c·labels` whose input combination is zero.
    pub fn push(&mut self, v: &SparseVec, label: SparseVec) -> Option<SparseVec> {
        let (r, combo) = self.reduce(v);
        let lab = label.sub(&combo);
        match r.leading() {
            None => Some(lab),
            Some(p) => {
                let inv = Q::one() / r.get(p);
                self.pivot_of.insert(p, self.rows.len());
                self.rows.push((r.scale(&inv), lab.scale(&inv)));
                None
            }
        }
    }
}

/// Reduced row echelon form of a list of rows.
#[derive(Clone, Debug)]
pub struct Rref {
    pub cols: usize,
    /// (pivot column, normalized row), sorted by pivot column.
    pub rows: Vec<(usize, SparseVec)>,
}

impl Rref {
    pub fn new(cols: usize, rows: Vec<SparseVec>) -> Self {
        let mut order: Vec<SparseVec> = rows.into_iter().filter(|r| !r.is_zero()).collect();
        order.sort_by_key(|r| (r.nnz(), r.leading()));
        let mut ech = Echelon::new();
        for r in &order {
            ech.push(r, SparseVec::new());
        }
        let mut piv: Vec<(usize, SparseVec)> = ech.rows.into_iter().map(|(r, _)| (r.leading().unwrap(), r)).collect();
        piv.sort_by_key(|(p, _)| *p);
        // back substitution, from the largest pivot down
        let index: HashMap<usize, usize> = piv.iter().enumerate().map(|(i, (p, _))| (*p, i)).collect();
        for i in (0..piv.len()).rev() {
            let mut row = piv[i].1.clone();
            let mut pos = 1;
            while pos < row.entries.len() {
                let (c, f) = row.entries[pos].clone();
                match index.get(&c) {
                    Some(&j) if j != i => {
                        row = row.add_scaled(&-f, &piv[j].1);
                    }
                    _ => pos += 1,
                }
            }
            piv[i].1 = row;
        }
        Rref { cols, rows: piv }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        self.rows.iter().map(|(p, _)| *p).collect()
    }

    /// Kernel basis: one vector per free column, with a 1 in that column.
    pub fn kernel(&self) -> Vec<SparseVec> {
        let pivots: HashMap<usize, usize> = self.rows.iter().map(|(p, _)| *p).enumerate().map(|(i, p)| (p, i)).collect();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains_key(c)).collect();
        let slot: HashMap<usize, usize> = free.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        let mut acc: Vec<Vec<(usize, Q)>> = free.iter().map(|&f| vec![(f, Q::one())]).collect();
        for (p, row) in &self.rows {
            for (c, v) in row.iter() {
                if let Some(&s) = slot.get(c) {
                    acc[s].push((*p, -v.clone()));
                }
            }
        }
        acc.into_iter().map(SparseVec::from_pairs).collect()
    }
}

#[derive(Clone, Debug)]
pub struct RankKernelImage {
    pub rank: usize,
    pub kernel: Vec<SparseVec>,
    pub image: Vec<SparseVec>,
}

pub fn rank_kernel_image(m: &SparseMatrix) -> RankKernelImage {
    let rref = Rref::new(m.cols(), m.row_vectors());
    let image = rref.pivot_columns().iter().map(|&c| m.column(c).clone()).collect();
    RankKernelImage { rank: rref.rank(), kernel: rref.kernel(), image }
}

/// Solves `m x = b`; `None` when `b` is outside the image.
pub fn solve(m: &SparseMatrix, b: &SparseVec) -> Option<SparseVec> {
    let mut ech = Echelon::new();
    for (c, col) in m.columns().iter().enumerate() {
        ech.push(col, SparseVec::unit(c));
    }
    let (r, combo) = ech.reduce(b);
    r.is_zero().then_some(combo)
}

/// Inverse of a dense square matrix; `None` if singular.
pub fn dense_inverse(a: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = a.len();
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            row
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, p);
        let inv = Q::one() / &m[col][col];
        for x in m[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot_row = m[col].clone();
                for (x, y) in m[r].iter_mut().zip(pivot_row.iter()) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn dense_det(a: &[Vec<Q>]) -> Q {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = Q::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Q::zero();
        };
        if p != col {
            m.swap(col, p);
            det = -det;
        }
        det *= &m[col][col];
        let inv = Q::one() / &m[col][col];
        for r in col + 1..n {
            if !m[r][col].is_zero() {
                let f = &m[r][col] * &inv;
                let pivot_row = m[col].clone();
                for (x, y) in m[r].iter_mut().zip(pivot_row.iter()) {
                    *x -= &f * y;
                }
            }
        }
    }
    det
}

/// Finite cochain complex `C^lo → C^{lo+1} → … → C^hi`.
#[derive(Clone, Debug)]
pub struct FiniteChainComplex {
    lo: i32,
    dims: Vec<usize>,
    d: Vec<SparseMatrix>,
}

impl FiniteChainComplex {
    /// `d[i]` maps degree `lo + i` to `lo + i + 1`; there are `dims.len() - 1` of them.
    pub fn new(lo: i32, dims: Vec<usize>, d: Vec<SparseMatrix>) -> Result<Self, LinalgError> {
        if d.len() + 1 != dims.len().max(1) {
            return Err(LinalgError::Shape(format!("{} differentials for {} degrees", d.len(), dims.len())));
        }
        for (i, m) in d.iter().enumerate() {
            if m.cols() != dims[i] || m.rows() != dims[i + 1] {
                return Err(LinalgError::Shape(format!(
                    "d from degree {} is {}x{}, expected {}x{}",
                    lo + i as i32,
                    m.rows(),
                    m.cols(),
                    dims[i + 1],
                    dims[i]
                )));
            }
        }
        let c = FiniteChainComplex { lo, dims, d };
        c.check_d_squared()?;
        Ok(c)
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.dims.len() as i32 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.lo..=self.hi()
    }

    pub fn dim(&self, k: i32) -> usize {
        if k < self.lo || k > self.hi() {
            0
        } else {
            self.dims[(k - self.lo) as usize]
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Differential out of degree `k`, a zero matrix outside the stored range.
    pub fn differential(&self, k: i32) -> SparseMatrix {
        if k >= self.lo && k < self.hi() {
            self.d[(k - self.lo) as usize].clone()
        } else {
            SparseMatrix::zeros(self.dim(k + 1), self.dim(k))
        }
    }

    fn d_ref(&self, k: i32) -> Option<&SparseMatrix> {
        if k >= self.lo && k < self.hi() {
            Some(&self.d[(k - self.lo) as usize])
        } else {
            None
        }
    }

    pub fn apply_d(&self, k: i32, v: &SparseVec) -> SparseVec {
        match self.d_ref(k) {
            Some(m) => m.mul_vec(v),
            None => SparseVec::new(),
        }
    }

    pub fn check_d_squared(&self) -> Result<(), LinalgError> {
        for i in 0..self.d.len().saturating_sub(1) {
            let dd = self.d[i + 1].mul(&self.d[i]);
            if let Some(c) = (0..dd.cols()).find(|&c| !dd.column(c).is_zero()) {
                return Err(LinalgError::DSquared { degree: self.lo + i as i32, column: c });
            }
        }
        Ok(())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.degrees().map(|k| if k.rem_euclid(2) == 0 { 1 } else { -1 } * self.dim(k) as i64).sum()
    }

    pub fn is_cycle(&self, k: i32, z: &SparseVec) -> bool {
        self.apply_d(k, z).is_zero()
    }

    /// Cohomology in degree `k` with representatives and a class classifier.
    pub fn homology(&self, k: i32) -> HomologyBasis {
        let cycles = match self.d_ref(k) {
            Some(m) => rank_kernel_image(m).kernel,
            None => (0..self.dim(k)).map(SparseVec::unit).collect(),
        };
        let mut ech = Echelon::new();
        let mut boundaries_dim = 0;
        if let Some(m) = self.d_ref(k - 1) {
            for col in m.columns() {
                if ech.push(col, SparseVec::new()).is_none() {
                    boundaries_dim += 1;
                }
            }
        }
        let mut reps = Vec::new();
        for z in &cycles {
            if ech.push(z, SparseVec::unit(reps.len())).is_none() {
                reps.push(z.clone());
            }
        }
        HomologyBasis { degree: k, dimension: reps.len(), cycles_dim: cycles.len(), boundaries_dim, representatives: reps, classifier: ech }
    }

    /// A preimage `w` with `d w = v` for `v` in degree `k`.
    pub fn boundary_preimage(&self, k: i32, v: &SparseVec) -> Option<SparseVec> {
        if v.is_zero() {
            return Some(SparseVec::new());
        }
        let m = self.d_ref(k - 1)?;
        solve(m, v)
    }

    pub fn is_boundary(&self, k: i32, v: &SparseVec) -> bool {
        if v.is_zero() {
            return true;
        }
        match self.d_ref(k - 1) {
            None => false,
            Some(m) => {
                let mut ech = Echelon::new();
                for c in m.columns() {
                    ech.push(c, SparseVec::new());
                }
                ech.contains(v)
            }
        }
    }

    /// Restriction to a subset of basis vectors per degree, which must span a subcomplex.
    pub fn subcomplex(&self, keep: &[Vec<usize>]) -> Result<(FiniteChainComplex, Vec<Vec<usize>>), LinalgError> {
        let maps: Vec<HashMap<usize, usize>> = keep.iter().map(|ks| ks.iter().enumerate().map(|(i, &b)| (b, i)).collect()).collect();
        let mut d = Vec::new();
        for i in 0..self.dims.len().saturating_sub(1) {
            let mut cols = Vec::new();
            for &b in &keep[i] {
                let img = self.d[i].column(b);
                let mut out = Vec::new();
                for (r, v) in img.iter() {
                    match maps[i + 1].get(r) {
                        Some(&j) => out.push((j, v.clone())),
                        None => return Err(LinalgError::Shape(format!("not a subcomplex at degree {}", self.lo + i as i32))),
                    }
                }
                cols.push(SparseVec::from_pairs(out));
            }
            d.push(SparseMatrix::from_columns(keep[i + 1].len(), cols));
        }
        let c = FiniteChainComplex::new(self.lo, keep.iter().map(|k| k.len()).collect(), d)?;
        Ok((c, keep.to_vec()))
    }
}

#[derive(Clone, Debug)]
pub struct HomologyBasis {
    pub degree: i32,
    pub dimension: usize,
    pub cycles_dim: usize,
    pub boundaries_dim: usize,
    pub representatives: Vec<SparseVec>,
    classifier: Echelon,
}

impl HomologyBasis {
    /// Coordinates of the class of `z` in the representative basis.
    /// `None` if `z` is not in cycles (caller must check the cycle condition).
    pub fn coordinates(&self, z: &SparseVec) -> Option<Vec<Q>> {
        let (r, combo) = self.classifier.reduce(z);
        if !r.is_zero() {
            return None;
        }
        Some(combo.to_dense(self.dimension))
    }

    pub fn is_zero_class(&self, z: &SparseVec) -> Option<bool> {
        self.coordinates(z).map(|c| c.iter().all(|x| x.is_zero()))
    }
}

pub fn same_class(c: &FiniteChainComplex, k: i32, z1: &SparseVec, z2: &SparseVec) -> Result<bool, LinalgError> {
    if !c.is_cycle(k, z1) || !c.is_cycle(k, z2) {
        return Err(LinalgError::NotCycle { degree: k });
    }
    Ok(c.is_boundary(k, &z1.sub(z2)))
}

/// A family of maps `f_k : C^k → D^{k+shift}` for `k` in the degrees of `C`.
#[derive(Clone, Debug)]
pub struct GradedMap {
    pub source_lo: i32,
    pub shift: i32,
    pub maps: Vec<SparseMatrix>,
}

impl GradedMap {
    pub fn component(&self, k: i32) -> Option<&SparseMatrix> {
        if k < self.source_lo {
            return None;
        }
        self.maps.get((k - self.source_lo) as usize)
    }

    pub fn apply(&self, k: i32, v: &SparseVec) -> SparseVec {
        match self.component(k) {
            Some(m) => m.mul_vec(v),
            None => SparseVec::new(),
        }
    }

    pub fn identity(c: &FiniteChainComplex) -> GradedMap {
        GradedMap { source_lo: c.lo(), shift: 0, maps: c.degrees().map(|k| SparseMatrix::identity(c.dim(k))).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainMapWitness {
    pub degree: i32,
    pub basis_vector: usize,
}

/// Checks `d_D f = (-1)^shift f d_C` on every degree of `C`.
pub fn is_chain_map(f: &GradedMap, c: &FiniteChainComplex, d: &FiniteChainComplex) -> Result<(), ChainMapWitness> {
    let s = sign(f.shift.rem_euclid(2) as usize);
    for k in c.degrees() {
        for j in 0..c.dim(k) {
            let e = SparseVec::unit(j);
            let lhs = d.apply_d(k + f.shift, &f.apply(k, &e));
            let rhs = f.apply(k + 1, &c.apply_d(k, &e)).scale(&s);
            if lhs != rhs {
                return Err(ChainMapWitness { degree: k, basis_vector: j });
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub enum HomotopyResult {
    /// `K` with `[d, K] = φ`.
    Feasible(GradedMap),
    /// `φ` does not commute with the differentials.
    NotClosed(ChainMapWitness),
    /// A cohomology class whose image under `φ` is not a boundary.
    Infeasible { degree: i32, class_index: usize, image: SparseVec },
}

impl HomotopyResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, HomotopyResult::Feasible(_))
    }
}

/// Graded commutator `d_D K - (-1)^{|K|} K d_C` as a graded map of degree `|K| + 1`.
pub fn graded_commutator(k: &GradedMap, c: &FiniteChainComplex, d: &FiniteChainComplex) -> GradedMap {
    let s = sign(k.shift.rem_euclid(2) as usize);
    let maps = c
        .degrees()
        .map(|deg| {
            let cols = (0..c.dim(deg))
                .map(|j| {
                    let e = SparseVec::unit(j);
                    let a = d.apply_d(deg + k.shift, &k.apply(deg, &e));
                    let b = k.apply(deg + 1, &c.apply_d(deg, &e));
                    a.add_scaled(&-s.clone(), &b)
                })
                .collect();
            SparseMatrix::from_columns(d.dim(deg + k.shift + 1), cols)
        })
        .collect();
    GradedMap { source_lo: c.lo(), shift: k.shift + 1, maps }
}

/// Solves `[d, K] = φ` for `K` of degree `|φ| - 1`, or certifies that no such `K` exists.
///
/// Over a field this is decided exactly: `φ` must commute with the
/// differentials, and must send every cohomology class of `C` to zero.
/// The solution is `K = (-1)^{|φ|} φ h + w p`, where `h` is a contraction
/// of `C` onto its chosen representatives, `p` the class coordinates, and
/// `w` preimages of `φ` on representatives.
pub fn find_chain_homotopy(phi: &GradedMap, c: &FiniteChainComplex, d: &FiniteChainComplex) -> HomotopyResult {
    let q = phi.shift;
    let s = sign(q.rem_euclid(2) as usize);
    // closedness: d φ = (-1)^q φ d
    for k in c.degrees() {
        for j in 0..c.dim(k) {
            let e = SparseVec::unit(j);
            let lhs = d.apply_d(k + q, &phi.apply(k, &e));
            let rhs = phi.apply(k + 1, &c.apply_d(k, &e)).scale(&s);
            if lhs != rhs {
                return HomotopyResult::NotClosed(ChainMapWitness { degree: k, basis_vector: j });
            }
        }
    }
    let contraction = Contraction::new(c);
    let mut maps = Vec::new();
    for k in c.degrees() {
        let hom = &contraction.homology[(k - c.lo()) as usize];
        let mut w = Vec::new();
        for (i, z) in hom.representatives.iter().enumerate() {
            let img = phi.apply(k, z);
            match d.boundary_preimage(k + q, &img) {
                Some(x) => w.push(x),
                None => return HomotopyResult::Infeasible { degree: k, class_index: i, image: img },
            }
        }
        let rows = d.dim(k + q - 1);
        let cols = (0..c.dim(k))
            .map(|j| {
                let e = SparseVec::unit(j);
                let (hv, coords) = contraction.split(k, &e);
                let mut out = phi.apply(k - 1, &hv).scale(&s);
                for (i, a) in coords.iter().enumerate() {
                    if !a.is_zero() {
                        out = out.add_scaled(a, &w[i]);
                    }
                }
                out
            })
            .collect();
        maps.push(SparseMatrix::from_columns(rows, cols));
    }
    HomotopyResult::Feasible(GradedMap { source_lo: c.lo(), shift: q - 1, maps })
}

/// Splitting data `C^k = B^k ⊕ H^k ⊕ L^k` with `d : L^k ≅ B^{k+1}`.
struct Contraction {
    homology: Vec<HomologyBasis>,
    // per degree: echelon over the adapted basis, labels index [B, H, L]
    adapted: Vec<(Echelon, Vec<SparseVec>, usize, usize)>,
}

impl Contraction {
    fn new(c: &FiniteChainComplex) -> Self {
        let homology: Vec<HomologyBasis> = c.degrees().map(|k| c.homology(k)).collect();
        // L^k: standard vectors on the pivot columns of d_k
        let lifts: Vec<Vec<usize>> = c
            .degrees()
            .map(|k| match c.d_ref(k) {
                Some(m) => Rref::new(m.cols(), m.row_vectors()).pivot_columns(),
                None => Vec::new(),
            })
            .collect();
        let mut adapted = Vec::new();
        for k in c.degrees() {
            let i = (k - c.lo()) as usize;
            let mut ech = Echelon::new();
            let mut pre = Vec::new();
            let mut label = 0;
            if k > c.lo() {
                for &l in &lifts[i - 1] {
                    let b = c.apply_d(k - 1, &SparseVec::unit(l));
                    ech.push(&b, SparseVec::unit(label));
                    pre.push(SparseVec::unit(l));
                    label += 1;
                }
            }
            let nb = label;
            for z in &homology[i].representatives {
                ech.push(z, SparseVec::unit(label));
                label += 1;
            }
            for &l in &lifts[i] {
                ech.push(&SparseVec::unit(l), SparseVec::unit(label));
                label += 1;
            }
            adapted.push((ech, pre, nb, homology[i].dimension));
        }
        Contraction { homology, adapted }
    }

    /// For `v` in degree `k`: `(h v, class coordinates of v)`.
    fn split(&self, k: i32, v: &SparseVec) -> (SparseVec, Vec<Q>) {
        let lo = self.homology[0].degree;
        let (ech, pre, nb, nh) = &self.adapted[(k - lo) as usize];
        let (r, combo) = ech.reduce(v);
        debug_assert!(r.is_zero());
        let mut hv = SparseVec::new();
        let mut coords = vec![Q::zero(); *nh];
        for (l, a) in combo.iter() {
            if *l < *nb {
                hv = hv.add_scaled(a, &pre[*l]);
            } else if *l < nb + nh {
                coords[l - nb] = a.clone();
            }
        }
        (hv, coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn m(rows: &[&[i64]]) -> SparseMatrix {
        SparseMatrix::from_dense(&rows.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect::<Vec<_>>())
    }

    #[test]
    fn rank_examples() {
        let z = SparseMatrix::zeros(3, 3);
        let r = rank_kernel_image(&z);
        assert_eq!((r.rank, r.kernel.len()), (0, 3));
        let r = rank_kernel_image(&SparseMatrix::identity(4));
        assert_eq!((r.rank, r.kernel.len()), (4, 0));
        let a = m(&[&[1, 2], &[2, 4]]);
        let r = rank_kernel_image(&a);
        assert_eq!(r.rank, 1);
        assert_eq!(r.kernel.len(), 1);
        let k = &r.kernel[0];
        // proportional to (2, -1)
        assert_eq!(k.get(0) * qi(-1), k.get(1) * qi(2));
        assert!(a.mul_vec(k).is_zero());
    }

    #[test]
    fn add_scaled_merges() {
        let a = SparseVec::from_pairs([(0, qi(1)), (3, qi(2))]);
        let b = SparseVec::from_pairs([(1, qi(1)), (3, qi(1))]);
        let c = a.add_scaled(&qi(-2), &b);
        assert_eq!(c, SparseVec::from_pairs([(0, qi(1)), (1, qi(-2))]));
    }

    #[test]
    fn inverse_and_det() {
        let a = vec![vec![qi(2), qi(1)], vec![qi(1), qi(1)]];
        let inv = dense_inverse(&a).unwrap();
        assert_eq!(inv, vec![vec![qi(1), qi(-1)], vec![qi(-1), qi(2)]]);
        assert_eq!(dense_det(&a), qi(1));
        assert!(dense_inverse(&[vec![qi(1), qi(2)], vec![qi(2), qi(4)]]).is_none());
        assert_eq!(dense_det(&[vec![q(1, 2), qi(0)], vec![qi(3), qi(4)]]), qi(2));
    }

    #[test]
    fn two_term_complex_acyclic() {
        let c = FiniteChainComplex::new(0, vec![1, 1], vec![SparseMatrix::identity(1)]).unwrap();
        assert_eq!(c.homology(0).dimension, 0);
        assert_eq!(c.homology(1).dimension, 0);
    }

    #[test]
    fn d_squared_rejected() {
        let d = SparseMatrix::identity(1);
        let e = FiniteChainComplex::new(0, vec![1, 1, 1], vec![d.clone(), d]);
        assert!(matches!(e, Err(LinalgError::DSquared { degree: 0, .. })));
    }

    #[test]
    fn identity_not_null_homotopic_when_homology() {
        let c = FiniteChainComplex::new(0, vec![1, 2], vec![m(&[&[1], &[0]])]).unwrap();
        let id = GradedMap::identity(&c);
        assert!(is_chain_map(&id, &c, &c).is_ok());
        match find_chain_homotopy(&id, &c, &c) {
            HomotopyResult::Infeasible { degree, .. } => assert_eq!(degree, 1),
            other => panic!("expected infeasible, got {other:?}"),
        }
        // acyclic complex: identity is null-homotopic
        let a = FiniteChainComplex::new(0, vec![2, 2], vec![m(&[&[1, 1], &[0, 2]])]).unwrap();
        let id = GradedMap::identity(&a);
        match find_chain_homotopy(&id, &a, &a) {
            HomotopyResult::Feasible(k) => {
                let comm = graded_commutator(&k, &a, &a);
                for deg in a.degrees() {
                    assert_eq!(comm.component(deg).unwrap(), id.component(deg).unwrap());
                }
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn zero_map_homotopy_is_zero() {
        let c = FiniteChainComplex::new(0, vec![1, 2], vec![m(&[&[1], &[0]])]).unwrap();
        let zero = GradedMap { source_lo: 0, shift: 0, maps: vec![SparseMatrix::zeros(1, 1), SparseMatrix::zeros(2, 2)] };
        match find_chain_homotopy(&zero, &c, &c) {
            HomotopyResult::Feasible(k) => assert!(k.maps.iter().all(|m| m.is_zero())),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn classes() {
        // C^0 = Q, C^1 = Q^2, d = (1,0)^T: H^1 spanned by e_1
        let c = FiniteChainComplex::new(0, vec![1, 2], vec![m(&[&[1], &[0]])]).unwrap();
        let h = c.homology(1);
        assert_eq!(h.dimension, 1);
        let z1 = SparseVec::from_pairs([(0, qi(5)), (1, qi(1))]);
        let z2 = SparseVec::unit(1);
        assert!(same_class(&c, 1, &z1, &z2).unwrap());
        assert!(!same_class(&c, 1, &z2, &SparseVec::new()).unwrap());
        assert_eq!(c.boundary_preimage(1, &SparseVec::unit(0)), Some(SparseVec::unit(0)));
        assert!(same_class(&c, 0, &SparseVec::unit(0), &SparseVec::new()).is_err());
    }
}
