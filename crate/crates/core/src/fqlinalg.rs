//! Dense matrices and subspaces over F_q.
//!
//! A [`Subspace`] is always stored by its reduced row-echelon basis, which is
//! unique; two subspaces are equal exactly when their bases are equal entry by
//! entry, so subspaces can be used directly as map keys or histogram bins.

use std::fmt;
use std::hash::{Hash, Hasher};

use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::galois::{FieldSpec, Fq};
use crate::qcomb::gaussian_binomial;

/// Largest Grassmannian that [`enumerate_subspaces`] will materialize.
pub const ENUMERATION_GUARD: u64 = 1_000_000;

/// Row-major matrix over F_q.
#[derive(Clone, PartialEq, Eq)]
pub struct MatrixFq {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    entries: Vec<Fq>,
}

impl fmt::Debug for MatrixFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatrixFq{:?}", self.to_index_grid())
    }
}

impl Hash for MatrixFq {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rows.hash(state);
        self.cols.hash(state);
        self.entries.hash(state);
    }
}

/// Output of [`MatrixFq::rref`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub reduced: MatrixFq,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// In-place Gauss-Jordan elimination on a row-major buffer. Returns the pivot
/// columns; the first `pivots.len()` rows hold the reduced basis.
pub(crate) fn rref_in_place(field: &FieldSpec, data: &mut [Fq], rows: usize, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !data[i * cols + c].is_zero()) else {
            continue;
        };
        if pr != r {
            for j in 0..cols {
                data.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = field.inv(data[r * cols + c]).expect("pivot is nonzero");
        if inv != Fq::ONE {
            for j in c..cols {
                data[r * cols + j] = field.mul(data[r * cols + j], inv);
            }
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = data[i * cols + c];
            if factor.is_zero() {
                continue;
            }
            for j in c..cols {
                let t = field.mul(factor, data[r * cols + j]);
                data[i * cols + j] = field.sub(data[i * cols + j], t);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of a row-major buffer without modifying it.
pub(crate) fn rank_of(field: &FieldSpec, data: &[Fq], rows: usize, cols: usize) -> usize {
    let mut buf = data.to_vec();
    rref_in_place(field, &mut buf, rows, cols).len()
}

impl MatrixFq {
    pub fn zeros(field: &FieldSpec, rows: usize, cols: usize) -> Self {
        MatrixFq {
            field: field.clone(),
            rows,
            cols,
            entries: vec![Fq::ZERO; rows * cols],
        }
    }

    pub fn identity(field: &FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.entries[i * n + i] = Fq::ONE;
        }
        m
    }

    pub fn from_entries(field: &FieldSpec, rows: usize, cols: usize, entries: Vec<Fq>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|e| e.index() >= field.order()) {
            return Err(Error::InvalidParameter("entry outside the field".into()));
        }
        Ok(MatrixFq {
            field: field.clone(),
            rows,
            cols,
            entries,
        })
    }

    /// Builds a matrix from a grid of canonical element indices.
    pub fn from_index_grid(field: &FieldSpec, grid: &[Vec<u64>]) -> Result<Self> {
        let rows = grid.len();
        let cols = grid.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows * cols);
        for row in grid {
            if row.len() != cols {
                return Err(Error::ShapeMismatch("ragged index grid".into()));
            }
            for &x in row {
                entries.push(field.element(x)?);
            }
        }
        Self::from_entries(field, rows, cols, entries)
    }

    pub fn random<R: Rng + ?Sized>(field: &FieldSpec, rows: usize, cols: usize, rng: &mut R) -> Self {
        MatrixFq {
            field: field.clone(),
            rows,
            cols,
            entries: (0..rows * cols).map(|_| field.random(rng)).collect(),
        }
    }

    /// Uniform full-rank `rows x cols` matrix by rejection (requires rank = min(rows, cols)).
    pub fn random_full_rank<R: Rng + ?Sized>(field: &FieldSpec, rows: usize, cols: usize, rng: &mut R) -> Self {
        let target = rows.min(cols);
        loop {
            let m = Self::random(field, rows, cols, rng);
            if m.rank() == target {
                return m;
            }
        }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Fq] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Fq {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Fq) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Fq] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn rref(&self) -> Rref {
        let mut data = self.entries.clone();
        let pivots = rref_in_place(&self.field, &mut data, self.rows, self.cols);
        Rref {
            reduced: MatrixFq {
                field: self.field.clone(),
                rows: self.rows,
                cols: self.cols,
                entries: data,
            },
            rank: pivots.len(),
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        rank_of(&self.field, &self.entries, self.rows, self.cols)
    }

    pub fn mul(&self, other: &MatrixFq) -> Result<MatrixFq> {
        if self.cols != other.rows || self.field != other.field {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = MatrixFq::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = f.mul(a, other.get(k, j));
                    let idx = i * other.cols + j;
                    out.entries[idx] = f.add(out.entries[idx], t);
                }
            }
        }
        Ok(out)
    }

    pub fn to_index_grid(&self) -> Vec<Vec<u64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|e| e.0 as u64).collect())
            .collect()
    }
}

impl Serialize for MatrixFq {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_index_grid().serialize(serializer)
    }
}

/// A subspace of F_q^ambient stored by its canonical RREF basis.
#[derive(Clone)]
pub struct Subspace {
    basis: MatrixFq,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(ambient={}, basis={:?})", self.ambient(), self.basis.to_index_grid())
    }
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.basis.field == other.basis.field
            && self.basis.cols == other.basis.cols
            && self.basis.rows == other.basis.rows
            && self.basis.entries == other.basis.entries
    }
}

impl Eq for Subspace {}

impl Hash for Subspace {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.basis.cols.hash(state);
        self.basis.rows.hash(state);
        self.basis.entries.hash(state);
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Subspace {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.basis.cols, self.basis.rows, &self.basis.entries).cmp(&(
            other.basis.cols,
            other.basis.rows,
            &other.basis.entries,
        ))
    }
}

impl Serialize for Subspace {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.basis.serialize(serializer)
    }
}

impl Subspace {
    pub fn zero(field: &FieldSpec, ambient: usize) -> Self {
        Subspace {
            basis: MatrixFq::zeros(field, 0, ambient),
        }
    }

    pub fn full(field: &FieldSpec, ambient: usize) -> Self {
        Subspace {
            basis: MatrixFq::identity(field, ambient),
        }
    }

    /// Canonical span of a list of vectors.
    pub fn span(field: &FieldSpec, ambient: usize, vectors: &[Vec<Fq>]) -> Result<Self> {
        let mut data = Vec::with_capacity(vectors.len() * ambient);
        for v in vectors {
            if v.len() != ambient {
                return Err(Error::ShapeMismatch(format!(
                    "vector of length {} in ambient dimension {ambient}",
                    v.len()
                )));
            }
            data.extend_from_slice(v);
        }
        Ok(Self::from_row_buffer(field, ambient, data, vectors.len()))
    }

    /// Row space of a matrix.
    pub fn row_space(m: &MatrixFq) -> Self {
        Self::from_row_buffer(&m.field, m.cols, m.entries.clone(), m.rows)
    }

    fn from_row_buffer(field: &FieldSpec, ambient: usize, mut data: Vec<Fq>, rows: usize) -> Self {
        let rank = rref_in_place(field, &mut data, rows, ambient).len();
        data.truncate(rank * ambient);
        Subspace {
            basis: MatrixFq {
                field: field.clone(),
                rows: rank,
                cols: ambient,
                entries: data,
            },
        }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.basis.field
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    /// The canonical (RREF, no zero rows) basis.
    pub fn basis(&self) -> &MatrixFq {
        &self.basis
    }

    pub fn basis_rows(&self) -> Vec<Vec<Fq>> {
        (0..self.dim()).map(|i| self.basis.row(i).to_vec()).collect()
    }

    fn pivots(&self) -> Vec<usize> {
        (0..self.dim())
            .map(|i| {
                self.basis
                    .row(i)
                    .iter()
                    .position(|e| !e.is_zero())
                    .expect("basis rows are nonzero")
            })
            .collect()
    }

    pub fn contains(&self, v: &[Fq]) -> Result<bool> {
        if v.len() != self.ambient() {
            return Err(Error::ShapeMismatch(format!(
                "vector of length {} in ambient dimension {}",
                v.len(),
                self.ambient()
            )));
        }
        let f = self.field();
        let mut w = v.to_vec();
        for (i, c) in self.pivots().into_iter().enumerate() {
            let factor = w[c];
            if factor.is_zero() {
                continue;
            }
            for (wj, &bj) in w.iter_mut().zip(self.basis.row(i)) {
                *wj = f.sub(*wj, f.mul(factor, bj));
            }
        }
        Ok(w.iter().all(|e| e.is_zero()))
    }

    fn check_compatible(&self, other: &Subspace) -> Result<()> {
        if self.ambient() != other.ambient() || self.field() != other.field() {
            return Err(Error::ShapeMismatch(format!(
                "ambient dimensions {} and {} differ",
                self.ambient(),
                other.ambient()
            )));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        let mut data = self.basis.entries.clone();
        data.extend_from_slice(&other.basis.entries);
        Ok(Self::from_row_buffer(
            self.field(),
            self.ambient(),
            data,
            self.dim() + other.dim(),
        ))
    }

    /// Intersection by Zassenhaus joint elimination: reduce `[[A, A], [B, 0]]`;
    /// rows whose left half vanishes carry a basis of the intersection in their
    /// right half.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        let n = self.ambient();
        let width = 2 * n;
        let rows = self.dim() + other.dim();
        let mut data = Vec::with_capacity(rows * width);
        for i in 0..self.dim() {
            data.extend_from_slice(self.basis.row(i));
            data.extend_from_slice(self.basis.row(i));
        }
        for i in 0..other.dim() {
            data.extend_from_slice(other.basis.row(i));
            data.extend(std::iter::repeat_n(Fq::ZERO, n));
        }
        let pivots = rref_in_place(self.field(), &mut data, rows, width);
        let mut inter = Vec::new();
        for (i, &p) in pivots.iter().enumerate() {
            if p >= n {
                inter.extend_from_slice(&data[i * width + n..(i + 1) * width]);
            }
        }
        let k = inter.len() / n.max(1);
        Ok(Self::from_row_buffer(self.field(), n, inter, if n == 0 { 0 } else { k }))
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool> {
        self.check_compatible(other)?;
        for i in 0..self.dim() {
            if !other.contains(self.basis.row(i))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Uniform random element: a uniform combination of the basis rows.
    pub fn random_vector<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Fq> {
        let f = self.field();
        let mut v = vec![Fq::ZERO; self.ambient()];
        for i in 0..self.dim() {
            let c = f.random(rng);
            if c.is_zero() {
                continue;
            }
            for (vj, &bj) in v.iter_mut().zip(self.basis.row(i)) {
                *vj = f.add(*vj, f.mul(c, bj));
            }
        }
        v
    }
}

/// k x eta row-echelon recursion state for [`enumerate_subspaces`].
fn push_rref_completions(field: &FieldSpec, eta: usize, pivots: &[usize], out: &mut Vec<Subspace>) {
    let k = pivots.len();
    // Free positions: row i, column j > pivot_i, j not a pivot column.
    let mut free = Vec::new();
    for (i, &p) in pivots.iter().enumerate() {
        for j in p + 1..eta {
            if !pivots.contains(&j) {
                free.push(i * eta + j);
            }
        }
    }
    let q = field.order();
    let mut digits = vec![0usize; free.len()];
    loop {
        let mut entries = vec![Fq::ZERO; k * eta];
        for (i, &p) in pivots.iter().enumerate() {
            entries[i * eta + p] = Fq::ONE;
        }
        for (pos, &d) in free.iter().zip(&digits) {
            entries[*pos] = Fq(d as u8);
        }
        out.push(Subspace {
            basis: MatrixFq {
                field: field.clone(),
                rows: k,
                cols: eta,
                entries,
            },
        });
        // odometer increment
        let mut idx = 0;
        loop {
            if idx == digits.len() {
                return;
            }
            digits[idx] += 1;
            if digits[idx] < q {
                break;
            }
            digits[idx] = 0;
            idx += 1;
        }
    }
}

/// All k-dimensional subspaces of F_q^eta, grouped by pivot pattern.
pub fn enumerate_subspaces(field: &FieldSpec, eta: usize, k: usize) -> Result<Vec<Subspace>> {
    if k > eta {
        return Err(Error::OutOfRange {
            what: "subspace dimension",
            value: k as i64,
            min: 0,
            max: eta as i64,
        });
    }
    let count = gaussian_binomial(eta, k, field.order() as u64);
    if count > ENUMERATION_GUARD.into() {
        return Err(Error::GuardExceeded {
            what: "Grassmannian enumeration",
            size: count.to_string(),
            limit: ENUMERATION_GUARD.to_string(),
        });
    }
    let mut out = Vec::new();
    let mut pivots: Vec<usize> = (0..k).collect();
    loop {
        push_rref_completions(field, eta, &pivots, &mut out);
        // next k-combination of 0..eta in lexicographic order
        let Some(i) = (0..k).rev().find(|&i| pivots[i] < eta - k + i) else {
            break;
        };
        pivots[i] += 1;
        for j in i + 1..k {
            pivots[j] = pivots[j - 1] + 1;
        }
    }
    Ok(out)
}

/// Uniform draw from the Grassmannian G(k, F_q^eta): rejection-sample a
/// full-rank k x eta matrix and canonicalize its row space. Every k-dim
/// subspace has exactly |GL_k(F_q)| generator matrices, so the result is uniform.
pub fn sample_subspace<R: Rng + ?Sized>(field: &FieldSpec, eta: usize, k: usize, rng: &mut R) -> Result<Subspace> {
    if k > eta {
        return Err(Error::OutOfRange {
            what: "subspace dimension",
            value: k as i64,
            min: 0,
            max: eta as i64,
        });
    }
    if k == 0 {
        return Ok(Subspace::zero(field, eta));
    }
    Ok(Subspace::row_space(&MatrixFq::random_full_rank(field, k, eta, rng)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::chi_squared_uniform;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::collections::HashMap;

    fn gf(q: u64) -> FieldSpec {
        FieldSpec::of_order(q).unwrap()
    }

    fn grid(f: &FieldSpec, g: &[&[u64]]) -> MatrixFq {
        MatrixFq::from_index_grid(f, &g.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn rref_examples() {
        let f2 = gf(2);
        let id = MatrixFq::identity(&f2, 2);
        let r = id.rref();
        assert_eq!(r.reduced, id);
        assert_eq!(r.rank, 2);

        let z = MatrixFq::zeros(&f2, 3, 2);
        assert_eq!(z.rref().reduced, z);
        assert_eq!(z.rank(), 0);

        let m = grid(&f2, &[&[1, 1], &[1, 1]]);
        let r = m.rref();
        assert_eq!(r.reduced, grid(&f2, &[&[1, 1], &[0, 0]]));
        assert_eq!(r.rank, 1);
        assert_eq!(r.pivots, vec![0]);
    }

    #[test]
    fn rank_examples() {
        let f3 = gf(3);
        assert_eq!(grid(&f3, &[&[1, 0], &[0, 0]]).rank(), 1);
        let perm = grid(&f3, &[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]);
        assert_eq!(perm.rank(), 3);
    }

    #[test]
    fn rref_is_idempotent() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for q in [2, 3, 4, 5] {
            let f = gf(q);
            for _ in 0..1000 {
                let rows = rng.gen_range(1..5);
                let cols = rng.gen_range(1..5);
                let m = MatrixFq::random(&f, rows, cols, &mut rng);
                let once = m.rref().reduced;
                assert_eq!(once.rref().reduced, once);
                assert!(m.rank() <= rows.min(cols));
            }
        }
    }

    #[test]
    fn span_examples() {
        let f2 = gf(2);
        assert_eq!(Subspace::span(&f2, 3, &[]).unwrap().dim(), 0);
        let s = Subspace::span(&f2, 2, &[vec![Fq(1), Fq(1)], vec![Fq(1), Fq(1)]]).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.basis_rows(), vec![vec![Fq(1), Fq(1)]]);
        let e: Vec<Vec<Fq>> = (0..3)
            .map(|i| (0..3).map(|j| if i == j { Fq::ONE } else { Fq::ZERO }).collect())
            .collect();
        assert_eq!(Subspace::span(&f2, 3, &e).unwrap(), Subspace::full(&f2, 3));
    }

    #[test]
    fn contains_examples() {
        let f2 = gf(2);
        let s = Subspace::span(&f2, 3, &[vec![Fq(1), Fq(0), Fq(0)]]).unwrap();
        assert!(s.contains(&[Fq(0); 3]).unwrap());
        assert!(s.contains(&[Fq(1), Fq(0), Fq(0)]).unwrap());
        assert!(!s.contains(&[Fq(0), Fq(0), Fq(1)]).unwrap());
        assert!(s.contains(&[Fq(0); 2]).is_err());
    }

    #[test]
    fn intersect_and_sum_examples() {
        let f2 = gf(2);
        let full = Subspace::full(&f2, 2);
        let diag = Subspace::span(&f2, 2, &[vec![Fq(1), Fq(1)]]).unwrap();
        let zero = Subspace::zero(&f2, 2);
        assert_eq!(full.intersect(&diag).unwrap(), diag);
        assert_eq!(diag.intersect(&diag).unwrap(), diag);
        assert_eq!(diag.intersect(&zero).unwrap(), zero);
        assert_eq!(diag.sum(&zero).unwrap(), diag);
        assert_eq!(diag.sum(&diag).unwrap(), diag);
        let e1 = Subspace::span(&f2, 2, &[vec![Fq(1), Fq(0)]]).unwrap();
        let e2 = Subspace::span(&f2, 2, &[vec![Fq(0), Fq(1)]]).unwrap();
        assert_eq!(e1.sum(&e2).unwrap(), full);
        assert!(e1.intersect(&Subspace::zero(&f2, 3)).is_err());
    }

    #[test]
    fn dimension_formula_on_random_pairs() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for q in [2, 3] {
            let f = gf(q);
            for _ in 0..1000 {
                let n = rng.gen_range(1..6);
                let a = sample_subspace(&f, n, rng.gen_range(0..=n), &mut rng).unwrap();
                let b = sample_subspace(&f, n, rng.gen_range(0..=n), &mut rng).unwrap();
                let s = a.sum(&b).unwrap();
                let i = a.intersect(&b).unwrap();
                assert_eq!(s.dim() + i.dim(), a.dim() + b.dim());
                assert!(i.is_subspace_of(&a).unwrap() && i.is_subspace_of(&b).unwrap());
                assert!(a.is_subspace_of(&s).unwrap() && b.is_subspace_of(&s).unwrap());
            }
        }
    }

    #[test]
    fn enumeration_counts_match_gaussian_binomial() {
        for q in [2u64, 3] {
            let f = gf(q);
            for eta in 0..=4 {
                for k in 0..=eta {
                    let all = enumerate_subspaces(&f, eta, k).unwrap();
                    let distinct: std::collections::HashSet<_> = all.iter().cloned().collect();
                    assert_eq!(distinct.len(), all.len());
                    assert_eq!(all.len() as u64, u64::try_from(gaussian_binomial(eta, k, q)).unwrap());
                    assert!(all.iter().all(|s| s.dim() == k && s.basis().rref().reduced == *s.basis()));
                }
            }
        }
        let f2 = gf(2);
        assert_eq!(enumerate_subspaces(&f2, 2, 1).unwrap().len(), 3);
        assert_eq!(enumerate_subspaces(&f2, 4, 2).unwrap().len(), 35);
        assert_eq!(enumerate_subspaces(&f2, 4, 0).unwrap().len(), 1);
        assert!(matches!(
            enumerate_subspaces(&f2, 12, 6),
            Err(Error::GuardExceeded { .. })
        ));
    }

    #[test]
    fn sampler_edge_dimensions() {
        let f = gf(3);
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        assert_eq!(sample_subspace(&f, 3, 0, &mut rng).unwrap(), Subspace::zero(&f, 3));
        assert_eq!(sample_subspace(&f, 3, 3, &mut rng).unwrap(), Subspace::full(&f, 3));
        assert!(sample_subspace(&f, 3, 4, &mut rng).is_err());
    }

    #[test]
    fn grassmannian_sampler_is_uniform() {
        let f = gf(2);
        let all = enumerate_subspaces(&f, 4, 2).unwrap();
        let index: HashMap<_, _> = all.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let mut counts = vec![0u64; all.len()];
        let mut rng = ChaCha20Rng::seed_from_u64(2024);
        for _ in 0..20_000 {
            counts[index[&sample_subspace(&f, 4, 2, &mut rng).unwrap()]] += 1;
        }
        assert!(chi_squared_uniform(&counts).p_value > 0.001);
    }
}
