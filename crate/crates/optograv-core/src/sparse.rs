//! Compressed-sparse-row complex matrices for Fock operators and
//! Liouvillians.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::linalg::{CMat, C64};

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMat {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C64>,
}

impl CsrMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            indptr: vec![0; rows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![C64::new(1.0, 0.0); n],
        }
    }

    /// Duplicate entries are summed; exact zeros are dropped.
    pub fn from_triplets(rows: usize, cols: usize, mut entries: Vec<(usize, usize, C64)>) -> Self {
        entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut indptr = vec![0; rows + 1];
        let mut indices = Vec::with_capacity(entries.len());
        let mut values: Vec<C64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        let mut row_of = Vec::with_capacity(entries.len());
        for (i, j, v) in entries {
            assert!(i < rows && j < cols, "triplet out of bounds");
            if last == Some((i, j)) {
                *values.last_mut().expect("nonempty") += v;
            } else {
                indices.push(j);
                values.push(v);
                row_of.push(i);
                last = Some((i, j));
            }
        }
        let mut keep_idx = Vec::with_capacity(indices.len());
        let mut keep_val = Vec::with_capacity(values.len());
        for ((j, v), i) in indices.into_iter().zip(values).zip(row_of) {
            if !v.is_zero() {
                keep_idx.push(j);
                keep_val.push(v);
                indptr[i + 1] += 1;
            }
        }
        for i in 0..rows {
            indptr[i + 1] += indptr[i];
        }
        Self {
            rows,
            cols,
            indptr,
            indices: keep_idx,
            values: keep_val,
        }
    }

    pub fn from_dense(m: &CMat) -> Self {
        let mut t = Vec::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let v = m[(i, j)];
                if !v.is_zero() {
                    t.push((i, j, v));
                }
            }
        }
        Self::from_triplets(m.rows(), m.cols(), t)
    }

    pub fn to_dense(&self) -> CMat {
        let mut m = CMat::zeros(self.rows, self.cols);
        for (i, j, v) in self.iter() {
            m[(i, j)] += v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.rows).flat_map(move |i| {
            (self.indptr[i]..self.indptr[i + 1]).map(move |k| (i, self.indices[k], self.values[k]))
        })
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let lo = self.indptr[i];
        let hi = self.indptr[i + 1];
        match self.indices[lo..hi].binary_search(&j) {
            Ok(k) => self.values[lo + k],
            Err(_) => C64::zero(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        for v in out.values.iter_mut() {
            *v *= s;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let t = self.iter().chain(other.iter()).collect();
        Self::from_triplets(self.rows, self.cols, t)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn transpose(&self) -> Self {
        let t = self.iter().map(|(i, j, v)| (j, i, v)).collect();
        Self::from_triplets(self.cols, self.rows, t)
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        for v in out.values.iter_mut() {
            *v = v.conj();
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut acc = vec![C64::zero(); other.cols];
        let mut touched = vec![false; other.cols];
        let mut cols_hit = Vec::new();
        let mut t = Vec::new();
        for i in 0..self.rows {
            for k in self.indptr[i]..self.indptr[i + 1] {
                let a = self.values[k];
                let r = self.indices[k];
                for kk in other.indptr[r]..other.indptr[r + 1] {
                    let j = other.indices[kk];
                    if !touched[j] {
                        touched[j] = true;
                        cols_hit.push(j);
                    }
                    acc[j] += a * other.values[kk];
                }
            }
            for &j in &cols_hit {
                t.push((i, j, acc[j]));
                acc[j] = C64::zero();
                touched[j] = false;
            }
            cols_hit.clear();
        }
        Self::from_triplets(self.rows, other.cols, t)
    }

    pub fn kron(&self, other: &Self) -> Self {
        let mut t = Vec::with_capacity(self.nnz() * other.nnz());
        for (i, j, a) in self.iter() {
            for (k, l, b) in other.iter() {
                t.push((i * other.rows + k, j * other.cols + l, a * b));
            }
        }
        Self::from_triplets(self.rows * other.rows, self.cols * other.cols, t)
    }

    /// `y = self * x`.
    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(y.len(), self.rows);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = C64::zero();
            for k in self.indptr[i]..self.indptr[i + 1] {
                s += self.values[k] * x[self.indices[k]];
            }
            *yi = s;
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::zero(); self.rows];
        self.matvec_into(x, &mut y);
        y
    }

    /// `Tr(self * rho)` for a dense `rho`.
    pub fn trace_product(&self, rho: &CMat) -> C64 {
        assert_eq!(self.cols, rho.rows());
        assert_eq!(self.rows, rho.cols());
        self.iter().map(|(i, j, v)| v * rho[(j, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(seed: usize, n: usize, m: usize) -> CMat {
        CMat::from_fn(n, m, |i, j| {
            let k = (i * 31 + j * 17 + seed * 7) % 11;
            if k < 5 {
                C64::zero()
            } else {
                C64::new(k as f64 - 7.0, (k % 3) as f64)
            }
        })
    }

    #[test]
    fn dense_round_trip() {
        let a = sample(1, 4, 5);
        assert_eq!(CsrMat::from_dense(&a).to_dense(), a);
    }

    #[test]
    fn products_match_dense() {
        let a = sample(2, 3, 4);
        let b = sample(3, 4, 2);
        let sa = CsrMat::from_dense(&a);
        let sb = CsrMat::from_dense(&b);
        assert_eq!(sa.matmul(&sb).to_dense(), a.matmul(&b));
        assert_eq!(sa.kron(&sb).to_dense(), a.kron(&b));
        assert_eq!(sa.adjoint().to_dense(), a.adjoint());
        let x: Vec<C64> = (0..4).map(|k| C64::new(k as f64, 1.0)).collect();
        assert_eq!(sa.matvec(&x), a.matvec(&x));
    }

    #[test]
    fn duplicates_sum_and_cancellations_vanish() {
        let one = C64::new(1.0, 0.0);
        let m = CsrMat::from_triplets(2, 2, vec![(0, 1, one), (0, 1, one), (1, 0, one), (1, 0, -one)]);
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 1), C64::new(2.0, 0.0));
        assert_eq!(m.get(1, 0), C64::zero());
    }
}
