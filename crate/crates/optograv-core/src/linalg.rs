//! Small dense complex matrices.
//!
//! Sized for the 4x4 drift matrix, the 16x16 Kronecker form of the Lyapunov
//! equation and similar; nothing here is blocked or vectorised.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::Zero;
#[allow(unused_imports)] // float math without std
use num_traits::Float;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

pub const I: C64 = C64::new(0.0, 1.0);

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds from nested rows. Panics if rows are ragged.
    pub fn from_rows<const N: usize>(rows: &[[C64; N]]) -> Self {
        Self::from_fn(rows.len(), N, |i, j| rows[i][j])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (r, c) = (other.rows, other.cols);
        Self::from_fn(self.rows * r, self.cols * c, |i, j| {
            self[(i / r, j / c)] * other[(i % r, j % c)]
        })
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Column-stacked vectorisation.
    pub fn vec_cols(&self) -> Vec<C64> {
        let mut v = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                v.push(self[(i, j)]);
            }
        }
        v
    }

    /// Inverse of [`CMat::vec_cols`].
    pub fn unvec_cols(v: &[C64], rows: usize, cols: usize) -> Self {
        assert_eq!(v.len(), rows * cols);
        Self::from_fn(rows, cols, |i, j| v[j * rows + i])
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorisation with partial pivoting.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: CMat,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(a: &CMat) -> Result<Self> {
        assert!(a.is_square());
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax <= scale * 1e-14 * n as f64 {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
            }
            let piv = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / piv;
                lu[(i, k)] = f;
                if f.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let t = lu[(k, j)];
                    lu[(i, j)] -= f * t;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.rows;
        assert_eq!(b.len(), n);
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let t = self.lu[(i, j)] * x[j];
                x[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = self.lu[(i, j)] * x[j];
                x[i] -= t;
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }
}

pub fn solve(a: &CMat, b: &[C64]) -> Result<Vec<C64>> {
    Ok(Lu::new(a)?.solve(b))
}

/// Eigenvalues of a square complex matrix via Hessenberg reduction and
/// shifted QR with Givens rotations.
pub fn eigenvalues(a: &CMat) -> Result<Vec<C64>> {
    assert!(a.is_square());
    let n = a.rows;
    let mut h = a.clone();
    hessenberg_in_place(&mut h);
    let mut out = Vec::with_capacity(n);
    let mut hi = n;
    let mut iter = 0usize;
    let eps = f64::EPSILON;
    while hi > 0 {
        if hi == 1 {
            out.push(h[(0, 0)]);
            break;
        }
        let mut l = hi - 1;
        while l > 0 {
            let off = h[(l, l - 1)].norm();
            let diag = h[(l, l)].norm() + h[(l - 1, l - 1)].norm();
            if off <= eps * diag.max(f64::MIN_POSITIVE) {
                h[(l, l - 1)] = C64::zero();
                break;
            }
            l -= 1;
        }
        if l == hi - 1 {
            out.push(h[(hi - 1, hi - 1)]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > 60 * n {
            return Err(Error::NoConvergence("QR eigenvalue iteration"));
        }
        let mu = if iter % 11 == 10 {
            h[(hi - 1, hi - 1)] + C64::new(0.75 * h[(hi - 1, hi - 2)].norm(), 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 2, hi - 2)],
                h[(hi - 2, hi - 1)],
                h[(hi - 1, hi - 2)],
                h[(hi - 1, hi - 1)],
            )
        };
        qr_step(&mut h, l, hi, mu);
    }
    Ok(out)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half_tr = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (half_tr * half_tr - det).sqrt();
    let m1 = half_tr + disc;
    let m2 = half_tr - disc;
    if (m1 - d).norm() < (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

fn qr_step(h: &mut CMat, lo: usize, hi: usize, mu: C64) {
    for k in lo..hi {
        h[(k, k)] -= mu;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi - 1 {
        let x = h[(k, k)];
        let y = h[(k + 1, k)];
        let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
        let (c, s) = if r == 0.0 {
            (C64::new(1.0, 0.0), C64::zero())
        } else {
            (x / r, y / r)
        };
        for j in k..hi {
            let u = h[(k, j)];
            let v = h[(k + 1, j)];
            h[(k, j)] = c.conj() * u + s.conj() * v;
            h[(k + 1, j)] = -s * u + c * v;
        }
        rots.push((c, s));
    }
    for (idx, &(c, s)) in rots.iter().enumerate() {
        let k = lo + idx;
        for i in lo..=(k + 1).min(hi - 1) {
            let u = h[(i, k)];
            let v = h[(i, k + 1)];
            h[(i, k)] = u * c + v * s;
            h[(i, k + 1)] = -u * s.conj() + v * c.conj();
        }
    }
    for k in lo..hi {
        h[(k, k)] += mu;
    }
}

fn hessenberg_in_place(h: &mut CMat) {
    let n = h.rows;
    for k in 0..n.saturating_sub(2) {
        let norm: f64 = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        let mut v: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vn: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vn;
        }
        // H <- (I - 2vv†) H
        for j in 0..n {
            let dot: C64 = v
                .iter()
                .enumerate()
                .map(|(t, vi)| vi.conj() * h[(k + 1 + t, j)])
                .sum();
            for (t, vi) in v.iter().enumerate() {
                h[(k + 1 + t, j)] -= vi * dot * 2.0;
            }
        }
        // H <- H (I - 2vv†)
        for i in 0..n {
            let dot: C64 = v
                .iter()
                .enumerate()
                .map(|(t, vi)| h[(i, k + 1 + t)] * vi)
                .sum();
            for (t, vi) in v.iter().enumerate() {
                h[(i, k + 1 + t)] -= dot * vi.conj() * 2.0;
            }
        }
    }
}

/// Determinant via LU; zero when the matrix is numerically singular.
pub fn determinant(a: &CMat) -> C64 {
    assert!(a.is_square());
    let n = a.rows;
    let mut m = a.clone();
    let mut det = C64::new(1.0, 0.0);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[(i, k)].norm().total_cmp(&m[(j, k)].norm()))
            .unwrap_or(k);
        if m[(p, k)].is_zero() {
            return C64::zero();
        }
        if p != k {
            for j in 0..n {
                let t = m[(k, j)];
                m[(k, j)] = m[(p, j)];
                m[(p, j)] = t;
            }
            det = -det;
        }
        let piv = m[(k, k)];
        det *= piv;
        for i in k + 1..n {
            let f = m[(i, k)] / piv;
            for j in k..n {
                let t = m[(k, j)];
                m[(i, j)] -= f * t;
            }
        }
    }
    det
}
