//! Small dense symmetric eigensolver and deterministic vector kernels.
//!
//! The eigensolver is the EISPACK `tred2`/`tql2` pair: Householder reduction
//! to tridiagonal form followed by implicit QL with Wilkinson-style shifts.
//! Storage is column-major so the inner loops of both stages run over
//! contiguous memory.
//!
//! Reductions over long vectors are split into fixed-size chunks whose
//! partial sums are added in index order, so results do not depend on the
//! number of rayon threads.

use rayon::prelude::*;

use crate::{Error, Real, Result};

const CHUNK: usize = 1 << 14;

/// Square matrix stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> SymMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        SymMatrix { n, data: vec![T::zero(); n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(n);
        for j in 0..n {
            for i in 0..n {
                m.data[j * n + i] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[j * self.n + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[j * self.n + i] = v;
    }

    pub fn column(&self, j: usize) -> &[T] {
        &self.data[j * self.n..(j + 1) * self.n]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|j| (0..j).all(|i| self.get(i, j) == self.get(j, i)))
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.n];
        for (j, &xj) in x.iter().enumerate() {
            if xj != T::zero() {
                for (yi, &a) in y.iter_mut().zip(self.column(j)) {
                    *yi = *yi + a * xj;
                }
            }
        }
        y
    }
}

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen<T> {
    /// Ascending.
    pub values: Vec<T>,
    /// Column `k` is the unit eigenvector of `values[k]`; absent when only
    /// eigenvalues were requested.
    pub vectors: Option<SymMatrix<T>>,
}

/// Diagonalizes `a` (only its lower triangle is read).
pub fn sym_eigen<T: Real>(a: &SymMatrix<T>, want_vectors: bool) -> Result<SymEigen<T>> {
    let n = a.n;
    if n == 0 {
        return Ok(SymEigen { values: Vec::new(), vectors: want_vectors.then(|| SymMatrix::zeros(0)) });
    }
    let mut v = a.clone();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tridiagonalize(&mut v, &mut d, &mut e, want_vectors);
    tql2(&mut v, &mut d, &mut e, want_vectors)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&k| d[k]).collect();
    let vectors = want_vectors.then(|| {
        let mut out = SymMatrix::zeros(n);
        for (dst, &src) in order.iter().enumerate() {
            out.data[dst * n..(dst + 1) * n].copy_from_slice(v.column(src));
        }
        out
    });
    Ok(SymEigen { values, vectors })
}

// Column-major `v[(i, j)] = v.data[j*n + i]`. The original algorithm indexes
// `V[i][j]`; here `at(v, i, j)` plays that role.
#[inline(always)]
fn at<T: Real>(v: &SymMatrix<T>, i: usize, j: usize) -> T {
    v.data[j * v.n + i]
}

#[inline(always)]
fn put<T: Real>(v: &mut SymMatrix<T>, i: usize, j: usize, x: T) {
    let n = v.n;
    v.data[j * n + i] = x;
}

fn tridiagonalize<T: Real>(v: &mut SymMatrix<T>, d: &mut [T], e: &mut [T], accumulate: bool) {
    let n = v.n;
    let zero = T::zero();
    for j in 0..n {
        d[j] = at(v, n - 1, j);
    }

    for i in (1..n).rev() {
        let mut scale = zero;
        let mut h = zero;
        for k in 0..i {
            scale = scale + d[k].abs();
        }
        if scale == zero {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = at(v, i - 1, j);
                put(v, i, j, zero);
                put(v, j, i, zero);
            }
        } else {
            for k in 0..i {
                d[k] = d[k] / scale;
                h = h + d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > zero {
                g = -g;
            }
            e[i] = scale * g;
            h = h - f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = zero;
            }

            for j in 0..i {
                f = d[j];
                put(v, j, i, f);
                g = e[j] + at(v, j, j) * f;
                let col = &v.data[j * n..j * n + i];
                for k in j + 1..i {
                    g = g + col[k] * d[k];
                    e[k] = e[k] + col[k] * f;
                }
                e[j] = g;
            }
            f = zero;
            for j in 0..i {
                e[j] = e[j] / h;
                f = f + e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] = e[j] - hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                let col = &mut v.data[j * n..j * n + i];
                for k in j..i {
                    col[k] = col[k] - (f * e[k] + g * d[k]);
                }
                d[j] = at(v, i - 1, j);
                put(v, i, j, zero);
            }
        }
        d[i] = h;
    }

    if !accumulate {
        for j in 0..n {
            d[j] = at(v, j, j);
        }
        e[0] = zero;
        return;
    }

    for i in 0..n - 1 {
        let vii = at(v, i, i);
        put(v, n - 1, i, vii);
        put(v, i, i, T::one());
        let h = d[i + 1];
        if h != zero {
            for k in 0..=i {
                d[k] = at(v, k, i + 1) / h;
            }
            for j in 0..=i {
                let mut g = zero;
                for k in 0..=i {
                    g = g + at(v, k, i + 1) * at(v, k, j);
                }
                let col = &mut v.data[j * n..j * n + i + 1];
                for k in 0..=i {
                    col[k] = col[k] - g * d[k];
                }
            }
        }
        for k in 0..=i {
            put(v, k, i + 1, zero);
        }
    }
    for j in 0..n {
        d[j] = at(v, n - 1, j);
        put(v, n - 1, j, zero);
    }
    put(v, n - 1, n - 1, T::one());
    e[0] = zero;
}

fn tql2<T: Real>(v: &mut SymMatrix<T>, d: &mut [T], e: &mut [T], vectors: bool) -> Result<()> {
    let n = v.n;
    let zero = T::zero();
    let two = T::of(2.0);
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = zero;

    let mut f = zero;
    let mut tst1 = zero;
    let eps = T::epsilon();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        // e[n-1] == 0 always terminates the scan.
        let m = m.min(n - 1);

        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::Convergence {
                        iterations: iter,
                        best_residual: e[l].abs().to_f64().unwrap_or(f64::NAN),
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < zero {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di = *di - h;
                }
                f = f + h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = zero;
                let mut s2 = zero;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if vectors {
                        let (lo, hi) = v.data.split_at_mut((i + 1) * n);
                        let ci = &mut lo[i * n..];
                        let ci1 = &mut hi[..n];
                        for (a, b) in ci.iter_mut().zip(ci1.iter_mut()) {
                            let hk = *b;
                            *b = s * *a + c * hk;
                            *a = c * *a - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] = d[l] + f;
        e[l] = zero;
    }
    Ok(())
}

/// Chunked dot product with an order-fixed reduction.
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    if a.len() <= CHUNK {
        return dot_serial(a, b);
    }
    let partial: Vec<T> = a.par_chunks(CHUNK).zip(b.par_chunks(CHUNK)).map(|(x, y)| dot_serial(x, y)).collect();
    partial.into_iter().fold(T::zero(), |acc, x| acc + x)
}

fn dot_serial<T: Real>(a: &[T], b: &[T]) -> T {
    // Four accumulators; the combination order is fixed.
    let mut acc = [T::zero(); 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        acc[0] = acc[0] + x[0] * y[0];
        acc[1] = acc[1] + x[1] * y[1];
        acc[2] = acc[2] + x[2] * y[2];
        acc[3] = acc[3] + x[3] * y[3];
    }
    let mut tail = T::zero();
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        tail = tail + *x * *y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// One classical Gram-Schmidt pass of `w` against orthonormal `basis`.
///
/// Coefficients are accumulated chunk by chunk (each chunk of `w` stays in
/// cache while every basis vector streams past) and reduced in chunk order.
pub fn project_out<T: Real>(basis: &[Vec<T>], w: &mut [T]) -> Vec<T> {
    let k = basis.len();
    let partial: Vec<Vec<T>> = w
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(c, wc)| {
            let lo = c * CHUNK;
            basis.iter().map(|b| dot_serial(&b[lo..lo + wc.len()], wc)).collect()
        })
        .collect();
    let mut coeffs = vec![T::zero(); k];
    for p in &partial {
        for (acc, &x) in coeffs.iter_mut().zip(p) {
            *acc = *acc + x;
        }
    }
    w.par_chunks_mut(CHUNK).enumerate().for_each(|(c, wc)| {
        let lo = c * CHUNK;
        let hi = lo + wc.len();
        for (b, &ci) in basis.iter().zip(&coeffs) {
            for (x, &y) in wc.iter_mut().zip(&b[lo..hi]) {
                *x = *x - ci * y;
            }
        }
    });
    coeffs
}

/// `out[j] = Σ_i coeffs[j][i] basis[i]` for several coefficient sets at once.
pub fn combine_many<T: Real>(basis: &[Vec<T>], coeffs: &[Vec<T>]) -> Vec<Vec<T>> {
    let dim = basis.first().map_or(0, Vec::len);
    let mut out = vec![vec![T::zero(); dim]; coeffs.len()];
    let n_chunks = dim.div_ceil(CHUNK);
    let pieces: Vec<Vec<Vec<T>>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(dim);
            coeffs
                .iter()
                .map(|cs| {
                    let mut acc = vec![T::zero(); hi - lo];
                    for (b, &ci) in basis.iter().zip(cs) {
                        for (a, &y) in acc.iter_mut().zip(&b[lo..hi]) {
                            *a = *a + ci * y;
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    for (c, piece) in pieces.into_iter().enumerate() {
        for (o, p) in out.iter_mut().zip(piece) {
            o[c * CHUNK..c * CHUNK + p.len()].copy_from_slice(&p);
        }
    }
    out
}

pub fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// `y += alpha * x`.
pub fn axpy<T: Real>(alpha: T, x: &[T], y: &mut [T]) {
    if y.len() <= CHUNK {
        y.iter_mut().zip(x).for_each(|(yi, &xi)| *yi = *yi + alpha * xi);
    } else {
        y.par_chunks_mut(CHUNK)
            .zip(x.par_chunks(CHUNK))
            .for_each(|(yc, xc)| yc.iter_mut().zip(xc).for_each(|(yi, &xi)| *yi = *yi + alpha * xi));
    }
}

pub fn scale<T: Real>(alpha: T, x: &mut [T]) {
    if x.len() <= CHUNK {
        x.iter_mut().for_each(|v| *v = *v * alpha);
    } else {
        x.par_chunks_mut(CHUNK).for_each(|c| c.iter_mut().for_each(|v| *v = *v * alpha));
    }
}
