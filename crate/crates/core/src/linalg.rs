//! Small dense linear algebra over `f64` / `Complex64`.
//!
//! Everything here targets the desk-scale matrices this crate works with
//! (phase-space matrices up to ~14x14, truncated Fock operators up to a few
//! hundred square). Eigenproblems use cyclic Jacobi sweeps, which at these
//! sizes are accurate to near machine precision and fully deterministic.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::math;

/// Dense real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl RMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RMat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = if r > 0 { rows[0].len() } else { 0 };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        RMat { rows: r, cols: c, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = RMat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = RMat::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> RMat {
        RMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &RMat) -> RMat {
        assert_eq!(self.cols, other.rows, "matmul dims");
        let mut out = RMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "matvec dims");
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            let mut acc = 0.0;
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn add(&self, other: &RMat) -> RMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a + b)
            .collect();
        RMat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &RMat) -> RMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a - b)
            .collect();
        RMat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, c: f64) -> RMat {
        RMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    /// max_{ij} |a_ij|
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        let g = self.transpose().matmul(self);
        let (evals, _) = sym_eig(&g);
        math::sqrt(evals.last().copied().unwrap_or(0.0).max(0.0))
    }

    /// Symmetric part (A + A^T)/2.
    pub fn symmetrize(&self) -> RMat {
        assert!(self.is_square());
        RMat::from_fn(self.rows, self.cols, |i, j| 0.5 * (self[(i, j)] + self[(j, i)]))
    }

    /// Antisymmetric part (A - A^T)/2.
    pub fn antisymmetrize(&self) -> RMat {
        assert!(self.is_square());
        RMat::from_fn(self.rows, self.cols, |i, j| 0.5 * (self[(i, j)] - self[(j, i)]))
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[f64]) {
        assert_eq!(v.len(), self.rows);
        for i in 0..self.rows {
            self[(i, j)] = v[i];
        }
    }

    pub fn to_complex(&self) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    /// Quadratic form x^T A y.
    pub fn quad_form(&self, x: &[f64], y: &[f64]) -> f64 {
        let ay = self.matvec(y);
        x.iter().zip(ay.iter()).map(|(a, b)| a * b).sum()
    }
}

impl core::ops::Index<(usize, usize)> for RMat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for RMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows, "matmul dims");
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let base = k * other.cols;
                let obase = i * other.cols;
                for j in 0..other.cols {
                    out.data[obase + j] += a * other.data[base + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .fold(0.0, |m, a| m.max(math::hypot(a.re, a.im)))
    }

    pub fn trace(&self) -> Complex64 {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Hermitian part (A + A^dag)/2.
    pub fn hermitize(&self) -> CMat {
        assert_eq!(self.rows, self.cols);
        CMat::from_fn(self.rows, self.cols, |i, j| {
            0.5 * (self[(i, j)] + self[(j, i)].conj())
        })
    }

    /// max |A - A^dag| entry.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = self[(i, j)] - self[(j, i)].conj();
                worst = worst.max(math::hypot(d.re, d.im));
            }
        }
        worst
    }

    /// Kronecker product, left factor on the slow index.
    pub fn kron(&self, other: &CMat) -> CMat {
        let mut out = CMat::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }
}

impl core::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigendecomposition of a real symmetric matrix by cyclic Jacobi.
///
/// Returns eigenvalues in ascending order with matching eigenvector columns.
pub fn sym_eig(a: &RMat) -> (Vec<f64>, RMat) {
    assert!(a.is_square());
    let n = a.rows;
    let mut m = a.symmetrize();
    let mut v = RMat::identity(n);
    let scale = m.max_abs().max(1.0);
    let tol = 1e-15 * scale;

    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m[(p, q)].abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + math::sqrt(1.0 + tau * tau))
                } else {
                    1.0 / (tau - math::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let s = t * c;
                // A <- G^T A G with G = I except G[p][p]=G[q][q]=c, G[p][q]=s, G[q][p]=-s
                for i in 0..n {
                    let aip = m[(i, p)];
                    let aiq = m[(i, q)];
                    m[(i, p)] = c * aip - s * aiq;
                    m[(i, q)] = s * aip + c * aiq;
                }
                for j in 0..n {
                    let apj = m[(p, j)];
                    let aqj = m[(q, j)];
                    m[(p, j)] = c * apj - s * aqj;
                    m[(q, j)] = s * apj + c * aqj;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = c * vip - s * viq;
                    v[(i, q)] = s * vip + c * viq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());
    let evals: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vecs = RMat::zeros(n, n);
    for (newj, &oldj) in order.iter().enumerate() {
        for i in 0..n {
            vecs[(i, newj)] = v[(i, oldj)];
        }
    }
    (evals, vecs)
}

/// Eigendecomposition of a complex Hermitian matrix by cyclic Jacobi.
///
/// Returns real eigenvalues in ascending order with matching eigenvector
/// columns (unitary matrix).
pub fn herm_eig(a: &CMat) -> (Vec<f64>, CMat) {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut m = a.hermitize();
    let mut v = CMat::identity(n);
    let scale = m.max_abs().max(1.0);
    let tol = 1e-15 * scale;

    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                let z = m[(p, q)];
                off = off.max(math::hypot(z.re, z.im));
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let mag = math::hypot(apq.re, apq.im);
                if mag <= tol * 1e-2 {
                    continue;
                }
                let phi = apq / mag;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + math::sqrt(1.0 + tau * tau))
                } else {
                    1.0 / (tau - math::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let s = t * c;
                // Unitary in the (p,q) plane:
                //   U[p][p] = c              U[p][q] = s
                //   U[q][p] = -s*conj(phi)   U[q][q] = c*conj(phi)
                // column update M <- M U
                let sphi = phi.conj() * s;
                let cphi = phi.conj() * c;
                for i in 0..n {
                    let mip = m[(i, p)];
                    let miq = m[(i, q)];
                    m[(i, p)] = c * mip - sphi * miq;
                    m[(i, q)] = s * mip + cphi * miq;
                }
                // row update M <- U^dag M
                for j in 0..n {
                    let mpj = m[(p, j)];
                    let mqj = m[(q, j)];
                    m[(p, j)] = c * mpj - (phi * s) * mqj;
                    m[(q, j)] = s * mpj + (phi * c) * mqj;
                }
                m[(p, q)] = Complex64::new(0.0, 0.0);
                m[(q, p)] = Complex64::new(0.0, 0.0);
                m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = c * vip - sphi * viq;
                    v[(i, q)] = s * vip + cphi * viq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());
    let evals: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (newj, &oldj) in order.iter().enumerate() {
        for i in 0..n {
            vecs[(i, newj)] = v[(i, oldj)];
        }
    }
    (evals, vecs)
}

/// LU decomposition with partial pivoting; returns None for singular input.
struct Lu {
    lu: RMat,
    piv: Vec<usize>,
    sign: f64,
}

fn lu_decompose(a: &RMat) -> Option<Lu> {
    assert!(a.is_square());
    let n = a.rows;
    let mut lu = a.clone();
    let mut piv: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    for k in 0..n {
        let mut best = k;
        let mut best_val = lu[(k, k)].abs();
        for i in (k + 1)..n {
            let v = lu[(i, k)].abs();
            if v > best_val {
                best = i;
                best_val = v;
            }
        }
        if best_val == 0.0 {
            return None;
        }
        if best != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(best, j)];
                lu[(best, j)] = tmp;
            }
            piv.swap(k, best);
            sign = -sign;
        }
        let pivot = lu[(k, k)];
        for i in (k + 1)..n {
            let f = lu[(i, k)] / pivot;
            lu[(i, k)] = f;
            for j in (k + 1)..n {
                let v = lu[(k, j)];
                lu[(i, j)] -= f * v;
            }
        }
    }
    Some(Lu { lu, piv, sign })
}

/// Determinant via LU.
pub fn det(a: &RMat) -> f64 {
    match lu_decompose(a) {
        None => 0.0,
        Some(f) => {
            let mut d = f.sign;
            for i in 0..a.rows {
                d *= f.lu[(i, i)];
            }
            d
        }
    }
}

/// Matrix inverse via LU; None for singular input.
pub fn inverse(a: &RMat) -> Option<RMat> {
    let n = a.rows;
    let f = lu_decompose(a)?;
    let mut inv = RMat::zeros(n, n);
    let mut col = vec![0.0; n];
    for j in 0..n {
        for (i, c) in col.iter_mut().enumerate() {
            *c = if f.piv[i] == j { 1.0 } else { 0.0 };
        }
        // forward substitution (unit lower)
        for i in 0..n {
            for k in 0..i {
                let v = f.lu[(i, k)] * col[k];
                col[i] -= v;
            }
        }
        // back substitution
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let v = f.lu[(i, k)] * col[k];
                col[i] -= v;
            }
            col[i] /= f.lu[(i, i)];
        }
        for i in 0..n {
            inv[(i, j)] = col[i];
        }
    }
    Some(inv)
}

/// Moore-Penrose pseudoinverse with relative rank cutoff `rel_tol` on the
/// singular values.
///
/// The singular triplets come from the symmetric Jordan-Wielandt embedding
/// [[0, A], [A^T, 0]], whose eigenvalues are +/- the singular values; unlike
/// the Gram-matrix route this does not square the condition number.
pub fn pinv(a: &RMat, rel_tol: f64) -> RMat {
    let (p, q) = (a.rows, a.cols);
    if p == 0 || q == 0 {
        return RMat::zeros(q, p);
    }
    let n = p + q;
    let mut b = RMat::zeros(n, n);
    for i in 0..p {
        for j in 0..q {
            b[(i, p + j)] = a[(i, j)];
            b[(p + j, i)] = a[(i, j)];
        }
    }
    let (evals, vecs) = sym_eig(&b);
    let sig_max = evals.last().copied().unwrap_or(0.0).max(0.0);
    if sig_max == 0.0 {
        return RMat::zeros(q, p);
    }
    let cutoff = sig_max * rel_tol;
    let mut out = RMat::zeros(q, p);
    for idx in 0..n {
        let sigma = evals[idx];
        if sigma <= cutoff {
            continue;
        }
        // unit eigenvector (u; v)/sqrt(2) with A v = sigma u
        let w = vecs.column(idx);
        for r in 0..q {
            let vr = 2.0 * w[p + r] / sigma;
            if vr == 0.0 {
                continue;
            }
            for c in 0..p {
                out[(r, c)] += vr * w[c];
            }
        }
    }
    out
}

/// Symmetric PSD square root via eigendecomposition (negative eigenvalues
/// are clamped to zero).
pub fn sqrtm_psd(a: &RMat) -> RMat {
    let (evals, v) = sym_eig(a);
    let n = a.rows;
    let mut out = RMat::zeros(n, n);
    for j in 0..n {
        let lam = evals[j].max(0.0);
        let s = math::sqrt(lam);
        if s == 0.0 {
            continue;
        }
        let vj = v.column(j);
        for r in 0..n {
            for c in 0..n {
                out[(r, c)] += s * vj[r] * vj[c];
            }
        }
    }
    out
}

/// Complex matrix exponential by scaling and squaring with a Taylor core.
pub fn expm(a: &CMat) -> CMat {
    assert_eq!(a.rows, a.cols);
    let norm = a.max_abs() * a.rows as f64;
    let mut squarings = 0u32;
    let mut scale = 1.0f64;
    while norm * scale > 0.5 && squarings < 40 {
        scale *= 0.5;
        squarings += 1;
    }
    let b = a.scale(Complex64::new(scale, 0.0));
    let n = a.rows;
    let mut term = CMat::identity(n);
    let mut sum = CMat::identity(n);
    for k in 1..=18 {
        term = term.matmul(&b).scale(Complex64::new(1.0 / k as f64, 0.0));
        sum = sum.add(&term);
        if term.max_abs() < 1e-18 {
            break;
        }
    }
    let mut result = sum;
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    result
}
