//! Symplectic and skew-symmetric real linear algebra.
//!
//! Houses the standard symplectic form, the CP obstruction matrix
//! `J(X) = Omega - X^T Omega X`, the canonical decomposition of skew
//! matrices, its invertible factorization `J = Y^T Omega Y`, symplectic
//! completion of isometric column pairs, and Hermitian PSD tests.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::linalg::{self, CMat, RMat};
use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub enum PhaseSpaceError {
    DimensionMismatch(String),
    NotSkew { defect: f64 },
    NotSymmetric { defect: f64 },
    NotHermitian { defect: f64 },
    SingularJ { min_d: f64 },
    PairNotIsometric { residual: f64 },
}

impl core::fmt::Display for PhaseSpaceError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PhaseSpaceError::DimensionMismatch(s) => write!(f, "dimension mismatch: {s}"),
            PhaseSpaceError::NotSkew { defect } => {
                write!(f, "matrix is not skew-symmetric (defect {defect:.3e})")
            }
            PhaseSpaceError::NotSymmetric { defect } => {
                write!(f, "matrix is not symmetric (defect {defect:.3e})")
            }
            PhaseSpaceError::NotHermitian { defect } => {
                write!(f, "matrix is not Hermitian (defect {defect:.3e})")
            }
            PhaseSpaceError::SingularJ { min_d } => write!(
                f,
                "J(X) is singular (smallest canonical coefficient {min_d:.3e})"
            ),
            PhaseSpaceError::PairNotIsometric { residual } => write!(
                f,
                "X^T Omega X + Y^T Omega Y - Omega has residual {residual:.3e}"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for PhaseSpaceError {}

/// The standard symplectic form on `n` modes: block-diagonal copies of
/// [[0,1],[-1,0]].
pub fn omega(n: usize) -> RMat {
    assert!(n >= 1, "mode count must be positive");
    let mut m = RMat::zeros(2 * n, 2 * n);
    for j in 0..n {
        m[(2 * j, 2 * j + 1)] = 1.0;
        m[(2 * j + 1, 2 * j)] = -1.0;
    }
    m
}

/// The standard symplectic form together with its mode count.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    pub n: usize,
    pub matrix: RMat,
}

impl SymplecticForm {
    pub fn new(n: usize) -> Self {
        SymplecticForm { n, matrix: omega(n) }
    }
}

/// Mode count from a 2n x 2n matrix.
fn modes_of(m: &RMat) -> Result<usize, PhaseSpaceError> {
    if !m.is_square() || m.rows % 2 != 0 || m.rows == 0 {
        return Err(PhaseSpaceError::DimensionMismatch(format!(
            "expected square matrix of even dimension, got {}x{}",
            m.rows, m.cols
        )));
    }
    Ok(m.rows / 2)
}

/// J(X) = Omega - X^T Omega X, symmetrized against round-off so the result
/// is exactly skew.
pub fn j_of_x(x: &RMat) -> Result<RMat, PhaseSpaceError> {
    let n = modes_of(x)?;
    let om = omega(n);
    let j = om.sub(&x.transpose().matmul(&om).matmul(x));
    Ok(j.antisymmetrize())
}

/// Canonical form of a real skew matrix: A = O^T (directsum [[0,d_j],[-d_j,0]]) O
/// with O orthogonal and d_1 >= d_2 >= ... >= 0.
#[derive(Debug, Clone)]
pub struct SkewCanonicalForm {
    pub o: RMat,
    pub d: Vec<f64>,
}

impl SkewCanonicalForm {
    /// The block-diagonal middle factor.
    pub fn block_matrix(&self) -> RMat {
        let n = self.d.len();
        let mut m = RMat::zeros(2 * n, 2 * n);
        for (j, &dj) in self.d.iter().enumerate() {
            m[(2 * j, 2 * j + 1)] = dj;
            m[(2 * j + 1, 2 * j)] = -dj;
        }
        m
    }

    /// O^T block O, which must reproduce the input.
    pub fn reconstruct(&self) -> RMat {
        self.o.transpose().matmul(&self.block_matrix()).matmul(&self.o)
    }
}

/// Gram-Schmidt a set of vectors against an existing orthonormal list,
/// appending the survivors.
fn gram_schmidt_append(basis: &mut Vec<Vec<f64>>, candidates: &[Vec<f64>], dim: usize) {
    for cand in candidates {
        let mut v = cand.clone();
        for b in basis.iter() {
            let dot: f64 = b.iter().zip(v.iter()).map(|(a, c)| a * c).sum();
            for (vi, bi) in v.iter_mut().zip(b.iter()) {
                *vi -= dot * bi;
            }
        }
        let norm = math::sqrt(v.iter().map(|x| x * x).sum::<f64>());
        if norm > 1e-8 {
            for x in v.iter_mut() {
                *x /= norm;
            }
            basis.push(v);
        }
        if basis.len() == dim {
            break;
        }
    }
}

/// Skew canonical decomposition through the Hermitian eigenproblem of iA.
///
/// The d_j are the nonnegative imaginary parts of A's eigenvalue pairs,
/// sorted descending; zero pairs (the kernel) come last.
pub fn skew_canonical(a: &RMat, tol: f64) -> Result<SkewCanonicalForm, PhaseSpaceError> {
    let n = modes_of(a)?;
    let defect = a.add(&a.transpose()).max_abs();
    if defect > tol {
        return Err(PhaseSpaceError::NotSkew { defect });
    }
    let askew = a.antisymmetrize();
    let dim = 2 * n;

    // H = i*A is Hermitian; eigenpairs come as (+d, z), (-d, conj z).
    let h = CMat::from_fn(dim, dim, |i, j| Complex64::new(0.0, askew[(i, j)]));
    let (evals, vecs) = linalg::herm_eig(&h);

    let scale = askew.max_abs().max(1.0);
    let zero_thresh = 1e-12 * scale;

    // Positive eigenvalues, descending.
    let mut pos: Vec<(f64, usize)> = evals
        .iter()
        .enumerate()
        .filter(|(_, &lam)| lam > zero_thresh)
        .map(|(idx, &lam)| (lam, idx))
        .collect();
    pos.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

    let mut d = Vec::with_capacity(n);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(dim);
    for &(lam, idx) in pos.iter() {
        d.push(lam);
        // z = u + i w with ||u|| = ||w|| = 1/sqrt(2); block basis (w, u).
        let mut u: Vec<f64> = (0..dim).map(|i| vecs[(i, idx)].re).collect();
        let mut w: Vec<f64> = (0..dim).map(|i| vecs[(i, idx)].im).collect();
        let nu = math::sqrt(u.iter().map(|x| x * x).sum::<f64>());
        let nw = math::sqrt(w.iter().map(|x| x * x).sum::<f64>());
        for x in u.iter_mut() {
            *x /= nu;
        }
        for x in w.iter_mut() {
            *x /= nw;
        }
        rows.push(w);
        rows.push(u);
    }

    // Kernel pairs: orthonormal real basis of the zero eigenspace.
    let k = n - d.len();
    if k > 0 {
        let mut kernel: Vec<Vec<f64>> = Vec::new();
        let mut candidates: Vec<Vec<f64>> = Vec::new();
        for (idx, &lam) in evals.iter().enumerate() {
            if lam.abs() <= zero_thresh {
                candidates.push((0..dim).map(|i| vecs[(i, idx)].re).collect());
                candidates.push((0..dim).map(|i| vecs[(i, idx)].im).collect());
            }
        }
        gram_schmidt_append(&mut kernel, &candidates, 2 * k);
        if kernel.len() < 2 * k {
            // fall back on the standard basis for any remaining directions
            let mut full = rows.clone();
            full.extend(kernel.iter().cloned());
            let std_basis: Vec<Vec<f64>> = (0..dim)
                .map(|i| {
                    let mut e = alloc::vec![0.0; dim];
                    e[i] = 1.0;
                    e
                })
                .collect();
            gram_schmidt_append(&mut full, &std_basis, dim);
            kernel = full.split_off(rows.len());
        }
        for pair in kernel.chunks(2) {
            d.push(0.0);
            rows.push(pair[0].clone());
            rows.push(pair[1].clone());
        }
    }

    let mut o = RMat::zeros(dim, dim);
    for (r, row) in rows.iter().enumerate() {
        for (c, &val) in row.iter().enumerate() {
            o[(r, c)] = val;
        }
    }
    Ok(SkewCanonicalForm { o, d })
}

/// For invertible skew J, a real invertible Y with Y^T Omega Y = J,
/// built as (directsum sqrt(d_j) I_2) O from the canonical form.
pub fn factor_skew_invertible(j: &RMat, tol_rank: f64) -> Result<RMat, PhaseSpaceError> {
    let form = skew_canonical(j, 1e-9 * j.max_abs().max(1.0))?;
    let min_d = form.d.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min_d > tol_rank) {
        return Err(PhaseSpaceError::SingularJ { min_d });
    }
    let n = form.d.len();
    let mut scalemat = RMat::zeros(2 * n, 2 * n);
    for (idx, &dj) in form.d.iter().enumerate() {
        let s = math::sqrt(dj);
        scalemat[(2 * idx, 2 * idx)] = s;
        scalemat[(2 * idx + 1, 2 * idx + 1)] = s;
    }
    Ok(scalemat.matmul(&form.o))
}

/// Moore-Penrose pseudoinverse.
pub fn moore_penrose(y: &RMat) -> RMat {
    linalg::pinv(y, 1e-12)
}

/// A symplectic matrix S on n+m modes whose first 2n columns are the stacked
/// pair [X; Y].
#[derive(Debug, Clone)]
pub struct SymplecticCompletion {
    pub s: RMat,
    pub first_columns: RMat,
}

/// Extend the isometric pair (X: 2n x 2n, Y: 2m x 2n) satisfying
/// X^T Omega X + Y^T Omega Y = Omega to a full symplectic matrix by
/// symplectic Gram-Schmidt over standard basis candidates.
pub fn symplectic_complete(
    x: &RMat,
    y: &RMat,
    tol: f64,
) -> Result<SymplecticCompletion, PhaseSpaceError> {
    let n = modes_of(x)?;
    if y.cols != 2 * n || y.rows % 2 != 0 {
        return Err(PhaseSpaceError::DimensionMismatch(format!(
            "Y must be 2m x {}, got {}x{}",
            2 * n,
            y.rows,
            y.cols
        )));
    }
    let m = y.rows / 2;

    let om_n = omega(n);
    let gram = {
        let mut g = x.transpose().matmul(&om_n).matmul(x);
        if m > 0 {
            let om_m = omega(m);
            g = g.add(&y.transpose().matmul(&om_m).matmul(y));
        }
        g
    };
    let residual = gram.sub(&om_n).max_abs();
    if residual > tol {
        return Err(PhaseSpaceError::PairNotIsometric { residual });
    }

    let dim = 2 * (n + m);
    let mut first = RMat::zeros(dim, 2 * n);
    for c in 0..2 * n {
        for r in 0..2 * n {
            first[(r, c)] = x[(r, c)];
        }
        for r in 0..2 * m {
            first[(2 * n + r, c)] = y[(r, c)];
        }
    }

    let big_om = omega(n + m);
    let mut pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..n)
        .map(|j| (first.column(2 * j), first.column(2 * j + 1)))
        .collect();

    if m > 0 {
        // The added columns must span the symplectic complement
        // W = ker(C^T Omega). An orthonormal kernel basis together with the
        // skew canonical form of the restricted symplectic form yields pairs
        // that are Euclidean-orthogonal with balanced norms 1/sqrt(d_j) --
        // the best-conditioned completion the complement admits, which keeps
        // downstream Fock truncation of the completed unitary mild.
        let m_form = first.transpose().matmul(&big_om); // 2n x dim
        let gram = m_form.transpose().matmul(&m_form);
        let (evals, vecs) = linalg::sym_eig(&gram);
        let scale = evals.last().copied().unwrap_or(1.0).max(1.0);
        let mut kernel = RMat::zeros(dim, 2 * m);
        let mut found = 0usize;
        for (idx, &lam) in evals.iter().enumerate() {
            if lam <= 1e-12 * scale {
                if found == 2 * m {
                    return Err(PhaseSpaceError::PairNotIsometric { residual });
                }
                let col = vecs.column(idx);
                for r in 0..dim {
                    kernel[(r, found)] = col[r];
                }
                found += 1;
            }
        }
        if found != 2 * m {
            return Err(PhaseSpaceError::PairNotIsometric { residual });
        }
        let restricted = kernel
            .transpose()
            .matmul(&big_om)
            .matmul(&kernel)
            .antisymmetrize();
        let form = skew_canonical(&restricted, 1e-9)?;
        for j in 0..m {
            let inv_sqrt = 1.0 / math::sqrt(form.d[j].max(1e-300));
            let mut u_new = alloc::vec![0.0; dim];
            let mut v_new = alloc::vec![0.0; dim];
            for r in 0..dim {
                for c in 0..2 * m {
                    u_new[r] += kernel[(r, c)] * form.o[(2 * j, c)] * inv_sqrt;
                    v_new[r] += kernel[(r, c)] * form.o[(2 * j + 1, c)] * inv_sqrt;
                }
            }
            pairs.push((u_new, v_new));
        }
    }

    let mut s = RMat::zeros(dim, dim);
    for c in 0..2 * n {
        for r in 0..dim {
            s[(r, c)] = first[(r, c)];
        }
    }
    for (j, (u, v)) in pairs.iter().enumerate().skip(n) {
        s.set_column(2 * j, u);
        s.set_column(2 * j + 1, v);
    }
    Ok(SymplecticCompletion {
        s,
        first_columns: first,
    })
}

/// Smallest eigenvalue of the Hermitian part of M; errors when M is not
/// Hermitian within `tol`.
pub fn min_eig_hermitian(m: &CMat, tol: f64) -> Result<f64, PhaseSpaceError> {
    if m.rows != m.cols {
        return Err(PhaseSpaceError::DimensionMismatch(format!(
            "expected square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    let defect = m.hermiticity_defect();
    if defect > tol {
        return Err(PhaseSpaceError::NotHermitian { defect });
    }
    let (evals, _) = linalg::herm_eig(&m.hermitize());
    Ok(evals[0])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeisenbergReport {
    pub pass: bool,
    pub min_eig: f64,
}

/// Physicality of a covariance matrix: V + i Omega >= 0.
pub fn heisenberg_check(v: &RMat, tol: f64) -> Result<HeisenbergReport, PhaseSpaceError> {
    let n = modes_of(v)?;
    let defect = v.sub(&v.transpose()).max_abs();
    if defect > tol.max(1e-9) {
        return Err(PhaseSpaceError::NotSymmetric { defect });
    }
    let om = omega(n);
    let m = CMat::from_fn(2 * n, 2 * n, |i, j| Complex64::new(v[(i, j)], om[(i, j)]));
    let min_eig = min_eig_hermitian(&m, 1e-9)?;
    Ok(HeisenbergReport {
        pass: min_eig >= -tol,
        min_eig,
    })
}
