//! Characteristic-function trees and A-positivity certification.
//!
//! A `CharFn` evaluates a point of R^{2p} to a complex value. The node kinds
//! cover everything the dilation constructions produce: Gaussian kernels,
//! cosines, discrete displacement mixtures, products and linear pull-backs.
//! Certification of A-positivity samples twisted Gram matrices
//! `f(xi_mu - xi_nu) e^{(i/2) xi_mu^T A xi_nu}` over seeded point sets; for
//! Gaussian kernels the exact test `M + iA >= 0` is available as well.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::linalg::{CMat, RMat};
use crate::math::{self, Rng};
use crate::phase_space::{self, omega};

#[derive(Debug, Clone, PartialEq)]
pub enum CharFnError {
    DimensionMismatch(String),
    InvalidNode(String),
}

impl core::fmt::Display for CharFnError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CharFnError::DimensionMismatch(s) => write!(f, "dimension mismatch: {s}"),
            CharFnError::InvalidNode(s) => write!(f, "invalid node: {s}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CharFnError {}

/// Expression tree for characteristic functions.
///
/// Every node kind evaluates to 1 at the origin.
#[derive(Debug, Clone, PartialEq)]
pub enum CharFn {
    /// Constant 1 (matches any dimension).
    One,
    /// exp(-1/4 xi^T M xi + i b^T xi), M real symmetric.
    GaussianKernel { m: RMat, b: Vec<f64> },
    /// cos(s^T Omega xi).
    Cosine { s: Vec<f64> },
    /// sum_j w_j exp(i xi^T Omega s_j), w_j > 0 summing to 1.
    DisplacementMixture {
        weights: Vec<f64>,
        points: Vec<Vec<f64>>,
    },
    /// Pointwise product of the children.
    Product(Vec<CharFn>),
    /// inner(L xi).
    PullBack { inner: Box<CharFn>, l: RMat },
}

impl CharFn {
    pub fn gaussian(m: RMat, b: Vec<f64>) -> Result<CharFn, CharFnError> {
        if !m.is_square() || m.rows != b.len() {
            return Err(CharFnError::DimensionMismatch(format!(
                "kernel {}x{} with b of length {}",
                m.rows,
                m.cols,
                b.len()
            )));
        }
        let defect = m.sub(&m.transpose()).max_abs();
        if defect > 1e-9 * m.max_abs().max(1.0) {
            return Err(CharFnError::InvalidNode(format!(
                "Gaussian kernel must be symmetric (defect {defect:.3e})"
            )));
        }
        Ok(CharFn::GaussianKernel {
            m: m.symmetrize(),
            b,
        })
    }

    /// State-form Gaussian: exp(-1/4 xi^T Omega^T V Omega xi + i s^T Omega xi),
    /// stored in kernel form with M = Omega^T V Omega and b = Omega^T s.
    pub fn gaussian_state(v: &RMat, s: &[f64]) -> Result<CharFn, CharFnError> {
        if !v.is_square() || v.rows % 2 != 0 || v.rows != s.len() {
            return Err(CharFnError::DimensionMismatch(format!(
                "covariance {}x{} with mean of length {}",
                v.rows,
                v.cols,
                s.len()
            )));
        }
        let om = omega(v.rows / 2);
        let m = om.transpose().matmul(v).matmul(&om);
        let b = om.transpose().matvec(s);
        CharFn::gaussian(m, b)
    }

    pub fn cosine(s: Vec<f64>) -> Result<CharFn, CharFnError> {
        if s.len() % 2 != 0 || s.is_empty() {
            return Err(CharFnError::DimensionMismatch(
                "cosine vector must have even positive length".into(),
            ));
        }
        Ok(CharFn::Cosine { s })
    }

    pub fn mixture(weights: Vec<f64>, points: Vec<Vec<f64>>) -> Result<CharFn, CharFnError> {
        if weights.is_empty() || weights.len() != points.len() {
            return Err(CharFnError::InvalidNode(
                "mixture needs matching nonempty weights and points".into(),
            ));
        }
        if weights.iter().any(|&w| w <= 0.0) {
            return Err(CharFnError::InvalidNode(
                "mixture weights must be positive".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(CharFnError::InvalidNode(format!(
                "mixture weights must sum to 1 (got {total})"
            )));
        }
        let dim = points[0].len();
        if dim == 0 || dim % 2 != 0 || points.iter().any(|p| p.len() != dim) {
            return Err(CharFnError::DimensionMismatch(
                "mixture points must share an even positive dimension".into(),
            ));
        }
        Ok(CharFn::DisplacementMixture { weights, points })
    }

    pub fn product(children: Vec<CharFn>) -> CharFn {
        CharFn::Product(children)
    }

    pub fn pullback(inner: CharFn, l: RMat) -> CharFn {
        CharFn::PullBack {
            inner: Box::new(inner),
            l,
        }
    }

    /// Pure phase e^{i s^T Omega xi}, as a single-point mixture.
    pub fn phase(s: &[f64]) -> CharFn {
        CharFn::DisplacementMixture {
            weights: vec![1.0],
            points: vec![s.iter().map(|x| -x).collect()],
        }
    }

    /// Dimension of the argument, None when any dimension is accepted.
    pub fn arity(&self) -> Option<usize> {
        match self {
            CharFn::One => None,
            CharFn::GaussianKernel { m, .. } => Some(m.rows),
            CharFn::Cosine { s } => Some(s.len()),
            CharFn::DisplacementMixture { points, .. } => points.first().map(|p| p.len()),
            CharFn::Product(children) => children.iter().find_map(|c| c.arity()),
            CharFn::PullBack { l, .. } => Some(l.cols),
        }
    }

    pub fn eval(&self, xi: &[f64]) -> Result<Complex64, CharFnError> {
        match self {
            CharFn::One => Ok(Complex64::new(1.0, 0.0)),
            CharFn::GaussianKernel { m, b } => {
                if xi.len() != m.rows {
                    return Err(CharFnError::DimensionMismatch(format!(
                        "Gaussian kernel dimension {} vs point {}",
                        m.rows,
                        xi.len()
                    )));
                }
                let quad = m.quad_form(xi, xi);
                let ph: f64 = b.iter().zip(xi.iter()).map(|(a, x)| a * x).sum();
                Ok(math::exp(-0.25 * quad) * math::cis(ph))
            }
            CharFn::Cosine { s } => {
                if xi.len() != s.len() {
                    return Err(CharFnError::DimensionMismatch(format!(
                        "cosine dimension {} vs point {}",
                        s.len(),
                        xi.len()
                    )));
                }
                Ok(Complex64::new(
                    math::cos(symplectic_form_product(s, xi)),
                    0.0,
                ))
            }
            CharFn::DisplacementMixture { weights, points } => {
                let mut acc = Complex64::new(0.0, 0.0);
                for (w, p) in weights.iter().zip(points.iter()) {
                    if xi.len() != p.len() {
                        return Err(CharFnError::DimensionMismatch(format!(
                            "mixture point dimension {} vs point {}",
                            p.len(),
                            xi.len()
                        )));
                    }
                    acc += *w * math::cis(symplectic_form_product(xi, p));
                }
                Ok(acc)
            }
            CharFn::Product(children) => {
                let mut acc = Complex64::new(1.0, 0.0);
                for c in children {
                    acc *= c.eval(xi)?;
                }
                Ok(acc)
            }
            CharFn::PullBack { inner, l } => {
                if xi.len() != l.cols {
                    return Err(CharFnError::DimensionMismatch(format!(
                        "pullback expects dimension {}, got {}",
                        l.cols,
                        xi.len()
                    )));
                }
                inner.eval(&l.matvec(xi))
            }
        }
    }
}

/// a^T Omega b for vectors of even length.
pub fn symplectic_form_product(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for j in 0..a.len() / 2 {
        acc += a[2 * j] * b[2 * j + 1] - a[2 * j + 1] * b[2 * j];
    }
    acc
}

/// Twisted Gram matrix: entry (mu, nu) = f(xi_mu - xi_nu) e^{(i/2) xi_mu^T A xi_nu}.
pub fn gram_matrix(f: &CharFn, a: &RMat, points: &[Vec<f64>]) -> Result<CMat, CharFnError> {
    let n = points.len();
    let mut g = CMat::zeros(n, n);
    for mu in 0..n {
        for nu in 0..n {
            let diff: Vec<f64> = points[mu]
                .iter()
                .zip(points[nu].iter())
                .map(|(x, y)| x - y)
                .collect();
            let val = f.eval(&diff)?;
            let twist = 0.5 * a.quad_form(&points[mu], &points[nu]);
            g[(mu, nu)] = val * math::cis(twist);
        }
    }
    Ok(g)
}

/// Seeded sampling plan for positivity certification.
///
/// Even-indexed sets draw points uniformly in the ball of `radius` (with the
/// origin always included); odd-indexed sets are symmetric +/- pairs at a
/// cycle of shrinking radii, which is what detects small-eigenvalue
/// violations of the Gaussian exact test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampler {
    pub seed: u64,
    pub sets: usize,
    pub points_per_set: usize,
    pub radius: f64,
}

impl Default for Sampler {
    fn default() -> Self {
        Sampler {
            seed: 0xb050_111c,
            sets: 50,
            points_per_set: 8,
            radius: 4.0,
        }
    }
}

const RADIUS_SCHEDULE: [f64; 5] = [1.0, 0.4, 0.15, 0.06, 0.025];

impl Sampler {
    pub fn with_seed(seed: u64) -> Self {
        Sampler {
            seed,
            ..Self::default()
        }
    }

    /// The k-th point set for the given phase-space dimension.
    pub fn point_set(&self, k: usize, dim: usize) -> Vec<Vec<f64>> {
        let mut rng = Rng::new(
            self.seed ^ (0x9e37_79b9 ^ (k as u64)).wrapping_mul(0x2545_f491_4f6c_dd1d),
        );
        let mut points = Vec::with_capacity(self.points_per_set);
        points.push(vec![0.0; dim]);
        if k % 2 == 0 {
            while points.len() < self.points_per_set {
                points.push(rng.ball_point(dim, self.radius));
            }
        } else {
            let r = self.radius * RADIUS_SCHEDULE[(k / 2) % RADIUS_SCHEDULE.len()];
            while points.len() < self.points_per_set {
                let p = rng.ball_point(dim, r);
                if points.len() + 2 <= self.points_per_set {
                    points.push(p.iter().map(|x| -x).collect());
                    points.push(p);
                } else {
                    points.push(p);
                }
            }
        }
        points
    }
}

/// Result of a sampled A-positivity check.
#[derive(Debug, Clone)]
pub struct PositivityCertificate {
    /// The skew twist matrix the certificate refers to.
    pub a: RMat,
    /// Worst smallest Gram eigenvalue found across the sampled sets.
    pub min_eig: f64,
    pub verdict: bool,
    pub tol: f64,
    pub seed: u64,
    pub sets_checked: usize,
    pub points_per_set: usize,
    pub radius: f64,
    /// Index of the worst set.
    pub worst_set: usize,
    /// The witness point set when the check fails.
    pub witness: Option<Vec<Vec<f64>>>,
}

/// Sample twisted Gram matrices over the plan and record the worst smallest
/// eigenvalue. Fail certificates keep the witness set so failures replay.
pub fn check_a_positive(
    f: &CharFn,
    a: &RMat,
    sampler: &Sampler,
    tol: f64,
) -> Result<PositivityCertificate, CharFnError> {
    let dim = a.rows;
    let mut min_eig = f64::INFINITY;
    let mut worst_set = 0;
    let mut worst_points: Vec<Vec<f64>> = Vec::new();
    for k in 0..sampler.sets {
        let points = sampler.point_set(k, dim);
        let g = gram_matrix(f, a, &points)?;
        let (evals, _) = crate::linalg::herm_eig(&g.hermitize());
        if evals[0] < min_eig {
            min_eig = evals[0];
            worst_set = k;
            worst_points = points;
        }
    }
    let verdict = min_eig >= -tol;
    Ok(PositivityCertificate {
        a: a.clone(),
        min_eig,
        verdict,
        tol,
        seed: sampler.seed,
        sets_checked: sampler.sets,
        points_per_set: sampler.points_per_set,
        radius: sampler.radius,
        worst_set,
        witness: if verdict { None } else { Some(worst_points) },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactGaussianPositivity {
    pub pass: bool,
    pub min_eig: f64,
}

/// Exact A-positivity test for the Gaussian kernel e^{-1/4 xi^T M xi}:
/// positive iff M + iA >= 0.
pub fn gaussian_a_positive_exact(
    m: &RMat,
    a: &RMat,
    tol: f64,
) -> Result<ExactGaussianPositivity, CharFnError> {
    if m.rows != a.rows || !m.is_square() || !a.is_square() {
        return Err(CharFnError::DimensionMismatch(format!(
            "M is {}x{}, A is {}x{}",
            m.rows, m.cols, a.rows, a.cols
        )));
    }
    let h = CMat::from_fn(m.rows, m.rows, |i, j| Complex64::new(m[(i, j)], a[(i, j)]));
    let min_eig = phase_space::min_eig_hermitian(&h, 1e-8 * h.max_abs().max(1.0))
        .map_err(|e| CharFnError::InvalidNode(format!("{e}")))?;
    Ok(ExactGaussianPositivity {
        pass: min_eig >= -tol,
        min_eig,
    })
}

/// Quantum-Bochner style report: normalization, a finite continuity probe
/// and Omega-positivity of the sampled Gram matrices.
#[derive(Debug, Clone)]
pub struct BochnerReport {
    pub normalized: bool,
    pub value_at_zero: Complex64,
    pub continuity_probe: bool,
    pub certificate: PositivityCertificate,
    pub pass: bool,
}

pub const CONTINUITY_PROBE_DELTA: f64 = 1e-3;
pub const CONTINUITY_PROBE_THRESHOLD: f64 = 0.1;

/// Check (i) f(0) = 1, (ii) |f(xi) - 1| <= 0.1 for ||xi|| <= 1e-3 (finite
/// surrogate of continuity in 0), (iii) Omega-positivity by sampling.
pub fn bochner_check(
    f: &CharFn,
    n_modes: usize,
    sampler: &Sampler,
    tol: f64,
) -> Result<BochnerReport, CharFnError> {
    bochner_like_channel_check(f, &omega(n_modes), sampler, tol)
}

/// The channel-construction variant of the Bochner check: same three probes
/// but with an arbitrary twist matrix A (the CP condition uses A = J(X)).
pub fn bochner_like_channel_check(
    f: &CharFn,
    a: &RMat,
    sampler: &Sampler,
    tol: f64,
) -> Result<BochnerReport, CharFnError> {
    let dim = a.rows;
    let value_at_zero = f.eval(&vec![0.0; dim])?;
    let normalized = (value_at_zero - Complex64::new(1.0, 0.0)).norm_sqr() <= 1e-18;

    let mut rng = Rng::new(sampler.seed ^ 0xc0ff_ee);
    let mut continuity_probe = true;
    for _ in 0..16 {
        let mut p = rng.ball_point(dim, CONTINUITY_PROBE_DELTA);
        let norm: f64 = math::sqrt(p.iter().map(|x| x * x).sum::<f64>());
        if norm > 0.0 {
            for x in p.iter_mut() {
                *x *= CONTINUITY_PROBE_DELTA / norm;
            }
        }
        let v = f.eval(&p)?;
        if (v - Complex64::new(1.0, 0.0)).norm_sqr()
            > CONTINUITY_PROBE_THRESHOLD * CONTINUITY_PROBE_THRESHOLD
        {
            continuity_probe = false;
            break;
        }
    }

    let certificate = check_a_positive(f, a, sampler, tol)?;
    let pass = normalized && continuity_probe && certificate.verdict;
    Ok(BochnerReport {
        normalized,
        value_at_zero,
        continuity_probe,
        certificate,
        pass,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub pass: bool,
    pub max_abs: f64,
    pub abs_at_zero: f64,
}

/// Verify |f(xi)| <= |f(0)| + tol on sampled points.
pub fn bound_check(
    f: &CharFn,
    dim: usize,
    sampler: &Sampler,
    tol: f64,
) -> Result<BoundReport, CharFnError> {
    let abs_at_zero = math::sqrt(f.eval(&vec![0.0; dim])?.norm_sqr());
    let mut max_abs = 0.0f64;
    for k in 0..sampler.sets {
        for p in sampler.point_set(k, dim) {
            let v = math::sqrt(f.eval(&p)?.norm_sqr());
            max_abs = max_abs.max(v);
        }
    }
    Ok(BoundReport {
        pass: max_abs <= abs_at_zero + tol,
        max_abs,
        abs_at_zero,
    })
}

/// Mode-coupling analysis: cluster ids per mode, where two modes share a
/// cluster when the tree couples their phase-space components. The quadrature
/// backend uses this to factor reconstructions mode by mode.
pub fn mode_clusters(f: &CharFn, n_modes: usize) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n_modes).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
            r
        } else {
            i
        }
    }
    fn union(parent: &mut Vec<usize>, a: usize, b: usize) {
        let ra = find(parent, a);
        let rb = find(parent, b);
        if ra != rb {
            parent[rb.max(ra)] = rb.min(ra);
        }
    }

    fn couple_support(parent: &mut Vec<usize>, support: &[usize]) {
        for w in support.windows(2) {
            union(parent, w[0], w[1]);
        }
    }

    fn vector_mode_support(a: &[f64]) -> Vec<usize> {
        let mut modes: Vec<usize> = Vec::new();
        for (c, &v) in a.iter().enumerate() {
            if v.abs() > 1e-14 {
                modes.push(c / 2);
            }
        }
        modes.dedup();
        modes
    }

    // Walk with the pullback matrix accumulated so far (None = identity).
    fn walk(f: &CharFn, l_acc: Option<&RMat>, parent: &mut Vec<usize>) {
        match f {
            CharFn::One => {}
            CharFn::GaussianKernel { m, b: _ } => {
                let eff = match l_acc {
                    Some(l) => l.transpose().matmul(m).matmul(l),
                    None => m.clone(),
                };
                let n_modes = parent.len();
                for i in 0..n_modes.min(eff.rows / 2) {
                    for j in (i + 1)..n_modes.min(eff.rows / 2) {
                        let mut coupled = false;
                        for a in 0..2 {
                            for b in 0..2 {
                                if eff[(2 * i + a, 2 * j + b)].abs() > 1e-12 {
                                    coupled = true;
                                }
                            }
                        }
                        if coupled {
                            union(parent, i, j);
                        }
                    }
                }
            }
            CharFn::Cosine { s } => {
                // cos(s^T Omega (L xi)): linear form a = L^T Omega^T s
                let inner_dim = s.len();
                let om = omega(inner_dim / 2);
                let om_s = om.transpose().matvec(s);
                let a = match l_acc {
                    Some(l) => l.transpose().matvec(&om_s),
                    None => om_s,
                };
                couple_support(parent, &vector_mode_support(&a));
            }
            CharFn::DisplacementMixture { points, .. } => {
                if points.len() > 1 {
                    let inner_dim = points[0].len();
                    let om = omega(inner_dim / 2);
                    let mut all: Vec<usize> = Vec::new();
                    for p in points {
                        let om_p = om.matvec(p);
                        let a = match l_acc {
                            Some(l) => l.transpose().matvec(&om_p),
                            None => om_p,
                        };
                        all.extend(vector_mode_support(&a));
                    }
                    all.sort_unstable();
                    all.dedup();
                    couple_support(parent, &all);
                }
            }
            CharFn::Product(children) => {
                for c in children {
                    walk(c, l_acc, parent);
                }
            }
            CharFn::PullBack { inner, l } => {
                let composed = match l_acc {
                    Some(outer) => l.matmul(outer),
                    None => l.clone(),
                };
                walk(inner, Some(&composed), parent);
            }
        }
    }

    walk(f, None, &mut parent);
    (0..n_modes).map(|i| find(&mut parent, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::RMat;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn one_everywhere() {
        assert_eq!(CharFn::One.eval(&[1.0, 2.0]).unwrap(), c(1.0, 0.0));
        assert_eq!(CharFn::One.eval(&[]).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn vacuum_kernel() {
        let f = CharFn::gaussian(RMat::identity(2), vec![0.0, 0.0]).unwrap();
        let xi = [0.3, -0.7];
        let expect = (-0.25f64 * (0.09 + 0.49)).exp();
        let v = f.eval(&xi).unwrap();
        assert!((v - c(expect, 0.0)).norm_sqr() < 1e-28);
    }

    #[test]
    fn cosine_at_two_pi() {
        // s^T Omega xi = xi_2 for s = e1; at xi_2 = 2 pi the value is 1
        let f = CharFn::cosine(vec![1.0, 0.0]).unwrap();
        let xi = [0.33, 2.0 * core::f64::consts::PI];
        let v = f.eval(&xi).unwrap();
        assert!((v - c(1.0, 0.0)).norm_sqr() < 1e-24);
    }

    #[test]
    fn eval_at_zero_is_one_for_all_kinds() {
        let kinds = vec![
            CharFn::One,
            CharFn::gaussian(RMat::identity(4), vec![0.5, 0.0, -1.0, 2.0]).unwrap(),
            CharFn::cosine(vec![1.0, 2.0, 3.0, 4.0]).unwrap(),
            CharFn::mixture(
                vec![0.25, 0.75],
                vec![vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 1.0, 1.0, 0.0]],
            )
            .unwrap(),
            CharFn::phase(&[0.4, -0.3, 0.0, 1.0]),
        ];
        let prod = CharFn::product(kinds.clone());
        for f in kinds.iter().chain(core::iter::once(&prod)) {
            let v = f.eval(&[0.0; 4]).unwrap();
            assert!((v - c(1.0, 0.0)).norm_sqr() < 1e-24, "{f:?}");
        }
    }

    #[test]
    fn hermitian_symmetry() {
        let mut rng = Rng::new(21);
        let f = CharFn::product(vec![
            CharFn::gaussian(
                RMat::from_fn(4, 4, |_, _| rng.uniform_in(-1.0, 1.0)).symmetrize(),
                vec![0.3, -0.2, 0.9, 0.0],
            )
            .unwrap(),
            CharFn::cosine(vec![0.5, 1.0, -0.5, 0.25]).unwrap(),
            CharFn::mixture(
                vec![0.5, 0.5],
                vec![vec![1.0, 0.0, 0.0, 0.0], vec![-1.0, 0.5, 0.0, 0.0]],
            )
            .unwrap(),
        ]);
        for _ in 0..50 {
            let xi: Vec<f64> = (0..4).map(|_| rng.uniform_in(-3.0, 3.0)).collect();
            let neg: Vec<f64> = xi.iter().map(|x| -x).collect();
            let v = f.eval(&xi).unwrap();
            let w = f.eval(&neg).unwrap();
            assert!((v.conj() - w).norm_sqr() < 1e-24);
        }
    }

    #[test]
    fn pullback_composition() {
        let mut rng = Rng::new(22);
        let inner = CharFn::gaussian(
            RMat::from_fn(2, 2, |_, _| rng.uniform_in(-1.0, 1.0)).symmetrize(),
            vec![0.7, -0.3],
        )
        .unwrap();
        let l1 = RMat::from_fn(2, 4, |_, _| rng.uniform_in(-1.0, 1.0));
        let l2 = RMat::from_fn(4, 4, |_, _| rng.uniform_in(-1.0, 1.0));
        let nested = CharFn::pullback(CharFn::pullback(inner.clone(), l1.clone()), l2.clone());
        let flat = CharFn::pullback(inner, l1.matmul(&l2));
        for _ in 0..30 {
            let xi: Vec<f64> = (0..4).map(|_| rng.uniform_in(-2.0, 2.0)).collect();
            let a = nested.eval(&xi).unwrap();
            let b = flat.eval(&xi).unwrap();
            assert!((a - b).norm_sqr() < 1e-24);
        }
    }

    #[test]
    fn mixture_equals_cosine() {
        let s = vec![0.8, -0.6];
        let cosf = CharFn::cosine(s.clone()).unwrap();
        let mix = CharFn::mixture(
            vec![0.5, 0.5],
            vec![s.clone(), s.iter().map(|x| -x).collect()],
        )
        .unwrap();
        let mut rng = Rng::new(23);
        for _ in 0..40 {
            let xi: Vec<f64> = (0..2).map(|_| rng.uniform_in(-4.0, 4.0)).collect();
            let a = cosf.eval(&xi).unwrap();
            let b = mix.eval(&xi).unwrap();
            assert!((a - b).norm_sqr() < 1e-24);
        }
    }

    #[test]
    fn gram_all_ones_for_trivial_input() {
        let pts: Vec<Vec<f64>> = vec![vec![0.0, 0.0], vec![1.0, 2.0], vec![-0.5, 0.3]];
        let g = gram_matrix(&CharFn::One, &RMat::zeros(2, 2), &pts).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((g[(i, j)] - c(1.0, 0.0)).norm_sqr() < 1e-28);
            }
        }
        let (evals, _) = crate::linalg::herm_eig(&g);
        assert!(evals[0] > -1e-12);
        assert!((evals[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn gram_vacuum_with_omega_twist_is_psd() {
        let f = CharFn::gaussian(RMat::identity(2), vec![0.0, 0.0]).unwrap();
        let sampler = Sampler::with_seed(99);
        for k in 0..20 {
            let pts = sampler.point_set(k, 2);
            let g = gram_matrix(&f, &omega(1), &pts).unwrap();
            let (evals, _) = crate::linalg::herm_eig(&g.hermitize());
            assert!(evals[0] >= -1e-10, "set {k}: min eig {}", evals[0]);
        }
    }

    #[test]
    fn gram_half_kernel_sweep_finds_witness() {
        // f = exp(-1/4 xi^T (I/2) xi) is not Omega-positive; a sweep of
        // {0, t e1, t e2} must expose a negative eigenvalue.
        let f = CharFn::gaussian(RMat::identity(2).scale(0.5), vec![0.0, 0.0]).unwrap();
        let mut found = false;
        let mut t = 0.05f64;
        while t <= 4.0 {
            let pts = vec![vec![0.0, 0.0], vec![t, 0.0], vec![0.0, t]];
            let g = gram_matrix(&f, &omega(1), &pts).unwrap();
            let (evals, _) = crate::linalg::herm_eig(&g.hermitize());
            if evals[0] < -1e-6 {
                found = true;
                break;
            }
            t += 0.05;
        }
        assert!(found, "no witness found in sweep");
    }

    #[test]
    fn check_a_positive_trivial() {
        let cert = check_a_positive(
            &CharFn::One,
            &RMat::zeros(2, 2),
            &Sampler::with_seed(1),
            1e-8,
        )
        .unwrap();
        assert!(cert.verdict);
        assert!(cert.witness.is_none());
    }

    #[test]
    fn cosine_is_zero_positive() {
        let f = CharFn::cosine(vec![1.0, 0.0]).unwrap();
        let cert =
            check_a_positive(&f, &RMat::zeros(2, 2), &Sampler::with_seed(2), 1e-8).unwrap();
        assert!(cert.verdict, "min eig {}", cert.min_eig);
        assert!(cert.min_eig >= -1e-10);
    }

    #[test]
    fn cosine_fails_omega_positivity() {
        let f = CharFn::cosine(vec![1.0, 0.0]).unwrap();
        let cert = check_a_positive(&f, &omega(1), &Sampler::with_seed(3), 1e-8).unwrap();
        assert!(!cert.verdict, "min eig {}", cert.min_eig);
        assert!(cert.min_eig < -1e-6);
        let witness = cert.witness.expect("fail certificate keeps witness");
        // replay the witness
        let g = gram_matrix(&f, &omega(1), &witness).unwrap();
        let (evals, _) = crate::linalg::herm_eig(&g.hermitize());
        assert!((evals[0] - cert.min_eig).abs() < 1e-12);
    }

    #[test]
    fn exact_gaussian_examples() {
        let r = gaussian_a_positive_exact(&RMat::identity(2), &omega(1), 1e-8).unwrap();
        assert!(r.pass);
        assert!(r.min_eig.abs() < 1e-12);

        let r = gaussian_a_positive_exact(&RMat::zeros(2, 2), &RMat::zeros(2, 2), 1e-8).unwrap();
        assert!(r.pass);

        let r = gaussian_a_positive_exact(&RMat::identity(2).scale(0.5), &omega(1), 1e-8).unwrap();
        assert!(!r.pass);
        assert!((r.min_eig + 0.5).abs() < 1e-12);
    }

    #[test]
    fn bochner_examples() {
        let vac = CharFn::gaussian(RMat::identity(2), vec![0.0, 0.0]).unwrap();
        let rep = bochner_check(&vac, 1, &Sampler::with_seed(4), 1e-8).unwrap();
        assert!(rep.pass);

        let cosf = CharFn::cosine(vec![1.0, 0.0]).unwrap();
        let rep = bochner_check(&cosf, 1, &Sampler::with_seed(5), 1e-8).unwrap();
        assert!(rep.normalized && rep.continuity_probe);
        assert!(!rep.certificate.verdict);
        assert!(!rep.pass);

        // squeezed-type kernel: M + i Omega has zero determinant per block
        let eps = 0.1;
        let m = RMat::diag(&[eps, 1.0 / eps, eps, 1.0 / eps]);
        let f = CharFn::gaussian(m, vec![0.0; 4]).unwrap();
        let rep = bochner_check(&f, 2, &Sampler::with_seed(6), 1e-8).unwrap();
        assert!(rep.pass, "min eig {}", rep.certificate.min_eig);
    }

    #[test]
    fn bound_check_examples() {
        let s = Sampler::with_seed(7);
        assert!(bound_check(&CharFn::One, 2, &s, 1e-9).unwrap().pass);
        let vac = CharFn::gaussian(RMat::identity(2), vec![0.0, 0.0]).unwrap();
        assert!(bound_check(&vac, 2, &s, 1e-9).unwrap().pass);
        let mix = CharFn::mixture(vec![0.5, 0.5], vec![vec![0.8, -0.6], vec![-0.8, 0.6]]).unwrap();
        assert!(bound_check(&mix, 2, &s, 1e-9).unwrap().pass);
    }

    #[test]
    fn sampled_vs_exact_gaussian_agreement() {
        // module invariant: sampled verdict matches the exact test outside a
        // 1e-6 margin band, 200 seeded pairs with n <= 2
        let mut rng = Rng::new(0xa11ce);
        let mut checked = 0usize;
        for case in 0..200usize {
            let n = 1 + (case % 2);
            let dim = 2 * n;
            let scale = rng.uniform_in(0.3, 2.0);
            let m = RMat::from_fn(dim, dim, |_, _| rng.uniform_in(-scale, scale)).symmetrize();
            // shift towards PSD half the time so both verdicts appear
            let m = if case % 2 == 0 {
                m.add(&RMat::identity(dim).scale(rng.uniform_in(0.0, 2.0)))
            } else {
                m
            };
            let a = RMat::from_fn(dim, dim, |_, _| rng.uniform_in(-1.0, 1.0)).antisymmetrize();
            let exact = gaussian_a_positive_exact(&m, &a, 1e-8).unwrap();
            if exact.min_eig.abs() < 1e-6 {
                continue; // margin band
            }
            let f = CharFn::gaussian(m.clone(), vec![0.0; dim]).unwrap();
            let cert =
                check_a_positive(&f, &a, &Sampler::with_seed(1000 + case as u64), 1e-8).unwrap();
            assert_eq!(
                cert.verdict, exact.pass,
                "case {case}: exact min eig {}, sampled min eig {}",
                exact.min_eig, cert.min_eig
            );
            checked += 1;
        }
        assert!(checked > 150, "only {checked} cases outside the margin band");
    }

    #[test]
    fn mode_clusters_analysis() {
        // diagonal Gaussian on two modes: no coupling
        let f = CharFn::gaussian(RMat::diag(&[0.1, 10.0, 0.1, 10.0]), vec![0.0; 4]).unwrap();
        assert_eq!(mode_clusters(&f, 2), vec![0, 1]);

        // cross-block coupling
        let mut m = RMat::identity(4);
        m[(0, 2)] = 0.5;
        m[(2, 0)] = 0.5;
        let f = CharFn::gaussian(m, vec![0.0; 4]).unwrap();
        assert_eq!(mode_clusters(&f, 2), vec![0, 0]);

        // pulled-back cosine landing on mode 1 only
        let y_tilde = RMat::from_rows(&[&[1.0, 0.0, 0.0, 0.0], &[0.0, 0.0, 1.0, 0.0]]);
        let f = CharFn::product(vec![
            CharFn::pullback(CharFn::cosine(vec![1.0, 0.0]).unwrap(), y_tilde),
            CharFn::gaussian(RMat::diag(&[0.1, 10.0, 0.1, 10.0]), vec![0.0; 4]).unwrap(),
        ]);
        assert_eq!(mode_clusters(&f, 2), vec![0, 1]);
    }
}
