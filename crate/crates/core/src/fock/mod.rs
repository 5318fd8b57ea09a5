//! Truncated Fock-space numerics: displacement operators, characteristic
//! function <-> density operator conversion, Gaussian unitaries, Stinespring
//! simulation of dilations, and trace-distance metrics.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::char_fn::CharFnError;
use crate::linalg::{self, CMat};
use crate::math;
use crate::phase_space::PhaseSpaceError;

pub mod displacement;
pub mod quadrature;
pub mod stinespring;
pub mod unitary;

pub use displacement::displacement_op;
pub use quadrature::{gaussian_state_fock, operator_from_char, operator_from_char_unchecked};
pub use stinespring::{stinespring_apply, StinespringResult};
pub use unitary::{gaussian_unitary_fock, GaussianUnitary};

#[derive(Debug, Clone)]
pub enum FockError {
    /// Total Hilbert dimension exceeds the cost guard.
    ModeCountGuard { dim: usize, cap: usize },
    NonSymplectic { residual: f64 },
    /// The quadrature trace strayed too far from chi(0).
    GridTooCoarse { trace_defect: f64 },
    /// The requested quadrature would be too expensive (coupled multimode
    /// grids); coarsen the grid or factorize the tree.
    GridTooLarge { points: usize, cap: usize },
    CutoffTooSmall { captured: f64 },
    UnphysicalCovariance { min_eig: f64 },
    Dimension(String),
    CharFn(CharFnError),
    PhaseSpace(PhaseSpaceError),
}

impl From<CharFnError> for FockError {
    fn from(e: CharFnError) -> Self {
        FockError::CharFn(e)
    }
}

impl From<PhaseSpaceError> for FockError {
    fn from(e: PhaseSpaceError) -> Self {
        FockError::PhaseSpace(e)
    }
}

impl core::fmt::Display for FockError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            FockError::ModeCountGuard { dim, cap } => write!(
                f,
                "total Fock dimension {dim} exceeds the cost guard {cap}; \
                 lower the cutoff or the mode count"
            ),
            FockError::NonSymplectic { residual } => {
                write!(f, "matrix is not symplectic (residual {residual:.3e})")
            }
            FockError::GridTooCoarse { trace_defect } => write!(
                f,
                "quadrature trace deviates from chi(0) by {trace_defect:.3e}; refine the grid"
            ),
            FockError::GridTooLarge { points, cap } => write!(
                f,
                "coupled quadrature would visit {points} grid points (cap {cap}); \
                 coarsen the grid"
            ),
            FockError::CutoffTooSmall { captured } => write!(
                f,
                "cutoff captures only {captured:.3} of the ancilla trace"
            ),
            FockError::UnphysicalCovariance { min_eig } => write!(
                f,
                "covariance violates V + i Omega >= 0 (min eigenvalue {min_eig:.3e})"
            ),
            FockError::Dimension(s) => write!(f, "dimension error: {s}"),
            FockError::CharFn(e) => write!(f, "{e}"),
            FockError::PhaseSpace(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for FockError {}

/// cutoff^n_modes with overflow/cost protection.
pub fn fock_dim(n_modes: usize, cutoff: usize) -> Result<usize, FockError> {
    let mut dim = 1usize;
    for _ in 0..n_modes {
        dim = dim
            .checked_mul(cutoff)
            .ok_or(FockError::ModeCountGuard { dim: usize::MAX, cap: 1 << 20 })?;
        if dim > (1 << 20) {
            return Err(FockError::ModeCountGuard { dim, cap: 1 << 20 });
        }
    }
    Ok(dim)
}

/// Dense operator on an n-mode Fock space truncated at a per-mode cutoff,
/// mode-major tensor ordering (mode 0 slowest).
#[derive(Debug, Clone)]
pub struct FockOperator {
    pub n: usize,
    pub cutoff: usize,
    pub matrix: CMat,
}

impl FockOperator {
    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn identity(n: usize, cutoff: usize) -> Result<Self, FockError> {
        let dim = fock_dim(n, cutoff)?;
        Ok(FockOperator {
            n,
            cutoff,
            matrix: CMat::identity(dim),
        })
    }

    /// Rank-one density operator |psi><psi| from a state vector.
    pub fn from_pure(n: usize, cutoff: usize, psi: &[Complex64]) -> Result<Self, FockError> {
        let dim = fock_dim(n, cutoff)?;
        if psi.len() != dim {
            return Err(FockError::Dimension(format!(
                "state vector length {} vs dimension {dim}",
                psi.len()
            )));
        }
        let mut m = CMat::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = psi[i] * psi[j].conj();
            }
        }
        Ok(FockOperator {
            n,
            cutoff,
            matrix: m,
        })
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.matmul(&self.matrix).trace().re
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.matrix.hermiticity_defect()
    }

    /// Tensor with another operator (self on the slower indices).
    pub fn tensor(&self, other: &FockOperator) -> Result<FockOperator, FockError> {
        if self.cutoff != other.cutoff {
            return Err(FockError::Dimension(format!(
                "cutoff mismatch: {} vs {}",
                self.cutoff, other.cutoff
            )));
        }
        let _ = fock_dim(self.n + other.n, self.cutoff)?;
        Ok(FockOperator {
            n: self.n + other.n,
            cutoff: self.cutoff,
            matrix: self.matrix.kron(&other.matrix),
        })
    }

    /// Partial trace over the last `m` modes.
    pub fn partial_trace_last(&self, m: usize) -> Result<FockOperator, FockError> {
        if m > self.n {
            return Err(FockError::Dimension(format!(
                "cannot trace {m} modes out of {}",
                self.n
            )));
        }
        let keep = self.n - m;
        let d_keep = fock_dim(keep, self.cutoff)?;
        let d_env = fock_dim(m, self.cutoff)?;
        let mut out = CMat::zeros(d_keep, d_keep);
        for i in 0..d_keep {
            for j in 0..d_keep {
                let mut acc = Complex64::new(0.0, 0.0);
                for e in 0..d_env {
                    acc += self.matrix[(i * d_env + e, j * d_env + e)];
                }
                out[(i, j)] = acc;
            }
        }
        Ok(FockOperator {
            n: keep,
            cutoff: self.cutoff,
            matrix: out,
        })
    }
}

/// Amplitudes of a single-mode coherent state |alpha>.
pub fn coherent_amplitudes(alpha: Complex64, cutoff: usize) -> Vec<Complex64> {
    let mut psi = vec![Complex64::new(0.0, 0.0); cutoff];
    let mut amp = Complex64::new(math::exp(-0.5 * alpha.norm_sqr()), 0.0);
    for (k, slot) in psi.iter_mut().enumerate() {
        if k > 0 {
            amp = amp * alpha / math::sqrt(k as f64);
        }
        *slot = amp;
    }
    psi
}

/// Multi-mode coherent state density operator.
///
/// With D(xi) = e^{i xi^T Omega r}, the state |alpha> = D(s)|0> carries the
/// Gaussian characteristic function of mean s = -sqrt(2) (Re alpha, Im alpha)
/// per mode.
pub fn coherent_state_fock(alphas: &[Complex64], cutoff: usize) -> Result<FockOperator, FockError> {
    if alphas.is_empty() {
        return Err(FockError::Dimension("need at least one mode".into()));
    }
    let mut psi = coherent_amplitudes(alphas[0], cutoff);
    for a in &alphas[1..] {
        let next = coherent_amplitudes(*a, cutoff);
        let mut merged = Vec::with_capacity(psi.len() * next.len());
        for v in &psi {
            for w in &next {
                merged.push(*v * *w);
            }
        }
        psi = merged;
    }
    FockOperator::from_pure(alphas.len(), cutoff, &psi)
}

pub fn vacuum_state_fock(n: usize, cutoff: usize) -> Result<FockOperator, FockError> {
    coherent_state_fock(&vec![Complex64::new(0.0, 0.0); n], cutoff)
}

/// Thermal state with mean photon number nbar per mode (diagonal geometric
/// populations, renormalized over the truncated basis).
pub fn thermal_state_fock(nbars: &[f64], cutoff: usize) -> Result<FockOperator, FockError> {
    if nbars.is_empty() {
        return Err(FockError::Dimension("need at least one mode".into()));
    }
    let single = |nbar: f64| -> CMat {
        let mut m = CMat::zeros(cutoff, cutoff);
        if nbar <= 0.0 {
            m[(0, 0)] = Complex64::new(1.0, 0.0);
            return m;
        }
        let ratio = nbar / (1.0 + nbar);
        let mut p = 1.0 / (1.0 + nbar);
        let mut total = 0.0;
        for k in 0..cutoff {
            m[(k, k)] = Complex64::new(p, 0.0);
            total += p;
            p *= ratio;
        }
        for k in 0..cutoff {
            m[(k, k)] = m[(k, k)] / total;
        }
        m
    };
    let mut mat = single(nbars[0]);
    for &nb in &nbars[1..] {
        mat = mat.kron(&single(nb));
    }
    Ok(FockOperator {
        n: nbars.len(),
        cutoff,
        matrix: mat,
    })
}

/// chi_T(xi) = Tr[T D(xi)] evaluated by per-mode contraction.
pub fn char_of_operator(t: &FockOperator, xi: &[f64]) -> Result<Complex64, FockError> {
    if xi.len() != 2 * t.n {
        return Err(FockError::Dimension(format!(
            "point has dimension {}, operator acts on {} modes",
            xi.len(),
            t.n
        )));
    }
    let d = displacement_op(xi, t.cutoff)?;
    Ok(t.matrix.matmul(&d.matrix).trace())
}

/// Trace distance (1/2)||rho - sigma||_1 via Hermitian eigenvalues.
pub fn trace_distance(rho: &FockOperator, sigma: &FockOperator) -> Result<f64, FockError> {
    if rho.dim() != sigma.dim() {
        return Err(FockError::Dimension(format!(
            "dimension mismatch: {} vs {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let diff = rho.matrix.sub(&sigma.matrix).hermitize();
    let (evals, _) = linalg::herm_eig(&diff);
    Ok(0.5 * evals.iter().map(|l| l.abs()).sum::<f64>())
}

/// Quadrature grid: midpoint rule over [-R, R] per axis with step h,
/// R/h integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureGrid {
    pub radius: f64,
    pub step: f64,
}

impl QuadratureGrid {
    pub fn new(radius: f64, step: f64) -> Result<Self, FockError> {
        if !(radius > 0.0) || !(step > 0.0) {
            return Err(FockError::Dimension(
                "grid radius and step must be positive".into(),
            ));
        }
        let ratio = radius / step;
        if (ratio - math::round(ratio)).abs() > 1e-9 {
            return Err(FockError::Dimension(format!(
                "radius/step must be integral, got {ratio}"
            )));
        }
        Ok(QuadratureGrid { radius, step })
    }

    /// Midpoint abscissas: -R + h/2 + k h.
    pub fn axis(&self) -> Vec<f64> {
        let count = math::round(2.0 * self.radius / self.step) as usize;
        (0..count)
            .map(|k| -self.radius + self.step * (k as f64 + 0.5))
            .collect()
    }

    /// Default grids: R = 8, h = 0.05 for one mode; R = 6, h = 0.1 beyond.
    pub fn default_for_modes(n: usize) -> Self {
        if n <= 1 {
            QuadratureGrid {
                radius: 8.0,
                step: 0.05,
            }
        } else {
            QuadratureGrid {
                radius: 6.0,
                step: 0.1,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParsevalReport {
    /// Tr[T1^dag T2]
    pub trace_side: Complex64,
    /// Grid integral of conj(chi_1) chi_2 / (2 pi)^n
    pub integral_side: Complex64,
    pub abs_difference: f64,
}

/// Compare Tr[T1^dag T2] with its phase-space integral over the grid.
pub fn parseval(
    t1: &FockOperator,
    t2: &FockOperator,
    grid: &QuadratureGrid,
) -> Result<ParsevalReport, FockError> {
    if t1.n != t2.n || t1.cutoff != t2.cutoff {
        return Err(FockError::Dimension(
            "operators must share mode count and cutoff".into(),
        ));
    }
    let trace_side = t1.matrix.adjoint().matmul(&t2.matrix).trace();

    let axis = grid.axis();
    let g = axis.len();
    let n = t1.n;
    let total_points = g.pow(2 * n as u32);
    let cost = total_points.saturating_mul(t1.dim() * t1.dim());
    if cost > 2_000_000_000 {
        return Err(FockError::GridTooLarge {
            points: total_points,
            cap: 2_000_000_000 / (t1.dim() * t1.dim()).max(1),
        });
    }

    let weight = math::powi(grid.step, 2 * n as i32)
        / math::powf(2.0 * core::f64::consts::PI, n as f64);
    // chi_{T}(xi) = Tr[T D(xi)]; accumulate conj(chi1) chi2 over the grid.
    let mut integral = Complex64::new(0.0, 0.0);
    let mut idx = vec![0usize; 2 * n];
    let mut xi = vec![0.0f64; 2 * n];
    loop {
        for (c, &i) in idx.iter().enumerate() {
            xi[c] = axis[i];
        }
        let d = displacement_op(&xi, t1.cutoff)?;
        let c1 = t1.matrix.matmul(&d.matrix).trace();
        let c2 = t2.matrix.matmul(&d.matrix).trace();
        integral += c1.conj() * c2;
        // advance the multi-index
        let mut c = 2 * n;
        loop {
            if c == 0 {
                break;
            }
            c -= 1;
            idx[c] += 1;
            if idx[c] < g {
                break;
            }
            idx[c] = 0;
            if c == 0 {
                break;
            }
        }
        if idx.iter().all(|&i| i == 0) {
            break;
        }
    }
    let integral_side = integral * weight;
    let diff = trace_side - integral_side;
    Ok(ParsevalReport {
        trace_side,
        integral_side,
        abs_difference: math::hypot(diff.re, diff.im),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrictBoundProbe {
    pub abs_value: f64,
    /// Set when |chi| >= 1 - 1e-9, i.e. the strict bound is numerically
    /// saturated (expected only as zeta -> 0).
    pub near_boundary: bool,
}

/// Probe the strict bound |chi_sigma(zeta)| < 1 for zeta != 0.
pub fn chi_strict_bound_probe(
    sigma: &FockOperator,
    zeta: &[f64],
) -> Result<StrictBoundProbe, FockError> {
    if zeta.iter().all(|&v| v == 0.0) {
        return Err(FockError::Dimension("zeta must be nonzero".into()));
    }
    let tr = sigma.trace();
    if (tr - Complex64::new(1.0, 0.0)).norm_sqr() > 1e-2 {
        return Err(FockError::Dimension(format!(
            "sigma is not close to a density operator (trace {tr})"
        )));
    }
    let val = char_of_operator(sigma, zeta)?;
    let abs_value = math::sqrt(val.norm_sqr());
    Ok(StrictBoundProbe {
        abs_value,
        near_boundary: abs_value >= 1.0 - 1e-9,
    })
}
