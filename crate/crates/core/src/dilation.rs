//! Gaussian dilations of linear bosonic channels.
//!
//! Three synthesis routes:
//!  * exact: requires det J(X) != 0, factors J(X) = Y^T Omega Y and lifts
//!    f to the ancilla through Y^{-1} (n ancilla modes);
//!  * varying-unitary approximation: contracts X to (1-eps)X, pays a
//!    Gaussian factor g_eps, and runs the exact route on the contracted
//!    channel (n ancilla modes, unitary depends on eps);
//!  * fixed-unitary approximation: n + k ancilla modes with
//!    k = dim ker J(X) / 2; X, Y and the symplectic completion are
//!    independent of eps, only the ancilla state varies.
//!
//! Every dilation acts on characteristic functions as
//! `e^{i s^T Omega xi} chi(X xi) chi_sigma(Y xi)` with
//! `X^T Omega X + Y^T Omega Y = Omega`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::channels::{ChannelError, LinearBosonicChannel};
use crate::char_fn::{self, CharFn, CharFnError, Sampler};
use crate::linalg::{self, CMat, RMat};
use crate::phase_space::{
    self, factor_skew_invertible, j_of_x, omega, skew_canonical, symplectic_complete,
    PhaseSpaceError, SymplecticCompletion,
};
use crate::Tolerances;

#[derive(Debug, Clone)]
pub enum DilationError {
    /// Algorithm 1 is inapplicable: J(X) has a kernel.
    SingularJ { min_d: f64 },
    /// det J((1-eps)X) vanished for every retry.
    EpsilonSingular { epsilon: f64 },
    InvalidEpsilon { epsilon: f64 },
    PhaseSpace(PhaseSpaceError),
    Channel(ChannelError),
    CharFn(CharFnError),
}

impl From<PhaseSpaceError> for DilationError {
    fn from(e: PhaseSpaceError) -> Self {
        DilationError::PhaseSpace(e)
    }
}

impl From<CharFnError> for DilationError {
    fn from(e: CharFnError) -> Self {
        DilationError::CharFn(e)
    }
}

impl From<ChannelError> for DilationError {
    fn from(e: ChannelError) -> Self {
        DilationError::Channel(e)
    }
}

impl core::fmt::Display for DilationError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DilationError::SingularJ { min_d } => write!(
                f,
                "J(X) is singular (smallest canonical coefficient {min_d:.3e}); \
                 the exact construction does not apply"
            ),
            DilationError::EpsilonSingular { epsilon } => write!(
                f,
                "det J((1-eps)X) vanished near eps = {epsilon}; retries exhausted"
            ),
            DilationError::InvalidEpsilon { epsilon } => {
                write!(f, "epsilon must lie in (0, 1), got {epsilon}")
            }
            DilationError::PhaseSpace(e) => write!(f, "{e}"),
            DilationError::Channel(e) => write!(f, "{e}"),
            DilationError::CharFn(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for DilationError {}

/// How a dilation was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    Exact,
    VarUnitary { epsilon: f64 },
    FixedUnitary { epsilon: f64 },
}

/// Data specific to the fixed-unitary construction.
#[derive(Debug, Clone)]
pub struct FixedUnitaryData {
    /// Orthogonal factor of the canonical form of J(X).
    pub o: RMat,
    /// Canonical coefficients, descending, kernel entries last.
    pub d: Vec<f64>,
    /// Kernel half-dimension.
    pub k: usize,
    /// Moore-Penrose inverse of Y in closed block form.
    pub y_tilde: RMat,
    /// Orthogonal projector Y Y~.
    pub p: RMat,
    /// Ancilla squeezing envelope W(eps).
    pub w_eps: RMat,
    /// Projector onto the kernel directions, pulled back by O.
    pub q: RMat,
    pub epsilon: f64,
}

/// A Gaussian dilation: ancilla state chi_sigma on m modes plus the
/// symplectic completion S whose first 2n columns are [X; Y].
#[derive(Debug, Clone)]
pub struct GaussianDilation {
    pub n: usize,
    pub m: usize,
    pub x: RMat,
    pub y: RMat,
    /// Output displacement; zero for every synthesized dilation.
    pub s: Vec<f64>,
    pub ancilla: CharFn,
    pub completion: SymplecticCompletion,
    pub provenance: Provenance,
    pub fixed_data: Option<FixedUnitaryData>,
}

impl GaussianDilation {
    /// The channel action this dilation induces, as a tree:
    /// phase * PullBack(chi_in, X) * PullBack(ancilla, Y).
    pub fn apply_to_char(&self, chi_in: &CharFn) -> Result<CharFn, DilationError> {
        if let Some(dim) = chi_in.arity() {
            if dim != 2 * self.n {
                return Err(DilationError::CharFn(CharFnError::DimensionMismatch(
                    format!("input arity {dim}, dilation acts on {}", 2 * self.n),
                )));
            }
        }
        let mut factors = Vec::with_capacity(3);
        if self.s.iter().any(|&v| v != 0.0) {
            factors.push(CharFn::phase(&self.s));
        }
        factors.push(CharFn::pullback(chi_in.clone(), self.x.clone()));
        factors.push(CharFn::pullback(self.ancilla.clone(), self.y.clone()));
        Ok(CharFn::product(factors))
    }

    /// Evaluate the induced output characteristic function at one point.
    pub fn action_at(&self, chi_in: &CharFn, xi: &[f64]) -> Result<Complex64, DilationError> {
        let phase = char_fn::symplectic_form_product(&self.s, xi);
        let sys = chi_in.eval(&self.x.matvec(xi))?;
        let anc = self.ancilla.eval(&self.y.matvec(xi))?;
        Ok(crate::math::cis(phase) * sys * anc)
    }

    /// Residual of X^T Omega X + Y^T Omega Y = Omega.
    pub fn xy_residual(&self) -> f64 {
        let om_n = omega(self.n);
        let mut g = self.x.transpose().matmul(&om_n).matmul(&self.x);
        if self.m > 0 {
            let om_m = omega(self.m);
            g = g.add(&self.y.transpose().matmul(&om_m).matmul(&self.y));
        }
        g.sub(&om_n).max_abs()
    }
}

/// Alias for the free-function form of the dilation action.
pub fn apply_dilation_char(d: &GaussianDilation, chi_in: &CharFn) -> Result<CharFn, DilationError> {
    d.apply_to_char(chi_in)
}

/// Exact Gaussian dilation (requires invertible J(X)): m = n,
/// Y^T Omega Y = J(X), ancilla = f pulled back through Y^{-1}.
pub fn exact_dilation(
    ch: &LinearBosonicChannel,
    tols: &Tolerances,
) -> Result<GaussianDilation, DilationError> {
    let j = j_of_x(&ch.x)?;
    let y = match factor_skew_invertible(&j, tols.rank) {
        Ok(y) => y,
        Err(PhaseSpaceError::SingularJ { min_d }) => {
            return Err(DilationError::SingularJ { min_d })
        }
        Err(e) => return Err(e.into()),
    };
    let y_inv = linalg::inverse(&y).ok_or(DilationError::SingularJ { min_d: 0.0 })?;
    let ancilla = CharFn::pullback(ch.f.clone(), y_inv);
    let completion = symplectic_complete(&ch.x, &y, tols.structural.max(1e-8))?;
    Ok(GaussianDilation {
        n: ch.n,
        m: ch.n,
        x: ch.x.clone(),
        y,
        s: vec![0.0; 2 * ch.n],
        ancilla,
        completion,
        provenance: Provenance::Exact,
        fixed_data: None,
    })
}

const EPSILON_RETRY_FACTOR: f64 = 1.0 + 1.0 / 1024.0;
const EPSILON_RETRIES: usize = 20;

/// Varying-unitary approximation: X_eps = (1-eps)X, V_eps = ||X_eps^T Omega
/// X_eps - X^T Omega X||_2 * I, g_eps the Gaussian with kernel V_eps; the
/// exact construction applied to (X_eps, f g_eps). det J(X_eps) has only
/// isolated zeros, so a failed eps is nudged upward a bounded number of
/// times before the error surfaces.
pub fn approx_var_unitary(
    ch: &LinearBosonicChannel,
    epsilon: f64,
    tols: &Tolerances,
) -> Result<GaussianDilation, DilationError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(DilationError::InvalidEpsilon { epsilon });
    }
    let om = omega(ch.n);
    let xtox = ch.x.transpose().matmul(&om).matmul(&ch.x);
    let mut eps = epsilon;
    for _attempt in 0..=EPSILON_RETRIES {
        let x_eps = ch.x.scale(1.0 - eps);
        let j_eps = j_of_x(&x_eps)?;
        let form = skew_canonical(&j_eps, 1e-9 * j_eps.max_abs().max(1.0))?;
        let min_d = form.d.iter().copied().fold(f64::INFINITY, f64::min);
        if min_d > tols.rank {
            let diff = x_eps.transpose().matmul(&om).matmul(&x_eps).sub(&xtox);
            let v_eps = RMat::identity(2 * ch.n).scale(diff.spectral_norm());
            let g_eps = CharFn::gaussian(v_eps, vec![0.0; 2 * ch.n])?;
            let f_eps = CharFn::product(vec![ch.f.clone(), g_eps]);
            let contracted = LinearBosonicChannel {
                n: ch.n,
                x: x_eps,
                f: f_eps,
                cp_certificate: None,
            };
            let mut dil = exact_dilation(&contracted, tols)?;
            dil.provenance = Provenance::VarUnitary { epsilon: eps };
            return Ok(dil);
        }
        eps *= EPSILON_RETRY_FACTOR;
    }
    Err(DilationError::EpsilonSingular { epsilon })
}

/// Fixed-unitary approximation on n + k ancilla modes. X, Y, and the
/// symplectic completion depend only on the channel; eps enters only the
/// ancilla state chi_sigma(eta) = f(Y~ eta) exp(-1/4 eta^T W(eps) eta).
pub fn approx_fixed_unitary(
    ch: &LinearBosonicChannel,
    epsilon: f64,
    tols: &Tolerances,
) -> Result<GaussianDilation, DilationError> {
    if epsilon <= 0.0 {
        return Err(DilationError::InvalidEpsilon { epsilon });
    }
    let n = ch.n;
    let j = j_of_x(&ch.x)?;
    let form = skew_canonical(&j, 1e-9 * j.max_abs().max(1.0))?;
    let k = form.d.iter().filter(|&&dj| dj <= tols.rank).count();
    let m = n + k;

    // Block rows of Y, block columns of Y~, and the diagonal envelopes.
    let rows_total = 2 * n + 2 * k;
    let mut y_blocks = RMat::zeros(rows_total, 2 * n);
    let mut yt_blocks = RMat::zeros(2 * n, rows_total);
    let mut w_eps = RMat::zeros(rows_total, rows_total);
    let mut q_blocks = RMat::zeros(2 * n, 2 * n);
    let mut row = 0usize;
    for (jdx, &dj) in form.d.iter().enumerate() {
        let col = 2 * jdx;
        if dj > tols.rank {
            let r = crate::math::sqrt(dj);
            y_blocks[(row, col)] = r;
            y_blocks[(row + 1, col + 1)] = r;
            yt_blocks[(col, row)] = 1.0 / r;
            yt_blocks[(col + 1, row + 1)] = 1.0 / r;
            row += 2;
        } else {
            // 4x2 embedding block and its 2x4 pseudo-inverse
            y_blocks[(row, col)] = 1.0;
            y_blocks[(row + 2, col + 1)] = 1.0;
            yt_blocks[(col, row)] = 1.0;
            yt_blocks[(col + 1, row + 2)] = 1.0;
            w_eps[(row, row)] = epsilon;
            w_eps[(row + 1, row + 1)] = 1.0 / epsilon;
            w_eps[(row + 2, row + 2)] = epsilon;
            w_eps[(row + 3, row + 3)] = 1.0 / epsilon;
            q_blocks[(col, col)] = 1.0;
            q_blocks[(col + 1, col + 1)] = 1.0;
            row += 4;
        }
    }
    let y = y_blocks.matmul(&form.o);
    let y_tilde = form.o.transpose().matmul(&yt_blocks);
    let q = form.o.transpose().matmul(&q_blocks).matmul(&form.o);
    let p = y.matmul(&y_tilde);

    let ancilla = CharFn::product(vec![
        CharFn::pullback(ch.f.clone(), y_tilde.clone()),
        CharFn::gaussian(w_eps.clone(), vec![0.0; rows_total])?,
    ]);
    let completion = symplectic_complete(&ch.x, &y, tols.structural.max(1e-8))?;

    Ok(GaussianDilation {
        n,
        m,
        x: ch.x.clone(),
        y,
        s: vec![0.0; 2 * n],
        ancilla,
        completion,
        provenance: Provenance::FixedUnitary { epsilon },
        fixed_data: Some(FixedUnitaryData {
            o: form.o,
            d: form.d,
            k,
            y_tilde,
            p,
            w_eps,
            q,
            epsilon,
        }),
    })
}

/// A dilation whose ancilla has been fixed to a concrete truncated Fock
/// state. The unitary data (X, Y, S) is retained unchanged; `delta` is the
/// trace mass lost to the cutoff, which bounds the diamond-norm distance to
/// the untruncated channel.
#[derive(Debug, Clone)]
pub struct TruncatedAncilla {
    pub sigma: crate::fock::FockOperator,
    pub delta: f64,
    pub cutoff: usize,
}

/// Project the ancilla onto the truncated Fock space and renormalize.
pub fn truncate_ancilla(
    d: &GaussianDilation,
    cutoff: usize,
    grid: &crate::fock::QuadratureGrid,
) -> Result<TruncatedAncilla, crate::fock::FockError> {
    use crate::fock::{operator_from_char_unchecked, FockError, FockOperator};
    if d.m == 0 {
        return Err(FockError::Dimension(
            "dilation has no ancilla modes".into(),
        ));
    }
    let raw = operator_from_char_unchecked(&d.ancilla, d.m, grid, cutoff)?;
    let captured = raw.trace().re;
    if captured < 0.5 {
        return Err(FockError::CutoffTooSmall { captured });
    }
    let delta = (1.0 - captured).max(0.0);
    let sigma = FockOperator {
        n: d.m,
        cutoff,
        matrix: raw
            .matrix
            .scale(Complex64::new(1.0 / captured, 0.0)),
    };
    Ok(TruncatedAncilla {
        sigma,
        delta,
        cutoff,
    })
}

/// One named residual check inside a dilation report.
#[derive(Debug, Clone)]
pub struct DilationCheck {
    pub name: &'static str,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct DilationReport {
    pub checks: Vec<DilationCheck>,
    pub warnings: Vec<String>,
    pub pass: bool,
}

/// Verify the structural identities of a dilation: the isometry relation,
/// symplecticity of S, column fidelity, the ancilla Bochner certificate, and
/// the fixed-unitary block identities when present.
pub fn check_dilation(
    d: &GaussianDilation,
    sampler: &Sampler,
    tols: &Tolerances,
) -> Result<DilationReport, DilationError> {
    let mut checks = Vec::new();
    let mut warnings = Vec::new();

    let xy = d.xy_residual();
    checks.push(DilationCheck {
        name: "xy_relation",
        residual: xy,
        pass: xy <= tols.structural,
    });

    let dim = 2 * (d.n + d.m);
    let om = omega(d.n + d.m);
    let s_res = d
        .completion
        .s
        .transpose()
        .matmul(&om)
        .matmul(&d.completion.s)
        .sub(&om)
        .max_abs();
    checks.push(DilationCheck {
        name: "s_symplectic",
        residual: s_res,
        pass: s_res <= tols.structural,
    });

    let mut col_res = 0.0f64;
    for c in 0..2 * d.n {
        for r in 0..2 * d.n {
            col_res = col_res.max((d.completion.s[(r, c)] - d.x[(r, c)]).abs());
        }
        for r in 0..2 * d.m {
            col_res = col_res.max((d.completion.s[(2 * d.n + r, c)] - d.y[(r, c)]).abs());
        }
    }
    let _ = dim;
    checks.push(DilationCheck {
        name: "first_columns",
        residual: col_res,
        pass: col_res == 0.0,
    });

    if d.m > 0 {
        let bochner = char_fn::bochner_check(&d.ancilla, d.m, sampler, tols.eigen)?;
        checks.push(DilationCheck {
            name: "ancilla_bochner",
            residual: (-bochner.certificate.min_eig).max(0.0),
            pass: bochner.pass,
        });
    }

    if let Some(fd) = &d.fixed_data {
        let penrose1 = fd.y_tilde.matmul(&d.y).sub(&RMat::identity(2 * d.n)).max_abs();
        checks.push(DilationCheck {
            name: "penrose_left_inverse",
            residual: penrose1,
            pass: penrose1 <= tols.structural,
        });

        let sandwich = d
            .y
            .transpose()
            .matmul(&fd.w_eps)
            .matmul(&d.y)
            .sub(&fd.q.scale(fd.epsilon))
            .max_abs();
        checks.push(DilationCheck {
            name: "w_sandwich",
            residual: sandwich,
            pass: sandwich <= 1e-10,
        });

        let om_anc = omega(d.m);
        let pop = fd.p.matmul(&om_anc).matmul(&fd.p);
        let target = om_anc.sub(&pop);
        let h = CMat::from_fn(2 * d.m, 2 * d.m, |i, j| {
            Complex64::new(fd.w_eps[(i, j)], -target[(i, j)])
        });
        let min_eig = phase_space::min_eig_hermitian(&h, 1e-8 * h.max_abs().max(1.0))?;
        checks.push(DilationCheck {
            name: "w_dominates_omega",
            residual: (-min_eig).max(0.0),
            pass: min_eig >= -1e-10,
        });

        for (jdx, &dj) in fd.d.iter().enumerate() {
            if dj > tols.rank && dj < 1e-6 {
                warnings.push(format!(
                    "canonical coefficient d_{jdx} = {dj:.3e} is near the rank threshold; \
                     the factorization is ill-conditioned"
                ));
            }
        }
    }

    let pass = checks.iter().all(|c| c.pass);
    Ok(DilationReport {
        checks,
        warnings,
        pass,
    })
}
