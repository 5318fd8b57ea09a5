//! Linear bosonic channels at the characteristic-function level.
//!
//! A channel is the pair (X, f) acting as chi(xi) -> chi(X xi) f(xi).
//! Construction certifies complete positivity: f must be J(X)-positive with
//! J(X) = Omega - X^T Omega X, besides f(0) = 1 and a continuity probe.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::char_fn::{
    self, CharFn, CharFnError, PositivityCertificate, Sampler,
};
use crate::linalg::RMat;
use crate::math;
use crate::phase_space::j_of_x;
use crate::Tolerances;

#[derive(Debug, Clone)]
pub enum ChannelError {
    /// f is not J(X)-positive; carries the worst sampled eigenvalue and the
    /// witness point set.
    NotCP {
        min_eig: f64,
        witness: Option<Vec<Vec<f64>>>,
    },
    /// f(0) differs from 1.
    NotNormalized { value: Complex64 },
    /// The continuity probe near 0 failed.
    NotContinuous,
    InvalidWeights(String),
    ZeroDisplacement,
    NegativeSigma { sigma: f64 },
    Dimension(String),
    CharFn(CharFnError),
}

impl From<CharFnError> for ChannelError {
    fn from(e: CharFnError) -> Self {
        ChannelError::CharFn(e)
    }
}

impl core::fmt::Display for ChannelError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ChannelError::NotCP { min_eig, .. } => write!(
                f,
                "channel is not completely positive: worst Gram eigenvalue {min_eig:.6e}"
            ),
            ChannelError::NotNormalized { value } => {
                write!(f, "f(0) = {value} instead of 1")
            }
            ChannelError::NotContinuous => write!(f, "continuity probe near 0 failed"),
            ChannelError::InvalidWeights(s) => write!(f, "invalid mixture weights: {s}"),
            ChannelError::ZeroDisplacement => {
                write!(f, "binary displacement requires s != 0")
            }
            ChannelError::NegativeSigma { sigma } => {
                write!(f, "noise parameter must be nonnegative, got {sigma}")
            }
            ChannelError::Dimension(s) => write!(f, "dimension mismatch: {s}"),
            ChannelError::CharFn(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ChannelError {}

/// A linear bosonic channel (X, f) with its complete-positivity certificate.
#[derive(Debug, Clone)]
pub struct LinearBosonicChannel {
    pub n: usize,
    pub x: RMat,
    pub f: CharFn,
    /// Sampled J(X)-positivity certificate attached at construction.
    pub cp_certificate: Option<PositivityCertificate>,
}

impl LinearBosonicChannel {
    /// J(X) = Omega - X^T Omega X for this channel.
    pub fn j_matrix(&self) -> RMat {
        j_of_x(&self.x).expect("stored X is square of even dimension")
    }
}

/// Construct a channel, running the normalization, continuity, and sampled
/// J(X)-positivity checks. Construction fails on any fail verdict.
pub fn make_channel(
    x: RMat,
    f: CharFn,
    sampler: &Sampler,
    tols: &Tolerances,
) -> Result<LinearBosonicChannel, ChannelError> {
    if !x.is_square() || x.rows % 2 != 0 || x.rows == 0 {
        return Err(ChannelError::Dimension(format!(
            "X must be 2n x 2n, got {}x{}",
            x.rows, x.cols
        )));
    }
    let n = x.rows / 2;
    if let Some(dim) = f.arity() {
        if dim != 2 * n {
            return Err(ChannelError::Dimension(format!(
                "f has arity {dim}, X acts on dimension {}",
                2 * n
            )));
        }
    }

    let j = j_of_x(&x).map_err(|e| ChannelError::Dimension(format!("{e}")))?;
    let report = char_fn::bochner_like_channel_check(&f, &j, sampler, tols.eigen)?;
    if !report.normalized {
        return Err(ChannelError::NotNormalized {
            value: report.value_at_zero,
        });
    }
    if !report.continuity_probe {
        return Err(ChannelError::NotContinuous);
    }
    if !report.certificate.verdict {
        return Err(ChannelError::NotCP {
            min_eig: report.certificate.min_eig,
            witness: report.certificate.witness,
        });
    }
    Ok(LinearBosonicChannel {
        n,
        x,
        f,
        cp_certificate: Some(report.certificate),
    })
}

/// The channel action on a characteristic function:
/// chi_out = Product(PullBack(chi_in, X), f).
pub fn apply_to_char(
    ch: &LinearBosonicChannel,
    chi_in: &CharFn,
) -> Result<CharFn, ChannelError> {
    if let Some(dim) = chi_in.arity() {
        if dim != 2 * ch.n {
            return Err(ChannelError::Dimension(format!(
                "input characteristic function has arity {dim}, channel acts on {}",
                2 * ch.n
            )));
        }
    }
    Ok(CharFn::product(vec![
        CharFn::pullback(chi_in.clone(), ch.x.clone()),
        ch.f.clone(),
    ]))
}

/// Binary displacement channel: equal mixture of +/- s displacements,
/// X = identity and f = cos(s^T Omega xi).
pub fn binary_displacement(
    s: &[f64],
    sampler: &Sampler,
    tols: &Tolerances,
) -> Result<LinearBosonicChannel, ChannelError> {
    if s.len() % 2 != 0 || s.is_empty() {
        return Err(ChannelError::Dimension(
            "displacement vector must have even positive length".into(),
        ));
    }
    if s.iter().all(|&v| v == 0.0) {
        return Err(ChannelError::ZeroDisplacement);
    }
    let f = CharFn::cosine(s.to_vec())?;
    make_channel(RMat::identity(s.len()), f, sampler, tols)
}

/// Additive-noise channel from a discrete displacement distribution.
pub fn displacement_mixture_channel(
    weights: Vec<f64>,
    points: Vec<Vec<f64>>,
    sampler: &Sampler,
    tols: &Tolerances,
) -> Result<LinearBosonicChannel, ChannelError> {
    let f = CharFn::mixture(weights, points).map_err(|e| match e {
        CharFnError::InvalidNode(s) => ChannelError::InvalidWeights(s),
        other => ChannelError::CharFn(other),
    })?;
    let dim = f.arity().expect("mixture has fixed arity");
    make_channel(RMat::identity(dim), f, sampler, tols)
}

/// Gaussian channel (X, N, d) with f = exp(-1/4 xi^T N xi + i d^T xi).
/// Complete positivity is decided by the exact Gaussian test N + i J(X) >= 0.
pub fn gaussian_channel(
    x: RMat,
    n_mat: RMat,
    d: Vec<f64>,
    tols: &Tolerances,
) -> Result<LinearBosonicChannel, ChannelError> {
    if !x.is_square() || x.rows % 2 != 0 {
        return Err(ChannelError::Dimension(format!(
            "X must be 2n x 2n, got {}x{}",
            x.rows, x.cols
        )));
    }
    let j = j_of_x(&x).map_err(|e| ChannelError::Dimension(format!("{e}")))?;
    let exact = char_fn::gaussian_a_positive_exact(&n_mat, &j, tols.eigen)?;
    if !exact.pass {
        return Err(ChannelError::NotCP {
            min_eig: exact.min_eig,
            witness: None,
        });
    }
    let n = x.rows / 2;
    let f = CharFn::gaussian(n_mat, d)?;
    Ok(LinearBosonicChannel {
        n,
        x,
        f,
        cp_certificate: None,
    })
}

/// Additive Gaussian noise channel of the teleportation remark:
/// chi(alpha) -> chi(alpha) e^{-sigma |alpha|^2}, with the convention
/// alpha = (x + ip)/sqrt(2) so that |alpha|^2 = xi^T xi / 2. X = identity,
/// f = exp(-(sigma/2) xi^T xi), i.e. kernel 2 sigma * identity.
pub fn bk_noise_channel(
    sigma: f64,
    n: usize,
    tols: &Tolerances,
) -> Result<LinearBosonicChannel, ChannelError> {
    if sigma < 0.0 {
        return Err(ChannelError::NegativeSigma { sigma });
    }
    if n == 0 {
        return Err(ChannelError::Dimension("mode count must be positive".into()));
    }
    let dim = 2 * n;
    gaussian_channel(
        RMat::identity(dim),
        RMat::identity(dim).scale(2.0 * sigma),
        vec![0.0; dim],
        tols,
    )
}

/// Channel composition at the characteristic level: applying (X2, f2) after
/// (X1, f1) acts like the channel (X1 X2, f2(xi) f1(X2 xi)).
pub fn compose(
    first: &LinearBosonicChannel,
    second: &LinearBosonicChannel,
) -> Result<LinearBosonicChannel, ChannelError> {
    if first.n != second.n {
        return Err(ChannelError::Dimension(format!(
            "mode counts differ: {} vs {}",
            first.n, second.n
        )));
    }
    let x = first.x.matmul(&second.x);
    let f = CharFn::product(vec![
        second.f.clone(),
        CharFn::pullback(first.f.clone(), second.x.clone()),
    ]);
    Ok(LinearBosonicChannel {
        n: first.n,
        x,
        f,
        cp_certificate: None,
    })
}

/// Evaluate the output characteristic function of a channel on a state tree.
pub fn output_at(
    ch: &LinearBosonicChannel,
    chi_in: &CharFn,
    xi: &[f64],
) -> Result<Complex64, ChannelError> {
    let x_xi = ch.x.matvec(xi);
    Ok(chi_in.eval(&x_xi)? * ch.f.eval(xi)?)
}

/// Attenuator on one mode: X = cos(theta) I, N = sin^2(theta) I.
pub fn attenuator(theta: f64, tols: &Tolerances) -> Result<LinearBosonicChannel, ChannelError> {
    let c = math::cos(theta);
    let s2 = 1.0 - c * c;
    gaussian_channel(
        RMat::identity(2).scale(c),
        RMat::identity(2).scale(s2),
        vec![0.0; 2],
        tols,
    )
}

/// Amplifier on one mode with gain g >= 1: X = sqrt(g) I, N = (g - 1) I.
pub fn amplifier(gain: f64, tols: &Tolerances) -> Result<LinearBosonicChannel, ChannelError> {
    if gain < 1.0 {
        return Err(ChannelError::Dimension(format!(
            "amplifier gain must be >= 1, got {gain}"
        )));
    }
    gaussian_channel(
        RMat::identity(2).scale(math::sqrt(gain)),
        RMat::identity(2).scale(gain - 1.0),
        vec![0.0; 2],
        tols,
    )
}
