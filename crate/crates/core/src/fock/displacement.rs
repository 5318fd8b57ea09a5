//! Displacement operators on the truncated number basis.
//!
//! Matrix elements use the associated-Laguerre closed form evaluated by the
//! three-term recurrence in the photon-number index, which stays stable far
//! beyond the cutoffs this crate uses. The phase-space convention ties
//! D(xi) = e^{i xi^T Omega r} to the complex displacement
//! alpha = -(xi_x + i xi_p)/sqrt(2) per mode.

use num_complex::Complex64;

use super::{FockError, FockOperator};
use crate::linalg::CMat;
use crate::math;

/// Complex displacement amplitude of one mode's phase-space pair.
pub fn alpha_of_xi(x: f64, p: f64) -> Complex64 {
    Complex64::new(-x / core::f64::consts::SQRT_2, -p / core::f64::consts::SQRT_2)
}

/// Single-mode D(alpha) = exp(alpha a^dag - conj(alpha) a) at the cutoff.
pub fn displacement_single(alpha: Complex64, cutoff: usize) -> CMat {
    let d = cutoff;
    let xsq = alpha.norm_sqr();
    let envelope = math::exp(-0.5 * xsq);
    let mut out = CMat::zeros(d, d);

    // diagonal offset k = |row - col|
    let mut pref_upper = Complex64::new(1.0, 0.0); // alpha^k / sqrt(k!)
    let mut pref_lower = Complex64::new(1.0, 0.0); // (-conj(alpha))^k / sqrt(k!)
    for k in 0..d {
        if k > 0 {
            let rk = math::sqrt(k as f64);
            pref_upper = pref_upper * alpha / rk;
            pref_lower = pref_lower * (-alpha.conj()) / rk;
        }
        // Laguerre L_n^{(k)}(xsq) by recurrence in n, with the
        // sqrt(n!/(n+k)!) scale folded in step by step.
        let mut lag_prev = 0.0f64;
        let mut lag = 1.0f64; // L_0
        let mut scale = 1.0f64; // sqrt(n! / (n+k)!) relative to n = 0
        for n in 0..(d - k) {
            if n > 0 {
                let nf = n as f64;
                let next = ((2.0 * nf - 1.0 + k as f64 - xsq) * lag
                    - (nf - 1.0 + k as f64) * lag_prev)
                    / nf;
                lag_prev = lag;
                lag = next;
                scale *= math::sqrt(nf / (nf + k as f64));
            }
            let magnitude = envelope * scale * lag;
            out[(n + k, n)] = pref_upper * magnitude;
            if k > 0 {
                out[(n, n + k)] = pref_lower * magnitude;
            }
        }
    }
    out
}

/// Multi-mode displacement D(xi) on the truncated Fock space, mode-major
/// tensor ordering (mode 0 on the slowest index).
pub fn displacement_op(xi: &[f64], cutoff: usize) -> Result<FockOperator, FockError> {
    if xi.len() % 2 != 0 || xi.is_empty() {
        return Err(FockError::Dimension(alloc::format!(
            "phase-space point must have even positive length, got {}",
            xi.len()
        )));
    }
    if cutoff < 2 {
        return Err(FockError::Dimension(alloc::format!(
            "cutoff must be at least 2, got {cutoff}"
        )));
    }
    let n_modes = xi.len() / 2;
    let dim = super::fock_dim(n_modes, cutoff)?;
    let _ = dim;
    let mut mat = displacement_single(alpha_of_xi(xi[0], xi[1]), cutoff);
    for mode in 1..n_modes {
        let next = displacement_single(alpha_of_xi(xi[2 * mode], xi[2 * mode + 1]), cutoff);
        mat = mat.kron(&next);
    }
    Ok(FockOperator {
        n: n_modes,
        cutoff,
        matrix: mat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::Rng;

    #[test]
    fn zero_displacement_is_identity() {
        let d = displacement_op(&[0.0, 0.0], 10).unwrap();
        assert!(d.matrix.sub(&CMat::identity(10)).max_abs() < 1e-15);
        let d2 = displacement_op(&[0.0; 4], 5).unwrap();
        assert!(d2.matrix.sub(&CMat::identity(25)).max_abs() < 1e-15);
    }

    #[test]
    fn vacuum_matrix_element() {
        // <0| D(xi) |0> = e^{-xi.xi/4}, cutoff independent
        let mut rng = Rng::new(61);
        for cutoff in [4usize, 12, 40] {
            for _ in 0..10 {
                let xi = [rng.uniform_in(-2.0, 2.0), rng.uniform_in(-2.0, 2.0)];
                let d = displacement_op(&xi, cutoff).unwrap();
                let expect = math::exp(-0.25 * (xi[0] * xi[0] + xi[1] * xi[1]));
                let got = d.matrix[(0, 0)];
                assert!(
                    (got - Complex64::new(expect, 0.0)).norm_sqr() < 1e-24,
                    "cutoff {cutoff}, xi {xi:?}"
                );
            }
        }
    }

    #[test]
    fn unitary_up_to_truncation() {
        let d = displacement_op(&[0.7, -0.4], 40).unwrap();
        let prod = d.matrix.adjoint().matmul(&d.matrix);
        // check the low corner where truncation leakage is negligible
        for i in 0..20 {
            for j in 0..20 {
                let expect = if i == j { 1.0 } else { 0.0 };
                let got = prod[(i, j)];
                assert!(
                    math::hypot(got.re - expect, got.im) < 1e-10,
                    "({i},{j}): {got}"
                );
            }
        }
    }

    #[test]
    fn weyl_relation_at_cutoff_40() {
        let mut rng = Rng::new(62);
        for _ in 0..5 {
            let xi1: Vec<f64> = (0..2).map(|_| rng.uniform_in(-0.7, 0.7)).collect();
            let xi2: Vec<f64> = (0..2).map(|_| rng.uniform_in(-0.7, 0.7)).collect();
            let sum: Vec<f64> = xi1.iter().zip(xi2.iter()).map(|(a, b)| a + b).collect();
            let d1 = displacement_op(&xi1, 40).unwrap();
            let d2 = displacement_op(&xi2, 40).unwrap();
            let ds = displacement_op(&sum, 40).unwrap();
            let lhs = d1.matrix.matmul(&d2.matrix);
            let phase =
                crate::math::cis(-0.5 * crate::char_fn::symplectic_form_product(&xi1, &xi2));
            let rhs = ds.matrix.scale(phase);
            // the product truncates intermediate states, so leakage lives in
            // the indices near the cutoff; the observation window is the
            // lower half, where the elements have converged
            let mut worst = 0.0f64;
            for i in 0..20 {
                for j in 0..20 {
                    let diff = lhs[(i, j)] - rhs[(i, j)];
                    worst = worst.max(math::hypot(diff.re, diff.im));
                }
            }
            assert!(worst <= 1e-6, "Weyl relation residual {worst}");
        }
    }

    #[test]
    fn matches_brute_force_exponential() {
        let cutoff = 14;
        let alpha = Complex64::new(0.4, -0.3);
        let a = lowering(cutoff);
        let gen = a.adjoint().scale(alpha).sub(&a.scale(alpha.conj()));
        let brute = crate::linalg::expm(&gen);
        let closed = displacement_single(alpha, cutoff);
        let mut worst = 0.0f64;
        for i in 0..8 {
            for j in 0..8 {
                let diff = brute[(i, j)] - closed[(i, j)];
                worst = worst.max(math::hypot(diff.re, diff.im));
            }
        }
        assert!(worst < 1e-7, "brute-force residual {worst}");
    }

    fn lowering(cutoff: usize) -> CMat {
        CMat::from_fn(cutoff, cutoff, |m, n| {
            if n >= 1 && m == n - 1 {
                Complex64::new(math::sqrt(n as f64), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }
}
