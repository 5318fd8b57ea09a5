//! Stinespring simulation of Gaussian dilations on the truncated Fock space:
//! build the ancilla state from its characteristic function, apply the
//! completion's Gaussian unitary as a gate chain, and trace out the ancilla.
//!
//! Cost guards are dimension-based. Small joint systems conjugate densely;
//! mid-sized ones run a spectral path that applies the gate chain to the
//! significant eigenvectors of rho (x) sigma, which is what makes a 3-mode
//! joint system at moderate cutoff tractable.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::quadrature::operator_from_char_unchecked;
use super::unitary::{apply_gate_vec, gates_to_dense, symplectic_to_gates};
use super::{fock_dim, FockError, FockOperator, QuadratureGrid};
use crate::dilation::GaussianDilation;
use crate::linalg::{self, CMat};

/// Cost guards for the Stinespring path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationGuards {
    /// Joint dimensions up to this bound conjugate the dense unitary.
    pub dense_dim_cap: usize,
    /// Joint dimensions up to this bound may use the spectral path.
    pub total_dim_cap: usize,
    /// Maximum number of eigenpair products in the spectral path.
    pub max_spectral_terms: usize,
    /// Eigenvalues below this weight are dropped in the spectral path.
    pub spectral_chop: f64,
}

impl Default for SimulationGuards {
    fn default() -> Self {
        SimulationGuards {
            dense_dim_cap: 1024,
            total_dim_cap: 4600,
            max_spectral_terms: 96,
            spectral_chop: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct StinespringResult {
    pub output: FockOperator,
    /// Trace captured by the ancilla reconstruction before renormalization.
    pub ancilla_trace_captured: f64,
    /// Trace of the (non-renormalized) output; deviation from 1 is the
    /// truncation leakage through the unitary.
    pub output_trace: f64,
}

/// Apply a Gaussian dilation to a Fock-space density operator.
pub fn stinespring_apply(
    d: &GaussianDilation,
    rho: &FockOperator,
    grid: &QuadratureGrid,
    guards: &SimulationGuards,
) -> Result<StinespringResult, FockError> {
    if rho.n != d.n {
        return Err(FockError::Dimension(alloc::format!(
            "state has {} modes, dilation acts on {}",
            rho.n,
            d.n
        )));
    }
    let cutoff = rho.cutoff;

    if d.m == 0 {
        let output = apply_output_displacement(d, rho.clone())?;
        let output_trace = output.trace().re;
        return Ok(StinespringResult {
            output,
            ancilla_trace_captured: 1.0,
            output_trace,
        });
    }

    let sigma_raw = operator_from_char_unchecked(&d.ancilla, d.m, grid, cutoff)?;
    let captured = sigma_raw.trace().re;
    if captured < 0.5 {
        return Err(FockError::CutoffTooSmall { captured });
    }
    let sigma = FockOperator {
        n: d.m,
        cutoff,
        matrix: sigma_raw
            .matrix
            .scale(Complex64::new(1.0 / captured, 0.0)),
    };

    let joint_modes = d.n + d.m;
    let dim_total = fock_dim(joint_modes, cutoff)?;
    if dim_total > guards.total_dim_cap {
        return Err(FockError::ModeCountGuard {
            dim: dim_total,
            cap: guards.total_dim_cap,
        });
    }
    let gates = symplectic_to_gates(&d.completion.s, cutoff, 1e-8)?;

    let out_matrix = if dim_total <= guards.dense_dim_cap {
        let u = gates_to_dense(&gates, joint_modes, cutoff)?;
        let joint = rho.matrix.kron(&sigma.matrix);
        let evolved = u.matmul(&joint).matmul(&u.adjoint());
        partial_trace_last_matrix(&evolved, d.n, d.m, cutoff)
    } else {
        spectral_path(
            rho,
            &sigma,
            &gates,
            d.n,
            d.m,
            cutoff,
            guards.max_spectral_terms,
            guards.spectral_chop,
        )?
    };

    let output = apply_output_displacement(
        d,
        FockOperator {
            n: d.n,
            cutoff,
            matrix: out_matrix,
        },
    )?;
    let output_trace = output.trace().re;
    Ok(StinespringResult {
        output,
        ancilla_trace_captured: captured,
        output_trace,
    })
}

fn apply_output_displacement(
    d: &GaussianDilation,
    state: FockOperator,
) -> Result<FockOperator, FockError> {
    if d.s.iter().all(|&v| v == 0.0) {
        return Ok(state);
    }
    let disp = super::displacement::displacement_op(&d.s, state.cutoff)?;
    let moved = disp
        .matrix
        .matmul(&state.matrix)
        .matmul(&disp.matrix.adjoint());
    Ok(FockOperator {
        n: state.n,
        cutoff: state.cutoff,
        matrix: moved,
    })
}

fn partial_trace_last_matrix(m: &CMat, n_keep: usize, n_env: usize, cutoff: usize) -> CMat {
    let d_keep = cutoff.pow(n_keep as u32);
    let d_env = cutoff.pow(n_env as u32);
    let mut out = CMat::zeros(d_keep, d_keep);
    for i in 0..d_keep {
        for j in 0..d_keep {
            let mut acc = Complex64::new(0.0, 0.0);
            for e in 0..d_env {
                acc += m[(i * d_env + e, j * d_env + e)];
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// Significant eigenpairs of a near-density operator: weights clamped at
/// zero, rescaled so the kept weights sum to the original trace.
fn significant_eigenpairs(
    op: &FockOperator,
    chop: f64,
) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let (evals, vecs) = linalg::herm_eig(&op.matrix.hermitize());
    let dim = op.matrix.rows;
    let trace: f64 = evals.iter().sum();
    let mut weights = Vec::new();
    let mut kept = Vec::new();
    for (idx, &lam) in evals.iter().enumerate() {
        if lam > chop {
            weights.push(lam);
            kept.push((0..dim).map(|r| vecs[(r, idx)]).collect::<Vec<_>>());
        }
    }
    let kept_sum: f64 = weights.iter().sum();
    if kept_sum > 0.0 && trace > 0.0 {
        let scale = trace / kept_sum;
        for w in weights.iter_mut() {
            *w *= scale;
        }
    }
    (weights, kept)
}

#[allow(clippy::too_many_arguments)]
fn spectral_path(
    rho: &FockOperator,
    sigma: &FockOperator,
    gates: &[super::unitary::Gate],
    n: usize,
    m: usize,
    cutoff: usize,
    max_terms: usize,
    chop: f64,
) -> Result<CMat, FockError> {
    let (wr, vr) = significant_eigenpairs(rho, chop);
    let (ws, vs) = significant_eigenpairs(sigma, chop);
    let terms = wr.len() * ws.len();
    if terms > max_terms {
        return Err(FockError::ModeCountGuard {
            dim: terms,
            cap: max_terms,
        });
    }
    let d_keep = cutoff.pow(n as u32);
    let d_env = cutoff.pow(m as u32);
    let joint_modes = n + m;
    let mut out = CMat::zeros(d_keep, d_keep);
    let mut psi = vec![Complex64::new(0.0, 0.0); d_keep * d_env];
    for (pa, va) in wr.iter().zip(vr.iter()) {
        for (qb, vb) in ws.iter().zip(vs.iter()) {
            for (i, a) in va.iter().enumerate() {
                let base = i * d_env;
                for (e, b) in vb.iter().enumerate() {
                    psi[base + e] = *a * *b;
                }
            }
            for gate in gates {
                apply_gate_vec(gate, &mut psi, joint_modes, cutoff);
            }
            let weight = pa * qb;
            for i in 0..d_keep {
                for j in 0..d_keep {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for e in 0..d_env {
                        acc += psi[i * d_env + e] * psi[j * d_env + e].conj();
                    }
                    out[(i, j)] += acc.scale(weight);
                }
            }
        }
    }
    Ok(out)
}

trait ScaleByReal {
    fn scale(self, f: f64) -> Complex64;
}
impl ScaleByReal for Complex64 {
    fn scale(self, f: f64) -> Complex64 {
        Complex64::new(self.re * f, self.im * f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{self, amplifier};
    use crate::char_fn::{CharFn, Sampler};
    use crate::dilation::{approx_fixed_unitary, exact_dilation, Provenance};
    use crate::fock::{char_of_operator, coherent_state_fock, trace_distance, vacuum_state_fock};
    use crate::linalg::RMat;
    use crate::math::Rng;
    use crate::phase_space::symplectic_complete;
    use crate::Tolerances;

    #[test]
    fn trivial_dilation_returns_input() {
        let x = RMat::identity(2);
        let comp = symplectic_complete(&x, &RMat::zeros(0, 2), 1e-9).unwrap();
        let d = GaussianDilation {
            n: 1,
            m: 0,
            x,
            y: RMat::zeros(0, 2),
            s: vec![0.0; 2],
            ancilla: CharFn::One,
            completion: comp,
            provenance: Provenance::Exact,
            fixed_data: None,
        };
        let rho = coherent_state_fock(&[Complex64::new(0.3, -0.1)], 12).unwrap();
        let grid = QuadratureGrid::default_for_modes(1);
        let res = stinespring_apply(&d, &rho, &grid, &SimulationGuards::default()).unwrap();
        assert!(trace_distance(&res.output, &rho).unwrap() < 1e-12);
    }

    #[test]
    fn amplifier_exact_dilation_matches_char_prediction() {
        let tols = Tolerances::default();
        let ch = amplifier(2.0, &tols).unwrap();
        let d = exact_dilation(&ch, &tols).unwrap();
        let cutoff = 15;
        let rho = vacuum_state_fock(1, cutoff).unwrap();
        let grid = QuadratureGrid::new(8.0, 0.05).unwrap();
        let res = stinespring_apply(&d, &rho, &grid, &SimulationGuards::default()).unwrap();
        assert!((res.output_trace - 1.0).abs() < 0.05, "trace {}", res.output_trace);

        // predicted output characteristic function: chi(X xi) f(xi)
        let state = CharFn::gaussian(RMat::identity(2), vec![0.0; 2]).unwrap();
        let predicted = channels::apply_to_char(&ch, &state).unwrap();
        let mut rng = Rng::new(100);
        let mut worst = 0.0f64;
        for _ in 0..40 {
            let xi = rng.ball_point(2, 2.0);
            let got = char_of_operator(&res.output, &xi).unwrap();
            let expect = predicted.eval(&xi).unwrap();
            worst = worst.max((got - expect).norm_sqr().sqrt());
        }
        assert!(worst <= 5e-2, "char discrepancy {worst}");
    }

    #[test]
    fn fixed_unitary_identity_on_coherent() {
        // 3-mode joint system at cutoff 15 exercises the spectral path
        let tols = Tolerances::default();
        let ch = channels::make_channel(
            RMat::identity(2),
            CharFn::One,
            &Sampler::with_seed(101),
            &tols,
        )
        .unwrap();
        let eps = 0.05;
        let d = approx_fixed_unitary(&ch, eps, &tols).unwrap();
        assert_eq!(d.m, 2);
        let cutoff = 15;
        let alpha = Complex64::new(0.3, 0.0);
        let rho = coherent_state_fock(&[alpha], cutoff).unwrap();
        let grid = QuadratureGrid::new(8.0, 0.05).unwrap();
        let res = stinespring_apply(&d, &rho, &grid, &SimulationGuards::default()).unwrap();
        let dist = trace_distance(&res.output, &rho).unwrap();
        assert!(dist <= 0.1, "distance to input {dist}");
        assert!(res.ancilla_trace_captured > 0.8);
    }
}
