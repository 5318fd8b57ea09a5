//! Gaussian unitaries on the truncated Fock space.
//!
//! A symplectic S factors as K_a Z K_b with K_a, K_b orthogonal symplectic
//! (passive) and Z a direct sum of single-mode squeezers diag(z, 1/z). The
//! passive factors map to complex unitaries on mode space, which a Givens
//! nulling pass reduces to two-mode rotations plus per-mode phases. Each
//! factor exponentiates a truncated quadratic generator, so the construction
//! is total: no matrix logarithm of S itself is ever needed.
//!
//! Conventions: the Fock operator U built for S satisfies
//! U^dag D(zeta) U = D(S zeta) up to truncation leakage.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::{fock_dim, FockError, FockOperator};
use crate::linalg::{self, CMat, RMat};
use crate::math;
use crate::phase_space::omega;

/// One factor of a Gaussian unitary, ready for application in the listed
/// order (index 0 acts first on kets).
#[derive(Debug, Clone)]
pub enum Gate {
    Single { mode: usize, mat: CMat },
    Pair { a: usize, b: usize, mat: CMat },
}

/// Euler decomposition S = K_a Z K_b.
struct Euler {
    k_a: RMat,
    z: Vec<f64>,
    k_b: RMat,
}

fn euler_decompose(s: &RMat, tol: f64) -> Result<Euler, FockError> {
    let dim = s.rows;
    let n_modes = dim / 2;
    let om = omega(n_modes);
    let residual = s.transpose().matmul(&om).matmul(s).sub(&om).max_abs();
    if residual > tol {
        return Err(FockError::NonSymplectic { residual });
    }

    // polar part: P = (S^T S)^{1/2}, O1 = S P^{-1}
    let m = s.transpose().matmul(s);
    let (evals_m, v_m) = linalg::sym_eig(&m);
    let mut p = RMat::zeros(dim, dim);
    let mut p_inv = RMat::zeros(dim, dim);
    let mut l = RMat::zeros(dim, dim);
    for j in 0..dim {
        let lam = evals_m[j].max(1e-300);
        let sq = math::sqrt(lam);
        let col = v_m.column(j);
        for r in 0..dim {
            for c in 0..dim {
                let outer = col[r] * col[c];
                p[(r, c)] += sq * outer;
                p_inv[(r, c)] += outer / sq;
                l[(r, c)] += 0.5 * math::ln(lam) * outer;
            }
        }
    }
    let o1 = s.matmul(&p_inv);

    // pair the eigenstructure of L = ln P: (r, v) <-> (-r, Omega^T v)
    let (evals_l, v_l) = linalg::sym_eig(&l);
    let scale = evals_l.iter().fold(1.0f64, |m, &x| m.max(x.abs()));
    let zero_thresh = 1e-10 * scale.max(1.0);
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(dim);
    let mut z_values: Vec<f64> = Vec::with_capacity(n_modes);
    let mut pos: Vec<(f64, usize)> = evals_l
        .iter()
        .enumerate()
        .filter(|(_, &lam)| lam > zero_thresh)
        .map(|(idx, &lam)| (lam, idx))
        .collect();
    pos.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    for &(r, idx) in &pos {
        let v = v_l.column(idx);
        let om_t_v = om.transpose().matvec(&v);
        z_values.push(math::exp(r));
        columns.push(v);
        columns.push(om_t_v);
    }
    // kernel pairs
    for idx in 0..dim {
        if columns.len() == dim {
            break;
        }
        if evals_l[idx].abs() > zero_thresh {
            continue;
        }
        let mut v = v_l.column(idx);
        for b in &columns {
            let dot: f64 = b.iter().zip(v.iter()).map(|(x, y)| x * y).sum();
            for (vi, bi) in v.iter_mut().zip(b.iter()) {
                *vi -= dot * bi;
            }
        }
        let norm = math::sqrt(v.iter().map(|x| x * x).sum::<f64>());
        if norm < 1e-8 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= norm;
        }
        let om_t_v = om.transpose().matvec(&v);
        z_values.push(1.0);
        columns.push(v);
        columns.push(om_t_v);
    }
    if columns.len() != dim {
        return Err(FockError::NonSymplectic {
            residual: f64::INFINITY,
        });
    }
    let mut k2 = RMat::zeros(dim, dim);
    for (c, col) in columns.iter().enumerate() {
        k2.set_column(c, col);
    }

    let k_a = o1.matmul(&k2);
    let k_b = k2.transpose();

    // reconstruction check
    let mut z_mat = RMat::zeros(dim, dim);
    for (j, &z) in z_values.iter().enumerate() {
        z_mat[(2 * j, 2 * j)] = z;
        z_mat[(2 * j + 1, 2 * j + 1)] = 1.0 / z;
    }
    let rec = k_a.matmul(&z_mat).matmul(&k_b).sub(s).max_abs();
    if rec > 1e-8 * s.max_abs().max(1.0) {
        return Err(FockError::NonSymplectic { residual: rec });
    }
    Ok(Euler {
        k_a,
        z: z_values,
        k_b,
    })
}

/// Complex unitary of a passive (orthogonal symplectic) matrix in xpxp
/// ordering: u[a][b] = K[2a][2b] + i K[2a+1][2b].
fn passive_to_unitary(k: &RMat) -> CMat {
    let m = k.rows / 2;
    CMat::from_fn(m, m, |a, b| {
        Complex64::new(k[(2 * a, 2 * b)], k[(2 * a + 1, 2 * b)])
    })
}

/// Hermitian angle of a 2x2 unitary: W = e^{i Phi}.
fn unitary_2x2_log(w: &CMat) -> CMat {
    let tr = w[(0, 0)] + w[(1, 1)];
    let det = w[(0, 0)] * w[(1, 1)] - w[(0, 1)] * w[(1, 0)];
    let disc = math::csqrt(tr * tr - det.scale_complex(4.0));
    let lam1 = (tr + disc) * Complex64::new(0.5, 0.0);
    let lam2 = (tr - disc) * Complex64::new(0.5, 0.0);
    if (lam1 - lam2).norm_sqr() < 1e-24 {
        // scalar multiple of the identity
        let theta = math::atan2(lam1.im, lam1.re);
        return CMat::from_fn(2, 2, |i, j| {
            if i == j {
                Complex64::new(theta, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
    }
    // eigenvector for lam1
    let cand1 = [w[(0, 1)], lam1 - w[(0, 0)]];
    let cand2 = [lam1 - w[(1, 1)], w[(1, 0)]];
    let n1 = cand1[0].norm_sqr() + cand1[1].norm_sqr();
    let n2 = cand2[0].norm_sqr() + cand2[1].norm_sqr();
    let v = if n1 >= n2 { cand1 } else { cand2 };
    let norm = math::sqrt(v[0].norm_sqr() + v[1].norm_sqr());
    let v1 = [v[0] / norm, v[1] / norm];
    // orthogonal complement is the second eigenvector (normal matrix)
    let v2 = [-(v1[1].conj()), v1[0].conj()];
    let th1 = math::atan2(lam1.im, lam1.re);
    let th2 = math::atan2(lam2.im, lam2.re);
    CMat::from_fn(2, 2, |i, j| {
        v1[i] * v1[j].conj() * th1 + v2[i] * v2[j].conj() * th2
    })
}

trait ScaleComplex {
    fn scale_complex(self, f: f64) -> Complex64;
}
impl ScaleComplex for Complex64 {
    fn scale_complex(self, f: f64) -> Complex64 {
        Complex64::new(self.re * f, self.im * f)
    }
}

/// Truncated annihilation operator.
fn lowering(cutoff: usize) -> CMat {
    CMat::from_fn(cutoff, cutoff, |m, n| {
        if n >= 1 && m == n - 1 {
            Complex64::new(math::sqrt(n as f64), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Squeezer gate implementing the block diag(z, 1/z):
/// exp((ln z / 2)(a^2 - a^dag^2)).
fn squeezer_gate(z: f64, cutoff: usize) -> CMat {
    let r = 0.5 * math::ln(z);
    let a = lowering(cutoff);
    let asq = a.matmul(&a);
    let gen = asq.sub(&asq.adjoint()).scale(Complex64::new(r, 0.0));
    linalg::expm(&gen)
}

/// Phase gate diag(e^{-i theta k}) implementing the scalar unitary e^{i theta}.
fn phase_gate(theta: f64, cutoff: usize) -> CMat {
    CMat::from_fn(cutoff, cutoff, |i, j| {
        if i == j {
            math::cis(-theta * i as f64)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Two-mode gate for the 2x2 unitary w acting on a mode pair:
/// exp(-i sum_ab Phi_ab a_a^dag a_b) with w = e^{i Phi}.
fn pair_gate(w: &CMat, cutoff: usize) -> CMat {
    let phi = unitary_2x2_log(w);
    let d = cutoff;
    let mut h = CMat::zeros(d * d, d * d);
    for k0 in 0..d {
        for k1 in 0..d {
            let col = k0 * d + k1;
            h[(col, col)] = phi[(0, 0)] * Complex64::new(k0 as f64, 0.0)
                + phi[(1, 1)] * Complex64::new(k1 as f64, 0.0);
            // a0^dag a1 raises k0, lowers k1
            if k1 >= 1 && k0 + 1 < d {
                let row = (k0 + 1) * d + (k1 - 1);
                let amp = math::sqrt(((k0 + 1) * k1) as f64);
                h[(row, col)] += phi[(0, 1)] * Complex64::new(amp, 0.0);
            }
            // a1^dag a0 lowers k0, raises k1
            if k0 >= 1 && k1 + 1 < d {
                let row = (k0 - 1) * d + (k1 + 1);
                let amp = math::sqrt((k0 * (k1 + 1)) as f64);
                h[(row, col)] += phi[(1, 0)] * Complex64::new(amp, 0.0);
            }
        }
    }
    let gen = h.scale(Complex64::new(0.0, -1.0));
    linalg::expm(&gen)
}

/// Decompose a passive complex unitary into two-mode Givens factors plus
/// per-mode phases, emitted in application order.
fn passive_gates(u: &CMat, cutoff: usize, gates: &mut Vec<Gate>) {
    let m = u.rows;
    let mut v = u.clone();
    // null the subdiagonal column by column; record W acting on rows (j, i)
    let mut rotations: Vec<(usize, usize, CMat)> = Vec::new();
    for j in 0..m {
        for i in (j + 1)..m {
            let vjj = v[(j, j)];
            let vij = v[(i, j)];
            let r = math::sqrt(vjj.norm_sqr() + vij.norm_sqr());
            if vij.norm_sqr() < 1e-30 {
                continue;
            }
            let w = CMat::from_fn(2, 2, |a, b| match (a, b) {
                (0, 0) => vjj.conj() / r,
                (0, 1) => vij.conj() / r,
                (1, 0) => -vij / r,
                (1, 1) => vjj / r,
                _ => unreachable!(),
            });
            // apply to rows (j, i) of v
            for c in 0..m {
                let a = v[(j, c)];
                let b = v[(i, c)];
                v[(j, c)] = w[(0, 0)] * a + w[(0, 1)] * b;
                v[(i, c)] = w[(1, 0)] * a + w[(1, 1)] * b;
            }
            rotations.push((j, i, w));
        }
    }
    // u = W_1^dag W_2^dag ... W_r^dag D; application order is W_1^dag first,
    // the phases last
    for (j, i, w) in rotations.iter() {
        let wd = w.adjoint();
        if wd.sub(&CMat::identity(2)).max_abs() > 1e-14 {
            gates.push(Gate::Pair {
                a: *j,
                b: *i,
                mat: pair_gate(&wd, cutoff),
            });
        }
    }
    for k in 0..m {
        let theta = math::atan2(v[(k, k)].im, v[(k, k)].re);
        if theta.abs() > 1e-14 {
            gates.push(Gate::Single {
                mode: k,
                mat: phase_gate(theta, cutoff),
            });
        }
    }
}

/// Build the gate chain (application order) whose product implements S.
pub fn symplectic_to_gates(
    s: &RMat,
    cutoff: usize,
    tol: f64,
) -> Result<Vec<Gate>, FockError> {
    let euler = euler_decompose(s, tol)?;
    let mut gates = Vec::new();
    // U(S) = U(K_b) U(Z) U(K_a) as operators; K_a gates apply first
    passive_gates(&passive_to_unitary(&euler.k_a), cutoff, &mut gates);
    for (mode, &z) in euler.z.iter().enumerate() {
        if (z - 1.0).abs() > 1e-14 {
            gates.push(Gate::Single {
                mode,
                mat: squeezer_gate(z, cutoff),
            });
        }
    }
    passive_gates(&passive_to_unitary(&euler.k_b), cutoff, &mut gates);
    Ok(gates)
}

/// Apply one gate to a ket vector (mode-major ordering, mode 0 slowest).
pub fn apply_gate_vec(gate: &Gate, psi: &mut [Complex64], n_modes: usize, d: usize) {
    match gate {
        Gate::Single { mode, mat } => {
            let stride = d.pow((n_modes - 1 - mode) as u32);
            let outer = d.pow(*mode as u32);
            let mut scratch = vec![Complex64::new(0.0, 0.0); d];
            for o in 0..outer {
                for b in 0..stride {
                    let base = o * d * stride + b;
                    for k in 0..d {
                        scratch[k] = psi[base + k * stride];
                    }
                    for k in 0..d {
                        let mut acc = Complex64::new(0.0, 0.0);
                        let row = k * d;
                        for l in 0..d {
                            acc += mat.data[row + l] * scratch[l];
                        }
                        psi[base + k * stride] = acc;
                    }
                }
            }
        }
        Gate::Pair { a, b, mat } => {
            let sa = d.pow((n_modes - 1 - a) as u32);
            let sb = d.pow((n_modes - 1 - b) as u32);
            let pre = d.pow(*a as u32);
            let mid = d.pow((b - a - 1) as u32);
            let suf = sb;
            let dd = d * d;
            let mut scratch = vec![Complex64::new(0.0, 0.0); dd];
            for p in 0..pre {
                for m in 0..mid {
                    for s in 0..suf {
                        let base = ((p * d) * (mid * d) + m * d) * suf + s;
                        let _ = base;
                        // rebuild base from digit positions
                        let base = p * (d * sa) + m * (d * sb) + s;
                        for ka in 0..d {
                            for kb in 0..d {
                                scratch[ka * d + kb] = psi[base + ka * sa + kb * sb];
                            }
                        }
                        for row in 0..dd {
                            let mut acc = Complex64::new(0.0, 0.0);
                            let rbase = row * dd;
                            for col in 0..dd {
                                acc += mat.data[rbase + col] * scratch[col];
                            }
                            let (ka, kb) = (row / d, row % d);
                            psi[base + ka * sa + kb * sb] = acc;
                        }
                    }
                }
            }
        }
    }
}

/// Dense product of a gate chain.
pub fn gates_to_dense(gates: &[Gate], n_modes: usize, d: usize) -> Result<CMat, FockError> {
    let dim = fock_dim(n_modes, d)?;
    let mut u = CMat::identity(dim);
    let mut col = vec![Complex64::new(0.0, 0.0); dim];
    for gate in gates {
        for c in 0..dim {
            for r in 0..dim {
                col[r] = u[(r, c)];
            }
            apply_gate_vec(gate, &mut col, n_modes, d);
            for r in 0..dim {
                u[(r, c)] = col[r];
            }
        }
    }
    Ok(u)
}

#[derive(Debug, Clone)]
pub struct GaussianUnitary {
    pub op: FockOperator,
    /// max |U^dag U - I| entry over the truncated space.
    pub unitarity_defect: f64,
}

/// Fock representation of the Gaussian unitary of a symplectic matrix.
/// Guarded to small mode counts; Stinespring simulation of larger systems
/// applies the gate chain without forming the dense operator.
pub fn gaussian_unitary_fock(
    s: &RMat,
    cutoff: usize,
    max_modes: usize,
) -> Result<GaussianUnitary, FockError> {
    let n_modes = s.rows / 2;
    if n_modes == 0 || s.rows % 2 != 0 || !s.is_square() {
        return Err(FockError::Dimension(alloc::format!(
            "symplectic matrix must be 2m x 2m, got {}x{}",
            s.rows,
            s.cols
        )));
    }
    if n_modes > max_modes {
        return Err(FockError::ModeCountGuard {
            dim: n_modes,
            cap: max_modes,
        });
    }
    let gates = symplectic_to_gates(s, cutoff, 1e-9)?;
    let u = gates_to_dense(&gates, n_modes, cutoff)?;
    let defect = u
        .adjoint()
        .matmul(&u)
        .sub(&CMat::identity(u.rows))
        .max_abs();
    Ok(GaussianUnitary {
        op: FockOperator {
            n: n_modes,
            cutoff,
            matrix: u,
        },
        unitarity_defect: defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::displacement::displacement_op;
    use crate::fock::vacuum_state_fock;
    use crate::math::Rng;

    fn rotation_symplectic(theta: f64) -> RMat {
        RMat::from_rows(&[&[theta.cos(), theta.sin()], &[-theta.sin(), theta.cos()]])
    }

    fn beam_splitter_symplectic(theta: f64) -> RMat {
        let (c, s) = (theta.cos(), theta.sin());
        let mut m = RMat::zeros(4, 4);
        for k in 0..2 {
            m[(k, k)] = c;
            m[(k, 2 + k)] = s;
            m[(2 + k, k)] = -s;
            m[(2 + k, 2 + k)] = c;
        }
        m
    }

    #[test]
    fn identity_symplectic_gives_identity() {
        let u = gaussian_unitary_fock(&RMat::identity(4), 6, 2).unwrap();
        assert!(u.op.matrix.sub(&CMat::identity(36)).max_abs() < 1e-12);
        assert!(u.unitarity_defect < 1e-12);
    }

    #[test]
    fn rotation_is_phase_shift() {
        let theta = 0.83;
        let u = gaussian_unitary_fock(&rotation_symplectic(theta), 18, 2).unwrap();
        for k in 0..18 {
            for l in 0..18 {
                let expect = if k == l {
                    math::cis(theta * k as f64)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                let got = u.op.matrix[(k, l)];
                assert!(
                    (got - expect).norm_sqr() < 1e-16,
                    "({k},{l}): {got} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn conjugation_matches_symplectic_action() {
        // U^dag D(zeta) U = D(S zeta): the definitive convention check.
        // Truncation leakage decays exponentially in (cutoff - corner), so a
        // corner of 8 at cutoff 34 sits at the 1e-8 level.
        let mut rng = Rng::new(90);
        let cutoff = 34;
        let cases: Vec<RMat> = vec![
            rotation_symplectic(0.6),
            RMat::diag(&[1.4, 1.0 / 1.4]),
            // generic one-mode symplectic: rotation * squeeze * rotation
            rotation_symplectic(0.3)
                .matmul(&RMat::diag(&[1.25, 0.8]))
                .matmul(&rotation_symplectic(-0.9)),
        ];
        for s in &cases {
            let u = gaussian_unitary_fock(s, cutoff, 2).unwrap();
            for _ in 0..6 {
                let zeta: Vec<f64> = (0..2).map(|_| rng.uniform_in(-0.6, 0.6)).collect();
                let dz = displacement_op(&zeta, cutoff).unwrap();
                let lhs = u.op.matrix.adjoint().matmul(&dz.matrix).matmul(&u.op.matrix);
                let s_zeta = s.matvec(&zeta);
                let rhs = displacement_op(&s_zeta, cutoff).unwrap();
                let mut worst = 0.0f64;
                for i in 0..8 {
                    for j in 0..8 {
                        let diff = lhs[(i, j)] - rhs.matrix[(i, j)];
                        worst = worst.max(math::hypot(diff.re, diff.im));
                    }
                }
                assert!(worst < 1e-6, "S {s:?}, zeta {zeta:?}: residual {worst}");
            }
        }
    }

    #[test]
    fn conjugation_two_mode_beam_splitter() {
        let s = beam_splitter_symplectic(0.4);
        let cutoff = 14;
        let u = gaussian_unitary_fock(&s, cutoff, 2).unwrap();
        let mut rng = Rng::new(91);
        for _ in 0..4 {
            let zeta: Vec<f64> = (0..4).map(|_| rng.uniform_in(-0.4, 0.4)).collect();
            let dz = displacement_op(&zeta, cutoff).unwrap();
            let lhs = u.op.matrix.adjoint().matmul(&dz.matrix).matmul(&u.op.matrix);
            let rhs = displacement_op(&s.matvec(&zeta), cutoff).unwrap();
            // window on multi-indices whose digits stay below cutoff/2
            let mut worst = 0.0f64;
            for i0 in 0..7 {
                for i1 in 0..7 {
                    for j0 in 0..7 {
                        for j1 in 0..7 {
                            let (i, j) = (i0 * cutoff + i1, j0 * cutoff + j1);
                            let diff = lhs[(i, j)] - rhs.matrix[(i, j)];
                            worst = worst.max(math::hypot(diff.re, diff.im));
                        }
                    }
                }
            }
            assert!(worst < 1e-6, "zeta {zeta:?}: residual {worst}");
        }
    }

    #[test]
    fn beam_splitter_preserves_photon_number() {
        let cutoff = 8;
        let u = gaussian_unitary_fock(&beam_splitter_symplectic(0.7), cutoff, 2).unwrap();
        // total-number operator
        let dim = cutoff * cutoff;
        let mut number = CMat::zeros(dim, dim);
        for k0 in 0..cutoff {
            for k1 in 0..cutoff {
                number[(k0 * cutoff + k1, k0 * cutoff + k1)] =
                    Complex64::new((k0 + k1) as f64, 0.0);
            }
        }
        let comm = u
            .op
            .matrix
            .matmul(&number)
            .sub(&number.matmul(&u.op.matrix));
        assert!(comm.max_abs() < 1e-8, "commutator {}", comm.max_abs());
        assert!(u.unitarity_defect < 1e-8);
    }

    #[test]
    fn squeezer_acts_on_vacuum_correctly() {
        // chi_{U rho U^dag}(zeta) = chi_rho(S zeta) on the vacuum
        let z = 1.6f64;
        let s = RMat::diag(&[z, 1.0 / z]);
        let cutoff = 30;
        let u = gaussian_unitary_fock(&s, cutoff, 2).unwrap();
        let vac = vacuum_state_fock(1, cutoff).unwrap();
        let evolved = u
            .op
            .matrix
            .matmul(&vac.matrix)
            .matmul(&u.op.matrix.adjoint());
        let out = FockOperator {
            n: 1,
            cutoff,
            matrix: evolved,
        };
        let mut rng = Rng::new(92);
        for _ in 0..10 {
            let zeta: Vec<f64> = (0..2).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
            let got = crate::fock::char_of_operator(&out, &zeta).unwrap();
            let s_zeta = s.matvec(&zeta);
            let expect = math::exp(-0.25 * (s_zeta[0] * s_zeta[0] + s_zeta[1] * s_zeta[1]));
            assert!(
                (got - Complex64::new(expect, 0.0)).norm_sqr() < 1e-10,
                "zeta {zeta:?}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn mode_guard_enforced() {
        let s = RMat::identity(6);
        assert!(matches!(
            gaussian_unitary_fock(&s, 5, 2),
            Err(FockError::ModeCountGuard { .. })
        ));
    }

    #[test]
    fn rejects_non_symplectic() {
        let s = RMat::identity(2).scale(1.3);
        assert!(matches!(
            gaussian_unitary_fock(&s, 8, 2),
            Err(FockError::NonSymplectic { .. })
        ));
    }

    #[test]
    fn gate_vector_application_matches_dense() {
        let s = beam_splitter_symplectic(0.5).matmul(&{
            // interleave a single-mode squeeze on mode 0
            let mut m = RMat::identity(4);
            m[(0, 0)] = 1.3;
            m[(1, 1)] = 1.0 / 1.3;
            m
        });
        let cutoff = 6;
        let gates = symplectic_to_gates(&s, cutoff, 1e-9).unwrap();
        let dense = gates_to_dense(&gates, 2, cutoff).unwrap();
        let mut rng = Rng::new(93);
        let dim = cutoff * cutoff;
        let mut psi: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.uniform_in(-1.0, 1.0), rng.uniform_in(-1.0, 1.0)))
            .collect();
        let expect = dense.matvec(&psi);
        for g in &gates {
            apply_gate_vec(g, &mut psi, 2, cutoff);
        }
        for (a, b) in psi.iter().zip(expect.iter()) {
            assert!((a - b).norm_sqr() < 1e-20);
        }
    }
}
