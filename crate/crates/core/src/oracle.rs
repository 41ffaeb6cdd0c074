//! Brute-force reference path in the raw `(atom) ⊗ (Fock)` basis.
//!
//! Nothing here uses the displaced basis, the crate's own eigensolver or the
//! branch-overlap contraction of [`crate::bipartite`]: the Hamiltonian is
//! assembled entry by entry, diagonalized with nalgebra and propagated either
//! spectrally or with an adaptive Runge–Kutta stepper. Two-atom states are
//! built as explicit amplitude matrices and traced out index by index.

use nalgebra::{DMatrix, Matrix4, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::bipartite::{BellKind, BellSpec};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::model::ModelParams;

/// Fock dimension used for single-subsystem oracle runs.
pub const DEFAULT_ORACLE_FOCK: usize = 200;
/// Fock dimension per cavity for the two-atom oracle.
pub const DEFAULT_JOINT_FOCK: usize = 80;
pub const MIN_STEP: f64 = 1e-12;

/// `H` of one subsystem with basis index `σ·n_fock + m`, `σ = 0` for the
/// upper atomic level.
#[derive(Debug, Clone)]
pub struct RawHamiltonian {
    pub params: ModelParams,
    pub n_fock: usize,
    pub matrix: DMatrix<f64>,
}

pub fn build_raw_hamiltonian(params: &ModelParams, n_fock: usize) -> Result<RawHamiltonian> {
    params.validate()?;
    if n_fock < 2 {
        return Err(Error::InvalidParams(format!(
            "n_fock must be at least 2, got {n_fock}"
        )));
    }
    let dim = 2 * n_fock;
    let lambda = params.g * params.omega;
    let mut h = DMatrix::zeros(dim, dim);
    for m in 0..n_fock {
        h[(m, m)] = 0.5 * params.delta_atom + params.omega * m as f64;
        h[(n_fock + m, n_fock + m)] = -0.5 * params.delta_atom + params.omega * m as f64;
        if m + 1 < n_fock {
            let c = lambda * ((m + 1) as f64).sqrt();
            // σx couples |↑,m⟩ with |↓,m±1⟩
            for (i, j) in [(m, n_fock + m + 1), (m + 1, n_fock + m)] {
                h[(i, j)] = c;
                h[(j, i)] = c;
            }
        }
    }
    Ok(RawHamiltonian {
        params: *params,
        n_fock,
        matrix: h,
    })
}

impl RawHamiltonian {
    pub fn dim(&self) -> usize {
        2 * self.n_fock
    }

    /// Basis vector `|σ, 0⟩`.
    pub fn vacuum_state(&self, up: bool) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.dim()];
        v[if up { 0 } else { self.n_fock }] = Complex64::new(1.0, 0.0);
        v
    }

    /// Diagonal of `Π = σz (−1)^{a†a}`.
    pub fn parity_diagonal(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| {
                let (atom, m) = (i / self.n_fock, i % self.n_fock);
                let s = if atom == 0 { 1.0 } else { -1.0 };
                if m % 2 == 0 {
                    s
                } else {
                    -s
                }
            })
            .collect()
    }

    pub fn eigen(&self) -> RawSpectrum {
        let eig = SymmetricEigen::new(self.matrix.clone());
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        RawSpectrum {
            values: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
            vectors: DMatrix::from_fn(self.dim(), self.dim(), |r, c| {
                eig.eigenvectors[(r, order[c])]
            }),
        }
    }

    /// Nonzero entries by row.
    fn sparse_rows(&self) -> Vec<Vec<(usize, f64)>> {
        (0..self.dim())
            .map(|i| {
                (0..self.dim())
                    .filter_map(|j| {
                        let v = self.matrix[(i, j)];
                        (v != 0.0).then_some((j, v))
                    })
                    .collect()
            })
            .collect()
    }

    pub fn expectation(&self, psi: &[Complex64]) -> f64 {
        let mut acc = 0.0;
        for (i, row) in self.sparse_rows().iter().enumerate() {
            for &(j, v) in row {
                acc += (psi[i].conj() * psi[j] * v).re;
            }
        }
        acc
    }
}

#[derive(Debug, Clone)]
pub struct RawSpectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

/// Ascending spectrum of `H` truncated at `n_fock` photons.
pub fn oracle_spectrum(params: &ModelParams, n_fock: usize) -> Result<Vec<f64>> {
    Ok(build_raw_hamiltonian(params, n_fock)?.eigen().values)
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn check_initial(raw: &RawHamiltonian, initial: &[Complex64], times: &[f64]) -> Result<()> {
    if initial.len() != raw.dim() {
        return Err(Error::InvalidParams(format!(
            "initial state has length {}, expected {}",
            initial.len(),
            raw.dim()
        )));
    }
    if (norm(initial) - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParams(
            "initial state must have unit norm".into(),
        ));
    }
    if times.is_empty()
        || times.windows(2).any(|w| w[1] < w[0])
        || times.iter().any(|t| !t.is_finite())
    {
        return Err(Error::InvalidGrid(
            "times must be nonempty, finite and nondecreasing".into(),
        ));
    }
    Ok(())
}

/// `e^{−iHt}|initial⟩` on every grid time by full diagonalization.
pub fn propagate_eig(
    raw: &RawHamiltonian,
    initial: &[Complex64],
    times: &[f64],
) -> Result<Vec<Vec<Complex64>>> {
    check_initial(raw, initial, times)?;
    Ok(propagate_with(&raw.eigen(), initial, times))
}

fn propagate_with(spec: &RawSpectrum, initial: &[Complex64], times: &[f64]) -> Vec<Vec<Complex64>> {
    let dim = initial.len();
    let coeffs: Vec<Complex64> = (0..dim)
        .map(|l| (0..dim).map(|i| initial[i] * spec.vectors[(i, l)]).sum())
        .collect();
    map_indexed(Execution::Parallel, times.len(), |ti| {
        let t = times[ti];
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for (l, c) in coeffs.iter().enumerate() {
            if c.norm_sqr() == 0.0 {
                continue;
            }
            let amp = c * Complex64::from_polar(1.0, -spec.values[l] * t);
            for (o, &v) in out.iter_mut().zip(spec.vectors.column(l).iter()) {
                *o += amp * v;
            }
        }
        out
    })
}

/// Per-step tolerance of [`propagate_step`] (max-norm of the step-doubling
/// error estimate).
pub const STEP_TOL: f64 = 1e-12;

/// Classical fourth-order Runge–Kutta with step-doubling error control and
/// Richardson correction, reporting the state at every grid time.
pub fn propagate_step(
    raw: &RawHamiltonian,
    initial: &[Complex64],
    times: &[f64],
    dt_max: f64,
) -> Result<Vec<Vec<Complex64>>> {
    check_initial(raw, initial, times)?;
    if !(dt_max > 0.0) {
        return Err(Error::InvalidParams(format!(
            "dt_max must be positive, got {dt_max}"
        )));
    }
    if times[0] < 0.0 {
        return Err(Error::InvalidGrid("the stepper starts at t = 0".into()));
    }
    let rows = raw.sparse_rows();
    // dψ/dt = −iHψ
    let deriv = |psi: &[Complex64], out: &mut [Complex64]| {
        for (o, row) in out.iter_mut().zip(&rows) {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(j, v) in row {
                acc += psi[j] * v;
            }
            *o = Complex64::new(acc.im, -acc.re);
        }
    };
    let dim = raw.dim();
    let mut k = [(); 4].map(|_| vec![Complex64::new(0.0, 0.0); dim]);
    let mut tmp = vec![Complex64::new(0.0, 0.0); dim];
    let mut rk4 = |y: &[Complex64], h: f64, out: &mut Vec<Complex64>| {
        deriv(y, &mut k[0]);
        for i in 0..dim {
            tmp[i] = y[i] + k[0][i] * (0.5 * h);
        }
        deriv(&tmp, &mut k[1]);
        for i in 0..dim {
            tmp[i] = y[i] + k[1][i] * (0.5 * h);
        }
        deriv(&tmp, &mut k[2]);
        for i in 0..dim {
            tmp[i] = y[i] + k[2][i] * h;
        }
        deriv(&tmp, &mut k[3]);
        out.clear();
        out.extend(
            (0..dim).map(|i| y[i] + (k[0][i] + (k[1][i] + k[2][i]) * 2.0 + k[3][i]) * (h / 6.0)),
        );
    };

    let mut out = Vec::with_capacity(times.len());
    let mut y = initial.to_vec();
    let mut t = 0.0;
    let mut h = dt_max.min(1e-2);
    let (mut full, mut half, mut two) = (Vec::new(), Vec::new(), Vec::new());
    for &target in times {
        while t < target {
            let step = h.min(target - t);
            rk4(&y, step, &mut full);
            rk4(&y, 0.5 * step, &mut half);
            rk4(&half, 0.5 * step, &mut two);
            let err = full
                .iter()
                .zip(&two)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            if err <= STEP_TOL {
                for i in 0..dim {
                    y[i] = two[i] + (two[i] - full[i]) / 15.0;
                }
                t = if step == target - t { target } else { t + step };
                let grow = if err == 0.0 {
                    2.0
                } else {
                    (0.9 * (STEP_TOL / err).powf(0.2)).min(2.0)
                };
                h = (h * grow.max(1.0)).min(dt_max);
            } else {
                h = step * (0.9 * (STEP_TOL / err).powf(0.2)).max(0.1);
                if h < MIN_STEP {
                    return Err(Error::StepUnderflow {
                        t,
                        min_dt: MIN_STEP,
                    });
                }
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

/// ⟨a†a⟩ of a raw-basis state.
pub fn photon_number(state: &[Complex64], n_fock: usize) -> f64 {
    state
        .iter()
        .enumerate()
        .map(|(i, z)| (i % n_fock) as f64 * z.norm_sqr())
        .sum()
}

/// Probability in the top quarter of Fock levels.
pub fn tail_mass(state: &[Complex64], n_fock: usize) -> f64 {
    let start = n_fock - n_fock / 4;
    state
        .iter()
        .enumerate()
        .filter(|(i, _)| i % n_fock >= start)
        .map(|(_, z)| z.norm_sqr())
        .sum()
}

/// Wootters concurrence from the decomposition `ρ = Σ v_i v_i†`: the
/// singular values of `τ_ij = v_iᵀ (σy⊗σy) v_j` are the `√λ_i`.
pub fn concurrence_tau(rho: &Matrix4<Complex64>) -> f64 {
    let eig = SymmetricEigen::new((rho + rho.adjoint()) * Complex64::new(0.5, 0.0));
    let mut v = Matrix4::<Complex64>::zeros();
    for i in 0..4 {
        let p = eig.eigenvalues[i].max(0.0).sqrt();
        v.set_column(i, &(eig.eigenvectors.column(i) * Complex64::new(p, 0.0)));
    }
    let mut y = Matrix4::<Complex64>::zeros();
    y[(0, 3)] = Complex64::new(-1.0, 0.0);
    y[(3, 0)] = Complex64::new(-1.0, 0.0);
    y[(1, 2)] = Complex64::new(1.0, 0.0);
    y[(2, 1)] = Complex64::new(1.0, 0.0);
    let tau = v.transpose() * y * v;
    let mut s: Vec<f64> = SVD::new(tau, false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    (s[0] - s[1] - s[2] - s[3]).max(0.0)
}

/// Two-atom reference results on a time grid.
#[derive(Debug, Clone)]
pub struct OracleSeries {
    pub times: Vec<f64>,
    pub rho: Vec<Matrix4<Complex64>>,
    pub concurrence: Vec<f64>,
    pub photon1: Vec<f64>,
    pub photon2: Vec<f64>,
    /// Largest top-quarter Fock occupation seen in either cavity.
    pub tail_mass: f64,
}

/// Joint two-atom propagation with `n_fock` photons per cavity.
///
/// Because the subsystems do not interact, `e^{−iHt}` factorizes and each
/// Bell component evolves as a product; the joint state is assembled as the
/// amplitude matrix `Ψ[(σ₁,k₁),(σ₂,k₂)]` and the photons are traced out
/// from it directly.
pub fn oracle_concurrence_series(
    params1: &ModelParams,
    params2: &ModelParams,
    bell: &BellSpec,
    times: &[f64],
    n_fock: usize,
) -> Result<OracleSeries> {
    let h1 = build_raw_hamiltonian(params1, n_fock)?;
    let h2 = build_raw_hamiltonian(params2, n_fock)?;
    let (e1, e2) = (h1.eigen(), h2.eigen());
    let evolve = |h: &RawHamiltonian, e: &RawSpectrum, up: bool| {
        let init = h.vacuum_state(up);
        check_initial(h, &init, times).map(|_| propagate_with(e, &init, times))
    };
    let (c, s) = (bell.alpha.cos(), bell.alpha.sin());
    let (first, second) = match bell.kind {
        BellKind::AntiCorrelated => ([true, false], [false, true]),
        BellKind::Correlated => ([true, false], [true, false]),
    };
    let a = [evolve(&h1, &e1, first[0])?, evolve(&h1, &e1, first[1])?];
    let b = [evolve(&h2, &e2, second[0])?, evolve(&h2, &e2, second[1])?];
    let weights = [c, s];
    let dim = 2 * n_fock;

    let rows = map_indexed(Execution::Parallel, times.len(), |ti| {
        let psi = DMatrix::from_fn(dim, dim, |i, j| {
            weights[0] * a[0][ti][i] * b[0][ti][j] + weights[1] * a[1][ti][i] * b[1][ti][j]
        });
        let mut rho = Matrix4::<Complex64>::zeros();
        for s1 in 0..2 {
            for s2 in 0..2 {
                for r1 in 0..2 {
                    for r2 in 0..2 {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for k1 in 0..n_fock {
                            for k2 in 0..n_fock {
                                acc += psi[(s1 * n_fock + k1, s2 * n_fock + k2)]
                                    * psi[(r1 * n_fock + k1, r2 * n_fock + k2)].conj();
                            }
                        }
                        rho[(2 * s1 + s2, 2 * r1 + r2)] = acc;
                    }
                }
            }
        }
        let mut n1 = 0.0;
        let mut n2 = 0.0;
        let mut tail = 0.0f64;
        let start = n_fock - n_fock / 4;
        for i in 0..dim {
            for j in 0..dim {
                let p = psi[(i, j)].norm_sqr();
                let (k1, k2) = (i % n_fock, j % n_fock);
                n1 += k1 as f64 * p;
                n2 += k2 as f64 * p;
                if k1 >= start || k2 >= start {
                    tail += p;
                }
            }
        }
        (rho, concurrence_tau(&rho), n1, n2, tail)
    });

    Ok(OracleSeries {
        times: times.to_vec(),
        rho: rows.iter().map(|r| r.0).collect(),
        concurrence: rows.iter().map(|r| r.1).collect(),
        photon1: rows.iter().map(|r| r.2).collect(),
        photon2: rows.iter().map(|r| r.3).collect(),
        tail_mass: rows.iter().map(|r| r.4).fold(0.0, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_dev(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
        a.iter()
            .zip(b)
            .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).norm()))
            .fold(0.0, f64::max)
    }

    #[test]
    fn decoupled_spectrum() {
        let e = oracle_spectrum(&ModelParams::resonant(0.0, 0.0), 10).unwrap();
        for (i, x) in e.iter().enumerate() {
            // pairs m ± 1/2 are degenerate: -1/2, 1/2, 1/2, 3/2, 3/2, ...
            let expect = i.div_ceil(2) as f64 - 0.5;
            assert!((x - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn hamiltonian_commutes_with_parity() {
        let raw = build_raw_hamiltonian(&ModelParams::resonant(0.7, 0.0), 30).unwrap();
        let p = raw.parity_diagonal();
        for i in 0..raw.dim() {
            for j in 0..raw.dim() {
                assert_eq!(raw.matrix[(i, j)] * p[j], p[i] * raw.matrix[(i, j)]);
            }
        }
        assert_eq!(raw.matrix, raw.matrix.transpose());
    }

    #[test]
    fn ground_energy_self_convergence() {
        let p = ModelParams::resonant(1.0, 0.0);
        let a = oracle_spectrum(&p, 200).unwrap()[0];
        let b = oracle_spectrum(&p, 300).unwrap()[0];
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn eig_propagation_basics() {
        let raw = build_raw_hamiltonian(&ModelParams::resonant(0.5, 0.0), 60).unwrap();
        let init = raw.vacuum_state(true);
        let times: Vec<f64> = (0..21).map(|i| i as f64 * 0.5).collect();
        let traj = propagate_eig(&raw, &init, &times).unwrap();
        assert!(max_dev(&traj[..1], &[init]) < 1e-14);
        for s in &traj {
            assert!((norm(s) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn decoupled_step_phases() {
        let raw = build_raw_hamiltonian(&ModelParams::resonant(0.0, 0.0), 8).unwrap();
        let times = [0.0, 1.0, 5.0, 10.0];
        let traj = propagate_step(&raw, &raw.vacuum_state(true), &times, 0.1).unwrap();
        for (s, &t) in traj.iter().zip(&times) {
            assert!((s[0] - Complex64::from_polar(1.0, -0.5 * t)).norm() < 1e-10);
        }
    }

    #[test]
    fn propagators_agree() {
        let raw = build_raw_hamiltonian(&ModelParams::resonant(0.5, 0.0), 40).unwrap();
        let init = raw.vacuum_state(false);
        let times: Vec<f64> = (0..11).map(|i| i as f64).collect();
        let a = propagate_eig(&raw, &init, &times).unwrap();
        let b = propagate_step(&raw, &init, &times, 0.05).unwrap();
        assert!(max_dev(&a, &b) < 1e-8, "{}", max_dev(&a, &b));
    }

    #[test]
    fn tau_concurrence_of_werner() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [0.0, s, -s, 0.0].map(|x| Complex64::new(x, 0.0));
        for &p in &[0.2, 0.6, 1.0] {
            let rho = Matrix4::from_fn(|i, j| psi[i] * psi[j].conj() * p)
                + Matrix4::identity() * Complex64::new(0.25 * (1.0 - p), 0.0);
            let expect = ((3.0 * p - 1.0) / 2.0).max(0.0);
            assert!((concurrence_tau(&rho) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn bad_inputs() {
        let p = ModelParams::resonant(0.1, 0.0);
        assert!(build_raw_hamiltonian(&p, 1).is_err());
        let raw = build_raw_hamiltonian(&p, 4).unwrap();
        assert!(propagate_eig(&raw, &[Complex64::new(0.0, 0.0); 8], &[0.0]).is_err());
        assert!(propagate_step(&raw, &raw.vacuum_state(true), &[1.0, 0.5], 0.1).is_err());
    }
}
