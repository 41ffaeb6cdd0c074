//! Spectral time evolution of one atom–cavity subsystem started from
//! `|σ⟩ ⊗ |0⟩` (photon vacuum of the physical mode).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::model::ModelParams;
use crate::spectral::{default_fock_dim, to_original_basis, DisplacedSpectrum, Eigenbasis};

/// Atomic level of the initial product state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AtomLevel {
    Up,
    Down,
}

/// Uniform grid of `n` samples on `[0, t_max]`.
pub fn uniform_grid(t_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::InvalidGrid(format!(
            "t_max must be positive, got {t_max}"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidGrid(format!(
            "need at least 2 samples, got {n}"
        )));
    }
    let dt = t_max / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i + 1 == n { t_max } else { i as f64 * dt })
        .collect())
}

pub fn validate_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidGrid("time grid is empty".into()));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidGrid(
            "time grid has non-finite entries".into(),
        ));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidGrid("time grid must be nondecreasing".into()));
    }
    Ok(())
}

/// Photon-space components of one subsystem on a time grid.
#[derive(Debug, Clone)]
pub struct SubsystemTrajectory {
    pub params: ModelParams,
    pub initial: AtomLevel,
    pub n_tr: usize,
    pub n_fock: usize,
    pub times: Vec<f64>,
    pub comp_up: Vec<Vec<Complex64>>,
    pub comp_down: Vec<Vec<Complex64>>,
    /// Eigenbasis expansion `(E_l, h_l)` of the initial state.
    pub expansion: Vec<(f64, f64)>,
}

impl SubsystemTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn norm_sq(&self, t_index: usize) -> f64 {
        sq_norm(&self.comp_up[t_index]) + sq_norm(&self.comp_down[t_index])
    }

    pub fn norm_error(&self, t_index: usize) -> f64 {
        (self.norm_sq(t_index) - 1.0).abs()
    }
}

fn sq_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Evolve `|initial⟩ ⊗ |0⟩` under the subsystem Hamiltonian.
///
/// The spectrum is back-transformed at [`default_fock_dim`].
pub fn evolve_subsystem(
    spec: &DisplacedSpectrum,
    initial: AtomLevel,
    times: &[f64],
) -> Result<SubsystemTrajectory> {
    let basis = to_original_basis(spec, default_fock_dim(spec.n_tr, spec.params.g))?;
    evolve_in_basis(&basis, initial, times, Execution::Parallel)
}

/// Evolve using an already back-transformed eigenbasis.
///
/// `|φ(t)⟩ = Σ_l h_l e^{−iE_l t} |φ_l⟩` with `h_l = ⟨φ_l|σ, 0⟩`.
pub fn evolve_in_basis(
    basis: &Eigenbasis,
    initial: AtomLevel,
    times: &[f64],
    exec: Execution,
) -> Result<SubsystemTrajectory> {
    validate_grid(times)?;
    let n_fock = basis.n_fock;

    let terms: Vec<(f64, f64, &[f64], &[f64])> = basis
        .states
        .iter()
        .filter_map(|s| {
            let h = match initial {
                AtomLevel::Up => s.phi_up[0],
                AtomLevel::Down => s.phi_down[0],
            };
            (h != 0.0).then_some((s.energy, h, s.phi_up.as_slice(), s.phi_down.as_slice()))
        })
        .collect();

    let comps = map_indexed(exec, times.len(), |ti| {
        let t = times[ti];
        let mut up = vec![Complex64::new(0.0, 0.0); n_fock];
        let mut down = vec![Complex64::new(0.0, 0.0); n_fock];
        for &(energy, h, phi_up, phi_down) in &terms {
            let amp = Complex64::from_polar(h, -energy * t);
            for ((z, &p), (w, &q)) in up.iter_mut().zip(phi_up).zip(down.iter_mut().zip(phi_down)) {
                *z += amp * p;
                *w += amp * q;
            }
        }
        (up, down)
    });
    let (comp_up, comp_down) = comps.into_iter().unzip();

    Ok(SubsystemTrajectory {
        params: basis.params,
        initial,
        n_tr: basis.n_tr,
        n_fock,
        times: times.to_vec(),
        comp_up,
        comp_down,
        expansion: terms.iter().map(|&(e, h, _, _)| (e, h)).collect(),
    })
}

/// ⟨a†a⟩ at one grid point.
pub fn mean_photon_number(traj: &SubsystemTrajectory, t_index: usize) -> f64 {
    photon_number(&traj.comp_up[t_index], &traj.comp_down[t_index])
}

pub(crate) fn photon_number(up: &[Complex64], down: &[Complex64]) -> f64 {
    up.iter()
        .zip(down)
        .enumerate()
        .map(|(k, (a, b))| k as f64 * (a.norm_sqr() + b.norm_sqr()))
        .sum()
}

/// ⟨H⟩ at one grid point, evaluated with the Hamiltonian in the truncated
/// Fock basis.
pub fn mean_energy(traj: &SubsystemTrajectory, t_index: usize) -> f64 {
    let p = &traj.params;
    let up = &traj.comp_up[t_index];
    let down = &traj.comp_down[t_index];
    let half = 0.5 * p.delta_atom;

    let mut diag = 0.0;
    for (k, (a, b)) in up.iter().zip(down).enumerate() {
        let kf = k as f64;
        diag += (half + p.omega * kf) * a.norm_sqr() + (-half + p.omega * kf) * b.norm_sqr();
    }
    // ⟨up|(a + a†)|down⟩
    let mut cross = Complex64::new(0.0, 0.0);
    for k in 0..up.len() {
        if k + 1 < down.len() {
            cross += up[k].conj() * down[k + 1] * ((k + 1) as f64).sqrt();
        }
        if k > 0 {
            cross += up[k].conj() * down[k - 1] * (k as f64).sqrt();
        }
    }
    diag + 2.0 * p.coupling() * cross.re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::solve_fixed;

    fn traj(g: f64, level: AtomLevel, times: &[f64], n_tr: usize) -> SubsystemTrajectory {
        let spec = solve_fixed(&ModelParams::resonant(g, 0.0), n_tr).unwrap();
        evolve_subsystem(&spec, level, times).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(uniform_grid(0.0, 10).is_err());
        assert!(uniform_grid(1.0, 1).is_err());
        let g = uniform_grid(30.0, 1500).unwrap();
        assert_eq!(g.len(), 1500);
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 30.0);
        assert!(validate_grid(&[]).is_err());
        assert!(validate_grid(&[0.0, 2.0, 1.0]).is_err());
        assert!(validate_grid(&[0.0, 0.0, 1.0]).is_ok());
    }

    #[test]
    fn decoupled_phase_evolution() {
        let times = uniform_grid(20.0, 101).unwrap();
        let tr = traj(0.0, AtomLevel::Up, &times, 8);
        for (i, &t) in times.iter().enumerate() {
            let expect = Complex64::from_polar(1.0, -0.5 * t);
            assert!((tr.comp_up[i][0] - expect).norm() < 1e-13);
            assert!(tr.comp_up[i][1..].iter().all(|z| z.norm() < 1e-15));
            assert!(tr.comp_down[i].iter().all(|z| z.norm() < 1e-15));
            assert_eq!(mean_photon_number(&tr, i), 0.0);
            assert!((mean_energy(&tr, i) - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn unitarity_and_conservation_at_strong_coupling() {
        let times = uniform_grid(30.0, 301).unwrap();
        for level in [AtomLevel::Up, AtomLevel::Down] {
            let tr = traj(1.0, level, &times, 64);
            let e0 = mean_energy(&tr, 0);
            for i in 0..times.len() {
                assert!(tr.norm_error(i) < 1e-9, "norm {}", tr.norm_error(i));
                assert!((mean_energy(&tr, i) - e0).abs() <= 1e-9 * (e0.abs() + 1.0));
            }
        }
    }

    #[test]
    fn initial_condition_is_reproduced() {
        let tr = traj(0.6, AtomLevel::Down, &[0.0], 48);
        assert!((tr.comp_down[0][0] - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        let rest: f64 = sq_norm(&tr.comp_down[0][1..]) + sq_norm(&tr.comp_up[0]);
        assert!(rest < 1e-20);
        assert!(mean_photon_number(&tr, 0) < 1e-18);
    }

    #[test]
    fn energy_matches_eigen_expansion() {
        let tr = traj(0.5, AtomLevel::Up, &[0.0, 3.0], 48);
        let parseval: f64 = tr.expansion.iter().map(|(e, h)| h * h * e).sum();
        assert!((mean_energy(&tr, 0) - parseval).abs() < 1e-10);
    }

    #[test]
    fn time_reversal() {
        let spec = solve_fixed(&ModelParams::resonant(0.9, 0.0), 48).unwrap();
        let basis = to_original_basis(&spec, default_fock_dim(48, 0.9)).unwrap();
        let t = 7.3;
        let fwd = evolve_in_basis(&basis, AtomLevel::Up, &[t], Execution::Sequential).unwrap();
        // project onto the eigenbasis and undo the phases
        let mut back_up = vec![Complex64::new(0.0, 0.0); basis.n_fock];
        let mut back_down = back_up.clone();
        for s in &basis.states {
            let overlap: Complex64 = s
                .phi_up
                .iter()
                .zip(&fwd.comp_up[0])
                .chain(s.phi_down.iter().zip(&fwd.comp_down[0]))
                .map(|(p, z)| z * p)
                .sum();
            let amp = overlap * Complex64::from_polar(1.0, s.energy * t);
            for k in 0..basis.n_fock {
                back_up[k] += amp * s.phi_up[k];
                back_down[k] += amp * s.phi_down[k];
            }
        }
        assert!((back_up[0] - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        let rest = sq_norm(&back_up[1..]) + sq_norm(&back_down);
        assert!(rest.sqrt() < 1e-10);
    }

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        let spec = solve_fixed(&ModelParams::resonant(0.4, 0.0), 24).unwrap();
        let basis = to_original_basis(&spec, default_fock_dim(24, 0.4)).unwrap();
        let times = uniform_grid(10.0, 64).unwrap();
        let a = evolve_in_basis(&basis, AtomLevel::Up, &times, Execution::Sequential).unwrap();
        let b = evolve_in_basis(&basis, AtomLevel::Up, &times, Execution::Parallel).unwrap();
        assert_eq!(a.comp_up, b.comp_up);
        assert_eq!(a.comp_down, b.comp_down);
    }
}
