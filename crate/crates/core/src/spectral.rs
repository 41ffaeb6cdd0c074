//! Per-parity diagonalization in the displaced basis and back-transformation
//! of the eigenvectors to the ordinary `(atom) ⊗ (Fock)` basis.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::symmetric_eig;
use crate::model::{
    build_parity_block_with, displacement_matrix, displacement_overlap, ModelParams, OverlapFn,
    Parity, TruncationPolicy,
};

/// Norm the back-transformation may lose per state before it is an error.
pub const NORM_LOSS_LIMIT: f64 = 1e-8;

/// One eigenpair of a parity-sector matrix.
#[derive(Debug, Clone, Serialize)]
pub struct DisplacedLevel {
    pub energy: f64,
    pub parity: Parity,
    /// Displaced-basis coefficients `c_n`, `n = 0..=n_tr`, unit norm.
    pub coeffs: Vec<f64>,
}

/// Spectrum of one subsystem at a given truncation. Levels are grouped by
/// parity (`+` first) and ascending in energy within each group.
#[derive(Debug, Clone, Serialize)]
pub struct DisplacedSpectrum {
    pub params: ModelParams,
    pub n_tr: usize,
    pub levels: Vec<DisplacedLevel>,
}

impl DisplacedSpectrum {
    pub fn energies(&self, parity: Parity) -> impl Iterator<Item = f64> + '_ {
        self.levels
            .iter()
            .filter(move |l| l.parity == parity)
            .map(|l| l.energy)
    }

    /// All energies, ascending, both parities merged.
    pub fn sorted_energies(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.levels.iter().map(|l| l.energy).collect();
        e.sort_by(f64::total_cmp);
        e
    }
}

/// An eigenstate expressed in the ordinary Fock basis of the physical mode.
///
/// The eigenvectors of the real symmetric problem are real, so the photon
/// amplitudes are stored as `f64`.
#[derive(Debug, Clone)]
pub struct OriginalBasisState {
    pub energy: f64,
    pub parity: Parity,
    pub phi_up: Vec<f64>,
    pub phi_down: Vec<f64>,
    /// `1 − ‖state‖²` before renormalization.
    pub norm_loss: f64,
}

/// All eigenstates of one subsystem in a common Fock space.
#[derive(Debug, Clone)]
pub struct Eigenbasis {
    pub params: ModelParams,
    pub n_tr: usize,
    pub n_fock: usize,
    pub states: Vec<OriginalBasisState>,
}

/// Fock dimension used for back-transformation at truncation `n_tr`.
///
/// A displaced state `D(−g)|n⟩` occupies Fock numbers up to roughly
/// `(√n + g)²`; the margin on top of that keeps the tail below
/// [`NORM_LOSS_LIMIT`] for the highest retained level.
pub fn default_fock_dim(n_tr: usize, g: f64) -> usize {
    let n = n_tr as f64;
    let edge = 2.0 * g * n.sqrt() + g * g;
    n_tr + (edge + 8.0 * g + 4.0 * n.cbrt()).ceil() as usize + 16
}

/// Diagonalize both parity sectors at a fixed truncation.
pub fn solve_fixed(params: &ModelParams, n_tr: usize) -> Result<DisplacedSpectrum> {
    solve_fixed_with(params, n_tr, displacement_overlap)
}

pub fn solve_fixed_with(
    params: &ModelParams,
    n_tr: usize,
    overlap: OverlapFn,
) -> Result<DisplacedSpectrum> {
    let mut levels = Vec::with_capacity(2 * (n_tr + 1));
    for parity in Parity::BOTH {
        let block = build_parity_block_with(params, parity, n_tr, overlap)?;
        let eig = symmetric_eig(&block.matrix)?;
        for (j, &energy) in eig.values.iter().enumerate() {
            levels.push(DisplacedLevel {
                energy,
                parity,
                coeffs: eig.vectors.column(j).iter().copied().collect(),
            });
        }
    }
    Ok(DisplacedSpectrum {
        params: *params,
        n_tr,
        levels,
    })
}

/// Largest change of the retained eigenvalues between two truncations.
///
/// The retained levels are the lower half of each parity sector of `coarse`;
/// the upper half is dominated by truncation artifacts at any `n_tr`.
pub fn retained_eigenvalue_shift(coarse: &DisplacedSpectrum, fine: &DisplacedSpectrum) -> f64 {
    let keep = coarse.n_tr / 2 + 1;
    Parity::BOTH
        .iter()
        .flat_map(|&p| {
            coarse
                .energies(p)
                .zip(fine.energies(p))
                .take(keep)
                .map(|(a, b)| (a - b).abs())
        })
        .fold(0.0, f64::max)
}

/// Energies of the retained levels (lower half of each sector), ascending.
///
/// Also returns the highest energy below which the list is complete: the
/// smallest per-sector cutoff.
pub fn retained_energies(spec: &DisplacedSpectrum) -> (Vec<f64>, f64) {
    let keep = spec.n_tr / 2 + 1;
    let mut all = Vec::new();
    let mut complete_below = f64::INFINITY;
    for p in Parity::BOTH {
        let kept: Vec<f64> = spec.energies(p).take(keep).collect();
        complete_below = complete_below.min(kept.last().copied().unwrap_or(f64::NEG_INFINITY));
        all.extend(kept);
    }
    all.sort_by(f64::total_cmp);
    (all, complete_below)
}

/// Diagonalize one subsystem, doubling `n_tr` until the retained eigenvalues
/// move by less than the policy tolerance.
///
/// The concurrence-curve criterion needs both subsystems and a time grid, so
/// it is applied by [`crate::engine::Engine`]; on its own this function
/// always judges convergence on the spectrum.
pub fn solve_subsystem(
    params: &ModelParams,
    policy: &TruncationPolicy,
) -> Result<DisplacedSpectrum> {
    solve_subsystem_with(params, policy, displacement_overlap)
}

pub fn solve_subsystem_with(
    params: &ModelParams,
    policy: &TruncationPolicy,
    overlap: OverlapFn,
) -> Result<DisplacedSpectrum> {
    params.validate()?;
    policy.validate()?;
    if policy.is_fixed() {
        return solve_fixed_with(params, policy.n_tr_initial, overlap);
    }

    let mut n = policy.n_tr_initial;
    let mut current = solve_fixed_with(params, n, overlap)?;
    let mut last_dev = f64::INFINITY;
    while 2 * n <= policy.n_tr_max {
        let finer = solve_fixed_with(params, 2 * n, overlap)?;
        last_dev = retained_eigenvalue_shift(&current, &finer);
        if last_dev < policy.convergence_tol {
            return Ok(current);
        }
        n *= 2;
        current = finer;
    }
    Err(Error::NonConvergence {
        n_tr_max: policy.n_tr_max,
        last_n_tr: n,
        last_deviation: last_dev,
        tolerance: policy.convergence_tol,
    })
}

/// Express every eigenvector in the ordinary Fock basis truncated at
/// `n_fock` photons.
///
/// The rotated upper component is `u = Σ c_n D(−g)|n⟩`; undoing the π/4
/// rotation puts `u_k` on the upper atomic level when `s·(−1)^k = +1` and on
/// the lower level otherwise (`s` the sector parity).
pub fn to_original_basis(spec: &DisplacedSpectrum, n_fock: usize) -> Result<Eigenbasis> {
    if n_fock < spec.n_tr + 1 {
        return Err(Error::InvalidParams(format!(
            "n_fock ({n_fock}) must exceed n_tr ({})",
            spec.n_tr
        )));
    }
    let g = spec.params.g;
    let basis = displacement_matrix(-g, n_fock, spec.n_tr + 1);

    let mut states = Vec::with_capacity(spec.levels.len());
    for (index, level) in spec.levels.iter().enumerate() {
        let mut u = vec![0.0; n_fock];
        for (n, &c) in level.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for (uk, &dk) in u.iter_mut().zip(basis.column(n).iter()) {
                *uk += dk * c;
            }
        }
        let norm2: f64 = u.iter().map(|x| x * x).sum();
        let norm_loss = 1.0 - norm2;
        if norm_loss > NORM_LOSS_LIMIT {
            return Err(Error::NormLoss {
                index,
                loss: norm_loss,
                n_fock,
            });
        }
        let scale = norm2.sqrt().recip();
        let even_on_up = level.parity == Parity::Plus;
        let mut phi_up = vec![0.0; n_fock];
        let mut phi_down = vec![0.0; n_fock];
        for (k, &uk) in u.iter().enumerate() {
            if (k % 2 == 0) == even_on_up {
                phi_up[k] = uk * scale;
            } else {
                phi_down[k] = uk * scale;
            }
        }
        states.push(OriginalBasisState {
            energy: level.energy,
            parity: level.parity,
            phi_up,
            phi_down,
            norm_loss,
        });
    }
    Ok(Eigenbasis {
        params: spec.params,
        n_tr: spec.n_tr,
        n_fock,
        states,
    })
}
