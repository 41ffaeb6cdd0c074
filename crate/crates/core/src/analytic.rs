//! Closed-form concurrence baselines: the rotating-wave result and the
//! renormalized RWA model obtained by eliminating the counter-rotating terms
//! to second order in the coupling.
//!
//! Both reduce to a single excitation oscillating as `4N² sin²(νt/2)` per
//! subsystem. Here the coupling entering the formulas is the dimensional
//! `λ = g·ω`.

use serde::Serialize;

use crate::bipartite::{BellKind, BellSpec};
use crate::model::ModelParams;

/// Amplitude factor `N` and Rabi frequency `ν` of one subsystem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Oscillation {
    pub n_factor: f64,
    pub nu: f64,
}

impl Oscillation {
    /// From an RWA-form detuning and coupling. At zero coupling `N` is the
    /// continuous limit: `0` off resonance, `1/2` on resonance.
    pub fn from_rwa(detuning: f64, coupling: f64) -> Self {
        if coupling == 0.0 {
            let n_factor = if detuning == 0.0 { 0.5 } else { 0.0 };
            return Oscillation {
                n_factor,
                nu: detuning.abs(),
            };
        }
        let ratio = detuning / (2.0 * coupling);
        Oscillation {
            n_factor: 0.5 / (1.0 + ratio * ratio).sqrt(),
            nu: (detuning * detuning + 4.0 * coupling * coupling).sqrt(),
        }
    }

    /// Excited population transferred to the field, `4N² sin²(νt/2)`.
    pub fn transfer(&self, t: f64) -> f64 {
        let s = (0.5 * self.nu * t).sin();
        4.0 * self.n_factor * self.n_factor * s * s
    }
}

/// Parameters of the renormalized RWA Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectiveParams {
    pub delta_eff: f64,
    pub g_eff: f64,
    /// `δ_eff = ω − Δ_eff`.
    pub delta_detuning_eff: f64,
    pub n_factor: f64,
    pub nu: f64,
    /// False when `Δ_eff < 0`, i.e. the coupling is far outside the range
    /// where the second-order elimination makes sense.
    pub valid: bool,
}

impl EffectiveParams {
    pub fn oscillation(&self) -> Oscillation {
        Oscillation {
            n_factor: self.n_factor,
            nu: self.nu,
        }
    }
}

pub fn effective_params(params: &ModelParams) -> EffectiveParams {
    let (w, d) = (params.omega, params.delta_atom);
    let lambda = params.coupling();
    let sum = w + d;
    let delta_eff = d * (1.0 - 2.0 * lambda * lambda / (sum * sum));
    let g_eff = lambda * 2.0 * d / sum;
    let detuning_eff = w - delta_eff;
    let osc = Oscillation::from_rwa(detuning_eff, g_eff);
    let valid = delta_eff >= 0.0;
    if !valid {
        log::warn!(
            "effective splitting {delta_eff:.4} is negative at g = {}; the transformed \
             model is outside its validity range",
            params.g
        );
    }
    EffectiveParams {
        delta_eff,
        g_eff,
        delta_detuning_eff: detuning_eff,
        n_factor: osc.n_factor,
        nu: osc.nu,
        valid,
    }
}

/// RWA oscillation with the bare detuning and coupling.
pub fn rwa_oscillation(params: &ModelParams) -> Oscillation {
    Oscillation::from_rwa(params.detuning(), params.coupling())
}

/// Concurrence for two subsystems each following a single-excitation
/// oscillation. With `p_i = 1 − 4N_i² sin²(ν_i t/2)`:
/// anti-correlated `|sin2α|·√(p₁p₂)`,
/// correlated `√(p₁p₂)·max(0, |sin2α| − 2cos²α·√((1−p₁)(1−p₂)))`.
pub fn concurrence_two_atom(
    first: &Oscillation,
    second: &Oscillation,
    bell: &BellSpec,
    t: f64,
) -> f64 {
    let (x1, x2) = (first.transfer(t), second.transfer(t));
    let (p1, p2) = ((1.0 - x1).max(0.0), (1.0 - x2).max(0.0));
    let s2a = (2.0 * bell.alpha).sin().abs();
    match bell.kind {
        BellKind::AntiCorrelated => s2a * (p1 * p2).sqrt(),
        BellKind::Correlated => {
            let c2 = bell.alpha.cos().powi(2);
            (p1 * p2).sqrt() * (s2a - 2.0 * c2 * (x1 * x2).sqrt()).max(0.0)
        }
    }
}

/// `|sin2α|·[1 − 4N² sin²(νt/2)]` for identical atoms.
pub fn concurrence_bell1_transformed(params: &ModelParams, alpha: f64, t: f64) -> f64 {
    let x = effective_params(params).oscillation().transfer(t);
    (2.0 * alpha).sin().abs() * (1.0 - x)
}

/// `max(0, [1 − 4N²s²]·(|sin2α| − 8N²s² cos²α))` with `s = sin(νt/2)`.
pub fn concurrence_bell2_transformed(params: &ModelParams, alpha: f64, t: f64) -> f64 {
    let x = effective_params(params).oscillation().transfer(t);
    ((1.0 - x) * ((2.0 * alpha).sin().abs() - 2.0 * x * alpha.cos().powi(2))).max(0.0)
}

/// Sudden-death condition `|tan α| < 4N² sin²(νt/2)` of the transformed
/// model with a correlated initial state.
pub fn esd_predicate(params: &ModelParams, alpha: f64, t: f64) -> bool {
    alpha.tan().abs() < effective_params(params).oscillation().transfer(t)
}

/// Transformed-model concurrence for possibly different atoms.
pub fn concurrence_transformed(
    params1: &ModelParams,
    params2: &ModelParams,
    bell: &BellSpec,
    t: f64,
) -> f64 {
    concurrence_two_atom(
        &effective_params(params1).oscillation(),
        &effective_params(params2).oscillation(),
        bell,
        t,
    )
}

/// RWA concurrence for identical atoms.
pub fn concurrence_rwa(params: &ModelParams, bell: &BellSpec, t: f64) -> f64 {
    let osc = rwa_oscillation(params);
    concurrence_two_atom(&osc, &osc, bell, t)
}

pub fn concurrence_rwa_pair(
    params1: &ModelParams,
    params2: &ModelParams,
    bell: &BellSpec,
    t: f64,
) -> f64 {
    concurrence_two_atom(
        &rwa_oscillation(params1),
        &rwa_oscillation(params2),
        bell,
        t,
    )
}

/// First zero of the correlated-state concurrence for identical atoms,
/// `2·asin(√(|tanα|/4N²))/ν`, or `None` if the curve never dies.
pub fn first_death_time(osc: &Oscillation, alpha: f64) -> Option<f64> {
    let need = alpha.tan().abs() / (4.0 * osc.n_factor * osc.n_factor);
    if !(need <= 1.0) || osc.nu == 0.0 {
        return None;
    }
    Some(2.0 * need.sqrt().asin() / osc.nu)
}

/// Mean photon numbers `(n₁, n₂)` of the single-excitation model.
pub fn photon_numbers(
    first: &Oscillation,
    second: &Oscillation,
    bell: &BellSpec,
    t: f64,
) -> (f64, f64) {
    let (c2, s2) = (bell.alpha.cos().powi(2), bell.alpha.sin().powi(2));
    let (x1, x2) = (first.transfer(t), second.transfer(t));
    match bell.kind {
        BellKind::AntiCorrelated => (c2 * x1, s2 * x2),
        BellKind::Correlated => (c2 * x1, c2 * x2),
    }
}
