//! End-to-end pipeline: truncation search, subsystem evolution and the
//! concurrence series of two independent atom–cavity subsystems.

use crate::bipartite::{
    concurrence_from_factor, detect_esd, joint_snapshot, BellSpec, ConcurrenceSeries,
    DEFAULT_ZERO_THRESHOLD,
};
use crate::dynamics::{evolve_in_basis, validate_grid, AtomLevel, SubsystemTrajectory};
use crate::error::{Error, Result};
use crate::exec::{try_map_indexed, Execution};
use crate::model::{displacement_overlap, ModelParams, Observable, OverlapFn, TruncationPolicy};
use crate::spectral::{
    default_fock_dim, retained_eigenvalue_shift, solve_fixed_with, to_original_basis,
    DisplacedSpectrum, Eigenbasis,
};

/// Largest weight of an initial state allowed outside the truncated
/// eigenbasis.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// Evolution of one subsystem from both atomic levels.
#[derive(Debug, Clone)]
pub struct TrajectoryPair {
    pub up: SubsystemTrajectory,
    pub down: SubsystemTrajectory,
}

#[derive(Debug, Clone, Copy)]
pub struct Engine {
    pub policy: TruncationPolicy,
    pub execution: Execution,
    /// Kernel for the displaced-basis overlaps; replaced only by mutation
    /// fixtures in the validation suite.
    pub overlap: OverlapFn,
    pub zero_threshold: f64,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new(TruncationPolicy::default())
    }
}

impl Engine {
    pub fn new(policy: TruncationPolicy) -> Self {
        Engine {
            policy,
            execution: Execution::default(),
            overlap: displacement_overlap,
            zero_threshold: DEFAULT_ZERO_THRESHOLD,
        }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn with_overlap(mut self, overlap: OverlapFn) -> Self {
        self.overlap = overlap;
        self
    }

    pub fn solve_fixed(&self, params: &ModelParams, n_tr: usize) -> Result<DisplacedSpectrum> {
        solve_fixed_with(params, n_tr, self.overlap)
    }

    /// Spectrum of one subsystem with the truncation chosen on eigenvalues.
    pub fn spectrum(&self, params: &ModelParams) -> Result<DisplacedSpectrum> {
        let policy = TruncationPolicy {
            observable: Observable::Spectrum,
            ..self.policy
        };
        crate::spectral::solve_subsystem_with(params, &policy, self.overlap)
    }

    pub fn eigenbasis(&self, params: &ModelParams, n_tr: usize) -> Result<Eigenbasis> {
        let spec = self.solve_fixed(params, n_tr)?;
        to_original_basis(&spec, default_fock_dim(n_tr, params.g))
    }

    pub fn trajectories(
        &self,
        params: &ModelParams,
        n_tr: usize,
        times: &[f64],
    ) -> Result<TrajectoryPair> {
        let basis = self.eigenbasis(params, n_tr)?;
        let pair = TrajectoryPair {
            up: evolve_in_basis(&basis, AtomLevel::Up, times, self.execution)?,
            down: evolve_in_basis(&basis, AtomLevel::Down, times, self.execution)?,
        };
        for tr in [&pair.up, &pair.down] {
            let defect = 1.0 - tr.expansion.iter().map(|(_, h)| h * h).sum::<f64>();
            if defect > COMPLETENESS_TOL {
                return Err(Error::IncompleteBasis { n_tr, defect });
            }
        }
        Ok(pair)
    }

    /// Concurrence series at a fixed truncation for both subsystems.
    pub fn series_at(
        &self,
        params1: &ModelParams,
        params2: &ModelParams,
        bell: &BellSpec,
        times: &[f64],
        n_tr: usize,
    ) -> Result<ConcurrenceSeries> {
        params1.validate()?;
        params2.validate()?;
        validate_grid(times)?;
        let first = self.trajectories(params1, n_tr, times)?;
        let second = if params2 == params1 {
            None
        } else {
            Some(self.trajectories(params2, n_tr, times)?)
        };
        let second = second.as_ref().unwrap_or(&first);

        let rows = try_map_indexed(self.execution, times.len(), |i| {
            let snap = joint_snapshot(
                (&first.up, &first.down),
                (&second.up, &second.down),
                bell,
                i,
            );
            snap.rho.validate()?;
            let c = concurrence_from_factor(&snap.factor)?;
            let norm = [&first.up, &first.down, &second.up, &second.down]
                .iter()
                .map(|t| t.norm_error(i))
                .fold(0.0, f64::max);
            Ok::<_, Error>((c, snap.photon1, snap.photon2, norm))
        })?;

        let concurrence: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let esd_intervals = detect_esd(times, &concurrence, self.zero_threshold);
        Ok(ConcurrenceSeries {
            params1: *params1,
            params2: *params2,
            bell: *bell,
            n_tr,
            times: times.to_vec(),
            concurrence,
            photon1: rows.iter().map(|r| r.1).collect(),
            photon2: rows.iter().map(|r| r.2).collect(),
            norm_error: rows.iter().map(|r| r.3).collect(),
            esd_intervals,
        })
    }

    /// Concurrence series with the truncation chosen by the engine policy.
    ///
    /// A truncation `n` is accepted once going to `2n` moves the retained
    /// eigenvalues of both subsystems, and (for the concurrence observable)
    /// the concurrence at every grid point, by less than the tolerance.
    pub fn concurrence_series(
        &self,
        params1: &ModelParams,
        params2: &ModelParams,
        bell: &BellSpec,
        times: &[f64],
    ) -> Result<ConcurrenceSeries> {
        let policy = &self.policy;
        policy.validate()?;
        if policy.is_fixed() {
            return self.series_at(params1, params2, bell, times, policy.n_tr_initial);
        }

        let mut n = policy.n_tr_initial;
        let mut coarse = self.stage(params1, params2, bell, times, n)?;
        let mut last_dev = f64::INFINITY;
        while 2 * n <= policy.n_tr_max {
            let fine = self.stage(params1, params2, bell, times, 2 * n)?;
            last_dev = match (&coarse.series, &fine.series) {
                (Ok(a), Ok(b)) => {
                    let spectral =
                        retained_eigenvalue_shift(&coarse.spectra.0, &fine.spectra.0).max(
                            retained_eigenvalue_shift(&coarse.spectra.1, &fine.spectra.1),
                        );
                    match policy.observable {
                        Observable::Spectrum => spectral,
                        Observable::Concurrence => {
                            spectral.max(max_abs_diff(&a.concurrence, &b.concurrence))
                        }
                    }
                }
                (Err(defect), _) | (Ok(_), Err(defect)) => *defect,
            };
            log::debug!("n_tr {n} -> {}: deviation {last_dev:.3e}", 2 * n);
            if last_dev < policy.convergence_tol {
                if let Ok(series) = coarse.series {
                    return Ok(series);
                }
            }
            n *= 2;
            coarse = fine;
        }
        Err(Error::NonConvergence {
            n_tr_max: policy.n_tr_max,
            last_n_tr: n,
            last_deviation: last_dev,
            tolerance: policy.convergence_tol,
        })
    }
}

struct Stage {
    /// The series, or the basis-completeness defect that prevented it.
    series: std::result::Result<ConcurrenceSeries, f64>,
    spectra: (DisplacedSpectrum, DisplacedSpectrum),
}

impl Engine {
    fn stage(
        &self,
        params1: &ModelParams,
        params2: &ModelParams,
        bell: &BellSpec,
        times: &[f64],
        n_tr: usize,
    ) -> Result<Stage> {
        let spectra = (
            self.solve_fixed(params1, n_tr)?,
            self.solve_fixed(params2, n_tr)?,
        );
        let series = match self.series_at(params1, params2, bell, times, n_tr) {
            Ok(s) => Ok(s),
            Err(Error::IncompleteBasis { defect, .. }) => Err(defect),
            Err(e) => return Err(e),
        };
        Ok(Stage { series, spectra })
    }
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
