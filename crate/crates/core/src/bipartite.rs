//! Two-atom observables: Bell initial states, the atom–atom reduced density
//! matrix, Wootters concurrence and sudden-death intervals.
//!
//! The two subsystems never interact, so the joint state stays a sum of two
//! product branches `Σ_b w_b |χ¹_b(t)⟩ ⊗ |χ²_b(t)⟩`, one per Bell component.
//! Tracing out both photon registers only needs the photon-space overlaps
//! of the branch components within each subsystem.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{photon_number, AtomLevel, SubsystemTrajectory};
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, hermitian_function};
use crate::model::{ModelParams, TruncationPolicy};

/// Default concurrence level regarded as zero for sudden-death detection.
pub const DEFAULT_ZERO_THRESHOLD: f64 = 1e-9;
/// Shortest run of zero samples reported as a death interval.
pub const MIN_DEATH_SAMPLES: usize = 3;

const DENSITY_TOL: f64 = 1e-10;
/// Density-matrix eigenvalues at or below this are rounding noise.
pub const RANK_SNAP: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellKind {
    /// `cos α |↑↓⟩ + sin α |↓↑⟩`
    AntiCorrelated,
    /// `cos α |↑↑⟩ + sin α |↓↓⟩`
    Correlated,
}

/// Atomic Bell-type initial state; both cavities start in the vacuum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellSpec {
    pub kind: BellKind,
    pub alpha: f64,
}

impl BellSpec {
    pub fn anti_correlated(alpha: f64) -> Self {
        BellSpec {
            kind: BellKind::AntiCorrelated,
            alpha,
        }
    }

    pub fn correlated(alpha: f64) -> Self {
        BellSpec {
            kind: BellKind::Correlated,
            alpha,
        }
    }

    /// The two branches `(weight, level of atom 1, level of atom 2)`.
    pub fn branches(&self) -> [(f64, AtomLevel, AtomLevel); 2] {
        let (c, s) = (self.alpha.cos(), self.alpha.sin());
        match self.kind {
            BellKind::AntiCorrelated => [
                (c, AtomLevel::Up, AtomLevel::Down),
                (s, AtomLevel::Down, AtomLevel::Up),
            ],
            BellKind::Correlated => [
                (c, AtomLevel::Up, AtomLevel::Up),
                (s, AtomLevel::Down, AtomLevel::Down),
            ],
        }
    }

    /// Initial concurrence `|sin 2α|`.
    pub fn initial_concurrence(&self) -> f64 {
        (2.0 * self.alpha).sin().abs()
    }
}

/// Atom–atom density matrix in the basis `(↑↑, ↑↓, ↓↑, ↓↓)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitDensity {
    pub matrix: Matrix4<Complex64>,
}

fn level_index(level: AtomLevel) -> usize {
    match level {
        AtomLevel::Up => 0,
        AtomLevel::Down => 1,
    }
}

impl TwoQubitDensity {
    /// Projector onto the pure state with the given amplitudes.
    pub fn pure(amplitudes: [Complex64; 4]) -> Self {
        TwoQubitDensity {
            matrix: Matrix4::from_fn(|i, j| amplitudes[i] * amplitudes[j].conj()),
        }
    }

    pub fn maximally_mixed() -> Self {
        TwoQubitDensity {
            matrix: Matrix4::identity() * Complex64::new(0.25, 0.0),
        }
    }

    /// Density matrix of the initial Bell state.
    pub fn bell(bell: &BellSpec) -> Self {
        let mut amp = [Complex64::new(0.0, 0.0); 4];
        for (w, l1, l2) in bell.branches() {
            amp[2 * level_index(l1) + level_index(l2)] += w;
        }
        Self::pure(amp)
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (self.matrix - self.matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues, ascending, of the Hermitian part.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.hermitian_part())
    }

    fn hermitian_part(&self) -> DMatrix<Complex64> {
        let h = (self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        DMatrix::from_fn(4, 4, |i, j| h[(i, j)])
    }

    /// Checks Hermiticity, unit trace and positivity to within 1e-10.
    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (error {herm:.3e})"
            )));
        }
        let tr = self.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("trace is {tr}")));
        }
        let lowest = self.eigenvalues()?[0];
        if lowest < -DENSITY_TOL {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {lowest:.3e}"
            )));
        }
        Ok(())
    }
}

/// Wootters concurrence `max(0, √λ₁ − √λ₂ − √λ₃ − √λ₄)`, with `λ_i` the
/// eigenvalues of `ρ ρ̃` in decreasing order and `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`.
///
/// Eigenvalues of `ρ` below [`RANK_SNAP`] are treated as zero before the
/// factor `√ρ` is formed and handed to [`concurrence_from_factor`].
pub fn wootters_concurrence(rho: &TwoQubitDensity) -> Result<f64> {
    rho.validate()?;
    let sqrt_rho = hermitian_function(&rho.hermitian_part(), |x| {
        if x > RANK_SNAP {
            x.sqrt()
        } else {
            0.0
        }
    })?;
    concurrence_from_factor(&sqrt_rho)
}

/// Concurrence of `ρ = L L†` for a `4 × k` factor `L`.
///
/// The `√λ_i` are the singular values of `Lᵀ (σy⊗σy) L`. They are obtained
/// without squaring, so the result stays accurate near pure states where
/// `√λ` of a rounding-level eigenvalue would otherwise swamp it.
pub fn concurrence_from_factor(factor: &DMatrix<Complex64>) -> Result<f64> {
    if factor.nrows() != 4 {
        return Err(Error::InvalidDensity(format!(
            "factor must have 4 rows, got {}",
            factor.nrows()
        )));
    }
    // a 4×4 factor with the same Gram matrix
    let square = if factor.ncols() > 4 {
        factor.adjoint().qr().r().adjoint()
    } else {
        factor.clone()
    };
    let flip = DMatrix::from_fn(4, 4, |i, j| {
        // σy⊗σy is the real anti-diagonal (−1, 1, 1, −1)
        let v = match (i, j) {
            (0, 3) | (3, 0) => -1.0,
            (1, 2) | (2, 1) => 1.0,
            _ => 0.0,
        };
        Complex64::new(v, 0.0)
    });
    let k = square.ncols();
    let w = square.transpose() * flip * &square;
    // singular values of w are the positive eigenvalues of [[0, w], [w†, 0]]
    let mut jw = DMatrix::zeros(2 * k, 2 * k);
    jw.view_mut((0, k), (k, k)).copy_from(&w);
    jw.view_mut((k, 0), (k, k)).copy_from(&w.adjoint());
    let vals = hermitian_eigenvalues(&jw)?;
    let mut s: Vec<f64> = vals[k..].iter().map(|x| x.abs()).collect();
    s.resize(4, 0.0);
    s.sort_by(|a, b| b.total_cmp(a));
    Ok((s[0] - s[1] - s[2] - s[3]).max(0.0))
}

/// Reduced atomic state and per-cavity photon numbers at one time.
#[derive(Debug, Clone)]
pub struct JointSnapshot {
    pub rho: TwoQubitDensity,
    /// `4 × 16` factor with `ρ = F F†`.
    pub factor: DMatrix<Complex64>,
    pub photon1: f64,
    pub photon2: f64,
}

fn same_grid(trajs: &[&SubsystemTrajectory]) -> bool {
    trajs.windows(2).all(|w| w[0].times == w[1].times)
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Picks the trajectory of one subsystem started from `level`.
struct Pair<'a> {
    up: &'a SubsystemTrajectory,
    down: &'a SubsystemTrajectory,
}

impl<'a> Pair<'a> {
    fn from(&self, level: AtomLevel) -> &'a SubsystemTrajectory {
        match level {
            AtomLevel::Up => self.up,
            AtomLevel::Down => self.down,
        }
    }
}

type Gram = [[[[Complex64; 2]; 2]; 2]; 2];

/// Overlaps `⟨χ_{b'σ'}|χ_{bσ}⟩` and `⟨χ_{b'}|N|χ_b⟩` for one subsystem, with
/// branch `b` started from `levels[b]`.
#[allow(clippy::needless_range_loop)]
fn branch_overlaps(
    pair: &Pair<'_>,
    levels: [AtomLevel; 2],
    t: usize,
) -> (Gram, [[Complex64; 2]; 2]) {
    let comp = |b: usize, sigma: usize| -> &[Complex64] {
        let tr = pair.from(levels[b]);
        if sigma == 0 {
            &tr.comp_up[t]
        } else {
            &tr.comp_down[t]
        }
    };
    let mut gram = [[[[Complex64::new(0.0, 0.0); 2]; 2]; 2]; 2];
    let mut number = [[Complex64::new(0.0, 0.0); 2]; 2];
    for bp in 0..2 {
        for b in 0..2 {
            for sp in 0..2 {
                for s in 0..2 {
                    gram[bp][sp][b][s] = inner(comp(bp, sp), comp(b, s));
                }
            }
            if b == bp {
                let tr = pair.from(levels[b]);
                number[bp][b] = photon_number(&tr.comp_up[t], &tr.comp_down[t]).into();
            } else {
                let mut acc = Complex64::new(0.0, 0.0);
                for s in 0..2 {
                    let (x, y) = (comp(bp, s), comp(b, s));
                    acc += x
                        .iter()
                        .zip(y)
                        .enumerate()
                        .map(|(k, (p, q))| p.conj() * q * k as f64)
                        .sum::<Complex64>();
                }
                number[bp][b] = acc;
            }
        }
    }
    (gram, number)
}

/// Triangular factor `R` of the photon vectors `[χ_{0↑}, χ_{0↓}, χ_{1↑}, χ_{1↓}] = Q R`
/// of one subsystem; column `2b + σ` holds the coordinates of `χ_{bσ}`.
fn photon_factor(pair: &Pair<'_>, levels: [AtomLevel; 2], t: usize) -> DMatrix<Complex64> {
    let n = pair.up.n_fock;
    let cols: Vec<&[Complex64]> = levels
        .iter()
        .flat_map(|&l| {
            let tr = pair.from(l);
            [tr.comp_up[t].as_slice(), tr.comp_down[t].as_slice()]
        })
        .collect();
    let m = DMatrix::from_fn(n, 4, |i, j| cols[j][i]);
    m.qr().r()
}

pub(crate) fn joint_snapshot(
    traj1: (&SubsystemTrajectory, &SubsystemTrajectory),
    traj2: (&SubsystemTrajectory, &SubsystemTrajectory),
    bell: &BellSpec,
    t_index: usize,
) -> JointSnapshot {
    let branches = bell.branches();
    let w = [branches[0].0, branches[1].0];
    let p1 = Pair {
        up: traj1.0,
        down: traj1.1,
    };
    let p2 = Pair {
        up: traj2.0,
        down: traj2.1,
    };
    let (g1, n1) = branch_overlaps(&p1, [branches[0].1, branches[1].1], t_index);
    let (g2, n2) = branch_overlaps(&p2, [branches[0].2, branches[1].2], t_index);

    let mut m = Matrix4::zeros();
    for s1 in 0..2 {
        for s2 in 0..2 {
            for s1p in 0..2 {
                for s2p in 0..2 {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for b in 0..2 {
                        for bp in 0..2 {
                            acc += w[b] * w[bp] * g1[bp][s1p][b][s1] * g2[bp][s2p][b][s2];
                        }
                    }
                    m[(2 * s1 + s2, 2 * s1p + s2p)] = acc;
                }
            }
        }
    }

    let total =
        |g: &[[[[Complex64; 2]; 2]; 2]; 2], bp: usize, b: usize| g[bp][0][b][0] + g[bp][1][b][1];
    let mut photon1 = Complex64::new(0.0, 0.0);
    let mut photon2 = Complex64::new(0.0, 0.0);
    for b in 0..2 {
        for bp in 0..2 {
            photon1 += w[b] * w[bp] * n1[bp][b] * total(&g2, bp, b);
            photon2 += w[b] * w[bp] * n2[bp][b] * total(&g1, bp, b);
        }
    }

    let r1 = photon_factor(&p1, [branches[0].1, branches[1].1], t_index);
    let r2 = photon_factor(&p2, [branches[0].2, branches[1].2], t_index);
    let factor = DMatrix::from_fn(4, 16, |row, col| {
        let (s1, s2) = (row / 2, row % 2);
        let (j1, j2) = (col / 4, col % 4);
        (0..2)
            .map(|b| r1[(j1, 2 * b + s1)] * r2[(j2, 2 * b + s2)] * w[b])
            .sum::<Complex64>()
    });

    JointSnapshot {
        rho: TwoQubitDensity { matrix: m },
        factor,
        photon1: photon1.re,
        photon2: photon2.re,
    }
}

/// Reduced two-atom density matrix at grid point `t_index`.
///
/// `traj{i}_{σ}` is subsystem `i` evolved from atomic level `σ`; all four
/// must share one time grid.
pub fn joint_density(
    traj1_up: &SubsystemTrajectory,
    traj1_down: &SubsystemTrajectory,
    traj2_up: &SubsystemTrajectory,
    traj2_down: &SubsystemTrajectory,
    bell: &BellSpec,
    t_index: usize,
) -> Result<TwoQubitDensity> {
    if !same_grid(&[traj1_up, traj1_down, traj2_up, traj2_down]) {
        return Err(Error::GridMismatch);
    }
    Ok(joint_snapshot(
        (traj1_up, traj1_down),
        (traj2_up, traj2_down),
        bell,
        t_index,
    )
    .rho)
}

/// Maximal runs of at least [`MIN_DEATH_SAMPLES`] samples with concurrence at
/// or below `zero_threshold`, as `(t_start, t_end)` pairs. Isolated zeros are
/// not reported.
pub fn detect_esd(times: &[f64], concurrence: &[f64], zero_threshold: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for i in 0..=concurrence.len() {
        let dead = i < concurrence.len() && concurrence[i] <= zero_threshold;
        match (dead, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                if i - s >= MIN_DEATH_SAMPLES {
                    out.push((times[s], times[i - 1]));
                }
                start = None;
            }
            _ => {}
        }
    }
    out
}

/// Concurrence and photon statistics on a time grid.
#[derive(Debug, Clone, Serialize)]
pub struct ConcurrenceSeries {
    pub params1: ModelParams,
    pub params2: ModelParams,
    pub bell: BellSpec,
    /// Displaced-basis truncation used for both subsystems.
    pub n_tr: usize,
    pub times: Vec<f64>,
    pub concurrence: Vec<f64>,
    pub photon1: Vec<f64>,
    pub photon2: Vec<f64>,
    /// Largest `|‖state‖² − 1|` over the four subsystem trajectories.
    pub norm_error: Vec<f64>,
    pub esd_intervals: Vec<(f64, f64)>,
}

impl ConcurrenceSeries {
    pub fn detect_esd(&self, zero_threshold: f64) -> Vec<(f64, f64)> {
        detect_esd(&self.times, &self.concurrence, zero_threshold)
    }

    /// First grid time at which the concurrence is at or below the threshold.
    pub fn first_death_time(&self, zero_threshold: f64) -> Option<f64> {
        self.concurrence
            .iter()
            .position(|&c| c <= zero_threshold)
            .map(|i| self.times[i])
    }

    pub fn mean_concurrence(&self) -> f64 {
        self.concurrence.iter().sum::<f64>() / self.concurrence.len() as f64
    }

    pub fn total_photons(&self) -> Vec<f64> {
        self.photon1
            .iter()
            .zip(&self.photon2)
            .map(|(a, b)| a + b)
            .collect()
    }
}

/// End-to-end concurrence pipeline with the truncation chosen by `policy`.
pub fn concurrence_series(
    params1: &ModelParams,
    params2: &ModelParams,
    bell: &BellSpec,
    times: &[f64],
    policy: &TruncationPolicy,
) -> Result<ConcurrenceSeries> {
    Engine::new(*policy).concurrence_series(params1, params2, bell, times)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn bell_projector_is_maximally_entangled() {
        for kind in [BellKind::AntiCorrelated, BellKind::Correlated] {
            let rho = TwoQubitDensity::bell(&BellSpec {
                kind,
                alpha: FRAC_PI_4,
            });
            assert!((wootters_concurrence(&rho).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bell1_quarter_pi_layout() {
        let rho = TwoQubitDensity::bell(&BellSpec::anti_correlated(FRAC_PI_4));
        for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            assert!((rho.matrix[(i, j)] - c(0.5)).norm() < 1e-15);
        }
        assert!(rho.matrix[(0, 0)].norm() == 0.0 && rho.matrix[(3, 3)].norm() == 0.0);
    }

    #[test]
    fn mixed_state_is_separable() {
        assert!(wootters_concurrence(&TwoQubitDensity::maximally_mixed()).unwrap() < 1e-15);
    }

    #[test]
    fn werner_state() {
        // p|Ψ⁻⟩⟨Ψ⁻| + (1 − p) I/4, closed form max(0, (3p − 1)/2)
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = TwoQubitDensity::pure([c(0.0), c(s), c(-s), c(0.0)]);
        for &p in &[0.0, 0.2, 1.0 / 3.0, 0.6, 0.9, 1.0] {
            let m = singlet.matrix * c(p) + TwoQubitDensity::maximally_mixed().matrix * c(1.0 - p);
            let got = wootters_concurrence(&TwoQubitDensity { matrix: m }).unwrap();
            let expect = ((3.0 * p - 1.0) / 2.0).max(0.0);
            assert!((got - expect).abs() < 1e-12, "p={p}: {got} vs {expect}");
        }
    }

    #[test]
    fn pure_state_closed_form() {
        // |ψ⟩ = a|00⟩ + b|01⟩ + c|10⟩ + d|11⟩ has C = 2|ad − bc|
        let amp = [
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.2, 0.5),
            Complex64::new(0.4, -0.3),
            Complex64::new(0.1, 0.2),
        ];
        let n = amp.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let amp = amp.map(|z| z / n);
        let expect = 2.0 * (amp[0] * amp[3] - amp[1] * amp[2]).norm();
        let got = wootters_concurrence(&TwoQubitDensity::pure(amp)).unwrap();
        assert!((got - expect).abs() < 1e-12);
    }

    #[test]
    fn rejects_invalid_density() {
        let mut bad = TwoQubitDensity::maximally_mixed();
        bad.matrix[(0, 0)] = c(0.5);
        assert!(matches!(
            wootters_concurrence(&bad),
            Err(Error::InvalidDensity(_))
        ));
        let mut neg = TwoQubitDensity::maximally_mixed();
        neg.matrix[(0, 0)] = c(-0.25);
        neg.matrix[(1, 1)] = c(0.75);
        assert!(matches!(
            wootters_concurrence(&neg),
            Err(Error::InvalidDensity(_))
        ));
        let mut nonherm = TwoQubitDensity::maximally_mixed();
        nonherm.matrix[(0, 1)] = Complex64::new(0.0, 0.1);
        assert!(nonherm.validate().is_err());
    }

    #[test]
    fn esd_detection_rules() {
        let times: Vec<f64> = (0..2001).map(|i| i as f64 * 0.005).collect();
        // cos² with a transversal zero at t = π/2
        let c: Vec<f64> = times.iter().map(|t| t.cos().powi(2)).collect();
        assert!(detect_esd(&times, &c, DEFAULT_ZERO_THRESHOLD).is_empty());

        let zeros = vec![0.0; times.len()];
        assert_eq!(detect_esd(&times, &zeros, 1e-9), vec![(0.0, 10.0)]);

        let mut two = vec![1.0; 10];
        two[3] = 0.0;
        two[4] = 0.0;
        two[6] = 0.0;
        two[7] = 0.0;
        two[8] = 0.0;
        let t: Vec<f64> = (0..10).map(|i| i as f64).collect();
        assert_eq!(detect_esd(&t, &two, 1e-9), vec![(6.0, 8.0)]);
    }
}
