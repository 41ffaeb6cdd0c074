//! Physical parameters and the matrix ingredients of the displaced-Fock
//! eigenproblem of `H = (Δ/2)σz + ω a†a + λ(a + a†)σx`.
//!
//! After rotating the atom by π/4 about y, the two atomic components see the
//! shifted oscillators `A = a + g` and `B = a − g` (`g = λ/ω`). Eigenstates
//! are expanded in the displaced number states `|n⟩_A = D(−g)|n⟩` and the
//! parity symmetry folds the two components into one coefficient vector per
//! parity sector. Everything the sector matrices need lives here.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of one atom–cavity subsystem (ħ = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Cavity frequency ω.
    pub omega: f64,
    /// Atomic level splitting Δ.
    pub delta_atom: f64,
    /// Dimensionless coupling g = λ/ω.
    pub g: f64,
    /// Bell mixing angle α (radians).
    pub alpha: f64,
}

impl ModelParams {
    pub fn new(omega: f64, delta_atom: f64, g: f64, alpha: f64) -> Result<Self> {
        let p = ModelParams {
            omega,
            delta_atom,
            g,
            alpha,
        };
        p.validate()?;
        Ok(p)
    }

    /// Resonant subsystem with ω = Δ = 1.
    pub fn resonant(g: f64, alpha: f64) -> Self {
        ModelParams {
            omega: 1.0,
            delta_atom: 1.0,
            g,
            alpha,
        }
    }

    /// Fixed ω, atomic splitting set from the detuning: Δ = ω − δ.
    pub fn with_detuning(omega: f64, detuning: f64, g: f64, alpha: f64) -> Result<Self> {
        Self::new(omega, omega - detuning, g, alpha)
    }

    /// δ = ω − Δ. Always recomputed from the other two.
    pub fn detuning(&self) -> f64 {
        self.omega - self.delta_atom
    }

    /// λ = g·ω.
    pub fn coupling(&self) -> f64 {
        self.g * self.omega
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.omega, self.delta_atom, self.g, self.alpha]
            .iter()
            .all(|x| x.is_finite());
        if !all_finite {
            return Err(Error::InvalidParams("parameters must be finite".into()));
        }
        if self.omega <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "cavity frequency must be positive, got {}",
                self.omega
            )));
        }
        if self.g < 0.0 {
            return Err(Error::InvalidParams(format!(
                "coupling must be non-negative, got {}",
                self.g
            )));
        }
        Ok(())
    }
}

/// The two parity sectors of Π = σz·(−1)^{a†a}.
///
/// The sector matrix `H^(s) = ω(m − g²)δ_mn + s·(Δ/2)·D_mn` holds exactly the
/// eigenstates with Π = s; the lower rotated component of such a state is
/// `−s·Σ (−1)^n c_n |n⟩_B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parity {
    Plus,
    Minus,
}

impl Parity {
    pub const BOTH: [Parity; 2] = [Parity::Plus, Parity::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Parity::Plus => 1.0,
            Parity::Minus => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Parity::Plus => "+",
            Parity::Minus => "-",
        }
    }
}

/// Which quantity the truncation search watches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Observable {
    Concurrence,
    Spectrum,
}

/// How the displaced-basis truncation `n_tr` is chosen.
///
/// The search starts at `n_tr_initial` and doubles until the watched
/// observable moves by less than `convergence_tol`. Equal bounds pin the
/// truncation and skip the search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub n_tr_initial: usize,
    pub n_tr_max: usize,
    pub convergence_tol: f64,
    pub observable: Observable,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            n_tr_initial: 8,
            n_tr_max: 512,
            convergence_tol: 1e-10,
            observable: Observable::Concurrence,
        }
    }
}

impl TruncationPolicy {
    /// A policy that always uses exactly `n_tr`.
    pub fn fixed(n_tr: usize) -> Self {
        TruncationPolicy {
            n_tr_initial: n_tr,
            n_tr_max: n_tr,
            ..Default::default()
        }
    }

    pub fn is_fixed(&self) -> bool {
        self.n_tr_initial == self.n_tr_max
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_tr_initial < 4 {
            return Err(Error::InvalidParams(format!(
                "n_tr_initial must be at least 4, got {}",
                self.n_tr_initial
            )));
        }
        if self.n_tr_max < self.n_tr_initial {
            return Err(Error::InvalidParams(format!(
                "n_tr_max ({}) is below n_tr_initial ({})",
                self.n_tr_max, self.n_tr_initial
            )));
        }
        if !(self.convergence_tol > 0.0) {
            return Err(Error::InvalidParams(format!(
                "convergence tolerance must be positive, got {}",
                self.convergence_tol
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Displacement-operator matrix elements

/// ½·ln(k!) accumulated directly; exact enough for the index ranges used here.
fn half_ln_factorial(k: usize) -> f64 {
    0.5 * (2..=k).map(|j| (j as f64).ln()).sum::<f64>()
}

/// `⟨j+shift| D(β) |j⟩` for `j = 0..len`, real β, via the normalized
/// associated-Laguerre recurrence
///
/// `Q_{j+1} = [(2j+1+s−β²) Q_j − √(j(j+s)) Q_{j−1}] / √((j+1)(j+1+s))`,
/// `Q_0 = e^{−β²/2} β^s / √(s!)`.
///
/// The recurrence carries the √(n!/k!) normalization along, so nothing
/// overflows for indices in the hundreds.
fn displacement_diagonal(beta: f64, shift: usize, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return out;
    }
    let x = beta * beta;
    let s = shift as f64;
    let q0 = if beta == 0.0 {
        if shift == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        let mag = (s * beta.abs().ln() - half_ln_factorial(shift) - 0.5 * x).exp();
        if beta < 0.0 && shift % 2 == 1 {
            -mag
        } else {
            mag
        }
    };
    out.push(q0);
    if len == 1 {
        return out;
    }
    out.push((1.0 + s - x) * q0 / (1.0 + s).sqrt());
    for j in 1..len - 1 {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + s - x) * out[j] - (jf * (jf + s)).sqrt() * out[j - 1])
            / ((jf + 1.0) * (jf + 1.0 + s)).sqrt();
        out.push(next);
    }
    out
}

/// `⟨k| D(β) |n⟩` for the real displacement `D(β) = exp(β(a† − a))`.
pub fn displacement_matrix_element(beta: f64, k: usize, n: usize) -> f64 {
    if k >= n {
        displacement_diagonal(beta, k - n, n + 1)[n]
    } else {
        // ⟨k|D(β)|n⟩ = ⟨n|D(−β)|k⟩ for real β
        displacement_diagonal(-beta, n - k, k + 1)[k]
    }
}

/// Matrix `M[k, n] = ⟨k| D(β) |n⟩` for `k < rows`, `n < cols`.
pub fn displacement_matrix(beta: f64, rows: usize, cols: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(rows, cols);
    for shift in 0..rows {
        let len = cols.min(rows - shift);
        for (j, q) in displacement_diagonal(beta, shift, len)
            .into_iter()
            .enumerate()
        {
            m[(j + shift, j)] = q;
        }
    }
    for shift in 1..cols {
        let len = rows.min(cols - shift);
        for (j, q) in displacement_diagonal(-beta, shift, len)
            .into_iter()
            .enumerate()
        {
            m[(j, j + shift)] = q;
        }
    }
    m
}

/// Overlap `D_mn = _A⟨m| Π_ph |n⟩_A` between displaced number states, i.e.
///
/// `D_mn = e^{−2g²} Σ_k (−1)^k √(m!n!) (2g)^{m+n−2k} / ((m−k)!(n−k)!k!)`.
///
/// The alternating sum cancels catastrophically for large indices, so it is
/// evaluated through its Laguerre form `D_mn = (−1)^n ⟨m|D(2g)|n⟩`. Symmetric
/// in `(m, n)`; at `g = 0` it reduces to `(−1)^m δ_mn`.
pub fn displacement_overlap(m: usize, n: usize, g: f64) -> f64 {
    let (hi, lo) = if m >= n { (m, n) } else { (n, m) };
    let v = displacement_diagonal(2.0 * g, hi - lo, lo + 1)[lo];
    if lo % 2 == 0 {
        v
    } else {
        -v
    }
}

/// Signature of an overlap kernel `(m, n, g) -> D_mn`.
pub type OverlapFn = fn(usize, usize, f64) -> f64;

/// Full `(n_tr+1)²` overlap matrix, filled one diagonal at a time and
/// mirrored so it is exactly symmetric.
pub fn overlap_matrix(n_tr: usize, g: f64) -> DMatrix<f64> {
    let dim = n_tr + 1;
    let mut d = DMatrix::zeros(dim, dim);
    for shift in 0..dim {
        let diag = displacement_diagonal(2.0 * g, shift, dim - shift);
        for (j, q) in diag.into_iter().enumerate() {
            let v = if j % 2 == 0 { q } else { -q };
            d[(j + shift, j)] = v;
            d[(j, j + shift)] = v;
        }
    }
    d
}

/// One parity-sector matrix of the displaced-basis eigenproblem.
#[derive(Debug, Clone)]
pub struct ParityBlock {
    pub sign: Parity,
    pub dim: usize,
    pub matrix: DMatrix<f64>,
}

/// `H^(s)_mn = ω(m − g²)δ_mn + s·(Δ/2)·D_mn` for `m, n = 0..=n_tr`.
pub fn build_parity_block(params: &ModelParams, sign: Parity, n_tr: usize) -> Result<ParityBlock> {
    params.validate()?;
    if n_tr < 1 {
        return Err(Error::InvalidParams("n_tr must be at least 1".into()));
    }
    let overlap = overlap_matrix(n_tr, params.g);
    Ok(assemble_block(params, sign, overlap))
}

/// Same as [`build_parity_block`] with a caller-supplied overlap kernel.
pub fn build_parity_block_with(
    params: &ModelParams,
    sign: Parity,
    n_tr: usize,
    overlap: OverlapFn,
) -> Result<ParityBlock> {
    params.validate()?;
    if n_tr < 1 {
        return Err(Error::InvalidParams("n_tr must be at least 1".into()));
    }
    let dim = n_tr + 1;
    let d = DMatrix::from_fn(dim, dim, |m, n| overlap(m, n, params.g));
    Ok(assemble_block(params, sign, d))
}

fn assemble_block(params: &ModelParams, sign: Parity, overlap: DMatrix<f64>) -> ParityBlock {
    let dim = overlap.nrows();
    let half_gap = sign.sign() * 0.5 * params.delta_atom;
    let shift = params.g * params.g;
    let mut matrix = overlap * half_gap;
    for m in 0..dim {
        matrix[(m, m)] += params.omega * (m as f64 - shift);
    }
    ParityBlock { sign, dim, matrix }
}
