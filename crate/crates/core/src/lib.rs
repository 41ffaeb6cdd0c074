//! Numerically exact entanglement dynamics of two independent atom–cavity
//! subsystems described by the quantum Rabi Hamiltonian
//! `H = (Δ/2)σz + ω a†a + λ(a + a†)σx`, without the rotating-wave
//! approximation.
//!
//! Each subsystem is diagonalized per parity sector in a displaced-Fock
//! basis ([`model`], [`spectral`]), evolved spectrally from `|σ⟩ ⊗ |0⟩`
//! ([`dynamics`]) and combined with the other subsystem into the atom–atom
//! density matrix, whose Wootters concurrence is tracked in time
//! ([`bipartite`], [`engine`]). [`analytic`] provides closed-form
//! baselines and [`oracle`] a brute-force reference in the raw basis.

pub mod analytic;
pub mod bipartite;
pub mod dynamics;
pub mod engine;
pub mod error;
pub mod exec;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod spectral;
pub mod validate;

pub use bipartite::{
    concurrence_series, detect_esd, joint_density, wootters_concurrence, BellKind, BellSpec,
    ConcurrenceSeries, TwoQubitDensity,
};
pub use dynamics::{evolve_subsystem, uniform_grid, AtomLevel, SubsystemTrajectory};
pub use engine::Engine;
pub use error::{Error, Result};
pub use exec::Execution;
pub use model::{ModelParams, Observable, Parity, TruncationPolicy};
pub use spectral::{solve_subsystem, to_original_basis, DisplacedSpectrum};
