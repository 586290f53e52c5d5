//! Dynamics of a qubit coupled to a quartic nonlinear oscillator through a
//! conditional-displacement interaction,
//!
//! ```text
//! H = a†a + δ (a† + a)⁴ − k σ_z (a† + a)
//! ```
//!
//! in a truncated Fock space. The crate covers
//!
//! - [`fock`]: truncated-Fock linear algebra, hybrid qubit ⊗ oscillator states
//!   and truncation certification;
//! - [`hamiltonians`]: the full, phonon-ladder and rotating-wave Hamiltonians
//!   plus the zero-temperature damping generator;
//! - [`analytic`]: the exact δ = 0 solution and the rotating-wave wave function;
//! - [`evolve`]: eigendecomposition-based unitary propagation and adaptive
//!   Dormand–Prince integration of the master equation;
//! - [`observables`]: negativity, reduced states, Wigner functions, squeezing
//!   and plateau detection;
//! - [`io`]: run configuration, figure presets and result serialization.
//!
//! Conventions: the hybrid basis is ordered `(qubit ↑ block, qubit ↓ block)`,
//! each block Fock-ordered `n = 0..=n_max`; time is dimensionless (units of
//! 1/ω_o) and reported in units of π by the I/O layer.

pub mod analytic;
pub mod error;
pub mod evolve;
pub mod fock;
pub mod hamiltonians;
pub mod io;
pub mod linalg;
pub mod observables;
pub mod ode;

pub use error::{QnloError, Result};
pub use num_complex::Complex64 as C64;

pub use analytic::{initial_state, linear_state, rwa_state, LinearSolution, RwaPropagator, RwaSolution};
pub use evolve::{
    evolve_lindblad, evolve_unitary, validity_monitor, EvolutionResult, Frame, LindbladOptions,
    TimeGrid, UnitaryPropagator,
};
pub use fock::{
    annihilation, check_truncation, coherent_ket, displacement, qubit_tensor, FockTruncation,
    HybridDensity, HybridKet, HybridState, OperatorMatrix,
};
pub use hamiltonians::{
    build_full_hamiltonian, build_ladder_hamiltonian, build_lindblad_generator,
    build_rwa_hamiltonian, scale_params, LabParams, LindbladGenerator, PhononLadderLevel,
    ScaledParams,
};
pub use observables::{
    conditioned_osc, negativity, plateau_detect, reduce_osc, reduce_qubit, squeezing_scan, wigner,
    wigner_overlap, wigner_overlap_exact, Branch, GridSpec, Negativity, PlateauOptions,
    PlateauReport, SqueezingRecord, TimeSeries, WignerGrid,
};
