//! Exact-diagonalization toolkit for studying how thermodynamic equilibrium
//! emerges inside closed bipartite quantum systems.
//!
//! The model is a small observed subsystem (the "gas") coupled weakly to a
//! larger quantum environment (the "container"). Both are specified purely by
//! their spectra on an integer energy grid; the coupling is a random matrix.
//! The crate provides
//!
//! - [`spectra`]: subsystem spectra, the product basis of the composite
//!   system, and its decomposition into shells of fixed total energy;
//! - [`states`]: pure states, reduced density operators, local observables
//!   (occupations, purity, von Neumann entropy), and uniform sampling of
//!   constrained Hilbert-space regions;
//! - [`interactions`]: Gaussian random Hermitian couplings, both unconstrained
//!   and block-diagonal (no energy exchange), plus weak-coupling diagnostics;
//! - [`theory`]: closed-form equilibrium predictions — minimal purity,
//!   Hilbert-space average purity, maximal entropy, dominant and canonical
//!   energy distributions, the equilibrium density operator, and the spectral
//!   temperature;
//! - [`dynamics`]: exact Schrödinger propagation by full Hermitian
//!   eigendecomposition, local-observable trajectories, and time-fluctuation
//!   statistics.
//!
//! Natural units are used throughout: `k_B = 1`, `ħ = 1`, and the energy
//! quantum `ΔE = 1`, so times are in `ħ/ΔE`, entropies in `k_B`, and inverse
//! temperatures in `1/ΔE`.

pub mod dynamics;
pub mod interactions;
mod linalg;
pub mod spectra;
pub mod states;
pub mod theory;

pub use dynamics::{
    assemble_hamiltonian, fit_inverse_size_scaling, lifted_container_hamiltonian,
    lifted_gas_hamiltonian, propagate, relaxation_time, time_average, time_fluctuation,
    DynamicsError, Propagator, RunMeta, ScalingFit, Trajectory, TrajectoryPoint,
};
pub use interactions::{
    coupling_diagnostics, microcanonical_interaction, random_hermitian,
    shell_restricted_interaction, CouplingDiagnostics, HermitianOperator, InteractionError,
};
pub use spectra::{CompositeSystem, EnergyLevel, Spectrum, SpectrumError};
pub use states::{
    occupations, partial_trace_container, partial_trace_gas, product_state, purity,
    sample_accessible_region, sample_level_vector, state_distance, von_neumann_entropy,
    DensityOperator, JointDistribution, PureState, StateError,
};
pub use theory::{
    canonical_distribution, dominant_distribution, dominant_joint, equilibrium_state,
    fit_exponential_degeneracy, hs_average_purity_approx, hs_average_purity_exact, max_entropy,
    min_purity, spectral_temperature, spectral_temperature_with_floor, total_energy_distribution,
    ExponentialFit, LevelDistribution, TheoryError, TotalEnergyDistribution,
};
