//! Shared scenario builders for the benchmarks: the three composite systems
//! the test suites exercise most, at their production dimensions.

use ndarray::Array1;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use qtl_core::{
    assemble_hamiltonian, product_state, random_hermitian, sample_level_vector, CompositeSystem,
    HermitianOperator, JointDistribution, LevelDistribution, PureState, Spectrum,
};

/// Two-level gas against one 50-fold degenerate container level (dim 100).
pub fn micro_2x50() -> CompositeSystem {
    CompositeSystem::new(
        Spectrum::from_pairs(&[(0, 1), (1, 1)]).unwrap(),
        Spectrum::from_pairs(&[(0, 50)]).unwrap(),
    )
}

/// Two-level gas against the (50, 100, 200) container (dim 700).
pub fn canonical_2x3() -> CompositeSystem {
    CompositeSystem::new(
        Spectrum::from_pairs(&[(0, 1), (1, 1)]).unwrap(),
        Spectrum::from_pairs(&[(0, 50), (1, 100), (2, 200)]).unwrap(),
    )
}

/// Five-level gas against the exponential five-level container (dim 930).
pub fn canonical_5x5() -> CompositeSystem {
    CompositeSystem::new(
        Spectrum::from_pairs(&[(0, 1), (1, 1), (2, 1), (3, 1), (4, 1)]).unwrap(),
        Spectrum::from_pairs(&[(0, 6), (1, 12), (2, 24), (3, 48), (4, 96)]).unwrap(),
    )
}

/// A full random coupling plus the diagonal part, ready to diagonalize.
pub fn hamiltonian(composite: &CompositeSystem, delta_i: f64, seed: u64) -> HermitianOperator {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let interaction = random_hermitian(composite.dim(), delta_i, &mut rng);
    assemble_hamiltonian(composite, &interaction).unwrap()
}

/// Product initial state with gas weights (0.15, 0.85)-style on two levels or
/// concentrated on the middle level otherwise.
pub fn initial_state(composite: &CompositeSystem, seed: u64) -> PureState {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let gas_levels = composite.gas().level_count();
    let gas_weights = if gas_levels == 2 {
        LevelDistribution::new(vec![0.15, 0.85]).unwrap()
    } else {
        LevelDistribution::delta(gas_levels, gas_levels / 2)
    };
    let gas: Array1<Complex64> =
        sample_level_vector(composite.gas(), &gas_weights, &mut rng).unwrap();
    let container = sample_level_vector(
        composite.container(),
        &LevelDistribution::delta(composite.container().level_count(), 0),
        &mut rng,
    )
    .unwrap();
    product_state(&gas, &container, composite).unwrap()
}

/// The microcanonical sampling target of the 2x50 scenario.
pub fn micro_target() -> JointDistribution {
    JointDistribution::from_product(
        &LevelDistribution::new(vec![0.15, 0.85]).unwrap(),
        &LevelDistribution::new(vec![1.0]).unwrap(),
    )
}
