//! Cross-module property tests: structural invariants of the product basis,
//! the constrained sampler, and the closed-form predictions.

use ndarray::Array2;
use proptest::collection::vec;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use qtl_core::{
    canonical_distribution, dominant_distribution, equilibrium_state, hs_average_purity_approx,
    hs_average_purity_exact, max_entropy, min_purity, occupations, partial_trace_container,
    partial_trace_gas, purity, sample_accessible_region, spectral_temperature,
    total_energy_distribution, von_neumann_entropy, CompositeSystem, JointDistribution,
    LevelDistribution, Spectrum, TotalEnergyDistribution,
};

fn arb_spectrum(max_levels: usize, max_degeneracy: usize) -> impl Strategy<Value = Spectrum> {
    (1..=max_levels)
        .prop_flat_map(move |n| {
            (
                vec(0u32..3, n).prop_map(|gaps| {
                    // Strictly ascending energies from cumulative gaps.
                    let mut e = 0u32;
                    let mut out = Vec::with_capacity(gaps.len());
                    for g in gaps {
                        out.push(e);
                        e += 1 + g;
                    }
                    out
                }),
                vec(1usize..=max_degeneracy, n),
            )
        })
        .prop_map(|(energies, degeneracies)| {
            let pairs: Vec<(u32, usize)> = energies.into_iter().zip(degeneracies).collect();
            Spectrum::from_pairs(&pairs).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn index_map_round_trips_and_shells_partition(
        gas in arb_spectrum(4, 3),
        container in arb_spectrum(4, 3),
    ) {
        let c = CompositeSystem::new(gas, container);
        for i in 0..c.dim() {
            prop_assert_eq!(c.index_of(c.state_of(i)), i);
        }
        let total: usize = c
            .shell_energies()
            .map(|e| c.shell_degeneracy(e).unwrap())
            .sum();
        prop_assert_eq!(total, c.dim());

        let pair_count: usize = c.shell_energies().map(|e| c.shell_pairs(e).unwrap().len()).sum();
        prop_assert_eq!(pair_count, c.gas().level_count() * c.container().level_count());
    }

    #[test]
    fn sampled_states_match_target_and_schmidt_symmetry(
        gas in arb_spectrum(3, 3),
        container in arb_spectrum(3, 3),
        seed in 0u64..1_000,
    ) {
        let c = CompositeSystem::new(gas, container);
        let raw = Array2::from_shape_fn(
            (c.gas().level_count(), c.container().level_count()),
            |(a, b)| 1.0 + ((a * 7 + b * 3 + 1) as f64).sin().abs(),
        );
        let sum = raw.sum();
        let target = JointDistribution::new(raw.mapv(|v| v / sum)).unwrap();

        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let psi = sample_accessible_region(&c, &target, &mut rng).unwrap();
        let measured = occupations(&psi, &c).unwrap();
        prop_assert!(measured.max_deviation(&target) < 1e-12);

        // Purity of the two reduced states agrees (Schmidt symmetry).
        let pg = purity(&partial_trace_gas(&psi, &c).unwrap());
        let pc = purity(&partial_trace_container(&psi, &c).unwrap());
        prop_assert!((pg - pc).abs() < 1e-12);

        // Same seed, same bits.
        let mut rng2 = ChaCha12Rng::seed_from_u64(seed);
        let psi2 = sample_accessible_region(&c, &target, &mut rng2).unwrap();
        prop_assert_eq!(psi.amplitudes(), psi2.amplitudes());
    }

    #[test]
    fn average_purity_is_bracketed_by_extremes(
        gas in arb_spectrum(4, 4),
        container in arb_spectrum(4, 4),
        seed in 0u64..1_000,
    ) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let wa = random_distribution(gas.level_count(), &mut rng);
        let wb = random_distribution(container.level_count(), &mut rng);
        let p_min = min_purity(&wa, &gas);
        let exact = hs_average_purity_exact(&wa, &wb, &gas, &container);
        prop_assert!(exact >= p_min - 1e-12);
        prop_assert!(exact <= 1.0 + 1e-12);
        // The large-degeneracy form never undershoots the exact average.
        let approx = hs_average_purity_approx(&wa, &wb, &gas, &container);
        prop_assert!(approx >= exact - 1e-12);
    }

    #[test]
    fn equilibrium_state_attains_the_extremes(
        gas in arb_spectrum(4, 4),
        seed in 0u64..1_000,
    ) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let w = random_distribution(gas.level_count(), &mut rng);
        let rho = equilibrium_state(&w, &gas);
        prop_assert!((purity(&rho) - min_purity(&w, &gas)).abs() < 1e-12);
        prop_assert!((von_neumann_entropy(&rho) - max_entropy(&w, &gas)).abs() < 1e-12);
    }

    #[test]
    fn spectral_temperature_inverts_canonical_distribution(
        gas in arb_spectrum(4, 4).prop_filter("need two levels", |s| s.level_count() >= 2),
        alpha in -3.0f64..3.0,
    ) {
        let w = canonical_distribution(&gas, alpha);
        let beta = spectral_temperature(&gas, &w).unwrap();
        prop_assert!((beta - alpha).abs() < 1e-12, "beta = {}, alpha = {}", beta, alpha);
    }

    #[test]
    fn exponential_container_makes_dominant_initial_state_independent(
        weights in vec(0.05f64..1.0, 4),
    ) {
        // Two-level gas, exponential four-level container with rate ln 2.
        // For any total-energy distribution supported on complete shells
        // (every gas level finds a container partner), the dominant
        // distribution is the canonical one.
        let gas = Spectrum::from_pairs(&[(0, 1), (1, 1)]).unwrap();
        let container =
            Spectrum::from_pairs(&[(0, 4), (1, 8), (2, 16), (3, 32)]).unwrap();
        let c = CompositeSystem::new(gas.clone(), container);
        // Complete shells are E = 1, 2, 3; E = 0 and E = 4 lack a partner
        // for one of the gas levels.
        let complete = [1u32, 2, 3];
        let sum: f64 = weights.iter().take(3).sum();
        let mut probs = std::collections::BTreeMap::new();
        for (k, &e) in complete.iter().enumerate() {
            probs.insert(e, weights[k] / sum);
        }
        let w_total = TotalEnergyDistribution::new(probs, &c).unwrap();
        let dominant = dominant_distribution(&w_total, &c).unwrap();
        let canonical = canonical_distribution(&gas, std::f64::consts::LN_2);
        prop_assert!(dominant.max_deviation(&canonical) < 1e-12);
    }
}

fn random_distribution<R: rand::Rng>(len: usize, rng: &mut R) -> LevelDistribution {
    let raw: Vec<f64> = (0..len).map(|_| rng.random_range(0.01..1.0)).collect();
    LevelDistribution::normalized(raw).unwrap()
}

#[test]
fn exact_average_converges_monotonically_to_approximation() {
    // Degeneracy ladder: the gap between the approximate and the exact
    // Hilbert-space average is positive and shrinks monotonically as the
    // block dimensions grow.
    let wa = LevelDistribution::new(vec![0.3, 0.7]).unwrap();
    let wb = LevelDistribution::new(vec![0.4, 0.6]).unwrap();
    let mut previous = f64::INFINITY;
    for k in 0..10 {
        let n = 1usize << k;
        let gas = Spectrum::from_pairs(&[(0, n), (1, n)]).unwrap();
        let container = Spectrum::from_pairs(&[(0, n), (1, n)]).unwrap();
        let exact = hs_average_purity_exact(&wa, &wb, &gas, &container);
        let approx = hs_average_purity_approx(&wa, &wb, &gas, &container);
        let gap = approx - exact;
        assert!(gap >= 0.0, "gap must be non-negative, got {gap} at N = {n}");
        assert!(
            gap <= previous + 1e-15,
            "gap must shrink: {gap} > {previous} at N = {n}"
        );
        previous = gap;
    }
    assert!(previous < 1e-4);
}

#[test]
fn microcanonical_limit_recovers_input_marginal() {
    // Single-level container: the total-energy distribution pins each gas
    // level, and the dominant distribution equals the input marginal.
    let gas = Spectrum::from_pairs(&[(0, 2), (1, 1), (3, 2)]).unwrap();
    let container = Spectrum::from_pairs(&[(2, 17)]).unwrap();
    let c = CompositeSystem::new(gas.clone(), container.clone());
    let wa = LevelDistribution::new(vec![0.2, 0.5, 0.3]).unwrap();
    let wb = LevelDistribution::delta(1, 0);
    let w_total = total_energy_distribution(&wa, &wb, &c);
    let dominant = dominant_distribution(&w_total, &c).unwrap();
    assert!(dominant.max_deviation(&wa) < 1e-14);
}
