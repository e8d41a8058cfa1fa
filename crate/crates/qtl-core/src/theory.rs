//! Closed-form equilibrium predictions for the bipartite model: extremal
//! purity and entropy under fixed level occupations, Hilbert-space averages
//! of the gas purity, dominant and canonical energy distributions, the
//! equilibrium density operator, and the spectral temperature.
//!
//! All functions are pure and deterministic. Energies enter exponentials as
//! grid indices (ΔE = 1), so decay rates `α` and inverse temperatures `β`
//! are reported in units of `1/ΔE`; entropies are in units of `k_B`.

use std::collections::BTreeMap;

use ndarray::Array2;
use num_complex::Complex64;

use crate::spectra::{CompositeSystem, Spectrum};
use crate::states::{DensityOperator, JointDistribution};

/// Probabilities below this floor are clamped before entering logarithms in
/// the spectral-temperature estimator.
pub const SPECTRAL_PROBABILITY_FLOOR: f64 = 1e-12;

const DISTRIBUTION_TOL: f64 = 1e-12;
const DOMINANT_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, thiserror::Error)]
pub enum TheoryError {
    #[error("distribution has a negative weight: {0}")]
    NegativeWeight(f64),
    #[error("distribution is not normalized: sum = {0}")]
    NotNormalized(f64),
    #[error("distribution length {got} does not match level count {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("need at least {need} levels, got {got}")]
    TooFewLevels { need: usize, got: usize },
    #[error("spectral temperature undefined: all weight on the extreme levels")]
    UndefinedTemperature,
    #[error("dominant distribution failed to normalize: residual {0:e}")]
    NotNormalizable(f64),
}

/// Probability distribution over the levels of one subsystem spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelDistribution {
    weights: Vec<f64>,
}

impl LevelDistribution {
    pub fn new(weights: Vec<f64>) -> Result<Self, TheoryError> {
        let mut sum = 0.0;
        for &w in &weights {
            if w < 0.0 {
                return Err(TheoryError::NegativeWeight(w));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > DISTRIBUTION_TOL {
            return Err(TheoryError::NotNormalized(sum));
        }
        Ok(LevelDistribution { weights })
    }

    /// Rescales non-negative weights to unit sum. Accepts inputs whose sum
    /// drifted from one by more than the strict constructor tolerance, e.g.
    /// occupations averaged over a time window.
    pub fn normalized(weights: Vec<f64>) -> Result<Self, TheoryError> {
        let mut sum = 0.0;
        for &w in &weights {
            if w < 0.0 {
                return Err(TheoryError::NegativeWeight(w));
            }
            sum += w;
        }
        if sum <= 0.0 {
            return Err(TheoryError::NotNormalized(sum));
        }
        Ok(LevelDistribution {
            weights: weights.into_iter().map(|w| w / sum).collect(),
        })
    }

    /// All weight on a single level.
    pub fn delta(len: usize, level: usize) -> Self {
        assert!(level < len);
        let mut weights = vec![0.0; len];
        weights[level] = 1.0;
        LevelDistribution { weights }
    }

    pub fn uniform(len: usize) -> Self {
        assert!(len > 0);
        LevelDistribution {
            weights: vec![1.0 / len as f64; len],
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, level: usize) -> f64 {
        self.weights[level]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.weights.iter().copied()
    }

    pub fn max_deviation(&self, other: &LevelDistribution) -> f64 {
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Probability `W(E)` to find the total system at shell energy `E`.
#[derive(Debug, Clone, PartialEq)]
pub struct TotalEnergyDistribution {
    probabilities: BTreeMap<u32, f64>,
}

impl TotalEnergyDistribution {
    /// Every key must be an existing shell of `composite`.
    pub fn new(
        probabilities: BTreeMap<u32, f64>,
        composite: &CompositeSystem,
    ) -> Result<Self, TheoryError> {
        let mut sum = 0.0;
        for (&energy, &p) in &probabilities {
            if p < 0.0 {
                return Err(TheoryError::NegativeWeight(p));
            }
            assert!(
                composite.shell_pairs(energy).is_some(),
                "no shell at total energy {energy}"
            );
            sum += p;
        }
        if (sum - 1.0).abs() > DISTRIBUTION_TOL {
            return Err(TheoryError::NotNormalized(sum));
        }
        Ok(TotalEnergyDistribution { probabilities })
    }

    pub fn probability(&self, energy: u32) -> f64 {
        self.probabilities.get(&energy).copied().unwrap_or(0.0)
    }

    /// `(E, W(E))` pairs in ascending energy order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.probabilities.iter().map(|(&e, &p)| (e, p))
    }
}

fn check_len(w: &LevelDistribution, spectrum: &Spectrum) {
    assert_eq!(
        w.len(),
        spectrum.level_count(),
        "distribution length must match the spectrum level count"
    );
}

/// Minimal gas purity consistent with fixed level weights:
/// `P_min = Σ_A W_A² / N_A`.
pub fn min_purity(w: &LevelDistribution, spectrum: &Spectrum) -> f64 {
    check_len(w, spectrum);
    w.iter()
        .zip(spectrum.levels())
        .map(|(wa, level)| wa * wa / level.degeneracy as f64)
        .sum()
}

/// Exact Hilbert-space average of the gas purity over the accessible region
/// with product weights `(W_A, W_B)`; three-term sum with the exact
/// `N_A N_B + 1` denominator.
pub fn hs_average_purity_exact(
    w_gas: &LevelDistribution,
    w_container: &LevelDistribution,
    gas: &Spectrum,
    container: &Spectrum,
) -> f64 {
    check_len(w_gas, gas);
    check_len(w_container, container);
    let sum_a2: f64 = w_gas.iter().map(|w| w * w).sum();
    let sum_b2: f64 = w_container.iter().map(|w| w * w).sum();

    let term1: f64 = w_gas
        .iter()
        .zip(gas.levels())
        .map(|(w, l)| w * w / l.degeneracy as f64)
        .sum::<f64>()
        * (1.0 - sum_b2);
    let term2: f64 = w_container
        .iter()
        .zip(container.levels())
        .map(|(w, l)| w * w / l.degeneracy as f64)
        .sum::<f64>()
        * (1.0 - sum_a2);
    let mut term3 = 0.0;
    for (wa, la) in w_gas.iter().zip(gas.levels()) {
        for (wb, lb) in w_container.iter().zip(container.levels()) {
            let na = la.degeneracy as f64;
            let nb = lb.degeneracy as f64;
            term3 += wa * wa * wb * wb * (na + nb) / (na * nb + 1.0);
        }
    }
    term1 + term2 + term3
}

/// Large-degeneracy approximation of the average gas purity:
/// `Σ_A W_A²/N_A + Σ_B W_B²/N_B`.
pub fn hs_average_purity_approx(
    w_gas: &LevelDistribution,
    w_container: &LevelDistribution,
    gas: &Spectrum,
    container: &Spectrum,
) -> f64 {
    min_purity(w_gas, gas) + min_purity(w_container, container)
}

/// Maximal gas entropy consistent with fixed level weights:
/// `S_max = -Σ_A W_A ln(W_A / N_A)`, in units of `k_B`.
pub fn max_entropy(w: &LevelDistribution, spectrum: &Spectrum) -> f64 {
    check_len(w, spectrum);
    w.iter()
        .zip(spectrum.levels())
        .filter(|(wa, _)| *wa > 0.0)
        .map(|(wa, level)| -wa * (wa / level.degeneracy as f64).ln())
        .sum()
}

/// Distribution of the total energy for a product initial state with the
/// given marginals: `W(E) = Σ_{(A,B) in shell E} W_A W_B`.
pub fn total_energy_distribution(
    w_gas: &LevelDistribution,
    w_container: &LevelDistribution,
    composite: &CompositeSystem,
) -> TotalEnergyDistribution {
    check_len(w_gas, composite.gas());
    check_len(w_container, composite.container());
    let mut probabilities = BTreeMap::new();
    for energy in composite.shell_energies() {
        let p: f64 = composite
            .shell_pairs(energy)
            .unwrap()
            .iter()
            .map(|&(a, b)| w_gas.weight(a) * w_container.weight(b))
            .sum();
        probabilities.insert(energy, p);
    }
    TotalEnergyDistribution::new(probabilities, composite)
        .expect("shell sums of a product distribution are normalized")
}

/// Joint dominant distribution: within each shell the probability spreads in
/// proportion to the block dimensions, `W^d_AB = N_A N_B W(E) / N^(E)`.
pub fn dominant_joint(
    w_total: &TotalEnergyDistribution,
    composite: &CompositeSystem,
) -> JointDistribution {
    let mut weights = Array2::zeros((
        composite.gas().level_count(),
        composite.container().level_count(),
    ));
    for energy in composite.shell_energies() {
        let p = w_total.probability(energy);
        if p == 0.0 {
            continue;
        }
        let shell_deg = composite.shell_degeneracy(energy).unwrap() as f64;
        for &(a, b) in composite.shell_pairs(energy).unwrap() {
            weights[[a, b]] = composite.block_dim(a, b) as f64 * p / shell_deg;
        }
    }
    JointDistribution::new(weights).expect("dominant joint weights are normalized")
}

/// Dominant energy distribution of the gas:
/// `W^d_A = N_A Σ_E N^c(E - E_A) W(E) / N^(E)`, summed over shells where
/// `E - E_A` is a container level. The result is renormalized; a residual
/// beyond `1e-10` is an error.
pub fn dominant_distribution(
    w_total: &TotalEnergyDistribution,
    composite: &CompositeSystem,
) -> Result<LevelDistribution, TheoryError> {
    let gas = composite.gas();
    let container = composite.container();
    let mut weights = vec![0.0; gas.level_count()];
    for (energy, p) in w_total.iter() {
        if p == 0.0 {
            continue;
        }
        let shell_deg = composite.shell_degeneracy(energy).unwrap() as f64;
        for (a, level) in gas.levels().iter().enumerate() {
            if level.energy > energy {
                continue;
            }
            if let Some(b) = container.level_at_energy(energy - level.energy) {
                let nc = container.degeneracy(b) as f64;
                weights[a] += level.degeneracy as f64 * nc * p / shell_deg;
            }
        }
    }
    let sum: f64 = weights.iter().sum();
    let residual = (sum - 1.0).abs();
    if residual > DOMINANT_RESIDUAL_TOL {
        return Err(TheoryError::NotNormalizable(residual));
    }
    LevelDistribution::normalized(weights)
}

/// Canonical (Boltzmann) distribution over the spectrum levels:
/// `W_A ∝ N_A e^{-α E_A}` with energies on the grid.
pub fn canonical_distribution(spectrum: &Spectrum, alpha: f64) -> LevelDistribution {
    assert!(alpha.is_finite(), "decay rate must be finite");
    // Shift exponents so the largest one is zero; immaterial after
    // normalization but keeps large |alpha| out of overflow.
    let max_exp = spectrum
        .levels()
        .iter()
        .map(|l| -alpha * l.energy as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = spectrum
        .levels()
        .iter()
        .map(|l| l.degeneracy as f64 * (-alpha * l.energy as f64 - max_exp).exp())
        .collect();
    LevelDistribution::normalized(weights).expect("Boltzmann weights are positive")
}

/// The state of minimal purity (maximal entropy) consistent with a level
/// distribution: diagonal, each of the `N_A` states of level `A` carrying
/// weight `W_A / N_A`.
pub fn equilibrium_state(w: &LevelDistribution, spectrum: &Spectrum) -> DensityOperator {
    check_len(w, spectrum);
    let dim = spectrum.dim();
    let mut matrix = Array2::from_elem((dim, dim), Complex64::ZERO);
    for (level, wa) in w.iter().enumerate() {
        let weight = wa / spectrum.degeneracy(level) as f64;
        let start = spectrum.offset(level);
        for i in start..start + spectrum.degeneracy(level) {
            matrix[[i, i]] = Complex64::new(weight, 0.0);
        }
    }
    DensityOperator::new(matrix).expect("equilibrium state is a valid density operator")
}

/// Inverse spectral temperature `β = 1/(k_B T)` of an energy occupation
/// distribution over a spectrum, with the default probability floor.
///
/// Neighboring level pairs each contribute a local Boltzmann-ratio estimate,
/// weighted by their mean occupation; exact Boltzmann inputs `W_A ∝ N_A
/// e^{-α E_A}` return exactly `α`.
pub fn spectral_temperature(
    spectrum: &Spectrum,
    w: &LevelDistribution,
) -> Result<f64, TheoryError> {
    spectral_temperature_with_floor(spectrum, w, SPECTRAL_PROBABILITY_FLOOR)
}

/// [`spectral_temperature`] with an explicit clamping floor for the
/// probabilities entering logarithms.
pub fn spectral_temperature_with_floor(
    spectrum: &Spectrum,
    w: &LevelDistribution,
    floor: f64,
) -> Result<f64, TheoryError> {
    let m = spectrum.level_count();
    if m < 2 {
        return Err(TheoryError::TooFewLevels { need: 2, got: m });
    }
    check_len(w, spectrum);
    // With the interior levels empty and both extremes occupied, every pair
    // ratio involves a clamped zero and the estimate is pure floor artifact.
    if m >= 3 {
        let interior: f64 = (1..m - 1).map(|i| w.weight(i)).sum();
        if interior < 1e-12 && w.weight(0) > floor && w.weight(m - 1) > floor {
            return Err(TheoryError::UndefinedTemperature);
        }
    }
    let prefactor_denom = 1.0 - (w.weight(0) + w.weight(m - 1)) / 2.0;
    if prefactor_denom < 1e-12 {
        return Err(TheoryError::UndefinedTemperature);
    }
    let clamped = |i: usize| w.weight(i).max(floor);
    let mut sum = 0.0;
    for i in 1..m {
        let avg = (w.weight(i) + w.weight(i - 1)) / 2.0;
        let de = (spectrum.energy(i) - spectrum.energy(i - 1)) as f64;
        let ratio_w = (clamped(i) / clamped(i - 1)).ln();
        let ratio_n = (spectrum.degeneracy(i) as f64 / spectrum.degeneracy(i - 1) as f64).ln();
        sum += avg * (ratio_w - ratio_n) / de;
    }
    Ok(-sum / prefactor_denom)
}

/// Least-squares fit of `ln N_B` against `E_B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialFit {
    /// Growth rate `α` of the degeneracies, in `1/ΔE`.
    pub alpha: f64,
    /// Degeneracy extrapolated to `E = 0`.
    pub n0: f64,
    /// Largest absolute residual of `ln N_B`; zero means the spectrum is an
    /// exact exponential family and the canonical regime applies.
    pub max_residual: f64,
}

/// Fits the container degeneracies to `N_B = N_0 e^{α E_B}`.
pub fn fit_exponential_degeneracy(spectrum: &Spectrum) -> Result<ExponentialFit, TheoryError> {
    let m = spectrum.level_count();
    if m < 2 {
        return Err(TheoryError::TooFewLevels { need: 2, got: m });
    }
    let xs: Vec<f64> = spectrum.levels().iter().map(|l| l.energy as f64).collect();
    let ys: Vec<f64> = spectrum
        .levels()
        .iter()
        .map(|l| (l.degeneracy as f64).ln())
        .collect();
    let x_mean = xs.iter().sum::<f64>() / m as f64;
    let y_mean = ys.iter().sum::<f64>() / m as f64;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean) * (x - x_mean)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - x_mean) * (y - y_mean))
        .sum();
    let alpha = sxy / sxx;
    let intercept = y_mean - alpha * x_mean;
    let max_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + alpha * x)).abs())
        .fold(0.0, f64::max);
    Ok(ExponentialFit {
        alpha,
        n0: intercept.exp(),
        max_residual,
    })
}
