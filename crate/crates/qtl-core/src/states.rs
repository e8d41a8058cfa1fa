//! Pure states of the composite system, reduced density operators, local
//! observables, and uniform sampling of constrained Hilbert-space regions.
//!
//! The accessible region with a fixed joint energy distribution `{W_AB}` is a
//! product of spheres, one per `(A, B)` block. The uniform measure on it is
//! the product of the Haar measures on those spheres with the block weights
//! held at `√W_AB`; the sampler draws each block as an independent complex
//! Gaussian vector and normalizes.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg;
use crate::spectra::CompositeSystem;
use crate::theory::LevelDistribution;

pub(crate) const NORM_TOL: f64 = 1e-12;
pub(crate) const HERMITICITY_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;
const ENTROPY_EIGENVALUE_FLOOR: f64 = 1e-14;

#[derive(Debug, thiserror::Error)]
pub enum StateError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vector is not normalized: |norm^2 - 1| = {0:e}")]
    NotNormalized(f64),
    #[error("matrix is not Hermitian: max deviation {0:e}")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite: smallest eigenvalue {0:e}")]
    NotPositive(f64),
    #[error("trace is not one: trace = {0}")]
    TraceNotOne(f64),
    #[error("weights must be non-negative: found {0}")]
    NegativeWeight(f64),
    #[error("weights are not normalized: sum = {0}")]
    WeightsNotNormalized(f64),
    #[error(transparent)]
    Linalg(#[from] crate::linalg::LinalgError),
}

/// A normalized pure state over the composite product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Array1<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Array1<Complex64>) -> Result<Self, StateError> {
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(StateError::NotNormalized((norm_sq - 1.0).abs()));
        }
        Ok(PureState { amplitudes })
    }

    /// Skips the normalization check; for internal construction where the
    /// norm is guaranteed (unitary propagation, post-normalized samples).
    pub(crate) fn new_unchecked(amplitudes: Array1<Complex64>) -> Self {
        debug_assert!({
            let n: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
            (n - 1.0).abs() <= 1e-10
        });
        PureState { amplitudes }
    }

    /// The `index`-th product-basis state.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        assert!(index < dim);
        let mut amplitudes = Array1::from_elem(dim, Complex64::ZERO);
        amplitudes[index] = Complex64::ONE;
        PureState { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &Array1<Complex64> {
        &self.amplitudes
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// A reduced (subsystem) density operator: Hermitian, positive semidefinite,
/// unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: Array2<Complex64>,
}

impl DensityOperator {
    pub fn new(matrix: Array2<Complex64>) -> Result<Self, StateError> {
        if matrix.nrows() != matrix.ncols() {
            return Err(StateError::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        let mut herm_dev: f64 = 0.0;
        for i in 0..matrix.nrows() {
            for j in i..matrix.ncols() {
                herm_dev = herm_dev.max((matrix[[i, j]] - matrix[[j, i]].conj()).norm());
            }
        }
        if herm_dev > HERMITICITY_TOL {
            return Err(StateError::NotHermitian(herm_dev));
        }
        let trace: f64 = (0..matrix.nrows()).map(|i| matrix[[i, i]].re).sum();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(StateError::TraceNotOne(trace));
        }
        let eigenvalues = linalg::eigvalsh(&matrix)?;
        if let Some(&min) = eigenvalues.first() {
            if min < -PSD_TOL {
                return Err(StateError::NotPositive(min));
            }
        }
        Ok(DensityOperator { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    /// Spectrum of the operator, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvalsh(&self.matrix).expect("validated density operator must diagonalize")
    }

    /// Diagonal entries (populations in the subsystem energy basis).
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[[i, i]].re).collect()
    }
}

/// Joint probability `W_AB` to find the gas at level `A` and the container at
/// level `B`. Non-negative, sums to one.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    weights: Array2<f64>,
}

impl JointDistribution {
    pub fn new(weights: Array2<f64>) -> Result<Self, StateError> {
        let mut sum = 0.0;
        for &w in weights.iter() {
            if w < 0.0 {
                return Err(StateError::NegativeWeight(w));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(StateError::WeightsNotNormalized(sum));
        }
        Ok(JointDistribution { weights })
    }

    /// Product distribution `W_AB = W_A * W_B`.
    pub fn from_product(gas: &LevelDistribution, container: &LevelDistribution) -> Self {
        let weights = Array2::from_shape_fn((gas.len(), container.len()), |(a, b)| {
            gas.weight(a) * container.weight(b)
        });
        JointDistribution { weights }
    }

    pub fn gas_levels(&self) -> usize {
        self.weights.nrows()
    }

    pub fn container_levels(&self) -> usize {
        self.weights.ncols()
    }

    pub fn weight(&self, gas_level: usize, container_level: usize) -> f64 {
        self.weights[[gas_level, container_level]]
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    pub fn gas_marginal(&self) -> LevelDistribution {
        let w: Vec<f64> = self.weights.rows().into_iter().map(|r| r.sum()).collect();
        LevelDistribution::normalized(w).expect("marginal of a joint distribution is normalized")
    }

    pub fn container_marginal(&self) -> LevelDistribution {
        let w: Vec<f64> = self
            .weights
            .columns()
            .into_iter()
            .map(|c| c.sum())
            .collect();
        LevelDistribution::normalized(w).expect("marginal of a joint distribution is normalized")
    }

    /// Largest pointwise deviation from another joint distribution.
    pub fn max_deviation(&self, other: &JointDistribution) -> f64 {
        self.weights
            .iter()
            .zip(other.weights.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn check_dim(state: &PureState, composite: &CompositeSystem) -> Result<(), StateError> {
    if state.dim() != composite.dim() {
        return Err(StateError::DimensionMismatch {
            expected: composite.dim(),
            got: state.dim(),
        });
    }
    Ok(())
}

/// Reduced state of the gas: trace over the container.
pub fn partial_trace_gas(
    state: &PureState,
    composite: &CompositeSystem,
) -> Result<DensityOperator, StateError> {
    check_dim(state, composite)?;
    let dg = composite.gas().dim();
    let dc = composite.container().dim();
    let psi = state.amplitudes();
    let mut rho = Array2::from_elem((dg, dg), Complex64::ZERO);
    for p in 0..dg {
        for p2 in p..dg {
            let mut acc = Complex64::ZERO;
            for q in 0..dc {
                acc += psi[p * dc + q] * psi[p2 * dc + q].conj();
            }
            rho[[p, p2]] = acc;
            rho[[p2, p]] = acc.conj();
        }
    }
    DensityOperator::new(rho)
}

/// Reduced state of the container: trace over the gas.
pub fn partial_trace_container(
    state: &PureState,
    composite: &CompositeSystem,
) -> Result<DensityOperator, StateError> {
    check_dim(state, composite)?;
    let dg = composite.gas().dim();
    let dc = composite.container().dim();
    let psi = state.amplitudes();
    let mut rho = Array2::from_elem((dc, dc), Complex64::ZERO);
    for q in 0..dc {
        for q2 in q..dc {
            let mut acc = Complex64::ZERO;
            for p in 0..dg {
                acc += psi[p * dc + q] * psi[p * dc + q2].conj();
            }
            rho[[q, q2]] = acc;
            rho[[q2, q]] = acc.conj();
        }
    }
    DensityOperator::new(rho)
}

/// Purity `P = tr(ρ²)`, in `(0, 1]`; equals `1/dim` for the maximally mixed
/// state.
pub fn purity(rho: &DensityOperator) -> f64 {
    rho.matrix().iter().map(|z| z.norm_sqr()).sum()
}

/// Von Neumann entropy `S = -tr(ρ ln ρ)` in units of `k_B`. Eigenvalues below
/// the floor `1e-14` contribute zero.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    rho.eigenvalues()
        .into_iter()
        .filter(|&l| l >= ENTROPY_EIGENVALUE_FLOOR)
        .map(|l| -l * l.ln())
        .sum()
}

/// Joint occupation probabilities `W_AB = Σ_{a,b} |ψ^{AB}_{ab}|²`.
pub fn occupations(
    state: &PureState,
    composite: &CompositeSystem,
) -> Result<JointDistribution, StateError> {
    check_dim(state, composite)?;
    let psi = state.amplitudes();
    let mut w = Array2::zeros((
        composite.gas().level_count(),
        composite.container().level_count(),
    ));
    for a in 0..composite.gas().level_count() {
        for b in 0..composite.container().level_count() {
            w[[a, b]] = composite
                .block_indices(a, b)
                .map(|i| psi[i].norm_sqr())
                .sum();
        }
    }
    JointDistribution::new(w)
}

/// Squared Hilbert-Schmidt distance `tr[(ρ₁ - ρ₂)²]`; zero iff the operators
/// are equal.
pub fn state_distance(rho1: &DensityOperator, rho2: &DensityOperator) -> Result<f64, StateError> {
    if rho1.dim() != rho2.dim() {
        return Err(StateError::DimensionMismatch {
            expected: rho1.dim(),
            got: rho2.dim(),
        });
    }
    Ok(rho1
        .matrix()
        .iter()
        .zip(rho2.matrix().iter())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum())
}

/// Draws a Haar-uniform unit vector in `C^dim` into `out[indices]`, scaled by
/// `scale`. Components are i.i.d. standard complex Gaussians, normalized.
fn draw_block<R: Rng + ?Sized>(
    out: &mut Array1<Complex64>,
    indices: &[usize],
    scale: f64,
    rng: &mut R,
) {
    loop {
        let mut norm_sq = 0.0;
        for &i in indices {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            out[i] = Complex64::new(re, im);
            norm_sq += out[i].norm_sqr();
        }
        // A zero draw has probability zero but would poison the scaling.
        if norm_sq > 0.0 {
            let factor = scale / norm_sq.sqrt();
            for &i in indices {
                out[i] *= factor;
            }
            return;
        }
    }
}

/// Samples a state uniformly from the accessible region with joint occupation
/// probabilities fixed at `target`: each `(A, B)` block is an independent
/// Haar-uniform unit vector scaled by `√W_AB`.
///
/// The occupations of the result reproduce `target` exactly up to
/// normalization rounding, and a fixed RNG stream reproduces the state
/// bit-identically.
pub fn sample_accessible_region<R: Rng + ?Sized>(
    composite: &CompositeSystem,
    target: &JointDistribution,
    rng: &mut R,
) -> Result<PureState, StateError> {
    if target.gas_levels() != composite.gas().level_count() {
        return Err(StateError::DimensionMismatch {
            expected: composite.gas().level_count(),
            got: target.gas_levels(),
        });
    }
    if target.container_levels() != composite.container().level_count() {
        return Err(StateError::DimensionMismatch {
            expected: composite.container().level_count(),
            got: target.container_levels(),
        });
    }
    let mut amplitudes = Array1::from_elem(composite.dim(), Complex64::ZERO);
    for a in 0..target.gas_levels() {
        for b in 0..target.container_levels() {
            let w = target.weight(a, b);
            if w == 0.0 {
                continue;
            }
            let indices: Vec<usize> = composite.block_indices(a, b).collect();
            draw_block(&mut amplitudes, &indices, w.sqrt(), rng);
        }
    }
    PureState::new(amplitudes)
}

/// Samples a normalized local state with fixed level weights: a Haar-uniform
/// vector within each level subspace, scaled by `√W`.
pub fn sample_level_vector<R: Rng + ?Sized>(
    spectrum: &crate::spectra::Spectrum,
    weights: &LevelDistribution,
    rng: &mut R,
) -> Result<Array1<Complex64>, StateError> {
    if weights.len() != spectrum.level_count() {
        return Err(StateError::DimensionMismatch {
            expected: spectrum.level_count(),
            got: weights.len(),
        });
    }
    let mut amplitudes = Array1::from_elem(spectrum.dim(), Complex64::ZERO);
    for (level, w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let start = spectrum.offset(level);
        let indices: Vec<usize> = (start..start + spectrum.degeneracy(level)).collect();
        draw_block(&mut amplitudes, &indices, w.sqrt(), rng);
    }
    Ok(amplitudes)
}

/// Tensor product of normalized local amplitude vectors. The gas-reduced
/// state of the result is pure (zero local entropy).
pub fn product_state(
    gas_amplitudes: &Array1<Complex64>,
    container_amplitudes: &Array1<Complex64>,
    composite: &CompositeSystem,
) -> Result<PureState, StateError> {
    if gas_amplitudes.len() != composite.gas().dim() {
        return Err(StateError::DimensionMismatch {
            expected: composite.gas().dim(),
            got: gas_amplitudes.len(),
        });
    }
    if container_amplitudes.len() != composite.container().dim() {
        return Err(StateError::DimensionMismatch {
            expected: composite.container().dim(),
            got: container_amplitudes.len(),
        });
    }
    for v in [gas_amplitudes, container_amplitudes] {
        let norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(StateError::NotNormalized((norm_sq - 1.0).abs()));
        }
    }
    let dc = composite.container().dim();
    let mut amplitudes = Array1::from_elem(composite.dim(), Complex64::ZERO);
    for (p, g) in gas_amplitudes.iter().enumerate() {
        for (q, c) in container_amplitudes.iter().enumerate() {
            amplitudes[p * dc + q] = g * c;
        }
    }
    PureState::new(amplitudes)
}
