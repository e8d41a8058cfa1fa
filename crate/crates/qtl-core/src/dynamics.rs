//! Exact Schrödinger propagation and trajectory observables.
//!
//! The Hamiltonian is diagonalized once; states at arbitrary times follow
//! from phase evolution in the eigenbasis, `ψ(t) = U e^{-iΛt} U† ψ(0)`, with
//! no step-size error at any time. All requested times are evaluated in one
//! dense matrix product. Dimensions up to [`MAX_DENSE_DIM`] are supported;
//! the largest scenario in the test suites is 930.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::interactions::HermitianOperator;
use crate::linalg;
use crate::spectra::CompositeSystem;
use crate::states::{
    occupations, partial_trace_gas, purity, state_distance, von_neumann_entropy, DensityOperator,
    PureState,
};

/// Hard cap on the dense eigendecomposition.
pub const MAX_DENSE_DIM: usize = 4096;

/// Norm drift beyond this aborts a propagation run.
const NORM_DRIFT_TOL: f64 = 1e-10;

/// Minimum number of samples a fluctuation window must contain.
const MIN_WINDOW_SAMPLES: usize = 10;

#[derive(Debug, thiserror::Error)]
pub enum DynamicsError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dimension {dim} exceeds the dense propagation cap {max}")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("sample times must be strictly increasing")]
    NonMonotonicTimes,
    #[error("norm drift {drift:e} at t = {time} exceeds tolerance")]
    ExcessiveNormDrift { time: f64, drift: f64 },
    #[error("fluctuation window [{start}, {end}] contains no samples")]
    EmptyWindow { start: f64, end: f64 },
    #[error("fluctuation window holds {got} samples, need at least {need}")]
    WindowTooSmall { got: usize, need: usize },
    #[error("scaling fit needs at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("scaling fit requires positive sizes and deviations")]
    NonPositiveData,
    #[error("scaling fit is degenerate: all sizes equal")]
    DegenerateFit,
    #[error(transparent)]
    Linalg(#[from] crate::linalg::LinalgError),
    #[error(transparent)]
    State(#[from] crate::states::StateError),
}

/// The full Hamiltonian: diagonal decoupled part `E_A + E_B` plus the
/// interaction.
pub fn assemble_hamiltonian(
    composite: &CompositeSystem,
    interaction: &HermitianOperator,
) -> Result<HermitianOperator, DynamicsError> {
    if interaction.dim() != composite.dim() {
        return Err(DynamicsError::DimensionMismatch {
            expected: composite.dim(),
            got: interaction.dim(),
        });
    }
    let mut matrix = interaction.matrix().clone();
    for (i, e) in composite.diagonal_energies().into_iter().enumerate() {
        matrix[[i, i]] += Complex64::new(e, 0.0);
    }
    Ok(HermitianOperator::from_matrix_unchecked(matrix))
}

fn lifted_diagonal(energies: impl Iterator<Item = f64>, dim: usize) -> HermitianOperator {
    let mut matrix = Array2::from_elem((dim, dim), Complex64::ZERO);
    for (i, e) in energies.enumerate() {
        matrix[[i, i]] = Complex64::new(e, 0.0);
    }
    HermitianOperator::from_matrix_unchecked(matrix)
}

/// The gas Hamiltonian lifted to the composite space: diagonal `E_A` per
/// product-basis state.
pub fn lifted_gas_hamiltonian(composite: &CompositeSystem) -> HermitianOperator {
    let dim = composite.dim();
    lifted_diagonal(
        (0..dim).map(|i| composite.gas().energy(composite.state_of(i).gas_level) as f64),
        dim,
    )
}

/// The container Hamiltonian lifted to the composite space.
pub fn lifted_container_hamiltonian(composite: &CompositeSystem) -> HermitianOperator {
    let dim = composite.dim();
    lifted_diagonal(
        (0..dim).map(|i| {
            composite
                .container()
                .energy(composite.state_of(i).container_level) as f64
        }),
        dim,
    )
}

/// Run identification carried by a trajectory into its serialized outputs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunMeta {
    pub scenario: String,
    pub seed: u64,
    pub delta_i: f64,
}

/// Local observables at one sample time.
#[derive(Debug, Clone)]
pub struct TrajectoryPoint {
    pub time: f64,
    /// Gas level occupations `W^g_A(t)` (raw marginals, not renormalized).
    pub gas_occupations: Vec<f64>,
    /// Joint occupations `W_AB(t)`.
    pub joint_occupations: Array2<f64>,
    /// Gas purity `P^g(t)`.
    pub purity: f64,
    /// Gas entropy `S^g(t)` in `k_B`.
    pub entropy: f64,
    /// Squared distance `tr[(ρ^g(t) - ρ_eq)²]` to the reference equilibrium
    /// state, when one was supplied.
    pub distance: Option<f64>,
}

/// Time series of local observables from one propagation run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    points: Vec<TrajectoryPoint>,
    max_norm_drift: f64,
    pub meta: RunMeta,
}

impl Trajectory {
    pub fn points(&self) -> &[TrajectoryPoint] {
        &self.points
    }

    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.time).collect()
    }

    /// Largest deviation of the raw state norm from one over the run.
    pub fn max_norm_drift(&self) -> f64 {
        self.max_norm_drift
    }

    /// Extracts a scalar series, e.g. `|p| p.entropy`.
    pub fn series<F: Fn(&TrajectoryPoint) -> f64>(&self, f: F) -> Vec<f64> {
        self.points.iter().map(f).collect()
    }

    pub fn occupation_series(&self, gas_level: usize) -> Vec<f64> {
        self.series(|p| p.gas_occupations[gas_level])
    }

    /// Largest pointwise change of any joint occupation over the whole run,
    /// relative to the first sample.
    pub fn max_joint_occupation_drift(&self) -> f64 {
        let first = &self.points[0].joint_occupations;
        self.points
            .iter()
            .flat_map(|p| {
                p.joint_occupations
                    .iter()
                    .zip(first.iter())
                    .map(|(w, w0)| (w - w0).abs())
            })
            .fold(0.0, f64::max)
    }
}

/// Spectral decomposition of a Hamiltonian, reusable across initial states
/// and time grids.
pub struct Propagator {
    energies: Array1<f64>,
    basis: Array2<Complex64>,
}

impl Propagator {
    /// Diagonalizes the Hamiltonian once (`O(dim³)`).
    pub fn new(hamiltonian: &HermitianOperator) -> Result<Self, DynamicsError> {
        if hamiltonian.dim() > MAX_DENSE_DIM {
            return Err(DynamicsError::DimensionTooLarge {
                dim: hamiltonian.dim(),
                max: MAX_DENSE_DIM,
            });
        }
        let (energies, basis) = linalg::eigh(hamiltonian.matrix())?;
        Ok(Propagator { energies, basis })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Eigenvalues of the Hamiltonian, ascending.
    pub fn energies(&self) -> &Array1<f64> {
        &self.energies
    }

    fn check_state(&self, psi0: &PureState) -> Result<(), DynamicsError> {
        if psi0.dim() != self.dim() {
            return Err(DynamicsError::DimensionMismatch {
                expected: self.dim(),
                got: psi0.dim(),
            });
        }
        Ok(())
    }

    /// States at the given times (arbitrary, including negative). States are
    /// renormalized to unit norm; a raw drift beyond `1e-10` is an error.
    pub fn states_at(
        &self,
        psi0: &PureState,
        times: &[f64],
    ) -> Result<Vec<PureState>, DynamicsError> {
        Ok(self.evolved(psi0, times)?.0)
    }

    /// State at a single time.
    pub fn state_at(&self, psi0: &PureState, time: f64) -> Result<PureState, DynamicsError> {
        Ok(self
            .states_at(psi0, &[time])?
            .pop()
            .expect("one state per requested time"))
    }

    fn evolved(
        &self,
        psi0: &PureState,
        times: &[f64],
    ) -> Result<(Vec<PureState>, f64), DynamicsError> {
        self.check_state(psi0)?;
        let n = self.dim();
        // Coefficients in the eigenbasis, then one dense product for all
        // phase-evolved columns.
        let coeff = linalg::adjoint_matvec(&self.basis, psi0.amplitudes());
        let mut phases = Array2::from_elem((n, times.len()), Complex64::ZERO);
        for (k, &t) in times.iter().enumerate() {
            for i in 0..n {
                let phase = Complex64::from_polar(1.0, -self.energies[i] * t);
                phases[[i, k]] = coeff[i] * phase;
            }
        }
        let evolved = linalg::matmul(&self.basis, &phases);
        let mut states = Vec::with_capacity(times.len());
        let mut max_drift: f64 = 0.0;
        for (k, &t) in times.iter().enumerate() {
            let mut v = Array1::from_elem(n, Complex64::ZERO);
            let mut norm_sq = 0.0;
            for i in 0..n {
                v[i] = evolved[[i, k]];
                norm_sq += v[i].norm_sqr();
            }
            let drift = (norm_sq.sqrt() - 1.0).abs();
            if drift > NORM_DRIFT_TOL {
                return Err(DynamicsError::ExcessiveNormDrift { time: t, drift });
            }
            max_drift = max_drift.max(drift);
            let scale = 1.0 / norm_sq.sqrt();
            v.mapv_inplace(|z| z * scale);
            states.push(PureState::new_unchecked(v));
        }
        Ok((states, max_drift))
    }

    /// Propagates and records all local observables at each sample time.
    /// `equilibrium` is the reference state for the distance column.
    pub fn trajectory(
        &self,
        composite: &CompositeSystem,
        psi0: &PureState,
        times: &[f64],
        equilibrium: Option<&DensityOperator>,
    ) -> Result<Trajectory, DynamicsError> {
        if composite.dim() != self.dim() {
            return Err(DynamicsError::DimensionMismatch {
                expected: self.dim(),
                got: composite.dim(),
            });
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(DynamicsError::NonMonotonicTimes);
        }
        let (states, max_norm_drift) = self.evolved(psi0, times)?;
        let mut points = Vec::with_capacity(times.len());
        for (state, &time) in states.iter().zip(times) {
            let joint = occupations(state, composite)?;
            let gas_occupations: Vec<f64> = joint
                .weights()
                .rows()
                .into_iter()
                .map(|r| r.sum())
                .collect();
            let rho = partial_trace_gas(state, composite)?;
            let distance = match equilibrium {
                Some(eq) => Some(state_distance(&rho, eq)?),
                None => None,
            };
            points.push(TrajectoryPoint {
                time,
                gas_occupations,
                joint_occupations: joint.weights().clone(),
                purity: purity(&rho),
                entropy: von_neumann_entropy(&rho),
                distance,
            });
        }
        Ok(Trajectory {
            points,
            max_norm_drift,
            meta: RunMeta::default(),
        })
    }
}

/// One-call propagation: diagonalize, evolve, record observables.
pub fn propagate(
    composite: &CompositeSystem,
    hamiltonian: &HermitianOperator,
    psi0: &PureState,
    times: &[f64],
    equilibrium: Option<&DensityOperator>,
) -> Result<Trajectory, DynamicsError> {
    Propagator::new(hamiltonian)?.trajectory(composite, psi0, times, equilibrium)
}

fn window_indices(times: &[f64], start: f64, end: f64) -> Result<(usize, usize), DynamicsError> {
    if start >= end {
        return Err(DynamicsError::EmptyWindow { start, end });
    }
    let lo = times.partition_point(|&t| t < start);
    let hi = times.partition_point(|&t| t <= end);
    if lo >= hi {
        return Err(DynamicsError::EmptyWindow { start, end });
    }
    Ok((lo, hi))
}

fn trapezoid(series: &[f64], times: &[f64]) -> f64 {
    let mut acc = 0.0;
    for k in 1..series.len() {
        acc += 0.5 * (series[k] + series[k - 1]) * (times[k] - times[k - 1]);
    }
    acc
}

/// Time average of a sampled series over `[start, end]` by trapezoidal
/// quadrature.
pub fn time_average(
    series: &[f64],
    times: &[f64],
    start: f64,
    end: f64,
) -> Result<f64, DynamicsError> {
    assert_eq!(series.len(), times.len());
    let (lo, hi) = window_indices(times, start, end)?;
    if hi - lo < 2 {
        return Err(DynamicsError::WindowTooSmall {
            got: hi - lo,
            need: 2,
        });
    }
    let t = &times[lo..hi];
    let x = &series[lo..hi];
    Ok(trapezoid(x, t) / (t[t.len() - 1] - t[0]))
}

/// Squared time fluctuation of a series over `[start, end]`: the time average
/// of the square minus the square of the time average, both by trapezoidal
/// quadrature. The fluctuation measure itself is the square root.
pub fn time_fluctuation(
    series: &[f64],
    times: &[f64],
    start: f64,
    end: f64,
) -> Result<f64, DynamicsError> {
    assert_eq!(series.len(), times.len());
    let (lo, hi) = window_indices(times, start, end)?;
    if hi - lo < MIN_WINDOW_SAMPLES {
        return Err(DynamicsError::WindowTooSmall {
            got: hi - lo,
            need: MIN_WINDOW_SAMPLES,
        });
    }
    let t = &times[lo..hi];
    let x = &series[lo..hi];
    let span = t[t.len() - 1] - t[0];
    let mean = trapezoid(x, t) / span;
    let sq: Vec<f64> = x.iter().map(|v| v * v).collect();
    let mean_sq = trapezoid(&sq, t) / span;
    Ok((mean_sq - mean * mean).max(0.0))
}

/// First sampled time at which the series comes within `1/e` of its initial
/// distance to `target`; `None` if it never does.
pub fn relaxation_time(series: &[f64], times: &[f64], target: f64) -> Option<f64> {
    assert_eq!(series.len(), times.len());
    let d0 = (series.first()? - target).abs();
    let threshold = d0 / std::f64::consts::E;
    series
        .iter()
        .zip(times)
        .find(|(x, _)| (*x - target).abs() <= threshold)
        .map(|(_, &t)| t)
}

/// Power-law fit of fluctuation size against container size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    /// Coefficient `c` in `Δ = sqrt(c / N^{2p})`, i.e. `Δ = sqrt(c) N^{-p}`.
    pub coefficient: f64,
    /// Free exponent `p`.
    pub exponent: f64,
    /// RMS residual of `ln Δ` under the free fit.
    pub rms_residual: f64,
    /// Coefficient of the constrained fit with `p` fixed at `1/2`,
    /// i.e. `Δ = sqrt(c / N)`.
    pub constrained_coefficient: f64,
}

/// Least-squares fit of `ln Δ = ln sqrt(c) - p ln N` with a free exponent,
/// plus the constrained `p = 1/2` fit.
pub fn fit_inverse_size_scaling(
    sizes: &[f64],
    deviations: &[f64],
) -> Result<ScalingFit, DynamicsError> {
    if sizes.len() != deviations.len() || sizes.len() < 3 {
        return Err(DynamicsError::TooFewPoints {
            need: 3,
            got: sizes.len().min(deviations.len()),
        });
    }
    if sizes
        .iter()
        .chain(deviations)
        .any(|&v| v <= 0.0 || !v.is_finite())
    {
        return Err(DynamicsError::NonPositiveData);
    }
    let xs: Vec<f64> = sizes.iter().map(|&n| n.ln()).collect();
    let ys: Vec<f64> = deviations.iter().map(|&d| d.ln()).collect();
    let n = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean) * (x - x_mean)).sum();
    if sxx == 0.0 {
        return Err(DynamicsError::DegenerateFit);
    }
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - x_mean) * (y - y_mean))
        .sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let rms = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum::<f64>()
        / n)
        .sqrt();
    // ln Delta = (1/2) ln c - p ln N.
    let exponent = -slope;
    let coefficient = (2.0 * intercept).exp();
    let constrained_intercept = xs.iter().zip(&ys).map(|(x, y)| y + 0.5 * x).sum::<f64>() / n;
    Ok(ScalingFit {
        coefficient,
        exponent,
        rms_residual: rms,
        constrained_coefficient: (2.0 * constrained_intercept).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interactions::{microcanonical_interaction, random_hermitian};
    use crate::spectra::Spectrum;
    use crate::states::product_state;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn linspace(end: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| end * k as f64 / (n - 1) as f64).collect()
    }

    fn two_by_two() -> CompositeSystem {
        CompositeSystem::new(
            Spectrum::from_pairs(&[(0, 1), (1, 1)]).unwrap(),
            Spectrum::from_pairs(&[(0, 1), (1, 1)]).unwrap(),
        )
    }

    #[test]
    fn hamiltonian_diagonal_part_is_shell_energy() {
        let c = two_by_two();
        let h = assemble_hamiltonian(&c, &HermitianOperator::zeros(4)).unwrap();
        let expected = [0.0, 1.0, 1.0, 2.0];
        for (i, &e) in expected.iter().enumerate() {
            assert_eq!(h.matrix()[[i, i]].re, e);
        }

        // Trace sum rule: tr H = sum over shells of E * N^(E) + tr I.
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let i_op = random_hermitian(4, 0.3, &mut rng);
        let h = assemble_hamiltonian(&c, &i_op).unwrap();
        let tr_h: f64 = (0..4).map(|i| h.matrix()[[i, i]].re).sum();
        let tr_i: f64 = (0..4).map(|i| i_op.matrix()[[i, i]].re).sum();
        let shell_sum: f64 = c
            .shell_energies()
            .map(|e| e as f64 * c.shell_degeneracy(e).unwrap() as f64)
            .sum();
        assert_abs_diff_eq!(tr_h, shell_sum + tr_i, epsilon = 1e-12);
    }

    #[test]
    fn decoupled_occupations_are_constant() {
        let c = two_by_two();
        let h = assemble_hamiltonian(&c, &HermitianOperator::zeros(4)).unwrap();
        let g = Array1::from_vec(vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]);
        let k = Array1::from_vec(vec![
            Complex64::new(0.5_f64.sqrt(), 0.0),
            Complex64::new(0.5_f64.sqrt(), 0.0),
        ]);
        let psi0 = product_state(&g, &k, &c).unwrap();
        let times = linspace(20.0, 101);
        let traj = propagate(&c, &h, &psi0, &times, None).unwrap();
        assert!(traj.max_joint_occupation_drift() < 1e-12);
        assert!(traj.max_norm_drift() < 1e-12);
    }

    #[test]
    fn rabi_oscillation_between_degenerate_product_states() {
        // Coupling the two degenerate product states |0,1> and |1,0> with a
        // real amplitude lambda makes the gas occupation oscillate as
        // cos^2(lambda t).
        let c = two_by_two();
        let lambda = 0.35;
        let mut m = Array2::from_elem((4, 4), Complex64::ZERO);
        m[[1, 2]] = Complex64::new(lambda, 0.0);
        m[[2, 1]] = Complex64::new(lambda, 0.0);
        let i_op = HermitianOperator::new(m).unwrap();
        let h = assemble_hamiltonian(&c, &i_op).unwrap();
        let psi0 = PureState::basis_state(4, 1); // |gas 0, container 1>
        let times = linspace(30.0, 301);
        let traj = propagate(&c, &h, &psi0, &times, None).unwrap();
        for p in traj.points() {
            let expected = (lambda * p.time).cos().powi(2);
            assert_abs_diff_eq!(p.gas_occupations[0], expected, epsilon = 1e-10);
        }
    }

    #[test]
    fn propagation_is_unitary_energy_conserving_and_reversible() {
        let c = CompositeSystem::new(
            Spectrum::from_pairs(&[(0, 2), (1, 1)]).unwrap(),
            Spectrum::from_pairs(&[(0, 4), (1, 6)]).unwrap(),
        );
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let i_op = random_hermitian(c.dim(), 0.05, &mut rng);
        let h = assemble_hamiltonian(&c, &i_op).unwrap();
        let prop = Propagator::new(&h).unwrap();
        let psi0 = {
            let g = crate::states::sample_level_vector(
                c.gas(),
                &crate::theory::LevelDistribution::new(vec![0.4, 0.6]).unwrap(),
                &mut rng,
            )
            .unwrap();
            let k = crate::states::sample_level_vector(
                c.container(),
                &crate::theory::LevelDistribution::delta(2, 0),
                &mut rng,
            )
            .unwrap();
            product_state(&g, &k, &c).unwrap()
        };

        let energy0 = h.expectation(&psi0);
        for t in [3.7, 12.0, 55.0] {
            let psi_t = prop.state_at(&psi0, t).unwrap();
            assert_abs_diff_eq!(psi_t.norm_sq(), 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(h.expectation(&psi_t), energy0, epsilon = 1e-10);

            // Propagate back to the start.
            let back = prop.state_at(&psi_t, -t).unwrap();
            let overlap: Complex64 = back
                .amplitudes()
                .iter()
                .zip(psi0.amplitudes().iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            assert!((overlap.norm() - 1.0).abs() < 1e-8);
            let max_diff = back
                .amplitudes()
                .iter()
                .zip(psi0.amplitudes().iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(max_diff < 1e-8, "time reversal residual {max_diff}");
        }
    }

    #[test]
    fn microcanonical_interaction_preserves_joint_occupations() {
        let c = CompositeSystem::new(
            Spectrum::from_pairs(&[(0, 1), (1, 1)]).unwrap(),
            Spectrum::from_pairs(&[(0, 8)]).unwrap(),
        );
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let i_op = microcanonical_interaction(&c, 0.05, &mut rng);
        let h = assemble_hamiltonian(&c, &i_op).unwrap();
        let g = Array1::from_vec(vec![
            Complex64::new(0.15_f64.sqrt(), 0.0),
            Complex64::new(0.85_f64.sqrt(), 0.0),
        ]);
        let k = crate::states::sample_level_vector(
            c.container(),
            &crate::theory::LevelDistribution::delta(1, 0),
            &mut rng,
        )
        .unwrap();
        let psi0 = product_state(&g, &k, &c).unwrap();
        let times = linspace(100.0, 401);
        let traj = propagate(&c, &h, &psi0, &times, None).unwrap();
        assert!(traj.max_joint_occupation_drift() < 1e-10);
        // Entropy still grows: decoherence without energy exchange.
        let s_late = traj.points().last().unwrap().entropy;
        assert!(s_late > 0.1, "entropy failed to grow: {s_late}");
    }

    #[test]
    fn trajectory_rejects_bad_time_grids() {
        let c = two_by_two();
        let h = assemble_hamiltonian(&c, &HermitianOperator::zeros(4)).unwrap();
        let psi0 = PureState::basis_state(4, 0);
        let err = propagate(&c, &h, &psi0, &[0.0, 1.0, 1.0], None);
        assert!(matches!(err, Err(DynamicsError::NonMonotonicTimes)));
    }

    #[test]
    fn fluctuation_of_constant_series_is_zero() {
        let times = linspace(10.0, 100);
        let series = vec![0.42; 100];
        let v = time_fluctuation(&series, &times, 0.0, 10.0).unwrap();
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn fluctuation_of_sine_over_full_periods() {
        // Variance of c + a sin(w t) over an integer number of periods is
        // a^2/2; the trapezoidal rule is spectrally accurate here.
        let periods = 5.0;
        let omega = 2.0 * std::f64::consts::PI;
        let t_end = periods;
        let n = 2001;
        let times = linspace(t_end, n);
        let a = 0.3;
        let series: Vec<f64> = times.iter().map(|&t| 1.7 + a * (omega * t).sin()).collect();
        let v = time_fluctuation(&series, &times, 0.0, t_end).unwrap();
        assert_abs_diff_eq!(v, a * a / 2.0, epsilon = 1e-8);
    }

    #[test]
    fn fluctuation_window_errors() {
        let times = linspace(10.0, 100);
        let series = vec![1.0; 100];
        assert!(matches!(
            time_fluctuation(&series, &times, 5.0, 5.0),
            Err(DynamicsError::EmptyWindow { .. })
        ));
        assert!(matches!(
            time_fluctuation(&series, &times, 9.95, 10.0),
            Err(DynamicsError::WindowTooSmall { .. })
        ));
        assert!(matches!(
            time_average(&series, &times, 20.0, 30.0),
            Err(DynamicsError::EmptyWindow { .. })
        ));
    }

    #[test]
    fn scaling_fit_recovers_its_generator() {
        let sizes = [8.0f64, 16.0, 32.0, 64.0, 128.0];
        let deviations: Vec<f64> = sizes.iter().map(|n| (0.053 / n).sqrt()).collect();
        let fit = fit_inverse_size_scaling(&sizes, &deviations).unwrap();
        assert_abs_diff_eq!(fit.exponent, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.coefficient, 0.053, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.constrained_coefficient, 0.053, epsilon = 1e-12);
        assert!(fit.rms_residual < 1e-12);
    }

    #[test]
    fn scaling_fit_error_paths() {
        assert!(matches!(
            fit_inverse_size_scaling(&[8.0, 16.0], &[0.1, 0.05]),
            Err(DynamicsError::TooFewPoints { .. })
        ));
        assert!(matches!(
            fit_inverse_size_scaling(&[8.0, 8.0, 8.0], &[0.1, 0.1, 0.1]),
            Err(DynamicsError::DegenerateFit)
        ));
        assert!(matches!(
            fit_inverse_size_scaling(&[8.0, 16.0, -1.0], &[0.1, 0.05, 0.02]),
            Err(DynamicsError::NonPositiveData)
        ));
    }

    #[test]
    fn relaxation_time_of_exponential_decay() {
        let times = linspace(10.0, 1001);
        let series: Vec<f64> = times.iter().map(|&t| 0.5 + 0.4 * (-t).exp()).collect();
        let t_relax = relaxation_time(&series, &times, 0.5).unwrap();
        assert_abs_diff_eq!(t_relax, 1.0, epsilon = 0.02);
    }
}
