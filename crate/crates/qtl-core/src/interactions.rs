//! Random interaction operators between gas and container.
//!
//! The unconstrained generator fills a matrix with i.i.d. Gaussian entries
//! (zero mean, standard deviation `delta_i` for real and imaginary parts,
//! including the diagonal) and Hermitizes it as `(G + G†)/2`, which halves
//! the off-diagonal variance. Entries are drawn in row-major order, so a
//! fixed RNG stream reproduces the operator bit-identically regardless of
//! how callers schedule the surrounding work.
//!
//! The block-diagonal variant conserves every joint occupation `W_AB`: it
//! commutes with both lifted subsystem Hamiltonians, which is the defining
//! property of a coupling that exchanges no energy.

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg;
use crate::spectra::CompositeSystem;
use crate::states::PureState;

#[derive(Debug, thiserror::Error)]
pub enum InteractionError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not Hermitian: max deviation {0:e}")]
    NotHermitian(f64),
    #[error("malformed operator CSV (expected rows `row,col,re,im`)")]
    MalformedCsv,
}

/// A Hermitian operator on the composite (or a subsystem) Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: Array2<Complex64>,
}

impl HermitianOperator {
    pub fn new(matrix: Array2<Complex64>) -> Result<Self, InteractionError> {
        if matrix.nrows() != matrix.ncols() {
            return Err(InteractionError::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        let mut dev: f64 = 0.0;
        for i in 0..matrix.nrows() {
            for j in i..matrix.ncols() {
                dev = dev.max((matrix[[i, j]] - matrix[[j, i]].conj()).norm());
            }
        }
        if dev > crate::states::HERMITICITY_TOL {
            return Err(InteractionError::NotHermitian(dev));
        }
        Ok(HermitianOperator { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: Array2<Complex64>) -> Self {
        HermitianOperator { matrix }
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianOperator {
            matrix: Array2::from_elem((dim, dim), Complex64::ZERO),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    /// Expectation value `<psi|O|psi>` (real by Hermiticity).
    pub fn expectation(&self, state: &PureState) -> f64 {
        let v = state.amplitudes();
        let av = linalg::matvec(&self.matrix, v);
        v.iter()
            .zip(av.iter())
            .map(|(x, y)| (x.conj() * y).re)
            .sum()
    }

    /// Largest entry magnitude of the commutator `[self, other]`.
    pub fn commutator_max_norm(&self, other: &HermitianOperator) -> f64 {
        let ab = linalg::matmul(&self.matrix, &other.matrix);
        let ba = linalg::matmul(&other.matrix, &self.matrix);
        ab.iter()
            .zip(ba.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// Writes the operator as CSV rows `row,col,re,im`. The shortest
    /// round-trip float format makes a reload bit-identical, so a generated
    /// interaction can be replayed exactly.
    pub fn save_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "row,col,re,im")?;
        for ((i, j), z) in self.matrix.indexed_iter() {
            writeln!(w, "{i},{j},{},{}", z.re, z.im)?;
        }
        Ok(())
    }

    /// Reads an operator written by [`save_csv`](Self::save_csv).
    pub fn load_csv<R: std::io::BufRead>(r: R) -> Result<Self, InteractionError> {
        let mut entries: Vec<(usize, usize, Complex64)> = Vec::new();
        let mut dim = 0usize;
        for line in r.lines() {
            let line = line.map_err(|_| InteractionError::MalformedCsv)?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("row") {
                continue;
            }
            let mut parts = line.split(',');
            let mut field = || parts.next().ok_or(InteractionError::MalformedCsv);
            let i: usize = field()?
                .parse()
                .map_err(|_| InteractionError::MalformedCsv)?;
            let j: usize = field()?
                .parse()
                .map_err(|_| InteractionError::MalformedCsv)?;
            let re: f64 = field()?
                .parse()
                .map_err(|_| InteractionError::MalformedCsv)?;
            let im: f64 = field()?
                .parse()
                .map_err(|_| InteractionError::MalformedCsv)?;
            dim = dim.max(i + 1).max(j + 1);
            entries.push((i, j, Complex64::new(re, im)));
        }
        let mut matrix = Array2::from_elem((dim, dim), Complex64::ZERO);
        for (i, j, z) in entries {
            matrix[[i, j]] = z;
        }
        HermitianOperator::new(matrix)
    }
}

fn gaussian_matrix<R: Rng + ?Sized>(dim: usize, sigma: f64, rng: &mut R) -> Array2<Complex64> {
    let mut g = Array2::from_elem((dim, dim), Complex64::ZERO);
    for i in 0..dim {
        for j in 0..dim {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            g[[i, j]] = Complex64::new(sigma * re, sigma * im);
        }
    }
    g
}

/// Draws a random Hermitian operator `(G + G†)/2` from i.i.d. Gaussian
/// entries with standard deviation `delta_i`.
pub fn random_hermitian<R: Rng + ?Sized>(
    dim: usize,
    delta_i: f64,
    rng: &mut R,
) -> HermitianOperator {
    assert!(dim >= 1, "operator dimension must be at least 1");
    assert!(delta_i >= 0.0, "interaction strength must be non-negative");
    let g = gaussian_matrix(dim, delta_i, rng);
    let mut h = Array2::from_elem((dim, dim), Complex64::ZERO);
    for i in 0..dim {
        h[[i, i]] = Complex64::new(g[[i, i]].re, 0.0);
        for j in i + 1..dim {
            let v = 0.5 * (g[[i, j]] + g[[j, i]].conj());
            h[[i, j]] = v;
            h[[j, i]] = v.conj();
        }
    }
    HermitianOperator::from_matrix_unchecked(h)
}

/// A coupling that exchanges no energy: block-diagonal in the `(A, B)` level
/// decomposition, each diagonal block an independent random Hermitian matrix,
/// all cross-block entries exactly zero.
pub fn microcanonical_interaction<R: Rng + ?Sized>(
    composite: &CompositeSystem,
    delta_i: f64,
    rng: &mut R,
) -> HermitianOperator {
    let mut matrix = Array2::from_elem((composite.dim(), composite.dim()), Complex64::ZERO);
    for a in 0..composite.gas().level_count() {
        for b in 0..composite.container().level_count() {
            let indices: Vec<usize> = composite.block_indices(a, b).collect();
            let block = random_hermitian(indices.len(), delta_i, rng);
            scatter_block(&mut matrix, &indices, block.matrix());
        }
    }
    HermitianOperator::from_matrix_unchecked(matrix)
}

/// A coupling restricted to shells of fixed total energy: it exchanges energy
/// between the subsystems but conserves the total unperturbed energy exactly.
/// Stress-test variant; the unconstrained [`random_hermitian`] is the default
/// for exchange scenarios.
pub fn shell_restricted_interaction<R: Rng + ?Sized>(
    composite: &CompositeSystem,
    delta_i: f64,
    rng: &mut R,
) -> HermitianOperator {
    let mut matrix = Array2::from_elem((composite.dim(), composite.dim()), Complex64::ZERO);
    for energy in composite.shell_energies().collect::<Vec<_>>() {
        let mut indices = Vec::new();
        for &(a, b) in composite.shell_pairs(energy).unwrap() {
            indices.extend(composite.block_indices(a, b));
        }
        let block = random_hermitian(indices.len(), delta_i, rng);
        scatter_block(&mut matrix, &indices, block.matrix());
    }
    HermitianOperator::from_matrix_unchecked(matrix)
}

fn scatter_block(matrix: &mut Array2<Complex64>, indices: &[usize], block: &Array2<Complex64>) {
    for (k, &i) in indices.iter().enumerate() {
        for (l, &j) in indices.iter().enumerate() {
            matrix[[i, j]] = block[[k, l]];
        }
    }
}

/// Weak-coupling diagnostics for a state: the RMS interaction energy and the
/// subsystem energies it must stay far below.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingDiagnostics {
    /// `sqrt(<psi|I²|psi>)`.
    pub interaction_rms: f64,
    /// `<psi|H_gas|psi>` in grid units.
    pub gas_energy: f64,
    /// `<psi|H_container|psi>` in grid units.
    pub container_energy: f64,
}

/// Evaluates the weak-coupling inequality data on a state. `gas_full` and
/// `container_full` are the subsystem Hamiltonians lifted to the composite
/// space; the caller judges whether `interaction_rms` is small enough.
pub fn coupling_diagnostics(
    state: &PureState,
    interaction: &HermitianOperator,
    gas_full: &HermitianOperator,
    container_full: &HermitianOperator,
) -> Result<CouplingDiagnostics, InteractionError> {
    for op in [interaction, gas_full, container_full] {
        if op.dim() != state.dim() {
            return Err(InteractionError::DimensionMismatch {
                expected: state.dim(),
                got: op.dim(),
            });
        }
    }
    // <psi|I^2|psi> = ||I psi||^2 for Hermitian I.
    let i_psi = linalg::matvec(interaction.matrix(), state.amplitudes());
    let i2: f64 = i_psi.iter().map(|z| z.norm_sqr()).sum();
    Ok(CouplingDiagnostics {
        interaction_rms: i2.sqrt(),
        gas_energy: gas_full.expectation(state),
        container_energy: container_full.expectation(state),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{lifted_container_hamiltonian, lifted_gas_hamiltonian};
    use crate::spectra::Spectrum;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn fig2() -> CompositeSystem {
        CompositeSystem::new(
            Spectrum::from_pairs(&[(0, 1), (1, 1)]).unwrap(),
            Spectrum::from_pairs(&[(0, 50)]).unwrap(),
        )
    }

    #[test]
    fn zero_strength_gives_zero_matrix() {
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let h = random_hermitian(5, 0.0, &mut rng);
        assert!(h.matrix().iter().all(|z| *z == Complex64::ZERO));
    }

    #[test]
    fn random_hermitian_is_exactly_hermitian() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let h = random_hermitian(40, 0.3, &mut rng);
        for i in 0..40 {
            for j in 0..40 {
                assert_eq!(h.matrix()[[i, j]], h.matrix()[[j, i]].conj());
            }
        }
    }

    #[test]
    fn off_diagonal_standard_deviation_is_halved() {
        // Hermitization averages two i.i.d. Gaussians: the real part of an
        // off-diagonal entry has standard deviation delta_i / sqrt(2).
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let delta_i = 0.01;
        let h = random_hermitian(150, delta_i, &mut rng);
        let mut sum_sq = 0.0;
        let mut n = 0usize;
        for i in 0..150 {
            for j in (i + 1)..150 {
                sum_sq += h.matrix()[[i, j]].re.powi(2);
                n += 1;
            }
        }
        let sd = (sum_sq / n as f64).sqrt();
        let expected = delta_i / 2.0_f64.sqrt();
        assert!(n > 10_000);
        assert!(
            (sd - expected).abs() / expected < 0.1,
            "sd = {sd}, expected {expected}"
        );
    }

    #[test]
    fn fixed_seed_reproduces_bit_identical_matrix() {
        let a = random_hermitian(30, 0.05, &mut ChaCha12Rng::seed_from_u64(77));
        let b = random_hermitian(30, 0.05, &mut ChaCha12Rng::seed_from_u64(77));
        assert_eq!(a.matrix(), b.matrix());
    }

    #[test]
    fn microcanonical_interaction_is_block_diagonal() {
        let c = fig2();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let i_op = microcanonical_interaction(&c, 0.01, &mut rng);
        // Two 50x50 blocks, zeros elsewhere.
        for row in 0..c.dim() {
            for col in 0..c.dim() {
                let same_block = (row < 50) == (col < 50);
                if !same_block {
                    assert_eq!(i_op.matrix()[[row, col]], Complex64::ZERO);
                }
            }
        }
        let nonzero = i_op
            .matrix()
            .iter()
            .filter(|z| **z != Complex64::ZERO)
            .count();
        assert!(nonzero > 2 * 50 * 50 / 2);
    }

    #[test]
    fn microcanonical_interaction_commutes_with_local_hamiltonians() {
        let c = CompositeSystem::new(
            Spectrum::from_pairs(&[(0, 2), (1, 1)]).unwrap(),
            Spectrum::from_pairs(&[(0, 3), (2, 4)]).unwrap(),
        );
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let i_op = microcanonical_interaction(&c, 0.02, &mut rng);
        let hg = lifted_gas_hamiltonian(&c);
        let hc = lifted_container_hamiltonian(&c);
        assert!(i_op.commutator_max_norm(&hg) < 1e-12);
        assert!(i_op.commutator_max_norm(&hc) < 1e-12);

        // Block projectors: the commutator with each P_A x P_B is zero too,
        // checked implicitly through both lifted Hamiltonians; an
        // unconstrained coupling violates it.
        let full = random_hermitian(c.dim(), 0.02, &mut rng);
        assert!(full.commutator_max_norm(&hg) > 1e-6);
    }

    #[test]
    fn shell_restricted_interaction_conserves_total_energy_operator() {
        let c = CompositeSystem::new(
            Spectrum::from_pairs(&[(0, 1), (1, 1)]).unwrap(),
            Spectrum::from_pairs(&[(0, 2), (1, 3), (2, 2)]).unwrap(),
        );
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let i_op = shell_restricted_interaction(&c, 0.05, &mut rng);
        let h0 = {
            let diag = c.diagonal_energies();
            let mut m = Array2::from_elem((c.dim(), c.dim()), Complex64::ZERO);
            for (i, &e) in diag.iter().enumerate() {
                m[[i, i]] = Complex64::new(e, 0.0);
            }
            HermitianOperator::new(m).unwrap()
        };
        assert!(i_op.commutator_max_norm(&h0) < 1e-12);
        // It must couple blocks within a shell (energy exchange).
        let hg = lifted_gas_hamiltonian(&c);
        assert!(i_op.commutator_max_norm(&hg) > 1e-6);
    }

    #[test]
    fn diagnostics_on_shell_basis_state() {
        let c = CompositeSystem::new(
            Spectrum::from_pairs(&[(0, 1), (1, 1)]).unwrap(),
            Spectrum::from_pairs(&[(0, 2), (1, 3), (2, 2)]).unwrap(),
        );
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let i_op = random_hermitian(c.dim(), 0.01, &mut rng);
        let hg = lifted_gas_hamiltonian(&c);
        let hc = lifted_container_hamiltonian(&c);

        // Zero interaction: RMS is zero.
        let psi = PureState::basis_state(c.dim(), 0);
        let d = coupling_diagnostics(&psi, &HermitianOperator::zeros(c.dim()), &hg, &hc).unwrap();
        assert_eq!(d.interaction_rms, 0.0);

        // Any basis state: gas + container energy equals its shell energy.
        for index in [0, 3, 9, c.dim() - 1] {
            let psi = PureState::basis_state(c.dim(), index);
            let d = coupling_diagnostics(&psi, &i_op, &hg, &hc).unwrap();
            let s = c.state_of(index);
            let e = c.pair_energy(s.gas_level, s.container_level) as f64;
            assert_abs_diff_eq!(d.gas_energy + d.container_energy, e, epsilon = 1e-12);
        }
    }

    #[test]
    fn csv_round_trip_is_bit_identical() {
        let mut rng = ChaCha12Rng::seed_from_u64(15);
        let op = random_hermitian(12, 0.02, &mut rng);
        let mut buf = Vec::new();
        op.save_csv(&mut buf).unwrap();
        let reloaded = HermitianOperator::load_csv(buf.as_slice()).unwrap();
        assert_eq!(op.matrix(), reloaded.matrix());
    }

    #[test]
    fn exchange_scenario_coupling_is_weak_on_the_initial_state() {
        // Two-level gas against the (50, 100, 200) container at coupling
        // 0.0075: the RMS interaction energy on the initial product state is
        // far below the subsystem energies.
        let c = CompositeSystem::new(
            Spectrum::from_pairs(&[(0, 1), (1, 1)]).unwrap(),
            Spectrum::from_pairs(&[(0, 50), (1, 100), (2, 200)]).unwrap(),
        );
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let i_op = random_hermitian(c.dim(), 0.0075, &mut rng);
        let g = ndarray::Array1::from_vec(vec![
            Complex64::new(0.1_f64.sqrt(), 0.0),
            Complex64::new(0.9_f64.sqrt(), 0.0),
        ]);
        let k = crate::states::sample_level_vector(
            c.container(),
            &crate::theory::LevelDistribution::delta(3, 1),
            &mut rng,
        )
        .unwrap();
        let psi = crate::states::product_state(&g, &k, &c).unwrap();
        let d = coupling_diagnostics(
            &psi,
            &i_op,
            &lifted_gas_hamiltonian(&c),
            &lifted_container_hamiltonian(&c),
        )
        .unwrap();
        assert_abs_diff_eq!(d.gas_energy, 0.9, epsilon = 1e-12);
        assert_abs_diff_eq!(d.container_energy, 1.0, epsilon = 1e-12);
        // Of order delta_i * sqrt(dim); well below the subsystem energies.
        assert!(
            d.interaction_rms < 0.3 * d.gas_energy.min(d.container_energy),
            "iRMS = {} vs energies ({}, {})",
            d.interaction_rms,
            d.gas_energy,
            d.container_energy
        );
    }

    #[test]
    fn ensemble_moments_are_invariant_under_block_conjugation() {
        // First two moments of the entry distribution, before and after
        // conjugating with a block-respecting unitary (here: a permutation of
        // the degenerate states within one block).
        let c = fig2();
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let n = 200;
        let mut mean = 0.0;
        let mut mean_sq = 0.0;
        let mut mean_p = 0.0;
        let mut mean_sq_p = 0.0;
        for _ in 0..n {
            let i_op = microcanonical_interaction(&c, 0.01, &mut rng);
            mean += i_op.matrix()[[3, 7]].re;
            mean_sq += i_op.matrix()[[3, 7]].norm_sqr();
            // Conjugation by the permutation that swaps states 3 and 4 maps
            // entry (3,7) to (4,7).
            mean_p += i_op.matrix()[[4, 7]].re;
            mean_sq_p += i_op.matrix()[[4, 7]].norm_sqr();
        }
        let scale = 0.01f64.powi(2); // E|I_ij|^2 = delta_i^2 off-diagonal
        assert!((mean / n as f64).abs() < 3.0 * (scale / n as f64).sqrt() * 2.0);
        assert!((mean_p / n as f64).abs() < 3.0 * (scale / n as f64).sqrt() * 2.0);
        let rel = ((mean_sq / n as f64) - (mean_sq_p / n as f64)).abs() / scale;
        assert!(rel < 0.5, "second moments differ: {rel}");
    }
}
