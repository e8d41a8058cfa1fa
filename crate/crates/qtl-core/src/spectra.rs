//! Subsystem spectra on an exact integer energy grid and the product basis of
//! the composite gas ⊗ container system.
//!
//! Energies are dimensionless grid indices (multiples of the energy quantum
//! ΔE), so the shell condition `E_gas + E_container = E` is exact integer
//! arithmetic — no floating-point tolerance is ever involved in deciding
//! which product levels share a total energy.
//!
//! Basis ordering convention: the container index varies fastest within a gas
//! block. A flat index decomposes as `i = p * dim_container + q` where `p`
//! (`q`) enumerates gas (container) eigenstates grouped by level. This makes
//! the partial trace over the container a contiguous-stripe reduction.

use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SpectrumError {
    #[error("spectrum must contain at least one level")]
    Empty,
    #[error("level energies must be strictly ascending (violated at position {0})")]
    NotAscending(usize),
    #[error("level degeneracy must be at least 1 (violated at position {0})")]
    ZeroDegeneracy(usize),
    #[error("no energy shell at E = {0}")]
    EmptyShell(u32),
}

/// One energy level of a subsystem: grid energy and degeneracy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnergyLevel {
    /// Energy as an integer multiple of the quantum ΔE.
    pub energy: u32,
    /// Number of eigenstates sharing this energy.
    pub degeneracy: usize,
}

/// A subsystem spectrum: strictly ascending levels on the integer grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    levels: Vec<EnergyLevel>,
    offsets: Vec<usize>,
    dim: usize,
    quantum: f64,
}

impl Spectrum {
    pub fn new(levels: Vec<EnergyLevel>) -> Result<Self, SpectrumError> {
        if levels.is_empty() {
            return Err(SpectrumError::Empty);
        }
        for (k, level) in levels.iter().enumerate() {
            if level.degeneracy == 0 {
                return Err(SpectrumError::ZeroDegeneracy(k));
            }
            if k > 0 && level.energy <= levels[k - 1].energy {
                return Err(SpectrumError::NotAscending(k));
            }
        }
        let mut offsets = Vec::with_capacity(levels.len());
        let mut dim = 0;
        for level in &levels {
            offsets.push(dim);
            dim += level.degeneracy;
        }
        Ok(Spectrum {
            levels,
            offsets,
            dim,
            quantum: 1.0,
        })
    }

    /// Convenience constructor from `(energy, degeneracy)` pairs.
    pub fn from_pairs(pairs: &[(u32, usize)]) -> Result<Self, SpectrumError> {
        Self::new(
            pairs
                .iter()
                .map(|&(energy, degeneracy)| EnergyLevel { energy, degeneracy })
                .collect(),
        )
    }

    /// Sets the physical size of the energy quantum ΔE. Reporting only: all
    /// internal arithmetic stays on the integer grid.
    pub fn with_quantum(mut self, quantum: f64) -> Self {
        assert!(quantum > 0.0, "energy quantum must be positive");
        self.quantum = quantum;
        self
    }

    pub fn quantum(&self) -> f64 {
        self.quantum
    }

    pub fn levels(&self) -> &[EnergyLevel] {
        &self.levels
    }

    /// Number of distinct energy levels.
    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    /// Hilbert-space dimension: the sum of all degeneracies.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn energy(&self, level: usize) -> u32 {
        self.levels[level].energy
    }

    pub fn degeneracy(&self, level: usize) -> usize {
        self.levels[level].degeneracy
    }

    /// Index of the first eigenstate of `level` in the subsystem basis.
    pub fn offset(&self, level: usize) -> usize {
        self.offsets[level]
    }

    /// Looks up a level by its grid energy.
    pub fn level_at_energy(&self, energy: u32) -> Option<usize> {
        self.levels.iter().position(|l| l.energy == energy)
    }

    /// Maps a subsystem basis index to `(level, index within level)`.
    pub fn level_of_state(&self, state: usize) -> (usize, usize) {
        debug_assert!(state < self.dim);
        let level = match self.offsets.binary_search(&state) {
            Ok(k) => k,
            Err(k) => k - 1,
        };
        (level, state - self.offsets[level])
    }
}

/// Label of one product-basis state: gas level `A`, index `a` within that
/// level, container level `B`, index `b` within that level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductBasisState {
    pub gas_level: usize,
    pub gas_sub: usize,
    pub container_level: usize,
    pub container_sub: usize,
}

/// The composite gas ⊗ container system: product-basis index map plus the
/// decomposition of all `(A, B)` level pairs into shells of fixed total
/// energy.
#[derive(Debug, Clone)]
pub struct CompositeSystem {
    gas: Spectrum,
    container: Spectrum,
    shells: BTreeMap<u32, Vec<(usize, usize)>>,
}

impl CompositeSystem {
    /// Builds the composite system. Any pair of valid spectra composes.
    pub fn new(gas: Spectrum, container: Spectrum) -> Self {
        let mut shells: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
        for (a_idx, a) in gas.levels().iter().enumerate() {
            for (b_idx, b) in container.levels().iter().enumerate() {
                shells
                    .entry(a.energy + b.energy)
                    .or_default()
                    .push((a_idx, b_idx));
            }
        }
        CompositeSystem {
            gas,
            container,
            shells,
        }
    }

    pub fn gas(&self) -> &Spectrum {
        &self.gas
    }

    pub fn container(&self) -> &Spectrum {
        &self.container
    }

    /// Flat dimension of the product basis.
    pub fn dim(&self) -> usize {
        self.gas.dim() * self.container.dim()
    }

    /// Flat index of a product-basis state.
    pub fn index_of(&self, state: ProductBasisState) -> usize {
        debug_assert!(state.gas_sub < self.gas.degeneracy(state.gas_level));
        debug_assert!(state.container_sub < self.container.degeneracy(state.container_level));
        let p = self.gas.offset(state.gas_level) + state.gas_sub;
        let q = self.container.offset(state.container_level) + state.container_sub;
        p * self.container.dim() + q
    }

    /// Inverse of [`index_of`](Self::index_of).
    pub fn state_of(&self, index: usize) -> ProductBasisState {
        debug_assert!(index < self.dim());
        let p = index / self.container.dim();
        let q = index % self.container.dim();
        let (gas_level, gas_sub) = self.gas.level_of_state(p);
        let (container_level, container_sub) = self.container.level_of_state(q);
        ProductBasisState {
            gas_level,
            gas_sub,
            container_level,
            container_sub,
        }
    }

    /// Total grid energy of the `(A, B)` level pair.
    pub fn pair_energy(&self, gas_level: usize, container_level: usize) -> u32 {
        self.gas.energy(gas_level) + self.container.energy(container_level)
    }

    /// Dimension `N_A * N_B` of the `(A, B)` block.
    pub fn block_dim(&self, gas_level: usize, container_level: usize) -> usize {
        self.gas.degeneracy(gas_level) * self.container.degeneracy(container_level)
    }

    /// Flat indices of all states in the `(A, B)` block, in `(a, b)`
    /// lexicographic order.
    pub fn block_indices(
        &self,
        gas_level: usize,
        container_level: usize,
    ) -> impl Iterator<Item = usize> + '_ {
        let p0 = self.gas.offset(gas_level);
        let q0 = self.container.offset(container_level);
        let nb = self.container.degeneracy(container_level);
        let dim_c = self.container.dim();
        (0..self.gas.degeneracy(gas_level))
            .flat_map(move |a| (0..nb).map(move |b| (p0 + a) * dim_c + q0 + b))
    }

    /// Shell energies in ascending order.
    pub fn shell_energies(&self) -> impl Iterator<Item = u32> + '_ {
        self.shells.keys().copied()
    }

    /// The `(A, B)` level pairs with total energy `E`, or `None` if no pair
    /// sums to `E`.
    pub fn shell_pairs(&self, energy: u32) -> Option<&[(usize, usize)]> {
        self.shells.get(&energy).map(Vec::as_slice)
    }

    /// Shell degeneracy `N^(E) = Σ_{(A,B) in shell} N_A * N_B`.
    pub fn shell_degeneracy(&self, energy: u32) -> Result<usize, SpectrumError> {
        let pairs = self
            .shells
            .get(&energy)
            .ok_or(SpectrumError::EmptyShell(energy))?;
        Ok(pairs.iter().map(|&(a, b)| self.block_dim(a, b)).sum())
    }

    /// Total grid energy `E_A + E_B` of each flat basis state.
    pub fn diagonal_energies(&self) -> Vec<f64> {
        let dim_c = self.container.dim();
        let mut gas_e = Vec::with_capacity(self.gas.dim());
        for level in self.gas.levels() {
            gas_e.extend(std::iter::repeat_n(level.energy as f64, level.degeneracy));
        }
        let mut cont_e = Vec::with_capacity(dim_c);
        for level in self.container.levels() {
            cont_e.extend(std::iter::repeat_n(level.energy as f64, level.degeneracy));
        }
        let mut out = Vec::with_capacity(self.dim());
        for &eg in &gas_e {
            for &ec in &cont_e {
                out.push(eg + ec);
            }
        }
        out
    }

    /// The same composite with the roles of gas and container exchanged.
    pub fn swapped(&self) -> CompositeSystem {
        CompositeSystem::new(self.container.clone(), self.gas.clone())
    }
}
