//! Scenario configuration: JSON schema, semantic validation with field-path
//! diagnostics, and resolution of CLI overrides.

use ndarray::Array1;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use qtl_core::{
    microcanonical_interaction, product_state, random_hermitian, sample_level_vector,
    CompositeSystem, HermitianOperator, LevelDistribution, PureState, Spectrum,
};

/// Tolerance for user-supplied normalization; inputs within it are rescaled
/// to exact unit norm.
const INPUT_NORM_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config error at {path}: {message}")]
    Invalid { path: String, message: String },
    #[error("config parse error at {path}: {message}")]
    Parse { path: String, message: String },
}

fn invalid(path: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        path: path.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Predict,
    Histogram,
    Evolve,
    FluctuationSweep,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Predict => "predict",
            ExperimentKind::Histogram => "histogram",
            ExperimentKind::Evolve => "evolve",
            ExperimentKind::FluctuationSweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    /// `[energy, degeneracy]` pairs on the integer grid, ascending.
    pub levels: Vec<(u32, usize)>,
    /// Physical size of the energy quantum; reporting only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantum: Option<f64>,
}

impl SpectrumConfig {
    fn build(&self, path: &str) -> Result<Spectrum, ConfigError> {
        let spectrum = Spectrum::from_pairs(&self.levels)
            .map_err(|e| invalid(&format!("{path}.levels"), e.to_string()))?;
        match self.quantum {
            Some(q) if q <= 0.0 || !q.is_finite() => Err(invalid(
                &format!("{path}.quantum"),
                "must be positive and finite",
            )),
            Some(q) => Ok(spectrum.with_quantum(q)),
            None => Ok(spectrum),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InteractionKind {
    /// Unconstrained random Hermitian coupling; energy exchange allowed,
    /// total energy conserved only through weakness.
    Full,
    /// Block-diagonal coupling; no energy exchange, every `W_AB` conserved.
    Microcanonical,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionConfig {
    pub kind: InteractionKind,
    pub delta_i: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialStateConfig {
    /// Gas level weights; a Haar-random vector within each level carries the
    /// weight. Mutually exclusive with `gas_amplitudes`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gas_weights: Option<Vec<f64>>,
    /// Explicit gas amplitudes as `[re, im]` pairs over the gas basis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gas_amplitudes: Option<Vec<(f64, f64)>>,
    /// Container level index; a Haar-random vector within that level.
    /// Mutually exclusive with `container_amplitudes`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub container_level: Option<usize>,
    /// Explicit container amplitudes over the container basis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub container_amplitudes: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGridConfig {
    /// End of the uniform grid `[0, t_end]` in units of `ħ/ΔE`.
    pub t_end: f64,
    /// Number of samples, endpoints included.
    pub samples: usize,
}

impl Default for TimeGridConfig {
    fn default() -> Self {
        TimeGridConfig {
            t_end: 200.0,
            samples: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistogramConfig {
    pub samples: usize,
    pub bins: usize,
}

impl Default for HistogramConfig {
    fn default() -> Self {
        HistogramConfig {
            samples: 100_000,
            bins: 50,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Container sizes `N^c_1`; each run uses degeneracies
    /// `(N/2, N, 2N)` at grid energies `(0, 1, 2)`. All sizes must be even.
    pub sizes: Vec<usize>,
    /// Fluctuations are measured over `[frac * t_end, t_end]`, discarding the
    /// relaxation transient.
    #[serde(default = "default_window_start_frac")]
    pub window_start_frac: f64,
}

fn default_window_start_frac() -> f64 {
    0.25
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub id: String,
    pub experiment: ExperimentKind,
    pub gas: SpectrumConfig,
    pub container: SpectrumConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interaction: Option<InteractionConfig>,
    pub initial_state: InitialStateConfig,
    #[serde(default)]
    pub time_grid: TimeGridConfig,
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub histogram: Option<HistogramConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Parse {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })
    }

    /// Single-line canonical JSON, embedded in output headers.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Semantic validation for the configured experiment kind.
    pub fn validate(&self) -> Result<ValidatedScenario, ConfigError> {
        let gas = self.gas.build("gas")?;
        let container = self.container.build("container")?;
        let composite = CompositeSystem::new(gas, container);

        if self.seeds.is_empty() {
            return Err(invalid("seeds", "at least one seed is required"));
        }
        if self.time_grid.t_end <= 0.0 || !self.time_grid.t_end.is_finite() {
            return Err(invalid("time_grid.t_end", "must be positive and finite"));
        }
        if self.time_grid.samples < 2 {
            return Err(invalid("time_grid.samples", "need at least 2 samples"));
        }

        let interaction = match self.interaction {
            Some(i) if i.delta_i < 0.0 || !i.delta_i.is_finite() => {
                return Err(invalid(
                    "interaction.delta_i",
                    "must be non-negative and finite",
                ));
            }
            Some(i) => Some(i),
            None => None,
        };
        if matches!(
            self.experiment,
            ExperimentKind::Evolve | ExperimentKind::FluctuationSweep
        ) && interaction.is_none()
        {
            return Err(invalid(
                "interaction",
                format!("required for experiment kind '{:?}'", self.experiment),
            ));
        }

        let initial = self.validate_initial_state(&composite)?;

        let histogram = self.histogram.unwrap_or_default();
        if self.experiment == ExperimentKind::Histogram {
            if histogram.samples < 1 {
                return Err(invalid("histogram.samples", "need at least 1 sample"));
            }
            if histogram.bins < 1 {
                return Err(invalid("histogram.bins", "need at least 1 bin"));
            }
        }

        let sweep = match (self.experiment, &self.sweep) {
            (ExperimentKind::FluctuationSweep, Some(sweep)) => {
                if sweep.sizes.len() < 3 {
                    return Err(invalid(
                        "sweep.sizes",
                        "the scaling fit needs at least 3 container sizes",
                    ));
                }
                for &n in &sweep.sizes {
                    if n < 2 || n % 2 != 0 {
                        return Err(invalid(
                            "sweep.sizes",
                            format!("container size {n} must be even and at least 2"),
                        ));
                    }
                }
                if !(0.0..1.0).contains(&sweep.window_start_frac) {
                    return Err(invalid("sweep.window_start_frac", "must lie in [0, 1)"));
                }
                if interaction.map(|i| i.kind) != Some(InteractionKind::Full) {
                    return Err(invalid(
                        "interaction.kind",
                        "the fluctuation sweep requires a full (energy-exchanging) coupling",
                    ));
                }
                // Sweep containers always have the three levels (N/2, N, 2N),
                // so the initial container state must be a level index below 3.
                match self.initial_state.container_level {
                    Some(level) if level < 3 => {}
                    Some(level) => {
                        return Err(invalid(
                            "initial_state.container_level",
                            format!("sweep containers have 3 levels, got level {level}"),
                        ));
                    }
                    None => {
                        return Err(invalid(
                            "initial_state.container_level",
                            "the sweep requires a container level (explicit amplitudes cannot \
                             transfer across container sizes)",
                        ));
                    }
                }
                Some(sweep.clone())
            }
            (ExperimentKind::FluctuationSweep, None) => {
                return Err(invalid(
                    "sweep",
                    "required for experiment kind 'fluctuation-sweep'",
                ));
            }
            (_, s) => s.clone(),
        };

        let n = self.time_grid.samples;
        let times: Vec<f64> = (0..n)
            .map(|k| self.time_grid.t_end * k as f64 / (n - 1) as f64)
            .collect();

        Ok(ValidatedScenario {
            config: self.clone(),
            composite,
            interaction,
            initial,
            times,
            histogram,
            sweep,
        })
    }

    fn validate_initial_state(
        &self,
        composite: &CompositeSystem,
    ) -> Result<InitialState, ConfigError> {
        let init = &self.initial_state;
        let gas = match (&init.gas_weights, &init.gas_amplitudes) {
            (Some(weights), None) => LocalState::Weights(validate_weights(
                weights,
                composite.gas().level_count(),
                "initial_state.gas_weights",
            )?),
            (None, Some(amps)) => LocalState::Amplitudes(validate_amplitudes(
                amps,
                composite.gas().dim(),
                "initial_state.gas_amplitudes",
            )?),
            _ => {
                return Err(invalid(
                    "initial_state",
                    "exactly one of gas_weights or gas_amplitudes is required",
                ));
            }
        };
        let container = match (init.container_level, &init.container_amplitudes) {
            (Some(level), None) => {
                if level >= composite.container().level_count() {
                    return Err(invalid(
                        "initial_state.container_level",
                        format!(
                            "level {level} out of range (container has {} levels)",
                            composite.container().level_count()
                        ),
                    ));
                }
                LocalState::Weights(LevelDistribution::delta(
                    composite.container().level_count(),
                    level,
                ))
            }
            (None, Some(amps)) => LocalState::Amplitudes(validate_amplitudes(
                amps,
                composite.container().dim(),
                "initial_state.container_amplitudes",
            )?),
            _ => {
                return Err(invalid(
                    "initial_state",
                    "exactly one of container_level or container_amplitudes is required",
                ));
            }
        };
        Ok(InitialState { gas, container })
    }
}

fn validate_weights(
    weights: &[f64],
    expected_len: usize,
    path: &str,
) -> Result<LevelDistribution, ConfigError> {
    if weights.len() != expected_len {
        return Err(invalid(
            path,
            format!("expected {expected_len} entries, got {}", weights.len()),
        ));
    }
    if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
        return Err(invalid(path, "weights must be non-negative and finite"));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > INPUT_NORM_TOL {
        return Err(invalid(path, format!("weights must sum to 1, got {sum}")));
    }
    LevelDistribution::normalized(weights.to_vec()).map_err(|e| invalid(path, e.to_string()))
}

fn validate_amplitudes(
    amps: &[(f64, f64)],
    expected_len: usize,
    path: &str,
) -> Result<Array1<Complex64>, ConfigError> {
    if amps.len() != expected_len {
        return Err(invalid(
            path,
            format!("expected {expected_len} entries, got {}", amps.len()),
        ));
    }
    let mut v = Array1::from_iter(amps.iter().map(|&(re, im)| Complex64::new(re, im)));
    let norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > INPUT_NORM_TOL {
        return Err(invalid(
            path,
            format!("amplitudes must be normalized, |psi|^2 = {norm_sq}"),
        ));
    }
    let scale = 1.0 / norm_sq.sqrt();
    v.mapv_inplace(|z| z * scale);
    Ok(v)
}

/// One subsystem's initial specification after validation.
#[derive(Debug, Clone)]
pub enum LocalState {
    /// Level weights; realized as a Haar-random vector per level.
    Weights(LevelDistribution),
    /// Explicit amplitudes, exactly normalized.
    Amplitudes(Array1<Complex64>),
}

#[derive(Debug, Clone)]
pub struct InitialState {
    pub gas: LocalState,
    pub container: LocalState,
}

/// A scenario after semantic validation: ready-to-use composite system,
/// initial-state recipe, and time grid.
#[derive(Debug)]
pub struct ValidatedScenario {
    pub config: ScenarioConfig,
    pub composite: CompositeSystem,
    pub interaction: Option<InteractionConfig>,
    pub initial: InitialState,
    pub times: Vec<f64>,
    pub histogram: HistogramConfig,
    pub sweep: Option<SweepConfig>,
}

impl ValidatedScenario {
    /// Marginal level distributions of the initial state.
    pub fn initial_marginals(&self) -> (LevelDistribution, LevelDistribution) {
        let gas = local_marginal(&self.initial.gas, self.composite.gas());
        let container = local_marginal(&self.initial.container, self.composite.container());
        (gas, container)
    }

    /// Realizes the initial product state; random parts (per-level Haar
    /// vectors) are drawn from `rng`.
    pub fn realize_initial_state<R: Rng + ?Sized>(&self, rng: &mut R) -> PureState {
        self.realize_on(&self.composite, rng)
    }

    /// Same recipe on a different composite (used by the sweep, which swaps
    /// container spectra of varying size).
    pub fn realize_on<R: Rng + ?Sized>(
        &self,
        composite: &CompositeSystem,
        rng: &mut R,
    ) -> PureState {
        let gas = realize_local(&self.initial.gas, composite.gas(), rng);
        let container = realize_local(&self.initial.container, composite.container(), rng);
        product_state(&gas, &container, composite)
            .expect("validated local states form a product state")
    }

    /// Initial state on a sweep composite: the configured gas recipe times a
    /// Haar-random vector in the given container level.
    pub fn realize_sweep_state<R: Rng + ?Sized>(
        &self,
        composite: &CompositeSystem,
        container_level: usize,
        rng: &mut R,
    ) -> PureState {
        let gas = realize_local(&self.initial.gas, composite.gas(), rng);
        let delta = LevelDistribution::delta(composite.container().level_count(), container_level);
        let container = realize_local(&LocalState::Weights(delta), composite.container(), rng);
        product_state(&gas, &container, composite)
            .expect("validated local states form a product state")
    }

    /// Draws the configured interaction operator.
    pub fn draw_interaction<R: Rng + ?Sized>(
        &self,
        composite: &CompositeSystem,
        rng: &mut R,
    ) -> HermitianOperator {
        let spec = self
            .interaction
            .expect("interaction presence was validated");
        match spec.kind {
            InteractionKind::Full => random_hermitian(composite.dim(), spec.delta_i, rng),
            InteractionKind::Microcanonical => {
                microcanonical_interaction(composite, spec.delta_i, rng)
            }
        }
    }

    pub fn delta_i(&self) -> f64 {
        self.interaction.map(|i| i.delta_i).unwrap_or(0.0)
    }
}

fn local_marginal(state: &LocalState, spectrum: &Spectrum) -> LevelDistribution {
    match state {
        LocalState::Weights(w) => w.clone(),
        LocalState::Amplitudes(v) => {
            let weights: Vec<f64> = (0..spectrum.level_count())
                .map(|level| {
                    let start = spectrum.offset(level);
                    (start..start + spectrum.degeneracy(level))
                        .map(|i| v[i].norm_sqr())
                        .sum()
                })
                .collect();
            LevelDistribution::normalized(weights).expect("amplitudes are normalized")
        }
    }
}

fn realize_local<R: Rng + ?Sized>(
    state: &LocalState,
    spectrum: &Spectrum,
    rng: &mut R,
) -> Array1<Complex64> {
    match state {
        LocalState::Weights(w) => {
            sample_level_vector(spectrum, w, rng).expect("validated weights match the spectrum")
        }
        LocalState::Amplitudes(v) => v.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_json() -> String {
        r#"{
            "id": "test",
            "experiment": "evolve",
            "gas": { "levels": [[0, 1], [1, 1]] },
            "container": { "levels": [[0, 50]] },
            "interaction": { "kind": "microcanonical", "delta_i": 0.01 },
            "initial_state": { "gas_weights": [0.15, 0.85], "container_level": 0 },
            "seeds": [1]
        }"#
        .to_string()
    }

    #[test]
    fn parses_and_validates_minimal_config() {
        let config = ScenarioConfig::from_json(&minimal_json()).unwrap();
        let v = config.validate().unwrap();
        assert_eq!(v.composite.dim(), 100);
        assert_eq!(v.times.len(), 1000);
        assert_eq!(v.times[0], 0.0);
        assert_eq!(*v.times.last().unwrap(), 200.0);
        let (wa, wb) = v.initial_marginals();
        assert!((wa.weight(0) - 0.15).abs() < 1e-12);
        assert_eq!(wb.weight(0), 1.0);
    }

    #[test]
    fn parse_error_reports_field_path() {
        let bad = minimal_json().replace("\"microcanonical\"", "\"banana\"");
        let err = ScenarioConfig::from_json(&bad).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("interaction.kind"), "message was: {msg}");
    }

    #[test]
    fn empty_container_is_rejected_with_path() {
        let bad = minimal_json().replace("[[0, 50]]", "[]");
        let config = ScenarioConfig::from_json(&bad).unwrap();
        let err = config.validate().unwrap_err();
        assert!(err.to_string().contains("container.levels"), "{err}");
    }

    #[test]
    fn unnormalized_weights_are_rejected() {
        let bad = minimal_json().replace("[0.15, 0.85]", "[0.5, 0.6]");
        let config = ScenarioConfig::from_json(&bad).unwrap();
        let err = config.validate().unwrap_err();
        assert!(
            err.to_string().contains("initial_state.gas_weights"),
            "{err}"
        );
    }

    #[test]
    fn missing_interaction_rejected_for_evolve_only() {
        let mut config = ScenarioConfig::from_json(&minimal_json()).unwrap();
        config.interaction = None;
        assert!(config.validate().is_err());
        config.experiment = ExperimentKind::Predict;
        assert!(config.validate().is_ok());
    }

    #[test]
    fn sweep_requires_even_sizes_and_full_coupling() {
        let mut config = ScenarioConfig::from_json(&minimal_json()).unwrap();
        config.experiment = ExperimentKind::FluctuationSweep;
        config.sweep = Some(SweepConfig {
            sizes: vec![8, 16, 32],
            window_start_frac: 0.25,
        });
        let err = config.validate().unwrap_err();
        assert!(err.to_string().contains("interaction.kind"), "{err}");

        config.interaction = Some(InteractionConfig {
            kind: InteractionKind::Full,
            delta_i: 0.01,
        });
        config.sweep = Some(SweepConfig {
            sizes: vec![8, 15, 32],
            window_start_frac: 0.25,
        });
        let err = config.validate().unwrap_err();
        assert!(err.to_string().contains("must be even"), "{err}");

        config.sweep = Some(SweepConfig {
            sizes: vec![8, 16],
            window_start_frac: 0.25,
        });
        let err = config.validate().unwrap_err();
        assert!(err.to_string().contains("at least 3"), "{err}");
    }

    #[test]
    fn config_round_trips_through_canonical_json() {
        let config = ScenarioConfig::from_json(&minimal_json()).unwrap();
        let json = config.to_canonical_json();
        let reparsed = ScenarioConfig::from_json(&json).unwrap();
        assert_eq!(json, reparsed.to_canonical_json());
    }
}
