use rayon::prelude::*;

use qtl_core::{
    assemble_hamiltonian, fit_inverse_size_scaling, propagate, random_hermitian, time_fluctuation,
    CompositeSystem, ScalingFit, Spectrum,
};

use crate::config::ValidatedScenario;
use crate::{substream, Stream};

pub struct SweepPoint {
    pub size: usize,
    pub seed: u64,
    /// Fluctuation measure `Δ_t W^g_0` (square root of the windowed
    /// variance).
    pub delta: f64,
}

pub struct SweepSizeSummary {
    pub size: usize,
    pub mean_delta: f64,
    pub std_error: f64,
}

pub struct SweepOutput {
    pub points: Vec<SweepPoint>,
    pub sizes: Vec<SweepSizeSummary>,
    /// Free-exponent fit (plus the constrained `p = 1/2` coefficient) of the
    /// per-size mean fluctuations.
    pub fit: ScalingFit,
    /// Measurement window `[start, end]`.
    pub window: (f64, f64),
}

/// Builds the container degeneracies `(N/2, N, 2N)` at energies `(0, 1, 2)`
/// for a size `N`.
fn sweep_container(size: usize) -> Spectrum {
    Spectrum::from_pairs(&[(0, size / 2), (1, size), (2, 2 * size)])
        .expect("even size >= 2 yields a valid container")
}

/// For each container size and seed, evolves the configured initial state
/// under a fresh full random coupling and measures the occupation
/// fluctuation of the gas ground level over the plateau window; then fits
/// `Δ_t` against the size.
pub fn run_sweep(scenario: &ValidatedScenario) -> anyhow::Result<SweepOutput> {
    let sweep = scenario
        .sweep
        .as_ref()
        .expect("sweep presence was validated");
    let t_end = *scenario.times.last().expect("validated time grid");
    let window = (sweep.window_start_frac * t_end, t_end);
    let delta_i = scenario.delta_i();
    let container_level = scenario
        .config
        .initial_state
        .container_level
        .expect("sweep validation requires a container level");

    let jobs: Vec<(usize, usize, u64)> = sweep
        .sizes
        .iter()
        .enumerate()
        .flat_map(|(k, &size)| {
            scenario
                .config
                .seeds
                .iter()
                .map(move |&seed| (k, size, seed))
        })
        .collect();

    let points: anyhow::Result<Vec<SweepPoint>> = jobs
        .par_iter()
        .map(|&(size_index, size, seed)| {
            let composite =
                CompositeSystem::new(scenario.composite.gas().clone(), sweep_container(size));
            let interaction = random_hermitian(
                composite.dim(),
                delta_i,
                &mut substream(seed, Stream::Interaction, size_index as u64),
            );
            let hamiltonian = assemble_hamiltonian(&composite, &interaction)?;
            let psi0 = scenario.realize_sweep_state(
                &composite,
                container_level,
                &mut substream(seed, Stream::InitialState, size_index as u64),
            );
            let trajectory = propagate(&composite, &hamiltonian, &psi0, &scenario.times, None)?;
            let ground = trajectory.occupation_series(0);
            let variance = time_fluctuation(&ground, &scenario.times, window.0, window.1)?;
            Ok(SweepPoint {
                size,
                seed,
                delta: variance.sqrt(),
            })
        })
        .collect();
    let points = points?;

    let mut sizes = Vec::with_capacity(sweep.sizes.len());
    for &size in &sweep.sizes {
        let deltas: Vec<f64> = points
            .iter()
            .filter(|p| p.size == size)
            .map(|p| p.delta)
            .collect();
        let n = deltas.len() as f64;
        let mean = deltas.iter().sum::<f64>() / n;
        let std_error = if deltas.len() > 1 {
            let var = deltas.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        sizes.push(SweepSizeSummary {
            size,
            mean_delta: mean,
            std_error,
        });
    }

    let xs: Vec<f64> = sizes.iter().map(|s| s.size as f64).collect();
    let ys: Vec<f64> = sizes.iter().map(|s| s.mean_delta).collect();
    let fit = fit_inverse_size_scaling(&xs, &ys)?;

    Ok(SweepOutput {
        points,
        sizes,
        fit,
        window,
    })
}
