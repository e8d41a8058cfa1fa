use rayon::prelude::*;

use qtl_core::{
    assemble_hamiltonian, equilibrium_state, max_entropy, propagate, relaxation_time,
    LevelDistribution, RunMeta, Trajectory,
};

use crate::config::ValidatedScenario;
use crate::{substream, Stream};

pub struct EvolveRun {
    pub seed: u64,
    pub trajectory: Trajectory,
    /// First time the ground-level occupation comes within `1/e` of its
    /// predicted plateau.
    pub relaxation_time: Option<f64>,
}

pub struct EvolveOutput {
    /// Predicted equilibrium level distribution of the gas.
    pub predicted: LevelDistribution,
    /// Maximal entropy consistent with it, in `k_B`.
    pub s_max: f64,
    pub runs: Vec<EvolveRun>,
}

/// One trajectory per seed: a fresh interaction realization and a fresh
/// random product initial state each, all compared against the same
/// theoretical equilibrium.
pub fn run_evolve(scenario: &ValidatedScenario) -> anyhow::Result<EvolveOutput> {
    let predicted = super::predicted_gas_distribution(scenario)?;
    let s_max = max_entropy(&predicted, scenario.composite.gas());
    let rho_eq = equilibrium_state(&predicted, scenario.composite.gas());

    let runs: anyhow::Result<Vec<EvolveRun>> = scenario
        .config
        .seeds
        .par_iter()
        .map(|&seed| {
            let interaction = scenario.draw_interaction(
                &scenario.composite,
                &mut substream(seed, Stream::Interaction, 0),
            );
            let hamiltonian = assemble_hamiltonian(&scenario.composite, &interaction)?;
            let psi0 =
                scenario.realize_initial_state(&mut substream(seed, Stream::InitialState, 0));
            let mut trajectory = propagate(
                &scenario.composite,
                &hamiltonian,
                &psi0,
                &scenario.times,
                Some(&rho_eq),
            )?;
            trajectory.meta = RunMeta {
                scenario: scenario.config.id.clone(),
                seed,
                delta_i: scenario.delta_i(),
            };
            let ground = trajectory.occupation_series(0);
            let relaxation_time = relaxation_time(&ground, &scenario.times, predicted.weight(0));
            Ok(EvolveRun {
                seed,
                trajectory,
                relaxation_time,
            })
        })
        .collect();

    Ok(EvolveOutput {
        predicted,
        s_max,
        runs: runs?,
    })
}
