//! The four experiment drivers. Each returns plain data; serialization lives
//! in [`crate::output`]. Independent samples, seeds, and sweep points run on
//! the rayon pool; results are collected in input order so nothing depends on
//! scheduling.

mod evolve;
mod histogram;
mod predict;
mod sweep;

pub use evolve::{run_evolve, EvolveOutput, EvolveRun};
pub use histogram::{run_histogram, HistogramBin, HistogramOutput};
pub use predict::{run_predict, PredictReport};
pub use sweep::{run_sweep, SweepOutput, SweepPoint, SweepSizeSummary};

use qtl_core::{dominant_distribution, total_energy_distribution, LevelDistribution};

use crate::config::{InteractionKind, ValidatedScenario};

/// The level distribution the gas is predicted to relax into: the initial
/// marginal under a microcanonical coupling (occupations are conserved), the
/// dominant distribution when energy exchange is allowed.
pub fn predicted_gas_distribution(
    scenario: &ValidatedScenario,
) -> anyhow::Result<LevelDistribution> {
    let (gas_marginal, container_marginal) = scenario.initial_marginals();
    match scenario.interaction.map(|i| i.kind) {
        Some(InteractionKind::Microcanonical) | None => Ok(gas_marginal),
        Some(InteractionKind::Full) => {
            let w_total =
                total_energy_distribution(&gas_marginal, &container_marginal, &scenario.composite);
            Ok(dominant_distribution(&w_total, &scenario.composite)?)
        }
    }
}
