use rayon::prelude::*;

use qtl_core::{
    max_entropy, partial_trace_gas, sample_accessible_region, von_neumann_entropy,
    JointDistribution,
};

use crate::config::ValidatedScenario;
use crate::{substream, Stream};

pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub frequency: f64,
}

pub struct HistogramOutput {
    /// Maximal entropy consistent with the initial gas marginal; upper edge
    /// of the binning range.
    pub s_max: f64,
    pub samples: usize,
    pub bins: Vec<HistogramBin>,
    /// Raw per-sample entropies, in sample order.
    pub entropies: Vec<f64>,
}

impl HistogramOutput {
    /// Fraction of sampled states with entropy strictly above `threshold`.
    pub fn fraction_above(&self, threshold: f64) -> f64 {
        self.entropies.iter().filter(|&&s| s > threshold).count() as f64
            / self.entropies.len() as f64
    }

    /// Fraction of sampled states with entropy strictly below `threshold`.
    pub fn fraction_below(&self, threshold: f64) -> f64 {
        self.entropies.iter().filter(|&&s| s < threshold).count() as f64
            / self.entropies.len() as f64
    }
}

/// Samples the accessible region uniformly and bins the local gas entropy
/// into uniform bins over `[0, s_max]`. Sample `i` draws from the stream
/// `(seed, i)`, so the histogram is independent of worker scheduling.
pub fn run_histogram(scenario: &ValidatedScenario) -> anyhow::Result<HistogramOutput> {
    let (gas_marginal, container_marginal) = scenario.initial_marginals();
    let target = JointDistribution::from_product(&gas_marginal, &container_marginal);
    let s_max = max_entropy(&gas_marginal, scenario.composite.gas());
    let samples = scenario.histogram.samples;
    let n_bins = scenario.histogram.bins;
    let seed = scenario.config.seeds[0];

    let entropies: anyhow::Result<Vec<f64>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, Stream::Sample, i as u64);
            let psi = sample_accessible_region(&scenario.composite, &target, &mut rng)?;
            let rho = partial_trace_gas(&psi, &scenario.composite)?;
            Ok(von_neumann_entropy(&rho))
        })
        .collect();
    let entropies = entropies?;

    let mut counts = vec![0usize; n_bins];
    for &s in &entropies {
        let bin = if s_max > 0.0 {
            (((s / s_max) * n_bins as f64) as usize).min(n_bins - 1)
        } else {
            0
        };
        counts[bin] += 1;
    }
    let width = if s_max > 0.0 {
        s_max / n_bins as f64
    } else {
        0.0
    };
    let bins = counts
        .into_iter()
        .enumerate()
        .map(|(k, c)| HistogramBin {
            lo: k as f64 * width,
            hi: (k + 1) as f64 * width,
            frequency: c as f64 / samples as f64,
        })
        .collect();

    Ok(HistogramOutput {
        s_max,
        samples,
        bins,
        entropies,
    })
}
