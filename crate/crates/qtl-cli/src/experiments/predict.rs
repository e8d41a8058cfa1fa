use qtl_core::{
    dominant_joint, fit_exponential_degeneracy, hs_average_purity_approx, hs_average_purity_exact,
    max_entropy, min_purity, spectral_temperature, total_energy_distribution,
};

use crate::config::ValidatedScenario;

/// Flat key/value report of every closed-form prediction for a scenario.
pub struct PredictReport {
    pub rows: Vec<(String, String)>,
}

impl PredictReport {
    pub fn value(&self, key: &str) -> Option<&str> {
        self.rows
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

/// Evaluates the closed-form predictions: extremal purity/entropy under the
/// initial constraints, Hilbert-space purity averages, the dominant
/// distribution and its extremal observables, the container degeneracy fit,
/// and spectral temperatures.
pub fn run_predict(scenario: &ValidatedScenario) -> anyhow::Result<PredictReport> {
    let composite = &scenario.composite;
    let gas = composite.gas();
    let container = composite.container();
    let (w_gas, w_container) = scenario.initial_marginals();

    let mut rows: Vec<(String, String)> = Vec::new();
    let mut push = |key: &str, value: String| rows.push((key.to_string(), value));

    push("flat_dimension", composite.dim().to_string());
    push(
        "shell_count",
        composite.shell_energies().count().to_string(),
    );

    // Microcanonical predictions from the initial marginals.
    push("min_purity_initial", fmt(min_purity(&w_gas, gas)));
    push(
        "hs_purity_exact_initial",
        fmt(hs_average_purity_exact(
            &w_gas,
            &w_container,
            gas,
            container,
        )),
    );
    push(
        "hs_purity_approx_initial",
        fmt(hs_average_purity_approx(
            &w_gas,
            &w_container,
            gas,
            container,
        )),
    );
    push("max_entropy_initial", fmt(max_entropy(&w_gas, gas)));
    if let Ok(beta) = spectral_temperature(gas, &w_gas) {
        push("spectral_beta_initial", fmt(beta));
    }

    // Exchange predictions from the dominant distribution.
    let w_total = total_energy_distribution(&w_gas, &w_container, composite);
    let joint = dominant_joint(&w_total, composite);
    let dominant = joint.gas_marginal();
    let dominant_container = joint.container_marginal();
    for (a, w) in dominant.iter().enumerate() {
        push(&format!("dominant_w_{a}"), fmt(w));
    }
    push("min_purity_dominant", fmt(min_purity(&dominant, gas)));
    push(
        "hs_purity_approx_dominant",
        fmt(hs_average_purity_approx(
            &dominant,
            &dominant_container,
            gas,
            container,
        )),
    );
    push("max_entropy_dominant", fmt(max_entropy(&dominant, gas)));
    if let Ok(beta) = spectral_temperature(gas, &dominant) {
        push("spectral_beta_dominant", fmt(beta));
    }

    // Container degeneracy structure; an exact exponential family means the
    // canonical regime applies and the equilibrium forgets the initial state.
    if let Ok(fit) = fit_exponential_degeneracy(container) {
        push("alpha_fit", fmt(fit.alpha));
        push("alpha_n0", fmt(fit.n0));
        push("alpha_max_residual", fmt(fit.max_residual));
        if fit.max_residual < 1e-9 {
            let canonical = qtl_core::canonical_distribution(gas, fit.alpha);
            for (a, w) in canonical.iter().enumerate() {
                push(&format!("canonical_w_{a}"), fmt(w));
            }
        }
    }

    Ok(PredictReport { rows })
}
