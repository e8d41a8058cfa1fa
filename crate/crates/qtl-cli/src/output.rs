//! CSV tables and gnuplot scripts.
//!
//! Every file starts with comment lines (`#`) carrying the command, the fully
//! resolved config as one JSON line, and the seed(s) of the data below. The
//! data section is a plain CSV with a fixed column set per experiment kind,
//! so re-running the config from a header reproduces the data bytes exactly.

use std::fs;
use std::path::{Path, PathBuf};

use crate::config::ScenarioConfig;
use crate::experiments::{EvolveOutput, HistogramOutput, PredictReport, SweepOutput};

fn fmt(x: f64) -> String {
    format!("{x}")
}

fn header(command: &str, config: &ScenarioConfig, extra: &[String]) -> String {
    let mut out = String::new();
    out.push_str(&format!("# qtl {command} {}\n", config.id));
    out.push_str(&format!("# config: {}\n", config.to_canonical_json()));
    for line in extra {
        out.push_str(&format!("# {line}\n"));
    }
    out
}

/// Extracts the resolved config JSON from a rendered file header.
pub fn config_from_header(contents: &str) -> Option<&str> {
    contents
        .lines()
        .find_map(|line| line.strip_prefix("# config: "))
}

/// The CSV data section: everything below the comment lines.
pub fn data_section(contents: &str) -> String {
    contents
        .lines()
        .filter(|l| !l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn write_files(dir: &Path, files: &[(String, String)]) -> anyhow::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::with_capacity(files.len());
    for (name, contents) in files {
        let path = dir.join(name);
        fs::write(&path, contents)?;
        paths.push(path);
    }
    Ok(paths)
}

/// One CSV per run (named by scenario id and seed) plus one gnuplot script
/// overlaying all runs against the predicted plateaus.
pub fn render_evolve(config: &ScenarioConfig, output: &EvolveOutput) -> Vec<(String, String)> {
    let mut files = Vec::new();
    let levels = output.predicted.len();
    let predicted: Vec<String> = output.predicted.iter().map(fmt).collect();

    for run in &output.runs {
        let mut extra = vec![
            format!("seed: {}", run.seed),
            format!("predicted_w_g: {}", predicted.join(",")),
            format!("s_max: {}", fmt(output.s_max)),
        ];
        if let Some(t) = run.relaxation_time {
            extra.push(format!("relaxation_time: {}", fmt(t)));
        }
        let mut csv = header("evolve", config, &extra);
        let mut cols = vec!["t".to_string()];
        cols.extend((0..levels).map(|a| format!("w_g_{a}")));
        cols.extend([
            "purity".to_string(),
            "entropy".to_string(),
            "distance".to_string(),
        ]);
        csv.push_str(&cols.join(","));
        csv.push('\n');
        for p in run.trajectory.points() {
            let mut row = vec![fmt(p.time)];
            row.extend(p.gas_occupations.iter().map(|&w| fmt(w)));
            row.push(fmt(p.purity));
            row.push(fmt(p.entropy));
            row.push(fmt(p.distance.unwrap_or(f64::NAN)));
            csv.push_str(&row.join(","));
            csv.push('\n');
        }
        files.push((format!("{}_evolve_seed{}.csv", config.id, run.seed), csv));
    }

    files.push((
        format!("{}_evolve.gp", config.id),
        evolve_script(config, output),
    ));
    files
}

fn evolve_script(config: &ScenarioConfig, output: &EvolveOutput) -> String {
    let id = &config.id;
    let levels = output.predicted.len();
    let entropy_col = levels + 3;
    let mut occupation_plots: Vec<String> = output
        .runs
        .iter()
        .map(|run| {
            format!(
                "  '{id}_evolve_seed{seed}.csv' using 1:2 with lines title 'seed {seed}'",
                seed = run.seed
            )
        })
        .collect();
    occupation_plots.push(format!(
        "  {} with lines dashtype 2 lc rgb 'black' title 'predicted W^g_0'",
        fmt(output.predicted.weight(0))
    ));
    let mut entropy_plots: Vec<String> = output
        .runs
        .iter()
        .map(|run| {
            format!(
                "  '{id}_evolve_seed{seed}.csv' using 1:{entropy_col} with lines title 'seed {seed}'",
                seed = run.seed
            )
        })
        .collect();
    entropy_plots.push(format!(
        "  {} with lines dashtype 2 lc rgb 'black' title 'S_max'",
        fmt(output.s_max)
    ));

    format!(
        "# qtl evolve {id}\n\
         set datafile separator ','\n\
         set datafile commentschars '#'\n\
         set terminal pngcairo size 900,700\n\
         set output '{id}_evolve.png'\n\
         set multiplot layout 2,1\n\
         set xlabel 't [hbar/dE]'\n\
         set ylabel 'W^g_0'\n\
         plot \\\n{occ}\n\
         set ylabel 'S^g [k_B]'\n\
         plot \\\n{ent}\n\
         unset multiplot\n",
        occ = occupation_plots.join(", \\\n"),
        ent = entropy_plots.join(", \\\n"),
    )
}

/// Histogram CSV (`bin,s_lo,s_hi,frequency`) plus a gnuplot script with the
/// maximum-entropy marker.
pub fn render_histogram(
    config: &ScenarioConfig,
    output: &HistogramOutput,
) -> Vec<(String, String)> {
    let extra = vec![
        format!("seed: {}", config.seeds[0]),
        format!("samples: {}", output.samples),
        format!("s_max: {}", fmt(output.s_max)),
    ];
    let mut csv = header("histogram", config, &extra);
    csv.push_str("bin,s_lo,s_hi,frequency\n");
    for (k, bin) in output.bins.iter().enumerate() {
        csv.push_str(&format!(
            "{k},{},{},{}\n",
            fmt(bin.lo),
            fmt(bin.hi),
            fmt(bin.frequency)
        ));
    }

    let id = &config.id;
    let script = format!(
        "# qtl histogram {id}\n\
         set datafile separator ','\n\
         set datafile commentschars '#'\n\
         set terminal pngcairo size 700,500\n\
         set output '{id}_histogram.png'\n\
         set xlabel 'S^g [k_B]'\n\
         set ylabel 'relative frequency'\n\
         set style fill solid 0.6\n\
         set boxwidth {width}\n\
         set arrow from {smax}, graph 0 to {smax}, graph 1 nohead dashtype 2\n\
         plot '{id}_histogram.csv' using (($2+$3)/2):4 with boxes title 'accessible region'\n",
        width = fmt(if output.bins.is_empty() {
            0.0
        } else {
            output.bins[0].hi - output.bins[0].lo
        }),
        smax = fmt(output.s_max),
    );

    vec![
        (format!("{id}_histogram.csv"), csv),
        (format!("{id}_histogram.gp"), script),
    ]
}

/// Key/value prediction table.
pub fn render_predict(config: &ScenarioConfig, report: &PredictReport) -> Vec<(String, String)> {
    let mut csv = header("predict", config, &[]);
    csv.push_str("key,value\n");
    for (key, value) in &report.rows {
        csv.push_str(&format!("{key},{value}\n"));
    }
    vec![(format!("{}_predict.csv", config.id), csv)]
}

/// Sweep points CSV (`n_c1,seed,delta`) with per-size means and the scaling
/// fit in the header, plus a log-log gnuplot script with both fits.
pub fn render_sweep(config: &ScenarioConfig, output: &SweepOutput) -> Vec<(String, String)> {
    let mut extra = vec![
        format!(
            "seeds: {}",
            config
                .seeds
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ),
        format!("window: {},{}", fmt(output.window.0), fmt(output.window.1)),
    ];
    for s in &output.sizes {
        extra.push(format!(
            "mean: n_c1={} delta={} std_error={}",
            s.size,
            fmt(s.mean_delta),
            fmt(s.std_error)
        ));
    }
    extra.push(format!(
        "fit: exponent={} coefficient={} rms_residual={} constrained_coefficient={}",
        fmt(output.fit.exponent),
        fmt(output.fit.coefficient),
        fmt(output.fit.rms_residual),
        fmt(output.fit.constrained_coefficient)
    ));
    let mut csv = header("sweep", config, &extra);
    csv.push_str("n_c1,seed,delta\n");
    for p in &output.points {
        csv.push_str(&format!("{},{},{}\n", p.size, p.seed, fmt(p.delta)));
    }

    let id = &config.id;
    let script = format!(
        "# qtl sweep {id}\n\
         set datafile separator ','\n\
         set datafile commentschars '#'\n\
         set terminal pngcairo size 700,500\n\
         set output '{id}_sweep.png'\n\
         set logscale xy\n\
         set xlabel 'N^c_1'\n\
         set ylabel 'Delta_t W^g_0'\n\
         plot '{id}_sweep.csv' using 1:3 with points pt 7 title 'runs', \\\n\
         \x20 sqrt({c})*x**(-{p}) with lines title 'free fit', \\\n\
         \x20 sqrt({cc}/x) with lines dashtype 2 title 'sqrt(c/N)'\n",
        c = fmt(output.fit.coefficient),
        p = fmt(output.fit.exponent),
        cc = fmt(output.fit.constrained_coefficient),
    );

    vec![
        (format!("{id}_sweep.csv"), csv),
        (format!("{id}_sweep.gp"), script),
    ]
}
