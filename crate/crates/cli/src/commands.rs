use std::fs;
use std::io::Write;

use jacspec::format::sig17;
use jacspec::scattering::PhaseTable;
use jacspec::{
    critical_coupling, eigenvalue, empirical_cdf_distance, s_value, truncated_spectrum, CdfReport,
    Coupling, Coupling2D, DensityTable, Measure, Perturbation,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{Command, Format, Grid, RunConfig};
use crate::error::{usage, CliResult};
use crate::verify;

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    match cfg.command {
        Command::Density => density(cfg),
        Command::Density2d => density2d(cfg),
        Command::Eigencurve => eigencurve(cfg),
        Command::Scatter => scatter(cfg),
        Command::Verify => verify::run(cfg),
        Command::Oracle => oracle(cfg),
    }
}

/// Writes to `--output` if given, otherwise to stdout.
pub fn emit(cfg: &RunConfig, text: &str) -> CliResult<()> {
    match &cfg.output {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn coupling(cfg: &RunConfig) -> CliResult<Coupling> {
    let beta = cfg.beta.ok_or_else(|| usage("--beta is required"))?;
    Ok(Coupling::new(cfg.k.unwrap_or(0), beta)?)
}

fn coupling2d(cfg: &RunConfig) -> CliResult<Coupling2D> {
    if cfg.beta1.is_none() && cfg.beta2.is_none() {
        return Err(usage("--beta1 or --beta2 is required"));
    }
    Ok(Coupling2D::new(cfg.beta1.unwrap_or(0.0), cfg.beta2.unwrap_or(0.0))?)
}

fn grid_or(cfg: &RunConfig, fallback: Grid) -> Vec<f64> {
    cfg.grid.unwrap_or(fallback).points()
}

const BAND_GRID: Grid = Grid {
    min: -2.0,
    max: 2.0,
    count: 401,
};

fn density_table(cfg: &RunConfig, measure: Measure) -> CliResult<()> {
    let grid = grid_or(cfg, BAND_GRID);
    let values = grid
        .par_iter()
        .map(|&l| measure.density(l))
        .collect::<jacspec::Result<Vec<_>>>()?;
    let table = DensityTable::new(measure, grid, values)?;
    for note in &table.notes {
        eprintln!("note: {note}");
    }
    match cfg.format {
        Format::Csv => emit(cfg, &table.to_csv()),
        Format::Json => emit(cfg, &json(&table.with_total_mass(&cfg.quadrature)?)),
    }
}

fn density(cfg: &RunConfig) -> CliResult<()> {
    density_table(cfg, Measure::RankOne(coupling(cfg)?))
}

fn density2d(cfg: &RunConfig) -> CliResult<()> {
    density_table(cfg, Measure::RankTwo(coupling2d(cfg)?))
}

#[derive(Debug, Serialize)]
struct EigenCurve {
    k: usize,
    beta_critical: f64,
    rows: Vec<EigenRow>,
}

#[derive(Debug, Serialize)]
struct EigenRow {
    beta: f64,
    lambda: f64,
}

fn eigencurve(cfg: &RunConfig) -> CliResult<()> {
    let k = cfg.k.unwrap_or(0);
    let b0 = critical_coupling(k);
    let beta_max = cfg.beta_max.ok_or_else(|| usage("--beta-max is required"))?;
    if !(beta_max > b0) {
        return Err(usage(format!(
            "--beta-max must exceed the critical coupling {b0}, got {beta_max}"
        )));
    }
    let steps = cfg.steps.unwrap_or(50);
    if steps == 0 {
        return Err(usage("--steps must be positive"));
    }
    let rows = (1..=steps)
        .into_par_iter()
        .map(|i| -> CliResult<EigenRow> {
            let beta = b0 + (beta_max - b0) * i as f64 / steps as f64;
            let lambda = eigenvalue(Coupling::new(k, beta)?)
                .lambda
                .expect("coupling above critical has an eigenvalue");
            Ok(EigenRow { beta, lambda })
        })
        .collect::<CliResult<Vec<_>>>()?;
    match cfg.format {
        Format::Csv => {
            let mut out = String::from("beta,lambda\n");
            for r in &rows {
                out.push_str(&format!("{},{}\n", sig17(r.beta), sig17(r.lambda)));
            }
            emit(cfg, &out)
        }
        Format::Json => emit(
            cfg,
            &json(&EigenCurve {
                k,
                beta_critical: b0,
                rows,
            }),
        ),
    }
}

fn scatter(cfg: &RunConfig) -> CliResult<()> {
    let c = coupling(cfg)?;
    let grid = grid_or(
        cfg,
        Grid {
            min: -1.99,
            max: 1.99,
            count: 399,
        },
    );
    let values = grid
        .par_iter()
        .map(|&l| {
            s_value(c, l).map_err(|_| {
                jacspec::Error::Domain(format!("grid point {l} lies outside the open band (-2, 2)"))
            })
        })
        .collect::<jacspec::Result<Vec<_>>>()?;
    let table = PhaseTable::from_values(c, values, cfg.unwrap);
    match cfg.format {
        Format::Csv => emit(cfg, &table.to_csv()),
        Format::Json => emit(cfg, &json(&table)),
    }
}

#[derive(Debug, Serialize)]
struct OracleReport {
    #[serde(flatten)]
    cdf: CdfReport,
    /// `ac_mass + bound_state_weight`.
    mass_sum: f64,
    /// Closed-form eigenvalue for a rank-one coupling above critical.
    predicted_eigenvalue: Option<f64>,
    /// Distance from the prediction to the nearest out-of-band truncation eigenvalue.
    eigenvalue_gap: Option<f64>,
}

fn perturbation(cfg: &RunConfig) -> CliResult<Perturbation> {
    let two = cfg.beta1.is_some() || cfg.beta2.is_some();
    match (cfg.beta.is_some(), two) {
        (true, true) => Err(usage("give either --beta or --beta1/--beta2, not both")),
        (true, false) => Ok(coupling(cfg)?.into()),
        (false, true) => Ok(coupling2d(cfg)?.into()),
        (false, false) => Err(usage("--beta or --beta1/--beta2 is required")),
    }
}

fn oracle(cfg: &RunConfig) -> CliResult<()> {
    let p = perturbation(cfg)?;
    let n_dim = cfg.n_dim.unwrap_or(2000);
    let cdf = empirical_cdf_distance(p, n_dim, &cfg.quadrature)?;
    let predicted_eigenvalue = match p {
        Perturbation::RankOne(c) => eigenvalue(c).lambda,
        Perturbation::RankTwo(_) => None,
    };
    let eigenvalue_gap = predicted_eigenvalue.map(|l| {
        cdf.bound_states
            .iter()
            .map(|(b, _)| (b - l).abs())
            .fold(f64::INFINITY, f64::min)
    });
    if let Some(path) = &cfg.spectrum {
        fs::write(path, json(&truncated_spectrum(p, n_dim)?))?;
    }
    let report = OracleReport {
        mass_sum: cdf.ac_mass + cdf.bound_state_weight,
        cdf,
        predicted_eigenvalue,
        eigenvalue_gap,
    };
    match cfg.format {
        Format::Json => emit(cfg, &json(&report)),
        Format::Csv => {
            let mut rows = vec![
                ("n_dim".to_string(), report.cdf.n_dim.to_string()),
                ("cdf_distance".into(), sig17(report.cdf.distance)),
                ("ac_mass".into(), sig17(report.cdf.ac_mass)),
                ("bound_state_weight".into(), sig17(report.cdf.bound_state_weight)),
                ("mass_sum".into(), sig17(report.mass_sum)),
            ];
            for (l, w) in &report.cdf.bound_states {
                rows.push(("bound_state_lambda".into(), sig17(*l)));
                rows.push(("bound_state_weight_i".into(), sig17(*w)));
            }
            if let Some(l) = report.predicted_eigenvalue {
                rows.push(("predicted_eigenvalue".into(), sig17(l)));
            }
            if let Some(g) = report.eigenvalue_gap {
                rows.push(("eigenvalue_gap".into(), sig17(g)));
            }
            let mut out = String::from("quantity,value\n");
            for (key, value) in rows {
                out.push_str(&format!("{key},{value}\n"));
            }
            emit(cfg, &out)
        }
    }
}
