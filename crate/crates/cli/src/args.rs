//! Flag parsing and the merge with an optional `key=value` config file.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use jacspec::QuadratureConfig;

use crate::error::{usage, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Density,
    Density2d,
    Eigencurve,
    Scatter,
    Verify,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Spectral tables for the half-line discrete Schrödinger operator with a local perturbation.
#[derive(Debug, Parser)]
#[command(name = "jacspec", version)]
pub struct Args {
    pub command: Command,
    /// Perturbed site (0-based).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Coupling on site 0 for the rank-two case.
    #[arg(long, allow_hyphen_values = true)]
    pub beta1: Option<f64>,
    /// Coupling on site 1 for the rank-two case.
    #[arg(long, allow_hyphen_values = true)]
    pub beta2: Option<f64>,
    /// Grid as `min:max:count`, both endpoints included.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long = "beta-max", allow_hyphen_values = true)]
    pub beta_max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long = "k-max")]
    pub k_max: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Size of the truncated matrix for `oracle`.
    #[arg(long = "n-dim")]
    pub n_dim: Option<usize>,
    /// Add a continuously unwrapped phase column to `scatter`.
    #[arg(long)]
    pub unwrap: bool,
    /// Write the truncated spectrum of `oracle` as JSON to this path.
    #[arg(long)]
    pub spectrum: Option<PathBuf>,
    #[arg(long = "abs-tol")]
    pub abs_tol: Option<f64>,
    #[arg(long = "rel-tol")]
    pub rel_tol: Option<f64>,
    #[arg(long = "max-depth")]
    pub max_depth: Option<u32>,
    /// File of `key=value` lines; flags given on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        jacspec::measure::linspace(self.min, self.max, self.count)
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [min, max, count] = parts.as_slice() else {
            return Err(format!("grid `{s}` is not of the form min:max:count"));
        };
        let min: f64 = min.trim().parse().map_err(|_| format!("bad grid minimum `{min}`"))?;
        let max: f64 = max.trim().parse().map_err(|_| format!("bad grid maximum `{max}`"))?;
        let count: usize = count.trim().parse().map_err(|_| format!("bad grid count `{count}`"))?;
        if count < 2 {
            return Err(format!("grid count must be at least 2, got {count}"));
        }
        if !(min < max) {
            return Err(format!("grid needs min < max, got {min}:{max}"));
        }
        Ok(Grid { min, max, count })
    }
}

/// Fully resolved run settings.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub k: Option<usize>,
    pub beta: Option<f64>,
    pub beta1: Option<f64>,
    pub beta2: Option<f64>,
    pub grid: Option<Grid>,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub beta_max: Option<f64>,
    pub steps: Option<usize>,
    pub k_max: Option<usize>,
    pub seed: Option<u64>,
    pub n_dim: Option<usize>,
    pub unwrap: bool,
    pub spectrum: Option<PathBuf>,
    pub quadrature: QuadratureConfig,
}

fn parse_value<T: FromStr>(key: &str, raw: &str) -> CliResult<T> {
    raw.trim()
        .parse()
        .map_err(|_| usage(format!("invalid value `{raw}` for `{key}`")))
}

fn read_config_file(path: &PathBuf) -> CliResult<BTreeMap<String, String>> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(usage(format!("{}:{}: expected key=value", path.display(), no + 1)));
        };
        map.insert(key.trim().replace('_', "-"), value.trim().to_string());
    }
    Ok(map)
}

impl Args {
    /// Fills unset flags from the config file, then validates.
    pub fn resolve(mut self) -> CliResult<RunConfig> {
        if let Some(path) = self.config.clone() {
            for (key, raw) in read_config_file(&path)? {
                let k = key.as_str();
                match k {
                    "k" => fill(&mut self.k, k, &raw)?,
                    "beta" => fill(&mut self.beta, k, &raw)?,
                    "beta1" => fill(&mut self.beta1, k, &raw)?,
                    "beta2" => fill(&mut self.beta2, k, &raw)?,
                    "grid" => fill(&mut self.grid, k, &raw)?,
                    "format" => {
                        if self.format.is_none() {
                            self.format = Some(
                                Format::from_str(&raw, true)
                                    .map_err(|_| usage(format!("invalid format `{raw}`")))?,
                            );
                        }
                    }
                    "output" => fill(&mut self.output, k, &raw)?,
                    "beta-max" => fill(&mut self.beta_max, k, &raw)?,
                    "steps" => fill(&mut self.steps, k, &raw)?,
                    "k-max" => fill(&mut self.k_max, k, &raw)?,
                    "seed" => fill(&mut self.seed, k, &raw)?,
                    "n-dim" => fill(&mut self.n_dim, k, &raw)?,
                    "unwrap" => self.unwrap |= parse_value::<bool>(k, &raw)?,
                    "spectrum" => fill(&mut self.spectrum, k, &raw)?,
                    "abs-tol" => fill(&mut self.abs_tol, k, &raw)?,
                    "rel-tol" => fill(&mut self.rel_tol, k, &raw)?,
                    "max-depth" => fill(&mut self.max_depth, k, &raw)?,
                    other => return Err(usage(format!("unknown config key `{other}`"))),
                }
            }
        }
        let grid = self
            .grid
            .as_deref()
            .map(|g| g.parse::<Grid>().map_err(usage))
            .transpose()?;
        let defaults = QuadratureConfig::default();
        let quadrature = QuadratureConfig::new(
            self.abs_tol.unwrap_or(defaults.abs_tol),
            self.rel_tol.unwrap_or(defaults.rel_tol),
            self.max_depth.unwrap_or(defaults.max_depth),
        )
        .map_err(|e| usage(e.to_string()))?;
        Ok(RunConfig {
            command: self.command,
            k: self.k,
            beta: self.beta,
            beta1: self.beta1,
            beta2: self.beta2,
            grid,
            format: self.format.unwrap_or(Format::Csv),
            output: self.output,
            beta_max: self.beta_max,
            steps: self.steps,
            k_max: self.k_max,
            seed: self.seed,
            n_dim: self.n_dim,
            unwrap: self.unwrap,
            spectrum: self.spectrum,
            quadrature,
        })
    }
}

fn fill<T: FromStr>(slot: &mut Option<T>, key: &str, raw: &str) -> CliResult<()> {
    if slot.is_none() {
        *slot = Some(parse_value(key, raw)?);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: Grid = "-2:2:401".parse().unwrap();
        assert_eq!((g.min, g.max, g.count), (-2.0, 2.0, 401));
        assert_eq!(g.points().len(), 401);
        assert!("1:0:5".parse::<Grid>().is_err());
        assert!("0:1:1".parse::<Grid>().is_err());
        assert!("0:1".parse::<Grid>().is_err());
        assert!("a:1:3".parse::<Grid>().is_err());
    }

    #[test]
    fn flags_override_config() {
        let dir = std::env::temp_dir().join(format!("jacspec-args-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        fs::write(&path, "# comment\nk = 3\nbeta=0.25\nformat=json\nabs_tol=1e-9\n").unwrap();
        let args = Args::parse_from([
            "jacspec",
            "density",
            "--beta",
            "-0.1",
            "--config",
            path.to_str().unwrap(),
        ]);
        let cfg = args.resolve().unwrap();
        assert_eq!(cfg.k, Some(3));
        assert_eq!(cfg.beta, Some(-0.1));
        assert_eq!(cfg.format, Format::Json);
        assert_eq!(cfg.quadrature.abs_tol, 1e-9);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn unknown_config_key_is_usage_error() {
        let dir = std::env::temp_dir().join(format!("jacspec-args-bad-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.cfg");
        fs::write(&path, "colour=blue\n").unwrap();
        let args = Args::parse_from(["jacspec", "verify", "--config", path.to_str().unwrap()]);
        let err = args.resolve().unwrap_err();
        assert_eq!(err.exit_code(), 2);
        fs::remove_dir_all(&dir).unwrap();
    }
}
