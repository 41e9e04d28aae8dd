use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::CliError;

/// Flat key-value configuration file (TOML syntax). Every key is optional;
/// command-line flags take precedence over values set here.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub time_budget: Option<f64>,
    pub format: Option<String>,
    pub log: Option<PathBuf>,
    pub solver: Option<String>,
    pub mode: Option<String>,
    pub uniform_widths: Option<bool>,
    pub sweeps: Option<usize>,
    pub restarts: Option<usize>,
    pub initial_temperature: Option<f64>,
    pub cooling: Option<f64>,
    pub subproblem_size: Option<usize>,
    pub exact_threshold: Option<usize>,
    pub rounds: Option<usize>,
    pub patience: Option<usize>,
    pub runs: Option<usize>,
    pub ta_grid: Option<Vec<f64>>,
    pub schedule: Option<PathBuf>,
    pub steps: Option<usize>,
    pub threshold: Option<f64>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Input(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_keys() {
        let c = Config::parse("seed = 7\nsolver = \"sa\"\nta_grid = [1.0, 2.5]\n").unwrap();
        assert_eq!(c.seed, Some(7));
        assert_eq!(c.solver.as_deref(), Some("sa"));
        assert_eq!(c.ta_grid, Some(vec![1.0, 2.5]));
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(matches!(Config::parse("sweep = 3\n"), Err(CliError::Input(_))));
    }
}
