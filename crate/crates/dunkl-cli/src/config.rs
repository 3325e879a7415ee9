//! Run configuration: a TOML file named by `DUNKL_CONFIG`, overridden by flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use dunkl_core::lipschitz::TGrid;
use dunkl_core::measure::GridSpec;

pub const CONFIG_ENV: &str = "DUNKL_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Every field optional, as read from the file or the command line.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub k: Option<f64>,
    pub tol: Option<f64>,
    pub grid: Option<String>,
    pub tgrid: Option<String>,
    pub suite: Option<Vec<String>>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub normalized: Option<bool>,
}

impl PartialConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| format!("config: {e}"))
    }

    pub fn from_file(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("config {}: {e}", path.display()))?;
        Self::from_toml(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// Fields set in `over` win.
    pub fn overridden_by(self, over: PartialConfig) -> Self {
        Self {
            k: over.k.or(self.k),
            tol: over.tol.or(self.tol),
            grid: over.grid.or(self.grid),
            tgrid: over.tgrid.or(self.tgrid),
            suite: over.suite.or(self.suite),
            out: over.out.or(self.out),
            format: over.format.or(self.format),
            normalized: over.normalized.or(self.normalized),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    /// `None` sweeps the default multiplicities.
    pub k: Option<f64>,
    pub tol: Option<f64>,
    #[serde(serialize_with = "display_opt")]
    pub grid: Option<GridSpec>,
    #[serde(serialize_with = "display_opt")]
    pub tgrid: Option<TGrid>,
    pub suite: Vec<String>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub format: Format,
    pub normalized: bool,
}

fn display_opt<T: std::fmt::Display, S: serde::Serializer>(v: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

impl RunConfig {
    pub fn resolve(p: PartialConfig) -> Result<Self, String> {
        if let Some(k) = p.k {
            if !(k >= 0.0 && k.is_finite()) {
                return Err(format!("--k must be a finite number ≥ 0, got {k}"));
            }
        }
        if let Some(tol) = p.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(format!("--tol must be positive, got {tol}"));
            }
        }
        let grid = p
            .grid
            .as_deref()
            .map(|g| g.parse::<GridSpec>().map_err(|e| format!("--grid: {e}")))
            .transpose()?;
        if let Some(g) = &grid {
            if !(g.radius > 0.0 && g.nodes_per_panel >= 2) {
                return Err(format!("--grid needs R > 0 and at least 2 nodes per panel, got {g}"));
            }
        }
        let tgrid = p
            .tgrid
            .as_deref()
            .map(|g| g.parse::<TGrid>().map_err(|e| format!("--tgrid: {e}")))
            .transpose()?;
        let suite = p.suite.unwrap_or_else(|| vec!["all".into()]);
        Ok(Self {
            k: p.k,
            tol: p.tol,
            grid,
            tgrid,
            suite,
            out: p.out,
            format: p.format.unwrap_or_default(),
            normalized: p.normalized.unwrap_or(false),
        })
    }

    /// The file named by `DUNKL_CONFIG`, if set, under the given flags.
    pub fn load(flags: PartialConfig) -> Result<Self, String> {
        let base = match std::env::var_os(CONFIG_ENV) {
            Some(path) => PartialConfig::from_file(Path::new(&path))?,
            None => PartialConfig::default(),
        };
        Self::resolve(base.overridden_by(flags))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = PartialConfig::from_toml("k = 1.5\ntol = 1e-3\nsuite = [\"pde\"]\nformat = \"csv\"\n").unwrap();
        let flags = PartialConfig { k: Some(0.5), ..Default::default() };
        let c = RunConfig::resolve(file.overridden_by(flags)).unwrap();
        assert_eq!(c.k, Some(0.5));
        assert_eq!(c.tol, Some(1e-3));
        assert_eq!(c.suite, vec!["pde".to_string()]);
        assert_eq!(c.format, Format::Csv);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(PartialConfig::from_toml("colour = 1").is_err());
        let bad = |p: PartialConfig| RunConfig::resolve(p).is_err();
        assert!(bad(PartialConfig { k: Some(-1.0), ..Default::default() }));
        assert!(bad(PartialConfig { tol: Some(0.0), ..Default::default() }));
        assert!(bad(PartialConfig { grid: Some("5:8".into()), ..Default::default() }));
        assert!(bad(PartialConfig { tgrid: Some("1:0.1:32".into()), ..Default::default() }));
    }

    #[test]
    fn specs_round_trip() {
        let c = RunConfig::resolve(PartialConfig {
            grid: Some("5:8:smooth".into()),
            tgrid: Some("0.0001:100:64".into()),
            ..Default::default()
        })
        .unwrap();
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["grid"], "5:8:smooth");
        assert_eq!(v["suite"][0], "all");
    }
}
