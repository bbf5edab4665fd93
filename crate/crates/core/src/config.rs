// SPDX-License-Identifier: Apache-2.0

//! Run configuration, read from TOML.
//!
//! ```toml
//! n = 2
//! ell = 0.5
//! couplings = [1.0, 1.0]
//! bg_radius = 1.0          # optional, default 1.0
//! grid_points = 21         # optional
//! steps = 1000000          # optional
//! seeds = [1, 2, 3]        # optional
//! qr_stride = 1            # optional
//! rank_tol = 1e-8          # optional
//! sigma_threshold = 3.0    # optional
//! batches = 20             # optional
//! output = "lyasep-out"    # optional
//! emit_csv = true          # optional
//!
//! [site_law]               # optional, default Bernoulli(1/2) on {0, 1}
//! atoms = [0.0, 1.0]
//! probabilities = [0.5, 0.5]
//! ```

use std::path::PathBuf;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::lie::DEFAULT_RANK_TOL;
use crate::lyapunov::{ScanOptions, DEFAULT_BATCHES, DEFAULT_SIGMA_THRESHOLD};
use crate::model::{ModelConfig, SiteLaw};

pub const DEFAULT_STEPS: u64 = 1_000_000;
pub const DEFAULT_GRID_POINTS: usize = 21;
pub const DEFAULT_SEEDS: [u64; 3] = [1, 2, 3];
pub const DEFAULT_BG_RADIUS: f64 = 1.0;
pub const DEFAULT_OUTPUT: &str = "lyasep-out";

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSiteLaw {
    pub atoms: Vec<f64>,
    pub probabilities: Vec<f64>,
}

/// Document as written; every key optional until validation.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub n: Option<usize>,
    pub ell: Option<f64>,
    pub couplings: Option<Vec<f64>>,
    pub bg_radius: Option<f64>,
    pub site_law: Option<RawSiteLaw>,
    pub grid_points: Option<usize>,
    pub steps: Option<u64>,
    pub seeds: Option<Vec<u64>>,
    pub qr_stride: Option<u64>,
    pub rank_tol: Option<f64>,
    pub sigma_threshold: Option<f64>,
    pub batches: Option<usize>,
    pub output: Option<PathBuf>,
    pub emit_csv: Option<bool>,
}

impl RawConfig {
    pub fn from_toml(source: &str) -> Result<Self> {
        toml::from_str(source).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Fills defaults and validates.
    pub fn validate(self) -> Result<RunConfig> {
        let n = self
            .n
            .ok_or_else(|| Error::Parse("missing required key `n`".into()))?;
        let ell = self
            .ell
            .ok_or_else(|| Error::Parse("missing required key `ell`".into()))?;
        let couplings = self
            .couplings
            .ok_or_else(|| Error::Parse("missing required key `couplings`".into()))?;
        let site_law = match self.site_law {
            Some(raw) => SiteLaw::new(raw.atoms, raw.probabilities)?,
            None => SiteLaw::default(),
        };
        let model = ModelConfig::new(
            n,
            ell,
            couplings,
            site_law,
            self.bg_radius.unwrap_or(DEFAULT_BG_RADIUS),
        )?;

        let positive = |key: &str, v: u64| -> Result<()> {
            if v == 0 {
                Err(Error::Validation(format!("`{key}` must be positive")))
            } else {
                Ok(())
            }
        };
        let grid_points = self.grid_points.unwrap_or(DEFAULT_GRID_POINTS);
        positive("grid_points", grid_points as u64)?;
        let steps = self.steps.unwrap_or(DEFAULT_STEPS);
        positive("steps", steps)?;
        let qr_stride = self.qr_stride.unwrap_or(1);
        positive("qr_stride", qr_stride)?;
        let batches = self.batches.unwrap_or(DEFAULT_BATCHES);
        positive("batches", batches as u64)?;
        let rank_tol = self.rank_tol.unwrap_or(DEFAULT_RANK_TOL);
        if !(rank_tol > 0.0) {
            return Err(Error::Validation("`rank_tol` must be positive".into()));
        }
        let sigma_threshold = self.sigma_threshold.unwrap_or(DEFAULT_SIGMA_THRESHOLD);
        if !(sigma_threshold > 0.0) {
            return Err(Error::Validation(
                "`sigma_threshold` must be positive".into(),
            ));
        }
        let seeds = self.seeds.unwrap_or_else(|| DEFAULT_SEEDS.to_vec());
        if seeds.is_empty() {
            return Err(Error::Validation("`seeds` must not be empty".into()));
        }

        Ok(RunConfig {
            model,
            grid_points,
            steps,
            seeds,
            scan: ScanOptions {
                qr_stride,
                rank_tol,
                batches,
                sigma_threshold,
            },
            output_path: self.output.unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT)),
            emit_csv: self.emit_csv.unwrap_or(true),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub grid_points: usize,
    pub steps: u64,
    pub seeds: Vec<u64>,
    pub scan: ScanOptions,
    /// Directory receiving `interval.csv`, `exponents.csv` and `summary.txt`.
    pub output_path: PathBuf,
    pub emit_csv: bool,
}

/// Parses and validates a TOML run configuration.
pub fn parse_config(source: &str) -> Result<RunConfig> {
    RawConfig::from_toml(source)?.validate()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_gets_defaults() {
        let rc = parse_config("n = 1\nell = 0.5\ncouplings = [1.0]\nbg_radius = 1.0\n").unwrap();
        assert_eq!(rc.steps, 1_000_000);
        assert_eq!(rc.grid_points, 21);
        assert_eq!(rc.scan.qr_stride, 1);
        assert_eq!(rc.scan.rank_tol, 1e-8);
        assert_eq!(rc.seeds, vec![1, 2, 3]);
        assert!(rc.emit_csv);
        assert_eq!(rc.model.site_law(), &SiteLaw::default());
    }

    #[test]
    fn zero_coupling_rejected() {
        let err = parse_config("n = 1\nell = 0.5\ncouplings = [0.0]\n").unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        assert!(err.to_string().contains("coupling must be nonzero"));
    }

    #[test]
    fn site_law_without_one_rejected() {
        let src = "n = 1\nell = 0.5\ncouplings = [1.0]\n[site_law]\natoms = [0.0, 2.0]\nprobabilities = [0.5, 0.5]\n";
        let err = parse_config(src).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        assert!(err.to_string().contains("support"));
    }

    #[test]
    fn schema_errors_name_the_key() {
        let err = parse_config("n = 1\nell = 0.5\ncouplings = [1.0]\nbogus = 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
        assert!(err.to_string().contains("bogus"), "{err}");

        let err = parse_config("n = 1\nell = \"half\"\ncouplings = [1.0]\n").unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
        assert!(err.to_string().contains("ell"), "{err}");

        let err = parse_config("ell = 0.5\ncouplings = [1.0]\n").unwrap_err();
        assert!(err.to_string().contains("`n`"), "{err}");
    }

    #[test]
    fn nonpositive_numbers_rejected() {
        assert!(parse_config("n = 1\nell = -0.5\ncouplings = [1.0]\n").is_err());
        assert!(parse_config("n = 1\nell = 0.5\ncouplings = [1.0]\nsteps = 0\n").is_err());
        assert!(parse_config("n = 1\nell = 0.5\ncouplings = [1.0]\nseeds = []\n").is_err());
    }
}
