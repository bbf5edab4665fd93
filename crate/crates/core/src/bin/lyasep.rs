// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use lyasep::config::{RawConfig, RawSiteLaw};
use lyasep::report::{run, EXIT_ERROR};
use lyasep::Error;

/// Lyapunov separability scan for the matrix-valued random Schrödinger model.
///
/// Flags override keys from `--config`. Writes interval.csv, exponents.csv and
/// summary.txt into `--output`. Exit status: 0 all energies separable,
/// 2 some energy inconclusive, 1 error.
#[derive(Debug, Parser)]
#[command(name = "lyasep", version)]
struct Cli {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    ell: Option<f64>,
    /// Comma-separated coupling constants.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    couplings: Option<Vec<f64>>,
    #[arg(long)]
    bg_radius: Option<f64>,
    /// Comma-separated atoms of the single-site law.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        requires = "site_probs"
    )]
    site_atoms: Option<Vec<f64>>,
    /// Comma-separated probabilities matching `--site-atoms`.
    #[arg(long, value_delimiter = ',', requires = "site_atoms")]
    site_probs: Option<Vec<f64>>,
    #[arg(long)]
    grid_points: Option<usize>,
    #[arg(long)]
    steps: Option<u64>,
    /// Comma-separated RNG seeds.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long)]
    qr_stride: Option<u64>,
    #[arg(long)]
    rank_tol: Option<f64>,
    /// Gaps must exceed this many standard errors.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    batches: Option<usize>,
    /// Output directory.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write only summary.txt.
    #[arg(long)]
    no_csv: bool,
}

impl Cli {
    fn into_raw(self) -> Result<RawConfig, Error> {
        let mut raw = match &self.config {
            Some(path) => RawConfig::from_toml(&std::fs::read_to_string(path)?)?,
            None => RawConfig::default(),
        };
        macro_rules! set {
            ($($field:ident <- $value:expr),* $(,)?) => {
                $(if let Some(v) = $value { raw.$field = Some(v); })*
            };
        }
        set!(
            n <- self.n,
            ell <- self.ell,
            couplings <- self.couplings,
            bg_radius <- self.bg_radius,
            grid_points <- self.grid_points,
            steps <- self.steps,
            seeds <- self.seeds,
            qr_stride <- self.qr_stride,
            rank_tol <- self.rank_tol,
            sigma_threshold <- self.sigma,
            batches <- self.batches,
            output <- self.output,
        );
        if let (Some(atoms), Some(probabilities)) = (self.site_atoms, self.site_probs) {
            raw.site_law = Some(RawSiteLaw {
                atoms,
                probabilities,
            });
        }
        if self.no_csv {
            raw.emit_csv = Some(false);
        }
        Ok(raw)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = cli
        .into_raw()
        .and_then(RawConfig::validate)
        .and_then(|cfg| run(&cfg).map(|o| (cfg, o)));
    match outcome {
        Ok((cfg, o)) => {
            eprintln!(
                "{} of {} energies separable; artifacts in {}",
                o.report.count(|v| v.is_separable()),
                o.report.results.len(),
                cfg.output_path.display()
            );
            ExitCode::from(o.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
