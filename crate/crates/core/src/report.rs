// SPDX-License-Identifier: Apache-2.0

//! Batch run: scan, then write `interval.csv`, `exponents.csv` and
//! `summary.txt` into the output directory.
//!
//! Numbers in the CSV files use 12 significant digits in scientific notation
//! so that identical runs produce identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use crate::config::RunConfig;
use crate::error::Result;
use crate::interval::EnergyInterval;
use crate::lyapunov::{separability_scan, ScanReport, Verdict};

pub const EXIT_SEPARABLE: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;

/// 12 significant digits, `.` as decimal separator.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.11e}")
    }
}

pub fn interval_csv(interval: &EnergyInterval) -> String {
    let fields = [
        interval.lambda_min,
        interval.lambda_max,
        interval.delta,
        interval.ell_c,
        interval.r_ell,
        interval.lower,
        interval.upper,
    ];
    let row: Vec<String> = fields.iter().map(|v| format_number(*v)).collect();
    format!(
        "lambda_min,lambda_max,delta,ell_c,r_ell,lower,upper\n{}\n",
        row.join(",")
    )
}

pub fn exponents_header(n: usize) -> String {
    let d = 2 * n;
    let mut cols = vec!["E".to_string()];
    cols.extend((1..=d).map(|i| format!("gamma_{i}")));
    cols.extend((1..=d).map(|i| format!("se_{i}")));
    cols.push("lie_rank".into());
    cols.push("separable".into());
    cols.join(",")
}

pub fn exponents_csv(report: &ScanReport, n: usize) -> String {
    let d = 2 * n;
    let mut out = exponents_header(n);
    out.push('\n');
    for r in &report.results {
        let mut cols = vec![format_number(r.energy)];
        match &r.estimate {
            Some(est) => {
                cols.extend(est.exponents.iter().map(|v| format_number(*v)));
                cols.extend(est.standard_errors.iter().map(|v| format_number(*v)));
            }
            None => cols.extend(std::iter::repeat_n("nan".to_string(), 2 * d)),
        }
        cols.push(match &r.lie {
            Some(l) => l.rank.to_string(),
            None => "-1".into(),
        });
        cols.push(if r.verdict.is_separable() { "1" } else { "0" }.into());
        out.push_str(&cols.join(","));
        out.push('\n');
    }
    out
}

pub fn summary_text(config: &RunConfig, report: &ScanReport, wall_seconds: f64) -> String {
    let m = &config.model;
    let i = &report.interval;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "model: n={} ell={} couplings={:?} bg_radius={}",
        m.n(),
        m.ell(),
        m.couplings(),
        m.bg_radius()
    );
    let _ = writeln!(
        s,
        "site_law: atoms={:?} probabilities={:?}",
        m.site_law().atoms(),
        m.site_law().probabilities()
    );
    let _ = writeln!(
        s,
        "interval: [{}, {}] lambda_min={} lambda_max={} delta={} r_ell={} ell_c={}",
        i.lower, i.upper, i.lambda_min, i.lambda_max, i.delta, i.r_ell, i.ell_c
    );
    let _ = writeln!(
        s,
        "scan: grid_points={} steps={} qr_stride={} batches={} sigma_threshold={}",
        report.results.len(),
        report.steps,
        report.options.qr_stride,
        report.options.batches,
        report.options.sigma_threshold
    );
    let _ = writeln!(s, "seeds: {:?}", report.seeds);

    let separable = report.count(|v| matches!(v, Verdict::Separable));
    let inconclusive = report.count(|v| matches!(v, Verdict::Inconclusive));
    let failed = report.count(|v| matches!(v, Verdict::Failed(_)));
    let _ = writeln!(
        s,
        "verdicts: separable={separable} inconclusive={inconclusive} failed={failed}"
    );
    match report.min_gap() {
        Some(g) => {
            let _ = writeln!(s, "min_gap: {g}");
        }
        None => {
            let _ = writeln!(s, "min_gap: n/a");
        }
    }

    let lie_short: Vec<String> = report
        .results
        .iter()
        .filter_map(|r| match (&r.lie, &r.lie_error) {
            (Some(l), _) if !l.generated => Some(format!(
                "E={} rank={}/{}",
                r.energy, l.rank, l.expected_rank
            )),
            (None, Some(e)) => Some(format!("E={} error: {e}", r.energy)),
            _ => None,
        })
        .collect();
    if lie_short.is_empty() {
        let _ = writeln!(s, "lie_generation: full sp(N) at every grid energy");
    } else {
        let _ = writeln!(s, "lie_generation: incomplete at {}", lie_short.join("; "));
    }
    for r in &report.results {
        if let Verdict::Failed(msg) = &r.verdict {
            let _ = writeln!(s, "failure at E={}: {msg}", r.energy);
        }
    }
    let _ = writeln!(s, "wall_time_seconds: {wall_seconds:.3}");
    let verdict = if report.all_separable() {
        "SEPARABLE"
    } else {
        "INCONCLUSIVE"
    };
    let _ = writeln!(s, "overall: {verdict}");
    s
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub report: ScanReport,
}

/// Runs the scan described by `config` and writes the artifacts.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    let start = Instant::now();
    let report = separability_scan(
        &config.model,
        config.grid_points,
        config.steps,
        &config.seeds,
        &config.scan,
    )?;
    let wall = start.elapsed().as_secs_f64();

    let dir: &Path = &config.output_path;
    fs::create_dir_all(dir)?;
    if config.emit_csv {
        fs::write(dir.join("interval.csv"), interval_csv(&report.interval))?;
        fs::write(
            dir.join("exponents.csv"),
            exponents_csv(&report, config.model.n()),
        )?;
    }
    fs::write(dir.join("summary.txt"), summary_text(config, &report, wall))?;

    let exit_code = if report.all_separable() {
        EXIT_SEPARABLE
    } else {
        EXIT_INCONCLUSIVE
    };
    Ok(RunOutcome { exit_code, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_is_fixed() {
        assert_eq!(format_number(0.5), "5.00000000000e-1");
        assert_eq!(format_number(-2.0 / 3.0), "-6.66666666667e-1");
        assert_eq!(format_number(f64::NAN), "nan");
        assert_eq!(format_number(f64::INFINITY), "inf");
    }

    #[test]
    fn header_layout() {
        assert_eq!(
            exponents_header(1),
            "E,gamma_1,gamma_2,se_1,se_2,lie_rank,separable"
        );
        assert_eq!(exponents_header(3).split(',').count(), 4 * 3 + 3);
    }
}
