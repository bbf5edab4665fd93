// SPDX-License-Identifier: Apache-2.0

//! Critical length and energy interval.
//!
//! With `λ_min`, `λ_max` the extreme eigenvalues of `M_ω(0)` over all
//! `ω ∈ {0,1}^N`, `δ = (λ_max − λ_min)/2` and `r_ℓ = d/ℓ` (`d` the radius
//! parameter), the set of energies with `ℓ‖X_ω(E)‖ ≤ d` for every binary `ω`
//! is `[λ_max − r_ℓ, λ_min + r_ℓ]`, nonempty as long as `ℓ < ℓ_C`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{spectrum_m, x_norm_from_spectrum, ModelConfig, OmegaVector};

/// Largest `N` for which the `2^N` binary patterns are enumerated.
pub const MAX_ENUMERATED_N: usize = 20;

/// Slack allowed on `ℓ‖X‖ ≤ d` when checking containment.
pub const CONTAINMENT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremalEigenvalues {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub delta: f64,
}

/// The energy interval together with the quantities it was built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyInterval {
    pub lower: f64,
    pub upper: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub delta: f64,
    pub r_ell: f64,
    pub ell_c: f64,
    pub bg_radius: f64,
}

impl EnergyInterval {
    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn contains(&self, energy: f64) -> bool {
        self.lower <= energy && energy <= self.upper
    }

    /// `points` uniformly spaced energies including both endpoints; a single
    /// point is the midpoint.
    pub fn grid(&self, points: usize) -> Vec<f64> {
        match points {
            0 => Vec::new(),
            1 => vec![self.midpoint()],
            _ => {
                let h = self.length() / (points - 1) as f64;
                (0..points)
                    .map(|k| {
                        if k == points - 1 {
                            self.upper
                        } else {
                            self.lower + h * k as f64
                        }
                    })
                    .collect()
            }
        }
    }
}

pub(crate) fn binary_spectra(config: &ModelConfig) -> Result<Vec<Vec<f64>>> {
    let n = config.n();
    if n > MAX_ENUMERATED_N {
        return Err(Error::ResourceLimit(format!(
            "enumerating 2^{n} disorder patterns exceeds the limit 2^{MAX_ENUMERATED_N}"
        )));
    }
    (0..1u64 << n)
        .into_par_iter()
        .map(|mask| spectrum_m(config, &OmegaVector::binary(n, mask)))
        .collect()
}

/// Global extreme eigenvalues of `M_ω(0)` over `ω ∈ {0,1}^N`.
pub fn extremal_eigenvalues(config: &ModelConfig) -> Result<ExtremalEigenvalues> {
    let spectra = binary_spectra(config)?;
    let (lambda_min, lambda_max) = spectra
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &l| {
            (lo.min(l), hi.max(l))
        });
    Ok(ExtremalEigenvalues {
        lambda_min,
        lambda_max,
        delta: 0.5 * (lambda_max - lambda_min),
    })
}

fn critical_length_from(delta: f64, bg_radius: f64) -> f64 {
    if delta > 0.0 {
        bg_radius.min(bg_radius / delta)
    } else {
        bg_radius
    }
}

/// `ℓ_C = min(d, d/δ)`, or `d` when `δ = 0`.
pub fn critical_length(config: &ModelConfig) -> Result<f64> {
    let ext = extremal_eigenvalues(config)?;
    Ok(critical_length_from(ext.delta, config.bg_radius()))
}

/// `[λ_max − r_ℓ, λ_min + r_ℓ]` for `ℓ < ℓ_C`.
pub fn energy_interval(config: &ModelConfig) -> Result<EnergyInterval> {
    let ext = extremal_eigenvalues(config)?;
    let d = config.bg_radius();
    let ell = config.ell();
    let ell_c = critical_length_from(ext.delta, d);
    if ell >= ell_c {
        return Err(Error::EmptyInterval { ell, ell_c });
    }
    let r_ell = d / ell;
    Ok(EnergyInterval {
        lower: ext.lambda_max - r_ell,
        upper: ext.lambda_min + r_ell,
        lambda_min: ext.lambda_min,
        lambda_max: ext.lambda_max,
        delta: ext.delta,
        r_ell,
        ell_c,
        bg_radius: d,
    })
}

/// One energy/pattern pair where `ℓ‖X_ω(E)‖` exceeded the radius.
#[derive(Debug, Clone, PartialEq)]
pub struct ContainmentViolation {
    pub energy: f64,
    pub omega_mask: u64,
    /// `ℓ‖X_ω(E)‖ / d`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContainmentReport {
    pub interval: EnergyInterval,
    pub energies_checked: usize,
    /// Largest `ℓ‖X_ω(E)‖ / d` seen on the grid.
    pub max_ratio: f64,
    pub violations: Vec<ContainmentViolation>,
}

impl ContainmentReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Largest `ℓ‖X_ω(E)‖ / d` over binary `ω` at one energy, with the maximising
/// pattern.
pub fn containment_ratio(config: &ModelConfig, energy: f64) -> Result<(f64, u64)> {
    let spectra = binary_spectra(config)?;
    Ok(max_ratio_at(config, &spectra, energy))
}

fn max_ratio_at(config: &ModelConfig, spectra: &[Vec<f64>], energy: f64) -> (f64, u64) {
    let scale = config.ell() / config.bg_radius();
    spectra
        .iter()
        .enumerate()
        .map(|(mask, s)| (scale * x_norm_from_spectrum(s, energy), mask as u64))
        .fold((f64::NEG_INFINITY, 0), |a, b| if b.0 > a.0 { b } else { a })
}

/// Checks `ℓ‖X_ω(E)‖ ≤ d` on `grid_points` energies spanning the interval and
/// every binary `ω`.
pub fn verify_containment(config: &ModelConfig, grid_points: usize) -> Result<ContainmentReport> {
    if grid_points == 0 {
        return Err(Error::InvalidArgument(
            "grid_points must be positive".into(),
        ));
    }
    let interval = energy_interval(config)?;
    let spectra = binary_spectra(config)?;
    let d = config.bg_radius();
    let ell = config.ell();
    let mut max_ratio: f64 = 0.0;
    let mut violations = Vec::new();
    for energy in interval.grid(grid_points) {
        for (mask, s) in spectra.iter().enumerate() {
            let bound = ell * x_norm_from_spectrum(s, energy);
            max_ratio = max_ratio.max(bound / d);
            if bound > d + CONTAINMENT_TOL {
                violations.push(ContainmentViolation {
                    energy,
                    omega_mask: mask as u64,
                    ratio: bound / d,
                });
            }
        }
    }
    Ok(ContainmentReport {
        interval,
        energies_checked: grid_points,
        max_ratio,
        violations,
    })
}
