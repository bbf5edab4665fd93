// SPDX-License-Identifier: Apache-2.0

//! Lyapunov spectrum of the random transfer-matrix cocycle.
//!
//! A full orthonormal frame is pushed through `T_{ω⁽ⁿ⁾}(E)` and
//! re-orthonormalised by QR every `qr_stride` cells; the logarithms of the
//! diagonal of `R` accumulate the growth rates. Exponents are reported per
//! unit length, `log / (steps · ℓ)`, and standard errors come from batch
//! means.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interval::{energy_interval, EnergyInterval};
use crate::lie::{verify_sp_generation, SpGeneration, DEFAULT_RANK_TOL};
use crate::linalg::{matmul_into, qr_positive_in_place, to_row_major};
use crate::model::{ModelConfig, OmegaVector};
use crate::propagator::transfer_matrix;

pub const DEFAULT_BATCHES: usize = 20;
pub const DEFAULT_SIGMA_THRESHOLD: f64 = 3.0;

/// Above this many distinct single-cell patterns, transfer matrices are
/// computed on the fly instead of cached.
const MAX_CACHED_PATTERNS: usize = 4096;

/// Draws `N` independent atoms from the site law.
pub fn sample_omega<R: Rng + ?Sized>(config: &ModelConfig, rng: &mut R) -> OmegaVector {
    let sampler = AtomSampler::new(config);
    let atoms = config.site_law().atoms();
    OmegaVector::from_values_unchecked(
        (0..config.n())
            .map(|_| atoms[sampler.sample(rng)])
            .collect(),
    )
}

struct AtomSampler {
    index: Option<WeightedIndex<f64>>,
}

impl AtomSampler {
    fn new(config: &ModelConfig) -> Self {
        let probs = config.site_law().probabilities();
        let index = if probs.len() > 1 {
            Some(WeightedIndex::new(probs).expect("site law probabilities are validated"))
        } else {
            None
        };
        Self { index }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match &self.index {
            Some(w) => w.sample(rng),
            None => 0,
        }
    }
}

/// Single-cell transfer matrices, row-major, indexed by the mixed-radix code
/// of the atom indices.
enum TransferSource {
    Cached(Vec<Vec<f64>>),
    OnTheFly,
}

struct Cocycle<'a> {
    config: &'a ModelConfig,
    energy: f64,
    sampler: AtomSampler,
    source: TransferSource,
}

impl<'a> Cocycle<'a> {
    fn new(config: &'a ModelConfig, energy: f64) -> Result<Self> {
        let atoms = config.site_law().atoms();
        let a = atoms.len();
        let n = config.n();
        let patterns = (a as f64).powi(n as i32);
        let source = if patterns <= MAX_CACHED_PATTERNS as f64 {
            let count = a.pow(n as u32);
            let mats = (0..count)
                .map(|code| {
                    let omega = decode(code, a, n, atoms);
                    transfer_matrix(config, &omega, energy).map(|t| to_row_major(t.as_matrix()))
                })
                .collect::<Result<Vec<_>>>()?;
            TransferSource::Cached(mats)
        } else {
            TransferSource::OnTheFly
        };
        Ok(Self {
            config,
            energy,
            sampler: AtomSampler::new(config),
            source,
        })
    }

    /// Multiplies `cur` on the left by a freshly sampled transfer matrix.
    fn step<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        cur: &mut Vec<f64>,
        scratch: &mut Vec<f64>,
        idx: &mut [usize],
    ) -> Result<()> {
        let d = 2 * self.config.n();
        for slot in idx.iter_mut() {
            *slot = self.sampler.sample(rng);
        }
        match &self.source {
            TransferSource::Cached(mats) => {
                let a = self.config.site_law().atoms().len();
                let code = idx.iter().rev().fold(0usize, |acc, &i| acc * a + i);
                matmul_into(&mats[code], cur, scratch, d);
            }
            TransferSource::OnTheFly => {
                let atoms = self.config.site_law().atoms();
                let omega =
                    OmegaVector::from_values_unchecked(idx.iter().map(|&i| atoms[i]).collect());
                let t = transfer_matrix(self.config, &omega, self.energy)?;
                matmul_into(&to_row_major(t.as_matrix()), cur, scratch, d);
            }
        }
        std::mem::swap(cur, scratch);
        Ok(())
    }
}

fn decode(code: usize, radix: usize, n: usize, atoms: &[f64]) -> OmegaVector {
    let mut c = code;
    let values = (0..n)
        .map(|_| {
            let v = atoms[c % radix];
            c /= radix;
            v
        })
        .collect();
    OmegaVector::from_values_unchecked(values)
}

/// Raw output of one cocycle run, columns in QR order.
#[derive(Debug, Clone)]
struct CocycleRun {
    /// Per batch, per column: accumulated `log r_jj`.
    batch_logs: Vec<Vec<f64>>,
    /// Cells in each batch.
    batch_steps: Vec<u64>,
}

fn run_cocycle(
    config: &ModelConfig,
    energy: f64,
    steps: u64,
    seed: u64,
    stream: u64,
    qr_stride: u64,
    batches: usize,
) -> Result<CocycleRun> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    if qr_stride == 0 {
        return Err(Error::InvalidArgument(
            "qr_stride must be at least 1".into(),
        ));
    }
    if batches == 0 {
        return Err(Error::InvalidArgument("batches must be at least 1".into()));
    }
    let cocycle = Cocycle::new(config, energy)?;
    let n = config.n();
    let d = 2 * n;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);

    let blocks = steps.div_ceil(qr_stride);
    let batches = (batches as u64).min(blocks) as usize;
    let mut batch_logs = vec![vec![0.0; d]; batches];
    let mut batch_steps = vec![0u64; batches];

    let mut cur = vec![0.0; d * d];
    for i in 0..d {
        cur[i * d + i] = 1.0;
    }
    let mut scratch = vec![0.0; d * d];
    let mut idx = vec![0usize; n];
    let mut diag = vec![0.0; d];

    let mut done = 0u64;
    for block in 0..blocks {
        let len = qr_stride.min(steps - done);
        for _ in 0..len {
            cocycle.step(&mut rng, &mut cur, &mut scratch, &mut idx)?;
        }
        done += len;
        qr_positive_in_place(&mut cur, d, &mut diag)?;
        let b = ((block as u128 * batches as u128) / blocks as u128) as usize;
        for (acc, r) in batch_logs[b].iter_mut().zip(&diag) {
            *acc += r.ln();
        }
        batch_steps[b] += len;
    }
    Ok(CocycleRun {
        batch_logs,
        batch_steps,
    })
}

/// Monte-Carlo estimate of the full Lyapunov spectrum at one energy.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovEstimate {
    pub energy: f64,
    /// All `2N` exponents per unit length, nonincreasing.
    pub exponents: Vec<f64>,
    pub standard_errors: Vec<f64>,
    /// `γᵢ − γᵢ₊₁` for `i < N`, then `γ_N`.
    pub gaps: Vec<f64>,
    /// Batch-means standard error of each entry of `gaps`.
    pub gap_standard_errors: Vec<f64>,
    /// Cells per seed.
    pub steps: u64,
    pub ell: f64,
    pub seeds: Vec<u64>,
    /// Number of pooled batch means behind the standard errors.
    pub batches: usize,
    pub min_positive_gap: f64,
}

impl LyapunovEstimate {
    /// Number of channels `N`.
    pub fn n(&self) -> usize {
        self.exponents.len() / 2
    }

    /// Positive half of the spectrum.
    pub fn positive_exponents(&self) -> &[f64] {
        &self.exponents[..self.n()]
    }

    /// Every gap (and `γ_N`) exceeds `sigma` times its standard error.
    pub fn is_separable(&self, sigma: f64) -> bool {
        self.gaps
            .iter()
            .zip(&self.gap_standard_errors)
            .all(|(g, se)| se.is_finite() && *g > sigma * se)
    }

    /// `max_i |γᵢ + γ_{2N−1−i}| − 5(seᵢ + se_{2N−1−i})`; nonpositive when
    /// the ±γ pairing holds within five combined standard errors.
    pub fn pairing_excess(&self) -> f64 {
        let d = self.exponents.len();
        (0..d / 2)
            .map(|i| {
                let j = d - 1 - i;
                (self.exponents[i] + self.exponents[j]).abs()
                    - 5.0 * (self.standard_errors[i] + self.standard_errors[j])
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let k = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / k;
    if samples.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// Pools the batches of several runs at the same energy.
fn combine(
    config: &ModelConfig,
    energy: f64,
    steps: u64,
    seeds: Vec<u64>,
    runs: &[CocycleRun],
) -> LyapunovEstimate {
    let n = config.n();
    let d = 2 * n;
    let ell = config.ell();

    let mut totals = vec![0.0; d];
    let mut total_steps = 0u64;
    let mut samples: Vec<Vec<f64>> = Vec::new();
    for run in runs {
        for (logs, &len) in run.batch_logs.iter().zip(&run.batch_steps) {
            for (t, l) in totals.iter_mut().zip(logs) {
                *t += l;
            }
            total_steps += len;
            samples.push(logs.iter().map(|l| l / (len as f64 * ell)).collect());
        }
    }
    let length = total_steps as f64 * ell;
    let raw: Vec<f64> = totals.iter().map(|t| t / length).collect();

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| raw[b].total_cmp(&raw[a]));

    let column = |c: usize| -> Vec<f64> { samples.iter().map(|s| s[c]).collect() };
    let exponents: Vec<f64> = order.iter().map(|&c| raw[c]).collect();
    let standard_errors: Vec<f64> = order.iter().map(|&c| mean_and_se(&column(c)).1).collect();

    let mut gaps = Vec::with_capacity(n);
    let mut gap_standard_errors = Vec::with_capacity(n);
    for i in 0..n {
        let series: Vec<f64> = if i + 1 < n {
            samples
                .iter()
                .map(|s| s[order[i]] - s[order[i + 1]])
                .collect()
        } else {
            column(order[i])
        };
        gaps.push(if i + 1 < n {
            exponents[i] - exponents[i + 1]
        } else {
            exponents[i]
        });
        gap_standard_errors.push(mean_and_se(&series).1);
    }
    let min_positive_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);

    LyapunovEstimate {
        energy,
        exponents,
        standard_errors,
        gaps,
        gap_standard_errors,
        steps,
        ell,
        seeds,
        batches: samples.len(),
        min_positive_gap,
    }
}

/// Lyapunov spectrum at `energy` from one seeded run of `steps` cells, with
/// the default twenty batches.
pub fn lyapunov_spectrum(
    config: &ModelConfig,
    energy: f64,
    steps: u64,
    seed: u64,
    qr_stride: u64,
) -> Result<LyapunovEstimate> {
    lyapunov_spectrum_with_batches(config, energy, steps, seed, qr_stride, DEFAULT_BATCHES)
}

pub fn lyapunov_spectrum_with_batches(
    config: &ModelConfig,
    energy: f64,
    steps: u64,
    seed: u64,
    qr_stride: u64,
    batches: usize,
) -> Result<LyapunovEstimate> {
    let run = run_cocycle(config, energy, steps, seed, 0, qr_stride, batches)?;
    Ok(combine(config, energy, steps, vec![seed], &[run]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOptions {
    pub qr_stride: u64,
    pub rank_tol: f64,
    pub batches: usize,
    /// Gaps must exceed this many standard errors.
    pub sigma_threshold: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            qr_stride: 1,
            rank_tol: DEFAULT_RANK_TOL,
            batches: DEFAULT_BATCHES,
            sigma_threshold: DEFAULT_SIGMA_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// `γ₁ > ⋯ > γ_N > 0` with every gap beyond the significance threshold.
    Separable,
    /// Some gap is within the threshold; the run cannot decide.
    Inconclusive,
    /// The estimate could not be computed.
    Failed(String),
}

impl Verdict {
    pub fn is_separable(&self) -> bool {
        matches!(self, Verdict::Separable)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyResult {
    pub energy: f64,
    pub estimate: Option<LyapunovEstimate>,
    pub lie: Option<SpGeneration>,
    pub lie_error: Option<String>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub interval: EnergyInterval,
    pub results: Vec<EnergyResult>,
    pub steps: u64,
    pub seeds: Vec<u64>,
    pub options: ScanOptions,
}

impl ScanReport {
    pub fn all_separable(&self) -> bool {
        self.results.iter().all(|r| r.verdict.is_separable())
    }

    pub fn count(&self, pred: impl Fn(&Verdict) -> bool) -> usize {
        self.results.iter().filter(|r| pred(&r.verdict)).count()
    }

    /// Smallest gap over all energies with an estimate.
    pub fn min_gap(&self) -> Option<f64> {
        self.results
            .iter()
            .filter_map(|r| r.estimate.as_ref().map(|e| e.min_positive_gap))
            .reduce(f64::min)
    }
}

/// Lie-rank check and seeded Lyapunov estimates on a grid over the energy
/// interval.
///
/// Each `(energy, seed)` pair runs on its own RNG stream (the seed selects the
/// key, the grid index the stream), so the output does not depend on thread
/// scheduling.
pub fn separability_scan(
    config: &ModelConfig,
    grid_points: usize,
    steps: u64,
    seeds: &[u64],
    options: &ScanOptions,
) -> Result<ScanReport> {
    if grid_points == 0 {
        return Err(Error::InvalidArgument(
            "grid_points must be positive".into(),
        ));
    }
    if seeds.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one seed is required".into(),
        ));
    }
    if steps == 0 || options.qr_stride == 0 || options.batches == 0 {
        return Err(Error::InvalidArgument(
            "steps, qr_stride and batches must be positive".into(),
        ));
    }
    let interval = energy_interval(config)?;
    let energies = interval.grid(grid_points);

    let tasks: Vec<(usize, u64)> = (0..energies.len())
        .flat_map(|k| seeds.iter().map(move |&s| (k, s)))
        .collect();
    let runs: Vec<Result<CocycleRun>> = tasks
        .par_iter()
        .map(|&(k, seed)| {
            run_cocycle(
                config,
                energies[k],
                steps,
                seed,
                k as u64,
                options.qr_stride,
                options.batches,
            )
        })
        .collect();
    let lie: Vec<Result<SpGeneration>> = energies
        .par_iter()
        .map(|&e| verify_sp_generation(config, e, options.rank_tol))
        .collect();

    let mut runs = runs.into_iter();
    let results = energies
        .iter()
        .zip(lie)
        .map(|(&energy, lie)| {
            let per_seed: Vec<Result<CocycleRun>> = runs.by_ref().take(seeds.len()).collect();
            let (lie, lie_error) = match lie {
                Ok(l) => (Some(l), None),
                Err(e) => (None, Some(e.to_string())),
            };
            match per_seed.into_iter().collect::<Result<Vec<_>>>() {
                Ok(ok) => {
                    let est = combine(config, energy, steps, seeds.to_vec(), &ok);
                    let verdict = if est.is_separable(options.sigma_threshold) {
                        Verdict::Separable
                    } else {
                        Verdict::Inconclusive
                    };
                    EnergyResult {
                        energy,
                        estimate: Some(est),
                        lie,
                        lie_error,
                        verdict,
                    }
                }
                Err(e) => EnergyResult {
                    energy,
                    estimate: None,
                    lie,
                    lie_error,
                    verdict: Verdict::Failed(e.to_string()),
                },
            }
        })
        .collect();

    Ok(ScanReport {
        interval,
        results,
        steps,
        seeds: seeds.to_vec(),
        options: options.clone(),
    })
}
