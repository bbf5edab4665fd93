// SPDX-License-Identifier: Apache-2.0

mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lyasep::lyapunov::lyapunov_spectrum_with_batches;
use lyasep::{
    energy_interval, lyapunov_spectrum, sample_omega, separability_scan, ModelConfig, ScanOptions,
    SiteLaw, Verdict,
};

fn point_mass(n: usize, ell: f64) -> ModelConfig {
    ModelConfig::new_diagnostic(n, ell, vec![1.0; n], SiteLaw::point_mass(0.0), 1.0).unwrap()
}

#[test]
fn bernoulli_coordinates_are_balanced() {
    // Hoeffding: P(|mean − 1/2| > 0.01) ≤ 2 exp(−2·10⁵·10⁻⁴) ≈ 4e-9 per coordinate.
    let cfg = ModelConfig::bernoulli(3, 0.5, vec![1.0; 3], 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let draws = 100_000;
    let mut sums = [0.0; 3];
    for _ in 0..draws {
        for (s, v) in sums.iter_mut().zip(sample_omega(&cfg, &mut rng).values()) {
            *s += v;
        }
    }
    for s in sums {
        let mean = s / draws as f64;
        assert!((0.49..=0.51).contains(&mean), "mean {mean}");
    }
}

#[test]
fn non_bernoulli_law_samples_its_atoms() {
    let law = SiteLaw::new(vec![0.0, 1.0, 3.0], vec![0.2, 0.3, 0.5]).unwrap();
    let cfg = ModelConfig::new(2, 0.5, vec![1.0, 1.0], law, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut threes = 0usize;
    let total = 40_000;
    for _ in 0..total / 2 {
        for v in sample_omega(&cfg, &mut rng).values() {
            assert!([0.0, 1.0, 3.0].contains(v));
            threes += (*v == 3.0) as usize;
        }
    }
    let frac = threes as f64 / total as f64;
    assert!((frac - 0.5).abs() < 0.015, "{frac}");
    let est = lyapunov_spectrum(&cfg, 0.2, 20_000, 5, 1).unwrap();
    assert!(est.exponents[0] > 0.0);
}

#[test]
fn deterministic_hyperbolic_cocycle_matches_square_roots() {
    // M(E) = V₀ − E with E = −3 has eigenvalues 2 and 4.
    let cfg = point_mass(2, 0.5);
    let est = lyapunov_spectrum(&cfg, -3.0, 100_000, 3, 1).unwrap();
    let expect = [2.0, 2f64.sqrt(), -(2f64.sqrt()), -2.0];
    for (g, e) in est.exponents.iter().zip(expect) {
        assert!((g - e).abs() <= 1e-3, "{:?}", est.exponents);
    }
}

#[test]
fn free_elliptic_regime_has_vanishing_spectrum() {
    // λ_max(V₀) = 1 for N = 2; above it every channel oscillates.
    let cfg = point_mass(2, 0.5);
    let est = lyapunov_spectrum(&cfg, 2.0, 100_000, 3, 1).unwrap();
    for g in &est.exponents {
        assert!(g.abs() <= 0.01, "{:?}", est.exponents);
    }
}

#[test]
fn seeds_agree_within_standard_errors() {
    let cfg = ModelConfig::bernoulli(1, 0.5, vec![1.0], 1.0).unwrap();
    let e = energy_interval(&cfg).unwrap().midpoint();
    let a = lyapunov_spectrum(&cfg, e, 1_000_000, 1, 1).unwrap();
    let b = lyapunov_spectrum(&cfg, e, 1_000_000, 2, 1).unwrap();
    let tol = 3.0 * (a.standard_errors[0].powi(2) + b.standard_errors[0].powi(2)).sqrt();
    assert!((a.exponents[0] - b.exponents[0]).abs() <= tol);
    assert!(a.exponents[0] > 0.0);
}

#[test]
fn qr_stride_does_not_change_estimates() {
    let cfg = ModelConfig::bernoulli(2, 0.5, vec![1.0, 1.0], 1.0).unwrap();
    let base = lyapunov_spectrum(&cfg, 0.5, 200_000, 9, 1).unwrap();
    for stride in [5, 10] {
        let other = lyapunov_spectrum(&cfg, 0.5, 200_000, 9, stride).unwrap();
        for i in 0..4 {
            let tol = 3.0 * (base.standard_errors[i] + other.standard_errors[i]);
            assert!((base.exponents[i] - other.exponents[i]).abs() <= tol);
        }
    }
}

#[test]
fn exponents_depend_only_on_the_potentials() {
    // Atoms {1, 2} at energy E + 1 produce the same M_ω as atoms {0, 1} at E.
    let a = ModelConfig::bernoulli(2, 0.4, vec![1.0, 1.0], 1.0).unwrap();
    let shifted = SiteLaw::new(vec![1.0, 2.0], vec![0.5, 0.5]).unwrap();
    let b = ModelConfig::new_diagnostic(2, 0.4, vec![1.0, 1.0], shifted, 1.0).unwrap();
    let ea = lyapunov_spectrum(&a, 0.3, 50_000, 4, 1).unwrap();
    let eb = lyapunov_spectrum(&b, 1.3, 50_000, 4, 1).unwrap();
    for (x, y) in ea.exponents.iter().zip(&eb.exponents) {
        assert!((x - y).abs() < 1e-9);
    }
}

#[test]
fn estimates_are_sorted_and_paired() {
    let cfg = ModelConfig::bernoulli(3, 0.2, vec![1.0, 2.0, 3.0], 1.0).unwrap();
    let e = energy_interval(&cfg).unwrap().midpoint();
    let est = lyapunov_spectrum(&cfg, e, 100_000, 1, 2).unwrap();
    assert!(est.exponents.windows(2).all(|w| w[0] >= w[1]));
    assert!(est.pairing_excess() <= 1e-6);
    assert_eq!(est.gaps.len(), 3);
    assert_eq!(est.batches, 20);
    assert!(est.standard_errors.iter().all(|s| *s >= 0.0));
}

#[test]
fn uneven_batches_are_handled() {
    let cfg = ModelConfig::bernoulli(1, 0.5, vec![1.0], 1.0).unwrap();
    let est = lyapunov_spectrum_with_batches(&cfg, 0.5, 1003, 1, 7, 20).unwrap();
    assert_eq!(est.batches, 20);
    assert!(est.exponents[0].is_finite());
    let est = lyapunov_spectrum_with_batches(&cfg, 0.5, 30, 1, 7, 20).unwrap();
    assert_eq!(est.batches, 5);
}

#[test]
fn scalar_scan_is_separable() {
    let cfg = ModelConfig::bernoulli(1, 0.5, vec![1.0], 1.0).unwrap();
    let report = separability_scan(&cfg, 11, 1_000_000, &[1], &ScanOptions::default()).unwrap();
    assert_eq!(report.results.len(), 11);
    for r in &report.results {
        assert!(report.interval.contains(r.energy));
        assert_eq!(r.lie.as_ref().unwrap().rank, 3);
        assert!(r.verdict.is_separable(), "E={} {:?}", r.energy, r.estimate);
    }
}

#[test]
fn short_single_point_scan_still_reports() {
    let cfg = ModelConfig::bernoulli(2, 0.5, vec![1.0, 1.0], 1.0).unwrap();
    let report = separability_scan(&cfg, 1, 1_000, &[1], &ScanOptions::default()).unwrap();
    assert_eq!(report.results.len(), 1);
    let r = &report.results[0];
    assert_eq!(r.energy, report.interval.midpoint());
    assert!(matches!(
        r.verdict,
        Verdict::Separable | Verdict::Inconclusive
    ));
    assert!(r.estimate.as_ref().unwrap().standard_errors[1] > 0.0);
}

#[test]
fn scan_requires_admissible_length() {
    let cfg = ModelConfig::bernoulli(2, 0.9, vec![1.0, 1.0], 1.0).unwrap();
    assert!(matches!(
        separability_scan(&cfg, 3, 100, &[1], &ScanOptions::default()),
        Err(lyasep::Error::EmptyInterval { .. })
    ));
}

#[test]
fn scans_are_reproducible() {
    let cfg = ModelConfig::bernoulli(2, 0.5, vec![1.0, 1.0], 1.0).unwrap();
    let a = separability_scan(&cfg, 3, 5_000, &[4, 5], &ScanOptions::default()).unwrap();
    let b = separability_scan(&cfg, 3, 5_000, &[4, 5], &ScanOptions::default()).unwrap();
    assert_eq!(a, b);
}
