// SPDX-License-Identifier: Apache-2.0

//! Independent reference computations used only by the integration tests.

#![allow(dead_code, clippy::needless_range_loop)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lyasep::{ModelConfig, OmegaVector};

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| a[(i, j)]).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `exp(A)` by a Taylor series on `A / 2^s` with `‖A/2^s‖_F ≤ 1/2`, then
/// repeated squaring.
pub fn taylor_exp(a: &DMatrix<f64>) -> DMatrix<f64> {
    let d = a.nrows();
    let norm = a.norm();
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let b = a * 2f64.powi(-s);
    let mut sum = DMatrix::<f64>::identity(d, d);
    let mut term = DMatrix::<f64>::identity(d, d);
    for k in 1..60 {
        term = &term * &b / k as f64;
        sum += &term;
        if term.norm() < 1e-20 * sum.norm() {
            break;
        }
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Principal logarithm by inverse scaling and squaring: Denman-Beavers square
/// roots until `‖A − I‖` is small, then the Mercator series.
pub fn principal_log(a: &DMatrix<f64>) -> DMatrix<f64> {
    let d = a.nrows();
    let id = DMatrix::<f64>::identity(d, d);
    let mut y = a.clone();
    let mut k = 0;
    while (&y - &id).norm() > 1e-3 {
        let mut z = id.clone();
        for _ in 0..100 {
            let yi = y.clone().try_inverse().expect("invertible");
            let zi = z.clone().try_inverse().expect("invertible");
            let y_next = (&y + zi) * 0.5;
            let z_next = (&z + yi) * 0.5;
            let done = (&y_next - &y).norm() < 1e-15 * y_next.norm();
            y = y_next;
            z = z_next;
            if done {
                break;
            }
        }
        k += 1;
        assert!(k < 60, "square-root iteration did not approach identity");
    }
    let x = &y - &id;
    let mut sum = DMatrix::<f64>::zeros(d, d);
    let mut pow = id.clone();
    for j in 1..80 {
        pow = &pow * &x;
        let term = &pow / j as f64;
        if j % 2 == 1 {
            sum += &term;
        } else {
            sum -= &term;
        }
        if term.norm() < 1e-22 {
            break;
        }
    }
    sum * 2f64.powi(k)
}

/// Largest singular value as the square root of the top eigenvalue of `AᵀA`,
/// through the Jacobi oracle.
pub fn oracle_spectral_norm(a: &DMatrix<f64>) -> f64 {
    let ata = a.transpose() * a;
    jacobi_eigenvalues(&ata)
        .last()
        .copied()
        .unwrap_or(0.0)
        .max(0.0)
        .sqrt()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random model instance with `N ≤ max_n`, couplings of modulus in
/// `[0.25, 2]`, a binary `ω`, `E ∈ [−5, 5]` and `ℓ ∈ (0, 1]`.
pub struct Instance {
    pub config: ModelConfig,
    pub omega: OmegaVector,
    pub energy: f64,
}

pub fn random_instance(rng: &mut ChaCha8Rng, max_n: usize) -> Instance {
    let n = rng.random_range(1..=max_n);
    let couplings: Vec<f64> = (0..n)
        .map(|_| {
            let m: f64 = rng.random_range(0.25..2.0);
            if rng.random::<bool>() {
                m
            } else {
                -m
            }
        })
        .collect();
    let ell = 1.0 - rng.random::<f64>();
    let config = ModelConfig::bernoulli(n, ell, couplings, 1.0).unwrap();
    let mask = rng.random_range(0..1u64 << n);
    Instance {
        config,
        omega: OmegaVector::binary(n, mask),
        energy: rng.random_range(-5.0..5.0),
    }
}
