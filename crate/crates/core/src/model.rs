// SPDX-License-Identifier: Apache-2.0

//! Static model data and the deterministic single-cell matrices.
//!
//! For one cell with disorder pattern `ω` the potential is the symmetric
//! matrix `M_ω(E) = V₀ + diag(c₁ω₁ − E, …, c_Nω_N − E)` and the first-order
//! system `(u, u')' = X_ω(E)(u, u')` has generator `X_ω(E) = [[0, I], [M, 0]]`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;

const PROBABILITY_SUM_TOL: f64 = 1e-12;

/// Finite discrete single-site distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteLaw {
    atoms: Vec<f64>,
    probabilities: Vec<f64>,
}

impl SiteLaw {
    /// Validates shape, finiteness, distinct atoms and normalisation. Support
    /// containment of `{0, 1}` is checked by [`ModelConfig::new`].
    pub fn new(atoms: Vec<f64>, probabilities: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Validation("site_law needs at least one atom".into()));
        }
        if atoms.len() != probabilities.len() {
            return Err(Error::Validation(format!(
                "site_law has {} atoms but {} probabilities",
                atoms.len(),
                probabilities.len()
            )));
        }
        if atoms.iter().any(|a| !a.is_finite()) {
            return Err(Error::Validation("site_law atoms must be finite".into()));
        }
        for (i, a) in atoms.iter().enumerate() {
            if atoms[..i].contains(a) {
                return Err(Error::Validation(format!("site_law atom {a} is repeated")));
            }
        }
        if probabilities.iter().any(|p| !(*p > 0.0) || !p.is_finite()) {
            return Err(Error::Validation(
                "site_law probabilities must be positive".into(),
            ));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > PROBABILITY_SUM_TOL {
            return Err(Error::Validation(format!(
                "site_law probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Self {
            atoms,
            probabilities,
        })
    }

    /// Bernoulli law on `{0, 1}` with `P(1) = p`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::new(vec![0.0, 1.0], vec![1.0 - p, p])
    }

    /// Point mass at `x`. Only admissible in diagnostic configurations.
    pub fn point_mass(x: f64) -> Self {
        Self {
            atoms: vec![x],
            probabilities: vec![1.0],
        }
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn contains_atom(&self, x: f64) -> bool {
        self.atoms.contains(&x)
    }
}

impl Default for SiteLaw {
    fn default() -> Self {
        Self::bernoulli(0.5).expect("Bernoulli(1/2) is a valid law")
    }
}

/// All static parameters of the model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    n: usize,
    ell: f64,
    couplings: Vec<f64>,
    site_law: SiteLaw,
    bg_radius: f64,
}

impl ModelConfig {
    /// Validated configuration. The site law must charge both 0 and 1.
    pub fn new(
        n: usize,
        ell: f64,
        couplings: Vec<f64>,
        site_law: SiteLaw,
        bg_radius: f64,
    ) -> Result<Self> {
        let cfg = Self::new_diagnostic(n, ell, couplings, site_law, bg_radius)?;
        if !cfg.site_law.contains_atom(0.0) || !cfg.site_law.contains_atom(1.0) {
            return Err(Error::Validation(
                "site_law support must contain both atoms 0 and 1".into(),
            ));
        }
        Ok(cfg)
    }

    /// Bernoulli(1/2) disorder.
    pub fn bernoulli(n: usize, ell: f64, couplings: Vec<f64>, bg_radius: f64) -> Result<Self> {
        Self::new(n, ell, couplings, SiteLaw::default(), bg_radius)
    }

    /// Like [`ModelConfig::new`] but without the `{0, 1}` support requirement,
    /// for reference runs such as the disorder-free operator.
    pub fn new_diagnostic(
        n: usize,
        ell: f64,
        couplings: Vec<f64>,
        site_law: SiteLaw,
        bg_radius: f64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension("n must be at least 1".into()));
        }
        if !(ell > 0.0) || !ell.is_finite() {
            return Err(Error::Validation(format!(
                "ell must be positive, got {ell}"
            )));
        }
        if couplings.len() != n {
            return Err(Error::Validation(format!(
                "expected {n} couplings, got {}",
                couplings.len()
            )));
        }
        if let Some(i) = couplings.iter().position(|c| *c == 0.0 || !c.is_finite()) {
            return Err(Error::Validation(format!(
                "coupling must be nonzero and finite (couplings[{i}] = {})",
                couplings[i]
            )));
        }
        if !(bg_radius > 0.0) || !bg_radius.is_finite() {
            return Err(Error::Validation(format!(
                "bg_radius must be positive, got {bg_radius}"
            )));
        }
        Ok(Self {
            n,
            ell,
            couplings,
            site_law,
            bg_radius,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn site_law(&self) -> &SiteLaw {
        &self.site_law
    }

    pub fn bg_radius(&self) -> f64 {
        self.bg_radius
    }

    /// Same model with a different interaction length.
    pub fn with_ell(&self, ell: f64) -> Result<Self> {
        Self::new_diagnostic(
            self.n,
            ell,
            self.couplings.clone(),
            self.site_law.clone(),
            self.bg_radius,
        )
    }

    /// Same model with a different neighbourhood radius.
    pub fn with_bg_radius(&self, bg_radius: f64) -> Result<Self> {
        Self::new_diagnostic(
            self.n,
            self.ell,
            self.couplings.clone(),
            self.site_law.clone(),
            bg_radius,
        )
    }
}

/// One disorder pattern `(ω₁, …, ω_N)` for a single cell.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaVector {
    values: Vec<f64>,
}

impl OmegaVector {
    /// Checks the length against `config.n()` and that each value is an atom
    /// of the site law.
    pub fn new(config: &ModelConfig, values: Vec<f64>) -> Result<Self> {
        if values.len() != config.n() {
            return Err(Error::InvalidArgument(format!(
                "omega has length {}, expected {}",
                values.len(),
                config.n()
            )));
        }
        if let Some(v) = values
            .iter()
            .find(|v| !config.site_law().contains_atom(**v))
        {
            return Err(Error::InvalidArgument(format!(
                "omega value {v} is not an atom of the site law"
            )));
        }
        Ok(Self { values })
    }

    /// The `{0, 1}` pattern whose i-th entry is bit `i` of `mask`.
    pub fn binary(n: usize, mask: u64) -> Self {
        Self {
            values: (0..n).map(|i| ((mask >> i) & 1) as f64).collect(),
        }
    }

    pub(crate) fn from_values_unchecked(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Real symmetric matrix; symmetry is exact by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    entries: DMatrix<f64>,
}

impl SymmetricMatrix {
    /// Builds from the upper triangle `f(i, j)`, `i ≤ j`, mirrored below.
    pub fn from_upper_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                entries[(i, j)] = v;
                entries[(j, i)] = v;
            }
        }
        Self { entries }
    }

    /// Rejects matrices that are not exactly symmetric.
    pub fn from_matrix(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(Error::InvalidDimension(format!(
                "expected a nonempty square matrix, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries != entries.transpose() {
            return Err(Error::InvalidArgument("matrix is not symmetric".into()));
        }
        Ok(Self { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    /// `(Λ, Q)` with `A = Q Λ Qᵀ`, eigenvalues nondecreasing.
    pub fn eigen(&self) -> Result<(DVector<f64>, DMatrix<f64>)> {
        linalg::symmetric_eigen(&self.entries)
    }

    /// Eigenvalues in nondecreasing order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eigen()?.0.iter().copied().collect())
    }
}

/// `X = [[0, I], [M, 0]]` of order `2N`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockHamiltonianMatrix {
    entries: DMatrix<f64>,
}

impl BlockHamiltonianMatrix {
    pub fn from_potential(m: &SymmetricMatrix) -> Self {
        let n = m.dim();
        let mut entries = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            entries[(i, n + i)] = 1.0;
            for j in 0..n {
                entries[(n + i, j)] = m.get(i, j);
            }
        }
        Self { entries }
    }

    /// Order of the matrix, `2N`.
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    /// The lower-left block `M`.
    pub fn potential(&self) -> SymmetricMatrix {
        let n = self.dim() / 2;
        SymmetricMatrix {
            entries: self.entries.view((n, 0), (n, n)).into_owned(),
        }
    }
}

/// Zero diagonal, ones on the first super- and sub-diagonal.
pub fn build_v0(n: usize) -> Result<SymmetricMatrix> {
    if n == 0 {
        return Err(Error::InvalidDimension("V0 needs n >= 1".into()));
    }
    Ok(SymmetricMatrix::from_upper_fn(n, |i, j| {
        if j == i + 1 {
            1.0
        } else {
            0.0
        }
    }))
}

fn check_omega(config: &ModelConfig, omega: &OmegaVector) -> Result<()> {
    if omega.len() != config.n() {
        return Err(Error::InvalidArgument(format!(
            "omega has length {}, config has n={}",
            omega.len(),
            config.n()
        )));
    }
    Ok(())
}

/// `M_ω(E) = V₀ + diag(cᵢωᵢ − E)`.
pub fn build_m(config: &ModelConfig, omega: &OmegaVector, energy: f64) -> Result<SymmetricMatrix> {
    check_omega(config, omega)?;
    let c = config.couplings();
    let w = omega.values();
    Ok(SymmetricMatrix::from_upper_fn(config.n(), |i, j| {
        if i == j {
            c[i] * w[i] - energy
        } else if j == i + 1 {
            1.0
        } else {
            0.0
        }
    }))
}

pub fn build_x(
    config: &ModelConfig,
    omega: &OmegaVector,
    energy: f64,
) -> Result<BlockHamiltonianMatrix> {
    let m = build_m(config, omega, energy)?;
    Ok(BlockHamiltonianMatrix::from_potential(&m))
}

/// Eigenvalues of `M_ω(0)`, nondecreasing.
pub fn spectrum_m(config: &ModelConfig, omega: &OmegaVector) -> Result<Vec<f64>> {
    build_m(config, omega, 0.0)?.eigenvalues()
}

/// Spectral norm of `X_ω(E)` from the spectrum of `M_ω(0)`.
///
/// `X Xᵀ = diag(I, M²)`, so the singular values of `X` are `1` and
/// `|λᵢ − E|`.
pub fn x_norm(config: &ModelConfig, omega: &OmegaVector, energy: f64) -> Result<f64> {
    let spectrum = spectrum_m(config, omega)?;
    Ok(x_norm_from_spectrum(&spectrum, energy))
}

pub(crate) fn x_norm_from_spectrum(spectrum: &[f64], energy: f64) -> f64 {
    spectrum
        .iter()
        .map(|l| (l - energy).abs())
        .fold(1.0, f64::max)
}
