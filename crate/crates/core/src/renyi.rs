//! Rényi entropies, n-purities and spectrum reconstruction from integer purities.
//!
//! Logarithms are natural throughout.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::qmat::{clamped_pow, DensityMatrix};

/// Order of a Rényi entropy.
///
/// The von Neumann entropy is its own variant rather than `n = 1 + tiny`,
/// so that no caller ever evaluates `log γ / (1 - n)` at the singular point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RenyiIndex {
    Real(f64),
    VonNeumann,
}

impl RenyiIndex {
    pub fn real(n: f64) -> Result<Self> {
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidArgument(format!("Rényi index must be positive, got {n}")));
        }
        if (n - 1.0).abs() <= 1e-9 {
            return Err(Error::InvalidArgument(
                "Rényi index too close to 1; use the von Neumann index".into(),
            ));
        }
        Ok(RenyiIndex::Real(n))
    }

    /// The numeric order, 1 for von Neumann.
    pub fn order(&self) -> f64 {
        match self {
            RenyiIndex::Real(n) => *n,
            RenyiIndex::VonNeumann => 1.0,
        }
    }
}

impl std::fmt::Display for RenyiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RenyiIndex::Real(n) => write!(f, "{n}"),
            RenyiIndex::VonNeumann => write!(f, "vn"),
        }
    }
}

/// Eigenvalues of a density matrix, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty spectrum".into()));
        }
        if values.iter().any(|v| !(*v >= 0.0) || *v > 1.0 + 1e-12) {
            return Err(Error::InvalidState(format!(
                "spectrum entries outside [0, 1]: {values:?}"
            )));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidState(format!("spectrum sums to {sum}")));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Self(values))
    }

    pub fn of(rho: &DensityMatrix) -> Self {
        let mut v = rho.eigenvalues().to_vec();
        v.reverse();
        Self(v)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn purities(&self) -> PuritySequence {
        PuritySequence((1..=self.dim()).map(|k| spectral_purity(&self.0, k as f64)).collect())
    }
}

/// `γ_k = Tr ρ^k` for `k = 1..=d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PuritySequence(Vec<f64>);

impl PuritySequence {
    pub fn new(gammas: Vec<f64>) -> Result<Self> {
        let Some(first) = gammas.first() else {
            return Err(Error::InvalidArgument("empty purity sequence".into()));
        };
        if (first - 1.0).abs() > 1e-10 {
            return Err(Error::InconsistentPurities(format!("γ1 = {first}, expected 1")));
        }
        let d = gammas.len() as f64;
        for (k, g) in gammas.iter().enumerate() {
            let lower = d.powi(-(k as i32));
            if !g.is_finite() || *g > 1.0 + 1e-10 || *g < lower - 1e-10 {
                return Err(Error::InconsistentPurities(format!(
                    "γ{} = {g} outside [{lower}, 1]",
                    k + 1
                )));
            }
        }
        Ok(Self(gammas))
    }

    pub fn gammas(&self) -> &[f64] {
        &self.0
    }
}

/// `Σ λ^n` with the clamp rule.
pub fn spectral_purity(eigenvalues: &[f64], n: f64) -> f64 {
    eigenvalues.iter().map(|&l| clamped_pow(l, n)).sum()
}

pub fn spectral_von_neumann(eigenvalues: &[f64]) -> f64 {
    -eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| l * l.ln())
        .sum::<f64>()
}

pub fn spectral_entropy(eigenvalues: &[f64], idx: RenyiIndex) -> f64 {
    match idx {
        // `+ 0.0` folds the -0 of a pure state into +0.
        RenyiIndex::Real(n) => spectral_purity(eigenvalues, n).ln() / (1.0 - n) + 0.0,
        RenyiIndex::VonNeumann => spectral_von_neumann(eigenvalues),
    }
}

pub fn n_purity(rho: &DensityMatrix, n: f64) -> Result<f64> {
    if !(n > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "purity order must be positive, got {n}"
        )));
    }
    Ok(spectral_purity(rho.eigenvalues(), n))
}

pub fn renyi_entropy(rho: &DensityMatrix, idx: RenyiIndex) -> f64 {
    spectral_entropy(rho.eigenvalues(), idx)
}

pub fn von_neumann(rho: &DensityMatrix) -> f64 {
    spectral_von_neumann(rho.eigenvalues())
}

/// Inverts `γ_1..γ_d` to the spectrum.
///
/// Newton's identities give the elementary symmetric polynomials; the
/// eigenvalues are the roots of the characteristic polynomial, found as
/// companion-matrix eigenvalues and polished with a few Newton steps.
pub fn spectrum_from_purities(p: &PuritySequence, d: usize) -> Result<Spectrum> {
    if d == 0 || p.gammas().len() < d {
        return Err(Error::InvalidArgument(format!(
            "need γ1..γ{d}, got {} entries",
            p.gammas().len()
        )));
    }
    let power_sums = &p.gammas()[..d];

    // k e_k = Σ_{i=1..k} (-1)^{i-1} e_{k-i} p_i
    let mut e = vec![0.0; d + 1];
    e[0] = 1.0;
    for k in 1..=d {
        let mut acc = 0.0;
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * e[k - i] * power_sums[i - 1];
        }
        e[k] = acc / k as f64;
    }
    // Monic x^d + c_1 x^{d-1} + ... + c_d with c_k = (-1)^k e_k.
    let coeffs: Vec<f64> = (1..=d).map(|k| if k % 2 == 0 { e[k] } else { -e[k] }).collect();

    let roots: Vec<(f64, f64)> = if d == 1 {
        vec![(-coeffs[0], 0.0)]
    } else {
        let mut companion = DMatrix::<f64>::zeros(d, d);
        for j in 0..d {
            companion[(0, j)] = -coeffs[j];
        }
        for i in 1..d {
            companion[(i, i - 1)] = 1.0;
        }
        companion.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect()
    };

    let mut values = Vec::with_capacity(d);
    for (re, im) in roots {
        if im.abs() > 1e-6 {
            return Err(Error::InconsistentPurities(format!("complex root {re} + {im}i")));
        }
        let polished = polish_root(&coeffs, re);
        if !(-1e-6..=1.0 + 1e-6).contains(&polished) {
            return Err(Error::InconsistentPurities(format!("root {polished} outside [0, 1]")));
        }
        values.push(polished.clamp(0.0, 1.0));
    }
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > 1e-6 {
        return Err(Error::InconsistentPurities(format!("roots sum to {sum}")));
    }
    for v in values.iter_mut() {
        *v /= sum;
    }
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(Spectrum(values))
}

fn polish_root(coeffs: &[f64], mut x: f64) -> f64 {
    let eval = |x: f64| {
        let mut p = 1.0;
        let mut dp = 0.0;
        for &c in coeffs {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    };
    for _ in 0..4 {
        let (p, dp) = eval(x);
        if dp.abs() < 1e-10 {
            break;
        }
        let next = x - p / dp;
        if (eval(next).0).abs() >= p.abs() {
            break;
        }
        x = next;
    }
    x
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenyiBounds {
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    /// `H1 - H2`.
    pub slack1: f64,
    /// `H1 - (2 H2 - H3)`.
    pub slack2: f64,
    pub bound1_ok: bool,
    pub bound2_ok: bool,
}

/// Checks `H1 ≥ H2` and `H1 ≥ 2 H2 - H3`.
pub fn renyi_bounds_check(rho: &DensityMatrix) -> RenyiBounds {
    let eig = rho.eigenvalues();
    let h1 = spectral_von_neumann(eig);
    let h2 = spectral_entropy(eig, RenyiIndex::Real(2.0));
    let h3 = spectral_entropy(eig, RenyiIndex::Real(3.0));
    let slack1 = h1 - h2;
    let slack2 = h1 - (2.0 * h2 - h3);
    RenyiBounds {
        h1,
        h2,
        h3,
        slack1,
        slack2,
        bound1_ok: slack1 >= -1e-10,
        bound2_ok: slack2 >= -1e-10,
    }
}
