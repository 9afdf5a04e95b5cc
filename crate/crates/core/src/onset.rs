//! Leading-order response of Rényi entropies at the onset of an interaction.
//!
//! For an initial product state `ρ_A ⊗ ρ_B` evolving under `H = Â ⊗ B̂`, the
//! first time derivative of every n-purity vanishes at `t = 0` and the second
//! derivative of `H_n(A)` is `2n (ΔB)² D_{n,A} / (n - 1)`, where
//!
//! ```text
//! D_{n,A} = -Tr[ρ^{n-1} [Â, ρ] Â] / γ_n = -Σ_ij λ_j^{n-1} (λ_i - λ_j) |a_ij|² / γ_n
//! ```
//!
//! is the n-durability and `a_ij = ⟨λ_i|Â|λ_j⟩`. The n-exposure
//! `E_{n,A} = (ΔA)² - D_{n,A}` then fixes the t² change of the n-coherent
//! information when `B` starts pure. All spectral sums use `0^p = 0` for
//! `p > 0` and `0^0 = 1`.

use crate::error::{Error, Result};
use crate::qmat::{
    c, clamped_pow, commutator, matrix_power, trace_of_product, ComplexMatrix, DensityMatrix, HermitianOperator,
    Subsystem,
};
use crate::renyi::{spectral_purity, RenyiIndex};

/// Minimum eigenvalue for the analytic `n → 1` formula.
pub const RANK_TOL: f64 = 1e-8;
const PURITY_UNDERFLOW: f64 = 1e-300;

/// Interaction `Â ⊗ B̂`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductHamiltonian {
    pub op_a: HermitianOperator,
    pub op_b: HermitianOperator,
}

impl ProductHamiltonian {
    pub fn new(op_a: HermitianOperator, op_b: HermitianOperator) -> Self {
        Self { op_a, op_b }
    }

    pub fn to_operator(&self) -> HermitianOperator {
        self.op_a.tensor(&self.op_b)
    }
}

/// `Σ_j Â_j ⊗ B̂_j`, which includes free terms `Â ⊗ I` and `I ⊗ B̂`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralHamiltonian {
    terms: Vec<(HermitianOperator, HermitianOperator)>,
}

impl GeneralHamiltonian {
    pub fn new(terms: Vec<(HermitianOperator, HermitianOperator)>) -> Result<Self> {
        let Some((a0, b0)) = terms.first() else {
            return Err(Error::InvalidArgument("Hamiltonian needs at least one term".into()));
        };
        let (da, db) = (a0.dim(), b0.dim());
        if terms.iter().any(|(a, b)| a.dim() != da || b.dim() != db) {
            return Err(Error::InvalidDimensions(
                "Hamiltonian terms disagree on factor dimensions".into(),
            ));
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[(HermitianOperator, HermitianOperator)] {
        &self.terms
    }

    pub fn dim_a(&self) -> usize {
        self.terms[0].0.dim()
    }

    pub fn dim_b(&self) -> usize {
        self.terms[0].1.dim()
    }

    pub fn push(&mut self, op_a: HermitianOperator, op_b: HermitianOperator) -> Result<()> {
        if op_a.dim() != self.dim_a() || op_b.dim() != self.dim_b() {
            return Err(Error::InvalidDimensions(
                "term does not match Hamiltonian dimensions".into(),
            ));
        }
        self.terms.push((op_a, op_b));
        Ok(())
    }

    pub fn to_operator(&self) -> HermitianOperator {
        let d = self.dim_a() * self.dim_b();
        let mut m = ComplexMatrix::zeros(d, d);
        for (a, b) in &self.terms {
            m += a.tensor(b).matrix();
        }
        HermitianOperator::new(m).expect("sum of Hermitian tensor products is Hermitian")
    }
}

impl From<ProductHamiltonian> for GeneralHamiltonian {
    fn from(h: ProductHamiltonian) -> Self {
        Self {
            terms: vec![(h.op_a, h.op_b)],
        }
    }
}

/// All onset quantities for one `(ρ_A, ρ_B, Â ⊗ B̂, n)` configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct OnsetReport {
    pub n: RenyiIndex,
    pub variance_a: f64,
    pub variance_b: f64,
    pub durability_a: f64,
    pub exposure_a: f64,
    /// Second time derivative of `H_n(A)` at `t = 0`.
    pub hdd_a: f64,
    /// `δI_n^d / t²`; only defined when `ρ_B` is pure.
    pub delta_coefficient: Option<f64>,
    /// `a_ij = ⟨λ_i|Â|λ_j⟩` in the eigenbasis of `ρ_A` (ascending eigenvalues).
    pub op_in_eigenbasis: ComplexMatrix,
}

fn check_dims(rho: &DensityMatrix, a: &HermitianOperator) -> Result<()> {
    if rho.dim() != a.dim() {
        return Err(Error::InvalidDimensions(format!(
            "state has dim {}, operator dim {}",
            rho.dim(),
            a.dim()
        )));
    }
    Ok(())
}

/// `Tr[ρ A²] - Tr[ρ A]²`.
pub fn variance(rho: &DensityMatrix, a: &HermitianOperator) -> Result<f64> {
    check_dims(rho, a)?;
    let mean = trace_of_product(rho.matrix(), a.matrix()).re;
    let a2 = a.matrix() * a.matrix();
    let second = trace_of_product(rho.matrix(), &a2).re;
    Ok((second - mean * mean).max(0.0))
}

/// `Σ_ij λ_j^p (λ_i - λ_j) |a_ij|²`, i.e. `Tr[ρ^p [Â, ρ] Â]` evaluated in the
/// eigenbasis of `ρ`.
pub fn spectral_trace_term(eigenvalues: &[f64], op_in_eigenbasis: &ComplexMatrix, p: f64) -> f64 {
    let d = eigenvalues.len();
    let mut acc = 0.0;
    for j in 0..d {
        let wj = clamped_pow(eigenvalues[j], p);
        if wj == 0.0 {
            continue;
        }
        for i in 0..d {
            if i != j {
                acc += wj * (eigenvalues[i] - eigenvalues[j]) * op_in_eigenbasis[(i, j)].norm_sqr();
            }
        }
    }
    acc
}

fn check_durability_order(n: f64) -> Result<()> {
    if !(n >= 1.0) || !n.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "durability order must be >= 1, got {n}"
        )));
    }
    Ok(())
}

/// The n-durability `D_{n,A}`.
pub fn durability(rho: &DensityMatrix, a: &HermitianOperator, n: f64) -> Result<f64> {
    check_dims(rho, a)?;
    check_durability_order(n)?;
    let eig = rho.eig();
    let a_eig = eig.to_eigenbasis(a.matrix());
    let gamma = spectral_purity(&eig.eigenvalues, n);
    if gamma < PURITY_UNDERFLOW {
        return Err(Error::NumericalFailure(format!("n-purity underflow ({gamma:e})")));
    }
    Ok(-spectral_trace_term(&eig.eigenvalues, &a_eig, n - 1.0) / gamma)
}

/// The n-exposure `E_{n,A} = (ΔA)² - D_{n,A}`. Can be negative for `d > 2`.
pub fn exposure(rho: &DensityMatrix, a: &HermitianOperator, n: f64) -> Result<f64> {
    Ok(variance(rho, a)? - durability(rho, a, n)?)
}

fn check_strict_order(n: f64) -> Result<()> {
    if !(n > 1.0 + 1e-9) || !n.is_finite() {
        return Err(Error::InvalidArgument(format!("order must exceed 1, got {n}")));
    }
    Ok(())
}

/// `Ḧ_n(A)` at `t = 0` for `H = Â ⊗ B̂`.
pub fn renyi_second_derivative(
    rho_a: &DensityMatrix,
    rho_b: &DensityMatrix,
    h: &ProductHamiltonian,
    n: f64,
) -> Result<f64> {
    check_strict_order(n)?;
    let var_b = variance(rho_b, &h.op_b)?;
    let d = durability(rho_a, &h.op_a, n)?;
    Ok(2.0 * n * var_b * d / (n - 1.0))
}

/// Leading-order change `δI_n^d` of the direct-channel n-coherent information.
///
/// Requires `ρ_B` pure; there `D_{n,B} = (ΔB)²` and the change reduces to
/// `-(n t² / (n - 1)) (ΔB)² E_{n,A}`.
pub fn delta_coherent_info(
    rho_a: &DensityMatrix,
    rho_b: &DensityMatrix,
    h: &ProductHamiltonian,
    n: f64,
    t: f64,
) -> Result<f64> {
    check_strict_order(n)?;
    if !rho_b.is_pure() {
        return Err(Error::InvalidArgument(format!(
            "environment state must be pure (largest eigenvalue {})",
            rho_b.max_eigenvalue()
        )));
    }
    let var_b = variance(rho_b, &h.op_b)?;
    let e = exposure(rho_a, &h.op_a, n)?;
    Ok(-(n * t * t / (n - 1.0)) * var_b * e)
}

pub fn onset_report(
    rho_a: &DensityMatrix,
    rho_b: &DensityMatrix,
    h: &ProductHamiltonian,
    n: f64,
) -> Result<OnsetReport> {
    let index = RenyiIndex::real(n)?;
    check_strict_order(n)?;
    let variance_a = variance(rho_a, &h.op_a)?;
    let variance_b = variance(rho_b, &h.op_b)?;
    let durability_a = durability(rho_a, &h.op_a, n)?;
    let exposure_a = variance_a - durability_a;
    let hdd_a = 2.0 * n * variance_b * durability_a / (n - 1.0);
    let delta_coefficient = rho_b.is_pure().then(|| -(n / (n - 1.0)) * variance_b * exposure_a);
    Ok(OnsetReport {
        n: index,
        variance_a,
        variance_b,
        durability_a,
        exposure_a,
        hdd_a,
        delta_coefficient,
        op_in_eigenbasis: rho_a.eig().to_eigenbasis(h.op_a.matrix()),
    })
}

/// First and second time derivatives of an integer n-purity at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurityDerivatives {
    pub first: f64,
    pub second: f64,
}

/// `γ̇_n(0)` and `γ̈_n(0)` of subsystem `which` for a general Hamiltonian.
///
/// With `ρ` and `O_j` on the observed subsystem and `X_j` on the other one,
///
/// ```text
/// γ̇ = i n Σ_j Tr[X_j ρ_X] Tr[ρ^{n-1} [O_j, ρ]]
/// γ̈ = -2n Σ_jk ( Tr[X_j ρ_X] Tr[X_k ρ_X] Tr[ρ^{n-1} [O_j, ρ] O_k]
///              + Tr[X_j X_k ρ_X]     Tr[ρ^{n-1} [ρ O_j, O_k]] )
/// ```
pub fn purity_derivatives_general(
    rho_a: &DensityMatrix,
    rho_b: &DensityMatrix,
    h: &GeneralHamiltonian,
    n: u32,
    which: Subsystem,
) -> Result<PurityDerivatives> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("integer order must be >= 2, got {n}")));
    }
    if rho_a.dim() != h.dim_a() || rho_b.dim() != h.dim_b() {
        return Err(Error::InvalidDimensions(format!(
            "states are {}x{}, Hamiltonian is {}x{}",
            rho_a.dim(),
            rho_b.dim(),
            h.dim_a(),
            h.dim_b()
        )));
    }
    let (rho, rho_other) = match which {
        Subsystem::A => (rho_a, rho_b),
        Subsystem::B => (rho_b, rho_a),
    };
    let pick = |term: &(HermitianOperator, HermitianOperator)| -> (ComplexMatrix, ComplexMatrix) {
        match which {
            Subsystem::A => (term.0.matrix().clone(), term.1.matrix().clone()),
            Subsystem::B => (term.1.matrix().clone(), term.0.matrix().clone()),
        }
    };
    let ops: Vec<(ComplexMatrix, ComplexMatrix)> = h.terms().iter().map(pick).collect();

    let n_f = f64::from(n);
    let rho_m = rho.matrix();
    let rho_pow = matrix_power(rho, n_f - 1.0)?;
    let means: Vec<f64> = ops
        .iter()
        .map(|(_, x)| trace_of_product(rho_other.matrix(), x).re)
        .collect();
    let comms: Vec<ComplexMatrix> = ops.iter().map(|(o, _)| commutator(o, rho_m)).collect::<Result<_>>()?;

    let mut first = c(0.0, 0.0);
    for (j, comm) in comms.iter().enumerate() {
        first += trace_of_product(&rho_pow, comm) * means[j];
    }
    let first = (first * c(0.0, n_f)).re;

    let mut second = 0.0;
    for (j, (o_j, x_j)) in ops.iter().enumerate() {
        let rho_o_j = rho_m * o_j;
        let left = &rho_pow * &comms[j];
        for (k, (o_k, x_k)) in ops.iter().enumerate() {
            let xx = x_j * x_k;
            let cross = trace_of_product(rho_other.matrix(), &xx).re;
            let t1 = trace_of_product(&left, o_k).re;
            let t2 = trace_of_product(&rho_pow, &commutator(&rho_o_j, o_k)?).re;
            second += means[j] * means[k] * t1 + cross * t2;
        }
    }
    Ok(PurityDerivatives {
        first,
        second: -2.0 * n_f * second,
    })
}

/// `Ḧ_{1+ε}(A)` at `t = 0`, the regularized approach to the von Neumann limit.
pub fn epsilon_second_derivative(
    rho_a: &DensityMatrix,
    variance_b: f64,
    a: &HermitianOperator,
    eps: f64,
) -> Result<f64> {
    check_dims(rho_a, a)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("ε must lie in (0, 1), got {eps}")));
    }
    let eig = rho_a.eig();
    let a_eig = eig.to_eigenbasis(a.matrix());
    let gamma = spectral_purity(&eig.eigenvalues, 1.0 + eps);
    if gamma < PURITY_UNDERFLOW {
        return Err(Error::NumericalFailure(format!("(1+ε)-purity underflow ({gamma:e})")));
    }
    let trace = spectral_trace_term(&eig.eigenvalues, &a_eig, eps);
    Ok(-2.0 * (1.0 + eps) * variance_b * trace / (eps * gamma))
}

/// Second derivative of the von Neumann entropy at `t = 0`,
/// `-2 (ΔB)² Σ_ij ln(λ_j) (λ_i - λ_j) |a_ij|²`. Full-rank states only.
pub fn vn_second_derivative_fullrank(rho: &DensityMatrix, a: &HermitianOperator, variance_b: f64) -> Result<f64> {
    check_dims(rho, a)?;
    if rho.min_eigenvalue() < RANK_TOL {
        return Err(Error::RankDeficient(format!(
            "smallest eigenvalue {:e} below {RANK_TOL:e}",
            rho.min_eigenvalue()
        )));
    }
    let eig = rho.eig();
    let a_eig = eig.to_eigenbasis(a.matrix());
    let lam = &eig.eigenvalues;
    let mut acc = 0.0;
    for j in 0..lam.len() {
        let log_j = lam[j].ln();
        for i in 0..lam.len() {
            acc += log_j * (lam[i] - lam[j]) * a_eig[(i, j)].norm_sqr();
        }
    }
    Ok(-2.0 * variance_b * acc)
}

/// One row of a trace-term table.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceTermRow {
    /// Diagonal of the state, positionally matched to the operator basis.
    pub eigenvalues: Vec<f64>,
    pub lambda_min: f64,
    pub eps: f64,
    /// `Σ λ_j^ε (λ_i - λ_j) |a_ij|²`.
    pub raw: f64,
    /// `(1 + ε)/ε · raw`.
    pub regularized: f64,
}

/// Tabulates the ε-trace term over a family of diagonal states.
///
/// `op` is given in the basis where the state is diagonal; without one every
/// `|a_ij|` is 1. Rows are ordered family-major, ε-minor.
pub fn trace_term_scan(
    family: &[Vec<f64>],
    eps_grid: &[f64],
    op: Option<&HermitianOperator>,
) -> Result<Vec<TraceTermRow>> {
    let mut rows = Vec::with_capacity(family.len() * eps_grid.len());
    for lambdas in family {
        let d = lambdas.len();
        let sum: f64 = lambdas.iter().sum();
        if lambdas.iter().any(|l| !(*l >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidState(format!("not a spectrum: {lambdas:?}")));
        }
        let a = match op {
            Some(op) if op.dim() != d => {
                return Err(Error::InvalidDimensions(format!(
                    "operator dim {} vs spectrum {d}",
                    op.dim()
                )))
            }
            Some(op) => op.matrix().clone(),
            None => ComplexMatrix::from_element(d, d, c(1.0, 0.0)),
        };
        let lambda_min = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
        for &eps in eps_grid {
            if !(eps > 0.0) {
                return Err(Error::InvalidArgument(format!("ε must be positive, got {eps}")));
            }
            let raw = spectral_trace_term(lambdas, &a, eps);
            rows.push(TraceTermRow {
                eigenvalues: lambdas.clone(),
                lambda_min,
                eps,
                raw,
                regularized: (1.0 + eps) / eps * raw,
            });
        }
    }
    Ok(rows)
}

/// Qutrit slice `(0.5, λ1, 0.5 - λ1)` over `λ1 ∈ [0, 0.5]`.
pub fn qutrit_eigenvalue_slice(points: usize) -> Vec<Vec<f64>> {
    let steps = points.max(2) - 1;
    (0..=steps)
        .map(|k| {
            let l1 = 0.5 * k as f64 / steps as f64;
            vec![0.5, l1, 0.5 - l1]
        })
        .collect()
}

/// The asymmetric real test coupling used for the qutrit slice.
pub fn test_coupling() -> HermitianOperator {
    HermitianOperator::from_real_rows(&[&[0.2, 0.1, 0.5], &[0.1, 0.3, 0.5], &[0.5, 0.5, 0.5]]).expect("symmetric")
}
