//! Exact evolution: the product-coupling channel in closed form, the full
//! ancilla + system + environment simulation, the detector-qubit closed forms
//! and a truncated-Fock oracle for the field mode.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::onset::{GeneralHamiltonian, ProductHamiltonian};
use crate::qmat::{
    c, pauli_z, reduce_pure, ComplexMatrix, ComplexVector, DensityMatrix, HermitianOperator, Propagator,
};
use crate::renyi::{renyi_entropy, RenyiIndex};

const NORM_TOL: f64 = 1e-10;
const DEGENERATE_GAP: f64 = 1e-12;
/// Largest allowed change in the reduced qubit between `N` and `N + 10` levels.
pub const FOCK_CONVERGENCE_TOL: f64 = 1e-6;
pub const DEFAULT_FOCK_LEVELS: usize = 40;

/// `ρ_A(t)` for `H = Â ⊗ B̂` without building the joint space.
///
/// In the eigenbases of `Â` (values `a_i`) and `B̂` (values `b_k`),
/// `ρ_A(t)_ij = ρ_ij Σ_k p_k e^{i t b_k (a_i - a_j)}` with `p_k` the diagonal
/// of `ρ_B`.
pub fn product_channel_state(
    rho_a: &DensityMatrix,
    rho_b: &DensityMatrix,
    h: &ProductHamiltonian,
    t: f64,
) -> Result<DensityMatrix> {
    if rho_a.dim() != h.op_a.dim() || rho_b.dim() != h.op_b.dim() {
        return Err(Error::InvalidDimensions(
            "states and coupling disagree on dimensions".into(),
        ));
    }
    let eig_a = h.op_a.eig()?;
    let eig_b = h.op_b.eig()?;
    let p: Vec<f64> = {
        let rb = eig_b.to_eigenbasis(rho_b.matrix());
        (0..rb.nrows()).map(|k| rb[(k, k)].re).collect()
    };
    let a = &eig_a.eigenvalues;
    let b = &eig_b.eigenvalues;
    let rho = eig_a.to_eigenbasis(rho_a.matrix());
    let d = rho.nrows();
    let filtered = ComplexMatrix::from_fn(d, d, |i, j| {
        let gap = a[i] - a[j];
        let weight: Complex64 = p
            .iter()
            .zip(b)
            .map(|(pk, bk)| Complex64::from_polar(*pk, t * bk * gap))
            .sum();
        rho[(i, j)] * weight
    });
    DensityMatrix::new(eig_a.from_eigenbasis(&filtered))
}

/// A pure state on `Ã ⊗ A ⊗ B`, with `Ã` outermost.
#[derive(Debug, Clone, PartialEq)]
pub struct TripartiteState {
    dims: (usize, usize, usize),
    vector: ComplexVector,
}

impl TripartiteState {
    pub fn new(dims: (usize, usize, usize), vector: ComplexVector) -> Result<Self> {
        let (d_anc, d_a, d_b) = dims;
        if d_anc != d_a {
            return Err(Error::InvalidDimensions(format!(
                "ancilla dim {d_anc} must equal system dim {d_a}"
            )));
        }
        if vector.len() != d_anc * d_a * d_b {
            return Err(Error::InvalidDimensions(format!(
                "vector of length {} for dims {dims:?}",
                vector.len()
            )));
        }
        if (vector.norm() - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("state norm {} != 1", vector.norm())));
        }
        Ok(Self { dims, vector })
    }

    /// `purify(ρ_A) ⊗ |ψ_B⟩`.
    pub fn from_parts(rho_a: &DensityMatrix, psi_b: &ComplexVector) -> Result<Self> {
        let d_a = rho_a.dim();
        let d_b = psi_b.len();
        let anc_a = purify(rho_a);
        let psi_b = psi_b / c(psi_b.norm(), 0.0);
        let vector = ComplexVector::from_fn(d_a * d_a * d_b, |idx, _| anc_a[idx / d_b] * psi_b[idx % d_b]);
        Self::new((d_a, d_a, d_b), vector)
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn vector(&self) -> &ComplexVector {
        &self.vector
    }

    /// Reduced state on the listed factors (0 = Ã, 1 = A, 2 = B).
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let (x, y, z) = self.dims;
        DensityMatrix::new(reduce_pure(&self.vector, &[x, y, z], keep)?)
    }

    /// Applies `I_Ã ⊗ U_AB(t)`.
    pub fn evolve(&self, propagator: &Propagator, t: f64) -> Result<Self> {
        let (d_anc, d_a, d_b) = self.dims;
        let block = d_a * d_b;
        if propagator.dim() != block {
            return Err(Error::InvalidDimensions(format!(
                "propagator dim {} vs system+environment dim {block}",
                propagator.dim()
            )));
        }
        let mut out = ComplexVector::zeros(self.vector.len());
        for i in 0..d_anc {
            let chunk = self.vector.rows(i * block, block).into_owned();
            out.rows_mut(i * block, block)
                .copy_from(&propagator.evolve_vector(&chunk, t)?);
        }
        Ok(Self {
            dims: self.dims,
            vector: out,
        })
    }
}

/// `Σ_i √λ_i |i⟩_Ã |λ_i⟩_A` on `Ã ⊗ A`, eigenvalues in descending order.
pub fn purify(rho_a: &DensityMatrix) -> ComplexVector {
    let eig = rho_a.eig();
    let d = rho_a.dim();
    let mut psi = ComplexVector::zeros(d * d);
    for (slot, k) in (0..d).rev().enumerate() {
        let w = eig.eigenvalues[k].max(0.0).sqrt();
        for j in 0..d {
            psi[slot * d + j] = eig.eigenvectors[(j, k)] * w;
        }
    }
    psi
}

/// Eigenvector of the largest eigenvalue of a pure state.
pub fn pure_state_vector(rho: &DensityMatrix) -> Result<ComplexVector> {
    if !rho.is_pure() {
        return Err(Error::InvalidArgument(format!(
            "state is not pure (largest eigenvalue {})",
            rho.max_eigenvalue()
        )));
    }
    Ok(rho.eig().eigenvectors.column(rho.dim() - 1).into_owned())
}

/// Entropies of every reduction needed for the coherent informations at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentInfoRecord {
    pub t: f64,
    pub h_a: f64,
    pub h_b: f64,
    pub h_a_anc: f64,
    pub h_b_anc: f64,
    /// `H_n(A') - H_n((AÃ)')`.
    pub direct: f64,
    /// `H_n(B') - H_n((BÃ)')`.
    pub complementary: f64,
    /// Eigenvalues of `ρ_A(t)`, descending.
    pub spectrum_a: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub n: RenyiIndex,
    pub records: Vec<CoherentInfoRecord>,
}

impl TimeSeries {
    pub fn t_grid(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }
}

/// Exact n-coherent informations of the direct and complementary channels.
///
/// `ρ_A` is purified by an ancilla that never interacts; `ρ_B` must be pure.
pub fn coherent_info_timeseries(
    rho_a: &DensityMatrix,
    rho_b: &DensityMatrix,
    h: &GeneralHamiltonian,
    n: RenyiIndex,
    t_grid: &[f64],
) -> Result<TimeSeries> {
    if rho_a.dim() != h.dim_a() || rho_b.dim() != h.dim_b() {
        return Err(Error::InvalidDimensions(
            "states and Hamiltonian disagree on dimensions".into(),
        ));
    }
    let psi_b = pure_state_vector(rho_b)?;
    let initial = TripartiteState::from_parts(rho_a, &psi_b)?;
    let propagator = Propagator::new(&h.to_operator())?;
    let records = t_grid
        .par_iter()
        .map(|&t| {
            let state = initial.evolve(&propagator, t)?;
            let ra = state.reduce(&[1])?;
            let entropy = |keep: &[usize]| -> Result<f64> { Ok(renyi_entropy(&state.reduce(keep)?, n)) };
            let h_a = renyi_entropy(&ra, n);
            let h_b = entropy(&[2])?;
            let h_a_anc = entropy(&[0, 1])?;
            let h_b_anc = entropy(&[0, 2])?;
            Ok(CoherentInfoRecord {
                t,
                h_a,
                h_b,
                h_a_anc,
                h_b_anc,
                direct: h_a - h_a_anc,
                complementary: h_b - h_b_anc,
                spectrum_a: ra.eigenvalues().iter().rev().copied().collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TimeSeries { n, records })
}

/// Detector qubit `[[δ, α], [α*, 1 - δ]]` in the `σ_z` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UdwQubitParams {
    delta: f64,
    alpha: Complex64,
}

impl UdwQubitParams {
    pub fn new(delta: f64, alpha: Complex64) -> Result<Self> {
        if !(0.0..=1.0).contains(&delta) || !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(Error::InvalidState(format!(
                "δ = {delta} outside [0, 1] or non-finite α"
            )));
        }
        if alpha.norm_sqr() > delta - delta * delta + 1e-12 {
            return Err(Error::InvalidState(format!(
                "|α|² = {} exceeds δ - δ² = {}",
                alpha.norm_sqr(),
                delta - delta * delta
            )));
        }
        Ok(Self { delta, alpha })
    }

    /// Real, non-negative `α` with the given `|α|²`.
    pub fn from_alpha2(delta: f64, alpha2: f64) -> Result<Self> {
        if !(alpha2 >= 0.0) {
            return Err(Error::InvalidState(format!("|α|² = {alpha2} is negative")));
        }
        Self::new(delta, c(alpha2.sqrt(), 0.0))
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn alpha2(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    pub fn initial_state(&self) -> Result<DensityMatrix> {
        udw_qubit_state(self, 0.0)
    }
}

/// Qubit state after coupling to the field vacuum for time `t`.
pub fn udw_qubit_state(p: &UdwQubitParams, t: f64) -> Result<DensityMatrix> {
    let off = p.alpha * (-2.0 * t * t).exp();
    DensityMatrix::new(ComplexMatrix::from_row_slice(
        2,
        2,
        &[c(p.delta, 0.0), off, off.conj(), c(1.0 - p.delta, 0.0)],
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UdwEigenRecord {
    pub t: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    /// `(λ̇₊, λ̇₋)`.
    pub d_lambda: (f64, f64),
    /// `(λ̈₊, λ̈₋)`.
    pub dd_lambda: (f64, f64),
}

/// Closed-form eigenvalues of the evolving qubit and their time derivatives.
pub fn udw_eigen(p: &UdwQubitParams, t: f64) -> UdwEigenRecord {
    let a2 = p.alpha2();
    let g = (-4.0 * t * t).exp();
    let mixedness = p.delta - p.delta * p.delta;
    let s = (1.0 - 4.0 * (mixedness - a2 * g)).max(0.0).sqrt();
    let (d, dd) = if s < DEGENERATE_GAP || t == 0.0 {
        let dd0 = if s < DEGENERATE_GAP { 0.0 } else { 8.0 * a2 / s };
        (0.0, -dd0)
    } else {
        let d = -8.0 * a2 * t * g / s;
        let dd = -(8.0 * a2 * g * (1.0 - 8.0 * t * t) / s + 128.0 * a2 * a2 * t * t * g * g / (s * s * s));
        (d, dd)
    };
    UdwEigenRecord {
        t,
        lambda_plus: 0.5 * (1.0 + s),
        lambda_minus: 0.5 * (1.0 - s),
        d_lambda: (d, -d),
        dd_lambda: (dd, -dd),
    }
}

/// `(Ḧ_n, E_n)` for the detector qubit at `t = 0`, from its two eigenvalues.
pub fn udw_closed_forms(p: &UdwQubitParams, n: f64) -> Result<(f64, f64)> {
    if !(n > 1.0 + 1e-9) || !n.is_finite() {
        return Err(Error::InvalidArgument(format!("order must exceed 1, got {n}")));
    }
    let e0 = udw_eigen(p, 0.0);
    let (lp, lm) = (e0.lambda_plus, e0.lambda_minus);
    let a2 = p.alpha2();
    let base = 4.0 * (p.delta - p.delta * p.delta);
    if lp - lm < DEGENERATE_GAP {
        return Ok((0.0, base));
    }
    let ratio = (lm.powf(n - 1.0) - lp.powf(n - 1.0)) / ((lp - lm) * (lm.powf(n) + lp.powf(n)));
    let hdd = -8.0 * n * a2 * ratio / (n - 1.0);
    Ok((hdd, base + 4.0 * a2 * ratio))
}

/// Truncated bosonic mode with `levels` Fock states.
#[derive(Debug, Clone, PartialEq)]
pub struct FockTruncation {
    levels: usize,
    annihilation: ComplexMatrix,
}

impl FockTruncation {
    pub fn new(levels: usize) -> Result<Self> {
        if levels < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 Fock levels, got {levels}"
            )));
        }
        let annihilation = ComplexMatrix::from_fn(levels, levels, |i, j| {
            if j == i + 1 {
                c((j as f64).sqrt(), 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        Ok(Self { levels, annihilation })
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn annihilation(&self) -> &ComplexMatrix {
        &self.annihilation
    }

    /// `a + a†`.
    pub fn quadrature(&self) -> HermitianOperator {
        HermitianOperator::new(&self.annihilation + self.annihilation.adjoint()).expect("a + a† is Hermitian")
    }

    pub fn vacuum(&self) -> DensityMatrix {
        let mut p = vec![0.0; self.levels];
        p[0] = 1.0;
        DensityMatrix::diagonal(&p).expect("vacuum is a valid state")
    }
}

fn fock_propagator(trunc: &FockTruncation) -> Result<Propagator> {
    Propagator::new(&pauli_z().tensor(&trunc.quadrature()))
}

fn fock_reduced(p: &UdwQubitParams, trunc: &FockTruncation, prop: &Propagator, t: f64) -> Result<ComplexMatrix> {
    // Evolve each eigenvector of ρ_q next to the vacuum and mix the reductions.
    let rho_q = p.initial_state()?;
    let eig = rho_q.eig();
    let n = trunc.levels();
    let mut out = ComplexMatrix::zeros(2, 2);
    for (k, &w) in eig.eigenvalues.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let q = eig.eigenvectors.column(k);
        let psi = ComplexVector::from_fn(2 * n, |idx, _| if idx % n == 0 { q[idx / n] } else { c(0.0, 0.0) });
        let evolved = prop.evolve_vector(&psi, t)?;
        out += reduce_pure(&evolved, &[2, n], &[0])? * c(w, 0.0);
    }
    Ok(out)
}

/// Dense evolution of the qubit with the field mode under `σ_z ⊗ (a + a†)`,
/// checked against a run with ten more levels. The propagators depend only on
/// the truncation, so one oracle serves any number of qubit states.
#[derive(Debug, Clone)]
pub struct FockOracle {
    trunc: FockTruncation,
    check: FockTruncation,
    prop: Propagator,
    prop_check: Propagator,
}

impl FockOracle {
    pub fn new(trunc: FockTruncation) -> Result<Self> {
        let check = FockTruncation::new(trunc.levels() + 10)?;
        Ok(Self {
            prop: fock_propagator(&trunc)?,
            prop_check: fock_propagator(&check)?,
            trunc,
            check,
        })
    }

    pub fn levels(&self) -> usize {
        self.trunc.levels()
    }

    pub fn qubit_state(&self, p: &UdwQubitParams, t: f64) -> Result<DensityMatrix> {
        let rho = fock_reduced(p, &self.trunc, &self.prop, t)?;
        let wider = fock_reduced(p, &self.check, &self.prop_check, t)?;
        let gap = (&rho - &wider).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if gap > FOCK_CONVERGENCE_TOL {
            return Err(Error::Truncation(format!(
                "{} vs {} levels differ by {gap:.3e} at t = {t}",
                self.trunc.levels(),
                self.check.levels()
            )));
        }
        DensityMatrix::new(rho)
    }
}

pub fn fock_udw_oracle(p: &UdwQubitParams, trunc: &FockTruncation, t: f64) -> Result<DensityMatrix> {
    FockOracle::new(trunc.clone())?.qubit_state(p, t)
}
