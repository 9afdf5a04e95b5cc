//! Seeded randomized checks of the onset identities against exact evolution.
//!
//! Each driver draws its cases from a [`Sampler`] keyed by the seed, records
//! one row per trial and reports the worst deviation against a fixed tolerance.

use std::fmt;
use std::str::FromStr;

use crate::channels::coherent_info_timeseries;
use crate::error::{Error, Result};
use crate::onset::{
    delta_coherent_info, durability, purity_derivatives_general, renyi_second_derivative, GeneralHamiltonian,
    ProductHamiltonian,
};
use crate::qmat::{partial_trace, DensityMatrix, HermitianOperator, Propagator, Subsystem};
use crate::random::Sampler;
use crate::renyi::{renyi_entropy, spectral_purity, RenyiIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    FreeHamiltonian,
    FirstDerivative,
    DurabilityPositivity,
    TensorExtension,
    ComplementarySymmetry,
}

impl Check {
    pub const ALL: [Check; 5] = [
        Check::FreeHamiltonian,
        Check::FirstDerivative,
        Check::DurabilityPositivity,
        Check::TensorExtension,
        Check::ComplementarySymmetry,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Check::FreeHamiltonian => "free-hamiltonian",
            Check::FirstDerivative => "first-derivative",
            Check::DurabilityPositivity => "durability-positivity",
            Check::TensorExtension => "tensor-extension",
            Check::ComplementarySymmetry => "complementary-symmetry",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown check `{s}`")))
    }
}

/// One measured quantity from one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyRow {
    pub trial: usize,
    pub quantity: &'static str,
    pub n: f64,
    pub value: f64,
    pub tolerance: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub check: Check,
    pub trials: usize,
    pub seed: u64,
    pub rows: Vec<VerifyRow>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.ok)
    }

    /// Largest value of `quantity` across trials.
    pub fn worst(&self, quantity: &str) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.quantity == quantity)
            .map(|r| r.value)
            .fold(None, |m, v| Some(m.map_or(v, |m: f64| m.max(v))))
    }

    fn push(&mut self, trial: usize, quantity: &'static str, n: f64, value: f64, tolerance: f64) {
        self.rows.push(VerifyRow {
            trial,
            quantity,
            n,
            value,
            tolerance,
            ok: value <= tolerance,
        });
    }
}

pub const FIRST_DERIVATIVE_ANALYTIC_TOL: f64 = 1e-12;
pub const FIRST_DERIVATIVE_FD_TOL: f64 = 1e-6;
pub const FIRST_DERIVATIVE_STEP: f64 = 1e-4;
pub const FREE_HAMILTONIAN_TOL: f64 = 1e-10;
pub const DURABILITY_TOL: f64 = 1e-10;
pub const TENSOR_TOL: f64 = 1e-10;
pub const SYMMETRY_TOL: f64 = 1e-9;
pub const DELTA_REL_TOL: f64 = 1e-2;
pub const DELTA_TIME: f64 = 1e-2;

pub fn run_check(check: Check, trials: usize, seed: u64) -> Result<VerifyReport> {
    let mut report = VerifyReport {
        check,
        trials,
        seed,
        rows: Vec::new(),
    };
    let mut s = Sampler::new(seed);
    for trial in 0..trials {
        match check {
            Check::FreeHamiltonian => free_hamiltonian_trial(&mut s, trial, &mut report)?,
            Check::FirstDerivative => first_derivative_trial(&mut s, trial, &mut report)?,
            Check::DurabilityPositivity => durability_trial(&mut s, trial, &mut report)?,
            Check::TensorExtension => tensor_trial(&mut s, trial, &mut report)?,
            Check::ComplementarySymmetry => symmetry_trial(&mut s, trial, &mut report)?,
        }
    }
    Ok(report)
}

/// Random `Σ_j Â_j ⊗ B̂_j` with 1 to `max_terms` terms.
pub fn random_hamiltonian(s: &mut Sampler, da: usize, db: usize, max_terms: usize) -> GeneralHamiltonian {
    let terms = s.dim(1, max_terms);
    GeneralHamiltonian::new((0..terms).map(|_| (s.hermitian(da), s.hermitian(db))).collect())
        .expect("consistent dimensions")
}

fn free_hamiltonian_trial(s: &mut Sampler, trial: usize, report: &mut VerifyReport) -> Result<()> {
    let (da, db) = (s.dim(2, 4), s.dim(2, 4));
    let rho_a = s.mixed_state(da);
    let rho_b = s.mixed_state(db);
    let h = random_hamiltonian(s, da, db, 3);
    let mut with_free = h.clone();
    with_free.push(s.hermitian(da), HermitianOperator::identity(db))?;
    with_free.push(HermitianOperator::identity(da), s.hermitian(db))?;
    for n in [2u32, 3] {
        for which in [Subsystem::A, Subsystem::B] {
            let base = purity_derivatives_general(&rho_a, &rho_b, &h, n, which)?.second;
            let free = purity_derivatives_general(&rho_a, &rho_b, &with_free, n, which)?.second;
            report.push(
                trial,
                "abs_change",
                f64::from(n),
                (base - free).abs(),
                FREE_HAMILTONIAN_TOL,
            );
        }
    }
    Ok(())
}

/// `γ_n` of the reduced state of `which` after exact evolution for time `t`.
pub fn evolved_purity(
    rho_a: &DensityMatrix,
    rho_b: &DensityMatrix,
    prop: &Propagator,
    n: f64,
    t: f64,
    which: Subsystem,
) -> Result<f64> {
    let joint = rho_a.tensor(rho_b)?;
    let evolved = prop.evolve_matrix(joint.matrix(), t)?;
    let reduced = DensityMatrix::new(partial_trace(&evolved, rho_a.dim(), rho_b.dim(), which)?)?;
    Ok(spectral_purity(reduced.eigenvalues(), n))
}

fn first_derivative_trial(s: &mut Sampler, trial: usize, report: &mut VerifyReport) -> Result<()> {
    let (da, db) = (s.dim(2, 4), s.dim(2, 4));
    let rho_a = s.mixed_state(da);
    let rho_b = s.mixed_state(db);
    let h = random_hamiltonian(s, da, db, 3);
    let prop = Propagator::new(&h.to_operator())?;
    let step = FIRST_DERIVATIVE_STEP;
    for n in [2u32, 3] {
        let nf = f64::from(n);
        let analytic = purity_derivatives_general(&rho_a, &rho_b, &h, n, Subsystem::A)?.first;
        report.push(trial, "analytic", nf, analytic.abs(), FIRST_DERIVATIVE_ANALYTIC_TOL);
        let up = evolved_purity(&rho_a, &rho_b, &prop, nf, step, Subsystem::A)?;
        let down = evolved_purity(&rho_a, &rho_b, &prop, nf, -step, Subsystem::A)?;
        report.push(
            trial,
            "finite_difference",
            nf,
            ((up - down) / (2.0 * step)).abs(),
            FIRST_DERIVATIVE_FD_TOL,
        );
    }
    Ok(())
}

fn durability_trial(s: &mut Sampler, trial: usize, report: &mut VerifyReport) -> Result<()> {
    let d = s.dim(2, 5);
    // Mix full-rank and rank-deficient states.
    let rank = s.dim(1, d);
    let mut spectrum = s.spectrum(rank);
    spectrum.resize(d, 0.0);
    let rho = s.state_with_spectrum(&spectrum);
    let a = s.hermitian(d);
    for n in 1..=6 {
        let nf = f64::from(n);
        let dur = durability(&rho, &a, nf)?;
        report.push(trial, "negative_part", nf, (-dur).max(0.0), DURABILITY_TOL);
    }
    Ok(())
}

fn tensor_trial(s: &mut Sampler, trial: usize, report: &mut VerifyReport) -> Result<()> {
    let (d1, d2) = (s.dim(2, 3), s.dim(2, 3));
    let rho1 = s.mixed_state(d1);
    let rho2 = s.mixed_state(d2);
    let a1 = s.hermitian(d1);
    let joint = rho1.tensor(&rho2)?;
    let extended = a1.tensor(&HermitianOperator::identity(d2));
    for n in [2.0, 3.0, 4.0] {
        let diff = (durability(&joint, &extended, n)? - durability(&rho1, &a1, n)?).abs();
        report.push(trial, "abs_difference", n, diff, TENSOR_TOL);
    }
    Ok(())
}

fn symmetry_trial(s: &mut Sampler, trial: usize, report: &mut VerifyReport) -> Result<()> {
    let (da, db) = (s.dim(2, 3), s.dim(2, 3));
    let rho_a = s.mixed_state(da);
    let rho_b = s.pure_state(db);
    let h = ProductHamiltonian::new(s.hermitian(da), s.hermitian(db));
    let n = 2.0;
    let index = RenyiIndex::real(n)?;
    let series = coherent_info_timeseries(
        &rho_a,
        &rho_b,
        &h.clone().into(),
        index,
        &[0.0, DELTA_TIME, 0.1, 0.5, 1.0],
    )?;
    let worst = series
        .records
        .iter()
        .map(|r| (r.h_a - r.h_b_anc).abs().max((r.direct + r.complementary).abs()))
        .fold(0.0, f64::max);
    report.push(trial, "symmetry_gap", n, worst, SYMMETRY_TOL);

    let exact = series.records[1].direct - series.records[0].direct;
    let predicted = delta_coherent_info(&rho_a, &rho_b, &h, n, DELTA_TIME)?;
    report.push(
        trial,
        "delta_rel_error",
        n,
        ((exact - predicted) / predicted).abs(),
        DELTA_REL_TOL,
    );
    Ok(())
}

/// Second central difference of `H_n(ρ_A(t))` at `t = 0` under exact evolution.
pub fn exact_renyi_second_difference(
    rho_a: &DensityMatrix,
    rho_b: &DensityMatrix,
    h: &ProductHamiltonian,
    n: f64,
    step: f64,
) -> Result<f64> {
    let prop = Propagator::new(&h.to_operator())?;
    let index = RenyiIndex::real(n)?;
    let entropy = |t: f64| -> Result<f64> {
        let joint = rho_a.tensor(rho_b)?;
        let evolved = prop.evolve_matrix(joint.matrix(), t)?;
        let reduced = DensityMatrix::new(partial_trace(&evolved, rho_a.dim(), rho_b.dim(), Subsystem::A)?)?;
        Ok(renyi_entropy(&reduced, index))
    };
    let (up, mid, down) = (entropy(step)?, entropy(0.0)?, entropy(-step)?);
    Ok((up - 2.0 * mid + down) / (step * step))
}

/// Relative gap between the perturbative `Ḧ_n` and its exact finite difference.
pub fn perturbative_vs_exact(
    rho_a: &DensityMatrix,
    rho_b: &DensityMatrix,
    h: &ProductHamiltonian,
    n: f64,
    step: f64,
) -> Result<f64> {
    let predicted = renyi_second_derivative(rho_a, rho_b, h, n)?;
    let exact = exact_renyi_second_difference(rho_a, rho_b, h, n, step)?;
    Ok(((exact - predicted) / predicted).abs())
}
