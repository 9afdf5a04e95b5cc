//! Seeded random states and operators for property checks.
//!
//! Every stream is a ChaCha8 generator keyed by a `u64` seed, so the same seed
//! reproduces the same matrices on any platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::qmat::{c, ComplexMatrix, ComplexVector, DensityMatrix, HermitianOperator};

/// Weight of `I/d` mixed into sampled mixed states to keep them full rank.
pub const FULL_RANK_MIX: f64 = 0.02;

#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn dim(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.random_range(lo..=hi)
    }

    fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn ginibre(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        let entries: Vec<_> = (0..rows * cols).map(|_| c(self.normal(), self.normal())).collect();
        ComplexMatrix::from_vec(rows, cols, entries)
    }

    /// Unit vector drawn uniformly from the complex sphere.
    pub fn pure_vector(&mut self, d: usize) -> ComplexVector {
        let v = ComplexVector::from_vec((0..d).map(|_| c(self.normal(), self.normal())).collect());
        let norm = v.norm();
        v / c(norm, 0.0)
    }

    pub fn pure_state(&mut self, d: usize) -> DensityMatrix {
        DensityMatrix::pure(&self.pure_vector(d)).expect("normalized vector gives a valid state")
    }

    /// `G G† / Tr` from a square Ginibre matrix, lightly mixed with `I/d`.
    pub fn mixed_state(&mut self, d: usize) -> DensityMatrix {
        let g = self.ginibre(d, d);
        let w = &g * g.adjoint();
        let tr = w.trace().re;
        let rho =
            w * c((1.0 - FULL_RANK_MIX) / tr, 0.0) + ComplexMatrix::identity(d, d) * c(FULL_RANK_MIX / d as f64, 0.0);
        DensityMatrix::new(rho).expect("Ginibre construction gives a valid state")
    }

    /// State with the given spectrum in a random basis.
    pub fn state_with_spectrum(&mut self, spectrum: &[f64]) -> DensityMatrix {
        let d = spectrum.len();
        let q = self.ginibre(d, d).qr().q();
        let diag = ComplexMatrix::from_fn(d, d, |i, j| if i == j { c(spectrum[i], 0.0) } else { c(0.0, 0.0) });
        DensityMatrix::new(&q * diag * q.adjoint()).expect("unitary conjugation preserves validity")
    }

    /// Point drawn uniformly from the probability simplex.
    pub fn spectrum(&mut self, d: usize) -> Vec<f64> {
        let raw: Vec<f64> = (0..d).map(|_| self.rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|x| x / total).collect()
    }

    /// Hermitian operator from the GUE, scaled to unit spectral norm.
    pub fn hermitian(&mut self, d: usize) -> HermitianOperator {
        let g = self.ginibre(d, d);
        let h = (&g + g.adjoint()) * c(0.5, 0.0);
        let op = HermitianOperator::new(h).expect("symmetrized matrix is Hermitian");
        let scale = op
            .eig()
            .expect("small Hermitian eigenproblem")
            .eigenvalues
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()));
        HermitianOperator::new(op.matrix() * c(1.0 / scale, 0.0)).expect("scaled Hermitian")
    }
}
