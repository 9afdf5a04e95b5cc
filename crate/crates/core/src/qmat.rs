//! Dense complex matrices: Hermitian operators, density matrices, tensor
//! algebra, partial traces and exact unitary evolution.
//!
//! Everything here is dense. Dimensions stay below a few hundred, so the
//! cubic eigensolver cost is irrelevant next to clarity.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Relative anti-Hermitian residual accepted by [`HermitianOperator::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Allowed deviation of a density matrix trace from one.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues below this are a hard error; between it and [`ZERO_CLAMP`] they are zeroed.
pub const NEGATIVE_EIG_TOL: f64 = 1e-10;
pub const ZERO_CLAMP: f64 = 1e-12;

const EIG_EPS: f64 = 1e-15;
const EIG_MAX_ITER: usize = 10_000;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Which factor of a bipartite space to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn all_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// A square matrix equal to its conjugate transpose.
///
/// The stored matrix is exactly Hermitian: construction symmetrizes away the
/// (tolerated) roundoff residual.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidDimensions(format!(
                "operator must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if !all_finite(&matrix) {
            return Err(Error::InvalidOperator("non-finite entry".into()));
        }
        let adjoint = matrix.adjoint();
        let residual = max_abs(&(&matrix - &adjoint));
        if residual > HERMITIAN_TOL * max_abs(&matrix).max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidOperator(format!(
                "not Hermitian (residual {residual:.3e})"
            )));
        }
        let matrix = (&matrix + adjoint) * c(0.5, 0.0);
        Ok(Self { matrix })
    }

    /// Builds an operator from real entries, row-major.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidDimensions("ragged rows".into()));
        }
        Self::new(ComplexMatrix::from_fn(d, d, |i, j| c(rows[i][j], 0.0)))
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn eig(&self) -> Result<EigenDecomposition> {
        hermitian_eig(self)
    }

    /// `self ⊗ other`, which stays Hermitian.
    pub fn tensor(&self, other: &HermitianOperator) -> HermitianOperator {
        HermitianOperator {
            matrix: tensor_product(&self.matrix, &other.matrix),
        }
    }

    /// `Tr[ρ X]`, real for Hermitian `X`.
    pub fn expectation(&self, rho: &DensityMatrix) -> Result<f64> {
        check_same_dim(self.dim(), rho.dim())?;
        Ok(trace_of_product(rho.matrix(), &self.matrix).re)
    }
}

pub fn pauli_x() -> HermitianOperator {
    HermitianOperator {
        matrix: ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
    }
}

pub fn pauli_y() -> HermitianOperator {
    HermitianOperator {
        matrix: ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
    }
}

pub fn pauli_z() -> HermitianOperator {
    HermitianOperator {
        matrix: ComplexMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]),
    }
}

/// Spectral decomposition `M = U diag(λ) U†` with ascending eigenvalues.
///
/// Each eigenvector is phase-fixed so that its largest-magnitude component is
/// real and positive (first such component on ties), which makes derived
/// states reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U f(diag λ) U†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let d = self.dim();
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for j in 0..d {
            let fj = f(self.eigenvalues[j]);
            for i in 0..d {
                scaled[(i, j)] *= fj;
            }
        }
        scaled * u.adjoint()
    }

    /// Same as [`map`](Self::map) with a complex-valued function.
    pub fn map_complex(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let d = self.dim();
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for j in 0..d {
            let fj = f(self.eigenvalues[j]);
            for i in 0..d {
                scaled[(i, j)] *= fj;
            }
        }
        scaled * u.adjoint()
    }

    /// Expresses `op` in this eigenbasis: `U† op U`.
    pub fn to_eigenbasis(&self, op: &ComplexMatrix) -> ComplexMatrix {
        self.eigenvectors.adjoint() * op * &self.eigenvectors
    }

    pub fn from_eigenbasis(&self, op: &ComplexMatrix) -> ComplexMatrix {
        &self.eigenvectors * op * self.eigenvectors.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| x)
    }
}

pub fn hermitian_eig(h: &HermitianOperator) -> Result<EigenDecomposition> {
    eig_of_hermitian_matrix(h.matrix())
}

const EIG_RESIDUAL_TOL: f64 = 1e-10;
const JACOBI_MAX_SWEEPS: usize = 100;

fn is_accurate(m: &ComplexMatrix, values: &DVector<f64>, vectors: &ComplexMatrix) -> bool {
    if values.iter().any(|x| !x.is_finite()) || vectors.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return false;
    }
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let lam = ComplexMatrix::from_diagonal(&values.map(|x| c(x, 0.0)));
    let residual = m * vectors - vectors * lam;
    residual.iter().all(|z| z.norm() <= EIG_RESIDUAL_TOL * scale)
}

/// Cyclic Jacobi for Hermitian matrices. Slower than QR but immune to
/// exact-zero structure; each rotation first rotates `a_pq` onto the real axis.
fn jacobi_eig(m: &ComplexMatrix) -> Result<(DVector<f64>, ComplexMatrix)> {
    let d = m.nrows();
    let mut a = m.clone();
    let mut v = ComplexMatrix::identity(d, d);
    let total: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..d {
            for q in p + 1..d {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off <= 1e-32 * total || off == 0.0 {
            let values = DVector::from_fn(d, |i, _| a[(i, i)].re);
            return Ok((values, v));
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let e = apq / mag;
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
                let t = if tau >= 0.0 { 1.0 } else { -1.0 } / (tau.abs() + (1.0 + tau * tau).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                let ebar = e.conj();
                for k in 0..d {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * cs - akq * ebar * sn;
                    a[(k, q)] = akp * sn + akq * ebar * cs;
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * cs - vkq * ebar * sn;
                    v[(k, q)] = vkp * sn + vkq * ebar * cs;
                }
                for k in 0..d {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = apk * cs - aqk * e * sn;
                    a[(q, k)] = apk * sn + aqk * e * cs;
                }
                a[(p, q)] = c(0.0, 0.0);
                a[(q, p)] = c(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
            }
        }
    }
    Err(Error::NumericalFailure("Jacobi eigensolver did not converge".into()))
}

fn eig_of_hermitian_matrix(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    let d = m.nrows();
    if d == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: Vec::new(),
            eigenvectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let (raw_values, raw_vectors) = match SymmetricEigen::try_new(m.clone(), EIG_EPS, EIG_MAX_ITER) {
        Some(se) if is_accurate(m, &se.eigenvalues, &se.eigenvectors) => (se.eigenvalues, se.eigenvectors),
        // The QR path can emit NaN on matrices with many exact zeros.
        _ => jacobi_eig(m)?,
    };
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| raw_values[a].total_cmp(&raw_values[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| raw_values[k]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(d, d);
    for (col, &k) in order.iter().enumerate() {
        let v = raw_vectors.column(k);
        let mut pivot = 0;
        let mut best = -1.0;
        for i in 0..d {
            let mag = v[i].norm();
            if mag > best + 1e-14 {
                best = mag;
                pivot = i;
            }
        }
        let phase = if best > 0.0 {
            v[pivot].conj() / best
        } else {
            c(1.0, 0.0)
        };
        for i in 0..d {
            eigenvectors[(i, col)] = v[i] * phase;
        }
        eigenvectors[(pivot, col)].im = 0.0;
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// A positive-semidefinite, unit-trace Hermitian matrix together with its
/// (clamped) spectral decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    eig: EigenDecomposition,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let op = HermitianOperator::new(matrix).map_err(|e| match e {
            Error::InvalidOperator(msg) => Error::InvalidState(msg),
            other => other,
        })?;
        let matrix = op.into_matrix();
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {:.3e} != 1", tr.re)));
        }
        let mut eig = eig_of_hermitian_matrix(&matrix)?;
        for lam in eig.eigenvalues.iter_mut() {
            if *lam < -NEGATIVE_EIG_TOL {
                return Err(Error::InvalidState(format!("negative eigenvalue {lam:.3e}")));
            }
            if *lam <= ZERO_CLAMP {
                *lam = 0.0;
            }
        }
        Ok(Self { matrix, eig })
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) nonzero vector.
    pub fn pure(psi: &ComplexVector) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        let v = psi / c(norm, 0.0);
        Self::new(&v * v.adjoint())
    }

    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        let d = probabilities.len();
        Self::new(ComplexMatrix::from_fn(d, d, |i, j| {
            if i == j {
                c(probabilities[i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        }))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let p = vec![1.0 / dim as f64; dim];
        Self::diagonal(&p).expect("maximally mixed state is valid")
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn eig(&self) -> &EigenDecomposition {
        &self.eig
    }

    /// Clamped eigenvalues, ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig.eigenvalues
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eig.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eig.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// Largest eigenvalue within 1e-10 of one.
    pub fn is_pure(&self) -> bool {
        self.max_eigenvalue() >= 1.0 - 1e-10
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(tensor_product(&self.matrix, &other.matrix))
    }

    pub fn reduce(&self, dim_a: usize, dim_b: usize, keep: Subsystem) -> Result<DensityMatrix> {
        DensityMatrix::new(partial_trace(&self.matrix, dim_a, dim_b, keep)?)
    }
}

fn check_same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::InvalidDimensions(format!("dimension {a} does not match {b}")));
    }
    Ok(())
}

/// Kronecker product with the first factor as the outer block index.
pub fn tensor_product(m1: &ComplexMatrix, m2: &ComplexMatrix) -> ComplexMatrix {
    m1.kronecker(m2)
}

/// Traces out one factor of a `(dim_a·dim_b)`-square matrix.
pub fn partial_trace(m: &ComplexMatrix, dim_a: usize, dim_b: usize, keep: Subsystem) -> Result<ComplexMatrix> {
    let n = dim_a * dim_b;
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::InvalidDimensions(format!(
            "matrix is {}x{}, expected {n}x{n} for {dim_a}x{dim_b}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(match keep {
        Subsystem::A => ComplexMatrix::from_fn(dim_a, dim_a, |i, j| {
            (0..dim_b).map(|k| m[(i * dim_b + k, j * dim_b + k)]).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(dim_b, dim_b, |i, j| {
            (0..dim_a).map(|k| m[(k * dim_b + i, k * dim_b + j)]).sum()
        }),
    })
}

/// `ρ^p` through the spectrum, with `0^p = 0` for `p > 0` and `0^0 = 1`.
pub fn matrix_power(rho: &DensityMatrix, p: f64) -> Result<ComplexMatrix> {
    if !(p >= 0.0) {
        return Err(Error::InvalidArgument(format!("matrix power must be >= 0, got {p}")));
    }
    Ok(rho.eig().map(|lam| clamped_pow(lam, p)))
}

/// Scalar power under the clamp rule used for all spectral sums.
pub fn clamped_pow(lam: f64, p: f64) -> f64 {
    if lam <= ZERO_CLAMP {
        if p == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        lam.powf(p)
    }
}

pub fn commutator(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !x.is_square() || x.shape() != y.shape() {
        return Err(Error::InvalidDimensions(format!(
            "commutator of {:?} and {:?}",
            x.shape(),
            y.shape()
        )));
    }
    Ok(x * y - y * x)
}

/// `Tr[x y]` without forming the product.
pub fn trace_of_product(x: &ComplexMatrix, y: &ComplexMatrix) -> Complex64 {
    let mut acc = c(0.0, 0.0);
    for i in 0..x.nrows() {
        for k in 0..x.ncols() {
            acc += x[(i, k)] * y[(k, i)];
        }
    }
    acc
}

/// Time evolution generated by a fixed Hamiltonian, diagonalized once.
///
/// Uses the convention `ρ(t) = e^{itH} ρ e^{-itH}`.
#[derive(Debug, Clone)]
pub struct Propagator {
    eig: EigenDecomposition,
}

impl Propagator {
    pub fn new(h: &HermitianOperator) -> Result<Self> {
        Ok(Self { eig: h.eig()? })
    }

    pub fn dim(&self) -> usize {
        self.eig.dim()
    }

    /// `e^{itH}`.
    pub fn unitary(&self, t: f64) -> ComplexMatrix {
        self.eig.map_complex(|lam| Complex64::from_polar(1.0, lam * t))
    }

    pub fn evolve_matrix(&self, rho0: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
        check_same_dim(self.dim(), rho0.nrows())?;
        // Work in the eigenbasis of H, where the evolution is a phase filter.
        let in_basis = self.eig.to_eigenbasis(rho0);
        let evals = &self.eig.eigenvalues;
        let filtered = ComplexMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            in_basis[(i, j)] * Complex64::from_polar(1.0, (evals[i] - evals[j]) * t)
        });
        Ok(self.eig.from_eigenbasis(&filtered))
    }

    pub fn evolve(&self, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        DensityMatrix::new(self.evolve_matrix(rho0.matrix(), t)?)
    }

    pub fn evolve_vector(&self, psi: &ComplexVector, t: f64) -> Result<ComplexVector> {
        check_same_dim(self.dim(), psi.len())?;
        let u = &self.eig.eigenvectors;
        let mut coeffs = u.adjoint() * psi;
        for (k, z) in coeffs.iter_mut().enumerate() {
            *z *= Complex64::from_polar(1.0, self.eig.eigenvalues[k] * t);
        }
        Ok(u * coeffs)
    }
}

pub fn evolve(rho0: &DensityMatrix, h: &HermitianOperator, t: f64) -> Result<DensityMatrix> {
    Propagator::new(h)?.evolve(rho0, t)
}

/// Reduced density matrix of a pure multipartite vector.
///
/// `dims` lists the factor dimensions (first factor outermost); `keep` the
/// factors retained, in the order they appear in the result.
pub fn reduce_pure(psi: &ComplexVector, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if psi.len() != total {
        return Err(Error::InvalidDimensions(format!(
            "vector of length {} for factor dims {dims:?}",
            psi.len()
        )));
    }
    if keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::InvalidArgument(format!("keep {keep:?} out of range")));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let kept_dim: usize = keep.iter().map(|&k| dims[k]).product();
    let traced_dim: usize = traced.iter().map(|&k| dims[k]).product();

    let mut strides = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let flat = |group: &[usize], mut idx: usize| -> usize {
        let mut offset = 0;
        for &k in group.iter().rev() {
            offset += (idx % dims[k]) * strides[k];
            idx /= dims[k];
        }
        offset
    };
    let m = ComplexMatrix::from_fn(kept_dim, traced_dim, |r, col| psi[flat(keep, r) + flat(&traced, col)]);
    Ok(&m * m.adjoint())
}
