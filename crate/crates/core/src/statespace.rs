//! Low-dimensional state families and scans over them.
//!
//! Qubits are written as `[[δ, α], [α*, 1 - δ]]` in the `σ_z` basis. The
//! qutrit family has equal populations and purely imaginary coherences set
//! by a real vector `a`, which must lie in the ball `|a| ≤ 2/3`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::onset::exposure;
use crate::qmat::{c, pauli_z, ComplexMatrix, DensityMatrix, HermitianOperator};
use crate::renyi::{renyi_entropy, spectral_entropy, RenyiIndex};

pub const QUTRIT_RADIUS2: f64 = 4.0 / 9.0;
const POSITIVITY_SLACK: f64 = 1e-12;
pub const BISECTION_TOL: f64 = 1e-12;
pub const BISECTION_MAX_ITER: usize = 200;
pub const ISOCURVE_POINTS: usize = 1001;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QubitParams {
    Amplitudes { delta: f64, alpha: num_complex::Complex64 },
    Bloch { a_x: f64, a_y: f64, a_z: f64 },
}

impl QubitParams {
    /// `(δ, α)` for either representation.
    pub fn amplitudes(&self) -> (f64, num_complex::Complex64) {
        match *self {
            QubitParams::Amplitudes { delta, alpha } => (delta, alpha),
            QubitParams::Bloch { a_x, a_y, a_z } => (0.5 * (1.0 + a_z), c(0.5 * a_x, -0.5 * a_y)),
        }
    }

    pub fn bloch(&self) -> [f64; 3] {
        match *self {
            QubitParams::Bloch { a_x, a_y, a_z } => [a_x, a_y, a_z],
            QubitParams::Amplitudes { delta, alpha } => [2.0 * alpha.re, -2.0 * alpha.im, 2.0 * delta - 1.0],
        }
    }
}

pub fn qubit_state(p: &QubitParams) -> Result<DensityMatrix> {
    let (delta, alpha) = p.amplitudes();
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidState(format!("δ = {delta} outside [0, 1]")));
    }
    if alpha.norm_sqr() > delta - delta * delta + POSITIVITY_SLACK {
        return Err(Error::InvalidState(format!(
            "|α|² = {} exceeds δ - δ² = {}",
            alpha.norm_sqr(),
            delta - delta * delta
        )));
    }
    DensityMatrix::new(ComplexMatrix::from_row_slice(
        2,
        2,
        &[c(delta, 0.0), alpha, alpha.conj(), c(1.0 - delta, 0.0)],
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QutritParams {
    pub a: [f64; 3],
}

impl QutritParams {
    pub fn new(a_x: f64, a_y: f64, a_z: f64) -> Self {
        Self { a: [a_x, a_y, a_z] }
    }

    pub fn radius2(&self) -> f64 {
        self.a.iter().map(|x| x * x).sum()
    }

    pub fn is_admissible(&self) -> bool {
        self.radius2() <= QUTRIT_RADIUS2 + POSITIVITY_SLACK
    }
}

/// Eigenvalues are `1/3` and `1/3 ± |a|/2`.
pub fn qutrit_state(p: &QutritParams) -> Result<DensityMatrix> {
    if !p.is_admissible() {
        return Err(Error::InvalidState(format!("|a|² = {} exceeds 4/9", p.radius2())));
    }
    let [ax, ay, az] = p.a;
    let third = c(1.0 / 3.0, 0.0);
    DensityMatrix::new(ComplexMatrix::from_row_slice(
        3,
        3,
        &[
            third,
            c(0.0, -0.5 * az),
            c(0.0, -0.5 * ay),
            c(0.0, 0.5 * az),
            third,
            c(0.0, -0.5 * ax),
            c(0.0, 0.5 * ay),
            c(0.0, 0.5 * ax),
            third,
        ],
    ))
}

pub fn spin_x() -> HermitianOperator {
    let z = c(0., 0.);
    HermitianOperator::new(ComplexMatrix::from_row_slice(
        3,
        3,
        &[z, z, z, z, z, c(0., -1.), z, c(0., 1.), z],
    ))
    .expect("Hermitian")
}

pub fn spin_y() -> HermitianOperator {
    let z = c(0., 0.);
    HermitianOperator::new(ComplexMatrix::from_row_slice(
        3,
        3,
        &[z, z, c(0., 1.), z, z, z, c(0., -1.), z, z],
    ))
    .expect("Hermitian")
}

pub fn spin_z() -> HermitianOperator {
    let z = c(0., 0.);
    HermitianOperator::new(ComplexMatrix::from_row_slice(
        3,
        3,
        &[z, c(0., -1.), z, c(0., 1.), z, z, z, z, z],
    ))
    .expect("Hermitian")
}

/// The three spin-1 generators `[S_x, S_y, S_z]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinOps {
    pub s: [HermitianOperator; 3],
}

impl Default for SpinOps {
    fn default() -> Self {
        Self {
            s: [spin_x(), spin_y(), spin_z()],
        }
    }
}

impl SpinOps {
    /// Evaluates an expression such as `SySz+SzSy`, `Sx^2` or `0.5*Sx - 2 I`.
    pub fn parse(&self, expr: &str) -> Result<HermitianOperator> {
        spin1_operator_with(self, expr)
    }
}

pub fn spin1_operator(expr: &str) -> Result<HermitianOperator> {
    SpinOps::default().parse(expr)
}

fn spin1_operator_with(ops: &SpinOps, expr: &str) -> Result<HermitianOperator> {
    let src: Vec<char> = expr.chars().filter(|ch| !ch.is_whitespace()).collect();
    if src.is_empty() {
        return Err(Error::InvalidOperator("empty operator expression".into()));
    }
    let bad = |msg: &str| Error::InvalidOperator(format!("{msg} in `{expr}`"));
    let mut total = ComplexMatrix::zeros(3, 3);
    let mut pos = 0;
    while pos < src.len() {
        let mut sign = 1.0;
        while pos < src.len() && (src[pos] == '+' || src[pos] == '-') {
            if src[pos] == '-' {
                sign = -sign;
            }
            pos += 1;
        }
        let start = pos;
        while pos < src.len() && (src[pos].is_ascii_digit() || src[pos] == '.' || src[pos] == 'e' && pos > start) {
            pos += 1;
        }
        let coeff = if pos > start {
            let text: String = src[start..pos].iter().collect();
            let v: f64 = text.parse().map_err(|_| bad("bad coefficient"))?;
            if pos < src.len() && src[pos] == '*' {
                pos += 1;
            }
            v
        } else {
            1.0
        };
        let mut term = ComplexMatrix::identity(3, 3);
        let mut factors = 0;
        while pos < src.len() && src[pos] != '+' && src[pos] != '-' {
            if src[pos] == '*' {
                pos += 1;
                continue;
            }
            let factor = match src[pos] {
                'I' => {
                    pos += 1;
                    ComplexMatrix::identity(3, 3)
                }
                'S' if pos + 1 < src.len() => {
                    let k = match src[pos + 1] {
                        'x' => 0,
                        'y' => 1,
                        'z' => 2,
                        _ => return Err(bad("unknown spin component")),
                    };
                    pos += 2;
                    ops.s[k].matrix().clone()
                }
                _ => return Err(bad("unexpected symbol")),
            };
            let mut power = 1u32;
            if pos < src.len() && src[pos] == '^' {
                pos += 1;
                let start = pos;
                while pos < src.len() && src[pos].is_ascii_digit() {
                    pos += 1;
                }
                let text: String = src[start..pos].iter().collect();
                power = text.parse().map_err(|_| bad("bad exponent"))?;
            }
            for _ in 0..power {
                term = &term * &factor;
            }
            factors += 1;
        }
        if factors == 0 && pos == start {
            return Err(bad("dangling operator"));
        }
        total += term * c(sign * coeff, 0.0);
    }
    HermitianOperator::new(total)
}

/// Evenly spaced axis, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(start: f64, stop: f64, points: usize) -> Self {
        Self { start, stop, points }
    }

    pub fn value(&self, k: usize) -> f64 {
        if self.points <= 1 {
            return self.start;
        }
        if k + 1 == self.points {
            return self.stop;
        }
        self.start + (self.stop - self.start) * k as f64 / (self.points - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.value(k)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// Coordinates `(δ, |α|²)` with real `α ≥ 0`.
    Qubit,
    /// Coordinates `(a_x, a_y)` on a fixed `a_z` slice.
    Qutrit { a_z: f64 },
}

impl Family {
    pub fn default_axes(&self) -> (Axis, Axis) {
        match self {
            Family::Qubit => (Axis::new(0.0, 1.0, 101), Axis::new(0.0, 0.25, 101)),
            Family::Qutrit { .. } => (Axis::new(0.0, 2.0 / 3.0, 61), Axis::new(0.0, 2.0 / 3.0, 61)),
        }
    }

    fn state(&self, x: f64, y: f64) -> Option<DensityMatrix> {
        match *self {
            Family::Qubit => {
                if !(y >= 0.0) {
                    return None;
                }
                qubit_state(&QubitParams::Amplitudes {
                    delta: x,
                    alpha: c(y.sqrt(), 0.0),
                })
                .ok()
            }
            Family::Qutrit { a_z } => qutrit_state(&QutritParams::new(x, y, a_z)).ok(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Family::Qubit => 2,
            Family::Qutrit { .. } => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRecord {
    pub coords: [f64; 2],
    pub exposure: Option<f64>,
    pub renyi: Option<f64>,
    pub valid: bool,
}

/// Exposure and `H_n` at every grid point, `x`-major.
pub fn scan_exposure(family: Family, op: &HermitianOperator, n: f64, axes: (Axis, Axis)) -> Result<Vec<ScanRecord>> {
    let index = RenyiIndex::real(n)?;
    if n <= 1.0 {
        return Err(Error::InvalidArgument(format!("scan order must exceed 1, got {n}")));
    }
    if op.dim() != family.dim() {
        return Err(Error::InvalidDimensions(format!(
            "operator dim {} for a {}-level family",
            op.dim(),
            family.dim()
        )));
    }
    let (xs, ys) = (axes.0.values(), axes.1.values());
    let records = (0..xs.len() * ys.len())
        .into_par_iter()
        .map(|k| {
            let (x, y) = (xs[k / ys.len()], ys[k % ys.len()]);
            let values = family
                .state(x, y)
                .and_then(|rho| Some((exposure(&rho, op, n).ok()?, renyi_entropy(&rho, index))));
            ScanRecord {
                coords: [x, y],
                exposure: values.map(|v| v.0),
                renyi: values.map(|v| v.1),
                valid: values.is_some(),
            }
        })
        .collect();
    Ok(records)
}

/// `H_n` of a qubit with mixedness `c = δ - δ² - |α|²`.
pub fn qubit_entropy_from_mixedness(mixedness: f64, n: f64) -> f64 {
    let s = (1.0 - 4.0 * mixedness).max(0.0).sqrt();
    let idx = if (n - 1.0).abs() <= 1e-9 {
        RenyiIndex::VonNeumann
    } else {
        RenyiIndex::Real(n)
    };
    spectral_entropy(&[0.5 * (1.0 + s), 0.5 * (1.0 - s)], idx)
}

pub fn qubit_entropy(delta: f64, alpha2: f64, n: f64) -> f64 {
    qubit_entropy_from_mixedness(delta - delta * delta - alpha2, n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsoPoint {
    pub delta: f64,
    pub alpha2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Isocurve {
    pub points: Vec<IsoPoint>,
    pub diagnostics: Vec<String>,
}

pub fn entropy_isocurve_qubit(h2_target: f64, delta_grid: &[f64]) -> Result<Isocurve> {
    entropy_isocurve_qubit_n(h2_target, 2.0, delta_grid)
}

/// Points of constant `H_n` over a `δ` grid, solved for `|α|²` by bisection.
pub fn entropy_isocurve_qubit_n(target: f64, n: f64, delta_grid: &[f64]) -> Result<Isocurve> {
    if !(0.0..=2f64.ln() + 1e-12).contains(&target) {
        return Err(Error::InvalidArgument(format!(
            "entropy target {target} outside [0, ln 2]"
        )));
    }
    let mut points = Vec::new();
    let mut diagnostics = Vec::new();
    for &delta in delta_grid {
        if !(0.0..=1.0).contains(&delta) {
            diagnostics.push(format!("δ = {delta} outside [0, 1]"));
            continue;
        }
        let f = |a2: f64| qubit_entropy(delta, a2, n) - target;
        let (mut lo, mut hi) = (0.0, delta - delta * delta);
        let (f_lo, f_hi) = (f(lo), f(hi));
        if f_lo < -BISECTION_TOL || f_hi > BISECTION_TOL {
            diagnostics.push(format!("δ = {delta}: target not bracketed ({f_lo:.3e}, {f_hi:.3e})"));
            continue;
        }
        if f_lo <= 0.0 {
            points.push(IsoPoint { delta, alpha2: 0.0 });
            continue;
        }
        let mut iterations = 0;
        while hi - lo > BISECTION_TOL && iterations < BISECTION_MAX_ITER {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            iterations += 1;
        }
        points.push(IsoPoint {
            delta,
            alpha2: 0.5 * (lo + hi),
        });
    }
    Ok(Isocurve { points, diagnostics })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremumRecord {
    pub delta: f64,
    pub alpha2: f64,
    pub exposure: f64,
    pub entropy: f64,
}

/// Minimum and maximum `σ_z` exposure along a constant-`H_n` qubit curve.
///
/// The scan uses a uniform `δ` grid plus the two exact `|α|² = 0` endpoints,
/// which the grid generally misses.
pub fn extremize_exposure_on_isocurve(target: f64, n: f64) -> Result<(ExtremumRecord, ExtremumRecord)> {
    RenyiIndex::real(n)?;
    if n <= 1.0 {
        return Err(Error::InvalidArgument(format!("order must exceed 1, got {n}")));
    }
    let mut grid = Axis::new(0.0, 1.0, ISOCURVE_POINTS).values();
    if let Some(c_end) = mixedness_for_entropy(target, n) {
        let s = (1.0 - 4.0 * c_end).max(0.0).sqrt();
        grid.push(0.5 * (1.0 - s));
        grid.push(0.5 * (1.0 + s));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let curve = entropy_isocurve_qubit_n(target, n, &grid)?;
    let sz = pauli_z();
    let mut best: Option<(ExtremumRecord, ExtremumRecord)> = None;
    for p in &curve.points {
        let rho = qubit_state(&QubitParams::Amplitudes {
            delta: p.delta,
            alpha: c(p.alpha2.sqrt(), 0.0),
        })?;
        let rec = ExtremumRecord {
            delta: p.delta,
            alpha2: p.alpha2,
            exposure: exposure(&rho, &sz, n)?,
            entropy: qubit_entropy(p.delta, p.alpha2, n),
        };
        best = Some(match best {
            None => (rec, rec),
            Some((lo, hi)) => (
                if rec.exposure < lo.exposure - 1e-12 { rec } else { lo },
                if rec.exposure > hi.exposure + 1e-12 { rec } else { hi },
            ),
        });
    }
    best.ok_or_else(|| Error::NoSolution(format!("no qubit state has H_{n} = {target}")))
}

/// Inverts `H_n(c)` on `c ∈ [0, 1/4]`.
fn mixedness_for_entropy(target: f64, n: f64) -> Option<f64> {
    let (mut lo, mut hi) = (0.0, 0.25);
    if target < 0.0 || target > qubit_entropy_from_mixedness(hi, n) + 1e-12 {
        return None;
    }
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if qubit_entropy_from_mixedness(mid, n) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn max_abs(m: &ComplexMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn qubit_examples() {
        let up = qubit_state(&QubitParams::Amplitudes {
            delta: 1.0,
            alpha: c(0., 0.),
        })
        .unwrap();
        assert!(up.is_pure());
        assert_abs_diff_eq!(up.matrix()[(0, 0)].re, 1.0);
        let centre = qubit_state(&QubitParams::Bloch {
            a_x: 0.,
            a_y: 0.,
            a_z: 0.,
        })
        .unwrap();
        assert!(max_abs(&(centre.matrix() - DensityMatrix::maximally_mixed(2).matrix())) < 1e-15);
        let b = QubitParams::Bloch {
            a_x: 0.3,
            a_y: -0.4,
            a_z: 0.5,
        };
        let (delta, alpha) = b.amplitudes();
        let back = QubitParams::Amplitudes { delta, alpha }.bloch();
        for (x, y) in back.iter().zip([0.3, -0.4, 0.5]) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(alpha.norm_sqr(), (0.09 + 0.16) / 4.0, epsilon = 1e-15);
        let m1 = qubit_state(&b).unwrap();
        let m2 = qubit_state(&QubitParams::Amplitudes { delta, alpha }).unwrap();
        assert!(max_abs(&(m1.matrix() - m2.matrix())) < 1e-12);
        assert!(qubit_state(&QubitParams::Amplitudes {
            delta: 0.5,
            alpha: c(0.6, 0.)
        })
        .is_err());
    }

    #[test]
    fn qutrit_examples() {
        let mixed = qutrit_state(&QutritParams::new(0., 0., 0.)).unwrap();
        assert!(max_abs(&(mixed.matrix() - DensityMatrix::maximally_mixed(3).matrix())) < 1e-15);
        let edge = qutrit_state(&QutritParams::new(2.0 / 3.0, 0., 0.)).unwrap();
        assert_abs_diff_eq!(edge.min_eigenvalue(), 0.0, epsilon = 1e-10);
        let tilted = qutrit_state(&QutritParams::new(0.2, 0.3, 0.1)).unwrap();
        let r = (0.14f64).sqrt();
        let ev = tilted.eigenvalues();
        assert_abs_diff_eq!(ev[0], 1.0 / 3.0 - r / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[2], 1.0 / 3.0 + r / 2.0, epsilon = 1e-12);
        assert!(matches!(
            qutrit_state(&QutritParams::new(0.5, 0.5, 0.5)),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn spin_algebra() {
        let [sx, sy, sz] = SpinOps::default().s;
        let comm = sx.matrix() * sy.matrix() - sy.matrix() * sx.matrix();
        assert!(max_abs(&(comm - sz.matrix() * c(0., 1.))) < 1e-15);
        assert_eq!(spin1_operator("Sz").unwrap(), sz);
    }

    #[test]
    fn operator_expressions() {
        let sx2 = spin1_operator("Sx^2").unwrap();
        let expect = DensityMatrix::diagonal(&[0., 0.5, 0.5]).unwrap();
        assert!(max_abs(&(sx2.matrix() - expect.matrix() * c(2., 0.))) < 1e-15);
        let twist = spin1_operator("SySz + SzSy").unwrap();
        let expect = ComplexMatrix::from_row_slice(
            3,
            3,
            &[
                c(0., 0.),
                c(0., 0.),
                c(0., 0.),
                c(0., 0.),
                c(0., 0.),
                c(-1., 0.),
                c(0., 0.),
                c(-1., 0.),
                c(0., 0.),
            ],
        );
        assert!(max_abs(&(twist.matrix() - expect)) < 1e-15);
        let combo = spin1_operator("0.5*Sx - 2I").unwrap();
        assert_abs_diff_eq!(combo.matrix()[(0, 0)].re, -2.0);
        assert_abs_diff_eq!(combo.matrix()[(2, 1)].im, 0.5);
        assert!(matches!(spin1_operator("SySz"), Err(Error::InvalidOperator(_))));
        assert!(spin1_operator("Sw").is_err());
        assert!(spin1_operator("").is_err());
        assert!(spin1_operator("Sx +").is_err());
    }

    #[test]
    fn qubit_scan_is_positive() {
        let rows = scan_exposure(Family::Qubit, &pauli_z(), 2.0, Family::Qubit.default_axes()).unwrap();
        assert_eq!(rows.len(), 101 * 101);
        assert!(rows.iter().any(|r| !r.valid));
        for r in rows.iter().filter(|r| r.valid) {
            assert!(r.exposure.unwrap() > -1e-10, "{r:?}");
        }
        for r in rows.iter().filter(|r| !r.valid) {
            assert!(r.exposure.is_none() && r.renyi.is_none());
        }
    }

    #[test]
    fn qutrit_scan_has_negative_region() {
        let op = spin1_operator("SySz+SzSy").unwrap();
        let fam = Family::Qutrit { a_z: 0.0 };
        let rows = scan_exposure(fam, &op, 2.0, fam.default_axes()).unwrap();
        assert!(rows.iter().any(|r| r.exposure.is_some_and(|e| e < -1e-6)));
        assert!(!rows.last().unwrap().valid);
    }

    #[test]
    fn exposure_ignores_phase_of_alpha() {
        let base = exposure(
            &qubit_state(&QubitParams::Amplitudes {
                delta: 0.3,
                alpha: c(0.4, 0.),
            })
            .unwrap(),
            &pauli_z(),
            2.0,
        )
        .unwrap();
        for phase in [0.3, 1.7, -2.5] {
            let alpha = num_complex::Complex64::from_polar(0.4, phase);
            let rho = qubit_state(&QubitParams::Amplitudes { delta: 0.3, alpha }).unwrap();
            assert_abs_diff_eq!(exposure(&rho, &pauli_z(), 2.0).unwrap(), base, epsilon = 1e-12);
        }
    }

    #[test]
    fn isocurve_examples() {
        let grid = Axis::new(0.0, 1.0, 101).values();
        let top = entropy_isocurve_qubit(2f64.ln(), &grid).unwrap();
        assert_eq!(top.points.len(), 1);
        assert_abs_diff_eq!(top.points[0].delta, 0.5);
        assert_abs_diff_eq!(top.points[0].alpha2, 0.0, epsilon = 1e-12);
        assert!(!top.diagnostics.is_empty());

        let target = qubit_entropy(0.3, 0.15, 2.0);
        let curve = entropy_isocurve_qubit(target, &[0.3]).unwrap();
        assert_abs_diff_eq!(curve.points[0].alpha2, 0.15, epsilon = 1e-10);

        let curve = entropy_isocurve_qubit(0.4, &grid).unwrap();
        let mut exposures = Vec::new();
        for p in &curve.points {
            assert!((qubit_entropy(p.delta, p.alpha2, 2.0) - 0.4).abs() <= 1e-10);
            let rho = qubit_state(&QubitParams::Amplitudes {
                delta: p.delta,
                alpha: c(p.alpha2.sqrt(), 0.),
            })
            .unwrap();
            exposures.push(exposure(&rho, &pauli_z(), 2.0).unwrap());
        }
        let spread =
            exposures.iter().cloned().fold(f64::MIN, f64::max) - exposures.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread > 1e-3);
    }

    #[test]
    fn extremize_examples() {
        let (lo, hi) = extremize_exposure_on_isocurve(0.4, 2.0).unwrap();
        assert_abs_diff_eq!(hi.alpha2, 0.0, epsilon = 1e-12);
        assert!(hi.delta < 0.5);
        assert_abs_diff_eq!(lo.delta, 0.5, epsilon = 1e-12);
        assert!(lo.exposure < hi.exposure);
        let (lo, hi) = extremize_exposure_on_isocurve(2f64.ln(), 2.0).unwrap();
        assert_eq!(lo, hi);
        assert!(extremize_exposure_on_isocurve(0.4, 1.0).is_err());
    }
}
