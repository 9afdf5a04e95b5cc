use std::fs;
use std::path::Path;

use exposure_lab::channels::{
    coherent_info_timeseries, udw_closed_forms, udw_eigen, udw_qubit_state, FockOracle, FockTruncation, UdwQubitParams,
    FOCK_CONVERGENCE_TOL,
};
use exposure_lab::onset::{
    exposure, onset_report, qutrit_eigenvalue_slice, renyi_second_derivative, test_coupling, trace_term_scan,
    GeneralHamiltonian, ProductHamiltonian,
};
use exposure_lab::qmat::{c, pauli_x, pauli_z, ComplexMatrix, DensityMatrix, HermitianOperator};
use exposure_lab::renyi::{spectral_entropy, spectrum_from_purities, PuritySequence, RenyiIndex};
use exposure_lab::statespace::{
    entropy_isocurve_qubit_n, extremize_exposure_on_isocurve, qubit_state, scan_exposure, spin1_operator, Axis, Family,
    QubitParams,
};
use exposure_lab::verify::{run_check, Check};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::output::{Cell, ResultEnvelope, Table};
use crate::{
    CliError, Command, Coupling, DivergenceArgs, ExtremizeArgs, IsocurveArgs, OnsetReportArgs, Outcome, ScanQubitArgs,
    ScanQutritArgs, SpectrumArgs, UdwEvolveArgs, UdwVerifyArgs, VerifyArgs,
};

type CmdResult = Result<Outcome, CliError>;

const CLOSED_FORM_TOL: f64 = 1e-10;

pub(crate) fn dispatch(command: &Command) -> CmdResult {
    match command {
        Command::ScanQubit(a) => scan_qubit(a),
        Command::ScanQutrit(a) => scan_qutrit(a),
        Command::UdwEvolve(a) => udw_evolve(a),
        Command::UdwVerify(a) => udw_verify(a),
        Command::OnsetReport(a) => onset(a),
        Command::Verify(a) => verify(a),
        Command::Spectrum(a) => spectrum(a),
        Command::DivergenceDemo(a) => divergence(a),
        Command::Isocurve(a) => isocurve(a),
        Command::Extremize(a) => extremize(a),
    }
}

pub(crate) fn index_from_str(s: &str) -> Result<RenyiIndex, String> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("vn") {
        return Ok(RenyiIndex::VonNeumann);
    }
    let n: f64 = s.parse().map_err(|_| format!("expected a number or `vn`, got `{s}`"))?;
    RenyiIndex::real(n).map_err(|e| e.to_string())
}

fn params<T: Serialize>(args: &T) -> Map<String, Value> {
    match serde_json::to_value(args) {
        Ok(Value::Object(m)) => m,
        _ => Map::new(),
    }
}

fn done(envelope: ResultEnvelope) -> CmdResult {
    Ok(Outcome {
        envelope,
        verdict: None,
    })
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

fn scan_order(n: f64) -> Result<(), CliError> {
    if !(n > 1.0) || !n.is_finite() {
        return Err(CliError::Usage(format!("--n must exceed 1 for scans, got {n}")));
    }
    Ok(())
}

fn grid_size(points: usize, flag: &str) -> Result<(), CliError> {
    if points < 2 {
        return Err(invalid(format!("{flag} needs at least 2 points, got {points}")));
    }
    Ok(())
}

fn scan_table(
    family: Family,
    op: &HermitianOperator,
    n: f64,
    grid: usize,
    names: [&'static str; 2],
) -> Result<Table, CliError> {
    let (x, y) = family.default_axes();
    let axes = (Axis::new(x.start, x.stop, grid), Axis::new(y.start, y.stop, grid));
    let mut table = Table::new(&[names[0], names[1], "exposure", "renyi", "valid"]);
    for r in scan_exposure(family, op, n, axes)? {
        table.push(vec![
            r.coords[0].into(),
            r.coords[1].into(),
            r.exposure.into(),
            r.renyi.into(),
            r.valid.into(),
        ]);
    }
    Ok(table)
}

fn scan_qubit(a: &ScanQubitArgs) -> CmdResult {
    scan_order(a.n)?;
    grid_size(a.grid, "--grid")?;
    let table = scan_table(Family::Qubit, &pauli_z(), a.n, a.grid, ["delta", "alpha2"])?;
    done(ResultEnvelope::new("scan-qubit", params(a), table))
}

fn scan_qutrit(a: &ScanQutritArgs) -> CmdResult {
    scan_order(a.n)?;
    grid_size(a.grid, "--grid")?;
    let op = spin1_operator(&a.op)?;
    let table = scan_table(Family::Qutrit { a_z: a.az }, &op, a.n, a.grid, ["a_x", "a_y"])?;
    let negative = table
        .rows
        .iter()
        .filter(|r| matches!(r[2], Cell::Num(e) if e < -1e-6))
        .count();
    let mut env = ResultEnvelope::new("scan-qutrit", params(a), table);
    env.diagnostics
        .push(format!("{negative} admissible points with exposure < -1e-6"));
    done(env)
}

fn time_axis(tmax: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if !(tmax >= 0.0) || !tmax.is_finite() {
        return Err(invalid(format!("--tmax must be finite and non-negative, got {tmax}")));
    }
    if steps == 0 {
        return Err(invalid("--steps must be positive"));
    }
    Ok(Axis::new(0.0, tmax, steps).values())
}

fn udw_evolve(a: &UdwEvolveArgs) -> CmdResult {
    let times = time_axis(a.tmax, a.steps)?;
    let trunc = FockTruncation::new(a.levels)?;
    let vacuum = trunc.vacuum();
    let h: GeneralHamiltonian = ProductHamiltonian::new(pauli_z(), trunc.quadrature()).into();
    let indices: Vec<RenyiIndex> =
        a.n.iter()
            .map(|s| index_from_str(s).map_err(invalid))
            .collect::<Result<_, _>>()?;
    let mut table = Table::new(&[
        "delta",
        "alpha2",
        "index",
        "t",
        "lambda_plus",
        "lambda_minus",
        "h_a",
        "h_b",
        "h_a_anc",
        "h_b_anc",
        "direct",
        "complementary",
    ]);
    let mut worst: f64 = 0.0;
    for &alpha2 in &a.alpha2 {
        let p = UdwQubitParams::from_alpha2(a.delta, alpha2)?;
        let rho = p.initial_state()?;
        for &idx in &indices {
            let series = coherent_info_timeseries(&rho, &vacuum, &h, idx, &times)?;
            for r in &series.records {
                let e = udw_eigen(&p, r.t);
                let gap = (spectral_entropy(&[e.lambda_plus, e.lambda_minus], idx) - r.h_a).abs();
                worst = worst.max(gap);
                if gap > FOCK_CONVERGENCE_TOL {
                    return Err(CliError::Numerical(format!(
                        "{} Fock levels too few at t = {}: qubit entropy off by {gap:.2e}; raise --levels",
                        a.levels, r.t
                    )));
                }
                table.push(vec![
                    a.delta.into(),
                    alpha2.into(),
                    Cell::Text(idx.to_string()),
                    r.t.into(),
                    e.lambda_plus.into(),
                    e.lambda_minus.into(),
                    r.h_a.into(),
                    r.h_b.into(),
                    r.h_a_anc.into(),
                    r.h_b_anc.into(),
                    r.direct.into(),
                    r.complementary.into(),
                ]);
            }
        }
    }
    let mut env = ResultEnvelope::new("udw-evolve", params(a), table);
    env.diagnostics
        .push(format!("max |H(A') Fock - closed form| = {worst:.3e}"));
    done(env)
}

fn udw_verify(a: &UdwVerifyArgs) -> CmdResult {
    let times = time_axis(a.tmax, a.steps)?;
    let oracle = FockOracle::new(FockTruncation::new(a.levels)?)?;
    let env_state = DensityMatrix::diagonal(&[1.0, 0.0])?;
    let generic = ProductHamiltonian::new(pauli_z(), pauli_x());
    let mut table = Table::new(&[
        "delta",
        "alpha2",
        "quantity",
        "n",
        "t",
        "closed_form",
        "reference",
        "abs_error",
        "tolerance",
        "ok",
    ]);
    let mut all_ok = true;
    let mut push = |table: &mut Table,
                    alpha2: f64,
                    quantity: &str,
                    n: Option<f64>,
                    t: f64,
                    closed: f64,
                    reference: f64,
                    tol: f64| {
        let err = (closed - reference).abs();
        let ok = err <= tol;
        all_ok &= ok;
        table.push(vec![
            a.delta.into(),
            alpha2.into(),
            quantity.into(),
            n.into(),
            t.into(),
            closed.into(),
            reference.into(),
            err.into(),
            tol.into(),
            ok.into(),
        ]);
    };
    for &alpha2 in &a.alpha2 {
        let p = UdwQubitParams::from_alpha2(a.delta, alpha2)?;
        let rho = p.initial_state()?;
        for &n in &a.n {
            let (hdd, e) = udw_closed_forms(&p, n)?;
            let hdd_ref = renyi_second_derivative(&rho, &env_state, &generic, n)?;
            let e_ref = exposure(&rho, &pauli_z(), n)?;
            push(
                &mut table,
                alpha2,
                "hdd_vs_generic",
                Some(n),
                0.0,
                hdd,
                hdd_ref,
                CLOSED_FORM_TOL,
            );
            push(
                &mut table,
                alpha2,
                "exposure_vs_generic",
                Some(n),
                0.0,
                e,
                e_ref,
                CLOSED_FORM_TOL,
            );
        }
        for &t in &times {
            let closed = udw_qubit_state(&p, t)?;
            let fock = oracle.qubit_state(&p, t)?;
            push(
                &mut table,
                alpha2,
                "coherence_vs_fock",
                None,
                t,
                closed.matrix()[(0, 1)].norm(),
                fock.matrix()[(0, 1)].norm(),
                FOCK_CONVERGENCE_TOL,
            );
            push(
                &mut table,
                alpha2,
                "lambda_plus_vs_fock",
                None,
                t,
                udw_eigen(&p, t).lambda_plus,
                fock.max_eigenvalue(),
                FOCK_CONVERGENCE_TOL,
            );
        }
    }
    Ok(Outcome {
        envelope: ResultEnvelope::new("udw-verify", params(a), table),
        verdict: Some(all_ok),
    })
}

fn read_matrix(path: &Path) -> Result<ComplexMatrix, CliError> {
    let text = fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    let rows: Vec<Vec<[f64; 2]>> = serde_json::from_str(&text)
        .map_err(|e| invalid(format!("{}: expected rows of [re, im] pairs: {e}", path.display())))?;
    let d = rows.len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err(invalid(format!(
            "{}: matrix must be square and nonempty",
            path.display()
        )));
    }
    Ok(ComplexMatrix::from_fn(d, d, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

fn complex_rows(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| {
                Value::Array(
                    (0..m.ncols())
                        .map(|j| serde_json::json!([m[(i, j)].re, m[(i, j)].im]))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn onset(a: &OnsetReportArgs) -> CmdResult {
    let with_path = |p: &Path, e: exposure_lab::Error| invalid(format!("{}: {e}", p.display()));
    let rho_a = DensityMatrix::new(read_matrix(&a.rho_a)?).map_err(|e| with_path(&a.rho_a, e))?;
    let rho_b = DensityMatrix::new(read_matrix(&a.rho_b)?).map_err(|e| with_path(&a.rho_b, e))?;
    let op_a = HermitianOperator::new(read_matrix(&a.op_a)?).map_err(|e| with_path(&a.op_a, e))?;
    let op_b = HermitianOperator::new(read_matrix(&a.op_b)?).map_err(|e| with_path(&a.op_b, e))?;
    let h = ProductHamiltonian::new(op_a, op_b);
    let mut table = Table::new(&[
        "n",
        "variance_a",
        "variance_b",
        "durability_a",
        "exposure_a",
        "hdd_a",
        "delta_coefficient",
    ]);
    let mut basis = None;
    for &n in &a.n {
        let r = onset_report(&rho_a, &rho_b, &h, n)?;
        table.push(vec![
            n.into(),
            r.variance_a.into(),
            r.variance_b.into(),
            r.durability_a.into(),
            r.exposure_a.into(),
            r.hdd_a.into(),
            r.delta_coefficient.into(),
        ]);
        basis.get_or_insert(r.op_in_eigenbasis);
    }
    let mut env = ResultEnvelope::new("onset-report", params(a), table);
    env.extra
        .insert("eigenvalues_a".into(), Value::from(rho_a.eigenvalues().to_vec()));
    if let Some(m) = basis {
        env.extra.insert("op_a_in_eigenbasis".into(), complex_rows(&m));
    }
    if !rho_b.is_pure() {
        env.diagnostics
            .push("rho_b is mixed; delta_coefficient left empty".into());
    }
    done(env)
}

fn verify(a: &VerifyArgs) -> CmdResult {
    let check: Check = a.check.parse()?;
    if a.trials == 0 {
        return Err(invalid("--trials must be positive"));
    }
    let report = run_check(check, a.trials, a.seed)?;
    let mut table = Table::new(&["trial", "quantity", "n", "value", "tolerance", "ok"]);
    for r in &report.rows {
        table.push(vec![
            r.trial.into(),
            r.quantity.into(),
            r.n.into(),
            r.value.into(),
            r.tolerance.into(),
            r.ok.into(),
        ]);
    }
    let mut env = ResultEnvelope::new("verify", params(a), table);
    let mut quantities: Vec<&str> = report.rows.iter().map(|r| r.quantity).collect();
    quantities.dedup();
    for q in quantities {
        if let Some(w) = report.worst(q) {
            env.diagnostics.push(format!("max {q} = {w:.3e}"));
        }
    }
    env.diagnostics.push(format!("generator ChaCha8, seed {}", a.seed));
    Ok(Outcome {
        envelope: env,
        verdict: Some(report.passed()),
    })
}

fn spectrum(a: &SpectrumArgs) -> CmdResult {
    let d = a.dim.unwrap_or(a.purities.len());
    let seq = PuritySequence::new(a.purities.clone())?;
    let spec = spectrum_from_purities(&seq, d)?;
    let mut table = Table::new(&["index", "eigenvalue"]);
    for (i, &l) in spec.values().iter().enumerate() {
        table.push(vec![i.into(), l.into()]);
    }
    done(ResultEnvelope::new("spectrum", params(a), table))
}

fn divergence(a: &DivergenceArgs) -> CmdResult {
    grid_size(a.points, "--points")?;
    let mut family = qutrit_eigenvalue_slice(a.points);
    family.extend((2..=8).map(|k| {
        let l1 = 10f64.powi(-k);
        vec![0.5, l1, 0.5 - l1]
    }));
    family.sort_by(|x, y| x[1].total_cmp(&y[1]));
    family.dedup();
    let coupling = test_coupling();
    let op = match a.coupling {
        Coupling::Ones => None,
        Coupling::Test => Some(&coupling),
    };
    let rows = trace_term_scan(&family, &a.eps, op)?;
    let mut table = Table::new(&[
        "lambda_0",
        "lambda_1",
        "lambda_2",
        "lambda_min",
        "eps",
        "raw",
        "regularized",
    ]);
    for r in &rows {
        table.push(vec![
            r.eigenvalues[0].into(),
            r.eigenvalues[1].into(),
            r.eigenvalues[2].into(),
            r.lambda_min.into(),
            r.eps.into(),
            r.raw.into(),
            r.regularized.into(),
        ]);
    }
    let mut env = ResultEnvelope::new("divergence-demo", params(a), table);
    for &eps in &a.eps {
        let of_eps = rows.iter().filter(|r| r.eps == eps);
        let raw_full = of_eps
            .clone()
            .filter(|r| r.lambda_min >= 0.05)
            .map(|r| r.raw.abs())
            .fold(0.0, f64::max);
        let smallest = of_eps
            .filter(|r| r.lambda_min > 0.0)
            .min_by(|x, y| x.lambda_min.total_cmp(&y.lambda_min));
        let mut line = format!("eps = {eps:e}: max |raw| for lambda_min >= 0.05 is {raw_full:.3e}");
        if let Some(s) = smallest {
            line.push_str(&format!(
                ", |regularized| at lambda_min = {:e} is {:.3e}",
                s.lambda_min,
                s.regularized.abs()
            ));
        }
        env.diagnostics.push(line);
    }
    done(env)
}

fn isocurve(a: &IsocurveArgs) -> CmdResult {
    scan_order(a.n)?;
    grid_size(a.points, "--points")?;
    let curve = entropy_isocurve_qubit_n(a.h2, a.n, &Axis::new(0.0, 1.0, a.points).values())?;
    let sz = pauli_z();
    let mut table = Table::new(&["delta", "alpha2", "exposure", "renyi"]);
    let index = RenyiIndex::real(a.n)?;
    for p in &curve.points {
        let rho = qubit_state(&QubitParams::Amplitudes {
            delta: p.delta,
            alpha: c(p.alpha2.sqrt(), 0.0),
        })?;
        table.push(vec![
            p.delta.into(),
            p.alpha2.into(),
            exposure(&rho, &sz, a.n)?.into(),
            exposure_lab::renyi::renyi_entropy(&rho, index).into(),
        ]);
    }
    let mut env = ResultEnvelope::new("isocurve", params(a), table);
    env.diagnostics = curve.diagnostics;
    done(env)
}

fn extremize(a: &ExtremizeArgs) -> CmdResult {
    scan_order(a.n)?;
    let (lo, hi) = extremize_exposure_on_isocurve(a.h2, a.n)?;
    let mut table = Table::new(&["kind", "delta", "alpha2", "exposure", "entropy"]);
    for (kind, r) in [("min", lo), ("max", hi)] {
        table.push(vec![
            kind.into(),
            r.delta.into(),
            r.alpha2.into(),
            r.exposure.into(),
            r.entropy.into(),
        ]);
    }
    done(ResultEnvelope::new("extremize", params(a), table))
}
