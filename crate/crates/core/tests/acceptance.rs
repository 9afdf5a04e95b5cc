//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use exposure_lab::channels::{udw_closed_forms, FockOracle, FockTruncation, UdwQubitParams, DEFAULT_FOCK_LEVELS};
use exposure_lab::onset::{exposure, renyi_second_derivative, trace_term_scan, ProductHamiltonian};
use exposure_lab::qmat::{evolve, partial_trace, pauli_x, pauli_z, DensityMatrix, Subsystem};
use exposure_lab::random::Sampler;
use exposure_lab::renyi::{
    renyi_bounds_check, renyi_entropy, spectrum_from_purities, PuritySequence, RenyiIndex, Spectrum,
};
use exposure_lab::statespace::{scan_exposure, spin1_operator, Family};
use exposure_lab::verify::{run_check, Check};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    out.detail.push_str(&format!("; {:.2}s", elapsed.as_secs_f64()));
    if let Some(limit) = limit {
        if elapsed > limit {
            out.pass = false;
            out.detail.push_str(&format!(" exceeds {}s", limit.as_secs()));
        }
    }
    out
}

fn first_derivative() -> Outcome {
    let r = run_check(Check::FirstDerivative, 200, 2024).unwrap();
    outcome(
        r.passed(),
        format!(
            "max |analytic| = {:.2e} (tol 1e-12), max |finite difference| = {:.2e} (tol 1e-6)",
            r.worst("analytic").unwrap(),
            r.worst("finite_difference").unwrap()
        ),
    )
}

fn free_hamiltonian() -> Outcome {
    let r = run_check(Check::FreeHamiltonian, 200, 2025).unwrap();
    outcome(
        r.passed(),
        format!("max change = {:.2e} (tol 1e-10)", r.worst("abs_change").unwrap()),
    )
}

fn perturbative_vs_exact() -> Outcome {
    let mut s = Sampler::new(2026);
    let step = 1e-3;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (da, db) = (s.dim(2, 3), s.dim(2, 3));
        let rho_a = s.mixed_state(da);
        let rho_b = s.mixed_state(db);
        let h = ProductHamiltonian::new(s.hermitian(da), s.hermitian(db));
        let joint = rho_a.tensor(&rho_b).unwrap();
        let hop = h.to_operator();
        for n in [2.0, 3.0, 4.0] {
            let idx = RenyiIndex::real(n).unwrap();
            let entropy = |t: f64| {
                let m = evolve(&joint, &hop, t).unwrap();
                renyi_entropy(
                    &DensityMatrix::new(partial_trace(m.matrix(), da, db, Subsystem::A).unwrap()).unwrap(),
                    idx,
                )
            };
            let fd = (entropy(step) - 2.0 * entropy(0.0) + entropy(-step)) / (step * step);
            let predicted = renyi_second_derivative(&rho_a, &rho_b, &h, n).unwrap();
            worst = worst.max(((fd - predicted) / predicted).abs());
        }
    }
    outcome(worst <= 1e-5, format!("max relative gap = {worst:.2e} (tol 1e-5)"))
}

fn udw_triple() -> Outcome {
    let env = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
    let h = ProductHamiltonian::new(pauli_z(), pauli_x());
    let mut worst_closed: f64 = 0.0;
    for i in 0..50 {
        let delta = i as f64 / 49.0;
        for j in 0..50 {
            let alpha2 = (delta - delta * delta) * j as f64 / 49.0;
            let p = UdwQubitParams::from_alpha2(delta, alpha2).unwrap();
            let rho = p.initial_state().unwrap();
            for n in [2.0, 3.0] {
                let (hdd, e) = udw_closed_forms(&p, n).unwrap();
                worst_closed = worst_closed
                    .max((hdd - renyi_second_derivative(&rho, &env, &h, n).unwrap()).abs())
                    .max((e - exposure(&rho, &pauli_z(), n).unwrap()).abs());
            }
        }
    }
    let oracle = FockOracle::new(FockTruncation::new(DEFAULT_FOCK_LEVELS).unwrap()).unwrap();
    let mut s = Sampler::new(2027);
    let mut worst_fock: f64 = 0.0;
    for _ in 0..20 {
        let delta = s.uniform(0.0, 1.0);
        let radius = (delta - delta * delta).sqrt() * s.uniform(0.0, 1.0);
        let phase = s.uniform(-std::f64::consts::PI, std::f64::consts::PI);
        let p = UdwQubitParams::new(delta, num_complex::Complex64::from_polar(radius, phase)).unwrap();
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            let rho = oracle.qubit_state(&p, t).unwrap();
            let expect = radius * (-2.0 * t * t).exp();
            worst_fock = worst_fock.max((rho.matrix()[(0, 1)].norm() - expect).abs());
        }
    }
    outcome(
        worst_closed <= 1e-10 && worst_fock <= 1e-6,
        format!("closed vs generic {worst_closed:.2e} (tol 1e-10), Fock vs Gaussian decay {worst_fock:.2e} (tol 1e-6)"),
    )
}

fn durability_positivity() -> Outcome {
    let r = run_check(Check::DurabilityPositivity, 500, 2028).unwrap();
    outcome(
        r.passed(),
        format!(
            "largest negative excursion = {:.2e} (tol 1e-10)",
            r.worst("negative_part").unwrap()
        ),
    )
}

fn pure_state_exposure() -> Outcome {
    let mut s = Sampler::new(2029);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let d = s.dim(2, 5);
        let rho = s.pure_state(d);
        let a = s.hermitian(d);
        for n in [2.0, 3.0] {
            worst = worst.max(exposure(&rho, &a, n).unwrap().abs());
        }
    }
    outcome(worst <= 1e-12, format!("max |E_n| = {worst:.2e} (tol 1e-12)"))
}

fn tensor_extension() -> Outcome {
    let r = run_check(Check::TensorExtension, 100, 2030).unwrap();
    outcome(
        r.passed(),
        format!(
            "max difference = {:.2e} (tol 1e-10)",
            r.worst("abs_difference").unwrap()
        ),
    )
}

fn qubit_positivity() -> Outcome {
    let rows = scan_exposure(Family::Qubit, &pauli_z(), 2.0, Family::Qubit.default_axes()).unwrap();
    let min = rows.iter().filter_map(|r| r.exposure).fold(f64::INFINITY, f64::min);
    let valid = rows.iter().filter(|r| r.valid).count();
    outcome(
        min >= -1e-10,
        format!("min E_2 = {min:.3e} over {valid} admissible points"),
    )
}

fn qutrit_negative_region() -> Outcome {
    let fam = Family::Qutrit { a_z: 0.0 };
    let op = spin1_operator("SySz+SzSy").unwrap();
    let rows = scan_exposure(fam, &op, 2.0, fam.default_axes()).unwrap();
    let negative = rows.iter().filter(|r| r.exposure.is_some_and(|e| e < -1e-6)).count();
    let min = rows.iter().filter_map(|r| r.exposure).fold(f64::INFINITY, f64::min);
    outcome(
        negative >= 1,
        format!("{negative} points with E_2 < -1e-6, min E_2 = {min:.4}"),
    )
}

fn complementary_symmetry() -> Outcome {
    let r = run_check(Check::ComplementarySymmetry, 50, 2031).unwrap();
    outcome(
        r.passed(),
        format!(
            "max symmetry gap = {:.2e} (tol 1e-9), max relative δI error at t = 1e-2 = {:.2e} (tol 1e-2)",
            r.worst("symmetry_gap").unwrap(),
            r.worst("delta_rel_error").unwrap()
        ),
    )
}

fn spectrum_reconstruction() -> Outcome {
    let mut s = Sampler::new(2032);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let d = s.dim(1, 5);
        let spec = Spectrum::new(s.spectrum(d)).unwrap();
        let back = spectrum_from_purities(&spec.purities(), d).unwrap();
        for (x, y) in spec.values().iter().zip(back.values()) {
            worst = worst.max((x - y).abs());
        }
    }
    let worked = spectrum_from_purities(&PuritySequence::new(vec![1.0, 0.38, 0.16]).unwrap(), 3).unwrap();
    let worked_err = worked
        .values()
        .iter()
        .zip([0.5, 0.3, 0.2])
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    outcome(
        worst <= 1e-8 && worked_err <= 1e-8,
        format!("roundtrip max error = {worst:.2e}, worked case error = {worked_err:.2e} (tol 1e-8)"),
    )
}

fn divergence_demo() -> Outcome {
    let eps = 1e-3;
    let slice = |l1: f64| vec![0.5, l1, 0.5 - l1];
    let full_rank: Vec<Vec<f64>> = (0..=80).map(|k| slice(0.05 + 0.4 * k as f64 / 80.0)).collect();
    let rows = trace_term_scan(&full_rank, &[eps], None).unwrap();
    let max_raw = rows.iter().map(|r| r.raw.abs()).fold(0.0, f64::max);
    let ends = trace_term_scan(&[slice(1e-4), slice(0.05)], &[eps], None).unwrap();
    let ratio = ends[0].regularized.abs() / ends[1].regularized.abs();
    outcome(
        max_raw < 1e-3 && ratio >= 10.0,
        format!(
            "max |raw| for λ_min ≥ 0.05 = {max_raw:.3e} (need < 1e-3); |reg(1e-4)| / |reg(0.05)| = {:.3} / {:.3} = {ratio:.2} (need ≥ 10)",
            ends[0].regularized.abs(),
            ends[1].regularized.abs()
        ),
    )
}

fn entropy_bounds() -> Outcome {
    let mut s = Sampler::new(2033);
    let mut min_slack = f64::INFINITY;
    let mut all_ok = true;
    for k in 0..500 {
        let d = s.dim(2, 5);
        let rho = if k % 5 == 0 { s.pure_state(d) } else { s.mixed_state(d) };
        let b = renyi_bounds_check(&rho);
        min_slack = min_slack.min(b.slack1).min(b.slack2);
        all_ok &= b.bound1_ok && b.bound2_ok;
    }
    outcome(
        all_ok && min_slack >= -1e-10,
        format!("min slack = {min_slack:.3e} (tol -1e-10)"),
    )
}

/// Name, optional time limit in seconds, body.
type Criterion = (&'static str, Option<u64>, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        ("first-derivative vanishing", Some(10), first_derivative),
        ("free-hamiltonian independence", None, free_hamiltonian),
        ("perturbative vs exact", None, perturbative_vs_exact),
        ("udw triple agreement", Some(60), udw_triple),
        ("durability positivity", None, durability_positivity),
        ("pure-state exposure", None, pure_state_exposure),
        ("tensor-extension invariance", None, tensor_extension),
        ("qubit positivity map", None, qubit_positivity),
        ("qutrit negative region", None, qutrit_negative_region),
        ("complementary symmetry", None, complementary_symmetry),
        ("spectrum reconstruction", None, spectrum_reconstruction),
        ("divergence demo", None, divergence_demo),
        ("entropy bounds", None, entropy_bounds),
    ];
    let mut failures = 0;
    for (name, limit, f) in criteria {
        let out = timed(limit.map(Duration::from_secs), f);
        println!("{} {name}: {}", if out.pass { "PASS" } else { "FAIL" }, out.detail);
        failures += usize::from(!out.pass);
    }
    println!("acceptance: {failures} failing criteria");
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
