//! Acceptance criteria 1-8, one PASS/FAIL line each.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use alpert::exact::rat;
use alpert::fourier::{addition_residuals, default_grid, derivative_residual, two_scale_residual, FloatCoeffs};
use alpert::legendre::PolyExact;
use alpert::recurrences::{
    check_bessel_difference, check_gen_eig_i, check_gen_eig_j, check_mixed_recurrence, regenerate_via_recurrence,
};
use alpert::refinement::check_orthogonality;
use alpert::transform::project_polynomial;
use alpert::waveletsolve::{
    verify_even_row_embedding, wavelet_row_nm1_closed_form, wavelet_row_nm2_closed_form, wavelet_row_nm3_closed_form,
};
use alpert::{
    analyze, build_coeff_matrices, build_wavelet_matrices, run_verification, synthesize, FilterBank64, FormulaPath,
    SignalTree64, SurdValue, VerifyScope, WaveletMatrixPair,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { ok: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { ok: false, detail: detail.into() }
}

fn s(q: alpert::Rational, m: u64) -> SurdValue {
    SurdValue::term(q, m)
}

fn golden_matrices() -> Outcome {
    let z = SurdValue::zero;
    let full = [
        vec![SurdValue::one(), z(), z(), z()],
        vec![s(rat(1, 2), 3), s(rat(1, 2), 1), z(), z()],
        vec![z(), s(rat(1, 4), 15), s(rat(1, 4), 1), z()],
        vec![s(rat(-1, 8), 7), s(rat(1, 8), 21), s(rat(1, 8), 35), s(rat(1, 8), 1)],
    ];
    for n in 0..=3 {
        let c = match build_coeff_matrices(n, FormulaPath::default()) {
            Ok(c) => c,
            Err(e) => return fail(format!("n={n}: {e}")),
        };
        let expected: Vec<Vec<SurdValue>> = full[..=n].iter().map(|r| r[..=n].to_vec()).collect();
        if c.c1.to_rows() != expected {
            return fail(format!("C1 of order {n} differs from the reference matrix"));
        }
    }
    pass("C1 for n = 0..3 equal the reference matrices exactly")
}

fn four_paths() -> Outcome {
    let n = 12;
    let oracle = build_coeff_matrices(n, FormulaPath::Oracle).expect("oracle build");
    for path in [FormulaPath::TwoF1Half, FormulaPath::TwoF1Two, FormulaPath::FourF3] {
        let c = match build_coeff_matrices(n, path) {
            Ok(c) => c,
            Err(e) => return fail(format!("{path}: {e}")),
        };
        for i in 0..=n {
            for j in 0..=n {
                if c.c1[(i, j)] != oracle.c1[(i, j)] {
                    return fail(format!("{path} differs from the integral at ({i},{j})"));
                }
            }
        }
    }
    pass(format!("{} entries agree across 2f1-half, 2f1-two, 4f3, oracle at n = {n}", (n + 1) * (n + 1)))
}

fn orthogonality() -> Outcome {
    for n in 0..=12 {
        let c = build_coeff_matrices(n, FormulaPath::default()).expect("build");
        let r = check_orthogonality(&c);
        if !r.passed() {
            return fail(format!("n={n}: {r:?}"));
        }
    }
    pass("sum = 2I, same-parity rows orthogonal, unit rows for n = 0..12")
}

fn recurrences() -> Outcome {
    for n in 0..=12 {
        let c = build_coeff_matrices(n, FormulaPath::default()).expect("build");
        let counts = [check_gen_eig_i(&c).len(), check_gen_eig_j(&c).len(), check_mixed_recurrence(&c).len()];
        if counts.iter().any(|&k| k > 0) {
            return fail(format!("n={n}: violations (row eigen, column eigen, mixed) = {counts:?}"));
        }
        let bessel = check_bessel_difference(&c);
        if !bessel.passed() {
            return fail(format!("n={n}: difference equation fails: {}", bessel.probe.summary()));
        }
        match regenerate_via_recurrence(n) {
            Ok(r) if r == c => {}
            Ok(_) => return fail(format!("n={n}: regenerated matrix differs")),
            Err(e) => return fail(format!("n={n}: {e}")),
        }
    }
    let range = alpert::verify::discrepancies(12).difference_equation_range.validated_range;
    pass(format!("three recurrences exact, regeneration exact for n = 0..12; difference equation range: {range}"))
}

fn row_agrees(d: &WaveletMatrixPair, row: usize, expected: &[SurdValue]) -> bool {
    let n = d.order;
    let tail = &d.d1.row(row)[n + 1 - expected.len()..];
    let leading_zeros = d.d1.row(row)[..n + 1 - expected.len()].iter().all(SurdValue::is_zero);
    let values = if d.inexact_rows.contains(&row) {
        tail.iter().zip(expected).all(|(a, b)| (a - b).to_f64().abs() < 1e-30)
    } else {
        tail == expected
    };
    leading_zeros && values
}

fn wavelets() -> Outcome {
    let d = build_wavelet_matrices(&build_coeff_matrices(1, FormulaPath::default()).unwrap()).unwrap();
    let reference =
        vec![vec![SurdValue::from_rational(rat(1, 2)), s(rat(-1, 2), 3)], vec![SurdValue::zero(), SurdValue::one()]];
    if d.d1.to_rows() != reference {
        return fail("D1 of order 1 differs from the reference matrix");
    }
    let mut flagged = Vec::new();
    for n in 2..=10 {
        let c = build_coeff_matrices(n, FormulaPath::default()).unwrap();
        let d = match build_wavelet_matrices(&c) {
            Ok(d) => d,
            Err(e) => return fail(format!("n={n}: {e}")),
        };
        if !d.inexact_rows.is_empty() {
            flagged.push((n, d.inexact_rows.clone()));
        }
        if d.d1[(n, n)] != SurdValue::one() {
            return fail(format!("n={n}: last diagonal entry is not 1"));
        }
        if !row_agrees(&d, n - 1, &wavelet_row_nm1_closed_form(n))
            || !row_agrees(&d, n - 2, &wavelet_row_nm2_closed_form(n))
        {
            return fail(format!("n={n}: rows n-1, n-2 differ from the closed forms"));
        }
        if n >= 3 && !row_agrees(&d, n - 3, &wavelet_row_nm3_closed_form(n)) {
            return fail(format!("n={n}: row n-3 differs from the closed form"));
        }
        match verify_even_row_embedding(n) {
            Ok(r) if r.passed() => {}
            Ok(r) => return fail(format!("n={n}: even-row pattern fails: {r:?}")),
            Err(e) => return fail(format!("n={n}: {e}")),
        }
    }
    let note = if flagged.is_empty() { "all exact".to_string() } else { format!("float fallback rows {flagged:?}") };
    pass(format!("D1 of order 1 and closed-form rows for n = 2..10 match; even-row pattern holds; {note}"))
}

fn reconstruction() -> Outcome {
    let (n, m) = (3, 6);
    let bank = FilterBank64::build(n);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst_round_trip = 0.0f64;
    let mut worst_parseval = 0.0f64;
    for _ in 0..10 {
        let values: Vec<f64> = (0..(n + 1) << m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let tree = SignalTree64::from_flat(n, m, &values).unwrap();
        let analyzed = analyze(&tree, &bank).unwrap();
        let back = synthesize(&analyzed, &bank).unwrap();
        let err = back.iter().flatten().zip(&values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst_round_trip = worst_round_trip.max(err);
        let e0 = tree.finest_energy();
        worst_parseval = worst_parseval.max((analyzed.decomposed_energy() - e0).abs() / e0);
    }
    let mut worst_detail = 0.0f64;
    for q in 0..=3 {
        let blocks = project_polynomial::<f64>(&PolyExact::monomial(q), n, m);
        let tree = analyze(&SignalTree64::from_finest(n, m, blocks).unwrap(), &bank).unwrap();
        worst_detail = worst_detail.max(tree.max_detail());
    }
    let detail = format!(
        "round trip {worst_round_trip:.2e}, Parseval rel {worst_parseval:.2e}, polynomial details {worst_detail:.2e}"
    );
    if worst_round_trip < 1e-12 && worst_parseval < 1e-10 && worst_detail < 1e-12 {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn fourier() -> Outcome {
    let grid = default_grid();
    let (mut two, mut add, mut der) = (0.0f64, 0.0f64, 0.0f64);
    for n in 0..=6 {
        let f = FloatCoeffs::build(n);
        two = two.max(two_scale_residual(&f, &grid).unwrap());
        add = add.max(addition_residuals(&f, &grid).unwrap().max());
        der = der.max(derivative_residual(&f, &grid).unwrap());
    }
    let detail = format!("two-scale {two:.2e}, addition {add:.2e}, derivative {der:.2e} over {} points", grid.len());
    if two < 1e-10 && add < 1e-10 && der < 1e-9 {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn discrepancy_entries() -> Outcome {
    let report = run_verification(12, &VerifyScope::ALL);
    let json = serde_json::to_value(&report).unwrap();
    let radicand = &json["discrepancies"]["sub_subdiagonal_radicand"];
    let range = &json["discrepancies"]["difference_equation_range"];
    let radicand_text = radicand["resolved_radicand"].as_str().unwrap_or("");
    let range_text = range["validated_range"].as_str().unwrap_or("");
    let populated = !radicand_text.is_empty()
        && radicand["checked_rows"].as_array().is_some_and(|r| !r.is_empty())
        && !range_text.is_empty()
        && range["failing_cells"].is_array();
    if !populated {
        return fail(format!("discrepancy entries missing: {}", json["discrepancies"]));
    }
    if !report.passed {
        return fail("entries populated but the full verify report at n = 12 failed");
    }
    pass(format!("sub-subdiagonal radicand {radicand_text}; difference equation range {range_text}"))
}

type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn main() -> ExitCode {
    // `cargo test` passes harness flags such as `--nocapture`; filtering is not supported
    let criteria: [Criterion; 8] = [
        ("golden matrices", golden_matrices, Some(Duration::from_secs(1))),
        ("four-path agreement n=12", four_paths, Some(Duration::from_secs(60))),
        ("orthogonality n<=12", orthogonality, Some(Duration::from_secs(10))),
        ("recurrence suites n<=12", recurrences, None),
        ("wavelet matrices", wavelets, None),
        ("perfect reconstruction", reconstruction, Some(Duration::from_secs(5))),
        ("fourier identities n<=6", fourier, Some(Duration::from_secs(10))),
        ("discrepancy ledger", discrepancy_entries, None),
    ];
    let mut failures = 0;
    for (k, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = check();
        let elapsed = start.elapsed();
        if let Some(limit) = limit {
            if elapsed > *limit {
                outcome = fail(format!("{} (took {elapsed:.2?}, limit {limit:?})", outcome.detail));
            }
        }
        let tag = if outcome.ok { "PASS" } else { "FAIL" };
        println!("criterion {} [{tag}] {name} ({elapsed:.2?}): {}", k + 1, outcome.detail);
        failures += usize::from(!outcome.ok);
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
