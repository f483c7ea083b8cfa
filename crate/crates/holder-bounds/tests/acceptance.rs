//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the measured values once its assertions hold.
//!
//! Expected values are frozen from exact closed-form oracles (moment
//! integrals, scalar formulas), not from rounded decimals.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use holder_bounds::expr::{parse, Expr};
use holder_bounds::harness::{self, Case, Family, SweepConfig};
use holder_bounds::hermite_hadamard::{
    hh_report_with, moment_cross_check, power_mean_plain, power_mean_refined_average, HHInput,
};
use holder_bounds::holder_integral::{
    classical_bound, refined_bound_weighted, split_point_bound, verify_chain_with,
    ConjugateExponents, WeightPartition,
};
use holder_bounds::holder_sum::{verify_sum_chain, DiscreteWeightPartition, PositiveTuple};
use holder_bounds::quadrature::{Interval, QuadratureConfig};
use holder_bounds::report::ReportTol;

fn unit() -> Interval {
    Interval::new(0.0, 1.0).unwrap()
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default().with_min_subdivisions(4000)
}

fn p2() -> ConjugateExponents {
    ConjugateExponents::new(2.0, 2.0).unwrap()
}

fn assert_within(label: &str, actual: f64, expected: f64, tol: f64) {
    assert!(
        (actual - expected).abs() <= tol,
        "{label}: got {actual}, expected {expected} within {tol}"
    );
}

fn assert_runtime(label: &str, elapsed: Duration, limit: Duration) {
    assert!(
        elapsed <= limit,
        "{label}: took {elapsed:?}, limit {limit:?}"
    );
}

#[test]
fn acceptance_01_worked_integral_chain() {
    let start = Instant::now();
    let f = parse("x").unwrap();
    let g = parse("1").unwrap();
    let partition = WeightPartition::linear(unit()).unwrap();
    let report =
        verify_chain_with(&f, &g, &p2(), &partition, &cfg(), &ReportTol::default()).unwrap();

    // Oracles: ∫x = 1/2; moments ∫(1-x)x^2 = 1/12, ∫x^3 = 1/4 with weight
    // integrals 1/2 each; ∫x^2 = 1/3.
    let refined_oracle = (1.0f64 / 24.0).sqrt() + (1.0f64 / 8.0).sqrt();
    let classical_oracle = 1.0 / 3.0f64.sqrt();
    assert_within("lhs", report.lhs, 0.5, 1e-9);
    assert_within("refined", report.refined_total, refined_oracle, 1e-9);
    assert_within("classical", report.classical, classical_oracle, 1e-9);
    assert!(
        report.lhs < report.refined_total && report.refined_total < report.classical,
        "chain is not strictly ordered: {report:?}"
    );
    assert!(report.chain_ok);

    let elapsed = start.elapsed();
    assert_runtime("criterion 1", elapsed, Duration::from_secs(1));
    println!(
        "acceptance 01 worked integral chain: PASS ({:.10} < {:.10} < {:.10}, {elapsed:?})",
        report.lhs, report.refined_total, report.classical
    );
}

#[test]
fn acceptance_02_degenerate_partition_reproduces_classical() {
    let start = Instant::now();
    let config = SweepConfig {
        seed: 20240811,
        family: Family::Mixed,
        ..SweepConfig::default()
    };
    let mut checked = 0u32;
    let mut trial = 0u64;
    while checked < 100 {
        let case = config.case_for_trial(trial);
        trial += 1;
        let Case::Integral {
            f,
            g,
            exps,
            partition,
        } = case
        else {
            panic!("mixed family generated a non-integral case");
        };
        let interval = *partition.interval();
        let degenerate =
            WeightPartition::new(vec![Expr::constant(1.0), Expr::constant(0.0)], interval).unwrap();
        let refined = refined_bound_weighted(&f, &g, &exps, &degenerate, &cfg()).unwrap();
        let classical = classical_bound(&f, &g, &exps, &interval, &cfg()).unwrap();
        assert!(
            (refined.total - classical).abs() <= 1e-10 * classical.abs().max(f64::MIN_POSITIVE),
            "trial {trial}: refined {} vs classical {classical}",
            refined.total
        );
        checked += 1;
    }
    let elapsed = start.elapsed();
    assert_runtime("criterion 2", elapsed, Duration::from_secs(30));
    println!("acceptance 02 degenerate partition: PASS (100 cases, {elapsed:?})");
}

#[test]
fn acceptance_03_trig_identity_case() {
    let one = parse("1").unwrap();
    let partition = WeightPartition::trig(unit()).unwrap();
    let refined = refined_bound_weighted(&one, &one, &p2(), &partition, &cfg()).unwrap();
    assert_within("refined total", refined.total, 1.0, 1e-9);
    println!(
        "acceptance 03 sin^2/cos^2 identity: PASS (refined total {:.12})",
        refined.total
    );
}

#[test]
fn acceptance_04_integral_sweep_clean() {
    let start = Instant::now();
    let config = SweepConfig {
        trials: 1000,
        seed: 7,
        family: Family::Mixed,
        report_tol: ReportTol::scaled(1e-8),
        ..SweepConfig::default()
    };
    let summary = harness::run_sweep(&config).unwrap();
    assert_eq!(summary.trials_run, 1000);
    assert!(
        summary.violations.is_empty(),
        "violations: {:?}",
        summary.violations
    );
    assert!(summary.errors.is_empty(), "errors: {:?}", summary.errors);
    // Zero violations already means gap_refined >= -tol on every trial;
    // the aggregate minimum gives the margin explicitly.
    let gaps = summary.gap_refined.unwrap();
    let elapsed = start.elapsed();
    assert_runtime("criterion 4", elapsed, Duration::from_secs(300));
    println!(
        "acceptance 04 integral sweep: PASS (1000 trials, min gap {:.3e}, {elapsed:?})",
        gaps.min
    );
}

#[test]
fn acceptance_05_sum_chain_and_sweep() {
    let start = Instant::now();
    let a = PositiveTuple::new(vec![1.0, 2.0]).unwrap();
    let b = PositiveTuple::new(vec![2.0, 1.0]).unwrap();
    let partition = DiscreteWeightPartition::linear(2).unwrap();
    let report = verify_sum_chain(&a, &b, &p2(), &partition, 1e-9).unwrap();

    // Scalar oracle for the index-linear refinement: the weighted power
    // sums are (1*1 + 2*4, 1*4 + 2*1) = (9, 6) and (1*1, 1*4) = (1, 4), so
    // the total is (sqrt(54) + 2) / 2.
    let refined_oracle = (54.0f64.sqrt() + 2.0) / 2.0;
    assert_within("lhs", report.lhs, 4.0, 1e-12);
    assert_within("refined", report.refined_total, refined_oracle, 1e-12);
    assert_within("classical", report.classical, 5.0, 1e-12);
    assert!(report.chain_ok);

    let config = SweepConfig {
        trials: 1000,
        seed: 11,
        family: Family::Tuples,
        n_range: (1, 10_000),
        report_tol: ReportTol::scaled(1e-9),
        ..SweepConfig::default()
    };
    let summary = harness::run_sweep(&config).unwrap();
    assert_eq!(summary.trials_run, 1000);
    assert!(
        summary.violations.is_empty(),
        "violations: {:?}",
        summary.violations
    );
    assert!(summary.errors.is_empty(), "errors: {:?}", summary.errors);

    let elapsed = start.elapsed();
    assert_runtime("criterion 5", elapsed, Duration::from_secs(60));
    println!(
        "acceptance 05 sum chain: PASS ({} < {:.10} < {}, 1000 trials, {elapsed:?})",
        report.lhs, report.refined_total, report.classical
    );
}

#[test]
fn acceptance_06_hermite_hadamard_bounds() {
    let input = HHInput::new(parse("x^2").unwrap(), parse("2*x").unwrap(), unit(), p2()).unwrap();
    let report = hh_report_with(&input, &cfg(), &ReportTol::default()).unwrap();

    // Scalar oracles: defect 1/6, dragomir 1/sqrt(6), refined (1+sqrt(2))/6.
    assert_within("defect", report.defect, 1.0 / 6.0, 1e-9);
    assert_within("dragomir", report.dragomir, 1.0 / 6.0f64.sqrt(), 1e-9);
    assert_within("refined", report.refined, (1.0 + 2.0f64.sqrt()) / 6.0, 1e-9);
    assert!(report.refined <= report.dragomir);
    assert!(report.convexity_ok && report.ordering_ok);
    println!(
        "acceptance 06 trapezoid bounds: PASS (defect {:.10}, refined {:.10} <= dragomir {:.10})",
        report.defect, report.refined, report.dragomir
    );
}

#[test]
fn acceptance_07_power_mean_ordering() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = f64::NEG_INFINITY;
    for _ in 0..100_000 {
        let u = rng.random_range(0.0..1000.0);
        let v = rng.random_range(0.0..1000.0);
        let s = rng.random_range(f64::EPSILON..1.0);
        let refined = power_mean_refined_average(u, v, s);
        let plain = power_mean_plain(u, v, s);
        worst = worst.max(refined - plain);
        assert!(
            refined <= plain + 1e-12,
            "violation at u={u}, v={v}, s={s}: {refined} > {plain}"
        );
    }
    let elapsed = start.elapsed();
    assert_runtime("criterion 7", elapsed, Duration::from_secs(10));
    println!(
        "acceptance 07 power-mean ordering: PASS (100000 samples, worst excess {worst:.3e}, {elapsed:?})"
    );
}

#[test]
fn acceptance_08_moment_identity() {
    for p in [1.5, 2.0, 3.0, 7.0] {
        let (quadrature, closed_form) = moment_cross_check(p, &cfg()).unwrap();
        assert_within(&format!("moment at p = {p}"), quadrature, closed_form, 1e-9);
    }
    println!("acceptance 08 moment identity: PASS (p in {{1.5, 2, 3, 7}})");
}

#[test]
fn acceptance_09_sweep_determinism() {
    let config = SweepConfig {
        trials: 64,
        seed: 99,
        family: Family::Mixed,
        ..SweepConfig::default()
    };
    let first = serde_json::to_string(&harness::run_sweep(&config).unwrap()).unwrap();
    let second = serde_json::to_string(&harness::run_sweep(&config).unwrap()).unwrap();
    let serial = serde_json::to_string(&harness::run_sweep_serial(&config).unwrap()).unwrap();
    assert_eq!(first, second, "parallel runs differ");
    assert_eq!(first, serial, "serial and parallel runs differ");
    println!(
        "acceptance 09 determinism: PASS (byte-identical summaries, {} bytes)",
        first.len()
    );
}

#[test]
fn acceptance_10_split_point_bound() {
    let f = parse("x").unwrap();
    let g = parse("1").unwrap();

    // Oracle: sub-interval moments ∫_0^(1/2) x^2 = 1/24 and
    // ∫_(1/2)^1 x^2 = 7/24, each paired with width 1/2.
    let oracle = (1.0f64 / 48.0).sqrt() + (7.0f64 / 48.0).sqrt();
    let half = split_point_bound(&f, &g, &p2(), &unit(), 0.5, &cfg()).unwrap();
    assert_within("lambda = 1/2", half, oracle, 1e-9);

    let classical = classical_bound(&f, &g, &p2(), &unit(), &cfg()).unwrap();
    for lambda in [0.0, 1.0] {
        let v = split_point_bound(&f, &g, &p2(), &unit(), lambda, &cfg()).unwrap();
        assert!(
            (v - classical).abs() <= 1e-10 * classical,
            "lambda = {lambda}: {v} vs classical {classical}"
        );
    }
    println!(
        "acceptance 10 split-point bound: PASS (half-split {half:.10}, endpoints match classical)"
    );
}
