use std::fs;

use isingqc::runner::output::amplitudes_csv;
use isingqc::runner::{emit_outputs, sample_outcomes, sweep_rabi_with, Execution, RunArtifacts, SweepSpec};
use isingqc::*;

fn zero4() -> StateVector {
    StateVector::basis(4, BasisIndex(0)).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

#[test]
fn ideal_amplitudes_table() {
    let seq = shor4_sequence(&ChainConfig::default_chain(), 0.1).unwrap();
    let (state, _) = run_sequence(&seq, &zero4(), Mode::Ideal, &IntegratorSettings::default()).unwrap();
    let csv = amplitudes_csv(&state, &state).unwrap();
    assert!(csv.starts_with("alpha,bitstring,re,im,re_ideal,im_ideal,re_diff,im_diff\n"));
    assert!(csv.contains("\n11,1011,"));
    let re = column(&csv, "re");
    for (alpha, v) in re.iter().enumerate() {
        let expected = if [1, 3, 9, 11].contains(&alpha) { 0.5 } else { 0.0 };
        assert!((v - expected).abs() < 1e-12, "alpha {alpha}: {v}");
    }
}

#[test]
fn full_run_errors_concentrate_on_the_support() {
    let seq = shor4_sequence(&ChainConfig::default_chain(), 0.1).unwrap();
    let settings = IntegratorSettings::default();
    let (ideal, _) = run_sequence(&seq, &zero4(), Mode::Ideal, &settings).unwrap();
    let (full, _) = run_sequence(&seq, &zero4(), Mode::Full, &settings).unwrap();
    let csv = amplitudes_csv(&full, &ideal).unwrap();
    let im = column(&csv, "im_diff");
    let worst = (0..16).max_by(|&a, &b| im[a].abs().total_cmp(&im[b].abs())).unwrap();
    assert!([1, 3, 9, 11].contains(&worst), "largest imaginary error at {worst}");
}

#[test]
fn serial_and_parallel_sweeps_are_identical() {
    let seq = shor4_sequence(&ChainConfig::default_chain(), 0.1).unwrap().prefix(3);
    let mut spec = SweepSpec::new(seq, zero4());
    spec.points = 6;
    spec.omega_min = 0.2;
    spec.omega_max = 0.45;
    let settings = IntegratorSettings::default();
    for mode in [Mode::Block, Mode::Full] {
        spec.mode = mode;
        let a = sweep_rabi_with(&spec, &settings, Execution::Serial).unwrap();
        let b = sweep_rabi_with(&spec, &settings, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 6);
        assert_eq!(a[0].omega, 0.2);
        assert_eq!(a[5].omega, 0.45);
    }
}

#[test]
fn sweep_rejects_bad_ranges() {
    let seq = shor4_sequence(&ChainConfig::default_chain(), 0.1).unwrap();
    let mut spec = SweepSpec::new(seq, zero4());
    spec.omega_min = 0.5;
    assert!(sweep_rabi_with(&spec, &IntegratorSettings::default(), Execution::Serial).is_err());
}

#[test]
fn outputs_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let seq = shor4_sequence(&ChainConfig::default_chain(), 0.1).unwrap();
    let (state, trace) = run_sequence(&seq, &zero4(), Mode::Block, &IntegratorSettings::default()).unwrap();
    let report = x_register_probabilities(&state).unwrap();
    let artifacts = RunArtifacts {
        amplitudes: Some((state.clone(), state)),
        trace: Some(trace),
        sweep: None,
        report: Some(report.to_string()),
    };
    let written = emit_outputs(dir.path(), &artifacts).unwrap();
    assert_eq!(written.len(), 3);
    let trace_csv = fs::read_to_string(dir.path().join("fidelity_trace.csv")).unwrap();
    assert!(trace_csv.starts_with("t,F,pulse_index\n0,1,0\n"));
    assert_eq!(trace_csv.lines().count(), 14);
    let text = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(text.contains("inferred period T = 2"));
    assert!(!dir.path().join("sweep.csv").exists());
}

#[test]
fn sampling_is_seeded() {
    let probs = [0.5, 0.0, 0.5, 0.0];
    let counts = sample_outcomes(&probs, 1000, 9).unwrap();
    assert_eq!(counts, sample_outcomes(&probs, 1000, 9).unwrap());
    assert_eq!(counts.iter().sum::<usize>(), 1000);
    assert_eq!(counts[1] + counts[3], 0);
    assert!((400..600).contains(&counts[0]));
}
