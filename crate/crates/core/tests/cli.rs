mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::Dense;
use num_complex::Complex64 as C;
use serde_json::Value;
use torusgates::cli::{ClosureOutput, CompileOutput};
use torusgates::gates::UniversalityReport;
use torusgates::synth::SweepRow;
use torusgates::torus::RelationReport;
use torusgates::{CMatrix64, GeneratorSet64};

fn torusgates(args: &[&str]) -> Output {
    torusgates_env(args, &[])
}

fn torusgates_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_torusgates"));
    for (k, _) in std::env::vars().filter(|(k, _)| k.starts_with("TORUSGATES_")) {
        cmd.env_remove(k);
    }
    cmd.args(args).envs(env.iter().copied()).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_json(dir: &Path, name: &str, value: &impl serde::Serialize) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(value).unwrap()).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn generators_torus_single_qutrit() {
    let o = torusgates(&["generators", "--l", "3", "--n", "1", "--kind", "torus"]);
    assert_eq!(o.status.code(), Some(0));
    let set: GeneratorSet64 = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((set.len(), set.dim()), (2, 3));
    for (m, t) in set.mats().iter().zip(common::torus(3, 1)) {
        assert!(Dense::from_lib(m).dist(&t) < 1e-12);
    }
}

#[test]
fn generators_two_local_qubit_pair() {
    let o = torusgates(&["generators", "--l", "2", "--n", "2", "--kind", "b"]);
    assert_eq!(o.status.code(), Some(0));
    let set: GeneratorSet64 = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(set.len(), 4);
    let (id, x) = (Dense::identity(2), common::shift(2));
    let z = common::clock(2);
    let forms = [common::kron(&id, &x), common::kron(&id, &z), common::kron(&x, &x), common::kron(&z, &id)];
    for (m, f) in set.mats().iter().zip(&forms) {
        let (alpha, resid) = common::projection(&Dense::from_lib(m), f);
        assert!(alpha.norm() > 1e-8 && resid < 1e-10);
    }
}

#[test]
fn generators_dimension_bound() {
    // 3^8 = 6561 and 2^13 = 8192 exceed the default bound of 4096.
    for (l, n) in [("3", "8"), ("2", "13")] {
        let o = torusgates(&["generators", "--l", l, "--n", n]);
        assert_eq!(o.status.code(), Some(2));
        assert!(String::from_utf8_lossy(&o.stderr).contains("exceeds"));
    }
    let o = torusgates(&["generators", "--l", "2", "--n", "3", "--max-dim", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_passes_for_builtin_generators() {
    for (l, n) in [("4", "2"), ("2", "1")] {
        let o = torusgates(&["verify", "--l", l, "--n", n]);
        assert_eq!(o.status.code(), Some(0));
        let report: RelationReport<f64> = serde_json::from_str(&stdout(&o)).unwrap();
        assert!(report.passed);
    }
}

#[test]
fn verify_input_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = torusgates::torus::torus_generators::<f64>(3, 2).unwrap();
    let path = write_json(dir.path(), "good.json", &good);
    assert_eq!(torusgates(&["verify", "--input", &path]).status.code(), Some(0));

    let broken = good.clone().with_replaced(1, CMatrix64::identity(9)).unwrap();
    let path = write_json(dir.path(), "broken.json", &broken);
    let o = torusgates(&["verify", "--input", &path]);
    assert_eq!(o.status.code(), Some(1));
    let report: RelationReport<f64> = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(!report.passed);

    let corrupt = dir.path().join("corrupt.json");
    std::fs::write(&corrupt, "{\"l\": 3, \"n\": 1, \"kind\": \"torus\", \"mats\": [").unwrap();
    assert_eq!(torusgates(&["verify", "--input", corrupt.to_str().unwrap()]).status.code(), Some(2));

    let missing = dir.path().join("missing.json");
    assert_eq!(torusgates(&["verify", "--input", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn closure_tables() {
    for (l, n, count) in [("3", "1", 8), ("4", "1", 15), ("3", "2", 80)] {
        let o = torusgates(&["closure", "--l", l, "--n", n]);
        assert_eq!(o.status.code(), Some(0));
        let out: ClosureOutput = serde_json::from_str(&stdout(&o)).unwrap();
        let generation = out.generation.expect("generation runs for l >= 3");
        assert_eq!(generation.entries.len(), count);
        assert!(generation.passed && out.closure_matches_generation);
        assert_eq!(out.closure_dim, count);
    }
    let o = torusgates(&["closure", "--l", "3", "--n", "1", "--output", "csv"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("exponents,route,alpha_re,alpha_im,residual,trace,ok"));
    assert_eq!(lines.count(), 8);
}

#[test]
fn closure_for_qubits_reports_without_generation() {
    let o = torusgates(&["closure", "--l", "2", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out: ClosureOutput = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(out.generation.is_none());
    assert_eq!((out.closure_dim, out.expected_dim, out.closure_matches_generation), (10, 15, false));
}

#[test]
fn certify_reports() {
    for (l, n, dim) in [("3", "1", 8), ("3", "2", 80)] {
        let o = torusgates(&["certify", "--l", l, "--n", n]);
        assert_eq!(o.status.code(), Some(0));
        let r: UniversalityReport = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!((r.algebra_dim, r.expected_dim, r.deficient), (dim, dim, false));
    }
    let o = torusgates(&["certify", "--l", "2", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let r: UniversalityReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.expected_dim, 15);
    assert_eq!(r.deficient, r.algebra_dim < 15);
}

#[test]
fn compile_identity_target() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_json(dir.path(), "id.json", &CMatrix64::identity(3));
    let o = torusgates(&["compile", "--l", "3", "--n", "1", "--target", &path]);
    assert_eq!(o.status.code(), Some(0));
    let out: CompileOutput = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(out.sequence.gates.is_empty());
    assert!(out.phase_distance < 1e-7);
}

#[test]
fn compile_rejects_bad_targets() {
    let dir = tempfile::tempdir().unwrap();
    let wrong_dim = write_json(dir.path(), "id4.json", &CMatrix64::identity(4));
    assert_eq!(torusgates(&["compile", "--l", "3", "--n", "1", "--target", &wrong_dim]).status.code(), Some(2));
    let scaled = CMatrix64::identity(3).scale(C::new(1.5, 0.0));
    let not_unitary = write_json(dir.path(), "scaled.json", &scaled);
    let o = torusgates(&["compile", "--l", "3", "--n", "1", "--target", &not_unitary]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not unitary"));
    assert_eq!(torusgates(&["compile", "--l", "3", "--n", "1"]).status.code(), Some(2));
}

#[test]
fn compile_deficient_set_is_a_failed_check() {
    let o = torusgates(&["compile", "--l", "2", "--n", "2", "--random"]);
    let report: UniversalityReport =
        serde_json::from_str(&stdout(&torusgates(&["certify", "--l", "2", "--n", "2"]))).unwrap();
    assert_eq!(o.status.code(), Some(if report.deficient { 1 } else { 0 }));
}

#[test]
fn compile_random_sweep_csv() {
    let o = torusgates(&["compile", "--l", "3", "--n", "1", "--random", "--seed", "0", "--depth", "2", "--sweep", "1,2,4,8,16,32"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        ["m", "depth", "phase_distance", "gate_count", "wall_ms"]
    );
    let rows: Vec<SweepRow> = reader.deserialize().map(Result::unwrap).collect();
    assert_eq!(rows.iter().map(|r| r.m).collect::<Vec<_>>(), [1, 2, 4, 8, 16, 32]);
    for w in rows.windows(2) {
        assert!(w[1].phase_distance <= 1.1 * w[0].phase_distance, "{rows:?}");
    }
    assert!(rows[5].phase_distance < rows[0].phase_distance / 4.0);
}

#[test]
fn compile_is_deterministic_given_seed() {
    let run = |seed: &str| {
        let o = torusgates(&["compile", "--l", "3", "--n", "1", "--random", "--seed", seed, "--m", "4", "--threads", "2"]);
        assert_eq!(o.status.code(), Some(0));
        serde_json::from_str::<CompileOutput>(&stdout(&o)).unwrap()
    };
    let (a, b, c) = (run("7"), run("7"), run("8"));
    assert_eq!(a.sequence, b.sequence);
    assert_eq!(a.phase_distance, b.phase_distance);
    assert_ne!(a.sequence, c.sequence);
}

#[test]
fn environment_fallbacks_and_precedence() {
    let o = torusgates_env(&["certify"], &[("TORUSGATES_L", "4"), ("TORUSGATES_OUTPUT", "csv")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().nth(1), Some("4,1,15,15,false"));
    let o = torusgates_env(&["certify", "--l", "3"], &[("TORUSGATES_L", "4"), ("TORUSGATES_OUTPUT", "csv")]);
    assert_eq!(stdout(&o).lines().nth(1), Some("3,1,8,8,false"));
}

#[test]
fn json_outputs_round_trip() {
    let o = torusgates(&["generators", "--l", "3", "--n", "2", "--kind", "b"]);
    let text = stdout(&o);
    let set: GeneratorSet64 = serde_json::from_str(&text).unwrap();
    let again = serde_json::to_string_pretty(&set).unwrap();
    let (v1, v2): (Value, Value) = (serde_json::from_str(&text).unwrap(), serde_json::from_str(&again).unwrap());
    assert_eq!(v1, v2);
}
