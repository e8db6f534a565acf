mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::eq1_text;
use odelump::symbolic::SolverCommand;

fn odelump(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_odelump")).args(args).env_remove("ODELUMP_SOLVER").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn golden(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name).to_string_lossy().into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn have_solver() -> bool {
    SolverCommand::from_env().is_available()
}

#[test]
fn forward_reduction_of_the_example() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "eq1.ode", &eq1_text("2", "3"));
    let out_file = path(dir.path(), "red.ode");
    let out = odelump(&["reduce", "--mode", "fde", "--in", &input, "--partition", "one-block", "--out", &out_file]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "{x1}, {x2, x3}");
    let reduced = fs::read_to_string(&out_file).unwrap();
    assert!(reduced.starts_with("// partition: {x1}, {x2, x3}\n"), "{reduced}");
    assert!(reduced.contains("d(x2_x3) = 5*x1 - x2_x3"), "{reduced}");
    assert!(reduced.contains("x2_x3 = 0"), "{reduced}");
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let fine = write(dir.path(), "eq.ode", &eq1_text("1", "1"));
    let bad = write(dir.path(), "neq.ode", &eq1_text("1", "2"));
    let out = odelump(&["check", "--mode", "bde", "--in", &fine]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = odelump(&["check", "--mode", "bde", "--in", &bad]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("(x2, x3)"), "{}", stderr(&out));
    let out = odelump(&["check", "--mode", "fde", "--in", &bad]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn check_without_partition_is_an_input_error() {
    let out = odelump(&["check", "--mode", "bde", "--in", &golden("lotka_volterra.ode")]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("no partition"));
}

#[test]
fn parse_errors_carry_positions() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "bad.ode",
        "begin model\n  begin init x = 1 end init\n  begin ode d(x) = y end ode\nend model\n",
    );
    let out = odelump(&["reduce", "--mode", "bde", "--in", &input, "--out", &path(dir.path(), "o.ode")]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("bad.ode:3:20: undeclared variable `y`"), "{}", stderr(&out));
    assert!(!dir.path().join("o.ode").exists());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&odelump(&["reduce", "--mode", "bde"])), 2);
    assert_eq!(code(&odelump(&["frobnicate"])), 2);
    assert_eq!(code(&odelump(&["reduce", "--mode", "xde", "--in", "a", "--out", "b"])), 2);
    assert_eq!(code(&odelump(&["--version"])), 0);
}

#[test]
fn reduce_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for model in ["two_site_binding.ode", "ring5.ode", "enzyme.ode", "star.ode"] {
        for mode in ["bde", "fde"] {
            let runs: Vec<(i32, Vec<u8>)> = (0..3)
                .map(|k| {
                    let out_file = path(dir.path(), &format!("{model}.{mode}.{k}"));
                    let out = odelump(&["reduce", "--mode", mode, "--in", &golden(model), "--out", &out_file]);
                    (code(&out), fs::read(&out_file).unwrap_or_default())
                })
                .collect();
            assert!(runs.windows(2).all(|w| w[0] == w[1]), "{model} {mode}");
            assert_eq!(runs[0].0, 0, "{model} {mode}");
        }
    }
}

#[test]
fn report_has_stable_fields() {
    let dir = tempfile::tempdir().unwrap();
    let report = path(dir.path(), "r.json");
    let out = odelump(&[
        "reduce",
        "--mode",
        "bde",
        "--in",
        &golden("two_site_binding.ode"),
        "--out",
        &path(dir.path(), "o.ode"),
        "--report",
        &report,
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let keys: Vec<&str> = json.as_object().unwrap().keys().map(String::as_str).collect();
    for key in [
        "mode",
        "backend",
        "input",
        "iterations",
        "blocks_before",
        "blocks_after",
        "variables_before",
        "variables_after",
        "monomials_before",
        "monomials_after",
        "wall_time_ms",
        "warnings",
    ] {
        assert!(keys.contains(&key), "missing {key}");
    }
    assert_eq!(json["mode"], "bde");
    assert_eq!(json["backend"], "syntactic");
    assert!(json["variables_after"].as_u64() <= json["variables_before"].as_u64());
    assert!(json["blocks_after"].as_u64() >= json["blocks_before"].as_u64());
    assert_eq!(json["variables_after"], 4);
}

#[test]
fn from_init_keeps_observables_alone() {
    let dir = tempfile::tempdir().unwrap();
    let model = "begin model
  begin init a = 1 b = 1 c = 1 end init
  begin ode d(a) = -a d(b) = -b d(c) = -c end ode
  begin observe b end observe
end model";
    let input = write(dir.path(), "m.ode", model);
    let out = odelump(&["reduce", "--mode", "bde", "--in", &input, "--out", &path(dir.path(), "o.ode")]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "{a, c}, {b}");
    let out = odelump(&[
        "reduce",
        "--mode",
        "bde",
        "--partition",
        "one-block",
        "--in",
        &input,
        "--out",
        &path(dir.path(), "o.ode"),
    ]);
    assert_eq!(stdout(&out).trim(), "{a, c}, {b}");
}

#[test]
fn nonuniform_init_warns() {
    let dir = tempfile::tempdir().unwrap();
    let out = odelump(&[
        "reduce",
        "--mode",
        "bde",
        "--partition",
        "file",
        "--in",
        &golden("eq1.ode"),
        "--out",
        &path(dir.path(), "o.ode"),
    ]);
    // eq1 has k1 != k2, so the file partition is refined to singletons
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "{x1}, {x2}, {x3}");
    let dir2 = tempfile::tempdir().unwrap();
    let input = write(dir2.path(), "m.ode", &eq1_text("1", "1").replace("x2 = 0", "x2 = 1"));
    let out = odelump(&[
        "reduce",
        "--mode",
        "bde",
        "--partition",
        "file",
        "--in",
        &input,
        "--out",
        &path(dir2.path(), "o.ode"),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "{x1}, {x2, x3}");
    assert!(stderr(&out).contains("not uniformly initialized"), "{}", stderr(&out));
}

#[test]
fn simulate_and_compare() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "eq1.ode", &eq1_text("2", "3"));
    let red = path(dir.path(), "red.ode");
    assert_eq!(code(&odelump(&["reduce", "--mode", "fde", "--in", &input, "--out", &red])), 0);
    let traj = path(dir.path(), "t.csv");
    let out = odelump(&[
        "simulate",
        "--in",
        &input,
        "--t-end",
        "10",
        "--dt",
        "0.001",
        "--sample",
        "100",
        "--out",
        &traj,
        "--compare",
        &red,
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let err: f64 = stdout(&out).trim().strip_prefix("max error: ").unwrap().parse().unwrap();
    assert!(err <= 1e-6);
    let csv = fs::read_to_string(&traj).unwrap();
    assert_eq!(csv.lines().next(), Some("time,x1,x2,x3"));
    assert_eq!(csv.lines().count(), 102);

    // the header alone is enough when the input has no partition
    let bare = write(
        dir.path(),
        "bare.ode",
        &eq1_text("2", "3").replace("  begin partition\n    {x1}, {x2, x3}\n  end partition\n", ""),
    );
    let out = odelump(&["simulate", "--in", &bare, "--t-end", "1", "--dt", "0.01", "--out", &traj, "--compare", &red]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let out = odelump(&["simulate", "--in", &bare, "--t-end", "1", "--dt", "0.01", "--out", &traj, "--compare", &bare]);
    assert_eq!(code(&out), 2);
    let out = odelump(&["simulate", "--in", &bare, "--t-end", "1", "--dt", "-1", "--out", &traj]);
    assert_eq!(code(&out), 2);
}

#[test]
fn convert_targets() {
    let dir = tempfile::tempdir().unwrap();
    let rn = path(dir.path(), "rn.ode");
    assert_eq!(code(&odelump(&["convert", "--in", &golden("eq1.ode"), "--to", "rn", "--out", &rn])), 0);
    let text = fs::read_to_string(&rn).unwrap();
    assert!(text.contains("begin reactions") && text.contains("x1 -> x1 + x2, 2"), "{text}");
    let back = path(dir.path(), "back.ode");
    assert_eq!(code(&odelump(&["convert", "--in", &rn, "--to", "ode", "--out", &back])), 0);
    assert!(fs::read_to_string(&back).unwrap().contains("d(x2) = 2*x1 - x2"));

    let smt = path(dir.path(), "q.smt2");
    assert_eq!(code(&odelump(&["convert", "--in", &golden("eq1.ode"), "--to", "smt2", "--out", &smt])), 2);
    assert_eq!(
        code(&odelump(&["convert", "--in", &golden("eq1.ode"), "--to", "smt2", "--mode", "fde", "--out", &smt])),
        0
    );
    let script = fs::read_to_string(&smt).unwrap();
    assert!(script.starts_with("(set-logic QF_NRA)\n") && script.contains("(declare-const |x3'| Real)"), "{script}");
    assert_eq!(
        code(&odelump(&[
            "convert",
            "--in",
            &golden("lotka_volterra.ode"),
            "--to",
            "smt2",
            "--mode",
            "bde",
            "--out",
            &smt
        ])),
        2
    );
    assert_eq!(code(&odelump(&["convert", "--in", &golden("min_symmetry.ode"), "--to", "rn", "--out", &rn])), 2);
}

#[test]
fn oracle_subcommand() {
    // every drift vanishes on the diagonal, so one block survives
    let out = odelump(&["oracle", "--mode", "bde", "--in", &golden("star.ode"), "--partition", "one-block"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "{hub, leaf1, leaf2, leaf3}");
    let out = odelump(&["oracle", "--mode", "fde", "--in", &golden("eq1.ode"), "--partition", "one-block"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "{x1}, {x2, x3}");

    let dir = tempfile::tempdir().unwrap();
    let names: Vec<String> = (1..=11).map(|i| format!("v{i}")).collect();
    let model = format!(
        "begin model begin init {} end init begin ode {} end ode end model",
        names.iter().map(|n| format!("{n} = 0")).collect::<Vec<_>>().join(" "),
        names.iter().map(|n| format!("d({n}) = -{n}")).collect::<Vec<_>>().join(" "),
    );
    let big = write(dir.path(), "big.ode", &model);
    let out = odelump(&["oracle", "--mode", "bde", "--in", &big]);
    assert_eq!(code(&out), 2);
}

#[test]
fn missing_solver_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = path(dir.path(), "o.ode");
    let out = odelump(&[
        "reduce",
        "--mode",
        "bde",
        "--in",
        &golden("eq1.ode"),
        "--backend",
        "smt",
        "--solver-cmd",
        "no-such-solver -in",
        "--out",
        &o,
    ]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("no-such-solver"));
    let out = Command::new(env!("CARGO_BIN_EXE_odelump"))
        .args(["check", "--mode", "bde", "--in", &golden("min_symmetry.ode")])
        .env("ODELUMP_SOLVER", "no-such-solver")
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
}

#[test]
fn syntactic_backend_rejects_nonpolynomial_models() {
    let dir = tempfile::tempdir().unwrap();
    let out = odelump(&[
        "reduce",
        "--mode",
        "bde",
        "--backend",
        "syntactic",
        "--in",
        &golden("min_symmetry.ode"),
        "--out",
        &path(dir.path(), "o.ode"),
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--backend smt"));
}

#[test]
fn backends_agree_on_polynomial_models() {
    if !have_solver() {
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    for model in ["eq1.ode", "eq1_symmetric.ode", "chain4.ode", "star.ode", "two_site_binding.ode", "catalysis.ode"] {
        for mode in ["bde", "fde"] {
            let run = |backend: &str| {
                let out = odelump(&[
                    "reduce",
                    "--mode",
                    mode,
                    "--backend",
                    backend,
                    "--in",
                    &golden(model),
                    "--out",
                    &path(dir.path(), "o.ode"),
                ]);
                assert_eq!(code(&out), 0, "{model} {mode} {backend}: {}", stderr(&out));
                stdout(&out)
            };
            assert_eq!(run("syntactic"), run("smt"), "{model} {mode}");
        }
    }
}

#[test]
fn nonpolynomial_models_use_the_solver() {
    if !have_solver() {
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let red = path(dir.path(), "o.ode");
    let out = odelump(&[
        "reduce",
        "--mode",
        "bde",
        "--in",
        &golden("min_symmetry.ode"),
        "--out",
        &red,
        "--report",
        &path(dir.path(), "r.json"),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "{x1, x2}, {x3}");
    let reduced = fs::read_to_string(&red).unwrap();
    assert!(reduced.contains("d(x1) = min(x1, x1)"), "{reduced}");
    let report = fs::read_to_string(path(dir.path(), "r.json")).unwrap();
    assert!(report.contains("\"backend\": \"smt\""));

    let out = odelump(&["check", "--mode", "bde", "--in", &golden("min_symmetry.ode")]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let out = odelump(&["reduce", "--mode", "fde", "--in", &golden("rational_drift.ode"), "--out", &red]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "{s}, {t}");
}
