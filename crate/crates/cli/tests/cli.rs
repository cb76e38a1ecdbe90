use std::path::Path;
use std::process::{Command, Output};

use polyeig::prep::{default_rank_tol, rank_reveal};
use polyeig::{solve, CMatrix, MatrixPolynomial, SolveOptions, Structure, C64};
use polyeig_cli::check::check_outcome;
use polyeig_cli::commands::CliError;
use polyeig_cli::generate::{generate, GenKind};
use polyeig_cli::problem_file::{emit_problem, parse_problem, Format, Problem};
use polyeig_cli::report::RunReport;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyeig"))
        .args(args)
        .env_remove("POLYEIG_SEED")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn roots_of_difference_of_squares() {
    let out = bin(&["roots", "--json", "--coeffs", "-1,0", "0,0", "1,0"]);
    assert_eq!(out.status.code(), Some(0));
    let rep: RunReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep.schema, 1);
    let mut re: Vec<f64> = rep.records.iter().map(|r| r.re.unwrap()).collect();
    re.sort_by(f64::total_cmp);
    assert!((re[0] + 1.0).abs() < 1e-15 && (re[1] - 1.0).abs() < 1e-15);
    assert!(rep.records.iter().all(|r| r.berr <= 1e-15 && r.im.unwrap().abs() < 1e-15));
}

#[test]
fn roots_from_scalar_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "s.pep", "pep 1 1 scalar\n-1,0\n1,0\n");
    let out = bin(&["roots", &f, "--csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("0,finite,1e0,0e0,"));
}

#[test]
fn check_on_generated_tridiagonal_passes() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("t.pep");
    let f = f.to_str().unwrap();
    assert_eq!(bin(&["gen", "--kind", "tridiagonal", "--n", "8", "--d", "3", "--seed", "4", "-o", f]).status.code(), Some(0));
    let out = bin(&["check", f]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8(out.stdout).unwrap().ends_with("PASS\n"));
    let out = bin(&["check", f, "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["check"]["count"], 24);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bin(&["solve", "--no-such-flag", "x"]).status.code(), Some(2));
    assert_eq!(bin(&["solve", "/definitely/not/here.pep"]).status.code(), Some(2));
    assert_eq!(bin(&[]).status.code(), Some(2));
    assert_eq!(bin(&["roots"]).status.code(), Some(2));
    assert_eq!(bin(&["roots", "--coeffs", "1,0", "x,y"]).status.code(), Some(2));
    assert_eq!(bin(&["gen", "--kind", "rank-deficient-ends(3)", "--n", "3"]).status.code(), Some(2));
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
    // det P(λ) vanishes identically: the solver refuses with a failure
    let f = write(dir.path(), "sing.pep", "pep 2 1 general\n0,0 0,0\n0,0 0,0\n1,0 0,0\n0,0 0,0\n");
    let out = bin(&["solve", &f]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(bin(&["check", &f]).status.code(), Some(1));
    assert_eq!(CliError::Failure(String::new()).exit_code(), 1);
    assert_eq!(CliError::Usage(String::new()).exit_code(), 2);
}

#[test]
fn structure_violation_is_located() {
    let dir = tempfile::tempdir().unwrap();
    let body = "pep 3 1 tridiagonal\n1,0 1,0 0,0\n1,0 1,0 1,0\n0,0 1,0 1,0\n1,0 0,0 5,0\n0,0 1,0 0,0\n0,0 0,0 1,0\n";
    let f = write(dir.path(), "v.pep", body);
    let out = bin(&["solve", &f]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 5, column 9"), "{err}");
}

#[test]
fn check_detects_corrupted_vectors() {
    let p = generate(GenKind::General, 3, 2, 8).unwrap();
    let mut out = solve(&p, &SolveOptions::default()).unwrap();
    assert!(check_outcome(&p, &out).passed());
    let k = out.results.iter().position(|r| r.status == polyeig::StopStatus::Criterion1).unwrap();
    out.results[k].x = vec![C64::new(1.0, 0.0), C64::new(-2.0, 0.5), C64::new(0.3, 0.0)];
    assert!(!check_outcome(&p, &out).passed());
    out.results.pop();
    let rep = check_outcome(&p, &out);
    assert!(rep.violations.iter().any(|v| v.contains("expected nd")));
}

#[test]
fn round_trip_is_bit_identical() {
    let a0 = CMatrix::from_row_major(
        2,
        2,
        vec![C64::new(0.1, -0.0), C64::new(1e-300, 3.0), C64::new(-7.25, 1.0 / 3.0), C64::new(f64::MAX, f64::MIN_POSITIVE)],
    );
    let a1 = CMatrix::from_row_major(2, 2, vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(2.0f64.sqrt(), 0.0), C64::new(-1.0, 5e-324)]);
    let prob = Problem {
        poly: MatrixPolynomial::new(vec![a0, a1], Structure::General).unwrap(),
        name: Some("edge values".into()),
    };
    for fmt in [Format::Text, Format::Json] {
        let text = emit_problem(&prob, fmt);
        let back = parse_problem(&text, fmt).unwrap();
        assert_eq!(back, prob);
        for (a, b) in back.poly.coeffs().iter().zip(prob.poly.coeffs()) {
            for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
                assert_eq!(x.re.to_bits(), y.re.to_bits());
                assert_eq!(x.im.to_bits(), y.im.to_bits());
            }
        }
        assert_eq!(emit_problem(&back, fmt), text);
    }
}

#[test]
fn generated_files_round_trip_through_the_binary() {
    for kind in ["general", "hessenberg", "tridiagonal", "hermitian-coefficients", "rank-deficient-ends(2)"] {
        let text = bin(&["gen", "--kind", kind, "--n", "4", "--d", "2", "--seed", "11"]);
        let json = bin(&["gen", "--kind", kind, "--n", "4", "--d", "2", "--seed", "11", "--json"]);
        let a = parse_problem(std::str::from_utf8(&text.stdout).unwrap(), Format::Text).unwrap();
        let b = parse_problem(std::str::from_utf8(&json.stdout).unwrap(), Format::Json).unwrap();
        assert_eq!(a, b, "{kind}");
        let kind: GenKind = kind.parse().unwrap();
        assert_eq!(a.poly, generate(kind, 4, 2, 11).unwrap());
    }
}

#[test]
fn seed_from_environment() {
    let with_flag = bin(&["gen", "--kind", "general", "--n", "2", "--seed", "77"]);
    let with_env = Command::new(env!("CARGO_BIN_EXE_polyeig"))
        .args(["gen", "--kind", "general", "--n", "2"])
        .env("POLYEIG_SEED", "77")
        .output()
        .unwrap();
    assert_eq!(with_flag.stdout, with_env.stdout);
    assert_ne!(with_flag.stdout, bin(&["gen", "--kind", "general", "--n", "2"]).stdout);
}

#[test]
fn solve_reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("g.json");
    let f = f.to_str().unwrap();
    bin(&["gen", "--kind", "general", "--n", "5", "--d", "3", "--seed", "2", "--json", "-o", f]);
    let a: RunReport = serde_json::from_slice(&bin(&["solve", f, "--json", "--seed", "9"]).stdout).unwrap();
    let b: RunReport = serde_json::from_slice(&bin(&["solve", f, "--json", "--seed", "9"]).stdout).unwrap();
    assert_eq!(a.records, b.records);
    assert_eq!(a.records.len(), 15);
    assert_eq!(a.seed, 9);
    let csv = String::from_utf8(bin(&["solve", f, "--csv"]).stdout).unwrap();
    assert_eq!(csv.lines().count(), 16);
}

#[test]
fn rank_deficient_generator_has_expected_ranks() {
    let p = generate(GenKind::RankDeficientEnds(1), 3, 2, 5).unwrap();
    for a in [p.coeff(0), p.coeff(2)] {
        assert_eq!(rank_reveal(a, default_rank_tol(a)).rank, 2);
    }
    let t = generate(GenKind::Tridiagonal, 6, 2, 5).unwrap();
    assert_eq!(t.structure(), Structure::Tridiagonal);
}

#[test]
fn bench_emits_schema_columns() {
    let out = bin(&["bench", "--suite", "scalar-d", "--sizes", "10,20", "--repeats", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "suite,param,mean_seconds,max_berr");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("scalar-d,10,"));
    let out = bin(&["bench", "--suite", "tri-n", "--sizes", "4", "--repeats", "1", "--out", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["rows"][0]["param"], 4);
    assert_eq!(bin(&["bench", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(bin(&["bench", "--suite", "tri-n", "--repeats", "0"]).status.code(), Some(2));
}

fn mutate(src: &str, r: &mut ChaCha8Rng) -> String {
    let mut b: Vec<u8> = src.as_bytes().to_vec();
    let pieces: [&[u8]; 10] = [b"nan", b"-", b",", b" ", b"\n", b"1e400", b"pep", b"9999999999999999999", b"{", b"0,0"];
    for _ in 0..r.gen_range(1..4) {
        if b.is_empty() {
            b.extend_from_slice(pieces[r.gen_range(0..pieces.len())]);
            continue;
        }
        let at = r.gen_range(0..b.len());
        match r.gen_range(0..6) {
            0 => b[at] = r.gen(),
            1 => {
                b.remove(at);
            }
            2 => {
                let piece = pieces[r.gen_range(0..pieces.len())];
                b.splice(at..at, piece.iter().cloned());
            }
            3 => b.truncate(at),
            4 => {
                let end = (at + r.gen_range(1..20)).min(b.len());
                let chunk: Vec<u8> = b[at..end].to_vec();
                b.splice(at..at, chunk);
            }
            _ => b[at] = b"0123456789.,-e \n"[r.gen_range(0..16)],
        }
    }
    String::from_utf8_lossy(&b).into_owned()
}

#[test]
fn fuzzed_files_only_produce_diagnostics() {
    let seeds: Vec<Problem> = [
        (GenKind::General, 3, 2),
        (GenKind::Tridiagonal, 4, 1),
        (GenKind::Hessenberg, 3, 2),
        (GenKind::Scalar, 1, 4),
    ]
    .iter()
    .map(|&(k, n, d)| Problem { poly: generate(k, n, d, 1).unwrap(), name: Some("fuzz".into()) })
    .collect();
    let mut r = ChaCha8Rng::seed_from_u64(2024);
    let mut parsed = 0;
    for i in 0..1000 {
        let fmt = if i % 2 == 0 { Format::Text } else { Format::Json };
        let src = mutate(&emit_problem(&seeds[i % seeds.len()], fmt), &mut r);
        match parse_problem(&src, fmt) {
            Ok(p) => {
                parsed += 1;
                if p.poly.n() * p.poly.degree() <= 64 {
                    // must return a value or an error, never panic
                    let _ = solve(&p.poly, &SolveOptions::default());
                }
            }
            Err(e) => assert!(!e.message.is_empty()),
        }
    }
    assert!(parsed > 0 && parsed < 1000);

    let dir = tempfile::tempdir().unwrap();
    for i in 0..40 {
        let fmt = if i % 2 == 0 { Format::Text } else { Format::Json };
        let name = if fmt == Format::Json { "f.json" } else { "f.pep" };
        let f = write(dir.path(), name, &mutate(&emit_problem(&seeds[i % seeds.len()], fmt), &mut r));
        let code = bin(&["solve", &f]).status.code();
        assert!(matches!(code, Some(0..=2)), "case {i}: {code:?}");
    }
}
