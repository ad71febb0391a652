mod common;

use std::fs;
use std::path::Path;

use bosesep::format::{
    from_json, read_json, read_state, to_json, CertificateFile, ReportFile, StateFile,
};
use bosesep::separability::Verdict;
use bosesep::states::Basis;
use common::{code, run_in, stdout};
use tempfile::TempDir;

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run_in(dir, args);
    assert_eq!(
        code(&out),
        0,
        "bosesep {}: {}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr)
    );
    stdout(&out)
}

fn exit(dir: &Path, args: &[&str]) -> i32 {
    code(&run_in(dir, args))
}

#[test]
fn dim_prints_the_symmetric_dimension() {
    let d = TempDir::new().unwrap();
    assert_eq!(ok(d.path(), &["dim", "--n", "3", "--k", "3"]).trim(), "10");
    assert_eq!(ok(d.path(), &["dim", "--n", "4", "--k", "3"]).trim(), "20");
    assert_eq!(ok(d.path(), &["dim", "--n", "3", "--k", "1"]).trim(), "3");
    assert_eq!(exit(d.path(), &["dim", "--n", "three", "--k", "3"]), 2);
}

#[test]
fn gen_writes_expected_files() {
    let d = TempDir::new().unwrap();
    ok(
        d.path(),
        &[
            "gen", "--kind", "ghz", "--n", "3", "--k", "3", "--out", "ghz.json",
        ],
    );
    let ghz = read_state(&d.path().join("ghz.json")).unwrap();
    assert_eq!(ghz.basis, Basis::Full);
    assert_eq!((ghz.matrix.rows(), ghz.matrix.cols()), (27, 27));

    ok(
        d.path(),
        &[
            "gen",
            "--kind",
            "dicke",
            "--n",
            "3",
            "--k",
            "3",
            "--occ",
            "2,1,0",
            "--out",
            "dicke.json",
        ],
    );
    let dicke = read_state(&d.path().join("dicke.json"))
        .unwrap()
        .full_matrix()
        .unwrap();
    // projector onto (|001⟩+|010⟩+|100⟩)/√3
    for i in [1, 3, 9] {
        for j in [1, 3, 9] {
            assert!((dicke[(i, j)].re - 1.0 / 3.0).abs() < 1e-15);
        }
    }
    assert!((dicke.trace().re - 1.0).abs() < 1e-15);

    assert_eq!(
        exit(
            d.path(),
            &[
                "gen", "--kind", "dicke", "--n", "3", "--k", "3", "--occ", "2,2,0", "--out",
                "x.json"
            ]
        ),
        2
    );
}

#[test]
fn gen_is_deterministic_per_seed() {
    let d = TempDir::new().unwrap();
    let args = |out: &'static str| {
        [
            "gen",
            "--kind",
            "random-separable",
            "--n",
            "3",
            "--k",
            "3",
            "--rank",
            "9",
            "--seed",
            "7",
            "--out",
            out,
        ]
    };
    ok(d.path(), &args("a.json"));
    ok(d.path(), &args("b.json"));
    assert_eq!(
        fs::read(d.path().join("a.json")).unwrap(),
        fs::read(d.path().join("b.json")).unwrap()
    );
}

#[test]
fn gen_output_is_byte_stable_through_parse_and_serialize() {
    let d = TempDir::new().unwrap();
    for kind in ["random-pure", "ghz"] {
        ok(
            d.path(),
            &[
                "gen", "--kind", kind, "--n", "3", "--k", "3", "--seed", "11", "--out", "s.json",
            ],
        );
        let text = fs::read_to_string(d.path().join("s.json")).unwrap();
        let parsed: StateFile = from_json(&text).unwrap();
        let again = to_json(&StateFile::from_record(&parsed.to_record().unwrap())).unwrap();
        assert_eq!(again.trim_end(), text.trim_end());
    }
}

#[test]
fn classify_examples() {
    let d = TempDir::new().unwrap();
    ok(
        d.path(),
        &[
            "gen", "--kind", "ghz", "--n", "3", "--k", "3", "--out", "ghz.json",
        ],
    );
    ok(
        d.path(),
        &[
            "gen",
            "--kind",
            "basis-mixture",
            "--n",
            "3",
            "--k",
            "3",
            "--out",
            "mix.json",
        ],
    );
    ok(
        d.path(),
        &[
            "gen",
            "--kind",
            "symmetric-mixed",
            "--n",
            "3",
            "--k",
            "3",
            "--out",
            "sym.json",
        ],
    );

    let out = run_in(d.path(), &["classify", "--in", "ghz.json"]);
    assert_eq!((code(&out), stdout(&out).trim()), (4, "EntangledNPT"));
    let out = run_in(
        d.path(),
        &["classify", "--in", "mix.json", "--report", "r.json"],
    );
    assert_eq!((code(&out), stdout(&out).trim()), (0, "Separable (R-T1)"));
    let out = run_in(
        d.path(),
        &["classify", "--in", "sym.json", "--report", "u.json"],
    );
    assert_eq!(
        (code(&out), stdout(&out).trim()),
        (5, "Undetermined, window [10,10]")
    );

    let report: ReportFile = read_json(&d.path().join("u.json")).unwrap();
    assert_eq!(report.schema, "bose-report-v1");
    assert_eq!(report.report.verdict, Verdict::Undetermined);
    assert_eq!(report.window.map(|w| (w.lo, w.hi)), Some((10, 10)));
    let text = fs::read_to_string(d.path().join("r.json")).unwrap();
    assert!(text.contains("\"verdict\":\"Separable\"") && text.contains("\"rule_fired\":\"R-T1\""));
}

#[test]
fn classify_rejects_a_malformed_file() {
    let d = TempDir::new().unwrap();
    fs::write(d.path().join("bad.json"), "{\"schema\":\"bose-state-v1\"").unwrap();
    assert_eq!(exit(d.path(), &["classify", "--in", "bad.json"]), 2);
    assert_eq!(exit(d.path(), &["classify", "--in", "absent.json"]), 3);
}

#[test]
fn decompose_examples() {
    let d = TempDir::new().unwrap();
    ok(
        d.path(),
        &[
            "gen",
            "--kind",
            "product",
            "--n",
            "3",
            "--k",
            "3",
            "--vector",
            "0.6,0+0.8i,0",
            "--out",
            "p.json",
        ],
    );
    ok(
        d.path(),
        &["decompose", "--in", "p.json", "--out", "p-cert.json"],
    );
    let cert: CertificateFile = read_json(&d.path().join("p-cert.json")).unwrap();
    assert_eq!(cert.terms.len(), 1);

    ok(
        d.path(),
        &[
            "gen",
            "--kind",
            "basis-mixture",
            "--n",
            "3",
            "--k",
            "3",
            "--out",
            "mix.json",
        ],
    );
    ok(
        d.path(),
        &[
            "decompose",
            "--in",
            "mix.json",
            "--out",
            "cert.json",
            "--seed",
            "4",
        ],
    );
    let cert: CertificateFile = read_json(&d.path().join("cert.json")).unwrap();
    assert_eq!(cert.schema, "bose-certificate-v1");
    assert_eq!(cert.terms.len(), 3);
    assert!(cert.trace_distance <= 1e-9);
    let state = read_state(&d.path().join("mix.json")).unwrap();
    assert!(
        cert.to_certificate()
            .unwrap()
            .trace_distance_to(&state)
            .unwrap()
            <= 1e-9
    );

    ok(
        d.path(),
        &[
            "gen", "--kind", "ghz", "--n", "3", "--k", "3", "--out", "ghz.json",
        ],
    );
    let out = run_in(
        d.path(),
        &["decompose", "--in", "ghz.json", "--out", "g.json"],
    );
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("EntangledNPT"));
    assert!(!d.path().join("g.json").exists());
}

#[test]
fn hunt_examples() {
    let d = TempDir::new().unwrap();
    let args = |out: &'static str| {
        [
            "hunt", "--n", "3", "--k", "3", "--rank", "10", "--trials", "10", "--seed", "1",
            "--out", out,
        ]
    };
    let summary = ok(d.path(), &args("a.jsonl"));
    ok(d.path(), &args("b.jsonl"));
    assert!(summary.starts_with("trials=10 converged="), "{summary}");
    assert!(summary.contains(" ppt_in_window=") && summary.contains(" flagged="));
    let a = fs::read(d.path().join("a.jsonl")).unwrap();
    assert_eq!(a, fs::read(d.path().join("b.jsonl")).unwrap());
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 10);

    let out = run_in(
        d.path(),
        &[
            "hunt", "--n", "3", "--k", "3", "--rank", "9", "--trials", "1", "--seed", "1",
        ],
    );
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("[10,10]"));

    let summary = ok(
        d.path(),
        &[
            "hunt", "--n", "4", "--k", "3", "--rank", "17", "--trials", "1", "--seed", "1",
            "--out", "c.jsonl",
        ],
    );
    assert!(summary.starts_with("trials=1 "), "{summary}");
}

#[test]
fn hunt_without_out_streams_records() {
    let d = TempDir::new().unwrap();
    let out = run_in(
        d.path(),
        &[
            "hunt",
            "--n",
            "3",
            "--k",
            "3",
            "--rank",
            "10",
            "--trials",
            "2",
            "--seed",
            "5",
            "--sequential",
        ],
    );
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().count(), 2);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("trials=2 "));
}

#[test]
fn pt_twice_restores_the_state() {
    let d = TempDir::new().unwrap();
    ok(
        d.path(),
        &[
            "gen",
            "--kind",
            "random-pure",
            "--n",
            "3",
            "--k",
            "3",
            "--seed",
            "2",
            "--out",
            "s.json",
        ],
    );
    ok(
        d.path(),
        &["pt", "--in", "s.json", "--parties", "1", "--out", "t.json"],
    );
    ok(
        d.path(),
        &["pt", "--in", "t.json", "--parties", "1", "--out", "u.json"],
    );
    let original = read_state(&d.path().join("s.json"))
        .unwrap()
        .full_matrix()
        .unwrap();
    let once = read_state(&d.path().join("t.json")).unwrap().matrix;
    let twice = read_state(&d.path().join("u.json")).unwrap().matrix;
    assert!(original.max_abs_diff(&once) > 1e-3);
    assert!(original.max_abs_diff(&twice) <= 1e-15);
}

#[test]
fn pt_leaves_a_diagonal_state_unchanged() {
    let d = TempDir::new().unwrap();
    ok(
        d.path(),
        &[
            "gen",
            "--kind",
            "basis-mixture",
            "--n",
            "3",
            "--k",
            "3",
            "--out",
            "m.json",
        ],
    );
    ok(
        d.path(),
        &[
            "pt",
            "--in",
            "m.json",
            "--parties",
            "0,2",
            "--out",
            "t.json",
        ],
    );
    let a = read_state(&d.path().join("m.json")).unwrap().matrix;
    let b = read_state(&d.path().join("t.json")).unwrap().matrix;
    assert_eq!(a, b);
}

#[test]
fn verify_accepts_hunt_output_and_rejects_tampering() {
    let d = TempDir::new().unwrap();
    ok(
        d.path(),
        &[
            "hunt", "--n", "3", "--k", "3", "--rank", "10", "--trials", "3", "--seed", "9",
            "--out", "h.jsonl",
        ],
    );
    assert!(ok(d.path(), &["verify", "--in", "h.jsonl"]).contains("verified=3 failed=0"));

    let text = fs::read_to_string(d.path().join("h.jsonl")).unwrap();
    let key = "\"support_residual\":";
    let at = text.find(key).unwrap() + key.len();
    let end = at + text[at..].find(',').unwrap();
    let tampered = format!("{}0.5{}", &text[..at], &text[end..]);
    fs::write(d.path().join("t.jsonl"), tampered).unwrap();
    let out = run_in(d.path(), &["verify", "--in", "t.jsonl"]);
    assert_eq!(code(&out), 7);
    assert!(stdout(&out).contains("verified=2 failed=1"));

    fs::write(d.path().join("junk.jsonl"), "not json\n").unwrap();
    assert_eq!(exit(d.path(), &["verify", "--in", "junk.jsonl"]), 2);
}
