use std::path::Path;
use std::process::{Command, Output};

use attn::io::{
    from_json, to_json, IcRecord, OracleCheckRecord, OutcomeRecord, PolicyFile, VerifyRecord,
};
use attn_core::{Belief, InformationPolicy};

fn attn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_attn"))
        .args(args)
        .output()
        .expect("run attn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write_policy(dir: &Path, name: &str, f: &PolicyFile) -> String {
    let path = dir.join(name);
    std::fs::write(&path, to_json(f).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

fn full_disclosure_file() -> PolicyFile {
    let prior = Belief::uniform(3);
    let p = InformationPolicy::full_disclosure(&prior).unwrap();
    PolicyFile::from_policy(&[-1.0, 0.0, 1.0], &prior, &p)
}

#[test]
fn solve_examples() {
    let o = attn(&["solve", "--prior", "1/3,1/3,1/3", "--kappa", "0.3"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("regime      FullRevelation"));
    assert!(text.contains("payoff      0.000000"));

    let o = attn(&["solve", "--prior", "1/3,1/3,1/3", "--kappa", "3"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("NoDisclosure"));
    assert!(text.contains("payoff      -0.666667"));

    let o = attn(&["solve", "--prior", "0,0.5,0.5", "--kappa", "1"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("full support"));
}

#[test]
fn bad_flags_exit_two() {
    assert_eq!(
        code(&attn(&["solve", "--prior", "1/3,1/3,1/3", "--kappa", "-1"])),
        2
    );
    assert_eq!(
        code(&attn(&[
            "solve",
            "--prior",
            "1/3,1/3,1/3",
            "--kappa",
            "nan"
        ])),
        2
    );
    assert_eq!(
        code(&attn(&["solve", "--prior", "0.5,0.6,-0.1", "--kappa", "1"])),
        2
    );
    assert_eq!(
        code(&attn(&["solve", "--prior", "1/3,1/3", "--kappa", "1"])),
        2
    );
    assert_eq!(code(&attn(&["solve", "--kappa", "1"])), 2);
    assert_eq!(code(&attn(&["frobnicate"])), 2);
}

#[test]
fn solve_json_round_trips() {
    for (prior, kappa) in [
        ("1/3,1/3,1/3", "0.6"),
        ("1/3,1/3,1/3", "6/7"),
        ("0.2,0.5,0.3", "1.3"),
        ("0.3,0.5,0.2", "1.0"),
        ("0.25,0.5,0.25", "0.2"),
    ] {
        let o = attn(&[
            "--format", "json", "solve", "--prior", prior, "--kappa", kappa,
        ]);
        assert_eq!(code(&o), 0);
        let text = stdout(&o);
        let rec: OutcomeRecord = from_json(&text).unwrap();
        assert_eq!(to_json(&rec).unwrap() + "\n", text);
        let again: OutcomeRecord = from_json(&to_json(&rec).unwrap()).unwrap();
        assert_eq!(again.payoff.to_bits(), rec.payoff.to_bits());
        assert!(rec.regime().is_some());
    }
}

#[test]
fn check_ic_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let full = write_policy(dir.path(), "full.json", &full_disclosure_file());
    assert_eq!(code(&attn(&["check-ic", &full, "--kappa", "0.4"])), 0);
    let o = attn(&["check-ic", &full, "--kappa", "1"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("VIOLATED"));

    let prior = Belief::new(vec![0.2, 0.5, 0.3]).unwrap();
    let single = PolicyFile::from_policy(
        &[-1.0, 0.0, 1.0],
        &prior,
        &InformationPolicy::no_information(&prior),
    );
    let single = write_policy(dir.path(), "single.json", &single);
    for kappa in ["0.1", "1", "7"] {
        assert_eq!(code(&attn(&["check-ic", &single, "--kappa", kappa])), 0);
    }

    let o = attn(&[
        "check-ic",
        &full,
        "--kappa",
        "0.4",
        "--with-oracle",
        "--grid",
        "20",
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = attn(&[
        "--format",
        "json",
        "check-ic",
        &full,
        "--kappa",
        "1",
        "--with-oracle",
        "--grid",
        "20",
    ]);
    assert_eq!(code(&o), 1);
    let rec: IcRecord = from_json(&stdout(&o)).unwrap();
    assert_eq!(rec.oracle.as_ref().unwrap().verdict, "NotIC");
    assert_eq!(to_json(&rec).unwrap() + "\n", stdout(&o));
}

#[test]
fn check_ic_rejects_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"states\": [-1, 0, 1], \"prior\": [0.5, 0.5]").unwrap();
    assert_eq!(
        code(&attn(&["check-ic", path.to_str().unwrap(), "--kappa", "1"])),
        2
    );

    let mut f = full_disclosure_file();
    f.weights = vec![0.5, 0.5, -0.0001];
    let neg = write_policy(dir.path(), "neg.json", &f);
    assert_eq!(code(&attn(&["check-ic", &neg, "--kappa", "1"])), 2);

    let mut f = full_disclosure_file();
    f.weights = vec![0.5, 0.25, 0.25];
    let implausible = write_policy(dir.path(), "implausible.json", &f);
    assert_eq!(code(&attn(&["check-ic", &implausible, "--kappa", "1"])), 2);

    let missing = dir.path().join("missing.json");
    assert_eq!(
        code(&attn(&[
            "check-ic",
            missing.to_str().unwrap(),
            "--kappa",
            "1"
        ])),
        2
    );
}

#[test]
fn oracle_command() {
    let dir = tempfile::tempdir().unwrap();
    let full = write_policy(dir.path(), "full.json", &full_disclosure_file());
    assert_eq!(
        code(&attn(&["oracle", &full, "--kappa", "0.4", "--grid", "20"])),
        0
    );
    let o = attn(&[
        "--format", "json", "oracle", &full, "--kappa", "1", "--grid", "20",
    ]);
    assert_eq!(code(&o), 1);
    let rec: OracleCheckRecord = from_json(&stdout(&o)).unwrap();
    assert!(rec.coarse.gap > 1e-3);
    assert_eq!(to_json(&rec).unwrap() + "\n", stdout(&o));
}

fn sweep(args: &[&str]) -> (i32, Vec<csv::StringRecord>) {
    let mut all = vec!["sweep"];
    all.extend_from_slice(args);
    let o = attn(&all);
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let rows = rdr.records().map(|r| r.unwrap()).collect();
    (code(&o), rows)
}

#[test]
fn sweep_examples() {
    let (c, rows) = sweep(&[
        "--prior",
        "1/3,1/3,1/3",
        "--kappa-min",
        "0.1",
        "--kappa-max",
        "2.5",
        "--steps",
        "100",
    ]);
    assert_eq!(c, 0);
    assert_eq!(rows.len(), 100);
    let mut seq: Vec<String> = Vec::new();
    for r in &rows {
        if seq.last().map(String::as_str) != Some(&r[1]) {
            seq.push(r[1].to_string());
        }
    }
    assert_eq!(
        seq,
        [
            "FullRevelation",
            "Downplaying",
            "SeparatingExaggeration",
            "Exaggeration",
            "NoDisclosure"
        ]
    );
    let step = 2.4 / 99.0;
    for (name, at) in [
        ("Downplaying", 0.5),
        ("SeparatingExaggeration", 6.0 / 7.0),
        ("Exaggeration", 1.5),
        ("NoDisclosure", 2.0),
    ] {
        let first: f64 = rows.iter().find(|r| &r[1] == name).unwrap()[0]
            .parse()
            .unwrap();
        assert!(
            first > at - 1e-12 && first <= at + step + 1e-12,
            "{name} starts at {first}"
        );
    }

    let (c, rows) = sweep(&[
        "--prior",
        "1/3,1/3,1/3",
        "--kappa-min",
        "0.1",
        "--kappa-max",
        "2.5",
        "--steps",
        "2",
    ]);
    assert_eq!((c, rows.len()), (0, 2));

    let (c, rows) = sweep(&[
        "--prior",
        "0.2,0.5,0.3",
        "--kappa-min",
        "2.01",
        "--kappa-max",
        "9",
        "--steps",
        "7",
    ]);
    assert_eq!(c, 0);
    assert!(rows.iter().all(|r| &r[1] == "NoDisclosure"));

    assert_eq!(
        sweep(&[
            "--prior",
            "1/3,1/3,1/3",
            "--kappa-min",
            "1",
            "--kappa-max",
            "1",
            "--steps",
            "5"
        ])
        .0,
        2
    );
    assert_eq!(
        sweep(&[
            "--prior",
            "1/3,1/3,1/3",
            "--kappa-min",
            "1",
            "--kappa-max",
            "2",
            "--steps",
            "1"
        ])
        .0,
        2
    );
}

#[test]
fn sweep_writes_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = attn(&[
        "sweep",
        "--prior",
        "1/3,1/3,1/3",
        "--kappa-min",
        "0.1",
        "--kappa-max",
        "2.5",
        "--steps",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text
        .starts_with("kappa,regime,payoff,s_star,slope_used,pi_minus1,pi_plus1,pi,degenerate\n"));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn verify_examples() {
    for kappa in ["0.6", "1.0"] {
        let o = attn(&[
            "verify",
            "--prior",
            "1/3,1/3,1/3",
            "--kappa",
            kappa,
            "--grid",
            "80",
        ]);
        assert_eq!(code(&o), 0, "{}", stdout(&o));
    }
    let o = attn(&[
        "--format",
        "json",
        "verify",
        "--prior",
        "0.2,0.5,0.3",
        "--kappa",
        "1.3",
        "--grid",
        "80",
    ]);
    assert_eq!(code(&o), 0);
    let rec: VerifyRecord = from_json(&stdout(&o)).unwrap();
    assert!(rec.passed && rec.gap.abs() <= 1e-6);
    assert_eq!(to_json(&rec).unwrap() + "\n", stdout(&o));
}

#[test]
fn corrupted_threshold_fails_verification() {
    let o = attn(&[
        "verify",
        "--prior",
        "1/3,1/3,1/3",
        "--kappa",
        "0.9",
        "--grid",
        "80",
        "--perturb-k2",
        "0.2",
    ]);
    assert_eq!(code(&o), 1);
    let text = stdout(&o);
    assert!(text.contains("closed form Downplaying"));
    assert!(text.trim_end().ends_with("FAILED"));
}
