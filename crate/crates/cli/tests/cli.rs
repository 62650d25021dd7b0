//! Runs the `foidl` binary end to end.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use foidl_core::{LearnedProgram, Program, CSV_HEADER};

const VERBS: &str = "walk\twalked\ntalk\ttalked\njump\tjumped\nkick\tkicked\nact\tacted\nhelp\thelped\n\
                     bake\tbaked\nlove\tloved\nhope\thoped\ncry\tcried\nstudy\tstudied\napply\tapplied\n\
                     sleep\tslept\nkeep\tkept\ngo\twent\n";

const EXPERT: &str = "past(A,B) :- split(A,C,[e,e,p]), split(B,C,[e,p,t]), !.\n\
                      past(A,B) :- split(A,C,[y]), split(B,C,[i,e,d]), !.\n\
                      past(A,B) :- split(A,C,[e]), split(B,A,[d]), !.\n\
                      past(A,B) :- split(B,A,[e,d]).\n";

fn foidl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_foidl"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn learn_writes_a_loadable_program() {
    let dir = tempfile::tempdir().unwrap();
    let train = dir.path().join("verbs.tsv");
    let out = dir.path().join("prog.dl");
    fs::write(&train, VERBS).unwrap();
    let o = foidl(&[
        "learn",
        "--train",
        path(&train),
        "--mode",
        "foidl",
        "--out",
        path(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("rules "));
    let text = fs::read_to_string(&out).unwrap();
    Program::parse(&text).expect("solver loads the program");
    let program = LearnedProgram::parse(&text).unwrap();
    assert!(!program.rules.is_empty());
    assert!(program.rules.iter().all(|r| r.ends_in_cut));
}

#[test]
fn ifoil_programs_are_cut_free() {
    let dir = tempfile::tempdir().unwrap();
    let train = dir.path().join("verbs.tsv");
    let out = dir.path().join("prog.pl");
    fs::write(&train, VERBS).unwrap();
    let o = foidl(&[
        "learn",
        "--train",
        path(&train),
        "--mode",
        "ifoil",
        "--out",
        path(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let program = LearnedProgram::parse(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(program.rules.iter().all(|r| !r.ends_in_cut));
}

#[test]
fn explicit_defaults_change_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let train = dir.path().join("verbs.tsv");
    let (a, b) = (dir.path().join("a.dl"), dir.path().join("b.dl"));
    fs::write(&train, VERBS).unwrap();
    assert!(
        foidl(&["learn", "--train", path(&train), "--out", path(&a)])
            .status
            .success()
    );
    let o = foidl(&[
        "learn",
        "--train",
        path(&train),
        "--out",
        path(&b),
        "--min-accuracy",
        "0.5",
        "--u",
        "1000",
        "--min-cover",
        "2",
        "--weak-limit",
        "1",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn eval_of_the_expert_program() {
    let dir = tempfile::tempdir().unwrap();
    let prog = dir.path().join("expert.dl");
    let test = dir.path().join("test.tsv");
    let csv = dir.path().join("eval.csv");
    fs::write(&prog, EXPERT).unwrap();
    fs::write(
        &test,
        "walk\twalked\ncry\tcried\nache\tached\nsleep\tslept\n",
    )
    .unwrap();
    let args = [
        "eval",
        "--program",
        path(&prog),
        "--test",
        path(&test),
        "--csv",
        path(&csv),
        "--verdicts",
    ];
    let o = foidl(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(
        out.contains("accuracy 1.000000 (4/4) rules 4 literals 7 memorized 0 warnings 0"),
        "{out}"
    );
    assert!(out.contains("ache\tached\tcorrect"));
    assert!(foidl(&args).status.success());
    let lines: Vec<String> = fs::read_to_string(&csv)
        .unwrap()
        .lines()
        .map(String::from)
        .collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], CSV_HEADER);
    assert!(lines[1].starts_with("0,0,foidl,1.000000,4,7,0"));
}

#[test]
fn eval_of_an_empty_program() {
    let dir = tempfile::tempdir().unwrap();
    let prog = dir.path().join("empty.dl");
    let test = dir.path().join("test.tsv");
    fs::write(&prog, "").unwrap();
    fs::write(&test, "walk\twalked\n").unwrap();
    let o = foidl(&["eval", "--program", path(&prog), "--test", path(&test)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("accuracy 0.000000 (0/1)"));
}

#[test]
fn tiny_budget_warns() {
    let dir = tempfile::tempdir().unwrap();
    let prog = dir.path().join("expert.dl");
    let test = dir.path().join("test.tsv");
    fs::write(&prog, EXPERT).unwrap();
    fs::write(&test, "walk\twalked\n").unwrap();
    let o = foidl(&[
        "eval",
        "--program",
        path(&prog),
        "--test",
        path(&test),
        "--max-steps",
        "2",
        "--verdicts",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("walk\twalked\tno_output"));
    assert!(stdout(&o).contains("warnings 1"));
    assert!(stderr(&o).contains("solve budget exhausted for walk"));
}

#[test]
fn curve_csv_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.tsv");
    let o = foidl(&[
        "synth",
        "--count",
        "60",
        "--irregular-fraction",
        "0.1",
        "--seed",
        "3",
        "--out",
        path(&corpus),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let run = |name: &str| {
        let csv = dir.path().join(name);
        let o = foidl(&[
            "curve",
            "--train",
            path(&corpus),
            "--train-sizes",
            "10,20",
            "--test-size",
            "20",
            "--trials",
            "2",
            "--seed",
            "9",
            "--jobs",
            "2",
            "--no-timing",
            "--csv",
            path(&csv),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        fs::read_to_string(csv).unwrap()
    };
    let first = run("a.csv");
    assert_eq!(first, run("b.csv"));
    let lines: Vec<&str> = first.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    // (trial, size, mode) order.
    let keys: Vec<String> = lines[1..]
        .iter()
        .map(|l| l.split(',').take(3).collect::<Vec<_>>().join(","))
        .collect();
    assert_eq!(
        keys,
        [
            "0,10,foidl",
            "0,10,ifoil",
            "0,20,foidl",
            "0,20,ifoil",
            "1,10,foidl",
            "1,10,ifoil",
            "1,20,foidl",
            "1,20,ifoil"
        ]
    );
    assert!(lines[1..].iter().all(|l| l.ends_with(',')));
}

#[test]
fn curve_with_timing_fills_the_last_column() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.tsv");
    assert!(foidl(&[
        "synth",
        "--count",
        "40",
        "--irregular-fraction",
        "0",
        "--out",
        path(&corpus)
    ])
    .status
    .success());
    let o = foidl(&[
        "curve",
        "--train",
        path(&corpus),
        "--train-sizes",
        "10",
        "--test-size",
        "10",
        "--mode",
        "foidl",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let row = out.lines().nth(1).unwrap();
    assert!(row.starts_with("0,10,foidl,"));
    assert!(row.rsplit(',').next().unwrap().parse::<f64>().is_ok());
}

#[test]
fn synth_is_deterministic() {
    let a = foidl(&["synth", "--count", "30", "--seed", "4"]);
    let b = foidl(&["synth", "--count", "30", "--seed", "4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(
        stdout(&a).lines().filter(|l| !l.starts_with('#')).count(),
        30
    );
}

#[test]
fn failures_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.tsv");
    let out = dir.path().join("out.dl");
    let o = foidl(&["learn", "--train", path(&missing), "--out", path(&out)]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("missing.tsv"));
    assert!(!out.exists());

    let bad = dir.path().join("bad.tsv");
    fs::write(&bad, "walk walked\n").unwrap();
    let o = foidl(&["learn", "--train", path(&bad), "--out", path(&out)]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("line 1"), "{}", stderr(&o));

    let train = dir.path().join("verbs.tsv");
    fs::write(&train, VERBS).unwrap();
    let o = foidl(&[
        "learn",
        "--train",
        path(&train),
        "--out",
        path(&out),
        "--min-accuracy",
        "1.5",
    ]);
    assert!(!o.status.success());
    assert!(o.stdout.is_empty());

    assert!(!foidl(&[
        "learn",
        "--train",
        path(&train),
        "--out",
        path(&out),
        "--bogus"
    ])
    .status
    .success());
    let o = foidl(&[
        "curve",
        "--train",
        path(&train),
        "--train-sizes",
        "10",
        "--test-size",
        "10",
    ]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("exceeds"));
}

#[test]
fn custom_background_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let bg = dir.path().join("bg.pl");
    let train = dir.path().join("verbs.tsv");
    let out = dir.path().join("prog.dl");
    fs::write(
        &bg,
        ":- signature components(word:+, element:-, word:-).\ncomponents([A|B],A,B).\n",
    )
    .unwrap();
    fs::write(&train, "ab\tb\ncd\td\nef\tf\n").unwrap();
    let o = foidl(&[
        "learn",
        "--train",
        path(&train),
        "--background",
        path(&bg),
        "--out",
        path(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("components("), "{text}");

    let bad = dir.path().join("cut.pl");
    fs::write(&bad, ":- signature p(word:+).\np(X) :- q(X), !.\n").unwrap();
    let o = foidl(&[
        "learn",
        "--train",
        path(&train),
        "--background",
        path(&bad),
        "--out",
        path(&out),
    ]);
    assert!(!o.status.success());
}
