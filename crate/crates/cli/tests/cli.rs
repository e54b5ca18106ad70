use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn negacq(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_negacq"))
        .args(args)
        .current_dir(cwd)
        .env_remove("NEGACQ_DATA")
        .output()
        .unwrap()
}

fn ok(args: &[&str], cwd: &Path) -> String {
    let o = negacq(args, cwd);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn fail(args: &[&str], cwd: &Path) -> String {
    let o = negacq(args, cwd);
    assert!(!o.status.success(), "{args:?} should fail");
    String::from_utf8(o.stderr).unwrap()
}

/// Relative path to FNV-1a hash of every file below `root`.
fn checksums(root: &Path) -> BTreeMap<PathBuf, u64> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let h = fs::read(&p)
                    .unwrap()
                    .iter()
                    .fold(0xcbf29ce484222325u64, |h, b| (h ^ u64::from(*b)).wrapping_mul(0x100000001b3));
                out.insert(p.strip_prefix(root).unwrap().to_path_buf(), h);
            }
        }
    }
    out
}

#[test]
fn simulate_writes_five_sessions_deterministically() {
    let tmp = tempfile::tempdir().unwrap();
    let args = |out: &'static str| vec!["simulate", "--scenario", "rejection", "--seed", "1", "--duration", "60", "--out", out];
    let summary = ok(&args("a"), tmp.path());
    ok(&args("b"), tmp.path());
    assert_eq!(summary.lines().count(), 5);
    assert!(summary.contains("u/min=") && summary.contains("nu/min=") && summary.contains("lexicon="));
    let exp = tmp.path().join("a").join("rejection-1");
    for i in 1..=5 {
        assert!(exp.join(format!("session_{i}")).join("body_memory.jsonl").is_file());
        assert!(exp.join(format!("lexicon_after_session_{i}.jsonl")).is_file());
    }
    let (a, b) = (checksums(&tmp.path().join("a")), checksums(&tmp.path().join("b")));
    assert_eq!(a.len(), 5 * 7 + 5 + 1);
    assert_eq!(a, b);

    ok(&["simulate", "--scenario", "rejection", "--seed", "2", "--duration", "60", "--out", "c"], tmp.path());
    assert_ne!(checksums(&tmp.path().join("c"))[Path::new("rejection-2/session_1/transcript.jsonl")], a[Path::new("rejection-1/session_1/transcript.jsonl")]);
}

#[test]
fn jobs_do_not_change_results() {
    let tmp = tempfile::tempdir().unwrap();
    let base = ["simulate", "--sessions", "2", "--duration", "30", "--participants", "4"];
    ok(&[&base[..], &["--out", "serial"]].concat(), tmp.path());
    ok(&[&base[..], &["--out", "parallel", "--jobs", "3"]].concat(), tmp.path());
    let serial = checksums(&tmp.path().join("serial"));
    assert_eq!(serial.keys().filter(|p| p.ends_with("experiment.json")).count(), 4);
    assert_eq!(serial, checksums(&tmp.path().join("parallel")));
}

#[test]
fn bad_invocations_fail_with_messages() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(fail(&["simulate", "--sessions", "0"], tmp.path()).contains("sessions must be 1..=5"));
    assert!(fail(&["simulate", "--bogus"], tmp.path()).contains("--bogus"));
    assert!(fail(&["analyze", "--logs", "."], tmp.path()).contains("no session logs"));
    fs::write(tmp.path().join("bad.toml"), "utterance_rate = \"fast\"\n").unwrap();
    assert!(fail(&["simulate", "--profile", "bad.toml"], tmp.path()).contains("bad.toml"));
    fs::write(tmp.path().join("odd.toml"), "colour = \"red\"\n").unwrap();
    assert!(fail(&["simulate", "--profile", "odd.toml"], tmp.path()).contains("colour"));
    assert!(fail(&["--config", "odd.toml", "reproduce"], tmp.path()).contains("colour"));
}

#[test]
fn profile_and_config_files_are_applied() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("p.toml"),
        "name = \"gentle\"\nscenario = \"rejection\"\n[prohibition_response]\nduring_push = 1.0\n",
    )
    .unwrap();
    let s = ok(&["simulate", "--profile", "p.toml", "--sessions", "1", "--duration", "30", "--seed", "3"], tmp.path());
    assert!(s.starts_with("gentle-3\ts1"));
    fs::write(
        tmp.path().join("c.toml"),
        "duration = 20.0\n[teacher]\nname = \"cfg\"\n[robot.languaging]\nthreshold = 15\n",
    )
    .unwrap();
    ok(&["--config", "c.toml", "simulate", "--sessions", "1", "--out", "o"], tmp.path());
    let body = fs::read_to_string(tmp.path().join("o/cfg-0/session_1/body_memory.jsonl")).unwrap();
    assert_eq!(body.lines().count(), 600);
}

#[test]
fn analyze_tables_on_a_scripted_prohibition_run() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&["simulate", "--scenario", "prohibition", "--sessions", "3", "--duration", "120", "--seed", "5", "--out", "runs"], tmp.path());
    let out = ok(&["analyze", "--logs", "runs", "--salient-only", "--out", "an"], tmp.path());
    assert!(out.contains("## relation") && out.contains("## felicity"));
    let an = tmp.path().join("an");
    let relation = fs::read_to_string(an.join("relation.tsv")).unwrap();
    assert_eq!(relation.lines().count(), 10);

    let mut utterances = 0;
    for i in 1..=3 {
        let t = fs::read_to_string(tmp.path().join(format!("runs/prohibition-5/session_{i}/transcript.jsonl"))).unwrap();
        utterances += t.lines().filter(|l| l.contains("\"speaker\":\"teacher\"")).count();
    }
    let corpus = fs::read_to_string(an.join("corpus.tsv")).unwrap();
    let total: usize = corpus.lines().skip(1).map(|l| l.split('\t').nth(2).unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(total, utterances);

    let metrics = fs::read_to_string(an.join("metrics.tsv")).unwrap();
    let u: usize = metrics.lines().skip(1).map(|l| l.split('\t').nth(2).unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(u, utterances);

    ok(&["analyze", "--logs", "runs", "--tables", "relation", "--out", "only"], tmp.path());
    assert_eq!(fs::read_dir(tmp.path().join("only")).unwrap().count(), 1);
}

#[test]
fn ground_rebuilds_the_saved_lexicon() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&["simulate", "--sessions", "3", "--duration", "60", "--out", "runs"], tmp.path());
    ok(&["ground", "--logs", "runs", "--out", "g"], tmp.path());
    let rebuilt = fs::read(tmp.path().join("g/lexicon.jsonl")).unwrap();
    assert!(!rebuilt.is_empty());
    assert_eq!(rebuilt, fs::read(tmp.path().join("runs/prohibition-0/lexicon_after_session_3.jsonl")).unwrap());
}

#[test]
fn reproduce_reports_the_anova_row() {
    let tmp = tempfile::tempdir().unwrap();
    let text = ok(&["reproduce", "--out", "rep"], tmp.path());
    assert!(text.contains("F(2,26)=8.83"));
    let tsv = fs::read_to_string(tmp.path().join("rep/report.tsv")).unwrap();
    let row = |section: &str, item: &str| -> Vec<String> {
        tsv.lines()
            .map(|l| l.split('\t').map(String::from).collect::<Vec<_>>())
            .find(|c| c[0] == section && c[1] == item)
            .unwrap_or_else(|| panic!("{section} {item}"))
    };
    let f = row("anova", "nu_per_min s2 F");
    assert_eq!(f[5], "F(2,26)=8.83");
    assert!(f[4].parse::<f64>().unwrap().abs() <= 0.05);
    for (group, want) in [("prohibition", 26.52), ("rejection", 23.34), ("saunders", 24.86)] {
        let r = row("u_per_min", &format!("s1 {group} mean"));
        assert!((r[2].parse::<f64>().unwrap() - want).abs() < 0.005, "{r:?}");
    }
}

#[test]
fn corrupted_fixture_names_the_line() {
    let tmp = tempfile::tempdir().unwrap();
    let fx = tmp.path().join("fx");
    fs::create_dir(&fx).unwrap();
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/fixtures");
    for e in fs::read_dir(&src).unwrap() {
        let p = e.unwrap().path();
        fs::copy(&p, fx.join(p.file_name().unwrap())).unwrap();
    }
    let path = fx.join("utterance_measures.tsv");
    let text = fs::read_to_string(&path).unwrap();
    let (n, line) = text.lines().enumerate().find(|(_, l)| !l.starts_with('#')).unwrap();
    let mut cols: Vec<&str> = line.split('\t').collect();
    *cols.last_mut().unwrap() = "abc";
    let bad = cols.join("\t");
    fs::write(&path, text.replacen(line, &bad, 1)).unwrap();

    let err = fail(&["reproduce", "--fixtures", "fx"], tmp.path());
    assert!(err.contains(&format!("utterance_measures.tsv:{}", n + 1)), "{err}");

    let o = Command::new(env!("CARGO_BIN_EXE_negacq"))
        .args(["reproduce", "--out", "r"])
        .env("NEGACQ_DATA", &fx)
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("utterance_measures.tsv"));

    fs::remove_file(fx.join("reference.tsv")).unwrap();
    fs::remove_file(fx.join("word_frequencies.tsv")).unwrap();
    let err = fail(&["reproduce", "--fixtures", "fx"], tmp.path());
    assert!(err.contains("reference") && err.contains("word_frequencies"), "{err}");
}
