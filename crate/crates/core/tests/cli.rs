use std::path::Path;
use std::process::{Command, Output};

use afrnet::dataset::synthetic::{write_tree, SyntheticConfig};
use afrnet::dataset::{Level, RecordRef};
use afrnet::features::{cache_save, EmbeddingVector};

fn afrnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_afrnet"))
        .args(args)
        .env_remove("AFRNET_MODEL_PATH")
        .env_remove("AFRNET_JOBS")
        .output()
        .expect("spawn afrnet")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn small_tree(root: &Path) {
    let config = SyntheticConfig {
        subjects: 1,
        altered_counts: [4, 3, 2],
        ..SyntheticConfig::default()
    };
    write_tree(root, &config).unwrap();
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn ingest_counts_and_guards() {
    let tmp = tempfile::tempdir().unwrap();
    let (src, out) = (tmp.path().join("src"), tmp.path().join("out"));
    small_tree(&src);
    let o = afrnet(&["ingest", "--dataset", p(&src), "--out", p(&out), "--deterministic"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("Real: 10") && text.contains("Hard: 2") && text.contains("total 19"), "{text}");
    assert!(out.join("Real/1.png").is_file() && out.join("Real/manifest.csv").is_file());
    let summary = std::fs::read_to_string(out.join("ingest.json")).unwrap();
    assert!(summary.contains("\"created_at\": 0"), "{summary}");

    let again = afrnet(&["ingest", "--dataset", p(&src), "--out", p(&out)]);
    assert_eq!(again.status.code(), Some(3));
    let forced = afrnet(&["ingest", "--dataset", p(&src), "--out", p(&out), "--force", "--augment"]);
    assert!(forced.status.success());
    assert!(out.join("Easy-aug/1_0.png").is_file());
}

#[test]
fn missing_category_is_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("src");
    small_tree(&src);
    std::fs::remove_dir_all(src.join("Hard")).unwrap();
    let o = afrnet(&["ingest", "--dataset", p(&src), "--out", p(&tmp.path().join("out"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Hard"));
}

#[test]
fn backbone_without_model_is_exit_4() {
    let tmp = tempfile::tempdir().unwrap();
    let (src, out) = (tmp.path().join("src"), tmp.path().join("out"));
    small_tree(&src);
    assert!(afrnet(&["ingest", "--dataset", p(&src), "--out", p(&out)]).status.success());
    let caches = tmp.path().join("caches");
    let none = afrnet(&["extract", "--dataset", p(&out), "--out", p(&caches), "--extractor", "backbone"]);
    assert_eq!(none.status.code(), Some(4));
    let bad = afrnet(&[
        "extract", "--dataset", p(&out), "--out", p(&caches), "--extractor", "backbone", "--model-path", "/no/such.onnx",
    ]);
    assert_eq!(bad.status.code(), Some(4));
}

#[test]
fn pipeline_writes_reports_and_decisions() {
    let tmp = tempfile::tempdir().unwrap();
    let (src, out, caches, rep) =
        (tmp.path().join("src"), tmp.path().join("out"), tmp.path().join("c"), tmp.path().join("r"));
    small_tree(&src);
    assert!(afrnet(&["ingest", "--dataset", p(&src), "--out", p(&out)]).status.success());
    let e = afrnet(&["--jobs", "2", "extract", "--dataset", p(&out), "--out", p(&caches), "--batch-size", "3"]);
    assert!(e.status.success(), "{}", String::from_utf8_lossy(&e.stderr));
    assert!(stdout(&e).contains("Real: 10 records, 4 batches of up to 3, dim 2304"), "{}", stdout(&e));
    for l in Level::ALL {
        assert!(caches.join(format!("{}.afre", l.as_str())).is_file());
    }
    let s = afrnet(&[
        "sweep", "--caches", p(&caches), "--dataset", p(&out), "--out", p(&rep), "--format", "csv,json",
        "--thresholds", "0.9,0.5",
    ]);
    assert!(s.status.success(), "{}", String::from_utf8_lossy(&s.stderr));
    let csv = std::fs::read_to_string(rep.join("report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 6);
    assert!(csv.lines().nth(1).unwrap().starts_with("Easy,0.9,"));
    assert!(rep.join("report.json").is_file() && rep.join("plotdata.csv").is_file() && rep.join("stats.json").is_file());

    let m = afrnet(&["match", "--caches", p(&caches), "--dataset", p(&out), "--out", p(&rep), "--modes", "hard"]);
    assert!(m.status.success(), "{}", String::from_utf8_lossy(&m.stderr));
    let d = std::fs::read_to_string(rep.join("decisions_hard_0.92.csv")).unwrap();
    assert_eq!(d.lines().next().unwrap(), "real_ref,altered_ref,similarity,threshold,matched,genuine");
    assert_eq!(d.lines().count(), 1 + 20);
    assert!(d.lines().nth(1).unwrap().starts_with("Real/1.png,Hard/1.png,"));
}

#[test]
fn mixed_extractor_caches_are_exit_5() {
    let tmp = tempfile::tempdir().unwrap();
    let v = |l: Level, id: &str| {
        vec![EmbeddingVector::new(RecordRef::new(l, "1.png"), vec![1.0, 2.0], id).unwrap()]
    };
    cache_save(&v(Level::Real, "a"), &tmp.path().join("Real.afre")).unwrap();
    cache_save(&v(Level::Easy, "b"), &tmp.path().join("Easy.afre")).unwrap();
    let o = afrnet(&["sweep", "--caches", p(tmp.path()), "--modes", "easy", "--out", p(&tmp.path().join("r"))]);
    assert_eq!(o.status.code(), Some(5), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn stats_and_plotdata_default_to_published_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let o = afrnet(&["stats", "--out", p(tmp.path())]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("threshold vs accuracy: r = 0.9499"), "{text}");
    assert!(text.contains("Easy: mean 52.63, std 44.42, 95% CI [2.36, 102.89]"), "{text}");
    let stats = std::fs::read_to_string(tmp.path().join("stats.json")).unwrap();
    assert!(stats.contains("\"correlations\""));

    assert!(afrnet(&["plotdata", "--out", p(tmp.path())]).status.success());
    let plot = std::fs::read_to_string(tmp.path().join("plotdata.csv")).unwrap();
    assert!(plot.contains("accuracy:Easy,0.92,96.69\n") && plot.contains("time:Easy,0.72,1070.22\n"));
}

#[test]
fn config_file_and_flag_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("afrnet.conf");
    std::fs::write(&cfg, format!("# settings\nout = {}\n", p(&tmp.path().join("from-file")))).unwrap();
    assert!(afrnet(&["--config", p(&cfg), "plotdata"]).status.success());
    assert!(tmp.path().join("from-file/plotdata.csv").is_file());
    let flag = tmp.path().join("from-flag");
    assert!(afrnet(&["--config", p(&cfg), "plotdata", "--out", p(&flag)]).status.success());
    assert!(flag.join("plotdata.csv").is_file());
}

#[test]
fn usage_errors() {
    assert_eq!(afrnet(&["bogus"]).status.code(), Some(64));
    assert_eq!(afrnet(&["ingest"]).status.code(), Some(64));
    assert!(afrnet(&["--help"]).status.success());
}
