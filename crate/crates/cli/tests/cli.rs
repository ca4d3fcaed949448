//! End-to-end runs of the `cylspec` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cylspec::StudyConfig;

const BIN: &str = env!("CARGO_BIN_EXE_cylspec");

const GAP_STRIP: &str = r#"
[geometry]
base = { kind = "interval", a = -1.0, b = 1.0 }
cross = { intervals = [[0.0, 1.0]] }

[coefficient]
entries = [[2.0, 0.5], [0.5, 1.0]]

[mesh]
target_h = 0.25
xi_divisions = 8
family = "tensor"
"#;

const IDENTITY_STRIP: &str = r#"
[geometry]
base = { kind = "interval", a = -1.0, b = 1.0 }
cross = { intervals = [[0.0, 1.0]] }

[coefficient]
entries = [[1.0, 0.0], [0.0, 1.0]]
"#;

fn run(dir: &Path, config: &str, args: &[&str]) -> Output {
    let path = dir.join("study.toml");
    fs::write(&path, config).unwrap();
    let out = dir.join("out");
    let mut cmd = Command::new(BIN);
    cmd.arg(args[0]).arg(&path).arg("--out").arg(&out).args(&args[1..]);
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn misspelled_section_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &format!("{GAP_STRIP}\n[meshh]\ntarget_h = 0.5\n"), &["full"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("meshh") && e.contains("`mesh`"), "{e}");
    assert!(!dir.path().join("out").exists());
}

#[test]
fn mismatched_study_kind_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &format!("{GAP_STRIP}\n[study]\nkind = \"sweep\"\n"), &["full"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cross_section_summary_reports_the_prediction() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), IDENTITY_STRIP, &["cross-section"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("no gap"), "{s}");
    let o = run(dir.path(), GAP_STRIP, &["cross-section"]);
    assert!(stdout(&o).contains("gap: lim"));
    let csv = fs::read_to_string(dir.path().join("out/results.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "series,n,mu1,gap_indicator,residual,dofs,status");
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn quiet_run_prints_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), IDENTITY_STRIP, &["cross-section", "--quiet"]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
}

#[test]
fn reruns_are_byte_identical_and_formats_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{GAP_STRIP}\n[study]\nscales = [2.0, 4.0]\nlengths = [4.0, 8.0]\n");
    let o = run(dir.path(), &cfg, &["convergence", "--jobs", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let first = fs::read(dir.path().join("out/results.csv")).unwrap();
    let svg1 = fs::read(dir.path().join("out/plot.svg")).unwrap();
    let o = run(dir.path(), &cfg, &["convergence", "--jobs", "1"]);
    assert!(o.status.success());
    assert_eq!(first, fs::read(dir.path().join("out/results.csv")).unwrap());
    assert_eq!(svg1, fs::read(dir.path().join("out/plot.svg")).unwrap());

    let json: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("out/results.json")).unwrap()).unwrap();
    let mut rdr = csv::Reader::from_reader(first.as_slice());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = json["rows"].as_array().unwrap();
    let records: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), rows.len());
    for (rec, row) in records.iter().zip(rows) {
        for (name, field) in header.iter().zip(rec.iter()) {
            match name.as_str() {
                "series" | "status" => assert_eq!(row[name].as_str().unwrap(), field),
                _ => {
                    let v: f64 = field.parse().unwrap();
                    if v.is_nan() {
                        assert!(row[name].is_null());
                    } else {
                        assert_eq!(row[name].as_f64().unwrap(), v, "{name}");
                    }
                }
            }
        }
    }
    // the echoed configuration parses back to the same study
    let echoed: StudyConfig = serde_json::from_value(json["config"].clone()).unwrap();
    assert_eq!(echoed, StudyConfig::from_toml_str(&cfg).unwrap());
    assert_eq!(json["provenance"]["seed"], 42);
    assert_eq!(json["provenance"]["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), GAP_STRIP, &["full", "--seed", "7", "--target-h", "0.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let json: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("out/results.json")).unwrap()).unwrap();
    assert_eq!(json["config"]["solver"]["seed"], 7);
    assert_eq!(json["config"]["mesh"]["target_h"], 0.5);
}

#[test]
fn plot_is_valid_svg_with_reference_lines() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{GAP_STRIP}\n[study]\nscales = [2.0, 4.0]\nlengths = [4.0, 8.0]\n");
    assert!(run(dir.path(), &cfg, &["convergence"]).status.success());
    let svg = fs::read_to_string(dir.path().join("out/plot.svg")).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let refs: Vec<_> = doc.descendants().filter(|n| n.attribute("class") == Some("reference")).collect();
    let dash = |name: &str| {
        refs.iter()
            .find(|n| n.attribute("data-name") == Some(name))
            .and_then(|n| n.attribute("stroke-dasharray"))
            .map(String::from)
    };
    assert_eq!(dash("mu1").as_deref(), Some("8,5"));
    assert_eq!(dash("min_z").as_deref(), Some("2,4"));
    assert!(doc.descendants().any(|n| n.attribute("class") == Some("series")));
}

#[test]
fn single_row_plot_has_one_marker() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{GAP_STRIP}\n[study]\nscales = [2.0]\n");
    assert!(run(dir.path(), &cfg, &["full"]).status.success());
    let svg = fs::read_to_string(dir.path().join("out/plot.svg")).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    assert_eq!(doc.descendants().filter(|n| n.attribute("class") == Some("marker")).count(), 1);
    assert_eq!(doc.descendants().filter(|n| n.attribute("class") == Some("series")).count(), 0);
}

#[test]
fn failed_cells_stop_or_become_nan_rows() {
    let dir = tempfile::tempdir().unwrap();
    // the second scale exceeds the unknown cap
    let cfg = format!("{GAP_STRIP}\n[solver]\ndof_cap = 200\n\n[study]\nscales = [2.0, 16.0]\n");
    let o = run(dir.path(), &cfg, &["full"]);
    assert_eq!(o.status.code(), Some(3));
    let json: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("out/results.json")).unwrap()).unwrap();
    assert_eq!(json["status"], "failed");
    assert!(json["failure"].as_str().unwrap().contains("16"));

    let o = run(dir.path(), &cfg, &["full", "--keep-going"]);
    assert_eq!(o.status.code(), Some(3));
    let csv = fs::read_to_string(dir.path().join("out/results.csv")).unwrap();
    let last = csv.lines().last().unwrap();
    assert!(last.starts_with("lambda,16,nan,") && last.ends_with(",failed"), "{csv}");
    assert!(csv.lines().nth(1).unwrap().ends_with(",ok"));
}

#[test]
fn decay_without_gap_needs_the_control_flag() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &format!("{IDENTITY_STRIP}\n[study]\nscale = 4.0\n"), &["decay"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(dir.path(), &format!("{IDENTITY_STRIP}\n[study]\nscale = 4.0\ncontrol = true\n"), &["decay"]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn dump_writes_mesh_and_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{GAP_STRIP}\n[study]\nscales = [2.0]\n");
    assert!(run(dir.path(), &cfg, &["full", "--dump-mesh"]).status.success());
    let dumps = dir.path().join("out/dumps");
    let mesh = fs::read_to_string(dumps.join("mesh_lambda_l2.txt")).unwrap();
    assert!(mesh.starts_with("# cylspec mesh\ndim 2\n"));
    let k = fs::read_to_string(dumps.join("stiffness_lambda_l2.txt")).unwrap();
    let first = k.lines().nth(1).unwrap();
    let parts: Vec<&str> = first.split(' ').collect();
    assert_eq!(parts.len(), 3);
    assert!(parts[0].parse::<usize>().unwrap() >= parts[1].parse::<usize>().unwrap());
    assert!(dumps.join("mass_lambda_l2.txt").exists());
}

#[test]
fn every_study_kind_runs_on_a_small_config() {
    let box_cfg = r#"
[geometry]
base = { kind = "polygon", vertices = [[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]] }
cross = { intervals = [[0.0, 1.0]] }

[coefficient]
entries = [[2.0, 0.0, 0.5], [0.0, 2.0, 0.0], [0.5, 0.0, 1.0]]

[mesh]
target_h = 0.5
xi_divisions = 4
family = "tensor"

[study]
scales = [1.0, 2.0]
scale = 3.0
lengths = [2.0, 4.0]
slab_sizes = [1.0, 2.0]
samples = 8
refine = true
sizes = [0.5, 1.0]
"#;
    for kind in [
        "cross-section",
        "reduced",
        "sweep",
        "full",
        "convergence",
        "decay",
        "upper-bound",
        "dirichlet-bracket",
    ] {
        let dir = tempfile::tempdir().unwrap();
        let o = run(dir.path(), box_cfg, &[kind]);
        assert!(o.status.success(), "{kind}: {}", stderr(&o));
        for f in ["results.csv", "results.json", "plot.svg"] {
            assert!(dir.path().join("out").join(f).exists(), "{kind}: {f}");
        }
    }
}
