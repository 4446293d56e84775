use dlcurves::report::{read_points, Report};
use std::fs;
use std::process::{Command, Output};

fn dlcurves(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dlcurves")).args(args).output().expect("spawn dlcurves")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn count_su3_degree_four() {
    let out = dlcurves(&["count", "--family", "su3", "--m", "1", "--n", "4"]);
    assert_eq!(code(&out), 0);
    let report = Report::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(report.get("count.exact.n4").unwrap().measured, 216);
}

#[test]
fn count_ree_base_field() {
    let out = dlcurves(&["count", "--family", "ree", "--m", "0", "--n", "1"]);
    assert_eq!(code(&out), 0);
    let report = Report::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(report.get("count.exact.n1").unwrap().measured, 28);
}

#[test]
fn budget_refusal_exits_2() {
    let out = dlcurves(&["count", "--family", "sz", "--m", "1", "--n", "4", "--mode", "ci"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn config_errors_exit_3() {
    assert_eq!(code(&dlcurves(&["verify", "--family", "g2", "--m", "0"])), 3);
    assert_eq!(code(&dlcurves(&["verify", "--family", "su3", "--m", "1", "--p", "5"])), 3);
    assert_eq!(code(&dlcurves(&["count", "--family", "sz", "--m", "0", "--n", "0"])), 3);
    assert_eq!(code(&dlcurves(&["verify"])), 3);
    assert_eq!(code(&dlcurves(&["verify", "--family", "ree", "--m", "3"])), 3);
    assert_eq!(code(&dlcurves(&["verify", "--family", "sz", "--m", "9"])), 3);
    let out = dlcurves(&["ingest", "--family", "sz", "--m", "0", "--input", "/nonexistent/points.csv"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(code(&dlcurves(&["--help"])), 0);
    assert_eq!(code(&dlcurves(&["--version"])), 0);
}

#[test]
fn verify_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2).map(|i| dir.path().join(format!("r{i}.json"))).collect();
    for (path, threads) in paths.iter().zip(["1", "2"]) {
        let out = dlcurves(&[
            "verify", "--family", "su3", "--m", "1", "--seed", "7", "--threads", threads, "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(fs::read(&paths[0]).unwrap(), fs::read(&paths[1]).unwrap());
}

#[test]
fn verify_sz_csv_report() {
    let out = dlcurves(&["verify", "--family", "sz", "--m", "0", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("family,p,m,q,check_name,status,measured,expected,provenance_tag,seed,elapsed_ms"));
    assert!(text.contains("relation.series_certified,pass"));
}

#[test]
fn dump_and_ingest_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("points.csv");
    let csv = csv.to_str().unwrap();
    let out = dlcurves(&["dump-points", "--family", "su3", "--m", "1", "--n", "1", "--out", csv]);
    assert_eq!(code(&out), 0);

    let dump = read_points(fs::File::open(csv).unwrap()).unwrap();
    assert_eq!(dump.points.len(), 9);
    let header = fs::read_to_string(csv).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header, "p,k,degree,e0^e1,e0^e2,e1^e2");

    let out = dlcurves(&["ingest", "--family", "su3", "--m", "1", "--input", csv]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = Report::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert!(report.passed());
    assert_eq!(report.get("ingest.distinct").unwrap().measured, 9);

    // Same points dumped twice give the same file.
    let again = dir.path().join("again.csv");
    dlcurves(&["dump-points", "--family", "su3", "--m", "1", "--n", "1", "--out", again.to_str().unwrap()]);
    assert_eq!(fs::read(csv).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn ingest_rejects_tampered_point() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("points.csv");
    let csv_s = csv.to_str().unwrap();
    dlcurves(&["dump-points", "--family", "sz", "--m", "0", "--n", "1", "--out", csv_s]);
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    // Flip the last coordinate of the first point.
    let row = &mut lines[1];
    let last = row.pop().unwrap();
    row.push(if last == '0' { '1' } else { '0' });
    fs::write(&csv, lines.join("\n") + "\n").unwrap();

    let out = dlcurves(&["ingest", "--family", "sz", "--m", "0", "--input", csv_s]);
    assert_eq!(code(&out), 1);
    let report = Report::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert!(!report.passed());
}

#[test]
fn ingest_rejects_wrong_family() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("points.csv");
    let csv_s = csv.to_str().unwrap();
    dlcurves(&["dump-points", "--family", "su3", "--m", "1", "--n", "1", "--out", csv_s]);
    let out = dlcurves(&["ingest", "--family", "sz", "--m", "0", "--input", csv_s]);
    assert_eq!(code(&out), 3);
}
