//! End-to-end runs of the `loggraph` binary: exit codes, gzip ingest and output shape.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

use flate2::write::GzEncoder;
use flate2::Compression;

fn loggraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loggraph")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const TRIANGLE_PLUS_TAIL: &str = "# comment\n0 1\n1 2\n2 0\n2 3\n";

#[test]
fn ingest_plain_and_gzip_agree() {
    let dir = tempfile::tempdir().unwrap();
    let plain = dir.path().join("g.txt");
    std::fs::write(&plain, TRIANGLE_PLUS_TAIL).unwrap();
    let gz = dir.path().join("g.txt.gz");
    let mut enc = GzEncoder::new(std::fs::File::create(&gz).unwrap(), Compression::default());
    enc.write_all(TRIANGLE_PLUS_TAIL.as_bytes()).unwrap();
    enc.finish().unwrap();

    let a = dir.path().join("a.lg");
    let b = dir.path().join("b.lg");
    assert_eq!(code(&loggraph(&["ingest", s(&plain), "-o", s(&a)])), 0);
    assert_eq!(code(&loggraph(&["ingest", s(&gz), "-o", s(&b)])), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let out = loggraph(&["run", s(&a), "--alg", "tc", "--sequential"]);
    assert_eq!(code(&out), 0);
    let json: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(json["triangles"], 1);
    assert_eq!(json["n"], 4);
    assert_eq!(json["m"], 4);
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "0 1\n1 x\n").unwrap();
    let out = loggraph(&["ingest", s(&bad), "-o", s(&dir.path().join("o.lg"))]);
    assert_eq!(code(&out), 2);

    let missing = dir.path().join("missing.lg");
    assert_eq!(code(&loggraph(&["stats", s(&missing)])), 2);

    let garbage = dir.path().join("garbage.lg");
    std::fs::write(&garbage, b"not a container").unwrap();
    assert_eq!(code(&loggraph(&["stats", s(&garbage)])), 2);
}

#[test]
fn configuration_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.lg");
    assert_eq!(code(&loggraph(&["generate", "er", "--n", "64", "--p", "0.1", "-o", s(&g)])), 0);
    let out = dir.path().join("c.lg");

    // brb adjacency needs the brb permuter with a depth
    let r = loggraph(&["compress", s(&g), "-o", s(&out), "--offsets", "ptr64", "--adjacency", "brb", "--permuter", "brb"]);
    assert_eq!(code(&r), 3);
    // local widths leave neighborhoods unaligned to any block size
    let r = loggraph(&["compress", s(&g), "-o", s(&out), "--offsets", "bvsd", "--adjacency", "local"]);
    assert_eq!(code(&r), 3);
    assert!(String::from_utf8_lossy(&r.stderr).contains("bvsd"));
    // sssp on an unweighted graph
    assert_eq!(code(&loggraph(&["run", s(&g), "--alg", "sssp"])), 3);
}

#[test]
fn compress_prints_report_and_runs_match_plain_graph() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.lg");
    let gen = ["generate", "kron", "--scale", "8", "--edge-factor", "8", "--seed", "3", "--weighted", "-o", s(&g)];
    assert_eq!(code(&loggraph(&gen)), 0);
    let c = dir.path().join("c.lg");
    let r = loggraph(&[
        "compress", s(&g), "-o", s(&c), "--offsets", "bvsd", "--adjacency", "global-gap+wg", "--permuter", "degmin",
    ]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    let report = stdout(&r);
    assert!(report.lines().count() >= 2, "report: {report}");

    for alg in ["bfs", "sssp", "cc", "tc", "pr"] {
        let plain = loggraph(&["run", s(&g), "--alg", alg, "--sequential", "--source", "5"]);
        let packed = loggraph(&["run", s(&c), "--alg", alg, "--sequential", "--source", "5"]);
        assert_eq!(code(&plain), 0);
        assert_eq!(code(&packed), 0);
        let a: serde_json::Value = serde_json::from_str(stdout(&plain).trim()).unwrap();
        let b: serde_json::Value = serde_json::from_str(stdout(&packed).trim()).unwrap();
        for key in ["dist_sha256", "labels_sha256", "triangles", "components", "top_vertex", "rank_l1"] {
            assert_eq!(a[key], b[key], "{alg}: {key}");
        }
    }
}

#[test]
fn estimates_and_bench_are_csv() {
    let out = loggraph(&["estimate", "figure"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().next(), Some("model,n,scheme,bits"));

    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.lg");
    assert_eq!(code(&loggraph(&["generate", "er", "--n", "200", "--p", "0.05", "-o", s(&g)])), 0);
    let run = || loggraph(&["bench-offsets", s(&g), "--threads", "1,2", "--queries", "50", "--seed", "9"]);
    let (a, b) = (run(), run());
    assert_eq!(code(&a), 0);
    let checksums = |o: &Output| -> Vec<String> {
        stdout(o).lines().skip(1).map(|l| l.rsplit(',').next().unwrap().to_string()).collect()
    };
    // six structures times two thread counts
    assert_eq!(checksums(&a).len(), 12);
    assert_eq!(checksums(&a), checksums(&b));
}
