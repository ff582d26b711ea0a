use std::path::Path;
use std::process::{Command, Output};

fn logshrink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logshrink"))
        .args(args)
        .env_remove("LOGSHRINK_CONFIG")
        .output()
        .unwrap()
}

fn sample(name: &str) -> logshrink_fixtures::Sample {
    logshrink_fixtures::loghub_sample(name).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn compress_decompress_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let sample = sample("HDFS");
    let input = dir.path().join("hdfs.log");
    let arc = dir.path().join("hdfs.lgsk");
    let back = dir.path().join("hdfs.out");
    std::fs::write(&input, &sample.data).unwrap();

    let out = logshrink(&["compress", s(&input), "-o", s(&arc), "--seed", "7"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let line = String::from_utf8(out.stdout).unwrap();
    assert!(line.contains("cr="), "{line}");

    let out = logshrink(&["decompress", s(&arc), "-o", s(&back)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read(&back).unwrap(), sample.data);
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let sample = sample("Spark");
    let input = dir.path().join("in.log");
    std::fs::write(&input, &sample.data).unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(logshrink(&["compress", s(&input), "-o", s(&a), "--seed", "7", "--workers", "1"]).status.success());
    assert!(logshrink(&["compress", s(&input), "-o", s(&b), "--seed", "7", "--workers", "4"]).status.success());
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn missing_input_exits_2() {
    let out = logshrink(&["compress", "/nonexistent/x.log", "-o", "/tmp/never"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no such file"));
}

#[test]
fn truncated_archive_is_a_clean_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.log");
    let arc = dir.path().join("in.lgsk");
    std::fs::write(&input, &sample("Linux").data).unwrap();
    assert!(logshrink(&["compress", s(&input), "-o", s(&arc)]).status.success());
    let bytes = std::fs::read(&arc).unwrap();
    for cut in [3, 5, bytes.len() / 2, bytes.len() - 1] {
        std::fs::write(&arc, &bytes[..cut]).unwrap();
        let out = logshrink(&["decompress", s(&arc), "-o", s(&dir.path().join("o"))]);
        assert_eq!(out.status.code(), Some(1), "cut at {cut}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.starts_with("logshrink: "), "{err}");
        assert!(!err.contains("panicked"), "{err}");
    }
}

#[test]
fn inspect_and_bench() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.log");
    let arc = dir.path().join("in.lgsk");
    std::fs::write(&input, &sample("OpenSSH").data).unwrap();
    assert!(logshrink(&["compress", s(&input), "-o", s(&arc)]).status.success());

    let out = logshrink(&["inspect", s(&arc)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("chunks 1"), "{text}");
    assert!(text.contains("templates"));

    let out = logshrink(&["bench", s(&input), "--csv", "--storage-style", "both", "--no-analyzer"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    for tool in ["logshrink,", "logshrink-no-analyzer,", "gzip,", "bzip2,", "lzma,", "storage-row,", "storage-column,"] {
        assert!(text.contains(tool), "{tool} missing in {text}");
    }
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.log");
    let conf = dir.path().join("ls.conf");
    std::fs::write(&input, &sample("Apache").data).unwrap();
    std::fs::write(&conf, "backend = gzip\nseed = 3\n").unwrap();
    let arc = dir.path().join("a");
    let out = logshrink(&["compress", s(&input), "-o", s(&arc), "--config", s(&conf)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read(&arc).unwrap()[5], 0);
    let out = logshrink(&["compress", s(&input), "-o", s(&arc), "--config", s(&conf), "--backend", "bzip2"]);
    assert!(out.status.success());
    assert_eq!(std::fs::read(&arc).unwrap()[5], 1);

    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "no_such_key = 1\n").unwrap();
    let out = logshrink(&["compress", s(&input), "-o", s(&arc), "--config", s(&bad)]);
    assert_eq!(out.status.code(), Some(1));
}

const SPARK_FORMAT: &str = "<Date> <Time> <Level> <Component>: <Content>";
const SPARK_LINES: &str = "17/06/09 20:10:46 INFO CacheManager: Partition rdd_2_1 not found, computing it
17/06/09 20:10:46 INFO CacheManager: Partition rdd_2_4 not found, computing it
17/06/09 20:10:47 INFO MemoryStore: Block broadcast_0 stored as bytes in memory (estimated size 27.1 KB, free 2.8 GB)
17/06/09 20:10:48 INFO MemoryStore: Block broadcast_0_piece0 stored as bytes in memory (estimated size 22.3 KB, free 2.8 GB)
";

fn summary_value<'a>(line: &'a str, key: &str) -> &'a str {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
        .unwrap_or_else(|| panic!("{key} missing in {line}"))
}

#[test]
fn inspect_reports_what_compress_did() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("spark.log");
    let arc = dir.path().join("spark.lgsk");
    std::fs::write(&input, SPARK_LINES).unwrap();
    let out = logshrink(&["compress", s(&input), "-o", s(&arc), "--format", SPARK_FORMAT]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = String::from_utf8(out.stdout).unwrap();
    let templates = summary_value(&summary, "templates");
    assert_eq!(templates, "2");

    let text = String::from_utf8(logshrink(&["inspect", s(&arc)]).stdout).unwrap();
    assert!(text.contains(&format!("templates {templates}")), "{text}");
    assert!(text.contains("Partition <*> not found, computing it"), "{text}");
    let level = text.lines().find(|l| l.trim_start().starts_with("Level ")).unwrap();
    assert!(level.contains("dictionary"), "{level}");
    let date = text.lines().find(|l| l.trim_start().starts_with("Date ")).unwrap();
    assert!(date.contains("dictionary"), "{date}");
}

#[test]
fn no_analyzer_lowers_openssh_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let sample = sample("OpenSSH");
    let input = dir.path().join("ssh.log");
    std::fs::write(&input, &sample.data).unwrap();
    let out = logshrink(&["bench", s(&input), "--csv", "--no-analyzer", "--format", sample.format]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let cr = |tool: &str| -> f64 {
        let row = text.lines().find(|l| l.starts_with(&format!("{tool},"))).unwrap();
        row.split(',').nth(3).unwrap().parse().unwrap()
    };
    assert!(cr("logshrink-no-analyzer") < cr("logshrink"), "{text}");
    assert!(cr("logshrink") >= cr("gzip"), "{text}");
}
