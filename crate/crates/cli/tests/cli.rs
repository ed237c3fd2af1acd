use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).to_string_lossy().into_owned()
}

fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.txt"))
}

fn magcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_magcat")).args(args).output().expect("binary runs")
}

fn magcat_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_magcat"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden_cases() -> Vec<(&'static str, Vec<String>)> {
    let s = |xs: &[&str]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    vec![
        ("mag-point", s(&["mag", "builtin:point"])),
        ("mag-k3", s(&["mag", "--cutoff", "2", &data("k3.txt")])),
        ("mag-square", s(&["mag", &data("square.txt")])),
        ("mag-c5-json", s(&["mag", "--cutoff", "3", "--format", "json", "builtin:C5"])),
        ("mag-half", s(&["mag", "--cutoff", "3", "--kind", "metric", "--inline", "0 1/2 / 1/2 0"])),
        ("weighting-k3xk2", s(&["weighting", "--cutoff", "3", "builtin:K3xK2"])),
        ("coweighting-face-poset", s(&["coweighting", "builtin:face-poset"])),
        ("classify-z-ball", s(&["classify", "builtin:Z-ball"])),
        ("homology-c5", s(&["homology", "--level", "2", "--max-n", "3", "builtin:C5"])),
        ("homology-k3-pointed", s(&["homology", "--level", "2", "--start", "0", "--end", "1", "builtin:K3"])),
        ("euler-check-c4", s(&["euler-check", "--cutoff", "4", "builtin:C4"])),
        ("hochschild-check-k2", s(&["hochschild-check", "--level", "2", "builtin:K2"])),
        ("specseq-diamond", s(&["specseq", "--page", "2", "--max-l", "3", "--max-n", "4", "builtin:diamond"])),
        ("pathhom-c5", s(&["pathhom", "builtin:C5-directed"])),
        ("mobius-face-poset", s(&["mobius", "builtin:face-poset"])),
        ("poincare-b2", s(&["poincare", &data("b2.txt")])),
        ("growth-z5", s(&["growth", "--cutoff", "6", "builtin:Z5"])),
        ("fib-build", s(&["fib", "build", "--base", &data("k3.txt"), "--fiber", &data("k2.txt"), "--twists", &data("twist.txt")])),
        ("fib-check-k33", s(&["fib", "check", "--total", "builtin:K33", "--base", "builtin:K3", "--map", &data("k33_over_k3.txt")])),
        ("fib-check-fails", s(&["fib", "check", "--total", "builtin:C4", "--base", "builtin:K2", "--map", &data("c4_over_k2.txt")])),
        ("fib-product-check", s(&["fib", "product-check", "--cutoff", "4", "builtin:K3-twist"])),
        ("fib-product-check-z5", s(&["fib", "product-check", "--cutoff", "4", "builtin:Z5"])),
        ("validate-b2-json", s(&["validate", "--format", "json", "builtin:B2"])),
    ]
}

/// Set `MAGCAT_BLESS=1` to rewrite the golden files.
#[test]
fn golden_outputs() {
    let bless = std::env::var_os("MAGCAT_BLESS").is_some();
    for (name, args) in golden_cases() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = magcat(&args);
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let path = golden_path(name);
        if bless {
            std::fs::write(&path, &out.stdout).unwrap();
            continue;
        }
        let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden {}", path.display()));
        assert_eq!(stdout(&out), want, "{name}");
    }
}

#[test]
fn spec_examples() {
    assert_eq!(stdout(&magcat(&["mag", "builtin:point"])), "1\n");
    let k3 = "a -- b\nb -- c\na -- c\n";
    assert_eq!(stdout(&magcat(&["mag", "--cutoff", "2", "--inline", k3])), "3 - 6q + 12q^2\n");
    let k2 = magcat(&["validate", "--format", "json", "--inline", "a -- b"]);
    let m = magcat(&["mag", "--cutoff", "4", "--kind", "metric", "--inline", "0 1 / 1 0"]);
    assert!(k2.status.success());
    assert_eq!(stdout(&m), stdout(&magcat(&["mag", "--cutoff", "4", "builtin:K2"])));
}

#[test]
fn exit_codes() {
    let bad = magcat(&["mag", "--kind", "metric", "--inline", "0 1/0 / 1 0"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("line 1"));
    let guard = magcat(&["hochschild-check", "--level", "2", "--guardrail-cells", "10", "builtin:K3"]);
    assert_eq!(guard.status.code(), Some(2));
    assert_eq!(magcat(&["mag", "builtin:nothing"]).status.code(), Some(1));
    assert_eq!(magcat(&["mag", "builtin:degenerate-pair"]).status.code(), Some(1));
    assert_eq!(magcat(&["pathhom", "builtin:K3"]).status.code(), Some(1));
    assert_eq!(magcat(&["mag", &data("missing.txt")]).status.code(), Some(1));
    assert_eq!(magcat(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(magcat(&["--help"]).status.code(), Some(0));
}

#[test]
fn reads_stdin() {
    let out = magcat_stdin(&["mag", "--cutoff", "2", "-"], "0 -- 1\n1 -- 2\n0 -- 2\n");
    assert_eq!(stdout(&out), "3 - 6q + 12q^2\n");
}

#[test]
fn check_all_passes() {
    let out = magcat(&["check", "all"]);
    assert!(out.status.success());
    assert!(stdout(&out).ends_with("13 of 13 criteria pass\n"));
}

#[test]
fn canonical_json_round_trips() {
    for name in magcat::corpus::NAMES {
        let first = magcat(&["validate", "--format", "json", &format!("builtin:{name}")]);
        assert!(first.status.success(), "{name}");
        let text = stdout(&first);
        let again = magcat_stdin(&["validate", "--format", "json", "-"], &text);
        assert_eq!(stdout(&again), text, "{name}");
    }
}

#[test]
fn outputs_are_byte_identical() {
    for (name, args) in golden_cases() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (a, b) = (magcat(&args), magcat(&args));
        assert_eq!(a.stdout, b.stdout, "{name}");
        assert_eq!(a.stderr, b.stderr, "{name}");
    }
    let (a, b) = (magcat(&["check", "all", "--format", "json"]), magcat(&["check", "all", "--format", "json"]));
    assert_eq!(a.stdout, b.stdout);
}
