use std::io::Write;
use std::process::{Command, Output, Stdio};

fn pkl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pkl")).args(args).output().unwrap()
}

fn pkl_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_pkl"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn generate_then_verify_round_trip() {
    for (k, l) in [(2, 12), (2, 1), (3, 20), (5, 37), (6, 216), (12, 50)] {
        let g = pkl(&["generate", "-K", &k.to_string(), "-L", &l.to_string()]);
        assert!(g.status.success());
        let seq = stdout(&g);
        let v = pkl_stdin(&["verify", "-K", &k.to_string()], &seq);
        assert_eq!(v.status.code(), Some(0), "K={k} L={l}: {}", stdout(&v));
    }
    let g = pkl(&["generate", "-K", "2", "-L", "12"]);
    let seq = stdout(&g);
    assert_eq!(seq.trim().len(), 12);
    assert!(seq.trim().chars().all(|c| c == '0' || c == '1'));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["generate", "-K", "3", "-L", "500"][..],
        &["count", "-K", "2", "-L", "1..14", "--csv"][..],
        &["join-graph", "-K", "2", "000110111001", "--dot"][..],
    ] {
        let a = pkl(args);
        let b = pkl(args);
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(pkl(&["verify", "-K", "2", "000110111001"]).status.code(), Some(0));
    assert_eq!(pkl(&["verify", "-K", "2", "000111101011"]).status.code(), Some(1));
    assert_eq!(pkl(&["verify", "-K", "2", "0102"]).status.code(), Some(2));
    assert_eq!(pkl(&["verify", "-K", "2", "01x"]).status.code(), Some(2));
    assert_eq!(pkl(&["verify", "-K", "1", "0"]).status.code(), Some(2));
    assert_eq!(pkl(&["generate", "-K", "2", "-L", "0"]).status.code(), Some(2));
    assert_eq!(pkl(&["count", "-K", "2", "-L", "40"]).status.code(), Some(2));
    let both = pkl(&["verify", "-K", "2", "0011", "--file", "x.txt"]);
    assert_eq!(both.status.code(), Some(2));
}

#[test]
fn count_matches_known_values() {
    let o = pkl(&["count", "-K", "2", "-L", "12"]);
    assert_eq!(stdout(&o), "9\n");
    let csv = pkl(&["count", "-K", "2", "-L", "14..16", "--csv", "--workers", "2"]);
    assert_eq!(stdout(&csv), "L,count\n14,20\n15,32\n16,16\n");
    let json: serde_json::Value = serde_json::from_slice(&pkl(&["count", "-K", "2", "-L", "20", "--json"]).stdout).unwrap();
    assert_eq!(json[0]["count"], 57);
}

#[test]
fn count_dumps_representatives() {
    let path = std::env::temp_dir().join(format!("pkl-dump-{}.txt", std::process::id()));
    let o = pkl(&["count", "-K", "2", "-L", "12", "--dump", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 9);
    for line in lines {
        assert_eq!(pkl(&["verify", "-K", "2", line]).status.code(), Some(0));
    }
}

#[test]
fn lift_then_derive_inverts() {
    for (k, seq) in [(2u32, "0011"), (2, "1"), (6, "12"), (3, "0112"), (4, "3102")] {
        let lift = pkl(&["lift", "-K", &k.to_string(), seq]);
        let members = stdout(&lift);
        let json: serde_json::Value =
            serde_json::from_slice(&pkl(&["lift", "-K", &k.to_string(), seq, "--json"]).stdout).unwrap();
        let d = json["d"].as_u64().unwrap() as usize;
        for member in members.lines() {
            let back = pkl(&["derive", "-K", &k.to_string(), member]);
            assert_eq!(stdout(&back).trim(), seq.repeat(d), "{seq} via {member}");
        }
    }
}

#[test]
fn classify_reports() {
    let o = pkl(&["classify", "-K", "2", "10011110000"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("lempel-radchenko\n"));
    assert!(stdout(&o).contains("101"));
    let json: serde_json::Value =
        serde_json::from_slice(&pkl(&["classify", "-K", "2", "000111101011", "--json"]).stdout).unwrap();
    assert_eq!(json["tier"], "generalized-de-bruijn");
    assert_eq!(json["witness"]["string"], "1");
    assert_eq!(json["witness"]["count"], 7);
    assert_eq!(json["accepted"], false);
}

#[test]
fn verify_json_with_profile() {
    let json: serde_json::Value =
        serde_json::from_slice(&pkl(&["verify", "-K", "2", "000110111001", "--json", "--max-m", "4"]).stdout).unwrap();
    assert_eq!(json["accepted"], true);
    assert_eq!(json["tier"], "pkl");
    assert!(json["witness"].is_null());
    assert_eq!(json["profile"]["3"]["1"], 4);
    assert_eq!(json["profile"]["4"]["1"], 12);
    let json: serde_json::Value =
        serde_json::from_slice(&pkl(&["verify", "-K", "3", "02220010121120111002", "--json"]).stdout).unwrap();
    assert_eq!(json["witness"]["m"], 2);
    assert_eq!(json["witness"]["string"], "21");
    assert_eq!(json["witness"]["allowed"]["min"], 2);
    assert_eq!(json["witness"]["allowed"]["max"], 3);
}

#[test]
fn file_input_and_wide_alphabet() {
    let path = std::env::temp_dir().join(format!("pkl-in-{}.txt", std::process::id()));
    std::fs::write(&path, "000110111001\n").unwrap();
    let o = pkl(&["verify", "-K", "2", "--file", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(o.status.code(), Some(0));
    let g = stdout(&pkl(&["generate", "-K", "11", "-L", "30"]));
    assert!(g.contains(','));
    assert_eq!(g.trim().split(',').count(), 30);
}

#[test]
fn join_graph_listing() {
    let o = stdout(&pkl(&["join-graph", "-K", "2", "000110111001"]));
    assert_eq!(o, "0 1 0100\n0 1 1011\n");
    let dot = stdout(&pkl(&["join-graph", "-K", "2", "000110111001", "--dot"]));
    assert!(dot.contains("v0 -- v1"));
}

#[test]
fn profile_lists_counts() {
    let o = stdout(&pkl(&["profile", "-K", "2", "0011", "--max-m", "1"]));
    assert_eq!(o, "m=1\n0\t2\n1\t2\n");
    let json: serde_json::Value =
        serde_json::from_slice(&pkl(&["profile", "-K", "2", "0011", "--json"]).stdout).unwrap();
    assert_eq!(json["counts"]["2"]["01"], 1);
    assert_eq!(json["histograms"]["2"]["1"], 4);
}
