use std::path::{Path, PathBuf};
use std::process::Command;

use horosark::fixture::Fixture;
use serde_json::Value;

const FIXTURES: [&str; 3] = ["toric-f2", "toric-f2-alt", "horo-rank1"];

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("horosark-{}-{name}", std::process::id()))
}

fn horosark(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_horosark")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = horosark(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn fixtures_round_trip_byte_for_byte() {
    for name in FIXTURES {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        let parsed = Fixture::from_json(&text).unwrap();
        assert_eq!(parsed.to_json(), text, "{name}");
        assert_eq!(Fixture::from_json(&parsed.to_json()).unwrap(), parsed);
    }
}

#[test]
fn fixtures_pass_the_check() {
    for name in FIXTURES {
        let path = fixture(name);
        let (code, out, _) = horosark(&["check", path.to_str().unwrap()]);
        assert_eq!(code, 0, "{name}: {out}");
    }
}

fn write_variant(name: &str, edit: impl FnOnce(&mut Value)) -> PathBuf {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(fixture("toric-f2")).unwrap()).unwrap();
    edit(&mut v);
    let path = scratch(name);
    std::fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    path
}

#[test]
fn degenerate_families_exit_with_three() {
    let path = write_variant("degenerate.json", |v| v["Bprime"] = v["B"].clone());
    let p = path.to_str().unwrap();
    let (code, _, _) = horosark(&["check", p]);
    assert_eq!(code, 3);
    let (code, _, err) = horosark(&["sarkisov", p]);
    assert_eq!(code, 3, "{err}");
    assert!(err.starts_with("error:"));
    std::fs::remove_file(path).unwrap();
}

#[test]
fn invalid_input_exits_with_two() {
    let unknown = write_variant("unknown.json", |v| v["extra"] = Value::from(1));
    let bad_rat = write_variant("badrat.json", |v| v["B"][0] = Value::from("1/0"));
    let short = write_variant("short.json", |v| {
        v["B"].as_array_mut().unwrap().pop();
    });
    let unbounded = write_variant("unbounded.json", |v| v["rows"][2]["vector"] = serde_json::json!([1, 1]));
    for path in [&unknown, &bad_rat, &short, &unbounded] {
        let (code, _, err) = horosark(&["check", path.to_str().unwrap()]);
        assert_eq!(code, 2, "{}: {err}", path.display());
        std::fs::remove_file(path).unwrap();
    }
    let (code, _, _) = horosark(&["check", scratch("missing.json").to_str().unwrap()]);
    assert_eq!(code, 2);
    let f = fixture("toric-f2");
    let (code, _, _) = horosark(&["classify", f.to_str().unwrap(), "--delta", "x", "--epsilon", "0"]);
    assert_eq!(code, 2);
    let (code, _, _) = horosark(&["mmp", f.to_str().unwrap(), "--delta", "1/2", "--epsilon", "5"]);
    assert_eq!(code, 2);
}

#[test]
fn output_is_byte_stable() {
    for name in FIXTURES {
        let path = fixture(name);
        let p = path.to_str().unwrap();
        for args in [vec!["sarkisov", p], vec!["sarkisov", p, "--json"], vec!["decompose", p, "--json"]] {
            let first = horosark(&args);
            let second = horosark(&args);
            assert_eq!(first.0, 0);
            assert_eq!(first, second, "{args:?}");
        }
    }
}

#[test]
fn classify_output_is_frozen() {
    let f = fixture("toric-f2");
    let (code, out, _) = horosark(&["classify", f.to_str().unwrap(), "--delta", "1/2", "--epsilon", "0", "--json"]);
    assert_eq!(code, 0);
    let expected = "{\n  \"point\": [\n    \"1/2\",\n    \"0\"\n  ],\n  \"class\": \"U0prime\",\n  \"walls\": [\n    [\n      1,\n      5,\n      6\n    ],\n    [\n      3,\n      4,\n      5\n    ]\n  ]\n}\n";
    assert_eq!(out, expected);
    let (_, text, _) = horosark(&["classify", f.to_str().unwrap(), "--delta", "1/2", "--epsilon", "0"]);
    assert!(text.starts_with("U0prime"));
    let (_, text, _) = horosark(&["classify", f.to_str().unwrap(), "--delta", "0", "--epsilon", "-1/4"]);
    assert!(text.starts_with("U2"), "{text}");
    let (_, text, _) = horosark(&["classify", f.to_str().unwrap(), "--delta", "0", "--epsilon", "5"]);
    assert!(text.starts_with("outside"), "{text}");
}

fn count(svg: &str, needle: &str) -> usize {
    svg.matches(needle).count()
}

#[test]
fn plot_matches_the_decomposition() {
    for name in FIXTURES {
        let path = fixture(name);
        let p = path.to_str().unwrap();
        let out = scratch(&format!("{name}.svg"));
        let (code, _, err) = horosark(&["plot", p, "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0, "{err}");
        let svg = std::fs::read_to_string(&out).unwrap();
        std::fs::remove_file(&out).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));

        let d = json(&["decompose", p, "--json"]);
        let walls = d["walls"].as_array().unwrap();
        assert_eq!(count(&svg, "<line class=\"wall "), walls.len(), "{name}");
        for (kind, color) in [("fibration", "red"), ("divisorial", "blue"), ("flip", "black")] {
            let expected = walls.iter().filter(|w| w["kind"] == kind).count();
            assert_eq!(count(&svg, &format!("class=\"wall {kind}\"")), expected, "{name} {kind}");
            let colored = svg
                .lines()
                .filter(|l| l.contains(&format!("wall {kind}")) && l.contains(&format!("stroke=\"{color}\"")))
                .count();
            assert_eq!(colored, expected);
        }
        assert_eq!(count(&svg, "<circle class=\"point "), d["points"].as_array().unwrap().len());
        let s = json(&["sarkisov", p, "--json"]);
        let links = s["links"].as_array().unwrap();
        assert_eq!(count(&svg, "<circle class=\"anchor\""), links.len());
        for link in links {
            let rows: Vec<String> = link["rows"].as_array().unwrap().iter().map(|r| r.to_string()).collect();
            assert!(svg.contains(&format!("L = {{{}}}", rows.join(","))));
        }
    }
}
