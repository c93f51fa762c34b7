use std::path::PathBuf;
use std::process::{Command, Output};

use ncauth::scenario::{demo_config, run_scenario, to_json, ScenarioConfig};
use serde_json::Value;

fn scenarios() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn ncauth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncauth")).args(args).output().unwrap()
}

fn scenario(name: &str) -> String {
    scenarios().join(name).display().to_string()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for (cmd, file) in [
        ("simulate", "simulate_butterfly.toml"),
        ("pollute", "pollute_butterfly.toml"),
        ("forge", "forge_diamond.toml"),
        ("recover", "recover_relays.toml"),
        ("keygen", "forge_target.toml"),
    ] {
        let a = ncauth(&[cmd, "--config", &scenario(file)]);
        let b = ncauth(&[cmd, "--config", &scenario(file)]);
        assert!(a.status.success(), "{cmd}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{cmd} {file}");
    }
}

#[test]
fn seed_override_changes_the_report() {
    let a = ncauth(&["simulate", "--config", &scenario("simulate_butterfly.toml")]);
    let b = ncauth(&["simulate", "--config", &scenario("simulate_butterfly.toml"), "--seed", "8"]);
    assert_ne!(a.stdout, b.stdout);
    assert_eq!(json(&b)["seed"], 8);
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("demo.json");
    let out = ncauth(&["demo", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written = std::fs::read(&path).unwrap();
    assert_eq!(written, ncauth(&["demo"]).stdout);
    assert_eq!(written, to_json(&run_scenario(&demo_config(), std::path::Path::new(".")).unwrap()).into_bytes());
}

#[test]
fn demo_shows_accepted_pollution() {
    let r = json(&ncauth(&["demo"]));
    assert_eq!(r["all_accepted"], true);
    let diverged = r["decoding"].as_array().unwrap().iter().filter(|d| d["diverged"] == true).count();
    assert!(diverged >= 1);
    assert_eq!(r["attack"]["kind"], "pollute");
    assert_eq!(r["interventions"].as_array().unwrap().len(), 1);
}

#[test]
fn forge_report_is_accepted_and_exact() {
    let r = json(&ncauth(&["forge", "--config", &scenario("forge_diamond.toml")]));
    let a = &r["attack"];
    assert_eq!(a["equals_honest_tag"], true);
    assert!(a["accepts"].as_array().unwrap().iter().all(|v| v == true));
}

#[test]
fn recover_report_counts_agree() {
    let r = json(&ncauth(&["recover", "--config", &scenario("recover_relays.toml")]));
    let a = &r["attack"];
    assert_eq!(a["counts_match"], true);
    assert_eq!(a["gauss_count"], a["brute_count"]);
    assert_eq!(a["true_key_satisfies"], true);
    let low = ncauth(&["recover", "--config", &scenario("recover_relays.toml"), "--guard", "10"]);
    let a = &json(&low)["attack"];
    assert!(a["brute_count"].is_null());
    assert!(a["skipped"].as_str().unwrap().contains("guard"));
}

#[test]
fn subcommand_must_match_attack_kind() {
    let out = ncauth(&["forge", "--config", &scenario("pollute_butterfly.toml")]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("attack.kind"));
    // simulate ignores the attack section
    let r = json(&ncauth(&["simulate", "--config", &scenario("pollute_butterfly.toml")]));
    assert!(r.get("attack").is_none());
    assert!(r["interventions"].as_array().unwrap().is_empty());
}

fn write_config(text: &str) -> (tempfile::TempDir, String) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, text).unwrap();
    let p = path.display().to_string();
    (dir, p)
}

const BASE: &str = "version = 1\n[params]\nq = 5\nl = 1\nk = 2\nm = 2\n[topology]\nbuiltin = \"diamond\"\n";

#[test]
fn malformed_configs_fail_and_name_the_field() {
    let cases = [
        (format!("{BASE}[attack]\nkind = \"forge\"\ncoeffs = [1, 1]\n"), "attack.coeffs"),
        (format!("{BASE}[attack]\nkind = \"forge\"\n"), "attack"),
        (format!("{BASE}[attack]\nkind = \"recover\"\n"), "adversaries"),
        (BASE.replace("q = 5", "q = 4"), "params.q"),
        (BASE.replace("version = 1", "version = 9"), "version"),
        (BASE.replace("m = 2", "m = 2\nbogus = 1"), "bogus"),
        (format!("{BASE}file = \"x.toml\"\n"), "topology"),
        (BASE.replace("m = 2", "m = 1"), "unsafe"),
    ];
    for (text, field) in cases {
        let (_dir, path) = write_config(&text);
        let out = ncauth(&["simulate", "--config", &path]);
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(!out.status.success(), "accepted:\n{text}");
        assert!(err.contains(field), "`{field}` missing from: {err}");
        assert!(out.stdout.is_empty());
    }
    let out = ncauth(&["simulate", "--config", "/nonexistent/config.toml"]);
    assert!(!out.status.success());
}

#[test]
fn unsafe_flag_admits_more_messages_than_the_bound() {
    let text = BASE.replace("m = 2", "m = 1");
    let (_dir, path) = write_config(&text);
    assert!(!ncauth(&["simulate", "--config", &path]).status.success());
    let r = json(&ncauth(&["simulate", "--config", &path, "--unsafe-n-gt-m"]));
    assert_eq!(r["params"]["n"], 2);
}

#[test]
fn lemma_sweep_reports_agreement() {
    let out = ncauth(&["lemma-sweep", "--config", &scenario("sweep_small.toml"), "--format", "json"]);
    let r = json(&out);
    assert_eq!(r["summary"]["mismatches"], 0);
    assert!(r["summary"]["evaluated"].as_u64().unwrap() > 0);
    let table = ncauth(&["lemma-sweep", "--config", &scenario("sweep_small.toml")]);
    assert!(table.status.success());
    assert!(String::from_utf8_lossy(&table.stderr).contains("0 mismatches"));
}

#[test]
fn shipped_scenarios_parse() {
    for entry in std::fs::read_dir(scenarios()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") && !path.ends_with("sweep_small.toml") {
            ScenarioConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        }
    }
}
