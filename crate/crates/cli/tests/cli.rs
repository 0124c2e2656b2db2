use std::path::PathBuf;
use std::process::Command;
use std::sync::atomic::{AtomicU32, Ordering};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_verlinde"));
    c.env_remove("VERLINDE_PRECISION_BITS");
    c
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().expect("spawn verlinde");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).expect("utf-8 stdout"),
        String::from_utf8(out.stderr).expect("utf-8 stderr"),
    )
}

fn run_json(args: &[&str]) -> serde_json::Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let (code, stdout, stderr) = run(&full);
    assert_eq!(code, 0, "stdout: {stdout} stderr: {stderr}");
    serde_json::from_str(&stdout).expect("json record")
}

static DIR_SEQ: AtomicU32 = AtomicU32::new(0);

fn scratch_file(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "verlinde-cli-test-{}-{}",
        std::process::id(),
        DIR_SEQ.fetch_add(1, Ordering::Relaxed)
    ));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn su_verlinde_json_record() {
    let v = run_json(&["su-verlinde", "--r", "2", "--k", "1", "--g", "3"]);
    assert_eq!(v["value"], serde_json::json!(8));
    assert_eq!(v["certified"], serde_json::json!(true));
    assert_eq!(v["command"], serde_json::json!("su-verlinde"));
    assert_eq!(v["params"]["r"], serde_json::json!(2));
    assert!(v["precision_bits"].as_u64().unwrap() >= 128);
    assert!(v["report"].is_null());
}

#[test]
fn json_schema_is_stable_across_commands() {
    let keys = |v: &serde_json::Value| -> Vec<String> {
        v.as_object().unwrap().keys().cloned().collect()
    };
    let a = run_json(&["su-verlinde", "--r", "2", "--k", "1", "--g", "2"]);
    let b = run_json(&["theta-eval", "--tau", "i", "--z", "0"]);
    let c = run_json(&["duality-matrix", "--tau", "2i"]);
    let d = run_json(&["check", "st-sym", "--r", "2", "--k", "1", "--g", "2"]);
    assert_eq!(keys(&a), keys(&b));
    assert_eq!(keys(&a), keys(&c));
    assert_eq!(keys(&a), keys(&d));
}

#[test]
fn invalid_rank_is_usage_error() {
    let (code, _, stderr) = run(&["su-verlinde", "--r", "0", "--k", "1", "--g", "1"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("rank"), "{stderr}");
}

#[test]
fn unknown_flag_is_usage_error() {
    let (code, _, stderr) = run(&["su-verlinde", "--r", "2", "--k", "1", "--g", "1", "--frobnicate"]);
    assert_eq!(code, 2);
    assert!(!stderr.is_empty());
}

#[test]
fn st_sym_check_reports_equal_sides() {
    let (code, stdout, _) = run(&["check", "st-sym", "--r", "2", "--k", "1", "--g", "2"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("9 = 9"), "{stdout}");
}

#[test]
fn arb_quot_check_fails_honestly() {
    let v = {
        let (code, stdout, _) = run(&[
            "check", "arb-quot", "--h", "1", "--k", "1", "--r", "2", "--d", "1", "--g", "2",
            "--format", "json",
        ]);
        assert_eq!(code, 1);
        serde_json::from_str::<serde_json::Value>(&stdout).unwrap()
    };
    assert_eq!(v["report"]["holds"], serde_json::json!(false));
    assert_eq!(v["report"]["lhs"], serde_json::json!(24));
    assert_eq!(v["report"]["rhs"], serde_json::json!(40));
}

#[test]
fn csv_columns_are_fixed() {
    let (code, stdout, _) = run(&["quot", "--r", "2", "--k", "2", "--g", "2", "--format", "csv"]);
    assert_eq!(code, 0);
    let mut lines = stdout.lines();
    assert_eq!(
        lines.next().unwrap(),
        "command,r,k,g,value,certified,precision_bits,error_radius,elapsed_ms"
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("quot,2,2,2,40,true,"), "{row}");
}

#[test]
fn roots_form_agrees_with_subset_form() {
    let a = run_json(&["quot", "--r", "3", "--k", "2", "--g", "3"]);
    let b = run_json(&["quot", "--r", "3", "--k", "2", "--g", "3", "--roots-form"]);
    assert_eq!(a["value"], serde_json::json!(1875));
    assert_eq!(a["value"], b["value"]);
    assert_eq!(b["command"], serde_json::json!("quot-roots"));
}

#[test]
fn conformal_block_matches_arb_degree() {
    let a = run_json(&["arb-degree", "--h", "1", "--k", "1", "--r", "2", "--d", "1", "--g", "2"]);
    let b = run_json(&["conformal-block", "--h", "1", "--k", "1", "--r", "2", "--d", "1", "--g", "2"]);
    assert_eq!(a["value"], serde_json::json!(6));
    assert_eq!(a["value"], b["value"]);
}

#[test]
fn theta_eval_pins_the_lemniscatic_value() {
    let v = run_json(&["theta-eval", "--tau", "i", "--z", "0"]);
    let re = v["value"]["re"].as_str().unwrap();
    assert!(
        re.starts_with("1.08643481121330801457531612151"),
        "{re}"
    );
    assert_eq!(v["value"]["im"].as_str().unwrap(), "0");
    assert_eq!(v["certified"], serde_json::json!(false));
}

#[test]
fn theta_addition_holds_at_a_generic_point() {
    let (code, stdout, _) = run(&[
        "theta-addition", "--tau", "1+2i", "--z", "0.1+0.2i", "--w", "-0.4+0.1i",
    ]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("encloses zero"), "{stdout}");
}

#[test]
fn duality_matrix_is_diagonal_within_tolerance() {
    let v = run_json(&["duality-matrix", "--tau", "i"]);
    assert_eq!(v["report"]["holds"], serde_json::json!(true));
    let rad: f64 = v["value"][0][1]["rad"].as_str().unwrap().parse().unwrap();
    assert!(rad < 1e-20, "off-diagonal radius {rad}");
}

#[test]
fn tolerance_drives_precision_escalation() {
    let v = run_json(&["duality-matrix", "--tau", "i", "--tolerance", "1e-60"]);
    assert!(v["precision_bits"].as_u64().unwrap() > 128);
    assert_eq!(v["report"]["holds"], serde_json::json!(true));
    let rad: f64 = v["value"][0][1]["rad"].as_str().unwrap().parse().unwrap();
    assert!(rad < 1e-60, "off-diagonal radius {rad}");
}

#[test]
fn bad_modulus_is_usage_error() {
    let (code, _, stderr) = run(&["theta-eval", "--tau", "-i", "--z", "0"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("upper half-plane"), "{stderr}");
}

#[test]
fn env_var_overrides_default_precision() {
    let out = bin()
        .args(["su-verlinde", "--r", "2", "--k", "1", "--g", "3", "--format", "json"])
        .env("VERLINDE_PRECISION_BITS", "256")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(v["precision_bits"], serde_json::json!(256));
}

#[test]
fn explicit_flag_beats_env_var() {
    let out = bin()
        .args([
            "su-verlinde", "--r", "2", "--k", "1", "--g", "3",
            "--precision-bits", "192", "--format", "json",
        ])
        .env("VERLINDE_PRECISION_BITS", "256")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(v["precision_bits"], serde_json::json!(192));
}

#[test]
fn capped_precision_exhausts_with_exit_three() {
    let (code, _, stderr) = run(&[
        "su-verlinde", "--r", "4", "--k", "3", "--g", "4",
        "--precision-bits", "16", "--max-precision-bits", "16",
    ]);
    assert_eq!(code, 3);
    assert!(stderr.contains("precision exhausted"), "{stderr}");
}

#[test]
fn escalation_from_low_precision_matches_default() {
    let a = run_json(&["su-verlinde", "--r", "4", "--k", "3", "--g", "4", "--precision-bits", "16"]);
    let b = run_json(&["su-verlinde", "--r", "4", "--k", "3", "--g", "4"]);
    assert_eq!(a["value"], b["value"]);
}

#[test]
fn table_sweep_is_idempotent() {
    let out = scratch_file("grid.jsonl");
    let spec = "su-verlinde:r=1..2,k=0..2,g=1..2";
    let path = out.to_str().unwrap();
    let (code, _, _) = run(&["table", "--sweep", spec, "--out", path, "--format", "json"]);
    assert_eq!(code, 0);
    let first = std::fs::read_to_string(&out).unwrap();
    assert_eq!(first.lines().count(), 12);
    let (code, _, _) = run(&["table", "--sweep", spec, "--out", path, "--format", "json"]);
    assert_eq!(code, 0);
    let second = std::fs::read_to_string(&out).unwrap();
    assert_eq!(first, second, "re-run must append nothing");
}

#[test]
fn table_resumes_after_truncation() {
    let out = scratch_file("resume.jsonl");
    let spec = "su-verlinde:r=1..2,k=0..2,g=1..2";
    let path = out.to_str().unwrap();
    run(&["table", "--sweep", spec, "--out", path, "--format", "json"]);
    let full = std::fs::read_to_string(&out).unwrap();
    let head: String = full.lines().take(3).map(|l| format!("{l}\n")).collect();
    std::fs::write(&out, &head).unwrap();
    run(&["table", "--sweep", spec, "--out", path, "--format", "json"]);
    let resumed = std::fs::read_to_string(&out).unwrap();
    assert_eq!(resumed.lines().count(), 12);
    let mut seen = std::collections::HashSet::new();
    for line in resumed.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let key = v["params"].to_string();
        assert!(seen.insert(key), "duplicate tuple: {line}");
    }
}

#[test]
fn table_extends_to_a_wider_grid() {
    let out = scratch_file("wider.csv");
    let path = out.to_str().unwrap();
    run(&["table", "--sweep", "quot:r=2,k=1..2,g=2", "--out", path, "--format", "csv"]);
    let first = std::fs::read_to_string(&out).unwrap();
    assert_eq!(first.lines().count(), 3, "header + 2 rows: {first}");
    run(&["table", "--sweep", "quot:r=2..3,k=1..2,g=2", "--out", path, "--format", "csv"]);
    let second = std::fs::read_to_string(&out).unwrap();
    assert_eq!(second.lines().count(), 5, "header + 4 rows: {second}");
    assert!(second.starts_with(&first), "old rows must be untouched");
}

#[test]
fn check_sweep_with_violations_exits_one() {
    let (code, stdout, _) = run(&[
        "table", "--sweep", "check-arb-quot:h=1,k=1,r=2,d=1,g=1..2", "--format", "plain",
    ]);
    assert_eq!(code, 1);
    assert!(stdout.contains("!="), "{stdout}");
}

#[test]
fn malformed_sweep_is_usage_error() {
    let (code, _, stderr) = run(&["table", "--sweep", "su-verlinde:r=1..2"]);
    assert_eq!(code, 2);
    assert!(!stderr.is_empty());
}
