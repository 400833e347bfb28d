// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ccp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<std::collections::HashMap<String, String>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers().unwrap().clone();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            headers
                .iter()
                .map(String::from)
                .zip(rec.iter().map(String::from))
                .collect()
        })
        .collect()
}

fn num(row: &std::collections::HashMap<String, String>, key: &str) -> f64 {
    row[key]
        .parse()
        .unwrap_or_else(|_| panic!("{key}={}", row[key]))
}

/// Checks the subset of JSON Schema used by the shipped schema files.
fn conforms(v: &Value, s: &Value, path: &str) -> Result<(), String> {
    if let Some(options) = s.get("oneOf").and_then(Value::as_array) {
        let hits = options
            .iter()
            .filter(|o| conforms(v, o, path).is_ok())
            .count();
        return if hits == 1 {
            Ok(())
        } else {
            Err(format!("{path}: {hits} oneOf branches match"))
        };
    }
    if let Some(allowed) = s.get("enum").and_then(Value::as_array) {
        if !allowed.contains(v) {
            return Err(format!("{path}: {v} not in enum"));
        }
    }
    if let Some(t) = s.get("type") {
        let types: Vec<&str> = match t {
            Value::String(one) => vec![one.as_str()],
            Value::Array(many) => many.iter().filter_map(Value::as_str).collect(),
            _ => vec![],
        };
        let ok = types.iter().any(|t| match *t {
            "object" => v.is_object(),
            "array" => v.is_array(),
            "string" => v.is_string(),
            "boolean" => v.is_boolean(),
            "null" => v.is_null(),
            "integer" => v.is_i64() || v.is_u64(),
            "number" => v.is_number(),
            _ => false,
        });
        if !ok {
            return Err(format!("{path}: {v} is not {types:?}"));
        }
    }
    if let (Some(min), Some(x)) = (s.get("minimum").and_then(Value::as_f64), v.as_f64()) {
        if x < min {
            return Err(format!("{path}: {x} < {min}"));
        }
    }
    if let Some(obj) = v.as_object() {
        for key in s
            .get("required")
            .and_then(Value::as_array)
            .into_iter()
            .flatten()
        {
            let key = key.as_str().unwrap();
            if !obj.contains_key(key) {
                return Err(format!("{path}: missing {key}"));
            }
        }
        let props = s.get("properties").and_then(Value::as_object);
        for (k, child) in obj {
            match props.and_then(|p| p.get(k)) {
                Some(sub) => conforms(child, sub, &format!("{path}.{k}"))?,
                None if s.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    return Err(format!("{path}: unexpected {k}"));
                }
                None => {}
            }
        }
    }
    if let Some(arr) = v.as_array() {
        let len = arr.len() as u64;
        if s.get("minItems")
            .and_then(Value::as_u64)
            .is_some_and(|m| len < m)
            || s.get("maxItems")
                .and_then(Value::as_u64)
                .is_some_and(|m| len > m)
        {
            return Err(format!("{path}: {len} items out of range"));
        }
        if let Some(items) = s.get("items") {
            for (i, item) in arr.iter().enumerate() {
                conforms(item, items, &format!("{path}[{i}]"))?;
            }
        }
    }
    Ok(())
}

fn schema(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schema")
        .join(name);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_schema(o: &Output, name: &str) {
    let v: Value = serde_json::from_str(&stdout(o)).expect("valid JSON");
    conforms(&v, &schema(name), "$").unwrap_or_else(|e| panic!("{name}: {e}"));
}

#[test]
fn exact_on_first_dataset_row() {
    let o = ccp(&[
        "exact",
        "--N",
        "60",
        "--M",
        "3",
        "--d",
        "2",
        "--mu",
        "1",
        "--row-from-table2",
        "1",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    assert!((num(r, "P1") - 0.99726).abs() < 5e-6);
    assert!((num(r, "P2") - 0.99863).abs() < 5e-6);
    assert!((num(r, "bound_P1") - 0.9890).abs() < 5e-5);
    assert!((num(r, "bound_PE") - 0.9945).abs() < 5e-5);
    assert!(num(r, "classical") > 0.0);
    assert_eq!(r["ground_truth"], "0");
}

#[test]
fn exact_degenerate_promise_always_succeeds() {
    let o = ccp(&["exact", "--mu", "0", "--samples", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 6);
    for r in &rows {
        for k in ["classical", "PE", "P1", "P2"] {
            assert!((num(r, k) - 1.0).abs() < 1e-12, "{k} {}", r[k]);
        }
    }
}

#[test]
fn exact_accepts_assignment_json() {
    let doc = r#"{"N":60,"M":3,"d":2,"mu":1,"x1":70,"pairs":[[55,71]],"yM":56}"#;
    let inline = ccp(&["exact", "--assignment", doc]);
    assert!(inline.status.success(), "{}", stderr(&inline));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.json");
    std::fs::write(&path, doc).unwrap();
    let file = ccp(&["exact", "--assignment", path.to_str().unwrap()]);
    assert!(file.status.success());
    let a = csv_rows(&stdout(&inline));
    let b = csv_rows(&stdout(&file));
    assert_eq!(a[0]["P2"], b[0]["P2"]);
    assert!((num(&a[0], "P1") - 0.99726).abs() < 5e-6);
}

#[test]
fn exact_rejects_bad_input() {
    let violated = ccp(&[
        "exact",
        "--assignment",
        r#"{"N":60,"M":3,"d":2,"mu":1,"x1":70,"pairs":[[55,71]],"yM":90}"#,
    ]);
    assert_eq!(violated.status.code(), Some(1));
    assert!(stderr(&violated).contains("promise violated"));

    let malformed = ccp(&["exact", "--assignment", r#"{"N":60,"M":3"#]);
    assert_eq!(malformed.status.code(), Some(1));
    assert!(stderr(&malformed).contains("malformed"));

    let invalid = ccp(&["exact", "--N", "2", "--mu", "1"]);
    assert_eq!(invalid.status.code(), Some(1));
    assert!(stderr(&invalid).contains("invalid instance"));

    let clash = ccp(&["exact", "--N", "30", "--row-from-table2", "1"]);
    assert_eq!(clash.status.code(), Some(1));

    let missing = ccp(&["exact", "--assignment", "/no/such/file.json"]);
    assert_eq!(missing.status.code(), Some(3));

    let unknown_flag = ccp(&["exact", "--bogus"]);
    assert_eq!(unknown_flag.status.code(), Some(1));
}

#[test]
fn montecarlo_within_three_sigma() {
    let o = ccp(&["montecarlo", "--trials", "100000", "--seed", "7"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 4);
    for r in &rows {
        let exact = num(r, "exact");
        let sigma = (exact * (1.0 - exact) / 100_000.0).sqrt();
        assert!((num(r, "empirical") - exact).abs() <= 3.0 * sigma, "{r:?}");
    }
}

#[test]
fn montecarlo_breakdown_of_classical_chain() {
    let o = ccp(&[
        "montecarlo",
        "--N",
        "10",
        "--M",
        "200",
        "--d",
        "2",
        "--mu",
        "1",
        "--trials",
        "20000",
        "--protocols",
        "classical",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert!((num(&rows[0], "empirical") - 0.5).abs() <= 0.05);
}

#[test]
fn montecarlo_independent_of_workers() {
    let args = |w: &'static str| {
        vec![
            "montecarlo",
            "--trials",
            "3000",
            "--seed",
            "99",
            "--vary",
            "N",
            "--grid",
            "20,40",
            "--eta",
            "0.95",
            "--workers",
            w,
        ]
    };
    let one = ccp(&args("1"));
    let eight = ccp(&args("8"));
    assert!(one.status.success());
    assert_eq!(one.stdout, eight.stdout);
}

#[test]
fn montecarlo_reports_skipped_points() {
    let o = ccp(&[
        "montecarlo",
        "--trials",
        "10",
        "--vary",
        "N",
        "--grid",
        "2,30",
        "--protocols",
        "P1",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 2);
    assert!(rows[0]["status"].starts_with("skipped"));
    assert_eq!(rows[1]["status"], "ok");

    let bad = ccp(&["montecarlo", "--trials", "0"]);
    assert_eq!(bad.status.code(), Some(1));
    let typo = ccp(&["montecarlo", "--vary", "N", "--grid", "abc"]);
    assert_eq!(typo.status.code(), Some(1));
}

#[test]
fn table2_reports_and_flags_average_mismatch() {
    let text = ccp(&["table2"]);
    assert_eq!(text.status.code(), Some(2), "{}", stderr(&text));
    let out = stdout(&text);
    assert!(out.contains("mean measured P2 0.99206"));
    assert!(out.contains("mean measured P1 0.99085"));
    assert!(stderr(&text).contains("P1"));

    let json = ccp(&["table2", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 40);
    assert_eq!(v["average_2_within_tolerance"], Value::Bool(true));
    assert_eq!(v["ideal_above_bounds"], Value::Bool(true));
}

#[test]
fn table2_missing_dataset_names_checksum() {
    let o = ccp(&["table2", "--dataset", "/no/such/table.csv"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains(ccp_checksum()));
}

fn ccp_checksum() -> &'static str {
    "e535b00dd1a810af74861938c3547e554b00bf3fca072eabf282584316535e9e"
}

#[test]
fn table2_accepts_verbatim_copy_only() {
    let dir = tempfile::tempdir().unwrap();
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/table2.csv");
    let text = std::fs::read_to_string(src).unwrap();
    let good = dir.path().join("good.csv");
    std::fs::write(&good, &text).unwrap();
    let o = ccp(&["table2", "--dataset", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, text.replacen("0.9944", "0.9945", 1)).unwrap();
    let o = ccp(&["table2", "--dataset", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn sweep_scaling_slopes() {
    let o = ccp(&["sweep-scaling", "--M", "3", "--d", "2", "--mu", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 10);
    assert!((num(&rows[0], "classical_slope") + 1.0).abs() <= 0.1);
    assert!((num(&rows[0], "quantum_slope") + 2.0).abs() <= 0.1);

    let short = ccp(&["sweep-scaling", "--grid", "30,60"]);
    assert_eq!(short.status.code(), Some(1));
}

#[test]
fn efficiency_crossover_and_ideal_column() {
    let o = ccp(&["efficiency"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    let crossing = rows
        .iter()
        .find(|r| r["kind"] == "crossover" && r["protocol"] == "P2")
        .expect("crossover row");
    let eta = num(crossing, "eta");
    assert!(eta > 0.0 && eta < 1.0);
    for r in rows
        .iter()
        .filter(|r| r["kind"] == "curve" && r["eta"] == "1.0")
    {
        assert_eq!(r["ideal"], r["adjusted"]);
    }

    let bad = ccp(&["efficiency", "--grid", "1.5"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eff.csv");
    let o = ccp(&[
        "efficiency",
        "--grid",
        "0.9",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).is_empty());
    assert!(std::fs::read_to_string(&path)
        .unwrap()
        .starts_with("kind,eta"));

    let o = ccp(&["efficiency", "--out", "/no/such/dir/x.csv"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn json_outputs_match_schemas() {
    assert_schema(
        &ccp(&["exact", "--samples", "2", "--json"]),
        "exact.schema.json",
    );
    assert_schema(
        &ccp(&["exact", "--row-from-table2", "3", "--json"]),
        "exact.schema.json",
    );
    assert_schema(
        &ccp(&[
            "montecarlo",
            "--trials",
            "50",
            "--vary",
            "mu",
            "--grid",
            "1,40",
            "--json",
        ]),
        "montecarlo.schema.json",
    );
    assert_schema(&ccp(&["table2", "--json"]), "table2.schema.json");
    assert_schema(
        &ccp(&["sweep-scaling", "--json"]),
        "sweep-scaling.schema.json",
    );
    assert_schema(&ccp(&["efficiency", "--json"]), "efficiency.schema.json");

    let doc: Value =
        serde_json::from_str(r#"{"N":60,"M":3,"d":2,"mu":1,"x1":70,"pairs":[[55,71]],"yM":56}"#)
            .unwrap();
    conforms(&doc, &schema("assignment.schema.json"), "$").unwrap();
}

#[test]
fn deterministic_given_seed() {
    let a = ccp(&["exact", "--samples", "3", "--seed", "5"]);
    let b = ccp(&["exact", "--samples", "3", "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
}
